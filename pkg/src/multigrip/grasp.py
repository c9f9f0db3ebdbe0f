"""Planar contact computation and grasp classification.

The grasp plane has the closing axis along x; the object sits centered on
the origin with the left finger approaching from -x and the right finger
from +x.  In the default pairing the 3S finger is the left one.

Classification runs the closure tests in precedence order (form closure,
then force closure, then caging) on the contact configuration the
mechanism can physically reach: both fingers advance symmetrically until
either one touches the object or the fingers touch each other.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .geometry import points_in_polygon, points_to_polygon_distance
from .modes import SurfaceKind, SurfaceShape
from .objects import (Circle, ObjectSpec, SideBoundary, ThinPlate,
                      object_polygon, side_boundary)

__all__ = [
    "SurfaceProfile",
    "Contact",
    "ContactSet",
    "GraspOutcome",
    "GraspResult",
    "DegenerateContactWarning",
    "CagingResolutionWarning",
    "DEFAULT_FACE_WIDTH",
    "surface_profile",
    "compute_contacts",
    "closure_separation",
    "form_closure_test",
    "force_closure_test",
    "caging_test",
    "classify_grasp",
    "write_contacts_csv",
]

DEFAULT_FACE_WIDTH = 20.0
_CONTACT_TOL = 1e-6     # mm; how closely a point must sit on both boundaries
_MERGE_RADIUS = 0.1     # mm; closer contact points collapse to one
_HULL_MARGIN = 1e-9     # strict-interior margin for positive-span tests


class DegenerateContactWarning(UserWarning):
    """Coincident contacts collapsed to fewer effective wrenches."""


class CagingResolutionWarning(UserWarning):
    """The caging grid is coarse relative to the narrowest clearance found."""


@dataclass(frozen=True)
class SurfaceProfile:
    """One finger face in the finger frame: x is protrusion toward the object."""

    shape: SurfaceShape
    width: float
    polyline: np.ndarray

    @property
    def deformable(self) -> bool:
        return self.shape.kind is SurfaceKind.DEFORMABLE_FLAT

    def height(self, y: np.ndarray) -> np.ndarray:
        """Signed protrusion toward the object at lateral position y."""
        kind = self.shape.kind
        if kind in (SurfaceKind.FLAT, SurfaceKind.DEFORMABLE_FLAT):
            return np.zeros_like(np.asarray(y, dtype=float))
        r = self.shape.radius
        c = math.sqrt(r * r - (self.width / 2.0) ** 2)
        bulge = np.sqrt(np.maximum(r * r - np.square(y), 0.0)) - c
        return bulge if kind is SurfaceKind.CONVEX else -bulge

    def outward_normal(self, y: float) -> tuple[float, float]:
        """Unit normal of the face pointing toward the object (finger frame)."""
        kind = self.shape.kind
        if kind in (SurfaceKind.FLAT, SurfaceKind.DEFORMABLE_FLAT):
            return (1.0, 0.0)
        r = self.shape.radius
        nx = math.sqrt(max(r * r - y * y, 0.0)) / r
        ny = y / r
        return (nx, ny) if kind is SurfaceKind.CONVEX else (nx, -ny)


def surface_profile(shape: SurfaceShape, width: float = DEFAULT_FACE_WIDTH,
                    resolution: int = 129) -> SurfaceProfile:
    """Discretize a finger surface into a polyline spanning the face width.

    Flat and deformable-flat faces are straight segments; convex and
    concave faces are circular arcs whose chord is the face width, bulging
    toward and away from the object respectively.
    """
    if not width > 0:
        raise ValueError("face width must be positive")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if shape.kind in (SurfaceKind.CONVEX, SurfaceKind.CONCAVE):
        if width > 2 * shape.radius:
            raise ValueError(
                f"face width {width:g} mm exceeds the arc diameter "
                f"{2 * shape.radius:g} mm; the arc cannot span the face")
    ys = np.linspace(-width / 2.0, width / 2.0, resolution)
    probe = SurfaceProfile(shape=shape, width=width, polyline=np.empty((0, 2)))
    xs = probe.height(ys)
    return SurfaceProfile(shape=shape, width=width,
                          polyline=np.column_stack([xs, ys]))


@dataclass(frozen=True)
class Contact:
    point: tuple[float, float]
    normal: tuple[float, float]   # unit, pointing into the object
    finger: str                   # "3S" (left) or "4S" (right)


@dataclass(frozen=True)
class ContactSet:
    contacts: tuple[Contact, ...]
    rotation_free: bool = False   # rotations about the centroid are symmetries
    centroid: tuple[float, float] = (0.0, 0.0)

    def __len__(self) -> int:
        return len(self.contacts)

    def __iter__(self):
        return iter(self.contacts)


class GraspOutcome(Enum):
    FORM_CLOSURE = "form_closure"
    FORCE_CLOSURE = "force_closure"
    CAGING = "caging"
    FAIL = "fail"


@dataclass(frozen=True)
class GraspResult:
    outcome: GraspOutcome
    contacts: ContactSet
    separation: float
    posture_uncertain: bool = False
    reason: str = ""


# ---------------------------------------------------------------------------
# Contact computation

def _candidate_ys(boundary: SideBoundary, profile: SurfaceProfile,
                  grid: int) -> np.ndarray | None:
    lo = max(boundary.lo, -profile.width / 2.0)
    hi = min(boundary.hi, profile.width / 2.0)
    if hi <= lo:
        return None
    ys = [np.linspace(lo, hi, grid)]
    extras = [*boundary.corner_ys, *boundary.feature_ys,
              boundary.lo, boundary.hi,
              -profile.width / 2.0, profile.width / 2.0, 0.0]
    extras = [y for y in extras if lo <= y <= hi]
    if extras:
        ys.append(np.array(extras))
    out = np.unique(np.concatenate(ys))
    return out


def _side_clearance(spec_boundary: SideBoundary, profile: SurfaceProfile,
                    ys: np.ndarray, side: int) -> np.ndarray:
    """Clearance between object flank and finger front per lateral position.

    Independent of the finger position: the left finger at reference x_ref
    has clearance c(y) - x_ref, the right finger has x_ref - c(y).
    """
    bx = spec_boundary.x_of(ys)
    f = profile.height(ys)
    if side < 0:
        return bx - f
    return bx + f


def _first_contact_ref(boundary: SideBoundary, profile: SurfaceProfile,
                       side: int, grid: int) -> tuple[float, np.ndarray, np.ndarray]:
    ys = _candidate_ys(boundary, profile, grid)
    if ys is None:
        raise ValueError("no contact achievable: the finger face and the "
                         "object do not overlap laterally")
    c = _side_clearance(boundary, profile, ys, side)
    ref = float(c.min()) if side < 0 else float(c.max())
    return ref, ys, c


def _cluster_contacts(ys: np.ndarray, residual: np.ndarray,
                      tol: float, merge: float) -> list[float]:
    """Pick representative contact positions from near-zero residuals.

    Contiguous runs wider than the merge radius are extended contacts and
    contribute their two endpoints; narrow runs collapse to their best
    point.
    """
    mask = residual <= tol
    if not mask.any():
        return []
    ys_hit = ys[mask]
    res_hit = residual[mask]
    gaps = np.diff(ys_hit)
    typical = max(np.median(np.diff(ys)) if len(ys) > 1 else merge, 1e-9)
    breaks = np.nonzero(gaps > max(3.0 * typical, 1e-6))[0]
    runs = np.split(np.arange(len(ys_hit)), breaks + 1)
    points: list[float] = []
    for run in runs:
        span = ys_hit[run[-1]] - ys_hit[run[0]]
        if span <= merge:
            best = run[np.argmin(res_hit[run])]
            points.append(float(ys_hit[best]))
        else:
            points.extend([float(ys_hit[run[0]]), float(ys_hit[run[-1]])])
    return points


def _contact_normal(boundary: SideBoundary, profile: SurfaceProfile,
                    y: float, side: int, corner_tol: float = 1e-9) -> tuple[float, float]:
    at_obj_corner = any(abs(y - cy) <= corner_tol for cy in boundary.corner_ys)
    at_rim = abs(abs(y) - profile.width / 2.0) <= corner_tol
    if not at_obj_corner:
        return boundary.normal_of(y)
    if not at_rim:
        nx, ny = profile.outward_normal(y)
        return (nx, ny) if side < 0 else (-nx, ny)
    return (1.0, 0.0) if side < 0 else (-1.0, 0.0)


def _side_contacts(spec: ObjectSpec, profile: SurfaceProfile, side: int,
                   x_ref: float | None, finger: str, grid: int,
                   tol: float, merge: float) -> tuple[list[Contact], float]:
    boundary = side_boundary(spec, side)
    ref, ys, c = _first_contact_ref(boundary, profile, side, grid)
    if x_ref is None:
        x_ref = ref
    residual = (c - x_ref) if side < 0 else (x_ref - c)
    if residual.min() < -tol:
        raise ValueError(
            f"finger penetrates the object by {-residual.min():.3g} mm at the "
            "requested separation")
    contacts = []
    for y in _cluster_contacts(ys, residual, tol, merge):
        point = (float(boundary.x_of(np.array([y]))[0]), y)
        normal = _contact_normal(boundary, profile, y, side)
        contacts.append(Contact(point=point, normal=normal, finger=finger))
    return contacts, x_ref


def compute_contacts(obj: ObjectSpec, left: SurfaceProfile, right: SurfaceProfile,
                     gap: float | None = None, *, grid: int = 4001,
                     tol: float = _CONTACT_TOL,
                     merge: float = _MERGE_RADIUS) -> ContactSet:
    """Contact points between the object and the two opposed finger faces.

    With gap=None each finger advances along the closing axis to its own
    first contact with the object.  With an explicit gap the finger
    reference planes sit symmetrically about the origin, gap apart, and
    only points within the contact tolerance count (an empty set means the
    object is not touched at that separation).
    """
    x_left = None if gap is None else -gap / 2.0
    x_right = None if gap is None else gap / 2.0
    left_contacts, _ = _side_contacts(obj, left, -1, x_left, "3S", grid, tol, merge)
    right_contacts, _ = _side_contacts(obj, right, +1, x_right, "4S", grid, tol, merge)
    return ContactSet(contacts=tuple(left_contacts + right_contacts),
                      rotation_free=obj.rotation_symmetric,
                      centroid=(0.0, 0.0))


def closure_separation(obj: ObjectSpec, left: SurfaceProfile,
                       right: SurfaceProfile, *, grid: int = 4001
                       ) -> tuple[float, bool]:
    """Separation at which symmetric closing stops, and whether the object
    is touched there.

    Closing stops at the first contact of either finger with the object or
    of the fingers with each other, whichever happens at the larger
    separation.  Small objects nested in deep pockets can leave the fingers
    touching each other with the object untouched.
    """
    lb = side_boundary(obj, -1)
    rb = side_boundary(obj, +1)
    ref_l, _, _ = _first_contact_ref(lb, left, -1, grid)
    ref_r, _, _ = _first_contact_ref(rb, right, +1, grid)
    sep_obj = max(-2.0 * ref_l, 2.0 * ref_r)
    lo = max(-left.width / 2.0, -right.width / 2.0)
    hi = min(left.width / 2.0, right.width / 2.0)
    sep_fingers = 0.0
    if hi > lo:
        ys = np.linspace(lo, hi, grid)
        sep_fingers = float((left.height(ys) + right.height(ys)).max())
    separation = max(sep_obj, sep_fingers, 0.0)
    touched = sep_obj >= sep_fingers - _CONTACT_TOL
    return separation, touched


# ---------------------------------------------------------------------------
# Closure tests

def _effective_contacts(cset: ContactSet) -> list[Contact]:
    seen = {}
    for c in cset.contacts:
        key = (round(c.point[0], 9), round(c.point[1], 9),
               round(c.normal[0], 9), round(c.normal[1], 9))
        seen.setdefault(key, c)
    if len(seen) < len(cset.contacts):
        warnings.warn(
            f"{len(cset.contacts) - len(seen)} coincident contact(s) collapsed; "
            "the effective wrench set is smaller than the contact count",
            DegenerateContactWarning, stacklevel=3)
    return list(seen.values())


def _origin_strictly_inside(points: np.ndarray, margin: float = _HULL_MARGIN) -> bool:
    points = np.asarray(points, dtype=float)
    dim = points.shape[1]
    if len(points) < dim + 1:
        return False
    try:
        hull = ConvexHull(points)
    except QhullError:
        return False
    return bool(np.all(hull.equations[:, -1] <= -margin))


def _wrench_rows(contacts: list[Contact], centroid: tuple[float, float],
                 directions_per_contact) -> np.ndarray:
    arms = [math.hypot(c.point[0] - centroid[0], c.point[1] - centroid[1])
            for c in contacts]
    rho = max(max(arms, default=0.0), 1e-9)
    rows = []
    for c in contacts:
        px = c.point[0] - centroid[0]
        py = c.point[1] - centroid[1]
        for dx, dy in directions_per_contact(c):
            rows.append((dx, dy, (px * dy - py * dx) / rho))
    return np.array(rows)


def form_closure_test(cset: ContactSet) -> bool:
    """First-order form closure from frictionless contact normals alone.

    The normal wrenches must positively span the planar wrench space,
    checked as the origin lying strictly inside their convex hull.  For
    rotationally symmetric objects rotation about the centroid is a
    symmetry, not a mobility, so the test reduces to the force components
    spanning the translation plane.
    """
    if len(cset) == 0:
        raise ValueError("form closure test needs at least one contact")
    contacts = _effective_contacts(cset)
    if cset.rotation_free:
        dirs = np.array([c.normal for c in contacts])
        if len(dirs) < 3:
            return False
        return _origin_strictly_inside(dirs)
    if len(contacts) < 4:
        return False
    wrenches = _wrench_rows(contacts, cset.centroid, lambda c: (c.normal,))
    return _origin_strictly_inside(wrenches)


def force_closure_test(cset: ContactSet, mu: float) -> bool:
    """Planar force closure with Coulomb friction at every contact.

    Each contact contributes its two friction-cone edge directions; the
    edge wrenches must positively span the wrench space.  Frictionless
    cones collapse to the contact normals.
    """
    if mu < 0:
        raise ValueError("friction coefficient must be >= 0")
    if len(cset) == 0:
        raise ValueError("force closure test needs at least one contact")
    contacts = _effective_contacts(cset)
    if mu == 0.0 and cset.rotation_free:
        dirs = np.array([c.normal for c in contacts])
        if len(dirs) < 3:
            return False
        return _origin_strictly_inside(dirs)
    phi = math.atan(mu)

    def edges(c: Contact):
        nx, ny = c.normal
        if phi == 0.0:
            return ((nx, ny),)
        cos_p, sin_p = math.cos(phi), math.sin(phi)
        return ((nx * cos_p - ny * sin_p, nx * sin_p + ny * cos_p),
                (nx * cos_p + ny * sin_p, -nx * sin_p + ny * cos_p))

    wrenches = _wrench_rows(contacts, cset.centroid, edges)
    return _origin_strictly_inside(wrenches)


# ---------------------------------------------------------------------------
# Caging

def _finger_polygon(profile: SurfaceProfile, x_ref: float, side: int,
                    body_depth: float) -> np.ndarray:
    front = profile.polyline.copy()
    if side < 0:
        pts = np.column_stack([x_ref + front[:, 0], front[:, 1]])
        back_x = x_ref - body_depth
    else:
        pts = np.column_stack([x_ref - front[:, 0], front[:, 1]])
        back_x = x_ref + body_depth
    w = profile.width / 2.0
    back = np.array([[back_x, w], [back_x, -w]])
    return np.vstack([pts, back])


def _reachable_region(free: np.ndarray, seed: tuple[int, ...]) -> np.ndarray:
    """Free cells connected to the seed; axis 0 (rotation) wraps around."""
    from scipy import ndimage

    allowed = free.copy()
    allowed[seed] = True
    structure = ndimage.generate_binary_structure(3, 1)
    labels, _ = ndimage.label(allowed, structure=structure)
    reach = {int(labels[seed])}
    if allowed.shape[0] > 1:
        # merge components that touch across the rotation seam
        top, bottom = labels[0], labels[-1]
        both = (top > 0) & (bottom > 0)
        pairs = np.unique(np.stack([top[both], bottom[both]], axis=1), axis=0)
        changed = True
        while changed:
            changed = False
            for a, b in pairs:
                a, b = int(a), int(b)
                if (a in reach) != (b in reach):
                    reach.update((a, b))
                    changed = True
    region = np.isin(labels, sorted(reach))
    region &= allowed
    return region


def _rasterize_polygon(polygon: np.ndarray, xs: np.ndarray,
                       ys: np.ndarray) -> np.ndarray:
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    return points_in_polygon(centers, polygon).reshape(len(xs), len(ys))


def _blocked_by_convolution(finger_mask: np.ndarray, footprint: np.ndarray) -> np.ndarray:
    """Configuration-space obstacle: fingers dilated by the reflected footprint."""
    from scipy.signal import fftconvolve

    kernel = footprint[::-1, ::-1].astype(float)
    overlap = fftconvolve(finger_mask.astype(float), kernel, mode="same")
    return overlap > 0.5


def caging_test(obj: ObjectSpec, left: SurfaceProfile, right: SurfaceProfile,
                separation: float, *, cell: float = 0.5,
                angle_cell_deg: float = 5.0, body_depth: float = 15.0) -> bool:
    """Brute-force configuration-space check that the object cannot escape.

    The object's pose grid (x, y, and rotation for non-circular shapes) is
    classified penetration-free or blocked against the finger bodies at the
    given separation, then the free region connected to the rest pose is
    grown; the object is caged iff that region never reaches the border of
    the workspace box around the fingers.
    """
    poly_left = _finger_polygon(left, -separation / 2.0, -1, body_depth)
    poly_right = _finger_polygon(right, separation / 2.0, +1, body_depth)
    fingers = np.vstack([poly_left, poly_right])
    if isinstance(obj.shape, Circle):
        reach = obj.shape.radius
    else:
        outline = object_polygon(obj)
        reach = float(np.max(np.hypot(outline[:, 0], outline[:, 1])))
    x_lo = fingers[:, 0].min() - reach - 3 * cell
    x_hi = fingers[:, 0].max() + reach + 3 * cell
    y_lo = fingers[:, 1].min() - reach - 3 * cell
    y_hi = fingers[:, 1].max() + reach + 3 * cell
    xs = np.arange(x_lo, x_hi + cell, cell)
    ys = np.arange(y_lo, y_hi + cell, cell)
    ix0 = int(np.argmin(np.abs(xs)))
    iy0 = int(np.argmin(np.abs(ys)))

    if isinstance(obj.shape, Circle):
        r = obj.shape.radius
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        centers = np.column_stack([gx.ravel(), gy.ravel()])
        blocked = np.zeros(len(centers), dtype=bool)
        clearance = np.full(len(centers), math.inf)
        for poly in (poly_left, poly_right):
            dist = points_to_polygon_distance(centers, poly)
            inside = points_in_polygon(centers, poly)
            blocked |= inside | (dist < r - 1e-9)
            clearance = np.minimum(clearance, np.where(inside, -dist, dist - r))
        free3 = (~blocked.reshape(len(xs), len(ys)))[None, :, :]
        clearance3 = clearance.reshape(1, len(xs), len(ys))
    else:
        base = object_polygon(obj)
        finger_mask = (_rasterize_polygon(poly_left, xs, ys)
                       | _rasterize_polygon(poly_right, xs, ys))
        m = int(math.ceil(reach / cell)) + 1
        local = np.arange(-m, m + 1) * cell
        n_angles = max(int(round(360.0 / angle_cell_deg)), 1)
        free3 = np.zeros((n_angles, len(xs), len(ys)), dtype=bool)
        for ia in range(n_angles):
            a = math.radians(ia * angle_cell_deg)
            rot = np.array([[math.cos(a), -math.sin(a)],
                            [math.sin(a), math.cos(a)]])
            footprint = _rasterize_polygon(base @ rot.T, local, local)
            free3[ia] = ~_blocked_by_convolution(finger_mask, footprint)
        clearance3 = None

    seed = (0, ix0, iy0)
    region = _reachable_region(free3, seed)
    escaped = bool(region[:, 0, :].any() or region[:, -1, :].any()
                   or region[:, :, 0].any() or region[:, :, -1].any())
    if escaped and clearance3 is not None:
        hit = region & free3
        min_clearance = float(clearance3[hit].min()) if hit.any() else math.inf
        if min_clearance < 2 * cell:
            warnings.warn(
                f"escape path clearance {min_clearance:.3g} mm is below two "
                f"grid cells ({2 * cell:g} mm); result may be resolution-limited",
                CagingResolutionWarning, stacklevel=2)
    return not escaped


# ---------------------------------------------------------------------------
# Classification

def classify_grasp(obj: ObjectSpec, pair: tuple[SurfaceShape, SurfaceShape],
                   mu: float | None = None, *,
                   face_width: float = DEFAULT_FACE_WIDTH,
                   thin_threshold: float = 3.0,
                   caging_cell: float = 0.5,
                   caging_angle_deg: float = 5.0,
                   stroke: float | None = None) -> GraspResult:
    """Classify the grasp of an object in a given surface-pair mode.

    Precedence: form closure > force closure > caging > fail.  Two rule
    overrides reflect how the surfaces behave rather than rigid geometry:
    a deformable face cannot hold an object thinner than the thin-object
    threshold (it deforms around it and the object slips out), and a thin
    plate met by a concave pocket is pinched at the pocket rim with an
    uncertain final posture, reported as caging with a warning flag.
    """
    if mu is None:
        mu = obj.mu
    if stroke is not None and obj.closing_extent > stroke:
        raise ValueError(
            f"object extent {obj.closing_extent:g} mm exceeds the stroke "
            f"{stroke:g} mm")
    left = surface_profile(pair[0], face_width)
    right = surface_profile(pair[1], face_width)
    empty = ContactSet(contacts=(), rotation_free=obj.rotation_symmetric)

    deformable = left.deformable or right.deformable
    if deformable and obj.closing_extent < thin_threshold:
        return GraspResult(
            outcome=GraspOutcome.FAIL, contacts=empty, separation=math.nan,
            reason="object is thinner than the deformable-surface limit; the "
                   "face deforms around it and the object slips")

    separation, touched = closure_separation(obj, left, right)
    contacts = compute_contacts(obj, left, right, gap=separation)

    concave_involved = any(s.kind is SurfaceKind.CONCAVE for s in pair)
    if isinstance(obj.shape, ThinPlate) and concave_involved:
        return GraspResult(
            outcome=GraspOutcome.CAGING, contacts=contacts,
            separation=separation, posture_uncertain=True,
            reason="thin plate at a pocket rim: it may end up pinched at the "
                   "tip or tilted, so the final posture is uncertain")

    if touched and len(contacts) > 0:
        if form_closure_test(contacts):
            return GraspResult(GraspOutcome.FORM_CLOSURE, contacts, separation)
        if mu > 0 and force_closure_test(contacts, mu):
            return GraspResult(GraspOutcome.FORCE_CLOSURE, contacts, separation)

    if caging_test(obj, left, right, separation,
                   cell=caging_cell, angle_cell_deg=caging_angle_deg):
        return GraspResult(GraspOutcome.CAGING, contacts, separation,
                           reason="" if touched else
                           "fingers close on each other before reaching the "
                           "object; it is enclosed but untouched")
    return GraspResult(GraspOutcome.FAIL, contacts, separation,
                       reason="no closure and an escape path exists")


def write_contacts_csv(cset: ContactSet, stream) -> None:
    import csv

    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["x_mm", "y_mm", "nx", "ny", "finger"])
    for c in cset.contacts:
        writer.writerow([repr(c.point[0]), repr(c.point[1]),
                         repr(c.normal[0]), repr(c.normal[1]), c.finger])
