import math

import numpy as np
import pytest

from multigrip.grasp import (CagingResolutionWarning, Contact, ContactSet,
                             DegenerateContactWarning, GraspOutcome,
                             caging_test, classify_grasp, closure_separation,
                             compute_contacts, force_closure_test,
                             form_closure_test, surface_profile)
from multigrip.modes import concave, convex, deformable_flat, flat
from multigrip.objects import Box, Circle, ObjectSpec, ThinPlate
from oracles import oracle_positive_span, oracle_wrenches

CC = (concave(10.0), concave(10.0))
FF = (flat(), flat())

BIG = ObjectSpec(Circle(15.0), mu=0.5)
SMALL = ObjectSpec(Circle(5.0), mu=0.5)
BOX = ObjectSpec(Box(20.0, 25.0), mu=0.5)
PLATE = ObjectSpec(ThinPlate(30.0, 1.0), mu=0.5)
FIXTURES = [BIG, SMALL, BOX, PLATE]


class TestSurfaceProfile:
    def test_flat_segment(self):
        p = surface_profile(flat(), 20.0)
        assert p.polyline[:, 0] == pytest.approx(0.0)
        assert p.polyline[0, 1] == -10.0 and p.polyline[-1, 1] == 10.0

    def test_convex_semicircle_sagitta(self):
        p = surface_profile(convex(10.0), 20.0)
        assert p.height(np.array([0.0]))[0] == pytest.approx(10.0)
        assert p.height(np.array([10.0]))[0] == pytest.approx(0.0)

    def test_concave_sagitta_partial_arc(self):
        p = surface_profile(concave(10.0), 16.0)
        assert p.height(np.array([0.0]))[0] == pytest.approx(-4.0)

    def test_width_exceeding_arc_diameter(self):
        with pytest.raises(ValueError, match="cannot span"):
            surface_profile(convex(10.0), 21.0)

    def test_deformable_is_geometrically_flat(self):
        p = surface_profile(deformable_flat(), 20.0)
        assert p.deformable
        assert p.height(np.array([3.0]))[0] == 0.0


class TestComputeContacts:
    def test_large_circle_pocket_edges(self):
        lp = rp = surface_profile(concave(10.0), 20.0)
        cs = compute_contacts(BIG, lp, rp)
        assert len(cs) == 4
        xs = sorted(round(c.point[0], 6) for c in cs)
        edge_x = math.sqrt(15.0 ** 2 - 10.0 ** 2)
        assert xs == pytest.approx([-edge_x, -edge_x, edge_x, edge_x])
        assert sorted(c.point[1] for c in cs) == pytest.approx([-10, -10, 10, 10])
        for c in cs:
            # normals point through the circle center
            px, py = c.point
            r = math.hypot(px, py)
            assert c.normal == pytest.approx((-px / r, -py / r), abs=1e-9)

    def test_small_circle_nests_at_pocket_bottom(self):
        lp = rp = surface_profile(concave(10.0), 20.0)
        cs = compute_contacts(SMALL, lp, rp)
        assert len(cs) == 2
        assert sorted(c.point[0] for c in cs) == pytest.approx([-5.0, 5.0])
        assert [c.point[1] for c in cs] == pytest.approx([0.0, 0.0])

    def test_box_flat_parallel_overlap_endpoints(self):
        lp = rp = surface_profile(flat(), 20.0)
        cs = compute_contacts(BOX, lp, rp)
        assert len(cs) == 4
        ys = sorted(round(c.point[1], 6) for c in cs)
        assert ys == pytest.approx([-10.0, -10.0, 10.0, 10.0])
        assert all(abs(c.point[0]) == pytest.approx(10.0) for c in cs)

    def test_reflection_symmetry_across_closing_axis(self):
        lp = rp = surface_profile(concave(10.0), 20.0)
        cs = compute_contacts(BIG, lp, rp)
        points = {(round(c.point[0], 9), round(c.point[1], 9)) for c in cs}
        mirrored = {(x, -y) for x, y in points}
        assert points == mirrored

    def test_convex_fingers_touch_circle_at_apexes(self):
        lp = rp = surface_profile(convex(10.0), 20.0)
        cs = compute_contacts(BIG, lp, rp)
        assert len(cs) == 2
        assert sorted(c.point[0] for c in cs) == pytest.approx([-15.0, 15.0], abs=1e-6)
        assert [c.point[1] for c in cs] == pytest.approx([0.0, 0.0], abs=1e-3)
        for c in cs:
            assert abs(c.normal[0]) == pytest.approx(1.0, abs=1e-6)

    def test_mixed_pocket_flat_pair(self):
        lp = surface_profile(concave(10.0), 20.0)
        rp = surface_profile(flat(), 20.0)
        cs = compute_contacts(BIG, lp, rp)
        left = [c for c in cs if c.finger == "3S"]
        right = [c for c in cs if c.finger == "4S"]
        assert len(left) == 2   # pocket edges
        assert len(right) == 1  # flat tangency
        assert right[0].point[0] == pytest.approx(15.0, abs=1e-6)

    def test_composite_convex_faces_tangent_contact(self):
        from multigrip.objects import CompositeFaces, FaceArc
        pill = ObjectSpec(CompositeFaces(left=FaceArc("convex", 12.0),
                                         right=FaceArc("convex", 12.0),
                                         width=10.0, height=16.0), mu=0.5)
        lp = rp = surface_profile(flat(), 20.0)
        cs = compute_contacts(pill, lp, rp)
        assert len(cs) == 2
        bulge = 12.0 - math.sqrt(12.0 ** 2 - 8.0 ** 2)
        assert sorted(c.point[0] for c in cs) == pytest.approx(
            [-(5.0 + bulge), 5.0 + bulge], abs=1e-6)
        assert [c.point[1] for c in cs] == pytest.approx([0.0, 0.0], abs=1e-3)

    def test_explicit_gap_penetration_rejected(self):
        lp = rp = surface_profile(flat(), 20.0)
        with pytest.raises(ValueError, match="penetrates"):
            compute_contacts(BOX, lp, rp, gap=19.0)

    def test_explicit_gap_apart_gives_no_contacts(self):
        lp = rp = surface_profile(flat(), 20.0)
        cs = compute_contacts(BOX, lp, rp, gap=25.0)
        assert len(cs) == 0


class TestClosureSeparation:
    def test_large_circle_touches_before_fingers_meet(self):
        lp = rp = surface_profile(concave(10.0), 20.0)
        sep, touched = closure_separation(BIG, lp, rp)
        assert touched
        assert sep == pytest.approx(2 * math.sqrt(125.0), rel=1e-9)

    def test_small_circle_fingers_meet_first(self):
        lp = rp = surface_profile(concave(10.0), 20.0)
        sep, touched = closure_separation(SMALL, lp, rp)
        assert not touched
        assert sep == pytest.approx(0.0, abs=1e-9)

    def test_box_between_flats(self):
        lp = rp = surface_profile(flat(), 20.0)
        sep, touched = closure_separation(BOX, lp, rp)
        assert touched and sep == pytest.approx(20.0)


def _wrench_cross_check(cset: ContactSet, mu: float, expected: bool):
    vectors = oracle_wrenches(cset, mu)
    assert oracle_positive_span(vectors) == expected


class TestFormClosure:
    def test_large_circle_pocket_grasp(self):
        lp = rp = surface_profile(concave(10.0), 20.0)
        cs = compute_contacts(BIG, lp, rp)
        assert form_closure_test(cs) is True
        _wrench_cross_check(cs, 0.0, True)

    def test_two_contacts_never_form_closure(self):
        lp = rp = surface_profile(concave(10.0), 20.0)
        cs = compute_contacts(SMALL, lp, rp)
        assert len(cs) == 2
        assert form_closure_test(cs) is False
        _wrench_cross_check(cs, 0.0, False)

    def test_parallel_normals_through_one_line(self):
        contacts = tuple(
            Contact(point=p, normal=n, finger=f)
            for p, n, f in [((-5.0, -8.0), (1.0, 0.0), "3S"),
                            ((-5.0, 8.0), (1.0, 0.0), "3S"),
                            ((5.0, 8.0), (-1.0, 0.0), "4S"),
                            ((5.0, -8.0), (-1.0, 0.0), "4S")])
        cs = ContactSet(contacts=contacts)
        assert form_closure_test(cs) is False
        _wrench_cross_check(cs, 0.0, False)

    def test_square_pyramid_of_normals_closes(self):
        # four contacts around a square, normals inward: classic closure
        contacts = tuple(
            Contact(point=p, normal=n, finger="3S")
            for p, n in [((-5.0, 1.0), (1.0, 0.0)), ((5.0, -1.0), (-1.0, 0.0)),
                         ((1.0, -5.0), (0.0, 1.0)), ((-1.0, 5.0), (0.0, -1.0))])
        cs = ContactSet(contacts=contacts)
        assert form_closure_test(cs) is True
        _wrench_cross_check(cs, 0.0, True)

    def test_scaling_invariance_about_centroid(self):
        for scale in (0.5, 2.0, 7.0):
            contacts = tuple(
                Contact(point=(scale * x, scale * y), normal=n, finger="3S")
                for (x, y), n in [((-5.0, 1.0), (1.0, 0.0)),
                                  ((5.0, -1.0), (-1.0, 0.0)),
                                  ((1.0, -5.0), (0.0, 1.0)),
                                  ((-1.0, 5.0), (0.0, -1.0))])
            assert form_closure_test(ContactSet(contacts=contacts)) is True

    def test_coincident_contacts_reported(self):
        c = Contact(point=(1.0, 0.0), normal=(-1.0, 0.0), finger="3S")
        cs = ContactSet(contacts=(c, c, c, c))
        with pytest.warns(DegenerateContactWarning):
            assert form_closure_test(cs) is False

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            form_closure_test(ContactSet(contacts=()))


class TestForceClosure:
    def test_box_between_flats_with_friction(self):
        lp = rp = surface_profile(flat(), 20.0)
        cs = compute_contacts(BOX, lp, rp)
        assert force_closure_test(cs, 0.5) is True
        _wrench_cross_check(cs, 0.5, True)

    def test_box_frictionless_fails(self):
        lp = rp = surface_profile(flat(), 20.0)
        cs = compute_contacts(BOX, lp, rp)
        assert force_closure_test(cs, 0.0) is False
        _wrench_cross_check(cs, 0.0, False)

    def test_single_contact_fails(self):
        cs = ContactSet(contacts=(Contact((1.0, 0.0), (-1.0, 0.0), "3S"),))
        assert force_closure_test(cs, 0.8) is False

    def test_monotone_in_friction(self):
        lp = rp = surface_profile(flat(), 20.0)
        cs = compute_contacts(BOX, lp, rp)
        results = [force_closure_test(cs, mu) for mu in (0.0, 0.1, 0.3, 0.6, 1.0)]
        # once true it stays true
        first_true = results.index(True)
        assert all(results[first_true:])

    def test_antipodal_friction_grasp_on_circle(self):
        lp = rp = surface_profile(flat(), 20.0)
        cs = compute_contacts(SMALL, lp, rp)
        assert len(cs) == 2
        assert force_closure_test(cs, 0.5) is True
        _wrench_cross_check(cs, 0.5, True)

    def test_negative_mu_rejected(self):
        cs = ContactSet(contacts=(Contact((1.0, 0.0), (-1.0, 0.0), "3S"),))
        with pytest.raises(ValueError):
            force_closure_test(cs, -0.1)


class TestCaging:
    def test_small_circle_in_closed_pockets(self):
        lp = rp = surface_profile(concave(10.0), 20.0)
        sep, _ = closure_separation(SMALL, lp, rp)
        assert caging_test(SMALL, lp, rp, sep) is True

    def test_circle_between_flats_escapes_sideways(self):
        lp = rp = surface_profile(flat(), 20.0)
        assert caging_test(SMALL, lp, rp, 12.0) is False

    def test_form_closed_configuration_is_caged(self):
        lp = rp = surface_profile(concave(10.0), 20.0)
        sep, _ = closure_separation(BIG, lp, rp)
        assert caging_test(BIG, lp, rp, sep) is True

    def test_box_caging_with_rotation_grid(self):
        # a box in deep pockets cannot escape even allowing rotation
        small_box = ObjectSpec(Box(8.0, 8.0), mu=0.5)
        lp = rp = surface_profile(concave(10.0), 20.0)
        sep, _ = closure_separation(small_box, lp, rp)
        assert caging_test(small_box, lp, rp, sep, cell=1.0,
                           angle_cell_deg=30.0) is True

    def test_box_escape_with_rotation_grid(self):
        small_box = ObjectSpec(Box(6.0, 6.0), mu=0.5)
        lp = rp = surface_profile(flat(), 20.0)
        assert caging_test(small_box, lp, rp, 14.0, cell=1.0,
                           angle_cell_deg=30.0) is False

    def test_coarse_grid_reported(self):
        lp = rp = surface_profile(flat(), 20.0)
        with pytest.warns(CagingResolutionWarning):
            caging_test(SMALL, lp, rp, 10.8, cell=0.5)

    def test_cspace_obstacle_matches_exact_collision(self):
        # the rasterized configuration-space obstacle must agree with exact
        # polygon collision except within a cell of the boundary
        import random

        from multigrip.geometry import (points_to_polygon_distance,
                                        polygons_intersect)
        from multigrip.grasp import (_blocked_by_convolution, _finger_polygon,
                                     _rasterize_polygon)
        from multigrip.objects import object_polygon

        cell = 1.0
        lp = surface_profile(concave(10.0), 20.0)
        poly = _finger_polygon(lp, -6.0, -1, 15.0)
        xs = np.arange(-30.0, 30.0 + cell, cell)
        ys = np.arange(-25.0, 25.0 + cell, cell)
        mask = _rasterize_polygon(poly, xs, ys)
        base = object_polygon(ObjectSpec(Box(6.0, 9.0), mu=0.5))
        m = int(math.ceil(6.0 / cell)) + 1
        local = np.arange(-m, m + 1) * cell
        footprint = _rasterize_polygon(base, local, local)
        blocked = _blocked_by_convolution(mask, footprint)

        rng = random.Random(3)
        checked = 0
        for _ in range(400):
            i = rng.randrange(len(xs))
            j = rng.randrange(len(ys))
            moved = base + (xs[i], ys[j])
            exact_hit = polygons_intersect(moved, poly)
            edge_pts = np.vstack([
                moved + t * (np.roll(moved, -1, axis=0) - moved)
                for t in np.linspace(0.0, 1.0, 8, endpoint=False)])
            margin = float(points_to_polygon_distance(edge_pts, poly).min())
            if margin <= 1.5 * cell:
                continue  # within rasterization uncertainty of the boundary
            checked += 1
            assert blocked[i, j] == exact_hit
        assert checked > 100


class TestClassify:
    def test_acceptance_fixture_outcomes(self):
        assert classify_grasp(BIG, CC).outcome is GraspOutcome.FORM_CLOSURE
        assert classify_grasp(SMALL, CC).outcome is GraspOutcome.CAGING
        for obj in FIXTURES:
            assert classify_grasp(obj, FF).outcome is GraspOutcome.FORCE_CLOSURE
        plate_deformable = classify_grasp(PLATE, (flat(), deformable_flat()))
        assert plate_deformable.outcome is GraspOutcome.FAIL

    def test_form_closure_has_four_contacts(self):
        result = classify_grasp(BIG, CC)
        assert len(result.contacts) == 4

    def test_deformable_on_bulky_object_behaves_flat(self):
        result = classify_grasp(BOX, (flat(), deformable_flat()))
        assert result.outcome is GraspOutcome.FORCE_CLOSURE

    def test_thin_plate_pocket_rim_posture_flag(self):
        result = classify_grasp(PLATE, CC)
        assert result.outcome is GraspOutcome.CAGING
        assert result.posture_uncertain

    def test_precedence_form_beats_force(self):
        result = classify_grasp(BIG, CC, mu=1.0)
        assert result.outcome is GraspOutcome.FORM_CLOSURE

    def test_stroke_check(self):
        with pytest.raises(ValueError, match="stroke"):
            classify_grasp(BIG, FF, stroke=25.0)

    def test_frictionless_flat_grasp_fails_or_cages(self):
        result = classify_grasp(BOX, FF, mu=0.0)
        assert result.outcome in (GraspOutcome.CAGING, GraspOutcome.FAIL)

    def test_full_outcome_matrix_stays_stable(self):
        # frozen behavior table over the four reference modes
        modes = {
            "GC1": FF,
            "GC2": (convex(10.0), convex(10.0)),
            "GC3": CC,
            "GC4": (flat(), deformable_flat()),
        }
        expected = {
            ("large", "GC1"): GraspOutcome.FORCE_CLOSURE,
            ("large", "GC2"): GraspOutcome.FORCE_CLOSURE,
            ("large", "GC3"): GraspOutcome.FORM_CLOSURE,
            ("large", "GC4"): GraspOutcome.FORCE_CLOSURE,
            ("small", "GC1"): GraspOutcome.FORCE_CLOSURE,
            ("small", "GC2"): GraspOutcome.FORCE_CLOSURE,
            ("small", "GC3"): GraspOutcome.CAGING,
            ("small", "GC4"): GraspOutcome.FORCE_CLOSURE,
            ("box", "GC1"): GraspOutcome.FORCE_CLOSURE,
            # the pocket rims pinch the 20 mm box's flat faces
            ("box", "GC3"): GraspOutcome.FORCE_CLOSURE,
            ("box", "GC4"): GraspOutcome.FORCE_CLOSURE,
            ("plate", "GC1"): GraspOutcome.FORCE_CLOSURE,
            ("plate", "GC3"): GraspOutcome.CAGING,  # rim pinch, posture flag
            ("plate", "GC4"): GraspOutcome.FAIL,
        }
        objects = {"large": BIG, "small": SMALL, "box": BOX, "plate": PLATE}
        for (obj_name, mode_name), outcome in expected.items():
            result = classify_grasp(objects[obj_name], modes[mode_name])
            assert result.outcome is outcome, (obj_name, mode_name, result)
