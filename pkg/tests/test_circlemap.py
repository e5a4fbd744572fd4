import math

import numpy as np
import pytest

from conftest import QUARTER, random_lamination

from ads_earthquake.adsgeom import TimeSide, bilinear, boundary_encode
from ads_earthquake.circlemap import (
    PiecewiseMobiusCircleMap,
    TwoPlaneVariant,
    canonicalize,
    compose,
    elliptic_two_pairs,
    evaluate,
    evaluate_many,
    finite_earthquake_boundary,
    graph_crossings,
    hyperbolic_along,
    invert,
    normalize,
    ridge_support_planes,
    separating_plane,
    separating_plane_through,
    separation_margin,
    support_plane_side,
    two_plane_map,
    validate,
)
from ads_earthquake.errors import (
    CrossingLeaves,
    NoEllipticSolution,
    NonPositiveWeight,
    NotHyperbolicComposition,
    OnGraph,
)
from ads_earthquake.mobius import (
    IDENTITY,
    INFINITY,
    ONE,
    R_I,
    ZERO,
    Geodesic,
    IsometryClass,
    Mobius,
    RP1Point,
    Side,
    apply,
    arc_midpoint,
    circle_distance,
    classify,
    equals,
    mobius_from_triples,
    triple_orientation,
)
from ads_earthquake.models import LaminationSpec

SCALE4 = Mobius(2.0, 0.0, 0.0, 0.5)
SHIFT = Mobius(1.0, 1.0, 0.0, 1.0)


def real(x):
    return RP1Point.from_real(x)


def circle_points(n: int, offset: float = 0.0123):
    return [RP1Point.from_angle(offset + 2 * math.pi * k / n) for k in range(n)]


def max_disagreement(f, g, n: int = 500) -> float:
    return max(circle_distance(evaluate(f, x), evaluate(g, x)) for x in circle_points(n))


class TestEvaluation:
    def test_simple_map(self, simple_map):
        assert evaluate(simple_map, real(1.0)).value == pytest.approx(4.0)
        assert evaluate(simple_map, real(-3.0)).value == pytest.approx(-3.0)
        assert evaluate(simple_map, ZERO).value == pytest.approx(0.0)
        assert evaluate(simple_map, INFINITY).is_infinite

    def test_inverse(self, simple_map):
        assert evaluate(invert(simple_map), real(4.0)).value == pytest.approx(1.0)

    def test_compose_with_inverse_is_identity(self, simple_map):
        h = compose(simple_map, invert(simple_map))
        assert h.is_global
        assert equals(h.pieces[0], IDENTITY)

    def test_compose_refines_breakpoints(self, simple_map):
        shifted = PiecewiseMobiusCircleMap.global_map(SHIFT)
        h = compose(simple_map, shifted)
        assert evaluate(h, real(-0.5)).value == pytest.approx(2.0)
        assert evaluate(h, real(-2.0)).value == pytest.approx(-1.0)
        assert validate(h).valid

    def test_vectorized_matches_scalar(self, simple_map):
        points = circle_points(64)
        stacked = np.array([[p.u, p.v] for p in points])
        out = evaluate_many(simple_map, stacked)
        for row, p in zip(out, points):
            assert circle_distance(RP1Point(*row), evaluate(simple_map, p)) < 1e-12

    def test_breakpoints_start_at_smallest_angle(self):
        f = PiecewiseMobiusCircleMap((ZERO, INFINITY), (SCALE4, IDENTITY))
        assert f.breakpoints[0].is_infinite
        assert f.pieces[0] == IDENTITY

    def test_canonicalize_drops_redundant_breakpoints(self):
        f = PiecewiseMobiusCircleMap((INFINITY, ZERO, ONE), (IDENTITY, SCALE4, SCALE4))
        g = canonicalize(f)
        assert len(g.breakpoints) == 2
        assert max_disagreement(f, g) < 1e-12


class TestValidate:
    def test_simple_map_is_valid(self, simple_map):
        assert validate(simple_map).valid

    def test_global_map_is_valid(self):
        assert validate(PiecewiseMobiusCircleMap.global_map(SCALE4)).valid

    def test_continuity_violation(self):
        report = validate(PiecewiseMobiusCircleMap((INFINITY, ZERO), (IDENTITY, SHIFT)))
        assert not report.valid
        assert "continuity" in report.first_violation

    def test_double_winding_is_an_orientation_violation(self):
        sources = [INFINITY, real(-1.0), ZERO, real(1.0)]
        targets = [INFINITY, ZERO, INFINITY, ZERO]
        pieces = []
        for k in range(4):
            start, end = sources[k], sources[(k + 1) % 4]
            image_start, image_end = targets[k], targets[(k + 1) % 4]
            pieces.append(
                mobius_from_triples(
                    (start, arc_midpoint(start, end), end),
                    (image_start, arc_midpoint(image_start, image_end), image_end),
                )
            )
        report = validate(PiecewiseMobiusCircleMap(tuple(sources), tuple(pieces)))
        assert not report.valid
        assert "orientation" in report.first_violation

    def test_piece_count_mismatch(self):
        report = validate(PiecewiseMobiusCircleMap((INFINITY, ZERO, ONE), (IDENTITY, SCALE4)))
        assert not report.valid

    def test_random_boundary_maps_are_valid(self, rng):
        for n in (1, 2, 3, 5, 8):
            f, _ = finite_earthquake_boundary(random_lamination(rng, n))
            assert validate(f).valid, validate(f).violations
            points = circle_points(120, offset=0.05)
            for _ in range(200):
                a, b, c = rng.choice(len(points), 3, replace=False)
                triple = (points[a], points[b], points[c])
                images = tuple(evaluate(f, x) for x in triple)
                assert triple_orientation(*triple) == triple_orientation(*images)


class TestNormalize:
    def test_fixed_map_needs_no_correction(self, simple_map):
        alpha, g = normalize(simple_map)
        assert equals(alpha, IDENTITY)
        assert max_disagreement(simple_map, g) < 1e-12

    def test_translation(self):
        alpha, g = normalize(PiecewiseMobiusCircleMap.global_map(SHIFT))
        assert evaluate(g, ZERO).value == pytest.approx(0.0, abs=1e-12)
        assert evaluate(g, INFINITY).is_infinite
        assert evaluate(g, ONE).value > 0

    def test_idempotent(self, rng):
        f, _ = finite_earthquake_boundary(random_lamination(rng, 4))
        _, g = normalize(f)
        alpha, _ = normalize(g)
        assert equals(alpha, IDENTITY, tol=1e-9)


class TestSeparatingPlanes:
    def test_simple_map(self, simple_map):
        gamma = separating_plane(simple_map)
        assert equals(gamma, R_I)
        assert graph_crossings(simple_map, gamma.inverse()).empty
        assert separation_margin(simple_map, gamma.inverse()) > 0.1

    def test_global_scaling(self):
        f = PiecewiseMobiusCircleMap.global_map(SCALE4)
        assert equals(separating_plane(f), R_I)

    def test_elliptic_map(self):
        f = PiecewiseMobiusCircleMap.global_map(Mobius(1.0, 2.0, -1.0, -1.0))
        gamma = separating_plane(f)
        assert graph_crossings(f, gamma.inverse()).empty

    def test_random_maps(self, rng):
        for n in (1, 3, 6):
            f, _ = finite_earthquake_boundary(random_lamination(rng, n))
            gamma = separating_plane(f)
            assert separation_margin(f, gamma.inverse()) > 0

    @pytest.mark.parametrize("f", [
        PiecewiseMobiusCircleMap.global_map(SCALE4),
        PiecewiseMobiusCircleMap.global_map(Mobius(1.05, 0.02, 0.03, 0.96)),
    ])
    def test_through_a_point(self, f):
        x0, y0 = ONE, real(-1.0)
        gamma = separating_plane_through(f, x0, y0)
        assert apply(gamma.inverse(), x0).value == pytest.approx(-1.0)
        assert bilinear(boundary_encode(x0, y0), gamma.matrix) == pytest.approx(0.0, abs=1e-9)
        assert graph_crossings(f, gamma.inverse()).empty

    def test_through_a_point_of_the_graph(self, simple_map):
        with pytest.raises(OnGraph):
            separating_plane_through(simple_map, ONE, real(4.0))

    @pytest.mark.slow
    def test_many_random_maps(self):
        rng = np.random.default_rng(77)
        for case in range(1000):
            side = Side.LEFT if case % 2 == 0 else Side.RIGHT
            spec = random_lamination(rng, 1 + case % 8, side, weight_range=(0.1, 2.0))
            f, _ = finite_earthquake_boundary(spec)

            gamma = separating_plane(f)
            assert graph_crossings(f, gamma.inverse()).empty, case
            assert separation_margin(f, gamma.inverse()) > 0, case

            x0 = RP1Point.from_angle(rng.uniform(0.0, 2 * math.pi))
            y0 = RP1Point.from_angle(evaluate(f, x0).angle + rng.uniform(0.3, 2 * math.pi - 0.3))
            gamma = separating_plane_through(f, x0, y0)
            assert circle_distance(apply(gamma.inverse(), x0), y0) < 1e-9, case
            incidence = bilinear(boundary_encode(x0, y0), gamma.matrix) / np.linalg.norm(gamma.matrix)
            assert abs(incidence) <= 1e-9, case


class TestGraphCrossings:
    def test_identity_arc_is_reported_whole(self, simple_map):
        crossings = graph_crossings(simple_map, IDENTITY)
        assert crossings.full_arcs == [0]
        assert sorted(round(p.angle, 9) for p in crossings.points) == pytest.approx([0.0, math.pi])

    def test_scaling_meets_only_at_fixed_points(self, simple_map):
        crossings = graph_crossings(simple_map, Mobius(3.0, 0.0, 0.0, 1.0 / 3.0))
        assert not crossings.full_arcs
        assert len(crossings.points) == 2


class TestEllipticPairs:
    def test_swap_zero_and_infinity(self):
        sigma = elliptic_two_pairs(ZERO, INFINITY, INFINITY, ZERO)
        assert classify(sigma) is IsometryClass.ELLIPTIC
        assert apply(sigma, ZERO).is_infinite
        assert apply(sigma, INFINITY).value == pytest.approx(0.0)

    def test_zero_to_one_infinity_to_minus_one(self):
        sigma = elliptic_two_pairs(ZERO, ONE, INFINITY, real(-1.0))
        assert abs(sigma.trace) < 2
        assert apply(sigma, ZERO).value == pytest.approx(1.0)
        assert apply(sigma, INFINITY).value == pytest.approx(-1.0)

    def test_pairs_on_a_hyperbolic_graph(self):
        x, x_prime = ONE, real(-1.0)
        y, y_prime = apply(SCALE4, x), apply(SCALE4, x_prime)
        # the family is z -> 4z after the maps fixing 1 and -1
        scan = [
            abs((SCALE4 @ Mobius(math.cosh(s), math.sinh(s), math.sinh(s), math.cosh(s))).trace) < 2
            for s in np.linspace(-5.0, 5.0, 2001)
        ]
        assert not any(scan)
        with pytest.raises(NoEllipticSolution):
            elliptic_two_pairs(x, y, x_prime, y_prime)

    def test_fixed_pairs_have_no_elliptic_solution(self):
        with pytest.raises(NoEllipticSolution):
            elliptic_two_pairs(ZERO, ZERO, INFINITY, INFINITY)

    @pytest.mark.parametrize("pairs", [
        (1.0, 2.0, -1.0, 5.0),
        (0.5, -3.0, 3.0, 0.25),
        (-2.0, 1.0, 0.0, -1.0),
    ])
    def test_found_maps_are_elliptic_or_refused(self, pairs):
        x, y, x_prime, y_prime = (real(v) for v in pairs)
        try:
            sigma = elliptic_two_pairs(x, y, x_prime, y_prime)
        except NoEllipticSolution:
            return
        assert classify(sigma) is IsometryClass.ELLIPTIC
        assert circle_distance(apply(sigma, x), y) < 1e-9
        assert circle_distance(apply(sigma, x_prime), y_prime) < 1e-9


class TestTwoPlaneMaps:
    def test_plus_is_the_simple_map(self, simple_map):
        assert simple_map.breakpoints[0].is_infinite
        assert equals(simple_map.pieces[0], IDENTITY)
        assert equals(simple_map.pieces[1], SCALE4)

    def test_minus_swaps_the_pieces(self):
        f = two_plane_map(IDENTITY, QUARTER, TwoPlaneVariant.MINUS)
        assert equals(f.pieces[0], SCALE4)
        assert equals(f.pieces[1], IDENTITY)
        assert validate(f).valid

    def test_elliptic_composition(self):
        with pytest.raises(NotHyperbolicComposition):
            two_plane_map(IDENTITY, R_I)

    def test_first_arc_carries_gamma1_inverse(self):
        gamma1, gamma2 = Mobius(1.0, 0.5, 0.2, 1.1), Mobius(3.0, 1.0, 1.0, 2.0)
        f = two_plane_map(gamma1, gamma2)
        assert equals(f.pieces[0], gamma1.inverse())
        assert equals(f.pieces[1], gamma2.inverse())
        assert validate(f).valid


class TestSupportPlanes:
    def test_both_faces_of_the_simple_map_are_past(self, simple_map):
        assert support_plane_side(simple_map, IDENTITY) is TimeSide.PAST
        assert support_plane_side(simple_map, QUARTER) is TimeSide.PAST

    def test_bent_planes_through_the_leaf(self, simple_map):
        planes = ridge_support_planes(IDENTITY, QUARTER, [0.0, 0.5, 1.0])
        assert equals(planes[0], IDENTITY)
        assert equals(planes[1], Mobius(1 / math.sqrt(2), 0.0, 0.0, math.sqrt(2)))
        assert equals(planes[2], QUARTER)
        for gamma in planes:
            assert support_plane_side(simple_map, gamma) is TimeSide.PAST

    def test_separating_plane_supports_nothing(self, simple_map):
        assert support_plane_side(simple_map, R_I) is None


class TestFiniteEarthquakes:
    def test_hyperbolic_along(self):
        m = hyperbolic_along(Geodesic(ZERO, INFINITY), math.log(4.0), INFINITY)
        assert equals(m, SCALE4)

    def test_single_leaf_gives_the_simple_map(self, simple_spec, simple_map):
        f, E = finite_earthquake_boundary(simple_spec)
        assert max_disagreement(f, simple_map) < 1e-12
        assert E.side is Side.LEFT
        assert len(E.strata) == 2
        assert len(E.leaf_choices) == 1

    def test_no_leaves(self):
        f, E = finite_earthquake_boundary(LaminationSpec((), (), Side.LEFT, 0))
        assert f.is_global and equals(f.pieces[0], IDENTITY)
        assert len(E.strata) == 1 and E.strata[0].is_whole_plane

    def test_crossing_leaves(self):
        leaves = (Geodesic(real(-1.0), ONE), Geodesic(ZERO, real(2.0)))
        with pytest.raises(CrossingLeaves):
            finite_earthquake_boundary(LaminationSpec(leaves, (1.0, 1.0)))

    def test_shared_endpoint(self):
        leaves = (Geodesic(real(-1.0), ONE), Geodesic(ONE, real(2.0)))
        with pytest.raises(CrossingLeaves):
            finite_earthquake_boundary(LaminationSpec(leaves, (1.0, 1.0)))

    @pytest.mark.parametrize("weights", [(0.0,), (-1.0,), (1.0, 2.0)])
    def test_bad_weights(self, weights):
        with pytest.raises(NonPositiveWeight):
            finite_earthquake_boundary(LaminationSpec((Geodesic(ZERO, INFINITY),), weights))

    def test_right_earthquake_is_the_inverse_shear(self, simple_spec):
        left, _ = finite_earthquake_boundary(simple_spec)
        right_spec = LaminationSpec(simple_spec.leaves, simple_spec.weights, Side.RIGHT, 0)
        right, _ = finite_earthquake_boundary(right_spec)
        assert evaluate(right, ONE).value == pytest.approx(0.25)
        assert evaluate(left, ONE).value == pytest.approx(4.0)

    def test_adjacent_comparisons_are_exact(self, nested_spec):
        f, E = finite_earthquake_boundary(nested_spec)
        assert validate(f).valid
        assert len(E.strata) == 3
        lengths = [
            2 * math.acosh(abs((a.isometry.inverse() @ b.isometry).trace) / 2)
            for a, b in ((E.strata[i], E.strata[j]) for i in range(3) for j in range(i + 1, 3))
        ]
        for weight in nested_spec.weights:
            assert any(abs(length - weight) < 1e-9 for length in lengths)
