import dataclasses
import math
import time

import numpy as np
import pytest

from conftest import QUARTER, random_lamination

from ads_earthquake.circlemap import (
    PiecewiseMobiusCircleMap,
    compose,
    compose_global,
    evaluate,
    finite_earthquake_boundary,
)
from ads_earthquake.earthquake import boundary_agreement, check_tiling, eval_earthquake, strata_map
from ads_earthquake.errors import DegenerateFlat, GeometryError
from ads_earthquake.mobius import (
    IDENTITY,
    INFINITY,
    ZERO,
    H2Point,
    Mobius,
    RP1Point,
    Side,
    apply,
    circle_distance,
    equals,
    hyperbolic_distance,
)
from ads_earthquake.pipeline import EarthquakeExtractor, extract_earthquake
from ads_earthquake.schemas import DiagnosticsDocument


def leaf_hausdorff(found, expected) -> float:
    """Hausdorff distance between two endpoint sets on the circle"""
    a = [x for leaf in found for x in leaf.endpoints]
    b = [x for leaf in expected for x in leaf.endpoints]
    if not a and not b:
        return 0.0
    one = max(min(circle_distance(x, y) for y in b) for x in a)
    two = max(min(circle_distance(x, y) for x in a) for y in b)
    return max(one, two)


class TestSimpleMap:
    def test_recovers_both_planes(self, simple_map):
        result = extract_earthquake(simple_map, samples=500)
        E = result.earthquake
        assert E.side is Side.LEFT
        assert len(E.strata) == 2
        assert len(E.lamination) == 1
        isometries = [s.isometry for s in E.strata]
        assert any(equals(m, IDENTITY, tol=1e-6) for m in isometries)
        assert any(equals(m, QUARTER.inverse(), tol=1e-6) for m in isometries)
        leaf = E.lamination.leaves[0]
        assert circle_distance(leaf.p, INFINITY) < 1e-9
        assert circle_distance(leaf.q, ZERO) < 1e-9

    def test_report(self, simple_map):
        result = extract_earthquake(simple_map, samples=500)
        assert result.report.passed, [r.reason for r in result.report.failures]
        assert result.report.boundary_error < 1e-8

    def test_values_inside_the_strata(self, simple_map):
        E = extract_earthquake(simple_map, samples=200).earthquake
        assert eval_earthquake(E, H2Point(-1 + 1j)).z == pytest.approx(-1 + 1j)
        assert eval_earthquake(E, H2Point(1 + 1j)).z == pytest.approx(4 + 4j)
        assert eval_earthquake(E, H2Point(1j)).z == pytest.approx(2j)

    def test_diagnostics(self, simple_map):
        result = extract_earthquake(simple_map, samples=200)
        d = result.diagnostics
        assert d.past_faces == 2
        assert d.future_faces > 2
        assert d.merged_faces <= d.simplicial_faces
        assert d.worst_coplanarity < 1e-9
        assert d.min_trace_margin == pytest.approx(0.5)
        assert d.separation_margin > 0.0

    def test_diagnostics_fields(self, simple_map):
        result = extract_earthquake(simple_map, samples=128, verify=False)
        d = result.diagnostics
        assert 4 <= d.vertex_count <= 128
        assert d.simplicial_faces == 2 * d.vertex_count - 4
        assert d.merged_faces == len(result.hull.faces)
        assert d.past_faces + d.future_faces + d.lightlike_discarded == d.merged_faces
        assert 0.0 <= d.worst_coplanarity <= result.hull.tolerance
        assert d.sampling_delta is None
        document = DiagnosticsDocument.from_domain(d, boundary_error=0.0)
        assert document.past_faces == 2
        assert document.min_trace_margin == pytest.approx(0.5)

    def test_sampling_stability(self, simple_map):
        result = EarthquakeExtractor(samples=100, stability=True).extract(simple_map)
        assert result.diagnostics.sampling_delta < 1e-6

    def test_skip_verification(self, simple_map):
        assert EarthquakeExtractor(samples=64, verify=False).extract(simple_map).report is None

    def test_dump_hull(self, simple_map, tmp_path):
        path = tmp_path / "hull.off"
        EarthquakeExtractor(samples=64, dump_hull=path, verify=False).extract(simple_map)
        assert path.read_text().startswith("OFF\n")

    def test_leaf_override(self, simple_map):
        E = extract_earthquake(simple_map, samples=200, leaf_overrides={0: 1.0}).earthquake
        assert E.leaf_choices[0].t == 1.0
        assert equals(E.leaf_choices[0].isometry, QUARTER.inverse(), tol=1e-6)

    def test_equivariance(self, simple_map):
        alpha = Mobius(1.0, 0.3, 0.0, 1.0)
        beta = Mobius(1.25, 0.0, 0.0, 0.8)
        moved = compose_global(beta, compose(simple_map, PiecewiseMobiusCircleMap.global_map(alpha.inverse())))
        E = extract_earthquake(simple_map, samples=200).earthquake
        E_moved = extract_earthquake(moved, samples=200).earthquake
        for z in (H2Point(-1 + 1j), H2Point(2 + 0.5j), H2Point(-0.2 + 3j)):
            lhs = eval_earthquake(E_moved, apply(alpha, z))
            rhs = apply(beta, eval_earthquake(E, z))
            assert hyperbolic_distance(lhs, rhs) < 1e-6


    def test_prepare_keeps_the_map(self, simple_map):
        shifted = compose_global(Mobius(1.0, 0.3, 0.0, 1.0), simple_map)
        prepared = EarthquakeExtractor(samples=64).prepare(shifted)
        for x in (ZERO, INFINITY, RP1Point.from_real(2.0), RP1Point.from_real(-5.0)):
            assert circle_distance(evaluate(prepared, x), evaluate(shifted, x)) < 1e-12


class TestInputErrors:
    def test_single_mobius_is_flat(self):
        f = PiecewiseMobiusCircleMap.global_map(QUARTER)
        with pytest.raises(DegenerateFlat) as info:
            extract_earthquake(f)
        assert equals(info.value.mobius, QUARTER)

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            EarthquakeExtractor(samples=3)

    def test_discontinuous_map(self):
        f = PiecewiseMobiusCircleMap((INFINITY, ZERO), (IDENTITY, Mobius(1.0, 1.0, 0.0, 1.0)))
        with pytest.raises(GeometryError):
            extract_earthquake(f, samples=64)


class TestRoundTrip:
    @pytest.mark.parametrize("side", [Side.LEFT, Side.RIGHT])
    def test_three_leaves(self, rng, side):
        f, truth = finite_earthquake_boundary(random_lamination(rng, 3, side))
        result = extract_earthquake(f, samples=500, side=side)
        E = result.earthquake
        assert E.side is side
        assert len(E.lamination) == 3
        assert leaf_hausdorff(E.lamination, truth.lamination) < 1e-5
        assert result.report.passed, [r.reason for r in result.report.failures]
        assert result.report.boundary_error < 1e-5
        assert check_tiling(E).valid

    def test_strata_match_ground_truth(self, nested_spec):
        f, truth = finite_earthquake_boundary(nested_spec)
        E = extract_earthquake(f, samples=400).earthquake
        assert len(E.strata) == len(truth.strata)
        for stratum in truth.strata:
            assert any(equals(s.isometry, stratum.isometry, tol=1e-6) for s in E.strata)

    def test_leaf_choice_does_not_move_leaves(self, rng):
        f, _ = finite_earthquake_boundary(random_lamination(rng, 4))
        *_, ps = EarthquakeExtractor(samples=400).surface(f)
        laminations = [strata_map(ps, t).lamination for t in (0.0, 0.5, 1.0)]
        for other in laminations[1:]:
            for a, b in zip(laminations[0].leaves, other.leaves):
                assert circle_distance(a.p, b.p) < 1e-9
                assert circle_distance(a.q, b.q) < 1e-9

    def test_opposite_side_of_a_left_map(self, nested_spec):
        # the future boundary of a left earthquake's graph gives a right earthquake with the same boundary values
        f, _ = finite_earthquake_boundary(nested_spec)
        result = extract_earthquake(f, samples=400, side=Side.RIGHT, verify=False)
        assert result.earthquake.side is Side.RIGHT
        assert boundary_agreement(result.earthquake, f, samples=300) < 1e-2

    @pytest.mark.slow
    @pytest.mark.parametrize("case", range(50))
    def test_acceptance_runs(self, case):
        rng = np.random.default_rng(1000 + case)
        side = Side.LEFT if case % 2 == 0 else Side.RIGHT
        spec = random_lamination(rng, 1 + case % 8, side, weight_range=(0.1, 2.0), through_infinity=case % 5 == 0)
        f, truth = finite_earthquake_boundary(spec)
        started = time.perf_counter()
        result = extract_earthquake(f, samples=2000, side=side)
        elapsed = time.perf_counter() - started
        assert leaf_hausdorff(result.earthquake.lamination, truth.lamination) < 1e-5
        assert result.report.passed, [r.reason for r in result.report.failures]
        assert result.report.boundary_error < 1e-5
        assert elapsed < 5.0

    @pytest.mark.slow
    def test_weights_near_the_bounds(self):
        spec = random_lamination(np.random.default_rng(5), 5)
        for weight in (0.1, 2.0):
            f, _ = finite_earthquake_boundary(dataclasses.replace(spec, weights=(weight,) * 5))
            result = extract_earthquake(f, samples=2000)
            assert result.report.passed
            assert result.report.boundary_error < 1e-5
            assert math.isfinite(result.diagnostics.min_trace_margin)
