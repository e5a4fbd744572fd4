"""
Earthquake maps from pleated surfaces

The left and right projections send a support plane P_gamma to H^2 through
the fixed points of p gamma^-1 and gamma^-1 p. On every face of a pleated
boundary their composite is the isometry gamma^-1, so an earthquake is read
off face by face. This module also builds the analytic two-plane
earthquake, evaluates earthquakes and checks the earthquake axioms.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import reduce
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .adsgeom import AdSPoint, TimeSide, bilinear
from .circlemap import (
    PiecewiseMobiusCircleMap,
    TwoPlaneVariant,
    evaluate,
    ridge_support_planes,
    two_plane_map,
)
from .errors import InconsistentRidge, NotHyperbolicComposition, NotOnPlane, UncoveredPoint
from .hull import PleatedSurface
from .mobius import (
    PARABOLIC_EPS,
    TWO_PI,
    Geodesic,
    H2Point,
    IsometryClass,
    Mobius,
    RP1Point,
    Side,
    apply,
    arc_midpoint,
    boundary_angle,
    ccw_length,
    circle_distance,
    classify,
    fix_elliptic,
    fixed_points,
    geodesic_position,
    in_closed_arc,
    translate_side,
)
from .models import EarthquakeMap, Lamination, LeafChoice, PairRecord, Stratum, ValidationReport, VerificationReport

logger = logging.getLogger(__name__)

ON_PLANE_EPS = 1e-6
LEAF_EPS = 1e-12
TRACE_EPS = 1e-9
SEPARATION_EPS = 1e-9
RIDGE_EPS = 1e-6
GAP_EPS = 1e-6


# ============================================================================
# Projections
# ============================================================================

def project(p: AdSPoint, gamma: Mobius, which: str = "left") -> H2Point:
    """Left projection Fix(p gamma^-1) or right projection Fix(gamma^-1 p)"""
    incidence = bilinear(p.matrix, gamma.matrix)
    if abs(incidence) > ON_PLANE_EPS:
        raise NotOnPlane(f"point is off the plane dual to gamma (<p, gamma> = {incidence:.3g})")
    if which == "left":
        return fix_elliptic(p @ gamma.inverse())
    if which == "right":
        return fix_elliptic(gamma.inverse() @ p)
    raise ValueError(f"projection must be 'left' or 'right', got {which!r}")


def project_boundary(x: RP1Point, y: RP1Point, gamma: Mobius, which: str = "left") -> RP1Point:
    """Boundary extension of the projections on graph(gamma^-1)"""
    image = apply(gamma.inverse(), x)
    if abs(image.u * y.v - image.v * y.u) > ON_PLANE_EPS:
        raise NotOnPlane("boundary point is not on graph(gamma^-1)")
    if which == "left":
        return x
    if which == "right":
        return y
    raise ValueError(f"projection must be 'left' or 'right', got {which!r}")


def leaf_isometry(gamma1: Mobius, gamma2: Mobius, t: float) -> Mobius:
    """E on a bending leaf when the support plane exp(t a) gamma1 is chosen there"""
    return ridge_support_planes(gamma1, gamma2, [t])[0].inverse()


# ============================================================================
# Assembly
# ============================================================================

def _face_point_on_side(face_vertices: Sequence[RP1Point], leaf: Geodesic) -> bool:
    """Whether a face lies on the ccw arc p -> q side of one of its bounding leaves"""
    far = max(face_vertices, key=lambda x: min(circle_distance(x, leaf.p), circle_distance(x, leaf.q)))
    return in_closed_arc(far, leaf.p, leaf.q)


def strata_map(
    ps: PleatedSurface,
    t: float = 0.5,
    overrides: Optional[Dict[int, float]] = None,
) -> EarthquakeMap:
    """Earthquake of a pleated surface: one stratum per face with isometry gamma^-1, leaves at the ridges"""
    overrides = overrides or {}
    for ridge in ps.ridges:
        for face_index in ridge.faces:
            dual = ps.faces[face_index].dual
            for point in ridge.endpoints:
                encoded = point.matrix
                incidence = abs(bilinear(encoded, dual.matrix)) / float(np.linalg.norm(encoded) * np.linalg.norm(dual.matrix))
                if incidence > RIDGE_EPS:
                    raise InconsistentRidge(f"ridge {ridge.vertex_ids} is off face {face_index} ({incidence:.3g})")

    ridge_pairs: List[set] = [set() for _ in ps.faces]
    for ridge in ps.ridges:
        for face_index in ridge.faces:
            ridge_pairs[face_index].add(frozenset(ridge.vertex_ids))

    strata = []
    for face_index, face in enumerate(ps.faces):
        isometry = face.dual.inverse()
        pairs = ridge_pairs[face_index]
        ids = list(face.vertex_ids)
        xs = {i: p.x for i, p in zip(face.vertex_ids, face.ideal_vertices)}
        kept = [i for i in ids if any(i in pair for pair in pairs)]
        if not kept:
            strata.append(Stratum((), (), isometry))
            continue
        position = {v: k for k, v in enumerate(ids)}
        flags = []
        for k, u in enumerate(kept):
            v = kept[(k + 1) % len(kept)]
            direct = (position[v] - position[u]) % len(ids) == 1
            flags.append(not (direct and frozenset((u, v)) in pairs))
        strata.append(Stratum(tuple(xs[i] for i in kept), tuple(flags), isometry))
    if sum(s.is_whole_plane for s in strata) > 1:
        logger.warning("pleated surface has several faces without ridges")

    leaves = [Geodesic(r.endpoints[0].x, r.endpoints[1].x) for r in ps.ridges]
    lamination = Lamination(tuple(leaves))
    choices = []
    for ridge, leaf in zip(ps.ridges, leaves):
        index = lamination.leaves.index(leaf)
        i, j = ridge.faces
        # gamma1 is the face on the ccw side p -> q of the leaf
        if not _face_point_on_side([p.x for p in ps.faces[i].ideal_vertices], leaf):
            i, j = j, i
        t_leaf = overrides.get(index, t)
        choices.append(LeafChoice(index, t_leaf, leaf_isometry(ps.faces[i].dual, ps.faces[j].dual, t_leaf)))
    choices.sort(key=lambda c: c.leaf_index)

    side = Side.LEFT if ps.side is TimeSide.PAST else Side.RIGHT
    logger.debug(f"strata map: {len(strata)} strata, {len(leaves)} leaves, {side.value}")
    return EarthquakeMap(side, lamination, tuple(strata), tuple(choices))


def simple_earthquake(
    gamma1: Mobius,
    gamma2: Mobius,
    variant: TwoPlaneVariant = TwoPlaneVariant.PLUS,
    t: float = 0.5,
) -> EarthquakeMap:
    """Earthquake along the single geodesic where two spacelike planes meet, built without a hull"""
    g = gamma2 @ gamma1.inverse()
    if classify(g) is not IsometryClass.HYPERBOLIC:
        raise NotHyperbolicComposition(f"gamma2 gamma1^-1 has trace {g.trace:.6g}")
    f = two_plane_map(gamma1, gamma2, variant)
    p, q = f.breakpoints
    first, second = f.pieces
    d1 = Stratum((p, q), (True, False), first)
    d2 = Stratum((q, p), (True, False), second)
    comp = first.inverse() @ second
    side = translate_side(comp, arc_midpoint(p, q), arc_midpoint(q, p))
    leaf = Geodesic(p, q)
    choice = LeafChoice(0, t, leaf_isometry(first.inverse(), second.inverse(), t))
    return EarthquakeMap(side, Lamination((leaf,)), (d1, d2), (choice,))


def inverse_earthquake(E: EarthquakeMap) -> EarthquakeMap:
    """E^-1 on the image strata; the inverse of a left earthquake is a right one"""
    strata = tuple(
        Stratum(tuple(apply(s.isometry, v) for v in s.ideal_vertices), s.boundary_arcs, s.isometry.inverse())
        for s in E.strata
    )
    images = []
    for k, leaf in enumerate(E.lamination.leaves):
        owner = _leaf_owner(E, k)
        images.append(Geodesic(apply(owner.isometry, leaf.p), apply(owner.isometry, leaf.q)))
    lamination = Lamination(tuple(images))
    choices = []
    for choice in E.leaf_choices:
        image = images[choice.leaf_index]
        choices.append(LeafChoice(lamination.leaves.index(image), choice.t, choice.isometry.inverse()))
    choices.sort(key=lambda c: c.leaf_index)
    return EarthquakeMap(E.side.opposite, lamination, strata, tuple(choices))


def _leaf_owner(E: EarthquakeMap, leaf_index: int) -> Stratum:
    leaf = E.lamination.leaves[leaf_index]
    for stratum in E.strata:
        for u, v in stratum.chords():
            if _same_pair((u, v), (leaf.p, leaf.q)):
                return stratum
    return E.strata[0]


def _same_pair(a: Tuple[RP1Point, RP1Point], b: Tuple[RP1Point, RP1Point], tol: float = 1e-9) -> bool:
    direct = circle_distance(a[0], b[0]) <= tol and circle_distance(a[1], b[1]) <= tol
    swapped = circle_distance(a[0], b[1]) <= tol and circle_distance(a[1], b[0]) <= tol
    return direct or swapped


# ============================================================================
# Evaluation
# ============================================================================

def _inside_chord(z: H2Point, u: RP1Point, v: RP1Point, tol: float) -> Tuple[bool, float]:
    # the stratum lies on the side of the ccw arc v -> u
    g = Geodesic(u, v)
    position = geodesic_position(g, z)
    if not in_closed_arc(arc_midpoint(v, u), g.p, g.q):
        position = -position
    return position >= -tol, position


def containing_strata(E: EarthquakeMap, z: Union[H2Point, RP1Point], tol: float = LEAF_EPS) -> List[int]:
    """Indices of the gaps whose closure contains z"""
    found = []
    for index, stratum in enumerate(E.strata):
        if stratum.is_whole_plane:
            found.append(index)
        elif isinstance(z, RP1Point):
            if any(in_closed_arc(z, u, v, tol) for u, v in stratum.arcs()):
                found.append(index)
        elif all(_inside_chord(z, u, v, tol)[0] for u, v in stratum.chords()):
            found.append(index)
    return found


def _nearest_gap(E: EarthquakeMap, z, tol: float = GAP_EPS) -> Stratum:
    if isinstance(z, RP1Point):
        def score(s):
            return max((-min(circle_distance(z, u), circle_distance(z, v)) for u, v in s.arcs()), default=-math.inf)
    else:
        def score(s):
            return min((_inside_chord(z, u, v, 0.0)[1] for u, v in s.chords()), default=math.inf)
    best = max(E.strata, key=score)
    miss = -score(best)
    if miss > tol:
        raise UncoveredPoint(f"{z} lies {miss:.3g} outside every stratum")
    logger.warning(f"point not covered by any stratum; using the nearest one at {miss:.3g}")
    return best


def eval_earthquake(E: EarthquakeMap, z: Union[H2Point, RP1Point]):
    """E(z) for a boundary or interior point; points on a leaf use its leaf choice"""
    if isinstance(z, H2Point):
        choices = {c.leaf_index: c for c in E.leaf_choices}
        for k, leaf in enumerate(E.lamination.leaves):
            if k in choices and abs(geodesic_position(leaf, z)) <= LEAF_EPS:
                return apply(choices[k].isometry, z)
    found = containing_strata(E, z)
    stratum = E.strata[found[0]] if found else _nearest_gap(E, z)
    return apply(stratum.isometry, z)


def comparison(E: EarthquakeMap, i: int, j: int) -> Mobius:
    """(E on stratum i)^-1 after (E on stratum j), over gaps then leaf strata"""
    strata = E.all_strata()
    return strata[i].isometry.inverse() @ strata[j].isometry


def check_tiling(E: EarthquakeMap, tol: float = 1e-7) -> ValidationReport:
    """Boundary arcs of the gaps cover the circle once, overlapping only at leaf endpoints"""
    report = ValidationReport()
    arcs = [(u, v) for s in E.strata if not s.is_whole_plane for u, v in s.arcs()]
    if any(s.is_whole_plane for s in E.strata):
        if len(E.strata) > 1:
            report.fail("a whole-plane stratum sits next to other strata")
        return report
    total = sum(ccw_length(boundary_angle(u), boundary_angle(v)) for u, v in arcs)
    if abs(total - TWO_PI) > tol:
        report.fail(f"boundary arcs have total length {total:.12g}, expected 2 pi")
    for k, (u, v) in enumerate(arcs):
        mid = arc_midpoint(u, v)
        covering = sum(1 for a, b in arcs if in_closed_arc(mid, a, b))
        if covering != 1:
            report.fail(f"arc {k} midpoint is covered {covering} times")
    return report


# ============================================================================
# Verification
# ============================================================================

def _closure_contains(a: Stratum, b: Stratum) -> bool:
    if a.is_whole_plane or b.is_whole_plane:
        return True
    for leaf, other in ((a, b), (b, a)):
        if leaf.is_leaf:
            pair = leaf.ideal_vertices
            if other.is_leaf and _same_pair(pair, other.ideal_vertices):
                return True
            if any(_same_pair(pair, chord) for chord in other.chords()):
                return True
    return False


def _sample_points(stratum: Stratum) -> List[RP1Point]:
    return list(stratum.ideal_vertices) + [arc_midpoint(u, v) for u, v in stratum.arcs()]


def _straddles(stratum: Stratum, q_plus: RP1Point, q_minus: RP1Point, tol: float) -> bool:
    for u, v in stratum.arcs():
        for q in (q_plus, q_minus):
            if in_closed_arc(q, u, v) and min(circle_distance(q, u), circle_distance(q, v)) > tol:
                return True
    return False


def _signed_offsets(points, q_plus, q_minus, tol) -> List[Tuple[int, float]]:
    result = []
    for x in points:
        d = min(circle_distance(x, q_plus), circle_distance(x, q_minus))
        if d <= tol:
            result.append((0, d))
        else:
            result.append((1 if in_closed_arc(x, q_minus, q_plus) else -1, d))
    return result


def _check_pair(E: EarthquakeMap, strata: Sequence[Stratum], i: int, j: int, tol: float, eps: float) -> PairRecord:
    """One unordered pair; swapping i and j inverts comp and keeps its class, axis and side"""
    comp = strata[i].isometry.inverse() @ strata[j].isometry
    kind = classify(comp, eps)
    record = PairRecord(i, j, comp, kind.value)
    if kind is IsometryClass.IDENTITY:
        if not _closure_contains(strata[i], strata[j]):
            record.passed = False
            record.reason = "identity comparison between strata with disjoint closures"
        return record
    if kind is not IsometryClass.HYPERBOLIC:
        record.passed = False
        record.reason = f"comparison is {kind.value} (trace {comp.trace:.12g})"
        return record

    record.trace_margin = abs(comp.trace) - 2.0
    if record.trace_margin < TRACE_EPS:
        record.passed = False
        record.reason = f"trace margin {record.trace_margin:.3g} below {TRACE_EPS}"
        return record
    fixed = fixed_points(comp, eps)
    q_plus, q_minus = fixed.attracting, fixed.repelling
    if _straddles(strata[i], q_plus, q_minus, tol) or _straddles(strata[j], q_plus, q_minus, tol):
        record.passed = False
        record.reason = "axis endpoint inside a boundary arc of a stratum"
        record.separation_margin = -math.inf
        return record

    first = _signed_offsets(_sample_points(strata[i]), q_plus, q_minus, tol)
    second = _signed_offsets(_sample_points(strata[j]), q_plus, q_minus, tol)
    decisive = max(first, key=lambda item: item[1] if item[0] else -1.0)
    if decisive[0]:
        sign = decisive[0]
    else:
        other = max(second, key=lambda item: item[1] if item[0] else -1.0)
        sign = -other[0] if other[0] else 1
    margins = [d if s == sign else (0.0 if s == 0 else -d) for s, d in first]
    margins += [d if s == -sign else (0.0 if s == 0 else -d) for s, d in second]
    record.separation_margin = min(margins) if any(s for s, _ in first + second) else 0.0
    if record.separation_margin < -tol:
        record.passed = False
        record.reason = f"axis does not weakly separate the strata (margin {record.separation_margin:.3g})"
        return record

    # representatives on either side of the axis
    s = arc_midpoint(q_minus, q_plus) if sign == 1 else arc_midpoint(q_plus, q_minus)
    s_prime = arc_midpoint(q_plus, q_minus) if sign == 1 else arc_midpoint(q_minus, q_plus)
    side = translate_side(comp, s, s_prime)
    record.side = side.value
    if side is not E.side:
        record.passed = False
        record.reason = f"comparison translates {side.value}, earthquake is {E.side.value}"
    return record


def _verify_pairs(E: EarthquakeMap, strata, pairs, tol, eps) -> VerificationReport:
    report = VerificationReport()
    for i, j in pairs:
        report.add(_check_pair(E, strata, i, j, tol, eps))
    return report


def verify_earthquake(
    E: EarthquakeMap,
    workers: int = 1,
    tol: float = SEPARATION_EPS,
    parabolic_eps: float = PARABOLIC_EPS,
) -> VerificationReport:
    """
    Check every pair of strata, leaf strata included.

    Comp(S', S) is Comp(S, S')^-1, which has the same class, axis and
    translation side, so each unordered pair is checked once.
    """
    strata = E.all_strata()
    pairs = list(combinations(range(len(strata)), 2))
    if workers <= 1 or len(pairs) < 2 * workers:
        report = _verify_pairs(E, strata, pairs, tol, parabolic_eps)
    else:
        chunks = [pairs[k::workers] for k in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda chunk: _verify_pairs(E, strata, chunk, tol, parabolic_eps), chunks))
        report = reduce(VerificationReport.merge, parts, VerificationReport())
        report.records.sort(key=lambda r: (r.first, r.second))
    if report.failures:
        logger.warning(f"{len(report.failures)} of {len(report.records)} stratum pairs fail")
    return report


def boundary_agreement(
    E: EarthquakeMap,
    f: PiecewiseMobiusCircleMap,
    samples: int = 1000,
    seed: int = 0,
    delta: float = 1e-9,
) -> float:
    """Sup circle distance between E and f on random boundary points and around every breakpoint"""
    rng = np.random.default_rng(seed)
    angles = list(rng.uniform(0.0, TWO_PI, samples))
    for b in f.breakpoints:
        theta = boundary_angle(b)
        angles.extend([theta - delta, theta, theta + delta])
    worst = 0.0
    for theta in angles:
        x = RP1Point.from_angle(theta)
        worst = max(worst, circle_distance(eval_earthquake(E, x), evaluate(f, x)))
    return worst
