"""
Piecewise-Mobius homeomorphisms of the circle

A map is a cyclic list of breakpoints on RP^1 with one Mobius piece per arc:
piece k acts on the counterclockwise arc from breakpoint k to breakpoint k+1.
This module also holds the separating-plane constructions used to pick a
hull chart, the two-plane maps, and the synthesis of boundary maps from
finite laminations.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .adsgeom import TimeSide, bilinear, boundary_encode
from .errors import (
    CrossingLeaves,
    DegenerateTriple,
    GeometryError,
    NoEllipticSolution,
    NonPositiveWeight,
    NotHyperbolicComposition,
    OnGraph,
    SeparationFailed,
)
from .mobius import (
    IDENTITY,
    INFINITY,
    ONE,
    R_I,
    TWO_PI,
    ZERO,
    AntiMobius,
    Geodesic,
    IsometryClass,
    Mobius,
    RP1Point,
    Side,
    apply,
    apply_many,
    arc_midpoint,
    boundary_angle,
    boundary_angles,
    ccw_length,
    circle_distance,
    classify,
    exp_sl2,
    fixed_points,
    log_hyperbolic,
    mobius_distance,
    mobius_from_triples,
    triple_orientation,
)
from .models import EarthquakeMap, Lamination, LaminationSpec, LeafChoice, Stratum, ValidationReport

logger = logging.getLogger(__name__)

CONTINUITY_EPS = 1e-9
MERGE_EPS = 1e-9
ROOT_EPS = 1e-12


class TwoPlaneVariant(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class PiecewiseMobiusCircleMap:
    """Circle homeomorphism given by Mobius pieces between cyclically ordered breakpoints"""
    breakpoints: Tuple[RP1Point, ...] = ()
    pieces: Tuple[Mobius, ...] = (IDENTITY,)

    def __post_init__(self):
        breakpoints = tuple(self.breakpoints)
        pieces = tuple(self.pieces)
        # start at the breakpoint with the smallest angle
        if len(breakpoints) > 1 and len(pieces) == len(breakpoints):
            start = int(np.argmin([b.angle for b in breakpoints]))
            breakpoints = breakpoints[start:] + breakpoints[:start]
            pieces = pieces[start:] + pieces[:start]
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def global_map(cls, m: Mobius) -> "PiecewiseMobiusCircleMap":
        return cls((), (m,))

    @property
    def is_global(self) -> bool:
        return len(self.breakpoints) == 0

    @property
    def angles(self) -> np.ndarray:
        return np.array([b.angle for b in self.breakpoints])

    def piece_index(self, theta: float) -> int:
        n = len(self.breakpoints)
        if n == 0:
            return 0
        k = int(np.searchsorted(self.angles, theta, side="right")) - 1
        return k % n

    def piece_at(self, x: RP1Point) -> Mobius:
        return self.pieces[self.piece_index(boundary_angle(x))]

    def __call__(self, x: RP1Point) -> RP1Point:
        return evaluate(self, x)


CircleMap = PiecewiseMobiusCircleMap


class GraphCrossings(NamedTuple):
    """Points where two maps agree; `full_arcs` lists arcs on which they coincide"""
    points: List[RP1Point]
    full_arcs: List[int]

    @property
    def empty(self) -> bool:
        return not self.points and not self.full_arcs


# ============================================================================
# Evaluation and algebra
# ============================================================================

def evaluate(f: PiecewiseMobiusCircleMap, x: RP1Point) -> RP1Point:
    return apply(f.piece_at(x), x)


def evaluate_many(f: PiecewiseMobiusCircleMap, points: np.ndarray) -> np.ndarray:
    """Evaluate on an (n, 2) array of homogeneous pairs; returns unit pairs"""
    points = np.asarray(points, dtype=float)
    if f.is_global:
        out = apply_many(f.pieces[0], points)
    else:
        idx = np.searchsorted(f.angles, boundary_angles(points), side="right") - 1
        idx = np.mod(idx, len(f.breakpoints))
        out = np.empty_like(points)
        for k, piece in enumerate(f.pieces):
            mask = idx == k
            if np.any(mask):
                out[mask] = apply_many(piece, points[mask])
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def _arc_midpoints(breakpoints: Sequence[RP1Point]) -> List[RP1Point]:
    n = len(breakpoints)
    if n == 1:
        return [RP1Point.from_angle(breakpoints[0].angle + math.pi)]
    mids = []
    for k in range(n):
        theta0 = breakpoints[k].angle
        span = ccw_length(theta0, breakpoints[(k + 1) % n].angle)
        mids.append(RP1Point.from_angle(theta0 + 0.5 * span))
    return mids


def _sorted_unique(points: Iterable[RP1Point], tol: float = ROOT_EPS) -> List[RP1Point]:
    ordered = sorted(points, key=boundary_angle)
    unique: List[RP1Point] = []
    for p in ordered:
        if not unique or circle_distance(unique[-1], p) > tol:
            unique.append(p)
    if len(unique) > 1 and circle_distance(unique[0], unique[-1]) <= tol:
        unique.pop()
    return unique


def canonicalize(f: PiecewiseMobiusCircleMap, tol: float = MERGE_EPS) -> PiecewiseMobiusCircleMap:
    """Drop breakpoints between equal pieces"""
    breakpoints = list(f.breakpoints)
    pieces = list(f.pieces)
    changed = True
    while changed and len(breakpoints) > 1:
        changed = False
        n = len(breakpoints)
        for k in range(n):
            if mobius_distance(pieces[k - 1], pieces[k]) <= tol:
                del breakpoints[k]
                del pieces[k]
                changed = True
                break
    if len(breakpoints) <= 1:
        return PiecewiseMobiusCircleMap.global_map(pieces[0])
    return PiecewiseMobiusCircleMap(tuple(breakpoints), tuple(pieces))


def _from_cuts(cuts: List[RP1Point], piece_for) -> PiecewiseMobiusCircleMap:
    if not cuts:
        return PiecewiseMobiusCircleMap.global_map(piece_for(ONE))
    pieces = tuple(piece_for(mid) for mid in _arc_midpoints(cuts))
    return canonicalize(PiecewiseMobiusCircleMap(tuple(cuts), pieces))


def compose(f: PiecewiseMobiusCircleMap, g: PiecewiseMobiusCircleMap) -> PiecewiseMobiusCircleMap:
    """f after g"""
    g_inv = invert(g)
    cuts = _sorted_unique(list(g.breakpoints) + [evaluate(g_inv, b) for b in f.breakpoints])
    return _from_cuts(cuts, lambda mid: f.piece_at(evaluate(g, mid)) @ g.piece_at(mid))


def invert(f: PiecewiseMobiusCircleMap) -> PiecewiseMobiusCircleMap:
    if f.is_global:
        return PiecewiseMobiusCircleMap.global_map(f.pieces[0].inverse())
    images = tuple(apply(piece, b) for piece, b in zip(f.pieces, f.breakpoints))
    return PiecewiseMobiusCircleMap(images, tuple(p.inverse() for p in f.pieces))


def compose_global(m: Mobius, f: PiecewiseMobiusCircleMap) -> PiecewiseMobiusCircleMap:
    """m after f, for a single Mobius m"""
    return PiecewiseMobiusCircleMap(f.breakpoints, tuple(m @ p for p in f.pieces))


# ============================================================================
# Validation
# ============================================================================

def validate(f: PiecewiseMobiusCircleMap, tol: float = CONTINUITY_EPS) -> ValidationReport:
    """Check every invariant of a circle map; never raises"""
    report = ValidationReport()
    try:
        _validate_into(f, tol, report)
    except (GeometryError, ArithmeticError) as exc:
        report.fail(f"evaluation failed: {exc}")
    return report


def _validate_into(f: PiecewiseMobiusCircleMap, tol: float, report: ValidationReport):
    n = len(f.breakpoints)
    if len(f.pieces) != max(n, 1):
        report.fail(f"piece count {len(f.pieces)} does not match {n} breakpoints")
        return
    if n == 0:
        return
    angles = f.angles
    for k in range(n - 1):
        if angles[k + 1] - angles[k] <= ROOT_EPS:
            report.fail(f"breakpoints {k} and {k + 1} are not strictly cyclically ordered")
            return
    for k in range(n):
        b = f.breakpoints[k]
        left = apply(f.pieces[k - 1], b)
        right = apply(f.pieces[k], b)
        gap = circle_distance(left, right)
        if gap > tol:
            report.fail(f"continuity violation at breakpoint {k} (x={b.value:.6g}): jump {gap:.3g}")
    if not report.valid:
        return
    total = 0.0
    for k in range(n):
        start = apply(f.pieces[k], f.breakpoints[k])
        end = apply(f.pieces[k], f.breakpoints[(k + 1) % n])
        span = TWO_PI if n == 1 else ccw_length(start.angle, end.angle)
        total += span
    if abs(total - TWO_PI) > 1e-6:
        report.fail(f"orientation violation: images wind {total / TWO_PI:.3f} times around the circle")
        return
    if n >= 3:
        images = [apply(f.pieces[k], f.breakpoints[k]) for k in range(n)]
        for k in range(n):
            triple = (images[k], images[(k + 1) % n], images[(k + 2) % n])
            if triple_orientation(*triple, tol=0.0) != 1:
                report.fail(f"orientation violation: breakpoint images {k}..{k + 2} are reversed")
                return


# ============================================================================
# Graph crossings
# ============================================================================

def _projective_fixed_points(m: np.ndarray) -> Optional[List[RP1Point]]:
    """Fixed points on RP^1 of a real 2x2 matrix; None when it acts as the identity"""
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    # [m x, x] = 0 : -c u^2 + (a - d) u v + b v^2 = 0
    qa, qb, qc = -c, a - d, b
    scale = max(abs(qa), abs(qb), abs(qc))
    if scale <= 1e-13 * max(float(np.max(np.abs(m))), 1e-300):
        return None
    qa, qb, qc = qa / scale, qb / scale, qc / scale
    disc = qb * qb - 4.0 * qa * qc
    if disc < -1e-14:
        return []
    root = math.sqrt(max(disc, 0.0))
    half = -0.5 * (qb + math.copysign(root, qb))
    candidates = []
    for pair in ((half, qa), (qc, half)):
        if abs(pair[0]) + abs(pair[1]) > 0.0:
            candidates.append(RP1Point(*pair))
    return _sorted_unique(candidates)


def graph_crossings(
    f: PiecewiseMobiusCircleMap,
    g: Union[Mobius, AntiMobius],
    tol: float = ROOT_EPS,
) -> GraphCrossings:
    """Solutions of f(x) = g(x), solved in closed form arc by arc"""
    g_inv = g.inverse()
    n = len(f.breakpoints)
    points: List[RP1Point] = []
    full: List[int] = []
    for k, piece in enumerate(f.pieces):
        roots = _projective_fixed_points((g_inv @ piece).matrix)
        if roots is None:
            full.append(k)
            if n:
                points.extend([f.breakpoints[k], f.breakpoints[(k + 1) % n]])
            continue
        for x in roots:
            if n == 0 or _on_arc(x, f.breakpoints[k], f.breakpoints[(k + 1) % n], n, tol):
                points.append(x)
    return GraphCrossings(_sorted_unique(points), full)


def _on_arc(x: RP1Point, start: RP1Point, end: RP1Point, n: int, tol: float) -> bool:
    if n == 1:
        return True
    theta0 = start.angle
    offset = ccw_length(theta0, x.angle)
    return offset <= ccw_length(theta0, end.angle) + tol or offset >= TWO_PI - tol


def separation_margin(f: PiecewiseMobiusCircleMap, g: Mobius, samples: int = 1000) -> float:
    """Smallest circle distance between f(x) and g(x) over equidistributed x"""
    angles = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    points = np.column_stack([np.cos(0.5 * angles), -np.sin(0.5 * angles)])
    fx = boundary_angles(evaluate_many(f, points))
    gx = points @ g.matrix.T
    delta = np.abs(fx - boundary_angles(gx)) % TWO_PI
    return float(np.min(np.minimum(delta, TWO_PI - delta)))


# ============================================================================
# Normalization and separating planes
# ============================================================================

def normalize(f: PiecewiseMobiusCircleMap) -> Tuple[Mobius, PiecewiseMobiusCircleMap]:
    """alpha with alpha(f(0)) = 0 and alpha(f(inf)) = inf, and alpha after f"""
    f0, f1, finf = evaluate(f, ZERO), evaluate(f, ONE), evaluate(f, INFINITY)
    t = f1.value
    target = RP1Point.from_real(t) if math.isfinite(t) and t > 0 else ONE
    alpha = mobius_from_triples((f0, f1, finf), (ZERO, target, INFINITY))
    return alpha, compose_global(alpha, f)


def separating_plane(f: PiecewiseMobiusCircleMap) -> Mobius:
    """gamma whose dual plane has boundary graph(gamma^-1) disjoint from graph(f)"""
    alpha, _ = normalize(f)
    gamma = R_I @ alpha
    crossings = graph_crossings(f, gamma.inverse())
    if not crossings.empty:
        raise SeparationFailed(f"separating plane meets graph(f) at {len(crossings.points)} points")
    return gamma


def _rotation_to_zero(x: RP1Point) -> Mobius:
    # orthogonal matrix with x -> 0
    return Mobius(x.v, -x.u, x.u, x.v)


def separating_plane_through(f: PiecewiseMobiusCircleMap, x0: RP1Point, y0: RP1Point) -> Mobius:
    """Separating plane whose boundary contains (x0, y0), a point off graph(f)"""
    if circle_distance(evaluate(f, x0), y0) <= CONTINUITY_EPS:
        raise OnGraph(f"({x0.value:.6g}, {y0.value:.6g}) lies on the graph")
    mu, nu = _rotation_to_zero(x0), _rotation_to_zero(y0)
    reversing = nu.inverse() @ AntiMobius(-1.0, 0.0, 0.0, 1.0) @ mu
    crossings = graph_crossings(f, reversing)
    if crossings.full_arcs or len(crossings.points) != 2:
        raise SeparationFailed(f"expected two crossings with the reversing map, got {len(crossings.points)}")
    x, x_prime = crossings.points
    if triple_orientation(x, x0, x_prime) != 1:
        x, x_prime = x_prime, x
    fx, fx_prime = evaluate(f, x), evaluate(f, x_prime)
    mu1 = mobius_from_triples((x, x0, x_prime), (ZERO, ONE, INFINITY))
    mu2 = mobius_from_triples((fx, y0, fx_prime), (ZERO, RP1Point.from_real(-1.0), INFINITY))
    gamma = mu1.inverse() @ R_I @ mu2
    if not graph_crossings(f, gamma.inverse()).empty:
        raise SeparationFailed("constructed plane meets graph(f)")
    incidence = bilinear(boundary_encode(x0, y0), gamma.matrix) / float(np.linalg.norm(gamma.matrix))
    if abs(incidence) > 1e-9:
        raise SeparationFailed(f"constructed plane misses ({x0.value:.6g}, {y0.value:.6g}) by {incidence:.3g}")
    return gamma


def elliptic_two_pairs(x: RP1Point, y: RP1Point, x_prime: RP1Point, y_prime: RP1Point) -> Mobius:
    """Elliptic sigma with sigma(x) = y and sigma(x') = y'"""
    if circle_distance(x, x_prime) <= ROOT_EPS or circle_distance(y, y_prime) <= ROOT_EPS:
        raise DegenerateTriple("the two pairs need distinct sources and distinct targets")
    mu = _pair_to_zero_infinity(x, x_prime)
    nu = _pair_to_zero_infinity(y, y_prime)
    # the family nu^-1 diag(r, 1/r) mu has trace r k11 + k22 / r
    k = (mu @ nu.inverse()).matrix
    k11, k22 = k[0, 0], k[1, 1]
    small = 1e-15
    if abs(k11) <= small and abs(k22) <= small:
        r = 1.0
    elif abs(k11) <= small:
        r = abs(k22)
    elif abs(k22) <= small:
        r = 1.0 / abs(k11)
    elif k11 * k22 < 0:
        r = math.sqrt(-k22 / k11)
    else:
        if 2.0 * math.sqrt(k11 * k22) >= 2.0 - 1e-9:
            raise NoEllipticSolution("every map in the family has |trace| >= 2")
        r = math.sqrt(k22 / k11)
    sigma = nu.inverse() @ Mobius(r, 0.0, 0.0, 1.0 / r) @ mu
    if classify(sigma) is not IsometryClass.ELLIPTIC:
        raise NoEllipticSolution(f"selected map has trace {sigma.trace:.6g}")
    return sigma


def _pair_to_zero_infinity(p: RP1Point, q: RP1Point) -> Mobius:
    rows = np.array([[p.v, -p.u], [q.v, -q.u]])
    if np.linalg.det(rows) < 0:
        rows[0] = -rows[0]
    return Mobius.from_matrix(rows)


# ============================================================================
# Two-plane maps and support planes
# ============================================================================

def two_plane_map(gamma1: Mobius, gamma2: Mobius, variant: TwoPlaneVariant = TwoPlaneVariant.PLUS) -> PiecewiseMobiusCircleMap:
    """gamma1^-1 on the ccw arc between the fixed points of gamma2 gamma1^-1, gamma2^-1 on the other (swapped for minus)"""
    g = gamma2 @ gamma1.inverse()
    if classify(g) is not IsometryClass.HYPERBOLIC:
        raise NotHyperbolicComposition(f"gamma2 gamma1^-1 has trace {g.trace:.6g}")
    axis = fixed_points(g).axis
    first, second = gamma1.inverse(), gamma2.inverse()
    if TwoPlaneVariant(variant) is TwoPlaneVariant.MINUS:
        first, second = second, first
    return PiecewiseMobiusCircleMap((axis.p, axis.q), (first, second))


def support_plane_side(f: PiecewiseMobiusCircleMap, gamma: Mobius) -> Optional[TimeSide]:
    """
    Hull-free support-plane test: P_gamma supports the hull of graph(f) exactly
    when gamma after f has a fixed point and moves every other point the same
    way. Counterclockwise motion makes it a past support plane.
    """
    crossings = graph_crossings(f, gamma.inverse())
    if not crossings.points:
        return None
    h = compose_global(gamma, f)
    cuts = crossings.points
    directions = set()
    for k, mid in enumerate(_arc_midpoints(cuts)):
        image = evaluate(h, mid)
        if circle_distance(image, mid) <= 1e-12:
            continue
        end = cuts[(k + 1) % len(cuts)]
        try:
            directions.add(triple_orientation(mid, image, end, tol=0.0))
        except DegenerateTriple:
            continue
    if directions == {1}:
        return TimeSide.PAST
    if directions == {-1}:
        return TimeSide.FUTURE
    return None


def ridge_support_planes(gamma1: Mobius, gamma2: Mobius, ts: Sequence[float]) -> List[Mobius]:
    """Support planes exp(t log(gamma2 gamma1^-1)) gamma1 through the common geodesic"""
    g = gamma2 @ gamma1.inverse()
    if classify(g) is not IsometryClass.HYPERBOLIC:
        raise NotHyperbolicComposition(f"gamma2 gamma1^-1 has trace {g.trace:.6g}")
    a = log_hyperbolic(g)
    return [exp_sl2(t, a) @ gamma1 for t in ts]


# ============================================================================
# Finite earthquakes
# ============================================================================

def hyperbolic_along(leaf: Geodesic, length: float, attracting: RP1Point) -> Mobius:
    """Hyperbolic isometry with axis `leaf`, given translation length and attracting endpoint"""
    repelling = leaf.q if attracting == leaf.p else leaf.p
    mu = mobius_from_triples((repelling, arc_midpoint(repelling, attracting), attracting), (ZERO, ONE, INFINITY))
    half = 0.5 * length
    return mu.inverse() @ Mobius(math.exp(half), 0.0, 0.0, math.exp(-half)) @ mu


def check_lamination(leaves: Sequence[Geodesic], tol: float = ROOT_EPS):
    for i in range(len(leaves)):
        for j in range(i + 1, len(leaves)):
            a, b = leaves[i], leaves[j]
            if min(circle_distance(p, q) for p in a.endpoints for q in b.endpoints) <= tol:
                raise CrossingLeaves(f"leaves {i} and {j} share an endpoint")
            if triple_orientation(a.p, b.p, a.q) != triple_orientation(a.p, b.q, a.q):
                raise CrossingLeaves(f"leaves {i} and {j} cross")


def _gap_structure(endpoints: List[RP1Point], partner: List[int]):
    """Gaps as cycles of boundary arcs; arc j runs from endpoint j to endpoint j+1"""
    m = len(endpoints)
    gap_of_arc = [-1] * m
    gaps = []
    for start in range(m):
        if gap_of_arc[start] >= 0:
            continue
        arcs = []
        j = start
        while gap_of_arc[j] < 0:
            gap_of_arc[j] = len(gaps)
            arcs.append(j)
            j = partner[(j + 1) % m]
        gaps.append(arcs)
    return gaps, gap_of_arc


def finite_earthquake_boundary(spec: LaminationSpec) -> Tuple[PiecewiseMobiusCircleMap, EarthquakeMap]:
    """Boundary map of the finite earthquake described by `spec`, plus the exact earthquake"""
    leaves = list(spec.leaves)
    weights = list(spec.weights)
    if len(weights) != len(leaves):
        raise NonPositiveWeight(f"{len(leaves)} leaves but {len(weights)} weights")
    for i, w in enumerate(weights):
        if not w > 0:
            raise NonPositiveWeight(f"leaf {i} has weight {w}")
    check_lamination(leaves)
    side = Side(spec.side)
    lamination = Lamination(tuple(leaves))
    if not leaves:
        whole = Stratum((), (), IDENTITY)
        return PiecewiseMobiusCircleMap.global_map(IDENTITY), EarthquakeMap(side, lamination, (whole,), ())

    tagged = sorted(
        ((x, i) for i, leaf in enumerate(leaves) for x in leaf.endpoints),
        key=lambda item: boundary_angle(item[0]),
    )
    endpoints = [x for x, _ in tagged]
    owner = [i for _, i in tagged]
    m = len(endpoints)
    partner = [0] * m
    for j in range(m):
        partner[j] = next(k for k in range(m) if k != j and owner[k] == owner[j])
    gaps, gap_of_arc = _gap_structure(endpoints, partner)
    if not 0 <= spec.base < len(gaps):
        raise GeometryError(f"base stratum {spec.base} out of range (0..{len(gaps) - 1})")

    # each leaf joins the gap of the arc ending at either endpoint
    leaf_sides = {}
    for j in range(m):
        leaf_sides.setdefault(owner[j], []).append(((j - 1) % m, j))
    midpoints = _arc_midpoints(endpoints)

    isometries: List[Optional[Mobius]] = [None] * len(gaps)
    isometries[spec.base] = IDENTITY
    comparisons = {}
    queue = deque([spec.base])
    while queue:
        gap = queue.popleft()
        for leaf_index, ends in leaf_sides.items():
            (arc_a, _), (arc_b, _) = ends
            here, there = gap_of_arc[arc_a], gap_of_arc[arc_b]
            if gap not in (here, there):
                continue
            if gap == there:
                arc_a, arc_b = arc_b, arc_a
                here, there = there, here
            if isometries[there] is not None:
                continue
            s, s_prime = midpoints[arc_a], midpoints[arc_b]
            leaf = leaves[leaf_index]
            wanted = 1 if side is Side.LEFT else -1
            attracting = leaf.p if triple_orientation(s, s_prime, leaf.p) == wanted else leaf.q
            comp = hyperbolic_along(leaf, weights[leaf_index], attracting)
            isometries[there] = isometries[here] @ comp
            comparisons[leaf_index] = (here, comp)
            queue.append(there)

    strata = []
    for arcs in gaps:
        vertices, flags = [], []
        for j in arcs:
            vertices.extend([endpoints[j], endpoints[(j + 1) % m]])
            flags.extend([True, False])
        strata.append(Stratum(tuple(vertices), tuple(flags), isometries[gap_of_arc[arcs[0]]]))

    choices = []
    for leaf_index, (here, comp) in sorted(comparisons.items()):
        half = exp_sl2(0.5, log_hyperbolic(comp))
        index = lamination.leaves.index(leaves[leaf_index])
        choices.append(LeafChoice(index, 0.5, isometries[here] @ half))
    choices.sort(key=lambda c: c.leaf_index)

    f = PiecewiseMobiusCircleMap(tuple(endpoints), tuple(isometries[gap_of_arc[j]] for j in range(m)))
    logger.debug(f"synthesized boundary map with {len(leaves)} leaves and {len(gaps)} gaps")
    return f, EarthquakeMap(side, lamination, tuple(strata), tuple(choices))
