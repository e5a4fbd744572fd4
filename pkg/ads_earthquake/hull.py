"""
Convex hull of graph(f) in a spacelike affine chart

Samples of the graph are embedded in the chart at a separating plane, where
the hull is an ordinary convex body of R^3. Its faces are merged into
polygons, classified as past or future support planes, and read off as the
two pleated boundary surfaces.
"""

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .adsgeom import (
    AdSBoundaryPoint,
    AdSPlane,
    ChartCoords,
    PLANE_TAU,
    PlaneKind,
    TimeSide,
    boundary_encode_many,
    chart_embed_many,
    chart_extract,
    det,
    plane_from_affine,
    side_sign,
)
from .circlemap import PiecewiseMobiusCircleMap, evaluate, evaluate_many
from .errors import DegenerateFlat, UnclassifiableFace
from .mobius import TWO_PI, Mobius, RP1Point, boundary_angles, circle_distance

logger = logging.getLogger(__name__)

HULL_EPS = 1e-9
MERGE_EPS = 1e-7
SNAP_EPS = 1e-6
NEAR_LIGHTLIKE = 1e-6
BREAKPOINT_CLEARANCE = 1e-7


@dataclass
class HullFace:
    """Planar face n . v = offset with outward unit normal and a ccw vertex cycle"""
    normal: np.ndarray
    offset: float
    vertices: Tuple[int, ...]
    residual: float = 0.0


@dataclass
class HullComplex:
    """Facial structure of a hull, simplicial straight out of quickhull and polygonal after merging"""
    points: np.ndarray
    faces: List[HullFace]
    tolerance: float
    chart: Optional[Mobius] = None
    xs: Optional[np.ndarray] = None
    ys: Optional[np.ndarray] = None
    merged: bool = False
    edge_face: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.edge_face:
            self.edge_face = _edge_map(self.faces)

    @property
    def vertex_ids(self) -> List[int]:
        return sorted({v for face in self.faces for v in face.vertices})

    def source(self, i: int) -> AdSBoundaryPoint:
        return AdSBoundaryPoint(RP1Point(*self.xs[i]), RP1Point(*self.ys[i]))

    def coords(self, i: int) -> ChartCoords:
        w, b, c = self.points[i]
        return ChartCoords(self.chart, float(w), float(b), float(c))

    def neighbor(self, a: int, b: int) -> Optional[int]:
        """Face on the other side of the directed edge (a, b)"""
        return self.edge_face.get((b, a))

    def adjacency(self) -> List[Tuple[int, int]]:
        pairs = set()
        for (a, b), f in self.edge_face.items():
            g = self.edge_face.get((b, a))
            if g is not None and f < g:
                pairs.add((f, g))
        return sorted(pairs)


def _edge_map(faces: Sequence[HullFace]) -> Dict[Tuple[int, int], int]:
    edges = {}
    for index, face in enumerate(faces):
        n = len(face.vertices)
        for k in range(n):
            edges[(face.vertices[k], face.vertices[(k + 1) % n])] = index
    return edges


# ============================================================================
# Sampling
# ============================================================================

def sample_arrays(f: PiecewiseMobiusCircleMap, n: int, refine: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """Homogeneous pairs (x, f(x)) for n equidistributed x plus, when refining, every breakpoint"""
    angles = np.linspace(0.0, TWO_PI, n, endpoint=False)
    if refine and f.breakpoints:
        bp_angles = f.angles
        gaps = np.abs(angles[:, None] - bp_angles[None, :]) % TWO_PI
        clear = np.min(np.minimum(gaps, TWO_PI - gaps), axis=1) > BREAKPOINT_CLEARANCE
        angles = angles[clear]
    xs = np.column_stack([np.cos(0.5 * angles), -np.sin(0.5 * angles)])
    ys = evaluate_many(f, xs)
    if refine and f.breakpoints:
        bx = np.array([[b.u, b.v] for b in f.breakpoints])
        by = np.array([[p.u, p.v] for p in (evaluate(f, b) for b in f.breakpoints)])
        xs = np.vstack([xs, bx])
        ys = np.vstack([ys, by])
        order = np.argsort(boundary_angles(xs), kind="stable")
        xs, ys = xs[order], ys[order]
    return xs, ys


def sample_graph(f: PiecewiseMobiusCircleMap, n: int, refine: bool = True) -> List[AdSBoundaryPoint]:
    if n < 4:
        raise ValueError(f"need at least 4 samples, got {n}")
    xs, ys = sample_arrays(f, n, refine)
    return [AdSBoundaryPoint(RP1Point(*x), RP1Point(*y)) for x, y in zip(xs, ys)]


# ============================================================================
# Quickhull
# ============================================================================

class _Face:
    __slots__ = ("vertices", "normal", "offset", "outside", "alive")

    def __init__(self, vertices, normal, offset):
        self.vertices = vertices
        self.normal = normal
        self.offset = offset
        self.outside = np.empty(0, dtype=int)
        self.alive = True


class QuickHull:
    """Incremental 3D hull with an absolute visibility tolerance; ties go to the lowest index"""

    def __init__(self, points: np.ndarray, eps: float = HULL_EPS):
        self.points = np.asarray(points, dtype=float)
        extent = self.points.max(axis=0) - self.points.min(axis=0) if len(self.points) else np.zeros(3)
        self.diameter = float(np.linalg.norm(extent))
        self.tol = eps * self.diameter
        self.faces: List[_Face] = []
        self.edges: Dict[Tuple[int, int], int] = {}
        self.pending: List[int] = []

    def _new_face(self, a: int, b: int, c: int) -> int:
        p = self.points
        normal = np.cross(p[b] - p[a], p[c] - p[a])
        length = np.linalg.norm(normal)
        if length > 0:
            normal = normal / length
        face = _Face((a, b, c), normal, float(normal @ p[a]))
        index = len(self.faces)
        self.faces.append(face)
        for edge in ((a, b), (b, c), (c, a)):
            self.edges[edge] = index
        return index

    def _assign(self, candidates: np.ndarray, face_ids: List[int]):
        if candidates.size == 0 or not face_ids:
            return
        normals = np.array([self.faces[i].normal for i in face_ids])
        offsets = np.array([self.faces[i].offset for i in face_ids])
        dist = self.points[candidates] @ normals.T - offsets
        best = np.argmax(dist, axis=1)
        keep = dist[np.arange(len(candidates)), best] > self.tol
        for slot, face_id in enumerate(face_ids):
            chosen = candidates[keep & (best == slot)]
            if chosen.size:
                self.faces[face_id].outside = np.sort(chosen)
                heapq.heappush(self.pending, face_id)

    def _initial_simplex(self) -> List[int]:
        p = self.points
        if len(p) < 4 or self.diameter == 0.0:
            raise DegenerateFlat("fewer than four distinct points")
        axis = int(np.argmax(p.max(axis=0) - p.min(axis=0)))
        i0, i1 = int(np.argmin(p[:, axis])), int(np.argmax(p[:, axis]))
        direction = p[i1] - p[i0]
        direction = direction / np.linalg.norm(direction)
        line = np.linalg.norm(np.cross(p - p[i0], direction), axis=1)
        i2 = int(np.argmax(line))
        if line[i2] <= self.tol:
            raise DegenerateFlat("all points are collinear")
        normal = np.cross(p[i1] - p[i0], p[i2] - p[i0])
        normal = normal / np.linalg.norm(normal)
        height = (p - p[i0]) @ normal
        i3 = int(np.argmax(np.abs(height)))
        if abs(height[i3]) <= self.tol:
            raise DegenerateFlat("all points are coplanar")
        return [i0, i1, i2, i3]

    def build(self) -> List[HullFace]:
        simplex = self._initial_simplex()
        centre = self.points[simplex].mean(axis=0)
        ids = []
        for a, b, c in itertools.combinations(simplex, 3):
            normal = np.cross(self.points[b] - self.points[a], self.points[c] - self.points[a])
            if normal @ (centre - self.points[a]) > 0:
                b, c = c, b
            ids.append(self._new_face(a, b, c))
        rest = np.array([i for i in range(len(self.points)) if i not in simplex], dtype=int)
        self._assign(rest, ids)

        while self.pending:
            face_id = heapq.heappop(self.pending)
            face = self.faces[face_id]
            if not face.alive or face.outside.size == 0:
                continue
            dist = self.points[face.outside] @ face.normal - face.offset
            eye = int(face.outside[int(np.argmax(dist))])
            self._add_point(face_id, eye)

        result = []
        for face in self.faces:
            if face.alive:
                result.append(HullFace(face.normal.copy(), face.offset, face.vertices))
        logger.debug(f"quickhull: {len(self.points)} points, {len(result)} faces")
        return result

    def _add_point(self, start: int, eye: int):
        eye_point = self.points[eye]
        visible = {start}
        stack = [start]
        while stack:
            current = self.faces[stack.pop()]
            a, b, c = current.vertices
            for u, v in ((a, b), (b, c), (c, a)):
                other = self.edges.get((v, u))
                if other is None or other in visible:
                    continue
                face = self.faces[other]
                if eye_point @ face.normal - face.offset > self.tol:
                    visible.add(other)
                    stack.append(other)

        horizon = []
        for face_id in sorted(visible):
            a, b, c = self.faces[face_id].vertices
            for u, v in ((a, b), (b, c), (c, a)):
                if self.edges.get((v, u)) not in visible:
                    horizon.append((u, v))

        orphans = []
        for face_id in visible:
            face = self.faces[face_id]
            face.alive = False
            orphans.append(face.outside)
            face.outside = np.empty(0, dtype=int)
            a, b, c = face.vertices
            for edge in ((a, b), (b, c), (c, a)):
                if self.edges.get(edge) == face_id:
                    del self.edges[edge]

        new_ids = [self._new_face(u, v, eye) for u, v in horizon]
        candidates = np.unique(np.concatenate(orphans)) if orphans else np.empty(0, dtype=int)
        candidates = candidates[candidates != eye]
        self._assign(candidates, new_ids)


def convex_hull_3d(points, eps: float = HULL_EPS) -> HullComplex:
    """Simplicial hull of a 3D point set"""
    qh = QuickHull(np.asarray(points, dtype=float), eps)
    faces = qh.build()
    return HullComplex(qh.points, faces, qh.tol)


# ============================================================================
# Coplanar merging
# ============================================================================

def _fit_plane(points: np.ndarray, hint: np.ndarray) -> Tuple[np.ndarray, float, float]:
    centre = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centre)
    normal = vt[-1]
    if normal @ hint < 0:
        normal = -normal
    offset = float(normal @ centre)
    residual = float(np.max(np.abs(points @ normal - offset)))
    return normal, offset, residual


def _boundary_cycle(directed: Dict[int, int]) -> Tuple[int, ...]:
    remaining = dict(directed)
    cycles = []
    while remaining:
        start = min(remaining)
        cycle = [start]
        current = remaining.pop(start)
        while current != start and current in remaining:
            cycle.append(current)
            current = remaining.pop(current)
        cycles.append(cycle)
    if len(cycles) > 1:
        logger.warning(f"merged face has {len(cycles)} boundary cycles; keeping the longest")
    return tuple(max(cycles, key=len))


def merge_coplanar(hc: HullComplex, eps_m: float = MERGE_EPS) -> HullComplex:
    """Greedy region merge of adjacent faces that share a plane"""
    faces = hc.faces
    region_of = [-1] * len(faces)
    merged: List[HullFace] = []
    for seed in range(len(faces)):
        if region_of[seed] >= 0:
            continue
        region_id = len(merged)
        region_of[seed] = region_id
        members = [seed]
        normal, offset = faces[seed].normal, faces[seed].offset
        # running plane: mean normal through the centroid of the region vertices
        normal_sum = faces[seed].normal.copy()
        region_vertices = set(faces[seed].vertices)
        point_sum = hc.points[list(region_vertices)].sum(axis=0)
        stack = [seed]
        while stack:
            current = faces[stack.pop()]
            n = len(current.vertices)
            for k in range(n):
                a, b = current.vertices[k], current.vertices[(k + 1) % n]
                other = hc.neighbor(a, b)
                if other is None or region_of[other] >= 0:
                    continue
                candidate = faces[other]
                if candidate.normal @ normal < 1.0 - eps_m:
                    continue
                distances = hc.points[list(candidate.vertices)] @ normal - offset
                if np.max(np.abs(distances)) > hc.tolerance:
                    continue
                region_of[other] = region_id
                members.append(other)
                stack.append(other)
                normal_sum += candidate.normal
                fresh = [v for v in candidate.vertices if v not in region_vertices]
                region_vertices.update(fresh)
                if fresh:
                    point_sum += hc.points[fresh].sum(axis=0)
                normal = normal_sum / np.linalg.norm(normal_sum)
                offset = float(normal @ point_sum) / len(region_vertices)
        directed = {}
        member_set = set(members)
        for index in members:
            verts = faces[index].vertices
            n = len(verts)
            for k in range(n):
                a, b = verts[k], verts[(k + 1) % n]
                if hc.neighbor(a, b) not in member_set:
                    directed[a] = b
        cycle = _boundary_cycle(directed)
        all_vertices = sorted({v for index in members for v in faces[index].vertices})
        fit_normal, fit_offset, residual = _fit_plane(hc.points[all_vertices], normal)
        merged.append(HullFace(fit_normal, fit_offset, cycle, residual))
    logger.debug(f"merged {len(faces)} simplicial faces into {len(merged)} polygons")
    return HullComplex(hc.points, merged, hc.tolerance, hc.chart, hc.xs, hc.ys, merged=True)


# ============================================================================
# Chart hull of a circle map
# ============================================================================

def build_hull(
    f: PiecewiseMobiusCircleMap,
    chart: Mobius,
    n: int,
    refine: bool = True,
    eps: float = HULL_EPS,
) -> HullComplex:
    """Sample graph(f), embed in the chart at `chart` and build the simplicial hull"""
    xs, ys = sample_arrays(f, n, refine)
    coords = chart_embed_many(chart, boundary_encode_many(xs, ys))
    qh = QuickHull(coords, eps)
    try:
        faces = qh.build()
    except DegenerateFlat as exc:
        raise DegenerateFlat(str(exc), mobius=f.pieces[0] if f.is_global else None) from exc
    return HullComplex(coords, faces, qh.tol, chart, xs, ys)


@dataclass
class FaceClassification:
    """Merged faces split by the time side of their support plane"""
    past: List[int]
    future: List[int]
    lightlike: List[int]
    planes: List[Optional[AdSPlane]]


def hull_centroid(hc: HullComplex) -> np.ndarray:
    ids = hc.vertex_ids
    w, b, c = hc.points[ids].mean(axis=0)
    return chart_extract(ChartCoords(hc.chart, float(w), float(b), float(c)))


def classify_faces(
    hc: HullComplex,
    near_lightlike: float = NEAR_LIGHTLIKE,
    tau: float = PLANE_TAU,
) -> FaceClassification:
    """Past faces carry past support planes (the hull lies to their future), and dually"""
    inside = hull_centroid(hc)
    result = FaceClassification([], [], [], [])
    for index, face in enumerate(hc.faces):
        plane = plane_from_affine(hc.chart, face.normal, face.offset, tau)
        if plane.kind is not PlaneKind.SPACELIKE:
            ratio = abs(det(plane.matrix))
            if plane.kind is PlaneKind.LIGHTLIKE or ratio <= near_lightlike:
                result.lightlike.append(index)
                result.planes.append(None)
                continue
            raise UnclassifiableFace(f"face {index} has a timelike plane (|det| = {ratio:.3g})")
        result.planes.append(plane)
        w, b, c = hc.points[list(face.vertices)].mean(axis=0)
        anchor = chart_extract(ChartCoords(hc.chart, float(w), float(b), float(c)))
        side = side_sign(plane, inside, anchor=anchor, chart=hc.chart)
        if side is TimeSide.ON:
            raise DegenerateFlat(f"hull interior lies on face {index}")
        (result.past if side is TimeSide.FUTURE else result.future).append(index)
    if result.lightlike:
        logger.info(f"discarded {len(result.lightlike)} lightlike faces")
    return result


# ============================================================================
# Pleated surfaces
# ============================================================================

@dataclass(frozen=True)
class PleatedFace:
    """Face of a pleated surface: dual isometry and ideal vertices in cyclic x-order"""
    dual: Mobius
    vertex_ids: Tuple[int, ...]
    ideal_vertices: Tuple[AdSBoundaryPoint, ...]


@dataclass(frozen=True)
class Ridge:
    """Bending geodesic shared by two faces of the same surface"""
    faces: Tuple[int, int]
    vertex_ids: Tuple[int, int]
    endpoints: Tuple[AdSBoundaryPoint, AdSBoundaryPoint]


@dataclass(frozen=True)
class PleatedSurface:
    side: TimeSide
    faces: Tuple[PleatedFace, ...]
    ridges: Tuple[Ridge, ...]

    def ridges_of(self, face: int) -> List[Ridge]:
        return [r for r in self.ridges if face in r.faces]


def _snap(point: AdSBoundaryPoint, f: Optional[PiecewiseMobiusCircleMap], eps: float) -> AdSBoundaryPoint:
    if f is None:
        return point
    for b in f.breakpoints:
        if circle_distance(point.x, b) <= eps:
            return AdSBoundaryPoint(b, evaluate(f, b))
    return point


def extract_pleated(
    hc: HullComplex,
    classification: FaceClassification,
    side: TimeSide,
    f: Optional[PiecewiseMobiusCircleMap] = None,
    snap_eps: float = SNAP_EPS,
) -> PleatedSurface:
    """Faces and ridges of the past or future boundary component"""
    chosen = classification.past if side is TimeSide.PAST else classification.future
    local = {face_index: k for k, face_index in enumerate(chosen)}
    cache: Dict[int, AdSBoundaryPoint] = {}

    def ideal(i: int) -> AdSBoundaryPoint:
        if i not in cache:
            cache[i] = _snap(hc.source(i), f, snap_eps)
        return cache[i]

    faces = []
    for face_index in chosen:
        ids = list(hc.faces[face_index].vertices)
        ids.sort(key=lambda i: boundary_angles(hc.xs[i:i + 1])[0])
        dual = classification.planes[face_index].dual
        faces.append(PleatedFace(dual, tuple(ids), tuple(ideal(i) for i in ids)))

    ridges = []
    for face_index in chosen:
        verts = hc.faces[face_index].vertices
        n = len(verts)
        for k in range(n):
            a, b = verts[k], verts[(k + 1) % n]
            other = hc.neighbor(a, b)
            if other is None or other not in local or other <= face_index:
                continue
            pair = (local[face_index], local[other])
            ridges.append(Ridge(pair, (a, b), (ideal(a), ideal(b))))
    ridges.sort(key=lambda r: r.faces)
    logger.debug(f"{side.value} surface: {len(faces)} faces, {len(ridges)} ridges")
    return PleatedSurface(side, tuple(faces), tuple(ridges))


# ============================================================================
# Oracle and debug output
# ============================================================================

def brute_force_hull(points, eps: float = HULL_EPS) -> List[Tuple[int, ...]]:
    """Facial structure by enumerating every triple; faces as sorted vertex-index tuples"""
    points = np.asarray(points, dtype=float)
    _, first = np.unique(points, axis=0, return_index=True)
    keep = np.sort(first)
    unique = points[keep]
    m = len(unique)
    if m < 4:
        return []
    extent = unique.max(axis=0) - unique.min(axis=0)
    tol = eps * float(np.linalg.norm(extent))
    triples = np.array(list(itertools.combinations(range(m), 3)))
    p0, p1, p2 = unique[triples[:, 0]], unique[triples[:, 1]], unique[triples[:, 2]]
    normals = np.cross(p1 - p0, p2 - p0)
    lengths = np.linalg.norm(normals, axis=1)
    usable = lengths > 1e-12 * float(np.linalg.norm(extent)) ** 2
    normals = normals[usable] / lengths[usable, None]
    p0 = p0[usable]
    dist = unique @ normals.T - np.sum(normals * p0, axis=1)
    above = np.all(dist <= tol, axis=0)
    below = np.all(dist >= -tol, axis=0)
    faces = set()
    for column in np.nonzero(above | below)[0]:
        on_plane = np.nonzero(np.abs(dist[:, column]) <= tol)[0]
        faces.add(tuple(sorted(int(keep[i]) for i in on_plane)))
    return sorted(faces)


def dump_off(hc: HullComplex, path: Union[str, Path]) -> Path:
    """Write the hull in chart coordinates as an ASCII OFF mesh"""
    path = Path(path)
    ids = hc.vertex_ids
    index = {v: k for k, v in enumerate(ids)}
    lines = ["OFF", f"{len(ids)} {len(hc.faces)} 0"]
    for v in ids:
        lines.append(" ".join(repr(float(c)) for c in hc.points[v]))
    for face in hc.faces:
        lines.append(" ".join([str(len(face.vertices))] + [str(index[v]) for v in face.vertices]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"hull mesh written to {path}")
    return path
