"""
Anti-de Sitter 3-space as PSL(2,R)

Points are projective classes of 2x2 matrices with positive determinant,
the boundary at infinity is RP^1 x RP^1 (rank-one matrices by image and
kernel), and planes are orthogonal complements for the bilinear form
<A, B> = -tr(A adj B) / 2.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import DegeneratePlane, NotRankOne, OnChartPlane, SingularSystem, ZeroMatrix
from .mobius import (
    AntiMobius,
    IsometryClass,
    Mobius,
    RP1Point,
    apply,
    classify,
    fixed_points,
)

logger = logging.getLogger(__name__)

PLANE_TAU = 1e-10
RANK_EPS = 1e-9
SIDE_EPS = 1e-9

# Orthonormal oriented basis of the tangent space at the identity
V = np.array([[0.0, 1.0], [1.0, 0.0]])
W = np.array([[1.0, 0.0], [0.0, -1.0]])
U = np.array([[0.0, -1.0], [1.0, 0.0]])  # future-pointing timelike
EYE = np.eye(2)


class PlaneKind(str, Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


class TimeSide(str, Enum):
    PAST = "past"
    FUTURE = "future"
    ON = "on"


# ============================================================================
# Matrix helpers
# ============================================================================

def adj(a: np.ndarray) -> np.ndarray:
    return np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]])


def det(a: np.ndarray) -> float:
    return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])


def bilinear(a: np.ndarray, b: np.ndarray) -> float:
    return float(-0.5 * np.trace(a @ adj(b)))


def q(a: np.ndarray) -> float:
    return bilinear(a, a)


def as_matrix(obj) -> np.ndarray:
    if isinstance(obj, (Mobius, AntiMobius)):
        return obj.matrix
    if isinstance(obj, AdSBoundaryPoint):
        return obj.matrix
    if isinstance(obj, AdSPlane):
        return obj.matrix
    return np.asarray(obj, dtype=float)


def _unit(a: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(a)
    if norm == 0.0:
        raise ZeroMatrix("the zero matrix has no projective class")
    return a / norm


# ============================================================================
# Domain types
# ============================================================================

# points of AdS^3 are exactly the Mobius classes
AdSPoint = Mobius


@dataclass(frozen=True)
class AdSBoundaryPoint:
    """Point (x, y) of the boundary at infinity, the rank-one matrix with image x and kernel y"""
    x: RP1Point
    y: RP1Point

    @property
    def matrix(self) -> np.ndarray:
        return boundary_encode(self.x, self.y)


@dataclass(frozen=True)
class AdSPlane:
    """Totally geodesic plane, the orthogonal complement of [A]"""
    a: float
    b: float
    c: float
    d: float
    kind: PlaneKind

    @classmethod
    def from_matrix(cls, matrix, tau: float = PLANE_TAU) -> "AdSPlane":
        m = _unit(np.asarray(matrix, dtype=float))
        kind = plane_kind(m, tau)
        flat = m.ravel()
        nonzero = flat[np.abs(flat) > 1e-14]
        if nonzero.size and nonzero[0] < 0:
            m = -m
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]), kind)

    @classmethod
    def dual_to(cls, gamma: Mobius) -> "AdSPlane":
        return cls.from_matrix(gamma.matrix)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def dual(self) -> Optional[Mobius]:
        if self.kind is not PlaneKind.SPACELIKE:
            return None
        return Mobius.from_matrix(self.matrix)


@dataclass(frozen=True)
class ChartCoords:
    """Coordinates (w, b, c) of the affine chart at `reference`, Y = [[1+w, b], [c, 1-w]]"""
    reference: Mobius
    w: float
    b: float
    c: float

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.w, self.b, self.c])

    @property
    def quadric(self) -> float:
        """1 - w^2 - bc: positive inside AdS^3, zero on the boundary"""
        return 1.0 - self.w * self.w - self.b * self.c


@dataclass(frozen=True)
class PlaneBoundary:
    """Boundary at infinity of a plane: a graph, or two circles for lightlike planes"""
    kind: PlaneKind
    graph: Optional[Union[Mobius, AntiMobius]] = None
    image: Optional[RP1Point] = None
    kernel: Optional[RP1Point] = None

    def contains(self, point: AdSBoundaryPoint, tol: float = 1e-9) -> bool:
        if self.graph is not None:
            image = apply(self.graph, point.x)
            return abs(image.u * point.y.v - image.v * point.y.u) <= tol
        hits_image = abs(self.image.u * point.x.v - self.image.v * point.x.u) <= tol
        hits_kernel = abs(self.kernel.u * point.y.v - self.kernel.v * point.y.u) <= tol
        return hits_image or hits_kernel


# ============================================================================
# Boundary identification
# ============================================================================

def boundary_encode(x: RP1Point, y: RP1Point) -> np.ndarray:
    return np.array([[x.u * y.v, -x.u * y.u], [x.v * y.v, -x.v * y.u]])


def boundary_encode_many(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Encode (n, 2) arrays of homogeneous pairs into an (n, 2, 2) stack"""
    out = np.empty((xs.shape[0], 2, 2))
    out[:, 0, 0] = xs[:, 0] * ys[:, 1]
    out[:, 0, 1] = -xs[:, 0] * ys[:, 0]
    out[:, 1, 0] = xs[:, 1] * ys[:, 1]
    out[:, 1, 1] = -xs[:, 1] * ys[:, 0]
    return out


def boundary_decode(x: np.ndarray, tol: float = RANK_EPS) -> AdSBoundaryPoint:
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise NotRankOne("the zero matrix is not a boundary point")
    if abs(det(x)) > tol * norm * norm:
        raise NotRankOne(f"determinant {det(x):.3g} is not zero")
    col = x[:, 0] if np.linalg.norm(x[:, 0]) >= np.linalg.norm(x[:, 1]) else x[:, 1]
    row = x[0, :] if np.linalg.norm(x[0, :]) >= np.linalg.norm(x[1, :]) else x[1, :]
    # every row is proportional to (y2, -y1)
    return AdSBoundaryPoint(RP1Point(col[0], col[1]), RP1Point(-row[1], row[0]))


# ============================================================================
# Planes
# ============================================================================

def plane_kind(a: np.ndarray, tau: float = PLANE_TAU) -> PlaneKind:
    a = np.asarray(a, dtype=float)
    scale = float(np.sum(a * a))
    if scale == 0.0:
        raise ZeroMatrix("the zero matrix has no projective class")
    value = det(a)
    if value > tau * scale:
        return PlaneKind.SPACELIKE
    if value < -tau * scale:
        return PlaneKind.TIMELIKE
    return PlaneKind.LIGHTLIKE


def plane_boundary(plane: AdSPlane) -> PlaneBoundary:
    m = plane.matrix
    if plane.kind is PlaneKind.SPACELIKE:
        return PlaneBoundary(plane.kind, graph=Mobius.from_matrix(m).inverse())
    if plane.kind is PlaneKind.TIMELIKE:
        return PlaneBoundary(plane.kind, graph=AntiMobius.from_matrix(m).inverse())
    point = boundary_decode(m, tol=1e-6)
    return PlaneBoundary(plane.kind, image=point.x, kernel=point.y)


def planes_intersect(gamma1: Mobius, gamma2: Mobius) -> bool:
    """Two spacelike planes meet inside AdS^3 exactly when gamma2 gamma1^-1 is hyperbolic"""
    return classify(gamma2 @ gamma1.inverse()) is IsometryClass.HYPERBOLIC


def intersection_endpoints(gamma1: Mobius, gamma2: Mobius) -> tuple:
    """Ideal endpoints (x, gamma1^-1 x) of the common geodesic of two spacelike planes"""
    if not planes_intersect(gamma1, gamma2):
        raise DegeneratePlane("the planes do not meet in AdS^3")
    axis = fixed_points(gamma2 @ gamma1.inverse()).axis
    inv = gamma1.inverse()
    return tuple(AdSBoundaryPoint(x, apply(inv, x)) for x in axis.endpoints)


def reflection_plane_point(reflection: AntiMobius, eta: AntiMobius) -> Mobius:
    """The point (reflection composed with eta) of the timelike plane dual to eta"""
    return reflection @ eta


# ============================================================================
# Isometry action of PSL(2,R) x PSL(2,R)
# ============================================================================

def isometry_apply(alpha: Mobius, beta: Mobius, obj):
    """(alpha, beta) . X = alpha X beta^-1"""
    if isinstance(obj, AdSBoundaryPoint):
        return AdSBoundaryPoint(apply(alpha, obj.x), apply(beta, obj.y))
    if isinstance(obj, AdSPlane):
        moved = alpha.matrix @ obj.matrix @ beta.inverse().matrix
        return AdSPlane.from_matrix(moved)
    if isinstance(obj, Mobius):
        return alpha @ obj @ beta.inverse()
    raise TypeError(f"cannot move a {type(obj).__name__}")


def future_direction(p: Mobius) -> np.ndarray:
    """Future-pointing tangent vector at p (left translate of U)"""
    return U @ p.matrix


# ============================================================================
# Affine charts
# ============================================================================

def chart_embed(gamma0: Mobius, obj, tol: float = 1e-12) -> ChartCoords:
    x = as_matrix(obj)
    y = gamma0.inverse().matrix @ x
    tr = float(np.trace(y))
    if abs(tr) <= tol * np.linalg.norm(y):
        raise OnChartPlane("the object lies on the plane removed by the chart")
    y = y * (2.0 / tr)
    return ChartCoords(gamma0, 0.5 * (y[0, 0] - y[1, 1]), float(y[0, 1]), float(y[1, 0]))


def chart_embed_many(gamma0: Mobius, stack: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Vectorized chart_embed for an (n, 2, 2) stack, returns (n, 3) coordinates"""
    ys = np.einsum("ij,njk->nik", gamma0.inverse().matrix, stack)
    traces = ys[:, 0, 0] + ys[:, 1, 1]
    norms = np.linalg.norm(ys.reshape(-1, 4), axis=1)
    if np.any(np.abs(traces) <= tol * norms):
        raise OnChartPlane("a sample lies on the plane removed by the chart")
    scale = 2.0 / traces
    w = 0.5 * (ys[:, 0, 0] - ys[:, 1, 1]) * scale
    return np.column_stack([w, ys[:, 0, 1] * scale, ys[:, 1, 0] * scale])


def chart_extract(cc: ChartCoords) -> np.ndarray:
    y = np.array([[1.0 + cc.w, cc.b], [cc.c, 1.0 - cc.w]])
    return cc.reference.matrix @ y


def plane_from_affine(gamma0: Mobius, n, k: float, tau: float = PLANE_TAU) -> AdSPlane:
    """The plane whose trace in the chart at gamma0 is {n . (w, b, c) = k}"""
    nw, nb, nc = (float(v) for v in n)
    if max(abs(nw), abs(nb), abs(nc), abs(k)) == 0.0:
        raise SingularSystem("the affine equation is identically zero")
    # <gamma0 Y, A> = <Y, gamma0^-1 A>; solve at the identity chart
    p = 0.5 * (-k - nw)
    s = 0.5 * (-k + nw)
    b_local = np.array([[p, -nc], [-nb, s]])
    return AdSPlane.from_matrix(gamma0.matrix @ b_local, tau)


# ============================================================================
# Time orientation
# ============================================================================

def _chart_oriented(x: np.ndarray, chart: Mobius) -> np.ndarray:
    tr = np.trace(chart.inverse().matrix @ x)
    return -x if tr < 0 else x


def side_sign(
    plane: AdSPlane,
    point,
    anchor=None,
    chart: Optional[Mobius] = None,
    tol: float = SIDE_EPS,
) -> TimeSide:
    """
    Time side of `point` relative to a spacelike plane.

    The future is the direction of the left-translation flow t -> exp(tU) p,
    evaluated at an anchor point of the plane. Representatives are fixed by
    the chart (positive trace relative to it) or, without a chart, by taking
    the anchor on the short segment from the point to the plane.
    """
    if plane.kind is not PlaneKind.SPACELIKE:
        raise DegeneratePlane(f"time side needs a spacelike plane, got {plane.kind.value}")
    a = plane.matrix
    p = as_matrix(point)
    p = p / math.sqrt(abs(det(p))) if abs(det(p)) > 0 else p
    if anchor is None:
        gamma = a / math.sqrt(det(a))
        c = bilinear(p, gamma)
        if abs(c) >= 1.0:
            raise DegeneratePlane("the point is not joined to the plane by a timelike segment")
        anchor_m = p + c * gamma
    else:
        anchor_m = as_matrix(anchor)
    if chart is not None:
        p = _chart_oriented(p, chart)
        anchor_m = _chart_oriented(anchor_m, chart)
    elif bilinear(anchor_m, p) > 0:
        anchor_m = -anchor_m
    h = bilinear(p, a)
    if abs(h) <= tol * max(1.0, float(np.linalg.norm(p))):
        return TimeSide.ON
    if abs(bilinear(anchor_m, a)) > 1e-6 * float(np.linalg.norm(anchor_m)):
        raise DegeneratePlane("the anchor does not lie on the plane")
    flow = bilinear(U @ anchor_m, a)
    if flow == 0.0:
        raise DegeneratePlane("the time flow is tangent to the plane")
    return TimeSide.FUTURE if (h > 0) == (flow > 0) else TimeSide.PAST
