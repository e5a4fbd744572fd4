"""
Hyperbolic plane kernel (upper half-plane model)

Projective 2x2 matrices acting by homographies on the half-plane and on its
boundary circle RP^1. Boundary points are kept in homogeneous coordinates
throughout, with infinity = (1, 0), so no branch ever divides by zero.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Union

import numpy as np

from .errors import (
    DegenerateTriple,
    IdentityInput,
    NotElliptic,
    NotHyperbolic,
    NotSeparated,
    OrientationMismatch,
)

logger = logging.getLogger(__name__)

# Tolerances (overridable per call)
PARABOLIC_EPS = 1e-9
EQUALITY_EPS = 1e-9
DISTINCT_EPS = 1e-12
_CANONICAL_ZERO = 1e-14

TWO_PI = 2.0 * math.pi


class IsometryClass(str, Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


class Side(str, Enum):
    """Translation side of a hyperbolic isometry, seen from one stratum to another"""
    LEFT = "left"
    RIGHT = "right"

    @property
    def opposite(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


def _canonical_sign(entries) -> float:
    for value in entries:
        if abs(value) > _CANONICAL_ZERO:
            return 1.0 if value > 0 else -1.0
    return 1.0


def _normalize_entries(obj, scale: float) -> None:
    entries = [float(getattr(obj, name)) / scale for name in ("a", "b", "c", "d")]
    sign = _canonical_sign(entries)
    for name, value in zip(("a", "b", "c", "d"), entries):
        object.__setattr__(obj, name, sign * value)


# ============================================================================
# Boundary and interior points
# ============================================================================

@dataclass(frozen=True)
class RP1Point:
    """A point of the boundary circle as a unit homogeneous pair (u, v), value u/v"""
    u: float
    v: float

    def __post_init__(self):
        norm = math.hypot(self.u, self.v)
        if not math.isfinite(norm) or norm == 0.0:
            raise DegenerateTriple(f"RP1 point needs a nonzero finite pair, got ({self.u}, {self.v})")
        u, v = float(self.u) / norm, float(self.v) / norm
        sign = _canonical_sign((u, v))
        object.__setattr__(self, "u", sign * u)
        object.__setattr__(self, "v", sign * v)

    @classmethod
    def from_real(cls, x: float) -> "RP1Point":
        if math.isinf(x):
            return cls(1.0, 0.0)
        return cls(float(x), 1.0)

    @classmethod
    def from_angle(cls, theta: float) -> "RP1Point":
        """Inverse of boundary_angle"""
        half = 0.5 * theta
        return cls(math.cos(half), -math.sin(half))

    @property
    def is_infinite(self) -> bool:
        return abs(self.v) <= _CANONICAL_ZERO

    @property
    def value(self) -> float:
        if self.is_infinite:
            return math.inf
        return self.u / self.v

    @property
    def angle(self) -> float:
        return boundary_angle(self)

    def vector(self) -> np.ndarray:
        return np.array([self.u, self.v])

    def __repr__(self) -> str:
        return f"RP1Point({self.value:.12g})"


INFINITY = RP1Point(1.0, 0.0)
ZERO = RP1Point(0.0, 1.0)
ONE = RP1Point(1.0, 1.0)


@dataclass(frozen=True)
class H2Point:
    """A point of the upper half-plane"""
    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not z.imag > 0 or not cmath.isfinite(z):
            raise ValueError(f"H2 point must have positive imaginary part, got {z}")
        object.__setattr__(self, "z", z)


@dataclass(frozen=True)
class Geodesic:
    """Unoriented geodesic, stored with endpoints sorted by boundary angle"""
    p: RP1Point
    q: RP1Point

    def __post_init__(self):
        if circle_distance(self.p, self.q) <= DISTINCT_EPS:
            raise DegenerateTriple("geodesic endpoints coincide")
        if self.q.angle < self.p.angle:
            p, q = self.q, self.p
            object.__setattr__(self, "p", p)
            object.__setattr__(self, "q", q)

    @property
    def endpoints(self) -> tuple:
        return (self.p, self.q)


# ============================================================================
# Isometries
# ============================================================================

@dataclass(frozen=True)
class Mobius:
    """Orientation-preserving isometry: projective class of a det-1 matrix"""
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not det > 0 or not math.isfinite(det):
            raise OrientationMismatch(f"Mobius needs a positive determinant, got {det}")
        _normalize_entries(self, math.sqrt(det))

    @classmethod
    def from_matrix(cls, matrix) -> "Mobius":
        m = np.asarray(matrix, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return self.a + self.d

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "Mobius") -> "Mobius":
        if isinstance(other, AntiMobius):
            return AntiMobius.from_matrix(self.matrix @ other.matrix)
        return Mobius.from_matrix(self.matrix @ other.matrix)

    def __call__(self, p):
        return apply(self, p)


IDENTITY = Mobius(1.0, 0.0, 0.0, 1.0)
# z -> -1/z, the half-turn about i
R_I = Mobius(0.0, 1.0, -1.0, 0.0)


@dataclass(frozen=True)
class AntiMobius:
    """Orientation-reversing isometry: projective class of a det -1 matrix"""
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not det < 0 or not math.isfinite(det):
            raise OrientationMismatch(f"AntiMobius needs a negative determinant, got {det}")
        _normalize_entries(self, math.sqrt(-det))

    @classmethod
    def from_matrix(cls, matrix) -> "AntiMobius":
        m = np.asarray(matrix, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return self.a + self.d

    def is_reflection(self, tol: float = EQUALITY_EPS) -> bool:
        return abs(self.trace) <= tol

    def inverse(self) -> "AntiMobius":
        return AntiMobius(-self.d, self.b, self.c, -self.a)

    def __matmul__(self, other):
        product = self.matrix @ other.matrix
        if isinstance(other, AntiMobius):
            return Mobius.from_matrix(product)
        return AntiMobius.from_matrix(product)

    def __call__(self, p):
        return apply(self, p)


@dataclass(frozen=True)
class SL2Tangent:
    """Traceless 2x2 matrix [[a, b], [c, -a]], an element of the Lie algebra"""
    a: float
    b: float
    c: float

    @property
    def d(self) -> float:
        return -self.a

    @classmethod
    def from_matrix(cls, matrix) -> "SL2Tangent":
        m = np.asarray(matrix, dtype=float)
        half_diff = 0.5 * (m[0, 0] - m[1, 1])
        return cls(half_diff, m[0, 1], m[1, 0])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, -self.a]])

    @property
    def det(self) -> float:
        return -self.a * self.a - self.b * self.c


Isometry = Union[Mobius, AntiMobius]


class HyperbolicFixedPoints(NamedTuple):
    axis: Geodesic
    attracting: RP1Point
    repelling: RP1Point


# ============================================================================
# Group plumbing
# ============================================================================

def inverse(m: Isometry) -> Isometry:
    return m.inverse()


def compose(m1: Isometry, m2: Isometry) -> Isometry:
    """m1 after m2"""
    return m1 @ m2


def canonical(m: Mobius) -> np.ndarray:
    """Canonical representative (det 1, first nonzero entry positive)"""
    matrix = m.matrix / math.sqrt(abs(float(np.linalg.det(m.matrix))))
    return _canonical_sign(matrix.ravel()) * matrix


def equals(m1: Isometry, m2: Isometry, tol: float = EQUALITY_EPS) -> bool:
    return type(m1) is type(m2) and mobius_distance(m1, m2) <= tol


def mobius_distance(m1: Isometry, m2: Isometry) -> float:
    """Entrywise sup distance between projective classes (min over the sign)"""
    d1 = np.max(np.abs(m1.matrix - m2.matrix))
    d2 = np.max(np.abs(m1.matrix + m2.matrix))
    return float(min(d1, d2))


# ============================================================================
# Actions
# ============================================================================

def apply(m: Isometry, p):
    """Homographic action on a boundary point (homogeneous, division-free) or an H2 point"""
    if isinstance(p, RP1Point):
        return RP1Point(m.a * p.u + m.b * p.v, m.c * p.u + m.d * p.v)
    if isinstance(p, H2Point):
        # conj(z) and det -1 flip the half-plane twice for AntiMobius
        z = p.z.conjugate() if isinstance(m, AntiMobius) else p.z
        return H2Point((m.a * z + m.b) / (m.c * z + m.d))
    raise TypeError(f"cannot apply an isometry to {type(p).__name__}")


def apply_many(m: Mobius, points: np.ndarray) -> np.ndarray:
    """Vectorized action on an (n, 2) array of homogeneous pairs, returns unnormalized pairs"""
    return points @ m.matrix.T


# ============================================================================
# Classification and fixed points
# ============================================================================

def classify(m: Mobius, eps: float = PARABOLIC_EPS) -> IsometryClass:
    t = abs(m.trace)
    if abs(t - 2.0) <= eps:
        if mobius_distance(m, IDENTITY) <= eps:
            return IsometryClass.IDENTITY
        return IsometryClass.PARABOLIC
    if t < 2.0:
        return IsometryClass.ELLIPTIC
    return IsometryClass.HYPERBOLIC


def _eigen_point(m: np.ndarray, lam: float) -> RP1Point:
    # (m - lam I) x = 0, pick the better conditioned row
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    first = (b, lam - a)
    second = (lam - d, c)
    if math.hypot(*first) >= math.hypot(*second):
        return RP1Point(*first)
    return RP1Point(*second)


def fixed_points(m: Mobius, eps: float = PARABOLIC_EPS):
    """Axis and attracting endpoint, parabolic fixed point, or interior fixed point"""
    kind = classify(m, eps)
    if kind is IsometryClass.IDENTITY:
        raise IdentityInput("the identity fixes everything")
    if kind is IsometryClass.ELLIPTIC:
        return fix_elliptic(m, eps)
    matrix = m.matrix if m.trace >= 0 else -m.matrix
    tr = abs(m.trace)
    if kind is IsometryClass.PARABOLIC:
        return _eigen_point(matrix, 1.0)
    root = math.sqrt(tr * tr - 4.0)
    big = 0.5 * (tr + root)
    # |lambda| > 1 at the attracting point: the derivative there is 1/lambda^2
    attracting = _eigen_point(matrix, big)
    repelling = _eigen_point(matrix, 1.0 / big)
    return HyperbolicFixedPoints(Geodesic(attracting, repelling), attracting, repelling)


def fix_elliptic(m: Mobius, eps: float = PARABOLIC_EPS) -> H2Point:
    if classify(m, eps) is not IsometryClass.ELLIPTIC:
        raise NotElliptic(f"trace {m.trace:.6g} is not elliptic")
    if abs(m.c) < 1e-12:
        conjugated = R_I @ m @ R_I.inverse()
        return apply(R_I.inverse(), fix_elliptic(conjugated, eps))
    tr = m.trace
    real = (m.a - m.d) / (2.0 * m.c)
    imag = math.sqrt(max(4.0 - tr * tr, 0.0)) / (2.0 * abs(m.c))
    return H2Point(complex(real, imag))


def rotation_about(z: H2Point) -> Mobius:
    """Order-two elliptic isometry fixing z"""
    x, y = z.z.real, z.z.imag
    return Mobius(-x / y, (x * x + y * y) / y, -1.0 / y, x / y)


def _affine_to(z: H2Point) -> Mobius:
    # w -> y w + x, sends i to z
    x, y = z.z.real, z.z.imag
    s = math.sqrt(y)
    return Mobius(s, x / s, 0.0, 1.0 / s)


def elliptic_about(z: H2Point, theta: float) -> Mobius:
    """Clockwise rotation by theta about z"""
    half = 0.5 * theta
    rot = Mobius(math.cos(half), -math.sin(half), math.sin(half), math.cos(half))
    conj = _affine_to(z)
    return conj @ rot @ conj.inverse()


def translation_length(m: Mobius) -> float:
    if classify(m) is not IsometryClass.HYPERBOLIC:
        raise NotHyperbolic(f"trace {m.trace:.6g} is not hyperbolic")
    return 2.0 * math.acosh(abs(m.trace) / 2.0)


# ============================================================================
# One-parameter subgroups
# ============================================================================

def exp_sl2(t: float, a: SL2Tangent) -> Mobius:
    x = t * a.matrix
    delta = t * t * a.det
    eye = np.eye(2)
    if abs(delta) < 1e-8:
        # series of cos/cosh around delta = 0
        result = (1.0 - delta / 2.0) * eye + (1.0 - delta / 6.0) * x
    elif delta > 0:
        omega = math.sqrt(delta)
        result = math.cos(omega) * eye + (math.sin(omega) / omega) * x
    else:
        omega = math.sqrt(-delta)
        result = math.cosh(omega) * eye + (math.sinh(omega) / omega) * x
    return Mobius.from_matrix(result)


def log_hyperbolic(m: Mobius) -> SL2Tangent:
    if classify(m) is not IsometryClass.HYPERBOLIC:
        raise NotHyperbolic(f"trace {m.trace:.6g} is not hyperbolic")
    matrix = m.matrix if m.trace > 0 else -m.matrix
    half_tr = 0.5 * abs(m.trace)
    s = math.acosh(half_tr)
    traceless = matrix - half_tr * np.eye(2)
    return SL2Tangent.from_matrix(traceless * (s / math.sinh(s)))


# ============================================================================
# Orientation and triples
# ============================================================================

def _bracket(p: RP1Point, q: RP1Point) -> float:
    return p.u * q.v - p.v * q.u


def triple_orientation(a: RP1Point, b: RP1Point, c: RP1Point, tol: float = DISTINCT_EPS) -> int:
    """+1 when (a, b, c) is counterclockwise, i.e. increasing reals closed through infinity"""
    ab, bc, ca = _bracket(a, b), _bracket(b, c), _bracket(c, a)
    if min(abs(ab), abs(bc), abs(ca)) <= tol:
        raise DegenerateTriple("triple has coinciding points")
    return 1 if ab * bc * ca > 0 else -1


def _to_reference(p: RP1Point, q: RP1Point, r: RP1Point) -> np.ndarray:
    # homography p -> 0, q -> 1, r -> infinity; det has the sign of the orientation
    qr = _bracket(q, r)
    qp = _bracket(q, p)
    return np.array([[qr * p.v, -qr * p.u], [qp * r.v, -qp * r.u]])


def mobius_from_triples(src, dst) -> Mobius:
    """Unique Mobius sending src[k] to dst[k]"""
    o_src = triple_orientation(*src)
    o_dst = triple_orientation(*dst)
    if o_src != o_dst:
        raise OrientationMismatch("source and target triples have opposite orientation")
    t_src = _to_reference(*src)
    t_dst = _to_reference(*dst)
    adj = np.array([[t_dst[1, 1], -t_dst[0, 1]], [-t_dst[1, 0], t_dst[0, 0]]])
    # det(adj(T_dst) T_src) = det(T_dst) det(T_src) > 0 for matching orientations
    return Mobius.from_matrix(adj @ t_src)


def translate_side(g: Mobius, s: RP1Point, s_prime: RP1Point) -> Side:
    """Side to which g translates along its axis, seen from s to s_prime"""
    if classify(g) is not IsometryClass.HYPERBOLIC:
        raise NotHyperbolic(f"trace {g.trace:.6g} is not hyperbolic")
    fixed = fixed_points(g)
    q_plus, q_minus = fixed.attracting, fixed.repelling
    try:
        side_s = triple_orientation(q_minus, s, q_plus)
        side_t = triple_orientation(q_minus, s_prime, q_plus)
    except DegenerateTriple as exc:
        raise NotSeparated("a point sits on the axis endpoints") from exc
    if side_s == side_t:
        raise NotSeparated("both points lie on the same side of the axis")
    return Side.LEFT if triple_orientation(s, s_prime, q_plus) == 1 else Side.RIGHT


def reflection_in(g: Geodesic) -> AntiMobius:
    """Reflection fixing the geodesic g pointwise"""
    mu = mobius_from_triples((g.p, arc_midpoint(g.p, g.q), g.q), (ZERO, ONE, INFINITY))
    flip = AntiMobius(-1.0, 0.0, 0.0, 1.0)
    return mu.inverse() @ flip @ mu


# ============================================================================
# Circle coordinates and the disc model
# ============================================================================

def boundary_angle(x: RP1Point) -> float:
    """Angle on the unit circle under the Cayley map; infinity -> 0, increasing with x"""
    return (-2.0 * math.atan2(x.v, x.u)) % TWO_PI


def boundary_angles(points: np.ndarray) -> np.ndarray:
    """Vectorized boundary_angle for an (n, 2) array of homogeneous pairs"""
    return np.mod(-2.0 * np.arctan2(points[:, 1], points[:, 0]), TWO_PI)


def ccw_length(start: float, end: float) -> float:
    """Counterclockwise angular length from start to end in [0, 2 pi)"""
    return (end - start) % TWO_PI


def circle_distance(x: RP1Point, y: RP1Point) -> float:
    delta = abs(boundary_angle(x) - boundary_angle(y)) % TWO_PI
    return min(delta, TWO_PI - delta)


def in_closed_arc(x: RP1Point, start: RP1Point, end: RP1Point, tol: float = 0.0) -> bool:
    """Whether x lies on the counterclockwise arc from start to end"""
    theta0 = boundary_angle(start)
    span = ccw_length(theta0, boundary_angle(end))
    offset = ccw_length(theta0, boundary_angle(x))
    return offset <= span + tol or offset >= TWO_PI - tol


def arc_midpoint(start: RP1Point, end: RP1Point) -> RP1Point:
    """Angular midpoint of the counterclockwise arc from start to end"""
    theta0 = boundary_angle(start)
    span = ccw_length(theta0, boundary_angle(end))
    return RP1Point.from_angle(theta0 + 0.5 * span)


def cayley_to_disc(z: Union[H2Point, complex]) -> complex:
    z = z.z if isinstance(z, H2Point) else complex(z)
    return (z - 1j) / (z + 1j)


def boundary_to_disc(x: RP1Point) -> complex:
    return cmath.exp(1j * boundary_angle(x))


def disc_to_half_plane(w: complex) -> H2Point:
    if abs(w) >= 1.0:
        raise ValueError(f"disc point must satisfy |w| < 1, got {w}")
    return H2Point(1j * (1 + w) / (1 - w))


def disc_distance(w1: complex, w2: complex) -> float:
    """Euclidean distance between two points of the closed disc"""
    return abs(complex(w1) - complex(w2))


def hyperbolic_distance(z1: H2Point, z2: H2Point) -> float:
    d = abs(z1.z - z2.z) ** 2 / (2.0 * z1.z.imag * z2.z.imag)
    return math.acosh(1.0 + d)


def geodesic_position(g: Geodesic, z: H2Point) -> float:
    """Signed tanh of the distance from z to g, positive on the side of the ccw arc p -> q"""
    mu = mobius_from_triples((g.p, arc_midpoint(g.p, g.q), g.q), (ZERO, ONE, INFINITY))
    w = apply(mu, z).z
    return w.real / abs(w)
