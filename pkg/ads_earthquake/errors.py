"""
Exception hierarchy for the earthquake toolkit
Every geometric failure is a GeometryError (a ValueError), so callers that
only care about "bad input" can keep catching ValueError
"""


class GeometryError(ValueError):
    """Base class for all geometric failures raised by this package"""


# mobius
class IdentityInput(GeometryError):
    """The operation is undefined on the identity isometry"""


class NotElliptic(GeometryError):
    """An elliptic isometry was required"""


class NotHyperbolic(GeometryError):
    """A hyperbolic isometry was required"""


class DegenerateTriple(GeometryError):
    """Two of the given boundary points coincide"""


class OrientationMismatch(GeometryError):
    """Source and target triples have opposite cyclic orientation"""


class NotSeparated(GeometryError):
    """The two boundary points lie on the same side of the axis"""


# adsgeom
class NotRankOne(GeometryError):
    """The matrix does not represent a point of the boundary at infinity"""


class ZeroMatrix(GeometryError):
    """The zero matrix has no projective class"""


class OnChartPlane(GeometryError):
    """The object lies on the projective plane removed by the affine chart"""


class SingularSystem(GeometryError):
    """The affine plane equation is degenerate"""


class DegeneratePlane(GeometryError):
    """The plane (or plane/point configuration) does not define a time side"""


# circlemap
class OnGraph(GeometryError):
    """The requested boundary point lies on the graph of the map"""


class SeparationFailed(GeometryError):
    """The constructed plane meets the graph of the map"""


class NoEllipticSolution(GeometryError):
    """No elliptic isometry realises the two requested pairs"""


class NotHyperbolicComposition(GeometryError):
    """The comparison of the two isometries is not hyperbolic"""


class CrossingLeaves(GeometryError):
    """Two leaves of a lamination intersect or share an endpoint"""


class NonPositiveWeight(GeometryError):
    """A leaf weight is zero or negative"""


# hull
class DegenerateFlat(GeometryError):
    """All graph points are coplanar: the map is a single Mobius class"""

    def __init__(self, message: str, mobius=None):
        super().__init__(message)
        self.mobius = mobius


class UnclassifiableFace(GeometryError):
    """A hull face is neither spacelike nor near-lightlike"""


# earthquake
class InconsistentRidge(GeometryError):
    """A ridge endpoint is not shared by both adjacent face boundaries"""


class NotOnPlane(GeometryError):
    """The point does not lie on the plane dual to the given isometry"""


class UncoveredPoint(GeometryError):
    """The point lies outside every stratum by more than the gap tolerance"""
