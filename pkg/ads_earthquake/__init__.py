"""
AdS Earthquake Package
Earthquake maps of the hyperbolic plane read off convex hulls of curves in anti-de Sitter space
"""

from .adsgeom import AdSBoundaryPoint, AdSPlane, ChartCoords, PlaneKind, TimeSide
from .circlemap import PiecewiseMobiusCircleMap, TwoPlaneVariant, finite_earthquake_boundary
from .earthquake import (
    boundary_agreement,
    eval_earthquake,
    simple_earthquake,
    strata_map,
    verify_earthquake,
)
from .errors import DegenerateFlat, GeometryError
from .mobius import Geodesic, H2Point, IsometryClass, Mobius, RP1Point, Side
from .models import (
    EarthquakeMap,
    ExtractionResult,
    HullDiagnostics,
    Lamination,
    LaminationSpec,
    Stratum,
    VerificationReport,
)
from .pipeline import EarthquakeExtractor, extract_earthquake
from .schemas import Tolerances

__all__ = [
    'AdSBoundaryPoint',
    'AdSPlane',
    'ChartCoords',
    'PlaneKind',
    'TimeSide',
    'PiecewiseMobiusCircleMap',
    'TwoPlaneVariant',
    'finite_earthquake_boundary',
    'boundary_agreement',
    'eval_earthquake',
    'simple_earthquake',
    'strata_map',
    'verify_earthquake',
    'DegenerateFlat',
    'GeometryError',
    'Geodesic',
    'H2Point',
    'IsometryClass',
    'Mobius',
    'RP1Point',
    'Side',
    'EarthquakeMap',
    'ExtractionResult',
    'HullDiagnostics',
    'Lamination',
    'LaminationSpec',
    'Stratum',
    'VerificationReport',
    'EarthquakeExtractor',
    'extract_earthquake',
    'Tolerances',
]
