"""
Extraction Pipeline
Turns a circle map into the earthquake of one boundary component of its convex hull
"""

import logging
import math
from itertools import combinations
from pathlib import Path
from typing import Dict, Optional, Union

from .adsgeom import TimeSide
from .circlemap import (
    PiecewiseMobiusCircleMap,
    canonicalize,
    separating_plane,
    separation_margin,
    validate,
)
from .earthquake import boundary_agreement, check_tiling, strata_map, verify_earthquake
from .errors import DegenerateFlat, GeometryError
from .hull import (
    FaceClassification,
    HullComplex,
    PleatedSurface,
    build_hull,
    classify_faces,
    dump_off,
    extract_pleated,
    merge_coplanar,
)
from .mobius import Mobius, Side, mobius_distance
from .models import ExtractionResult, HullDiagnostics
from .schemas import Tolerances

logger = logging.getLogger(__name__)


class EarthquakeExtractor:
    """Runs the extraction workflow as numbered steps"""

    def __init__(
        self,
        samples: int = 2000,
        side: Side = Side.LEFT,
        leaf_t: float = 0.5,
        tolerances: Optional[Tolerances] = None,
        workers: int = 1,
        seed: int = 0,
        verify: bool = True,
        dump_hull: Optional[Union[str, Path]] = None,
        stability: bool = False,
        leaf_overrides: Optional[Dict[int, float]] = None,
    ):
        if samples < 4:
            raise ValueError(f"need at least 4 samples, got {samples}")
        self.samples = samples
        self.side = Side(side)
        self.leaf_t = leaf_t
        self.tolerances = tolerances or Tolerances()
        self.workers = workers
        self.seed = seed
        self.verify = verify
        self.dump_hull = dump_hull
        self.stability = stability
        self.leaf_overrides = leaf_overrides or {}

    @property
    def time_side(self) -> TimeSide:
        """Past boundary gives the left earthquake, future the right one"""
        return TimeSide.PAST if self.side is Side.LEFT else TimeSide.FUTURE

    def prepare(self, f: PiecewiseMobiusCircleMap) -> PiecewiseMobiusCircleMap:
        """Step 1: validate the input map and merge redundant breakpoints"""
        logger.info("Step 1: validating the circle map")
        report = validate(f)
        if not report.valid:
            raise GeometryError(f"invalid circle map: {report.first_violation}")
        f = canonicalize(f)
        if f.is_global:
            raise DegenerateFlat("f is a single Mobius class; its hull is a flat spacelike plane", mobius=f.pieces[0])
        return f

    def choose_chart(self, f: PiecewiseMobiusCircleMap) -> Mobius:
        """Step 2: pick an affine chart from a plane disjoint from graph(f)"""
        logger.info("Step 2: choosing a separating chart")
        gamma0 = separating_plane(f)
        logger.debug(f"chart at trace {gamma0.trace:.6g}")
        return gamma0

    def build(self, f: PiecewiseMobiusCircleMap, gamma0: Mobius, samples: Optional[int] = None) -> HullComplex:
        """Steps 3 and 4: sample graph(f) and build the simplicial hull"""
        n = samples or self.samples
        logger.info(f"Step 3: sampling graph(f) at {n} points")
        logger.info("Step 4: building the convex hull")
        return build_hull(f, gamma0, n, refine=True, eps=self.tolerances.hull_eps)

    def merge(self, hc: HullComplex) -> HullComplex:
        """Step 5: merge coplanar faces"""
        logger.info("Step 5: merging coplanar faces")
        return merge_coplanar(hc, self.tolerances.merge_eps)

    def classify(self, merged: HullComplex) -> FaceClassification:
        """Step 6: split faces into past and future"""
        logger.info("Step 6: classifying support planes")
        return classify_faces(merged, self.tolerances.near_lightlike, self.tolerances.plane_tau)

    def pleat(self, merged: HullComplex, classification: FaceClassification, f: PiecewiseMobiusCircleMap) -> PleatedSurface:
        """Step 7: read off the pleated boundary component"""
        logger.info(f"Step 7: extracting the {self.time_side.value} pleated surface")
        return extract_pleated(merged, classification, self.time_side, f, self.tolerances.snap_eps)

    def surface(self, f: PiecewiseMobiusCircleMap, samples: Optional[int] = None):
        """Steps 1 to 7 without the earthquake"""
        f = self.prepare(f)
        gamma0 = self.choose_chart(f)
        hc = self.build(f, gamma0, samples)
        merged = self.merge(hc)
        classification = self.classify(merged)
        return f, gamma0, hc, merged, classification, self.pleat(merged, classification, f)

    def extract(self, f: PiecewiseMobiusCircleMap) -> ExtractionResult:
        """Run every step and return the earthquake with its diagnostics"""
        f, gamma0, hc, merged, classification, ps = self.surface(f)
        if self.dump_hull:
            dump_off(merged, self.dump_hull)

        logger.info("Step 8: assembling the earthquake")
        E = strata_map(ps, self.leaf_t, self.leaf_overrides)
        tiling = check_tiling(E)
        if not tiling.valid:
            logger.warning(f"strata do not tile the circle: {tiling.first_violation}")

        diagnostics = HullDiagnostics(
            vertex_count=len(hc.vertex_ids),
            simplicial_faces=len(hc.faces),
            merged_faces=len(merged.faces),
            past_faces=len(classification.past),
            future_faces=len(classification.future),
            lightlike_discarded=len(classification.lightlike),
            worst_coplanarity=max((face.residual for face in merged.faces), default=0.0),
            min_trace_margin=_min_trace_margin(ps),
            separation_margin=separation_margin(f, gamma0.inverse()),
        )
        if self.stability:
            diagnostics.sampling_delta = self._sampling_delta(f, ps)

        report = None
        if self.verify:
            logger.info("Step 9: verifying the earthquake axioms")
            report = verify_earthquake(
                E,
                self.workers,
                self.tolerances.separation_eps,
                self.tolerances.parabolic_eps,
            )
            logger.info("Step 10: measuring boundary agreement")
            report.boundary_error = boundary_agreement(E, f, seed=self.seed)
            logger.debug(
                f"trace margin {report.worst_trace_margin:.3g}, "
                f"separation margin {report.worst_separation_margin:.3g}, "
                f"boundary error {report.boundary_error:.3g}"
            )
        return ExtractionResult(E, ps, merged, diagnostics, gamma0, report)

    def _sampling_delta(self, f: PiecewiseMobiusCircleMap, ps: PleatedSurface) -> float:
        # duals of a doubled sampling, matched face by face
        *_, finer = self.surface(f, 2 * self.samples)
        worst = 0.0
        for face in ps.faces:
            nearest = min((mobius_distance(face.dual, other.dual) for other in finer.faces), default=math.inf)
            worst = max(worst, nearest)
        return worst


def _min_trace_margin(ps: PleatedSurface) -> Optional[float]:
    margins = [
        abs((b.dual @ a.dual.inverse()).trace) - 2.0
        for a, b in combinations(ps.faces, 2)
    ]
    return min(margins) if margins else None


def extract_earthquake(f: PiecewiseMobiusCircleMap, **options) -> ExtractionResult:
    """Convenience wrapper around EarthquakeExtractor"""
    return EarthquakeExtractor(**options).extract(f)
