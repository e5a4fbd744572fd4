"""
JSON documents for circle maps, laminations, earthquakes and reports

Floats are written by the json module as the shortest repr that reads back to
the same double, so every value round-trips exactly without fixing the output
at 17 significant digits.
"""

import json
import math
from pathlib import Path
from typing import Iterable, List, Literal, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .circlemap import PiecewiseMobiusCircleMap
from .mobius import Geodesic, Mobius, RP1Point, Side
from .models import (
    EarthquakeMap,
    HullDiagnostics,
    Lamination,
    LaminationSpec,
    LeafChoice,
    Stratum,
    VerificationReport,
)

Point = Tuple[float, float]
Matrix = Tuple[Tuple[float, float], Tuple[float, float]]

DocumentT = TypeVar("DocumentT", bound=BaseModel)


def _point(x: RP1Point) -> Point:
    return (x.u, x.v)


def _matrix(m: Mobius) -> Matrix:
    return ((m.a, m.b), (m.c, m.d))


def _finite(value: Optional[float]) -> Optional[float]:
    return value if value is not None and math.isfinite(value) else None


class Tolerances(BaseModel):
    """Numerical tolerances threaded through the pipeline"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    parabolic_eps: float = 1e-9
    plane_tau: float = 1e-10
    hull_eps: float = 1e-9
    merge_eps: float = 1e-7
    snap_eps: float = 1e-6
    separation_eps: float = 1e-9
    near_lightlike: float = 1e-6

    @field_validator("*")
    @classmethod
    def positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("tolerances must be positive")
        return value

    def with_overrides(self, pairs: Iterable[str]) -> "Tolerances":
        """Apply NAME=VALUE overrides (names case-insensitive)"""
        updates = {}
        for pair in pairs:
            name, sep, value = pair.partition("=")
            if not sep:
                raise ValueError(f"tolerance override must look like NAME=VALUE, got {pair!r}")
            updates[name.strip().lower()] = float(value)
        return Tolerances(**{**self.model_dump(), **updates})


# ============================================================================
# Circle maps and laminations
# ============================================================================

class CircleMapDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["circle_map"] = "circle_map"
    breakpoints: List[Point] = []
    pieces: List[Matrix]

    @model_validator(mode="after")
    def piece_count(self) -> "CircleMapDocument":
        expected = max(len(self.breakpoints), 1)
        if len(self.pieces) != expected:
            raise ValueError(f"{len(self.breakpoints)} breakpoints need {expected} pieces, got {len(self.pieces)}")
        return self

    @classmethod
    def from_domain(cls, f: PiecewiseMobiusCircleMap) -> "CircleMapDocument":
        return cls(breakpoints=[_point(b) for b in f.breakpoints], pieces=[_matrix(p) for p in f.pieces])

    def to_domain(self) -> PiecewiseMobiusCircleMap:
        return PiecewiseMobiusCircleMap(
            tuple(RP1Point(*b) for b in self.breakpoints),
            tuple(Mobius.from_matrix(p) for p in self.pieces),
        )


class LaminationDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["lamination"] = "lamination"
    leaves: List[Tuple[Point, Point]] = []
    weights: List[float] = []
    side: Side = Side.LEFT
    base: int = 0

    @model_validator(mode="after")
    def weights_match(self) -> "LaminationDocument":
        if len(self.weights) != len(self.leaves):
            raise ValueError(f"{len(self.leaves)} leaves but {len(self.weights)} weights")
        return self

    @classmethod
    def from_domain(cls, spec: LaminationSpec) -> "LaminationDocument":
        return cls(
            leaves=[(_point(g.p), _point(g.q)) for g in spec.leaves],
            weights=list(spec.weights),
            side=spec.side,
            base=spec.base,
        )

    def to_domain(self) -> LaminationSpec:
        leaves = tuple(Geodesic(RP1Point(*p), RP1Point(*q)) for p, q in self.leaves)
        return LaminationSpec(leaves, tuple(self.weights), Side(self.side), self.base)


# ============================================================================
# Earthquakes
# ============================================================================

class StratumDocument(BaseModel):
    ideal_vertices: List[Point]
    boundary_arcs: List[bool]
    matrix: Matrix


class LeafChoiceDocument(BaseModel):
    leaf_index: int
    t: float
    matrix: Matrix


class EarthquakeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["earthquake"] = "earthquake"
    side: Side
    leaves: List[Tuple[Point, Point]]
    strata: List[StratumDocument]
    leaf_choices: List[LeafChoiceDocument] = []

    @classmethod
    def from_domain(cls, E: EarthquakeMap) -> "EarthquakeDocument":
        return cls(
            side=E.side,
            leaves=[(_point(g.p), _point(g.q)) for g in E.lamination.leaves],
            strata=[
                StratumDocument(
                    ideal_vertices=[_point(x) for x in s.ideal_vertices],
                    boundary_arcs=list(s.boundary_arcs),
                    matrix=_matrix(s.isometry),
                )
                for s in E.strata
            ],
            leaf_choices=[
                LeafChoiceDocument(leaf_index=c.leaf_index, t=c.t, matrix=_matrix(c.isometry))
                for c in E.leaf_choices
            ],
        )

    def to_domain(self) -> EarthquakeMap:
        lamination = Lamination(tuple(Geodesic(RP1Point(*p), RP1Point(*q)) for p, q in self.leaves))
        strata = tuple(
            Stratum(
                tuple(RP1Point(*x) for x in s.ideal_vertices),
                tuple(s.boundary_arcs),
                Mobius.from_matrix(s.matrix),
            )
            for s in self.strata
        )
        for c in self.leaf_choices:
            if not 0 <= c.leaf_index < len(lamination):
                raise ValueError(f"leaf choice refers to missing leaf {c.leaf_index}")
        choices = tuple(LeafChoice(c.leaf_index, c.t, Mobius.from_matrix(c.matrix)) for c in self.leaf_choices)
        return EarthquakeMap(Side(self.side), lamination, strata, choices)


# ============================================================================
# Reports
# ============================================================================

class PairDocument(BaseModel):
    first: int
    second: int
    comparison: Matrix
    kind: str
    side: Optional[str] = None
    trace_margin: Optional[float] = None
    separation_margin: Optional[float] = None
    passed: bool
    reason: str = ""


class VerificationDocument(BaseModel):
    kind: Literal["verification"] = "verification"
    passed: bool
    boundary_error: Optional[float] = None
    worst_trace_margin: Optional[float] = None
    worst_separation_margin: Optional[float] = None
    failures: List[PairDocument] = []
    pair_count: int = 0

    @classmethod
    def from_domain(cls, report: VerificationReport) -> "VerificationDocument":
        return cls(
            passed=report.passed,
            boundary_error=_finite(report.boundary_error),
            worst_trace_margin=_finite(report.worst_trace_margin),
            worst_separation_margin=_finite(report.worst_separation_margin),
            failures=[
                PairDocument(
                    first=r.first,
                    second=r.second,
                    comparison=_matrix(r.comparison),
                    kind=r.kind,
                    side=r.side,
                    trace_margin=_finite(r.trace_margin),
                    separation_margin=_finite(r.separation_margin),
                    passed=r.passed,
                    reason=r.reason,
                )
                for r in report.failures
            ],
            pair_count=len(report.records),
        )


class DiagnosticsDocument(BaseModel):
    kind: Literal["diagnostics"] = "diagnostics"
    vertex_count: int
    simplicial_faces: int
    merged_faces: int
    past_faces: int
    future_faces: int
    lightlike_discarded: int
    worst_coplanarity: float
    min_trace_margin: Optional[float] = None
    separation_margin: Optional[float] = None
    sampling_delta: Optional[float] = None
    boundary_error: Optional[float] = None

    @classmethod
    def from_domain(cls, diagnostics: HullDiagnostics, boundary_error: Optional[float] = None) -> "DiagnosticsDocument":
        values = {k: getattr(diagnostics, k) for k in HullDiagnostics.__dataclass_fields__}
        for key in ("min_trace_margin", "separation_margin", "sampling_delta"):
            values[key] = _finite(values[key])
        return cls(**values, boundary_error=_finite(boundary_error))


# ============================================================================
# IO
# ============================================================================

def dumps(document: BaseModel) -> str:
    """Byte-stable JSON: sorted keys, shortest round-trip floats"""
    return json.dumps(document.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def write_document(document: BaseModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dumps(document), encoding="utf-8")
    return path


def read_document(path: Union[str, Path], cls: Type[DocumentT]) -> DocumentT:
    return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


def read_any(path: Union[str, Path]) -> Union[CircleMapDocument, LaminationDocument, EarthquakeDocument]:
    """Parse a document by its `kind` tag"""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    kinds = {"circle_map": CircleMapDocument, "lamination": LaminationDocument, "earthquake": EarthquakeDocument}
    kind = raw.get("kind") if isinstance(raw, dict) else None
    if kind not in kinds:
        raise ValueError(f"{path}: unknown document kind {kind!r}")
    return kinds[kind].model_validate(raw)
