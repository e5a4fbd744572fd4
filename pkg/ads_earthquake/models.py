"""
Data models for earthquake extraction
"""

from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

from .mobius import Geodesic, Mobius, RP1Point, Side


@dataclass(frozen=True)
class LaminationSpec:
    """A finite lamination with weights, the input of boundary synthesis"""
    leaves: Tuple[Geodesic, ...]
    weights: Tuple[float, ...]
    side: Side = Side.LEFT
    base: int = 0


@dataclass(frozen=True)
class Lamination:
    """Pairwise disjoint geodesics, ordered by the angle of their first endpoint"""
    leaves: Tuple[Geodesic, ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(self.leaves, key=lambda g: (g.p.angle, g.q.angle)))
        object.__setattr__(self, "leaves", ordered)

    def __len__(self) -> int:
        return len(self.leaves)

    def __iter__(self):
        return iter(self.leaves)


@dataclass(frozen=True)
class Stratum:
    """
    A gap or leaf of the lamination together with the isometry of E on it.

    `boundary_arcs[i]` tells whether the edge from vertex i to vertex i+1 is a
    counterclockwise arc of the circle (True) or a chord geodesic (False). A
    leaf stratum has two vertices and two chords; a stratum with no vertices
    is the whole plane.
    """
    ideal_vertices: Tuple[RP1Point, ...]
    boundary_arcs: Tuple[bool, ...]
    isometry: Mobius

    @property
    def is_leaf(self) -> bool:
        return len(self.ideal_vertices) == 2 and not any(self.boundary_arcs)

    @property
    def is_whole_plane(self) -> bool:
        return len(self.ideal_vertices) == 0

    def chords(self) -> List[Tuple[RP1Point, RP1Point]]:
        n = len(self.ideal_vertices)
        return [
            (self.ideal_vertices[i], self.ideal_vertices[(i + 1) % n])
            for i in range(n) if not self.boundary_arcs[i]
        ]

    def arcs(self) -> List[Tuple[RP1Point, RP1Point]]:
        n = len(self.ideal_vertices)
        return [
            (self.ideal_vertices[i], self.ideal_vertices[(i + 1) % n])
            for i in range(n) if self.boundary_arcs[i]
        ]


@dataclass(frozen=True)
class LeafChoice:
    """Support-plane choice on a bending leaf"""
    leaf_index: int
    t: float
    isometry: Mobius


@dataclass(frozen=True)
class EarthquakeMap:
    """Left or right earthquake: a lamination with one isometry per stratum"""
    side: Side
    lamination: Lamination
    strata: Tuple[Stratum, ...]
    leaf_choices: Tuple[LeafChoice, ...] = ()

    def leaf_strata(self) -> Tuple[Stratum, ...]:
        result = []
        for choice in self.leaf_choices:
            leaf = self.lamination.leaves[choice.leaf_index]
            result.append(Stratum((leaf.p, leaf.q), (False, False), choice.isometry))
        return tuple(result)

    def all_strata(self) -> Tuple[Stratum, ...]:
        """Gaps first, then one leaf stratum per leaf choice"""
        return self.strata + self.leaf_strata()


@dataclass
class ValidationReport:
    """Outcome of checking the invariants of a piecewise circle map"""
    valid: bool = True
    violations: List[str] = field(default_factory=list)

    @property
    def first_violation(self) -> Optional[str]:
        return self.violations[0] if self.violations else None

    def fail(self, message: str):
        self.valid = False
        self.violations.append(message)


@dataclass
class PairRecord:
    """Comparison between two strata"""
    first: int
    second: int
    comparison: Mobius
    kind: str
    side: Optional[str] = None
    trace_margin: float = 0.0
    separation_margin: float = 0.0
    passed: bool = True
    reason: str = ""


@dataclass
class VerificationReport:
    """All-pairs check of the earthquake axioms"""
    records: List[PairRecord] = field(default_factory=list)
    boundary_error: Optional[float] = None
    passed: bool = True
    worst_trace_margin: float = float("inf")
    worst_separation_margin: float = float("inf")

    def add(self, record: PairRecord):
        self.records.append(record)
        self.passed = self.passed and record.passed
        if record.kind == "hyperbolic":
            self.worst_trace_margin = min(self.worst_trace_margin, record.trace_margin)
            self.worst_separation_margin = min(self.worst_separation_margin, record.separation_margin)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        merged = VerificationReport()
        for record in self.records + other.records:
            merged.add(record)
        errors = [e for e in (self.boundary_error, other.boundary_error) if e is not None]
        merged.boundary_error = max(errors) if errors else None
        merged.passed = merged.passed and self.passed and other.passed
        return merged

    @property
    def failures(self) -> List[PairRecord]:
        return [r for r in self.records if not r.passed]


@dataclass
class HullDiagnostics:
    """Counters and margins collected while building and reading the hull"""
    vertex_count: int = 0
    simplicial_faces: int = 0
    merged_faces: int = 0
    past_faces: int = 0
    future_faces: int = 0
    lightlike_discarded: int = 0
    worst_coplanarity: float = 0.0
    min_trace_margin: Optional[float] = None
    separation_margin: Optional[float] = None
    sampling_delta: Optional[float] = None


@dataclass
class ExtractionResult:
    """Everything produced by one run of the extraction pipeline"""
    earthquake: EarthquakeMap
    surface: Any
    hull: Any
    diagnostics: HullDiagnostics
    chart: Mobius
    report: Optional[VerificationReport] = None
