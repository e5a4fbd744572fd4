"""
Command line entry point
synthesize | extract | verify | render, JSON in and out
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config import get_config

from .circlemap import finite_earthquake_boundary, validate
from .earthquake import boundary_agreement, verify_earthquake
from .errors import DegenerateFlat, GeometryError
from .mobius import Side
from .models import VerificationReport
from .pipeline import EarthquakeExtractor
from .render import render_circle_map, render_earthquake, save_svg
from .schemas import (
    CircleMapDocument,
    DiagnosticsDocument,
    EarthquakeDocument,
    LaminationDocument,
    Tolerances,
    VerificationDocument,
    read_any,
    read_document,
    write_document,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_FLAT_HULL = 3


class RunConfig(BaseModel):
    """Per-run settings; defaults come from the environment configuration"""
    model_config = ConfigDict(extra="forbid")

    command: Literal["synthesize", "extract", "verify", "render"]
    input: Path
    output: Optional[Path] = None
    samples: int = Field(default_factory=lambda: get_config().SAMPLES)
    side: Side = Side.LEFT
    leaf_t: float = Field(default_factory=lambda: get_config().LEAF_T)
    seed: int = Field(default_factory=lambda: get_config().SEED)
    workers: int = Field(default_factory=lambda: get_config().WORKERS)
    tolerances: Tolerances = Field(default_factory=lambda: get_config().tolerances())
    truth: Optional[Path] = None
    dump_hull: Optional[Path] = None
    overlay: bool = False

    @field_validator("samples")
    @classmethod
    def enough_samples(cls, value: int) -> int:
        if value < 4:
            raise ValueError("samples must be at least 4")
        return value

    @field_validator("leaf_t")
    @classmethod
    def leaf_t_in_range(cls, value: float) -> float:
        if not 0.0 <= value <= 1.0:
            raise ValueError("leaf parameter t must lie in [0, 1]")
        return value

    @field_validator("workers")
    @classmethod
    def positive_workers(cls, value: int) -> int:
        if value < 1:
            raise ValueError("workers must be positive")
        return value

    def output_path(self, suffix: str) -> Path:
        """Explicit --out, else next to the input"""
        if self.output is not None:
            return self.output
        stem = self.input.name.split(".")[0]
        return self.input.with_name(stem + suffix)


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(path.name.split(".")[0] + suffix)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quake", description="Earthquake maps from convex hulls in anti-de Sitter space")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("input", type=Path)
        p.add_argument("--out", dest="output", type=Path)
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="override a tolerance")

    p = sub.add_parser("synthesize", help="boundary map and exact earthquake of a finite lamination")
    common(p)

    p = sub.add_parser("extract", help="earthquake of one boundary component of the hull of graph(f)")
    common(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--side", choices=[s.value for s in Side])
    p.add_argument("--leaf-t", dest="leaf_t", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--dump-hull", dest="dump_hull", type=Path)

    p = sub.add_parser("verify", help="check the earthquake axioms")
    common(p)
    p.add_argument("--map", dest="truth", type=Path, help="circle map to compare boundary values with")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("render", help="SVG of an earthquake or a circle map")
    common(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--overlay", action="store_true", help="draw the image lamination")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if v is not None and k not in ("verbose", "tol")}
    tolerances = get_config().tolerances().with_overrides(args.tol)
    return RunConfig(**values, tolerances=tolerances)


def _summarize(report: VerificationReport):
    total = len(report.records)
    if report.passed:
        print(f"[OK] {total} stratum pairs satisfy the earthquake axioms")
    else:
        print(f"[ERROR] {len(report.failures)} of {total} stratum pairs fail")
        for record in report.failures[:10]:
            print(f"   - pair ({record.first}, {record.second}): {record.reason}")
    if report.boundary_error is not None:
        print(f"   Boundary agreement: {report.boundary_error:.3g}")


def cmd_synthesize(run: RunConfig) -> int:
    spec = read_document(run.input, LaminationDocument).to_domain()
    f, truth = finite_earthquake_boundary(spec)
    map_path = write_document(CircleMapDocument.from_domain(f), run.output_path(".map.json"))
    truth_path = write_document(EarthquakeDocument.from_domain(truth), _sibling(map_path, ".truth.json"))
    print(f"[OK] Circle map written to {map_path}")
    print(f"[OK] Ground-truth earthquake written to {truth_path}")
    report = verify_earthquake(truth, run.workers, run.tolerances.separation_eps, run.tolerances.parabolic_eps)
    report.boundary_error = boundary_agreement(truth, f, seed=run.seed)
    _summarize(report)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_extract(run: RunConfig) -> int:
    f = read_document(run.input, CircleMapDocument).to_domain()
    extractor = EarthquakeExtractor(
        samples=run.samples,
        side=run.side,
        leaf_t=run.leaf_t,
        tolerances=run.tolerances,
        workers=run.workers,
        seed=run.seed,
        dump_hull=run.dump_hull,
    )
    result = extractor.extract(f)
    out = write_document(EarthquakeDocument.from_domain(result.earthquake), run.output_path(".earthquake.json"))
    diag_path = _sibling(out, ".diagnostics.json")
    write_document(DiagnosticsDocument.from_domain(result.diagnostics, result.report.boundary_error), diag_path)
    d = result.diagnostics
    print(f"[OK] Earthquake written to {out}")
    print(f"   Faces: {d.merged_faces} merged ({d.past_faces} past, {d.future_faces} future, {d.lightlike_discarded} lightlike)")
    print(f"   Leaves: {len(result.earthquake.lamination)}   Side: {result.earthquake.side.value}")
    _summarize(result.report)
    return EXIT_OK if result.report.passed else EXIT_VERIFY_FAILED


def cmd_verify(run: RunConfig) -> int:
    E = read_document(run.input, EarthquakeDocument).to_domain()
    report = verify_earthquake(E, run.workers, run.tolerances.separation_eps, run.tolerances.parabolic_eps)
    if run.truth is not None:
        f = read_document(run.truth, CircleMapDocument).to_domain()
        report.boundary_error = boundary_agreement(E, f, seed=run.seed)
        if report.boundary_error > 1e-5:
            report.passed = False
            print(f"[ERROR] Earthquake disagrees with the circle map by {report.boundary_error:.3g}")
    if run.output is not None:
        write_document(VerificationDocument.from_domain(report), run.output)
    _summarize(report)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_render(run: RunConfig) -> int:
    document = read_any(run.input)
    if isinstance(document, EarthquakeDocument):
        drawing = render_earthquake(document.to_domain(), overlay=run.overlay, seed=run.seed)
    elif isinstance(document, CircleMapDocument):
        f = document.to_domain()
        report = validate(f)
        if not report.valid:
            raise GeometryError(f"invalid circle map: {report.first_violation}")
        drawing = render_circle_map(f, samples=min(run.samples, 4000))
    else:
        raise ValueError("render needs an earthquake or a circle map")
    path = save_svg(drawing, run.output_path(".svg"))
    print(f"[OK] SVG written to {path}")
    return EXIT_OK


COMMANDS = {
    "synthesize": cmd_synthesize,
    "extract": cmd_extract,
    "verify": cmd_verify,
    "render": cmd_render,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: get_config().LOG_LEVEL, 1: "INFO"}.get(args.verbose, "DEBUG")
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        run = _run_config(args)
        return COMMANDS[run.command](run)
    except DegenerateFlat as e:
        print(f"[ERROR] Flat hull: {e}")
        if e.mobius is not None:
            m = e.mobius
            print(f"   f is the Mobius map [[{m.a!r}, {m.b!r}], [{m.c!r}, {m.d!r}]]")
        return EXIT_FLAT_HULL
    except (ValidationError, GeometryError, ValueError, OSError) as e:
        print(f"[ERROR] {e}")
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
