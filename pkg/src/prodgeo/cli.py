"""Command-line driver: scenario ingestion, verification runs, reports.

Commands::

    prodgeo classify <file>                      four-way verdict per scenario
    prodgeo check [--lemmas|--theorems|--all] [--tol T] [--force]
                  [--seed S] [--format text|json] <file>
    prodgeo catalog [list | run <label> | export <label> <path>]
    prodgeo report --format text|json <file>     full structured document

Exit codes: 0 success, 1 usage error, 2 parse/validation error,
3 verification failure (a lemma residual above tolerance or an inconsistent
biconditional; a skipped proof-residual section is not a failure).

``PRODGEO_THREADS`` caps the number of worker threads used for per-point
evaluation (default 1); results are assembled in sample order either way,
so reports are byte-identical for identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .ambient import AmbientSpace, validate_ambient
from .calculus import LemmaReport, _lemma1_point, _lemma2_point
from .catalog import Scenario, UnknownScenario, catalog_get, catalog_list
from .scenario import (
    AmbientValidationFailure,
    LoadedScenario,
    ScenarioError,
    Tolerances,
    export_scenario,
    load_scenario,
)
from .subgeom import (
    ClassificationResult,
    DegenerateImmersion,
    Immersion,
    _JetGeometry,
    aggregate_classification,
    classify_point,
    param_vars,
)
from .theorems import TheoremVerdict, _PointData, _t2_point, _t3_point, _t4_point, _verdict

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_FAILED = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class VerificationOutcome:
    label: str
    space: AmbientSpace
    immersion: Immersion
    samples: tuple[tuple[float, ...], ...]
    tolerances: Tolerances
    ambient_report: object
    classification: ClassificationResult
    lemma1: LemmaReport | None
    lemma2: LemmaReport | None
    theorems: dict[str, TheoremVerdict] | None

    @property
    def consistent(self) -> bool:
        ok = True
        if self.lemma1 is not None:
            ok = ok and self.lemma1.passed and self.lemma2.passed
        if self.theorems is not None:
            ok = ok and all(v.biconditional_consistent for v in self.theorems.values())
        return ok


def _thread_count() -> int:
    raw = os.environ.get("PRODGEO_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_verification(
    space: AmbientSpace,
    immersion: Immersion,
    samples,
    tolerances: Tolerances = Tolerances(),
    ambient_report=None,
    lemmas: bool = True,
    theorems: bool = True,
    label: str | None = None,
) -> VerificationOutcome:
    """Classification plus the requested identity suites, one geometry per point."""
    samples = tuple(tuple(float(v) for v in u) for u in samples)
    if ambient_report is None:
        images = []
        for u in samples:
            env = dict(zip(param_vars(immersion.n), u))
            images.append([ex.evaluate(c, env) for c in immersion.components])
        ambient_report = validate_ambient(space, images)

    tol = tolerances.identity_tol

    def point_work(u):
        geo = _JetGeometry(immersion, space, u, order=3)
        work = {"cls": classify_point(geo, tolerances.classify_tol)}
        if lemmas:
            directions = np.eye(geo.n)
            choices = list(range(geo.m)) + ["H"]
            work["lemma1"] = _lemma1_point(geo, directions)
            work["lemma2"] = _lemma2_point(geo, directions, choices)
        if theorems:
            data = _PointData(geo, tol)
            work["rank"] = data.rank_phi
            work["t2"] = _t2_point(data, tol)
            work["t3"] = _t3_point(data, tol)
            work["t4"] = _t4_point(data, tol)
        return work

    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(point_work, samples))
    else:
        per_point = [point_work(u) for u in samples]

    classification = aggregate_classification(
        [w["cls"] for w in per_point], immersion.n, tolerances.classify_tol
    )
    lemma1 = lemma2 = None
    if lemmas:
        pts1 = tuple((u, w["lemma1"]) for u, w in zip(samples, per_point))
        pts2 = tuple((u, w["lemma2"]) for u, w in zip(samples, per_point))
        worst1 = max(r for _, r in pts1)
        worst2 = max(r for _, r in pts2)
        lemma1 = LemmaReport("lemma1", worst1, pts1, worst1 <= tol, tol)
        lemma2 = LemmaReport("lemma2", worst2, pts2, worst2 <= tol, tol)
    verdicts = None
    if theorems:
        ranks = [w["rank"] for w in per_point]
        verdicts = {
            key: _verdict(key, [w[key] for w in per_point], ranks, tol)
            for key in ("t2", "t3", "t4")
        }
    return VerificationOutcome(
        label=label if label is not None else immersion.label,
        space=space,
        immersion=immersion,
        samples=samples,
        tolerances=tolerances,
        ambient_report=ambient_report,
        classification=classification,
        lemma1=lemma1,
        lemma2=lemma2,
        theorems=verdicts,
    )


def run_loaded(loaded: LoadedScenario, tolerances=None, lemmas=True, theorems=True):
    return run_verification(
        loaded.space,
        loaded.immersion,
        loaded.samples,
        tolerances or loaded.tolerances,
        ambient_report=loaded.ambient_report,
        lemmas=lemmas,
        theorems=theorems,
        label=loaded.label,
    )


def run_catalog_scenario(scn: Scenario, tolerances: Tolerances = Tolerances(), **kw):
    return run_verification(
        scn.space, scn.immersion, scn.samples, tolerances, label=scn.label, **kw
    )


# ---- structured report -----------------------------------------------------


def build_document(outcome: VerificationOutcome) -> dict:
    rep = outcome.ambient_report
    doc = {
        "scenario": {
            "label": outcome.label,
            "parametric_dim": outcome.immersion.n,
            "ambient_dim": outcome.space.dim,
            "num_samples": len(outcome.samples),
        },
        "tolerances": {
            "identity_tol": outcome.tolerances.identity_tol,
            "classify_tol": outcome.tolerances.classify_tol,
            "fail_threshold": outcome.tolerances.fail_threshold,
        },
        "ambient_validation": {
            "max_f_squared_residual": rep.max_f_squared_residual,
            "max_compat_residual": rep.max_compat_residual,
            "max_parallel_residual": rep.max_parallel_residual,
            "positive_definite": rep.positive_definite,
            "f_is_identity": rep.f_is_identity,
            "passed": rep.passed,
        },
    }
    points = []
    for index, u in enumerate(outcome.samples):
        cls = outcome.classification.points[index]
        entry = {
            "u": list(u),
            "norms": {
                "mean_curvature_sq": cls.mean_curvature_sq,
                "phi": cls.phi_norm,
                "omega": cls.omega_norm,
                "omega_phi": cls.omega_phi_norm,
            },
            "rank_phi": cls.rank_phi,
            "flags": {
                "minimal": cls.minimal,
                "pseudo_umbilical": cls.pseudo_umbilical,
            },
            "residuals": {},
        }
        if outcome.lemma1 is not None:
            entry["residuals"]["lemma1"] = outcome.lemma1.per_point[index][1]
            entry["residuals"]["lemma2"] = outcome.lemma2.per_point[index][1]
        if outcome.theorems is not None:
            for key in ("t2", "t3", "t4"):
                record = outcome.theorems[key].points[index]
                entry["residuals"][key] = {
                    "identity": record.identity_residual,
                    "obstruction": record.obstruction,
                    "proof": record.proof_residual,
                    "branches": dict(record.branches),
                }
        points.append(entry)
    doc["points"] = points

    verdicts = {
        "classification": outcome.classification.classification,
        "dim_d": outcome.classification.dim_d,
        "dim_d_perp": outcome.classification.dim_d_perp,
        "minimal": all(p.minimal for p in outcome.classification.points),
        "pseudo_umbilical": all(
            p.pseudo_umbilical for p in outcome.classification.points
        ),
        "insufficient_samples": outcome.classification.insufficient_samples,
    }
    if outcome.lemma1 is not None:
        verdicts["lemma1"] = {
            "max_residual": outcome.lemma1.max_residual,
            "passed": outcome.lemma1.passed,
        }
        verdicts["lemma2"] = {
            "max_residual": outcome.lemma2.max_residual,
            "passed": outcome.lemma2.passed,
        }
    if outcome.theorems is not None:
        for key in ("t2", "t3", "t4"):
            verdict = outcome.theorems[key]
            verdicts[key] = {
                "identity_holds_everywhere": verdict.identity_holds_everywhere,
                "disjunction_global": verdict.disjunction_global,
                "disjunction_pointwise": verdict.disjunction_pointwise_everywhere,
                "biconditional_consistent": verdict.biconditional_consistent,
                "proof_points_skipped": verdict.proof_points_skipped,
            }
    verdicts["consistent"] = outcome.consistent
    doc["verdicts"] = verdicts
    return doc


def _json_number(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError("report numbers must be finite")
    return f"{x:.17g}"


def _dump_json(obj, indent: int = 0) -> str:
    pad, pad_in = " " * indent, " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _json_number(float(obj))
    if isinstance(obj, str):
        import json as _json

        return _json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [
            f'{pad_in}"{key}": {_dump_json(value, indent + 2)}'
            for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{pad_in}{_dump_json(value, indent + 2)}" for value in obj]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def render_json(outcome: VerificationOutcome) -> str:
    return _dump_json(build_document(outcome)) + "\n"


# ---- text rendering --------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return "skipped"
    return f"{x:.6g}"


def _fmt_point(u) -> str:
    return "(" + ", ".join(f"{v:.6g}" for v in u) + ")"


def render_text(outcome: VerificationOutcome) -> str:
    lines = []
    rep = outcome.ambient_report
    lines.append(
        f"scenario {outcome.label or '(unlabeled)'}: "
        f"n={outcome.immersion.n} -> N={outcome.space.dim}, "
        f"{len(outcome.samples)} sample(s)"
    )
    lines.append(
        f"ambient validation: {'PASS' if rep.passed else 'FAIL'} "
        f"(F^2-I {_fmt(rep.max_f_squared_residual)}, "
        f"compat {_fmt(rep.max_compat_residual)}, "
        f"parallel {_fmt(rep.max_parallel_residual)})"
        + ("  [F is +-identity]" if rep.f_is_identity else "")
    )
    cls = outcome.classification
    lines.append(f"classification: {cls.classification}"
                 + (f"  (dim D = {cls.dim_d}, dim D_perp = {cls.dim_d_perp})"
                    if cls.dim_d is not None else ""))
    if cls.insufficient_samples:
        lines.append("note: fewer than 2 sample points; verdict is weakly supported")
    lines.append(f"{'u':<24}{'|phi|':>12}{'|omega|':>12}{'|omega.phi|':>14}"
                 f"{'rank':>6}{'minimal':>9}{'pseudo-umb':>12}")
    for p in cls.points:
        lines.append(
            f"{_fmt_point(p.u):<24}{p.phi_norm:>12.6g}{p.omega_norm:>12.6g}"
            f"{p.omega_phi_norm:>14.6g}{p.rank_phi:>6d}"
            f"{'yes' if p.minimal else 'no':>9}{'yes' if p.pseudo_umbilical else 'no':>12}"
        )
    if outcome.lemma1 is not None:
        for report in (outcome.lemma1, outcome.lemma2):
            lines.append(
                f"{report.lemma}: max residual {_fmt(report.max_residual)} "
                f"-> {'PASS' if report.passed else 'FAIL'} (tol {report.tol:.1e})"
            )
    if outcome.theorems is not None:
        for key in ("t2", "t3", "t4"):
            verdict = outcome.theorems[key]
            lines.append(
                f"{key.upper()}: identity everywhere: "
                f"{'yes' if verdict.identity_holds_everywhere else 'no'}; "
                f"branch disjunction (global): "
                f"{'yes' if verdict.disjunction_global else 'no'}; "
                f"pointwise: {'yes' if verdict.disjunction_pointwise_everywhere else 'no'}; "
                f"biconditional {'CONSISTENT' if verdict.biconditional_consistent else 'INCONSISTENT'}"
            )
            if verdict.proof_points_skipped:
                lines.append(
                    f"  proof residuals skipped at {verdict.proof_points_skipped} "
                    f"non-pseudo-umbilical point(s)"
                )
            lines.append(f"  {'u':<22}{'identity':>12}{'obstruction':>13}"
                         f"{'proof':>12}  branches")
            for p in verdict.points:
                flags = " ".join(
                    f"{name}={'y' if value else 'n'}" for name, value in p.branches.items()
                )
                lines.append(
                    f"  {_fmt_point(p.u):<22}{p.identity_residual:>12.6g}"
                    f"{p.obstruction:>13.6g}{_fmt(p.proof_residual):>12}  {flags}"
                )
    lines.append(f"overall: {'CONSISTENT' if outcome.consistent else 'FAILED'}")
    return "\n".join(lines) + "\n"


# ---- commands ---------------------------------------------------------------


def _load(ns) -> LoadedScenario:
    return load_scenario(
        ns.scenario,
        force=getattr(ns, "force", False),
        seed_override=getattr(ns, "seed", None),
    )


def _tolerances_for(ns, loaded: LoadedScenario) -> Tolerances:
    tolerances = loaded.tolerances
    tol = getattr(ns, "tol", None)
    if tol is not None:
        tolerances = Tolerances(
            identity_tol=tol,
            classify_tol=tolerances.classify_tol,
            fail_threshold=tolerances.fail_threshold,
        )
    return tolerances


def _cmd_classify(ns) -> int:
    loaded = _load(ns)
    outcome = run_loaded(loaded, _tolerances_for(ns, loaded), lemmas=False, theorems=False)
    sys.stdout.write(render_text(outcome))
    return EXIT_OK


def _cmd_check(ns) -> int:
    loaded = _load(ns)
    lemmas = ns.lemmas or ns.all or not (ns.lemmas or ns.theorems)
    theorems = ns.theorems or ns.all or not (ns.lemmas or ns.theorems)
    outcome = run_loaded(loaded, _tolerances_for(ns, loaded), lemmas=lemmas, theorems=theorems)
    if ns.format == "json":
        sys.stdout.write(render_json(outcome))
    else:
        sys.stdout.write(render_text(outcome))
    return EXIT_OK if outcome.consistent else EXIT_FAILED


def _cmd_report(ns) -> int:
    loaded = _load(ns)
    outcome = run_loaded(loaded, _tolerances_for(ns, loaded))
    if ns.format == "json":
        sys.stdout.write(render_json(outcome))
    else:
        sys.stdout.write(render_text(outcome))
    return EXIT_OK if outcome.consistent else EXIT_FAILED


def _cmd_catalog(ns) -> int:
    if ns.action == "list" or ns.action is None:
        for label in catalog_list():
            sys.stdout.write(label + "\n")
        return EXIT_OK
    if ns.action == "run":
        scn = catalog_get(ns.label)
        outcome = run_catalog_scenario(scn)
        if ns.format == "json":
            sys.stdout.write(render_json(outcome))
        else:
            sys.stdout.write(render_text(outcome))
        return EXIT_OK if outcome.consistent else EXIT_FAILED
    if ns.action == "export":
        scn = catalog_get(ns.label)
        export_scenario(ns.path, scn)
        sys.stdout.write(f"wrote {ns.path}\n")
        return EXIT_OK
    raise _UsageError(f"unknown catalog action {ns.action!r}")


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="prodgeo",
        description="Verify submanifold geometry in locally product Riemannian spaces",
    )
    sub = parser.add_subparsers(dest="command")

    def common(p, with_tol=True):
        p.add_argument("--force", action="store_true",
                       help="downgrade ambient validation failure to a warning")
        p.add_argument("--seed", type=int, default=None,
                       help="override the seed of a random sample section")
        if with_tol:
            p.add_argument("--tol", type=float, default=None,
                           help="override the identity tolerance")

    p_classify = sub.add_parser("classify", help="four-way classification of a scenario")
    common(p_classify)
    p_classify.add_argument("scenario")

    p_check = sub.add_parser("check", help="run the lemma/theorem verification suites")
    p_check.add_argument("--lemmas", action="store_true")
    p_check.add_argument("--theorems", action="store_true")
    p_check.add_argument("--all", action="store_true")
    p_check.add_argument("--format", choices=("text", "json"), default="text")
    common(p_check)
    p_check.add_argument("scenario")

    p_catalog = sub.add_parser("catalog", help="list, run or export built-in scenarios")
    p_catalog.add_argument("action", nargs="?", choices=("list", "run", "export"))
    p_catalog.add_argument("label", nargs="?")
    p_catalog.add_argument("path", nargs="?")
    p_catalog.add_argument("--format", choices=("text", "json"), default="text")

    p_report = sub.add_parser("report", help="emit the full verification document")
    p_report.add_argument("--format", choices=("text", "json"), default="text")
    common(p_report)
    p_report.add_argument("scenario")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise _UsageError("a command is required (classify/check/catalog/report)")
        if ns.command == "catalog":
            if ns.action in ("run", "export") and not ns.label:
                raise _UsageError(f"catalog {ns.action} needs a scenario label")
            if ns.action == "export" and not ns.path:
                raise _UsageError("catalog export needs a destination path")
            return _cmd_catalog(ns)
        if ns.command == "classify":
            return _cmd_classify(ns)
        if ns.command == "check":
            return _cmd_check(ns)
        if ns.command == "report":
            return _cmd_report(ns)
        raise _UsageError(f"unknown command {ns.command!r}")
    except _UsageError as err:
        sys.stderr.write(f"usage error: {err}\n")
        return EXIT_USAGE
    except AmbientValidationFailure as err:
        sys.stderr.write(f"ambient validation: {err}\n")
        return EXIT_INVALID
    except (ScenarioError, UnknownScenario, ex.ParseError, ex.UnknownVariable,
            DegenerateImmersion, OSError, ValueError) as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
