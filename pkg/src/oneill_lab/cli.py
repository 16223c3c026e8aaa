"""Command-line front end: model selection, sampling, runs, exit codes.

Subcommands: ``verify`` (structure and identity sections), ``theorems``
(inequality scans), ``report`` (all sections).  Exit codes: 0 pass, 1 fail,
2 usage error, 3 pass-with-flags, 4 model load failure, 5 empty admissible
sample, 6 report write failure.
"""

from __future__ import annotations

import argparse
import datetime
import os
import re
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .contact import SasakianSpaceFormSpec, build_r2m1, space_form_r4_at, verify_sasakian
from .errors import (
    EmptySampleError,
    ModelLoadError,
    OneillLabError,
    RejectedInputError,
)
from .invariants import analyze_point
from .report import Report, Tolerances, decide_verdict, identity_tolerance
from .riemannian import riemann_at
from .sampling import SampleConfig, sample_model_points, sample_submersion_points
from .submersion import (
    SubmersionModel,
    build_horizontal_xi_example,
    build_vertical_xi_example,
    load_custom_model,
    verify_riemannian_submersion,
    verify_structure_lemmas,
)
from .theorems import (
    THEOREM_IDS,
    applicable_ids,
    evaluate_theorem,
    required_xi_case,
    scan_from_records,
)

_IDENTITY_IDS = ("T1", "T4", "S1", "S2", "S3", "R1", "R2", "gauss3")


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str = "vertical-xi"
    points: int = 100
    seed: int = 42
    box: tuple = (-2.0, 2.0)
    tolerances: Tolerances = Tolerances()
    theorems: Optional[tuple] = None  # None means all applicable ids
    probe: str = "first"
    out: Optional[str] = None
    no_timestamp: bool = False


def resolve_model(name: str):
    """Builtin name, builtin family, or path to a model file."""
    if name == "vertical-xi":
        return build_vertical_xi_example()
    if name == "horizontal-xi":
        return build_horizontal_xi_example()
    m = re.fullmatch(r"r2m1:(\d+)", name)
    if m:
        try:
            return build_r2m1(int(m.group(1)))
        except OneillLabError as exc:
            raise ModelLoadError(str(exc)) from exc
    if name.endswith(".json") or os.path.exists(name):
        try:
            return load_custom_model(name)
        except (OneillLabError, OSError, ValueError) as exc:
            raise ModelLoadError(f"cannot load model file {name}: {exc}") from exc
    raise ModelLoadError(f"unknown model: {name}")


def _config_echo(config: RunConfig) -> dict:
    tol = config.tolerances
    return {
        "command": config.command,
        "model": config.model,
        "points": config.points,
        "seed": config.seed,
        "box": [float(config.box[0]), float(config.box[1])],
        "tolerances": {
            "alg": tol.alg,
            "d1": tol.d1,
            "curv": tol.curv,
            "d2curv": tol.d2curv,
        },
        "theorems": list(config.theorems) if config.theorems is not None else "all",
        "probe": config.probe,
    }


def _curv1_residual(spec: SasakianSpaceFormSpec, pt: np.ndarray) -> float:
    curv = riemann_at(spec.model, pt)
    closed = space_form_r4_at(spec, pt)
    return float(np.max(np.abs(curv.r4 - closed)))


def _spaceform_structure(spec: SasakianSpaceFormSpec, pts, tol: Tolerances):
    sas = {}
    curv1 = 0.0
    for pt in pts:
        for key, val in verify_sasakian(spec, pt).items():
            sas[key] = max(sas.get(key, 0.0), float(val))
        curv1 = max(curv1, _curv1_residual(spec, pt))
    section = {
        "points": len(pts),
        "sasakian": sas,
        "curvature": {"curv1": curv1},
    }
    checks = {f"sasakian.{k}": v <= tol.d1 for k, v in sas.items()}
    checks["curvature.curv1"] = curv1 <= tol.curv
    return section, checks


def _submersion_structure(sub: SubmersionModel, pts, tol: Tolerances):
    spec = sub.total
    sas = {}
    lemmas = {}
    curv1 = 0.0
    kernel = 0.0
    lengths = []
    pd_flags = []
    for pt in pts:
        for key, val in verify_sasakian(spec, pt).items():
            sas[key] = max(sas.get(key, 0.0), float(val))
        curv1 = max(curv1, _curv1_residual(spec, pt))
        chk = verify_riemannian_submersion(sub, pt)
        kernel = max(kernel, float(chk.kernel_residual))
        lengths.append(float(chk.length_residual))
        pd_flags.append(bool(chk.base_pd))
        for key, val in verify_structure_lemmas(sub, pt).items():
            lemmas[key] = max(lemmas.get(key, 0.0), float(val))
    length = max(lengths)
    section = {
        "points": len(pts),
        "sasakian": sas,
        "curvature": {"curv1": curv1},
        "submersion": {
            "kernel": kernel,
            "length": length,
            "length_residuals": lengths,
            "base_pd_all": all(pd_flags),
            "base_pd_flags": pd_flags,
        },
        "lemmas": lemmas,
    }
    checks = {f"sasakian.{k}": v <= tol.d1 for k, v in sas.items()}
    checks["curvature.curv1"] = curv1 <= tol.curv
    checks["submersion.kernel"] = kernel <= tol.d1
    checks["submersion.length"] = length <= tol.d1
    checks["submersion.base_pd"] = all(pd_flags)
    for k, v in lemmas.items():
        checks[f"lemmas.{k}"] = v <= tol.d1
    return section, checks


def _identity_section(analyses, tol: Tolerances):
    maxima = {key: None for key in _IDENTITY_IDS}
    for analysis in analyses:
        for key, val in analysis.packet.identity_residuals.items():
            if val is None:
                continue
            cur = maxima[key]
            maxima[key] = float(val) if cur is None else max(cur, float(val))
    section = {"max_residuals": maxima}
    checks = {}
    for key, val in maxima.items():
        if val is not None:
            checks[f"identities.{key}"] = val <= identity_tolerance(key, tol)
    return section, checks


def _theorem_section(sub, analyses, config: RunConfig):
    ids = config.theorems
    if ids is None:
        ids = applicable_ids(sub.xi_case)
    else:
        for tid in ids:
            case = required_xi_case(tid)
            if case != sub.xi_case:
                raise RejectedInputError(
                    f"{tid} needs a model with the Reeb field {case}, "
                    f"got {sub.xi_case}"
                )
    rng = np.random.default_rng(config.seed + 1)
    buckets = {tid: [] for tid in ids}
    for analysis in analyses:
        for tid in ids:
            buckets[tid].extend(evaluate_theorem(analysis, tid, config.probe, rng))
    section = {}
    checks = {}
    for tid in ids:
        scan = scan_from_records(tid, buckets[tid], len(analyses))
        entry = {
            "points_checked": scan.points_checked,
            "records": len(scan.records),
            "violations": scan.violations,
            "equalities": scan.equalities,
            "min_slack": scan.min_slack,
            "argmin_point": [float(x) for x in scan.argmin_point],
        }
        if scan.variant_tallies is not None:
            entry["variants"] = {
                name: dict(t) for name, t in scan.variant_tallies.items()
            }
            surviving = [
                name
                for name, t in scan.variant_tallies.items()
                if t["violations"] == 0
            ]
            entry["surviving_variants"] = surviving
            checks[f"theorems.{tid}"] = len(surviving) > 0
        else:
            checks[f"theorems.{tid}"] = scan.violations == 0
        section[tid] = entry
    return section, checks


def run(config: RunConfig) -> Report:
    """Execute the configured run and assemble the report.

    Raises ModelLoadError, EmptySampleError, or RejectedInputError; the CLI
    wrapper maps these to exit codes."""
    model_obj = resolve_model(config.model)
    tol = config.tolerances
    scfg = SampleConfig(points=config.points, seed=config.seed, box=config.box)

    structure = identities = theorems = None
    checks = {}
    if isinstance(model_obj, SasakianSpaceFormSpec):
        if config.command == "theorems":
            raise RejectedInputError(
                "theorem scans need a submersion model, "
                f"got the plain total space {config.model}"
            )
        pts = sample_model_points(model_obj.model, scfg)
        structure, checks = _spaceform_structure(model_obj, pts, tol)
        model_name = config.model
    else:
        sub = model_obj
        model_name = sub.name
        pts = sample_submersion_points(sub, scfg)
        if config.command in ("verify", "report"):
            structure, structure_checks = _submersion_structure(sub, pts, tol)
            checks.update(structure_checks)
        if config.command in ("verify", "theorems", "report"):
            analyses = [analyze_point(sub, pt) for pt in pts]
            if config.command in ("verify", "report"):
                identities, id_checks = _identity_section(analyses, tol)
                checks.update(id_checks)
            if config.command in ("theorems", "report"):
                theorems, th_checks = _theorem_section(sub, analyses, config)
                checks.update(th_checks)

    verdict, flags_raised = decide_verdict(checks, model_name)
    return Report(
        config=_config_echo(config),
        structure=structure,
        identities=identities,
        theorems=theorems,
        checks=checks,
        verdict=verdict,
        flags_raised=flags_raised,
    )


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", default="vertical-xi")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--box", default="-2,2", help="sampling interval LO,HI per coordinate")
    p.add_argument("--tol-alg", type=float, default=Tolerances().alg)
    p.add_argument("--tol-d1", type=float, default=Tolerances().d1)
    p.add_argument("--tol-curv", type=float, default=Tolerances().curv)
    p.add_argument("--tol-d2curv", type=float, default=Tolerances().d2curv)
    p.add_argument("--theorems", default="all", help="comma-separated ids or 'all'")
    p.add_argument("--probe", default="first", help="first | all | random:<k>")
    p.add_argument("--out", default=None)
    p.add_argument("--no-timestamp", action="store_true")


def cli_parse(argv) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="oneill-lab",
        description="numerical verification runs for submersion curvature bounds",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("verify", "structure and identity residuals"),
        ("theorems", "inequality scans"),
        ("report", "full run: structure, identities, theorems"),
    ):
        _add_common_flags(subparsers.add_parser(name, help=blurb))
    ns = parser.parse_args(argv)

    if ns.points < 1:
        parser.error(f"--points must be positive, got {ns.points}")
    try:
        lo, hi = (float(tok) for tok in ns.box.split(","))
    except ValueError:
        parser.error(f"--box expects LO,HI, got {ns.box!r}")
    if not hi > lo:
        parser.error(f"--box needs LO < HI, got {ns.box!r}")
    if ns.probe not in ("first", "all"):
        m = re.fullmatch(r"random:(\d+)", ns.probe)
        if not m or int(m.group(1)) < 1:
            parser.error(f"--probe expects first, all, or random:<k>, got {ns.probe!r}")
    theorems = None
    if ns.theorems != "all":
        ids = tuple(tok.strip() for tok in ns.theorems.split(",") if tok.strip())
        for tid in ids:
            if tid not in THEOREM_IDS:
                parser.error(f"unknown theorem id: {tid}")
        theorems = ids
    return RunConfig(
        command=ns.command,
        model=ns.model,
        points=ns.points,
        seed=ns.seed,
        box=(lo, hi),
        tolerances=Tolerances(
            alg=ns.tol_alg, d1=ns.tol_d1, curv=ns.tol_curv, d2curv=ns.tol_d2curv
        ),
        theorems=theorems,
        probe=ns.probe,
        out=ns.out,
        no_timestamp=ns.no_timestamp,
    )


_VERDICT_EXIT = {"pass": 0, "fail": 1, "pass-with-flags": 3}


def main(argv=None) -> int:
    try:
        config = cli_parse(argv)
    except SystemExit as exc:
        code = exc.code
        return 0 if code in (0, None) else 2
    try:
        report = run(config)
    except ModelLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except EmptySampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except RejectedInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    timestamp = (
        None
        if config.no_timestamp
        else datetime.datetime.now(datetime.timezone.utc).isoformat()
    )
    text = report.render(timestamp)
    if config.out is not None:
        try:
            with open(config.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return 6
    else:
        sys.stdout.write(text)
    print(f"verdict: {report.verdict}", file=sys.stderr)
    return _VERDICT_EXIT[report.verdict]
