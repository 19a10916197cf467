"""Command line: evaluate, design, band, compare, perturb, simulate, reproduce.

Every subcommand reads an optional JSON config (``--config``) whose fields
are overridden by flags.  Exit status: 0 ok, 1 infeasible or mismatching
result, 2 usage or validation error, 3 internal consistency error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from . import acceptance
from .bands import DEFAULT_NUS, DEFAULT_THETAS, foc_band
from .design import OCRequirement, SearchLimits, compare_asn, design_dsp, design_gmds, design_mds, design_ssp
from .errors import ConsistencyError, DomainError
from .fuzzy import TriangularFuzzy, fuzzy_from_json, fuzzy_to_json
from .fuzzyprob import InspectionErrors, apply_inspection_errors, ati_from_pa, pa_band
from .kernels import DistModel, PlanParams, pa_gmds
from .report import to_csv, to_json
from .simulate import SimConfig, simulate_gmds, trace

EXIT_OK, EXIT_EMPTY, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

TASKS = ("evaluate", "design", "band", "compare", "perturb", "simulate", "reproduce")


class ValidationError(Exception):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


@dataclass
class RunConfig:
    task: str
    values: dict = field(default_factory=dict)
    out: Optional[str] = None
    fmt: str = "csv"
    raw: bool = False
    jobs: int = 1
    problems: list = field(default_factory=list)

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    def require(self, key: str) -> Any:
        if key not in self.values or self.values[key] is None:
            self.problems.append(f"missing required field '{key}'")
        return self.values.get(key)

    def parse(self, key: str, fn, default: Any = None, required: bool = False):
        raw = self.require(key) if required else self.values.get(key, default)
        if raw is None:
            return default
        try:
            return fn(raw)
        except (DomainError, ValueError, TypeError, KeyError) as exc:
            self.problems.append(f"{key}: {exc}")
            return None

    def check(self) -> None:
        if self.problems:
            raise ValidationError(self.problems)


def _plan(obj) -> PlanParams:
    if isinstance(obj, str):
        obj = _ints(obj)
    if isinstance(obj, dict):
        return PlanParams(**{k: int(obj[k]) for k in ("n", "m", "k", "c1", "c2")})
    if len(obj) != 5:
        raise ValueError("plan needs n,m,k,c1,c2")
    return PlanParams(*(int(x) for x in obj))


def _fuzzy(obj):
    if isinstance(obj, str):
        obj = _floats(obj)
    if isinstance(obj, list) and len(obj) == 1:
        obj = obj[0]
    return fuzzy_from_json(obj)


def _errors(obj) -> InspectionErrors:
    if isinstance(obj, str):
        obj = _floats(obj)
    if isinstance(obj, dict):
        return InspectionErrors(float(obj["delta1"]), float(obj["delta2"]))
    return InspectionErrors(*(float(x) for x in obj))


def _float_list(obj) -> list[float]:
    if isinstance(obj, str):
        return _floats(obj)
    if isinstance(obj, (int, float)):
        return [float(obj)]
    return [float(x) for x in obj]


def _risk(obj):
    if isinstance(obj, str):
        obj = _floats(obj)
        obj = obj[0] if len(obj) == 1 else obj
    if isinstance(obj, (int, float)):
        return float(obj)
    return fuzzy_from_json(obj)


def _limits(cfg: RunConfig) -> SearchLimits:
    base = dict(cfg.get("limits") or {})
    for key in ("n_max", "m_max", "c2_max", "k_max"):
        if cfg.get(key) is not None:
            base[key] = cfg.get(key)
    return SearchLimits(**{k: (None if v is None else int(v)) for k, v in base.items()})


def _requirement(cfg: RunConfig, aql=None, lql=None) -> Optional[OCRequirement]:
    req = dict(cfg.get("requirement") or {})
    for key in ("aql", "lql", "alpha", "beta", "nu"):
        if cfg.get(key) is not None:
            req[key] = cfg.get(key)
    if aql is not None:
        req["aql"], req["lql"] = aql, lql
    problems = [f"missing required field '{k}'" for k in ("aql", "lql") if k not in req]
    if problems:
        cfg.problems.extend(problems)
        return None
    try:
        return OCRequirement(
            _fuzzy(req["aql"]),
            _fuzzy(req["lql"]),
            _risk(req.get("alpha", 0.05)),
            _risk(req.get("beta", 0.10)),
            float(req.get("nu", 1.0)),
        )
    except (DomainError, ValueError, TypeError) as exc:
        cfg.problems.append(f"requirement: {exc}")
        return None


# subcommands ---------------------------------------------------------------


def cmd_evaluate(cfg: RunConfig):
    model = cfg.parse("model", DistModel.parse, DistModel.BINOMIAL)
    plan = cfg.parse("plan", _plan, required=True)
    fz = cfg.parse("fuzzy", _fuzzy, required=True)
    nus = cfg.parse("nu", _float_list, [0.0])
    lot = cfg.parse("lot_size", int)
    errs = cfg.parse("errors", _errors)
    if nus:
        bad = [v for v in nus if not 0.0 <= v <= 1.0]
        if bad:
            cfg.problems.append(f"nu values outside [0, 1]: {bad}")
    if errs is not None and not isinstance(fz, TriangularFuzzy):
        cfg.problems.append("inspection errors need a triangular fuzzy number")
    if lot is not None and plan is not None and lot < plan.n:
        cfg.problems.append(f"lot_size {lot} smaller than n={plan.n}")
    cfg.check()
    number = apply_inspection_errors(fz, errs) if errs is not None else fz
    rows = []
    for nu in nus:
        cut = number.cut(nu)
        band = pa_band(number, nu, plan, model)
        row = {"nu": nu, "p_lo": cut.lo, "p_hi": cut.hi, "pa_lo": band.lo, "pa_hi": band.hi, "with_errors": errs is not None}
        if lot is not None:
            ati = ati_from_pa(band, plan.n, lot)
            row.update(ati_lo=ati.lo, ati_hi=ati.hi)
        rows.append(row)
    cols = ["nu", "p_lo", "p_hi", "pa_lo", "pa_hi"] + (["ati_lo", "ati_hi"] if lot is not None else []) + ["with_errors"]
    payload = {"task": "evaluate", "model": model.value, "plan": vars(plan), "fuzzy": fuzzy_to_json(fz), "rows": rows}
    return rows, cols, payload, EXIT_OK


DESIGNERS = {"gmds": design_gmds, "mds": design_mds, "ssp": design_ssp, "dsp": design_dsp}
DESIGN_COLS = ["family", "feasible", "n", "m", "k", "c1", "c2", "asn", "asn_lower_problem", "asn_upper_problem", "binding"]


def _design_row(res) -> dict:
    row = {k: v for k, v in res.to_dict().items() if k != "plan"}
    if res.plan is not None:
        p = vars(res.plan)
        row.update(n=p.get("n", p.get("n1")), m=p.get("m"), k=p.get("k"), c1=p.get("c1", p.get("c")), c2=p.get("c2"))
    return row


def cmd_design(cfg: RunConfig):
    model = cfg.parse("model", DistModel.parse, DistModel.BINOMIAL)
    family = cfg.get("family", "gmds")
    if family not in DESIGNERS:
        cfg.problems.append(f"unknown family {family!r}; choose from {sorted(DESIGNERS)}")
    limits = cfg.parse("limits", lambda _: _limits(cfg), SearchLimits()) if cfg.get("limits") else _safe_limits(cfg)
    req = _requirement(cfg)
    cfg.check()
    fn = DESIGNERS[family]
    res = fn(req, model, limits, cfg.jobs) if family in ("gmds", "mds") else fn(req, model, limits)
    row = _design_row(res)
    payload = {"task": "design", "model": model.value, "result": res.to_dict()}
    return [row], DESIGN_COLS, payload, EXIT_OK if res.feasible else EXIT_EMPTY


def _safe_limits(cfg: RunConfig) -> SearchLimits:
    try:
        return _limits(cfg)
    except (DomainError, ValueError, TypeError) as exc:
        cfg.problems.append(f"limits: {exc}")
        return SearchLimits()


BAND_COLS = ["theta", "nu", "p_lo", "p_hi", "pa_lo", "pa_hi", "with_errors"]


def cmd_band(cfg: RunConfig):
    model = cfg.parse("model", DistModel.parse, DistModel.BINOMIAL)
    plan = cfg.parse("plan", _plan, required=True)
    base = cfg.parse("fuzzy", _fuzzy, required=True)
    thetas = cfg.parse("thetas", _float_list, list(DEFAULT_THETAS))
    nus = cfg.parse("nus", _float_list, list(DEFAULT_NUS))
    errs = cfg.parse("errors", _errors)
    if base is not None and not isinstance(base, TriangularFuzzy):
        cfg.problems.append("band sweeps need a triangular base number")
    cfg.check()
    try:
        pts = foc_band(base, plan, model, nus, thetas, errs, jobs=cfg.jobs)
    except DomainError as exc:
        raise ValidationError([str(exc)]) from None
    rows = [p.row() for p in pts]
    payload = {"task": "band", "model": model.value, "plan": vars(plan), "base": fuzzy_to_json(base), "rows": rows}
    return rows, BAND_COLS, payload, EXIT_OK if rows else EXIT_EMPTY


COMPARE_COLS = ["aql", "lql", "ssp", "dsp", "mds", "gmds"]


def cmd_compare(cfg: RunConfig):
    model = cfg.parse("model", DistModel.parse, DistModel.BINOMIAL)
    limits = _safe_limits(cfg)
    gmds_limits = None
    if cfg.get("gmds_k_max") is not None:
        gmds_limits = SearchLimits(limits.n_max, limits.m_max, limits.c2_max, int(cfg.get("gmds_k_max")))
    pairs = cfg.get("pairs")
    reqs = []
    if pairs:
        for a, b in pairs:
            reqs.append(_requirement(cfg, a, b))
    else:
        reqs.append(_requirement(cfg))
    cfg.check()
    rows, status = [], EXIT_OK
    for req in reqs:
        res = compare_asn(req, model, limits, gmds_limits, cfg.jobs)
        row = {"aql": req.aql.modal, "lql": req.lql.modal}
        for fam, r in res.items():
            row[fam] = r.asn if r.feasible else None
            if not r.feasible:
                status = EXIT_EMPTY
        rows.append(row)
    payload = {"task": "compare", "model": model.value, "rows": rows}
    return rows, COMPARE_COLS, payload, status


PERTURB_COLS = ["theta", "p_lo", "p_hi", "pa_lo", "pa_hi", "pe_lo", "pe_hi", "pe_p_lo", "pe_p_hi"]


def cmd_perturb(cfg: RunConfig):
    model = cfg.parse("model", DistModel.parse, DistModel.BINOMIAL)
    plan = cfg.parse("plan", _plan, required=True)
    base = cfg.parse("fuzzy", _fuzzy, required=True)
    errs = cfg.parse("errors", _errors, required=True)
    thetas = cfg.parse("thetas", _float_list, [round(0.01 * i, 10) for i in range(7)])
    nu = cfg.parse("nu", float, 0.0)
    baseline = cfg.get("baseline") or {}
    b_model = DistModel.parse(baseline.get("model", model)) if baseline else model
    b_plan = _plan(baseline["plan"]) if "plan" in baseline else plan
    b_base = _fuzzy(baseline["fuzzy"]) if "fuzzy" in baseline else base
    cfg.check()
    try:
        with_e = foc_band(base, plan, model, [nu], thetas, errs, jobs=cfg.jobs)
        without = foc_band(b_base, b_plan, b_model, [nu], thetas, jobs=cfg.jobs)
    except DomainError as exc:
        raise ValidationError([str(exc)]) from None
    rows = []
    for we, wo in zip(with_e, without):
        rows.append({
            "theta": we.theta,
            "p_lo": wo.p_cut.lo, "p_hi": wo.p_cut.hi,
            "pa_lo": wo.pa_cut.lo, "pa_hi": wo.pa_cut.hi,
            "pe_p_lo": we.p_cut.lo, "pe_p_hi": we.p_cut.hi,
            "pe_lo": we.pa_cut.lo, "pe_hi": we.pa_cut.hi,
        })
    payload = {"task": "perturb", "model": model.value, "errors": vars(errs), "nu": nu, "rows": rows}
    return rows, PERTURB_COLS, payload, EXIT_OK


SIM_COLS = ["accept_rate", "stderr", "lots_counted", "analytic"]


def cmd_simulate(cfg: RunConfig):
    model = cfg.parse("model", DistModel.parse, DistModel.BINOMIAL)
    plan = cfg.parse("plan", _plan, required=True)
    p = cfg.parse("p", float, required=True)
    errs = cfg.parse("errors", _errors)
    lots = cfg.parse("lots", int, 1_000_000)
    warmup = cfg.parse("warmup", int, 100)
    seed = cfg.parse("seed", int, 0)
    cfg.check()
    try:
        sc = SimConfig(p, plan, model, lots, warmup, seed, errs)
    except DomainError as exc:
        raise ValidationError([str(exc)]) from None
    res = simulate_gmds(sc, jobs=cfg.jobs)
    p_eff = errs.apparent(p) if errs is not None else p
    row = {**res.to_dict(), "analytic": pa_gmds(p_eff, plan, model)}
    trace_path = cfg.get("trace")
    if trace_path:
        Path(trace_path).write_text(to_csv(trace(sc, cfg.get("trace_limit", 10_000)), ["lot", "d", "clean_prev", "accepted", "counted"]))
    payload = {"task": "simulate", "model": model.value, "plan": vars(plan), "p": p, **row}
    return [row], SIM_COLS, payload, EXIT_OK


def cmd_reproduce(cfg: RunConfig):
    cfg.check()
    lines: list[str] = []
    results = acceptance.run_all(lines.append)
    out_dir = cfg.get("out_dir")
    if out_dir:
        _write_tables(Path(out_dir), cfg.raw)
    for line in lines:
        print(line, file=sys.stderr)
    rows = [{"criterion": c.number, "title": c.title, "passed": c.passed, "mismatches": len(c.failures), "flagged": len(c.flags)} for c in results]
    payload = {"task": "reproduce", "criteria": rows, "details": {c.number: c.failures + c.flags for c in results}}
    status = EXIT_OK if all(c.passed for c in results) else EXIT_EMPTY
    return rows, ["criterion", "title", "passed", "mismatches", "flagged"], payload, status


def _write_tables(out: Path, raw: bool) -> None:
    """Regenerate the reference listings next to their checked-in expectations."""
    out.mkdir(parents=True, exist_ok=True)
    pts = foc_band(acceptance.THETA_BASE, acceptance.THETA_PLAN, acceptance.THETA_MODEL, list(DEFAULT_NUS))
    (out / "theta_sweep.csv").write_text(to_csv([p.row() for p in pts], BAND_COLS, raw))
    thetas = [round(0.01 * i, 10) for i in range(7)]
    we = foc_band(acceptance.ERROR_BASE, acceptance.ERROR_PLAN, acceptance.ERROR_MODEL, [0.0], thetas, acceptance.ERRORS)
    (out / "error_sweep.csv").write_text(to_csv([p.row() for p in we], BAND_COLS, raw))
    rows = []
    for model, aql, lql, _ in acceptance._designs_reference():
        res = design_gmds(OCRequirement.crisp(aql, lql), model, acceptance.PUBLISHED_DESIGN_LIMITS)
        rows.append({"model": model, "aql": aql, "lql": lql, **_design_row(res)})
    (out / "designs.csv").write_text(to_csv(rows, ["model", "aql", "lql"] + DESIGN_COLS, raw))


COMMANDS = {
    "evaluate": cmd_evaluate,
    "design": cmd_design,
    "band": cmd_band,
    "compare": cmd_compare,
    "perturb": cmd_perturb,
    "simulate": cmd_simulate,
    "reproduce": cmd_reproduce,
}


# argument parsing ----------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("-o", "--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), dest="fmt")
    p.add_argument("--raw", action="store_true", default=None, help="full precision instead of 4 decimals")
    p.add_argument("--jobs", type=int, help="worker processes (default: $FUZZPLAN_JOBS or 1)")
    p.add_argument("--model", choices=("binomial", "poisson"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzplan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="task", required=True)

    p = sub.add_parser("evaluate", help="acceptance / ATI cuts for one plan and fuzzy defect fraction")
    _add_common(p)
    p.add_argument("--plan", help="n,m,k,c1,c2")
    p.add_argument("--fuzzy", help="p1,p2,p3 (or five points for pentagonal)")
    p.add_argument("--nu", help="comma-separated cut levels")
    p.add_argument("--lot-size", type=int, dest="lot_size")
    p.add_argument("--errors", help="delta1,delta2")

    p = sub.add_parser("design", help="ASN-minimal plan for an AQL/LQL requirement")
    _add_common(p)
    p.add_argument("--family", choices=sorted(DESIGNERS))
    p.add_argument("--aql", help="crisp value or fuzzy points")
    p.add_argument("--lql")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--nu", type=float)
    for lim in ("n-max", "m-max", "c2-max", "k-max"):
        p.add_argument(f"--{lim}", type=int, dest=lim.replace("-", "_"))

    p = sub.add_parser("band", help="operating-characteristic band sweep over theta and nu")
    _add_common(p)
    p.add_argument("--plan")
    p.add_argument("--fuzzy")
    p.add_argument("--thetas")
    p.add_argument("--nus")
    p.add_argument("--errors")

    p = sub.add_parser("compare", help="ASN of SSP, DSP, MDS and GMDS designs")
    _add_common(p)
    p.add_argument("--aql")
    p.add_argument("--lql")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--nu", type=float)
    for lim in ("n-max", "m-max", "c2-max"):
        p.add_argument(f"--{lim}", type=int, dest=lim.replace("-", "_"))
    p.add_argument("--gmds-k-max", type=int, dest="gmds_k_max")

    p = sub.add_parser("perturb", help="bands with and without inspection errors")
    _add_common(p)
    p.add_argument("--plan")
    p.add_argument("--fuzzy")
    p.add_argument("--errors")
    p.add_argument("--thetas")
    p.add_argument("--nu", type=float)

    p = sub.add_parser("simulate", help="Monte Carlo acceptance rate of a lot stream")
    _add_common(p)
    p.add_argument("--plan")
    p.add_argument("--p", type=float)
    p.add_argument("--errors")
    p.add_argument("--lots", type=int)
    p.add_argument("--warmup", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--trace", help="write a per-lot CSV trace here")

    p = sub.add_parser("reproduce", help="run every reproduction check; exit 0 iff all pass")
    _add_common(p)
    p.add_argument("--out-dir", dest="out_dir", help="also write regenerated tables here")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    problems: list[str] = []
    if args.config:
        try:
            values = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            problems.append(f"config: {exc}")
        if values.get("task") not in (None, args.task):
            problems.append(f"config task {values.get('task')!r} does not match subcommand {args.task!r}")
    for key, val in vars(args).items():
        if key in ("config", "task", "out", "fmt", "raw", "jobs") or val is None:
            continue
        values[key] = val
    jobs = args.jobs if args.jobs is not None else values.get("jobs", os.environ.get("FUZZPLAN_JOBS", 1))
    try:
        jobs = max(1, int(jobs))
    except ValueError:
        problems.append(f"jobs: not an integer: {jobs!r}")
        jobs = 1
    fmt = args.fmt or values.get("format", "csv")
    if fmt not in ("csv", "json"):
        problems.append(f"format must be csv or json, got {fmt!r}")
    raw = bool(args.raw if args.raw is not None else values.get("raw", False))
    out = args.out or values.get("out")
    return RunConfig(args.task, values, out, fmt, raw, jobs, problems)


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_config(args)
    try:
        rows, cols, payload, status = COMMANDS[cfg.task](cfg)
    except ValidationError as exc:
        for prob in exc.problems:
            print(f"error: {prob}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = to_json(payload, cfg.raw) if cfg.fmt == "json" else to_csv(rows, cols, cfg.raw)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
