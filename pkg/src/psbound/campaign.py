"""Reproducible verification campaigns.

A campaign is split into units (one random input per unit, all checks on that
input). Each unit derives its randomness from ``(seed, command, dim, index)``
only, so serial and parallel runs produce the same report.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .bounds import (
    chernoff_bound,
    companion_of,
    family_bound,
    family_lower_bound_check,
    joint_convexity_check,
    lemma_check,
    power_family_bound,
    ps_check,
    ps_three_matrix_check,
    sandwich_check,
    trace_distance,
)
from .errors import GenerationError, PsboundError, SpecError
from .functions import (
    CompositeH,
    NegLog1p,
    ScalarFunction,
    Sqrt,
    from_discrete_measure,
    function_from_spec,
    random_measure_spec,
    theorem_catalog,
)
from .geometry import corollary_check, hkh_check, second_variable_counterexample, theorem_os_check
from .linalg import load_matrix
from .monotonicity import (
    default_point_sets,
    loewner_matrix_test,
    monotone_consistent,
    randomized_monotonicity_test,
)
from .reports import FAILED, INFORMATIVE, PASSED, CheckReport, reports_to_csv
from .sampling import (
    STRATEGIES,
    generator,
    random_anticommutator_pair,
    random_density,
    random_pd_pairs,
    trial_seed,
)

log = logging.getLogger(__name__)

COMMANDS = ("verify", "chernoff", "bounds", "scan", "monotone", "os-check")
VERIFY_CHECKS = ("ps", "three-matrix", "lemma", "joint-convexity")
DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2


@dataclass
class CampaignSpec:
    command: str
    functions: list = field(default_factory=list)
    dims: list = field(default_factory=lambda: [2, 3, 4])
    trials: int = 100
    seed: int = 0
    tolerance: float | None = None
    alphas: list = field(default_factory=lambda: list(DEFAULT_ALPHAS))
    strategies: list = field(default_factory=lambda: list(STRATEGIES))
    checks: list = field(default_factory=lambda: ["ps"])
    state_a: str | None = None
    state_b: str | None = None
    order: int | None = None
    out: str | None = None
    format: str = "json"
    emit_curve: str | None = None
    workers: int | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise SpecError(f"unknown command {self.command!r}")
        if self.trials < 1:
            raise SpecError("trials must be >= 1")
        if not self.dims or any(int(d) < 1 for d in self.dims):
            raise SpecError("dims must be a non-empty list of integers >= 1")
        if self.format not in ("json", "csv"):
            raise SpecError(f"format must be json or csv, not {self.format!r}")
        if (self.state_a is None) != (self.state_b is None):
            raise SpecError("--state-a and --state-b must be given together")
        for c in self.checks:
            if c not in VERIFY_CHECKS:
                raise SpecError(f"unknown check {c!r}; expected one of {VERIFY_CHECKS}")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise SpecError(f"unknown strategy {s!r}; expected one of {STRATEGIES}")
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise SpecError(f"alpha must lie in [0, 1], got {a}")
        # parse once so unknown kinds fail before any work starts
        [function_from_spec(f) for f in self.functions]


def _default_functions(command):
    if command == "os-check":
        return [Sqrt().to_spec(), NegLog1p().to_spec()]
    if command == "monotone":
        return [Sqrt().to_spec()]
    return [f.to_spec() for f in theorem_catalog()]


def _function_specs(spec: CampaignSpec) -> list[dict]:
    items = spec.functions or _default_functions(spec.command)
    return [function_from_spec(f).to_spec() for f in items]


# -- coverage -----------------------------------------------------------------------


_COVERAGE: dict = {}


def theorem_applies(f: ScalarFunction) -> bool:
    """Is ``f`` or ``f o g^{-1}`` Loewner-consistent, so the trace bound is expected?"""
    key = json.dumps(f.to_spec(), sort_keys=True)
    if key not in _COVERAGE:
        covered = monotone_consistent(f)
        if not covered:
            try:
                covered = monotone_consistent(CompositeH(f))
            except PsboundError:
                covered = False
        _COVERAGE[key] = covered
    return _COVERAGE[key]


# -- units --------------------------------------------------------------------------


def _parse(fspecs):
    return [function_from_spec(f) for f in fspecs]


def _unit_verify(unit):
    fspecs, dim, seed, checks = unit["functions"], unit["dim"], unit["seed"], unit["checks"]
    out = []
    functions = _parse(fspecs)
    A, B, X, A2, B2 = random_pd_pairs(dim, seed, count=5)
    for f in functions:
        if "ps" in checks:
            r = ps_check(f, A, B, seed=seed)
            if r.status == FAILED and not theorem_applies(f):
                r.status = INFORMATIVE
            out.append(r)
        if "three-matrix" in checks:
            out.append(ps_three_matrix_check(f, A, B, X, seed=seed))
    if "lemma" in checks or "joint-convexity" in checks:
        rng = generator(trial_seed(seed, "measures"))
        g_mon = from_discrete_measure("monotone", random_measure_spec(rng, True))
        f_dec = from_discrete_measure("decreasing", random_measure_spec(rng, False))
        if "lemma" in checks:
            out.append(lemma_check(f_dec, g_mon, A, B, seed=seed))
        if "joint-convexity" in checks:
            g_dec = from_discrete_measure("decreasing", random_measure_spec(rng, False))
            out.append(joint_convexity_check(f_dec, g_dec, A, B, A2, B2, seed=seed))
    return out


def _unit_chernoff(unit):
    seed, dim = unit["seed"], unit["dim"]
    rho = random_density(dim, seed)
    sigma = random_density(dim, trial_seed(seed, "sigma"))
    return [sandwich_check(rho, sigma, seed=seed)]


def _unit_bounds(unit):
    seed, dim = unit["seed"], unit["dim"]
    rho = random_density(dim, seed)
    sigma = random_density(dim, trial_seed(seed, "sigma"))
    return [family_lower_bound_check(_parse(unit["functions"]), rho, sigma, seed=seed)]


def _unit_scan(unit):
    from .monotonicity import convexity_scan

    A, B = random_pd_pairs(unit["dim"], unit["seed"])
    return [convexity_scan(A, B, seed=unit["seed"])]


def _unit_os(unit):
    seed, dim = unit["seed"], unit["dim"]
    functions = _parse(unit["functions"])
    out = []
    mean_fns = [f for f in functions if _safe_value(f, 1.0) == 1.0 and _trend(f) > 0]
    zero_fns = [f for f in functions if _safe_value(f, 0.0) == 0.0 and _trend(f) < 0]
    for strategy in unit["strategies"]:
        s = trial_seed(seed, strategy)
        pair = random_anticommutator_pair(dim, s, strategy)
        for f in mean_fns:
            out.append(hkh_check(f, pair, seed=s))
        for f in zero_fns:
            out.append(corollary_check(f, pair, seed=s))
    if zero_fns:
        A, B = random_pd_pairs(dim, trial_seed(seed, "os"))
        for f in zero_fns:
            for alpha in unit["alphas"]:
                out.append(theorem_os_check(f, A, B, alpha, seed=seed))
    return out


def _trend(f) -> int:
    """+1 if ``f`` is increasing on a probe grid, -1 if nonincreasing, else 0."""
    x = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, 61)))
    x = x[f.domain.contains(x)]
    try:
        steps = np.diff(f(x))
    except PsboundError:
        return 0
    if np.all(steps > 0):
        return 1
    if np.all(steps <= 0):
        return -1
    return 0


def _safe_value(f, x):
    try:
        return float(f(x))
    except PsboundError:
        return None


_UNITS = {
    "verify": _unit_verify,
    "chernoff": _unit_chernoff,
    "bounds": _unit_bounds,
    "scan": _unit_scan,
    "os-check": _unit_os,
}


def run_unit(unit) -> list[dict]:
    """Run one unit; a generator failure becomes a single counted record."""
    try:
        reports = _UNITS[unit["command"]](unit)
    except GenerationError as exc:
        return [{"label": "generation", "status": "generation-failure", "seed": unit["seed"],
                 "details": {"reason": str(exc), "dim": unit["dim"]}}]
    rows = []
    for r in reports:
        d = r.to_dict()
        d.setdefault("details", {})["dim"] = unit["dim"]
        rows.append(d)
    return rows


def _units(spec: CampaignSpec, fspecs):
    for dim in spec.dims:
        for i in range(spec.trials):
            yield {
                "command": spec.command,
                "dim": int(dim),
                "index": i,
                "seed": trial_seed(spec.seed, spec.command, int(dim), i),
                "functions": fspecs,
                "checks": list(spec.checks),
                "alphas": [float(a) for a in spec.alphas],
                "strategies": list(spec.strategies),
            }


def worker_count(spec: CampaignSpec) -> int:
    if spec.workers is not None:
        return max(1, int(spec.workers))
    try:
        return max(1, int(os.environ.get("PSBOUND_WORKERS", "1")))
    except ValueError:
        return 1


def _map_units(units, workers):
    if workers <= 1:
        return [run_unit(u) for u in units]
    chunk = max(1, len(units) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_unit, units, chunksize=chunk))


# -- state-file and fixed commands ---------------------------------------------


def _state_reports(spec: CampaignSpec, fspecs):
    rho = load_matrix(spec.state_a)
    sigma = load_matrix(spec.state_b)
    rows, extra = [], {}
    if spec.command in ("chernoff", "bounds"):
        ch = chernoff_bound(rho, sigma)
        extra["chernoff"] = {"value": ch.value, "argmin_s": ch.argmin_s, "grid_size": ch.grid_size,
                             "refined": ch.refined}
        extra["trace_distance"] = trace_distance(rho, sigma)
        if spec.command == "chernoff":
            rows.append(sandwich_check(rho, sigma).to_dict())
        else:
            catalog = _parse(fspecs)
            value, f = family_bound(catalog, rho, sigma)
            pvalue, pf = power_family_bound(rho, sigma)
            extra["family_bound"] = {"value": value, "function": f.to_spec()}
            extra["power_family_bound"] = {"value": pvalue, "function": pf.to_spec()}
            rows.append(family_lower_bound_check(catalog, rho, sigma).to_dict())
    elif spec.command == "scan":
        from .monotonicity import convexity_scan

        rows.append(convexity_scan(rho, sigma).to_dict())
    elif spec.command == "verify":
        for f in _parse(fspecs):
            r = ps_check(f, rho, sigma)
            if r.status == FAILED and not theorem_applies(f):
                r.status = INFORMATIVE
            rows.append(r.to_dict())
    else:
        raise SpecError(f"{spec.command} does not take state files")
    return rows, extra


def _monotone_reports(spec: CampaignSpec, fspecs):
    orders = [spec.order] if spec.order else list(range(2, 7))
    rows = []
    for fs in fspecs:
        f = function_from_spec(fs)
        for order in orders:
            pts = default_point_sets(f.domain, orders=(order,))[0]
            v = loewner_matrix_test(f, pts, spec.tolerance)
            rows.append(_verdict_row(f, v, spec))
            if order >= 2:
                rv = randomized_monotonicity_test(f, order, spec.trials, trial_seed(spec.seed, "monotone", order))
                rows.append(_verdict_row(f, rv, spec))
    return rows


def _verdict_row(f, v, spec):
    ok = not v.violated
    row = CheckReport(
        f"monotone[{f}];{v.method};order={v.order}", 0.0, v.margin, v.margin, ok,
        v.notes.get("tolerance", float("nan")), seed=spec.seed,
        status=PASSED if ok else FAILED, witness=v.witness,
        details={"conclusion": v.conclusion, "trials": v.trials,
                 "evidence_only": not v.violated},
    ).to_dict()
    return row


# -- driver -----------------------------------------------------------------------------


def summarize(rows) -> dict:
    statuses = Counter(r["status"] for r in rows)
    by_label = {}
    for r in rows:
        entry = by_label.setdefault(r["label"], Counter())
        entry[r["status"]] += 1
    return {
        "total": len(rows),
        "statuses": dict(sorted(statuses.items())),
        "by_label": {k: dict(sorted(v.items())) for k, v in sorted(by_label.items())},
        "violations": statuses.get(FAILED, 0),
        "generation_failures": statuses.get("generation-failure", 0),
    }


def provenance(spec: CampaignSpec, fspecs) -> dict:
    p = asdict(spec)
    for key in ("out", "format", "workers", "emit_curve"):
        p.pop(key)
    p["functions"] = fspecs
    p["tolerances"] = {"ps_rtol": 1e-8, "lemma_rtol": 1e-9, "psd_rtol": 1e-9, "override": spec.tolerance}
    p["version"] = __version__
    return p


def run_campaign(spec: CampaignSpec, *, timestamp: bool = True) -> tuple[int, dict]:
    """Execute a campaign and return ``(exit_code, report)``."""
    spec.validate()
    fspecs = _function_specs(spec)
    extra = {}
    if spec.state_a is not None:
        rows, extra = _state_reports(spec, fspecs)
    elif spec.command == "monotone":
        rows = _monotone_reports(spec, fspecs)
    else:
        units = list(_units(spec, fspecs))
        rows = [row for chunk in _map_units(units, worker_count(spec)) for row in chunk]
    if spec.command == "os-check" and spec.state_a is None:
        rows.append(second_variable_counterexample().to_dict())
    report = {
        "tool": "psbound",
        "command": spec.command,
        "provenance": provenance(spec, fspecs),
        "summary": summarize(rows),
        **extra,
        "checks": rows,
    }
    if timestamp:
        report["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    code = EXIT_VIOLATION if report["summary"]["violations"] else EXIT_OK
    return code, report


def render(report: dict, fmt: str = "json") -> str:
    if fmt == "csv":
        return reports_to_csv(report["checks"])
    return json.dumps(report, indent=1) + "\n"


def emit_curve(functions, path, x=None) -> None:
    """Write ``(x, f(x), g(x))`` rows for plotting ``f`` and its companion."""
    x = np.linspace(0.0, 10.0, 201) if x is None else np.asarray(x, dtype=float)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["function", "x", "f", "g"])
    for fs in functions:
        f = function_from_spec(fs)
        g = companion_of(f)
        xs = x[f.domain.contains(x) & g.domain.contains(x)]
        for xi, fi, gi in zip(xs, f(xs), g(xs)):
            writer.writerow([str(f), repr(float(xi)), repr(float(fi)), repr(float(gi))])
    with open(path, "w") as fh:
        fh.write(buf.getvalue())
