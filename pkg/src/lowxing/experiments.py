"""
Monte Carlo estimation, scaling fits and the verification suites.

Trials are split into fixed-size chunks and the chunks are summed as
integers, so every estimate is a pure function of its inputs and does not
depend on the number of worker processes.

Typical use::

    rec = run_estimate("D(n=16,v=0)", {"truncation_factor": 4}, 10_000, 7)
    mom = run_moments(64, 2, 2_000, 7)
    report = verify_suite("duality", workers=4)
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
from scipy import stats

from . import _kernels as K
from .events import EventSpec, compile_event, event_domain
from .lattice import Domain
from .sampling import _seed64, workspace

__all__ = [
    "DEFAULT_SEED",
    "SUITES",
    "EstimateRecord",
    "MomentRecord",
    "FitResult",
    "wilson_interval",
    "run_estimate",
    "run_moments",
    "fit_scaling",
    "verify_suite",
    "records_csv",
    "report_json",
]

DEFAULT_SEED = 1729
EVENT_CHUNK = 10_000
MOMENT_CHUNK = 500
RATIO_TOLERANCE = 2.0
MOMENT_RATIO_TOLERANCE = 2.5
SIGMAS = 3.0
SUITES = ("lemma2", "prop", "theorem1", "duality", "oracle")


# --- records ------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9g}"
    return str(x)


@dataclass(frozen=True)
class EstimateRecord:
    """One event probability estimate with its Wilson 95% interval."""

    event: str
    n: int
    m: int
    k: int
    truncation_factor: float
    trials: int
    successes: int
    p_hat: float
    ci_low: float
    ci_high: float
    master_seed: int
    truncated_fraction: float

    @property
    def se(self) -> float:
        return math.sqrt(max(self.p_hat * (1 - self.p_hat), 0.0) / self.trials)


@dataclass(frozen=True)
class MomentRecord:
    """
    Statistics of the lowest crossing at one ``(n, m)``.

    Every field comes from the same trials.  ``X`` is the number of
    visited discs ``H_m(km)``, counted as 0 when no crossing exists in the
    domain; ``mean_X_given_X_ge_1`` is 0 when no trial had ``X >= 1``.
    """

    n: int
    m: int
    trials: int
    seed: int
    truncation_factor: float
    p: float
    wired: bool
    mean_X: float
    mean_X_se: float
    mean_X_given_X_ge_1: float
    mean_X_given_X_ge_1_se: float
    mean_X2: float
    mean_X2_se: float
    p_X_ge_1: float
    p_X_ge_1_se: float
    p_dist_lt_m: float
    p_dist_lt_m_se: float
    p_contact: float
    p_contact_se: float
    crossing_fraction: float
    truncated_fraction: float


@dataclass
class FitResult:
    """
    Fit of ``y ~ model(x)`` in log space.

    ``ratios[i] = y[i] / shape(x[i])`` with the fitted exponent, so an
    exact model gives ``max_min_ratio == 1``.
    """

    model: str
    a: float
    mu: float | None
    mu_ci_low: float | None
    mu_ci_high: float | None
    x: list
    y: list
    ratios: list
    max_min_ratio: float
    residual_sum: float

    def to_dict(self) -> dict:
        return asdict(self)


CSV_FIELDS = [f.name for f in fields(EstimateRecord)]


def records_csv(records) -> str:
    """CSV with a header row, LF endings and 9 significant digits."""
    records = list(records)
    cols = CSV_FIELDS if not records else [f.name for f in fields(records[0])]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for rec in records:
        w.writerow([_fmt(getattr(rec, c)) for c in cols])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "__dataclass_fields__"):
        return _jsonable(asdict(obj))
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def report_json(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def wilson_interval(successes: int, trials: int, confidence: float = 0.95):
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(
        confidence_level=confidence, method="wilson"
    )
    return float(ci.low), float(ci.high)


# --- worker plumbing ------------------------------------------------------


def _chunks(trials: int, size: int):
    return [(t, min(t + size, trials)) for t in range(0, trials, size)]


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _event_chunk(task):
    spec, dom, seed, t0, t1, p = task
    prog = compile_event(EventSpec.parse(spec), Domain.from_dict(dom))
    return prog.count_trials(seed, t0, t1, p)


# --- estimates ------------------------------------------------------------


def _resolve_domain(spec: EventSpec, domain_params) -> Domain:
    if isinstance(domain_params, Domain):
        return domain_params
    params = dict(domain_params or {})
    kf = float(params.pop("truncation_factor", 4.0))
    if params:
        return Domain(spec.n, kf, center=params.get("center"), max_row=params.get("max_row"))
    return event_domain(spec, kf)


def run_estimate(event_spec, domain_params=None, trials: int = 10_000,
                 master_seed: int = DEFAULT_SEED, p: float = 0.5,
                 workers: int = 1) -> EstimateRecord:
    """
    Estimate the probability of ``event_spec`` over trials ``0..trials-1``.

    ``domain_params`` is a :class:`Domain` or a dict with
    ``truncation_factor`` (default 4) and optionally ``center`` and
    ``max_row``; without ``center`` the event's natural domain is used
    (see :func:`lowxing.events.event_domain`).  Parameter and clipping
    errors are raised before any sampling.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    spec = EventSpec.parse(event_spec) if isinstance(event_spec, str) else event_spec
    dom = _resolve_domain(spec, domain_params)
    compile_event(spec, dom)  # validate now
    K.threshold(p)
    tasks = [(str(spec), dom.to_dict(), int(master_seed), a, b, float(p))
             for a, b in _chunks(trials, EVENT_CHUNK)]
    results = _map(_event_chunk, tasks, workers)
    succ = sum(s for s, _ in results)
    touched = sum(t for _, t in results)
    lo, hi = wilson_interval(succ, trials)
    return EstimateRecord(
        event=str(spec),
        **spec.record_fields(),
        truncation_factor=dom.truncation_factor,
        trials=trials,
        successes=succ,
        p_hat=succ / trials,
        ci_low=lo,
        ci_high=hi,
        master_seed=int(master_seed),
        truncated_fraction=touched / trials,
    )


# --- lowest-crossing moments ----------------------------------------------

_MS = (1, 2, 4)


def _moment_chunk(task):
    n, kf, seed, t0, t1, p, wired, ms = task
    dom = Domain(n, kf)
    ws = workspace(dom)
    ms = np.array(ms, dtype=np.int64)
    X, dist, contacts, exists, touched, ws.wq, ws.wr = K.run_crossing_trials(
        _seed64(seed), t0, t1, K.threshold(p), n, ms, wired, ws.geom, ws.qs, ws.rs,
        ws.stamp, ws.cache, ws.ctr, ws.wq, ws.wr, ws.pos, ws.pstamp, dom.edge_mask,
    )
    out = {}
    for j, m in enumerate(ms):
        x = X[:, j].astype(object)  # exact integer sums
        out[int(m)] = (
            int(sum(x)), int(sum(x ** 2)), int(sum(x ** 3)), int(sum(x ** 4)),
            int(np.count_nonzero(X[:, j] >= 1)),
            int(np.count_nonzero(exists & (dist < m))),
        )
    return out, int(np.count_nonzero(contacts > 0)), int(exists.sum()), int(touched.sum())


_MOMENT_CACHE: dict = {}


def _moment_sums(n, kf, trials, seed, p, wired, workers):
    # shared by the prop and theorem1 suites; the result does not depend on workers
    key = (n, kf, trials, seed, p, wired)
    if key not in _MOMENT_CACHE:
        _MOMENT_CACHE[key] = _moment_sums_uncached(n, kf, trials, seed, p, wired, workers)
    return _MOMENT_CACHE[key]


def _moment_sums_uncached(n, kf, trials, seed, p, wired, workers):
    ms = tuple(m for m in _MS if n % m == 0)
    tasks = [(n, kf, seed, a, b, p, wired, ms) for a, b in _chunks(trials, MOMENT_CHUNK)]
    parts = _map(_moment_chunk, tasks, workers)
    sums = {m: [0] * 6 for m in ms}
    contact = exists = touched = 0
    for per_m, c, e, t in parts:
        for m in ms:
            sums[m] = [a + b for a, b in zip(sums[m], per_m[m])]
        contact += c
        exists += e
        touched += t
    return {m: tuple(v) for m, v in sums.items()}, contact, exists, touched


def _mean_se(s1, s2, T):
    mean = s1 / T
    if T < 2:
        return mean, 0.0
    var = (T * s2 - s1 * s1) / (T * (T - 1))  # exact integers up to the division
    return mean, math.sqrt(max(var, 0.0) / T)


def _prop_se(c, T):
    q = c / T
    return q, math.sqrt(q * (1 - q) / T)


def run_moments(n: int, m: int, trials: int, master_seed: int = DEFAULT_SEED,
                truncation_factor: float = 2.0, p: float = 0.5, wired: bool = False,
                workers: int = 1) -> MomentRecord:
    """
    Lowest-crossing statistics at ``(n, m)`` from one stream of trials.

    Each trial extracts the lowest crossing on ``Domain(n,
    truncation_factor)`` and records ``X``, the minimal distance to ``AB``
    and whether a contact point exists.  ``wired=True`` evaluates the
    crossing with an occupied exterior (see
    :func:`lowxing.crossing.lowest_crossing`).
    """
    if m < 1 or n % m:
        raise ValueError(f"m={m} must divide n={n}; run at n' = m*floor(n/m) instead")
    if not 1 <= m <= n // 2:
        raise ValueError(f"need 1 <= m <= n/2, got m={m}, n={n}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    K.threshold(p)
    kf = float(truncation_factor)
    if m not in _MS:
        sums, contact, exists, touched = _moment_sums_single(
            n, kf, trials, int(master_seed), float(p), bool(wired), workers, m
        )
    else:
        sums, contact, exists, touched = _moment_sums(
            n, kf, trials, int(master_seed), float(p), bool(wired), workers
        )
    s1, s2, s3, s4, c, dlt = sums[m]
    T = trials
    mean_x, mean_x_se = _mean_se(s1, s2, T)
    mean_x2, mean_x2_se = _mean_se(s2, s4, T)
    p_x, p_x_se = _prop_se(c, T)
    given, given_se = _mean_se(s1, s2, c) if c else (0.0, 0.0)
    p_d, p_d_se = _prop_se(dlt, T)
    p_c, p_c_se = _prop_se(contact, T)
    return MomentRecord(
        n=n, m=m, trials=T, seed=int(master_seed), truncation_factor=kf, p=float(p),
        wired=bool(wired), mean_X=mean_x, mean_X_se=mean_x_se,
        mean_X_given_X_ge_1=given, mean_X_given_X_ge_1_se=given_se,
        mean_X2=mean_x2, mean_X2_se=mean_x2_se, p_X_ge_1=p_x, p_X_ge_1_se=p_x_se,
        p_dist_lt_m=p_d, p_dist_lt_m_se=p_d_se, p_contact=p_c, p_contact_se=p_c_se,
        crossing_fraction=exists / T, truncated_fraction=touched / T,
    )


def _moment_sums_single(n, kf, trials, seed, p, wired, workers, m):
    tasks = [(n, kf, seed, a, b, p, wired, (m,)) for a, b in _chunks(trials, MOMENT_CHUNK)]
    parts = _map(_moment_chunk, tasks, workers)
    tot = [0] * 6
    contact = exists = touched = 0
    for per_m, c, e, t in parts:
        tot = [a + b for a, b in zip(tot, per_m[m])]
        contact += c
        exists += e
        touched += t
    return {m: tuple(tot)}, contact, exists, touched


# --- scaling fits -----------------------------------------------------------

MODELS = ("inverse_linear", "inverse_log", "power", "constant")


def _xy(records, x, y):
    if x is not None and y is not None:
        return np.asarray(x, dtype=float), np.asarray(y, dtype=float), None
    xs, ys, var = [], [], []
    for rec in records:
        if isinstance(rec, EstimateRecord):
            xs.append(rec.n / rec.m if rec.m > 0 else rec.n)
            ys.append(rec.p_hat)
            var.append((1 - rec.p_hat) / (rec.p_hat * rec.trials) if rec.p_hat > 0 else np.inf)
        else:
            xs.append(rec[0])
            ys.append(rec[1])
    return np.asarray(xs, float), np.asarray(ys, float), (np.asarray(var) if var else None)


def fit_scaling(records=(), model: str = "power", x=None, y=None, log_var=None) -> FitResult:
    """
    Fit a scaling model to ``(x, y)`` points.

    ``records`` are :class:`EstimateRecord` objects (``x = n/m``, or ``n``
    when ``m`` is absent, ``y = p_hat``) or ``(x, y)`` pairs; ``x`` and
    ``y`` may be given directly instead.  All models are fitted by least
    squares on ``log y``, which puts their residuals on one scale:

    ``inverse_linear``  ``y = a / x``
    ``inverse_log``     ``y = a / log x``
    ``power``           ``y = a * x**(-mu)``
    ``constant``        ``y = a``

    For ``power`` the slope is fitted by weighted least squares when the
    variance of each ``log y`` is known (from record trial counts or
    ``log_var``) and a 95% interval for ``mu`` is reported.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    xs, ys, var = _xy(records, x, y)
    if log_var is not None:
        var = np.asarray(log_var, dtype=float)
    if xs.size < 3:
        raise ValueError("fit_scaling needs at least 3 sweep points")
    if np.any(ys <= 0):
        raise ValueError("insufficient trials: some estimate is 0, a multiplicative model cannot fit it")
    if model == "inverse_log" and np.any(xs <= 1):
        raise ValueError("inverse_log needs x > 1")
    ly = np.log(ys)
    lx = np.log(xs)
    mu = lo = hi = None
    if model == "inverse_linear":
        shape = 1 / xs
    elif model == "inverse_log":
        shape = 1 / np.log(xs)
    elif model == "constant":
        shape = np.ones_like(xs)
    else:
        if var is not None and np.all(np.isfinite(var)) and np.all(var > 0):
            w = 1 / var
            xm = np.sum(w * lx) / np.sum(w)
            ym = np.sum(w * ly) / np.sum(w)
            sxx = np.sum(w * (lx - xm) ** 2)
            slope = np.sum(w * (lx - xm) * (ly - ym)) / sxx
            se = math.sqrt(1 / sxx)
            z = stats.norm.ppf(0.975)
        else:
            res = stats.linregress(lx, ly)
            slope, se = res.slope, res.stderr
            z = stats.t.ppf(0.975, xs.size - 2)
        mu = float(-slope)
        lo, hi = mu - z * se, mu + z * se
        shape = xs ** (-mu)
    log_a = float(np.mean(ly - np.log(shape)))
    resid = ly - log_a - np.log(shape)
    ratios = ys / shape
    return FitResult(
        model=model,
        a=math.exp(log_a),
        mu=mu,
        mu_ci_low=None if lo is None else float(lo),
        mu_ci_high=None if hi is None else float(hi),
        x=[float(v) for v in xs],
        y=[float(v) for v in ys],
        ratios=[float(v) for v in ratios],
        max_min_ratio=float(ratios.max() / ratios.min()),
        residual_sum=float(np.sum(resid ** 2)),
    )


def max_min_ratio(values) -> float:
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        return math.inf
    return float(values.max() / values.min())


# --- verification suites ------------------------------------------------------

SUITE_DEFAULTS = {
    "lemma2": {
        "ns": [4, 8, 16, 32, 64],
        "trials": 100_000,
        "truncation_factor": 4.0,
        "annulus_ratios": [4, 8, 16, 32],
        "annulus_ms": [2, 4],
    },
    "prop": {
        "ms": [1, 2, 4],
        "ratios": [8, 16, 32, 64, 128],
        "trials": 10_000,
        "truncation_factor": 2.0,
        "wired": False,
        "sensitivity_factor": 4.0,
        "arm_ratios": [4, 8, 16, 32],
        "arm_ms": [2, 4],
        "arm_trials": 100_000,
        "arm_truncation_factor": 4.0,
    },
    "theorem1": {
        "ms": [1, 2, 4],
        "ratios": [8, 16, 32, 64, 128],
        "trials": 10_000,
        "truncation_factor": 2.0,
        "wired": False,
        "contact_ns": [8, 16, 32, 64, 128, 256],
        "consistency_n": 32,
        "consistency_m": 2,
        "consistency_trials": 2_000,
    },
    "duality": {
        "exact_n": 2,
        "exact_truncation_factor": 2.0,
        "mc_n": 16,
        "mc_trials": 100_000,
        "mc_truncation_factor": 2.0,
    },
    "oracle": {},
}


def _verdict(ok, detail) -> dict:
    return {"pass": bool(ok), "detail": detail}


def verify_suite(name: str, master_seed: int = DEFAULT_SEED, workers: int = 1,
                 out_dir=None, **overrides) -> dict:
    """
    Run a named verification suite and return its JSON-ready report.

    The report has the keys ``suite``, ``parameters``, ``records`` and
    ``verdicts`` (``{check: {pass, detail}}``).  ``overrides`` replace
    entries of :data:`SUITE_DEFAULTS`.  With ``out_dir`` the report is also
    written as ``<suite>.json`` next to a CSV of the raw records.
    Estimation errors inside a suite become failed verdicts rather than
    exceptions.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    params = dict(SUITE_DEFAULTS[name])
    unknown = set(overrides) - set(params)
    if unknown:
        raise ValueError(f"unknown parameters for suite {name}: {sorted(unknown)}")
    params.update(overrides)
    params["master_seed"] = int(master_seed)
    runner = {
        "lemma2": _suite_lemma2,
        "prop": _suite_prop,
        "theorem1": _suite_theorem1,
        "duality": _suite_duality,
        "oracle": _suite_oracle,
    }[name]
    records: list = []
    verdicts: dict = {}
    runner(params, int(master_seed), workers, records, verdicts)
    report = {
        "suite": name,
        "parameters": params,
        "records": records,
        "verdicts": verdicts,
        "pass": all(v["pass"] for v in verdicts.values()),
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(report_json(report), encoding="utf-8", newline="\n")
        est = [r for r in records if isinstance(r, EstimateRecord)]
        mom = [r for r in records if isinstance(r, MomentRecord)]
        if est:
            (out / f"{name}.csv").write_text(records_csv(est), encoding="utf-8", newline="\n")
        if mom:
            (out / f"{name}_moments.csv").write_text(records_csv(mom), encoding="utf-8", newline="\n")
    return report


def _guard(verdicts, key, fn):
    try:
        return fn()
    except (ValueError, RuntimeError) as exc:
        verdicts[key] = _verdict(False, f"error: {exc}")
        return None


def _fit_or_none(verdicts, key, **kw):
    return _guard(verdicts, key, lambda: fit_scaling(**kw))


def _models_beat(verdicts, key, best, rivals, **kw):
    fits = {}
    for model in (best, *rivals):
        f = _fit_or_none(verdicts, key, model=model, **kw)
        if f is None:
            return
        fits[model] = f
    res = {mdl: fits[mdl].residual_sum for mdl in fits}
    ok = all(res[best] < res[r] for r in rivals)
    verdicts[key] = _verdict(ok, {"residual_sum": res})


def _nonincreasing(verdicts, key, values, ses):
    # an increase larger than 3 combined standard errors counts as a violation
    bad = [
        i for i in range(len(values) - 1)
        if values[i + 1] - values[i] > SIGMAS * math.hypot(ses[i], ses[i + 1])
    ]
    verdicts[key] = _verdict(not bad, {"values": values, "violations_at": bad})


def _decreasing(verdicts, key, values, ses):
    # point estimates strictly decreasing, and the end-to-end drop beyond 3 sigma
    steps = all(values[i + 1] < values[i] for i in range(len(values) - 1))
    drop = values[0] - values[-1]
    noise = SIGMAS * math.hypot(ses[0], ses[-1])
    verdicts[key] = _verdict(
        steps and drop > noise, {"values": values, "total_drop": drop, "three_sigma": noise}
    )


def _ratio_check(verdicts, key, values, tol):
    r = max_min_ratio(values)
    verdicts[key] = _verdict(r <= tol, {"values": values, "max_min_ratio": r, "tolerance": tol})


def _suite_lemma2(P, seed, workers, records, verdicts):
    kf = P["truncation_factor"]
    rho = []
    for n in P["ns"]:
        rec = _guard(verdicts, f"estimate D n={n}",
                     lambda: run_estimate(EventSpec("D", n=n, v=0), {"truncation_factor": kf},
                                          P["trials"], seed, workers=workers))
        if rec is not None:
            records.append(rec)
            rho.append(rec)
    if len(rho) == len(P["ns"]):
        _ratio_check(verdicts, "lemma2_i_ratio", [r.n * r.p_hat for r in rho], RATIO_TOLERANCE)
        _models_beat(verdicts, "lemma2_i_model", "inverse_linear", ("constant", "inverse_log"),
                     records=rho)
        _nonincreasing(verdicts, "lemma2_i_monotone", [r.p_hat for r in rho], [r.se for r in rho])
    ann = []
    for m in P["annulus_ms"]:
        for ratio in P["annulus_ratios"]:
            spec = EventSpec("D_annulus", n=ratio * m, m=m, v=0)
            rec = _guard(verdicts, f"estimate {spec}",
                         lambda: run_estimate(spec, {"truncation_factor": kf}, P["trials"],
                                              seed, workers=workers))
            if rec is not None:
                records.append(rec)
                ann.append(rec)
    if ann and len(ann) == len(P["annulus_ms"]) * len(P["annulus_ratios"]):
        _ratio_check(verdicts, "lemma2_ii_ratio", [r.p_hat * r.n / r.m for r in ann],
                     RATIO_TOLERANCE)


def _sweep(P, seed, workers):
    out = []
    for m in P["ms"]:
        for ratio in P["ratios"]:
            out.append(run_moments(ratio * m, m, P["trials"], seed, P["truncation_factor"],
                                   wired=P["wired"], workers=workers))
    return out


def _suite_prop(P, seed, workers, records, verdicts):
    sweep = _sweep(P, seed, workers)
    records.extend(sweep)
    logs = [math.log(r.n / r.m) for r in sweep]
    _ratio_check(verdicts, "prop_i_mean_X_ratio", [r.mean_X for r in sweep],
                 MOMENT_RATIO_TOLERANCE)
    _ratio_check(verdicts, "prop_ii_conditional_mean_ratio",
                 [r.mean_X_given_X_ge_1 / g for r, g in zip(sweep, logs)], MOMENT_RATIO_TOLERANCE)
    _ratio_check(verdicts, "prop_iii_second_moment_ratio",
                 [r.mean_X2 / g for r, g in zip(sweep, logs)], MOMENT_RATIO_TOLERANCE)
    worst = max(abs(r.mean_X - r.p_X_ge_1 * r.mean_X_given_X_ge_1) for r in sweep)
    verdicts["prop_identity"] = _verdict(worst <= 1e-12, {"max_abs_deviation": worst})
    # truncation sensitivity at the largest point
    big = max(sweep, key=lambda r: (r.n, r.m))
    alt = run_moments(big.n, big.m, P["trials"], seed, P["sensitivity_factor"],
                      wired=P["wired"], workers=workers)
    records.append(alt)
    diff = abs(alt.mean_X - big.mean_X)
    noise = SIGMAS * math.hypot(alt.mean_X_se, big.mean_X_se)
    verdicts["prop_i_truncation_sensitivity"] = _verdict(
        diff < noise,
        {"n": big.n, "m": big.m, "factors": [big.truncation_factor, alt.truncation_factor],
         "mean_X": [big.mean_X, alt.mean_X], "difference": diff, "three_sigma": noise,
         "crossing_fraction": [big.crossing_fraction, alt.crossing_fraction]},
    )
    gap = abs(alt.p_X_ge_1 - big.p_X_ge_1)
    noise = SIGMAS * math.hypot(alt.p_X_ge_1_se, big.p_X_ge_1_se)
    verdicts["prop_iv_truncation_sensitivity"] = _verdict(
        gap < noise,
        {"n": big.n, "m": big.m, "p_X_ge_1": [big.p_X_ge_1, alt.p_X_ge_1],
         "difference": gap, "three_sigma": noise,
         "truncated_fraction": [big.truncated_fraction, alt.truncated_fraction]},
    )
    # one-arm decay exponent
    arm = []
    for m in P["arm_ms"]:
        for ratio in P["arm_ratios"]:
            spec = EventSpec("G", n=ratio * m, m=m, v=0)
            rec = _guard(verdicts, f"estimate {spec}",
                         lambda: run_estimate(spec, {"truncation_factor": P["arm_truncation_factor"]},
                                              P["arm_trials"], seed, workers=workers))
            if rec is not None:
                records.append(rec)
                arm.append(rec)
    fit = _fit_or_none(verdicts, "one_arm_mu_positive", records=arm, model="power")
    if fit is not None:
        verdicts["one_arm_mu_positive"] = _verdict(
            fit.mu_ci_low > 0, {"mu": fit.mu, "ci95": [fit.mu_ci_low, fit.mu_ci_high]}
        )


def _suite_theorem1(P, seed, workers, records, verdicts):
    sweep = _sweep(P, seed, workers)
    records.extend(sweep)
    xs = [r.n / r.m for r in sweep]
    ps = [r.p_X_ge_1 for r in sweep]
    _ratio_check(verdicts, "theorem1_ratio", [p * math.log(x) for p, x in zip(ps, xs)],
                 RATIO_TOLERANCE)
    # informational: the same ratio within each m
    verdicts["theorem1_ratio"]["detail"]["per_m_max_min_ratio"] = {
        m: max_min_ratio([r.p_X_ge_1 * math.log(r.n / r.m) for r in sweep if r.m == m])
        for m in P["ms"]
    }
    for m in P["ms"]:
        sub = [r for r in sweep if r.m == m]
        _decreasing(verdicts, f"theorem1_decreasing_m{m}", [r.p_X_ge_1 for r in sub],
                    [r.p_X_ge_1_se for r in sub])
    _models_beat(verdicts, "theorem1_model", "inverse_log", ("constant", "power"), x=xs, y=ps)
    factors = [max(r.p_dist_lt_m, r.p_X_ge_1) / min(r.p_dist_lt_m, r.p_X_ge_1)
               if min(r.p_dist_lt_m, r.p_X_ge_1) > 0 else math.inf for r in sweep]
    verdicts["theorem1_distance_vs_X"] = _verdict(max(factors) <= 3.0, {"factors": factors})
    # corollary: contact points at m = 1
    contact = [run_moments(n, 1, P["trials"], seed, P["truncation_factor"], wired=P["wired"],
                           workers=workers)
               for n in P["contact_ns"]]
    records.extend(r for r in contact if r not in sweep)
    _decreasing(verdicts, "corollary_decreasing", [r.p_contact for r in contact],
                [r.p_contact_se for r in contact])
    _ratio_check(verdicts, "corollary_ratio",
                 [r.p_contact * math.log(r.n) for r in contact], RATIO_TOLERANCE)
    # P(X >= 1) against the event "some A_k" on matched parameters
    n, m = P["consistency_n"], P["consistency_m"]
    mom = run_moments(n, m, P["consistency_trials"], seed, P["truncation_factor"], workers=workers)
    est = run_estimate(EventSpec("A", n=n, m=m), {"truncation_factor": P["truncation_factor"]},
                       P["consistency_trials"], seed, workers=workers)
    records.extend([mom, est])
    gap = abs(mom.p_X_ge_1 - est.p_hat)
    noise = SIGMAS * math.hypot(mom.p_X_ge_1_se, est.se)
    verdicts["theorem1_A_consistency"] = _verdict(
        gap <= noise, {"p_X_ge_1": mom.p_X_ge_1, "p_A": est.p_hat, "three_sigma": noise}
    )


def _suite_duality(P, seed, workers, records, verdicts):
    from .oracle import ExactProbability, enumerate_probability

    n = P["exact_n"]
    dom = Domain(n, P["exact_truncation_factor"], center=0)
    ks = [k for k in range(-n, n) if -n / 2 <= k <= n / 2 - 1]
    tables = {}
    exact = {}
    for k in ks:
        pk = compile_event(EventSpec("P", n=n, k=k), dom)
        qk = compile_event(EventSpec("Q", n=n, k=k), dom)
        tables[k] = pk.evaluate_all()
        a = ExactProbability(int(np.count_nonzero(tables[k])), dom.site_count)
        b = enumerate_probability(dom, qk)
        exact[k] = {"P": a.fraction, "Q": b.fraction}
        verdicts[f"duality_exact_k{k}"] = _verdict(
            a == b, {"P": f"{a.numerator}/2^{a.log2_denominator}",
                     "Q": f"{b.numerator}/2^{b.log2_denominator}", "sites": dom.site_count}
        )
    overlap = [
        (i, j) for i in ks for j in ks if i < j and np.any(tables[i] & tables[j])
    ]
    verdicts["duality_disjoint"] = _verdict(not overlap, {"overlapping_pairs": overlap})
    n = P["mc_n"]
    domain = {"truncation_factor": P["mc_truncation_factor"]}
    for k in [k for k in range(-n, n) if -n / 2 <= k <= n / 2 - 1]:
        # independent streams so the standard errors combine in quadrature
        a = run_estimate(EventSpec("P", n=n, k=k), domain, P["mc_trials"], seed, workers=workers)
        b = run_estimate(EventSpec("Q", n=n, k=k), domain, P["mc_trials"], seed + 1,
                         workers=workers)
        records.extend([a, b])
        noise = SIGMAS * math.hypot(a.se, b.se)
        verdicts[f"duality_mc_k{k}"] = _verdict(
            abs(a.p_hat - b.p_hat) <= noise,
            {"P": a.p_hat, "Q": b.p_hat, "three_sigma": noise},
        )


ORACLE_DOMAINS = (
    Domain(2, 1.5),
    Domain(2, 2.0, max_row=1),
    Domain(2, 2.0, max_row=2),
    Domain(3, 4 / 3, max_row=2),
)
ORACLE_PQ_DOMAIN = Domain(2, 2.0, center=0, max_row=2)


def oracle_battery_specs(domain: Domain):
    """Event specs whose geometry fits ``domain``, for the oracle battery."""
    n = domain.n
    specs = [EventSpec("crossing_exists", n=n), EventSpec("A", n=n, m=1)]
    specs += [EventSpec("A", n=n, m=1, k=k) for k in range(n + 1)]
    for v in range(n + 1):
        for kind, kw in (("D", {"n": 2}), ("D", {"n": 3}), ("D_annulus", {"n": 3, "m": 1}),
                         ("G", {"n": 3, "m": 1}), ("F", {"n": 3, "m": 1, "state": "occupied"}),
                         ("F", {"n": 3, "m": 1, "state": "vacant"})):
            specs.append(EventSpec(kind, v=v, **kw))
    out = []
    for s in specs:
        try:
            compile_event(s, domain)
        except ValueError:
            continue
        out.append(s)
    return out


def _suite_oracle(P, seed, workers, records, verdicts):
    from .crossing import lowest_crossing
    from .lattice import SiteCoord, half_disc
    from .oracle import config_from_int, direct_event, lowest_crossing_table

    for dom in ORACLE_DOMAINS:
        tag = f"sites{dom.site_count}_n{dom.n}"
        paths, index = lowest_crossing_table(dom)
        nonunique = int(np.count_nonzero(index == -2))
        verdicts[f"oracle_unique_minimum_{tag}"] = _verdict(
            nonunique == 0, {"configurations_without_unique_minimum": nonunique}
        )
        lookup = {p: i for i, p in enumerate(paths)}
        bad = 0
        for c in range(index.size):
            res = lowest_crossing(config_from_int(dom, c))
            got = -1 if res is None else lookup.get(res.path, -3)
            bad += got != index[c]
        verdicts[f"oracle_lowest_crossing_{tag}"] = _verdict(
            bad == 0, {"configurations": int(index.size), "mismatches": bad}
        )
        # A_k against "R visits H_m(km)"
        n = dom.n
        for k in range(n + 1):
            spec = EventSpec("A", n=n, m=1, k=k)
            U = half_disc(SiteCoord(k, 0), 1, dom)
            visits = np.array([bool(U.intersection(p)) for p in paths] + [False])
            want = visits[np.where(index >= 0, index, len(paths))]
            got = compile_event(spec, dom).evaluate_all()
            verdicts[f"oracle_A_visit_{tag}_k{k}"] = _verdict(
                np.array_equal(got, want), {"mismatches": int(np.count_nonzero(got != want))}
            )
        for spec in oracle_battery_specs(dom):
            got = compile_event(spec, dom).evaluate_all()
            want = direct_event(spec, dom)
            verdicts[f"oracle_{spec}_{tag}"] = _verdict(
                np.array_equal(got, want), {"mismatches": int(np.count_nonzero(got != want))}
            )
    dom = ORACLE_PQ_DOMAIN
    tag = f"sites{dom.site_count}_n{dom.n}_center0"
    for spec in [EventSpec("P", n=2, k=-1), EventSpec("P", n=2, k=0), EventSpec("Q", n=2, k=-1),
                 EventSpec("Q", n=2, k=0), EventSpec("P_union", n=2)]:
        got = compile_event(spec, dom).evaluate_all()
        want = direct_event(spec, dom)
        verdicts[f"oracle_{spec}_{tag}"] = _verdict(
            np.array_equal(got, want), {"mismatches": int(np.count_nonzero(got != want))}
        )
