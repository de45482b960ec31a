"""
Acceptance criteria 1-10.

Each test runs the documented default suite (criterion 10 uses reduced
sweeps), prints a single ``PASS``/``FAIL`` line and then asserts.  The full
set takes tens of minutes on one core; run it alone with

    pytest tests/test_acceptance.py -v -s
"""

import time

import pytest

from lowxing import experiments as ex

SEED = ex.DEFAULT_SEED


@pytest.fixture(scope="module")
def suites():
    cache = {}

    def get(name):
        if name not in cache:
            t0 = time.perf_counter()
            cache[name] = ex.verify_suite(name, master_seed=SEED)
            cache[name]["_seconds"] = time.perf_counter() - t0
        return cache[name]

    return get


def verdict_line(capsys, number, title, checks, report, extra=""):
    results = {c: report["verdicts"].get(c, {"pass": False, "detail": "missing"}) for c in checks}
    ok = all(v["pass"] for v in results.values())
    failed = [c for c, v in results.items() if not v["pass"]]
    with capsys.disabled():
        status = "PASS" if ok else "FAIL"
        tail = f" failed: {', '.join(failed)}" if failed else ""
        print(f"\n[{status}] criterion {number}: {title}{extra}{tail}")
    return ok, results


def pick(report, prefix):
    return [k for k in report["verdicts"] if k.startswith(prefix)]


def test_criterion_01_oracle_equivalence(suites, capsys):
    rep = suites("oracle")
    checks = list(rep["verdicts"])
    kinds = {k.split("(")[0].removeprefix("oracle_") for k in checks}
    ok, res = verdict_line(capsys, 1, "exhaustive oracle equivalence", checks, rep,
                           f" ({len(checks)} checks, {rep['_seconds']:.0f}s)")
    assert {"D", "D_annulus", "F", "G", "P", "Q", "crossing_exists", "A"} <= kinds
    assert rep["_seconds"] < 300
    assert ok, {k: v for k, v in res.items() if not v["pass"]}


def test_criterion_02_flip_duality(suites, capsys):
    rep = suites("duality")
    checks = pick(rep, "duality_")
    ok, res = verdict_line(capsys, 2, "flip duality exact and Monte Carlo", checks, rep)
    assert len(pick(rep, "duality_exact_k")) == 2 and len(pick(rep, "duality_mc_k")) == 16
    assert ok, {k: v for k, v in res.items() if not v["pass"]}


def test_criterion_03_lemma2_i(suites, capsys):
    rep = suites("lemma2")
    checks = ["lemma2_i_ratio", "lemma2_i_model", "lemma2_i_monotone"]
    ok, res = verdict_line(
        capsys, 3, "n*rho(n) ratio and inverse_linear fit", checks, rep,
        f" (ratio {rep['verdicts']['lemma2_i_ratio']['detail']['max_min_ratio']:.3f})")
    assert rep["_seconds"] < 1800
    assert ok, res


def test_criterion_04_lemma2_ii(suites, capsys):
    rep = suites("lemma2")
    ok, res = verdict_line(
        capsys, 4, "rho(n,m)*(n/m) ratio", ["lemma2_ii_ratio"], rep,
        f" (ratio {rep['verdicts']['lemma2_ii_ratio']['detail']['max_min_ratio']:.3f})")
    assert ok, res


def test_criterion_05_prop_i(suites, capsys):
    rep = suites("prop")
    sens = rep["verdicts"]["prop_i_truncation_sensitivity"]["detail"]
    ok, res = verdict_line(
        capsys, 5, "E X ratio and truncation sensitivity",
        ["prop_i_mean_X_ratio", "prop_i_truncation_sensitivity"], rep,
        f" (ratio {rep['verdicts']['prop_i_mean_X_ratio']['detail']['max_min_ratio']:.3f},"
        f" mean_X K=2/4 {sens['mean_X'][0]:.3f}/{sens['mean_X'][1]:.3f},"
        f" diff {sens['difference']:.3f} vs 3sigma {sens['three_sigma']:.3f})")
    assert ok, res


def test_criterion_06_theorem1(suites, capsys):
    rep = suites("theorem1")
    checks = ["theorem1_ratio", "theorem1_model", "theorem1_distance_vs_X"]
    checks += pick(rep, "theorem1_decreasing_m")
    ok, res = verdict_line(
        capsys, 6, "P(X>=1)*log(n/m) ratio, decrease, model, distance", checks, rep,
        f" (ratio {rep['verdicts']['theorem1_ratio']['detail']['max_min_ratio']:.3f})")
    assert ok, res


def test_criterion_07_corollary(suites, capsys):
    rep = suites("theorem1")
    ok, res = verdict_line(
        capsys, 7, "contact probability decrease and log ratio",
        ["corollary_decreasing", "corollary_ratio"], rep,
        f" (ratio {rep['verdicts']['corollary_ratio']['detail']['max_min_ratio']:.3f})")
    assert ok, res


def test_criterion_08_prop_ii_iii(suites, capsys):
    rep = suites("prop")
    checks = ["prop_ii_conditional_mean_ratio", "prop_iii_second_moment_ratio", "prop_identity"]
    ok, res = verdict_line(capsys, 8, "conditional mean and second moment ratios, identity",
                           checks, rep)
    assert ok, res


def test_criterion_09_one_arm(suites, capsys):
    rep = suites("prop")
    d = rep["verdicts"]["one_arm_mu_positive"]["detail"]
    ok, res = verdict_line(capsys, 9, "one-arm exponent positive", ["one_arm_mu_positive"], rep,
                           f" (mu {d['mu']:.3f}, 95% CI {d['ci95'][0]:.3f}..{d['ci95'][1]:.3f})")
    assert ok, res


REDUCED = {
    "lemma2": dict(ns=[4, 8, 16], trials=25_000, annulus_ratios=[4, 8], annulus_ms=[2]),
    "theorem1": dict(ms=[1, 2], ratios=[8, 16, 32], trials=1_200, contact_ns=[8, 16, 32],
                     consistency_n=16, consistency_m=2, consistency_trials=1_200),
    "duality": dict(mc_n=4, mc_trials=20_000),
}


def test_criterion_10_reproducibility(capsys, tmp_path):
    texts = {}
    for run, workers in (("a", 1), ("b", 1), ("c", 4)):
        for name, over in REDUCED.items():
            ex._MOMENT_CACHE.clear()
            out = tmp_path / f"{run}"
            rep = ex.verify_suite(name, master_seed=SEED, workers=workers, out_dir=out, **over)
            texts[run, name] = ex.report_json(rep)
            for f in sorted(out.glob(f"{name}*")):
                texts[run, f.name] = f.read_bytes()
    keys = {k[1] for k in texts}
    same = all(texts["a", k] == texts["b", k] == texts["c", k] for k in keys)
    with capsys.disabled():
        print(f"\n[{'PASS' if same else 'FAIL'}] criterion 10: byte-identical reports for "
              f"repeated runs and workers 1/4 ({len(keys)} artefacts)")
    assert same
