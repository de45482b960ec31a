import math

import numpy as np
import pytest

from lowxing import experiments as ex
from lowxing.events import EventSpec, compile_event
from lowxing.experiments import (
    EstimateRecord,
    fit_scaling,
    records_csv,
    report_json,
    run_estimate,
    run_moments,
    verify_suite,
    wilson_interval,
)
from lowxing.lattice import Domain
from lowxing.oracle import enumerate_probability


def test_trivial_estimates():
    rec = run_estimate("D(n=8,v=0)", {"truncation_factor": 2}, 1, 3, p=1.0)
    assert rec.p_hat == 1 and rec.successes == 1
    rec = run_estimate("crossing_exists(n=8)", {"truncation_factor": 2}, 500, 3, p=0.0)
    assert rec.p_hat == 0 and rec.ci_low == 0
    assert rec.ci_low <= rec.p_hat <= rec.ci_high


def test_estimate_matches_exact_probability():
    dom = Domain(2, 1.5)
    spec = EventSpec("crossing_exists", n=2)
    exact = enumerate_probability(dom, compile_event(spec, dom)).float_value
    rec = run_estimate(spec, dom, 100_000, 21)
    assert abs(rec.p_hat - exact) < 4 * math.sqrt(exact * (1 - exact) / rec.trials)


def test_estimate_errors_before_sampling():
    with pytest.raises(ValueError):
        run_estimate("D(n=8,v=0)", {"truncation_factor": 0.9, "center": 4}, 10, 0)
    with pytest.raises(ValueError):
        run_estimate("D(n=8,v=0)", {}, 0, 0)
    with pytest.raises(ValueError):
        run_estimate("D(n=8,v=0)", {}, 10, 0, p=1.5)


def test_estimate_independent_of_workers_and_chunking(monkeypatch):
    a = run_estimate("G(n=8,m=2,v=0)", {"truncation_factor": 2}, 25_000, 5, workers=1)
    b = run_estimate("G(n=8,m=2,v=0)", {"truncation_factor": 2}, 25_000, 5, workers=3)
    assert a == b
    monkeypatch.setattr(ex, "EVENT_CHUNK", 777)
    assert run_estimate("G(n=8,m=2,v=0)", {"truncation_factor": 2}, 25_000, 5) == a


def test_wilson_interval():
    lo, hi = wilson_interval(0, 10)
    assert lo == 0 and 0 < hi < 0.35
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and math.isclose(0.5 - lo, hi - 0.5)


def test_csv_schema():
    rec = run_estimate("D(n=4,v=0)", {"truncation_factor": 2}, 100, 1)
    text = records_csv([rec])
    head, row, end = text.split("\n")
    assert head == ",".join(ex.CSV_FIELDS) and end == ""
    assert "\r" not in text
    fields = row.split('",')[1].split(",")
    assert fields[0] == "4" and fields[1] == "-1"
    assert all(len(f.replace(".", "").replace("-", "").lstrip("0")) <= 9 for f in fields)


def test_moments_extremes_and_identity():
    full = run_moments(16, 2, 5, 0, p=1.0)
    assert full.mean_X == 9 and full.p_contact == 1 and full.p_X_ge_1 == 1
    assert full.mean_X2 == 81 and full.p_dist_lt_m == 1
    empty = run_moments(16, 2, 5, 0, p=0.0)
    for f in ("mean_X", "mean_X2", "p_X_ge_1", "p_dist_lt_m", "p_contact",
              "mean_X_given_X_ge_1"):
        assert getattr(empty, f) == 0
    rec = run_moments(32, 4, 400, 9)
    assert rec.p_X_ge_1 <= rec.mean_X
    assert abs(rec.mean_X - rec.p_X_ge_1 * rec.mean_X_given_X_ge_1) <= 1e-12
    assert rec.p_dist_lt_m >= rec.p_contact


def test_moments_reject_bad_m():
    with pytest.raises(ValueError):
        run_moments(16, 3, 10, 0)
    with pytest.raises(ValueError):
        run_moments(16, 16, 10, 0)


def test_moments_share_streams_across_m():
    # the disc count for m = 2 is the same whether or not other m run alongside
    a = run_moments(32, 2, 300, 4)
    ex._MOMENT_CACHE.clear()
    b = ex._moment_sums_single(32, 2.0, 300, 4, 0.5, False, 1, 2)
    assert b[0][2][0] == round(a.mean_X * 300)


def test_moments_worker_invariance():
    a = ex._moment_sums_uncached(16, 2.0, 1200, 3, 0.5, False, 1)
    b = ex._moment_sums_uncached(16, 2.0, 1200, 3, 0.5, False, 2)
    assert a == b


def test_fit_exact_models():
    x = np.array([4.0, 8, 16, 32])
    lin = fit_scaling(x=x, y=2 / x, model="inverse_linear")
    assert math.isclose(lin.a, 2) and math.isclose(lin.max_min_ratio, 1)
    y = 1 / np.log(x)
    log = fit_scaling(x=x, y=y, model="inverse_log")
    power = fit_scaling(x=x, y=y, model="power")
    assert math.isclose(log.max_min_ratio, 1) and power.residual_sum > log.residual_sum
    pw = fit_scaling(x=x, y=3 * x ** -0.4, model="power")
    assert math.isclose(pw.mu, 0.4) and pw.max_min_ratio >= 1
    assert fit_scaling(x=x, y=2 / x, model="constant").max_min_ratio == 16 / 2


def test_fit_from_records_with_weights():
    recs = [EstimateRecord("G", n, 1, -1, 4.0, 10_000, int(10_000 * 0.9 * n ** -0.3), 0.0, 0, 1, 0, 0)
            for n in (4, 8, 16, 32)]
    recs = [EstimateRecord(**{**r.__dict__, "p_hat": r.successes / r.trials}) for r in recs]
    fit = fit_scaling(recs, "power")
    assert fit.mu_ci_low < 0.3 < fit.mu_ci_high


def test_fit_errors():
    with pytest.raises(ValueError):
        fit_scaling(x=[1, 2], y=[1, 1], model="power")
    with pytest.raises(ValueError, match="insufficient trials"):
        fit_scaling(x=[2, 4, 8], y=[0.5, 0.1, 0], model="power")
    with pytest.raises(ValueError):
        fit_scaling(x=[2, 4, 8], y=[0.5, 0.1, 0.1], model="cubic")


def test_verify_suite_errors():
    with pytest.raises(ValueError):
        verify_suite("nope")
    with pytest.raises(ValueError):
        verify_suite("lemma2", bogus=1)


def test_failed_estimate_is_recorded():
    # n = 2 clips an annulus of inner radius 2, which fails inside the suite
    rep = verify_suite("lemma2", ns=[4, 8, 16], trials=2000, annulus_ratios=[1, 2, 4],
                       annulus_ms=[2])
    assert any(k.startswith("estimate D_annulus") and not v["pass"]
               for k, v in rep["verdicts"].items())
    assert "lemma2_i_ratio" in rep["verdicts"]


def test_report_json_is_stable(tmp_path):
    rep = verify_suite("lemma2", ns=[4, 8, 16], trials=2000, annulus_ratios=[4, 8, 16],
                       annulus_ms=[2], out_dir=tmp_path)
    text = report_json(rep)
    assert (tmp_path / "lemma2.json").read_text() == text
    assert (tmp_path / "lemma2.csv").read_text().startswith("event,n,m,k")
    assert set(rep) >= {"suite", "parameters", "records", "verdicts"}
