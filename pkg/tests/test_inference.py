import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from urnspread.inference import (information_estimate, infer, normal_quantile, standard_errors_ci,
                                 symmetric_inverse, wald_report, wald_stats)
from urnspread.likelihood import LikelihoodContext, covariance_sum, hessian
from urnspread.simulate import Trace, simulate_trace


def test_information_is_scaled_negative_hessian(loop_triangle):
    rng = np.random.default_rng(0)
    for s in range(10):
        tr = simulate_trace(loop_triangle, rng.normal(size=2), 100, seed=s)
        ctx = LikelihoodContext.from_trace(loop_triangle, tr)
        beta = rng.normal(size=2)
        np.testing.assert_allclose(information_estimate(ctx, beta), -hessian(ctx, beta) / ctx.k,
                                   rtol=0, atol=1e-12)


def test_hand_information(two_cycle, two_cycle_trace):
    ctx = LikelihoodContext.from_trace(two_cycle, two_cycle_trace)
    assert information_estimate(ctx, [0.0])[0, 0] == pytest.approx(0.25 / 3, abs=1e-15)
    forced = LikelihoodContext.from_trace(two_cycle, Trace(0, [0]))
    assert information_estimate(forced, [0.4])[0, 0] == 0.0


def test_burn_in_drops_early_steps(loop_triangle):
    tr = simulate_trace(loop_triangle, [0.3, 0.3], 60, seed=2)
    ctx = LikelihoodContext.from_trace(loop_triangle, tr)
    K = 10
    late = covariance_sum(ctx, [0.1, 0.2]) - covariance_sum(
        LikelihoodContext(ctx.X, ctx.B[:K], ctx.chosen[:K], ctx.n), [0.1, 0.2])
    np.testing.assert_allclose(information_estimate(ctx, [0.1, 0.2], burn_in=K), late / (ctx.k - K),
                               atol=1e-12)
    with pytest.raises(ValueError):
        information_estimate(ctx, [0.0, 0.0], burn_in=ctx.k)


def test_hand_interval():
    res = standard_errors_ci([[1 / 12]], [0.0], k=3)
    assert res.se[0] == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(res.ci[0], [-3.92, 3.92], atol=1e-2)
    assert not res.numerical_flag


def test_identity_information_half_width():
    res = standard_errors_ci(np.eye(3), np.zeros(3), k=100)
    np.testing.assert_allclose(res.ci[:, 1], 1.959963984540054 / 10, rtol=1e-12)


def test_singular_information_flagged():
    res = standard_errors_ci(np.array([[1.0, 1.0], [1.0, 1.0]]), [0.5, 0.5], k=50)
    assert res.numerical_flag
    assert np.all(np.isnan(res.se))
    d = res.to_dict()
    assert d["numerical_flag"] is True and d["se"] == [None, None]


def test_wald_examples():
    np.testing.assert_allclose(wald_stats([2.0], [1.0]), [2.0])
    np.testing.assert_allclose(wald_stats([0.0, 3.0], [1.0, 1.5]), [0.0, 2.0])
    assert np.isnan(wald_stats([1.0], [0.0])[0])


def test_wald_report_order():
    res = standard_errors_ci(np.diag([1.0, 4.0, 0.25]), [1.0, -1.0, 3.0], k=100)
    names = [r["name"] for r in wald_report(res, ["a", "b", "c"])]
    assert names == ["b", "c", "a"]  # |t| = 20, 15, 10


@pytest.mark.parametrize("p", [1e-300, 1e-12, 1e-6, 0.001, 0.02, 0.02425, 0.1, 0.5, 0.8, 0.975, 0.99,
                               1 - 1e-9])
def test_normal_quantile_against_scipy(p):
    assert normal_quantile(p) == pytest.approx(norm.ppf(p), rel=1e-12, abs=1e-12)


def test_normal_quantile_edges():
    assert normal_quantile(0.0) == -math.inf and normal_quantile(1.0) == math.inf
    with pytest.raises(ValueError):
        normal_quantile(1.5)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000))
def test_symmetric_inverse_matches_numpy(d, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(d, d))
    S = A @ A.T + 0.1 * np.eye(d)
    np.testing.assert_allclose(symmetric_inverse(S), np.linalg.inv(S), rtol=1e-8, atol=1e-10)


def test_symmetric_inverse_singular():
    assert symmetric_inverse(np.zeros((2, 2))) is None


def test_infer_end_to_end(loop_triangle):
    from urnspread.likelihood import fit_mle

    tr = simulate_trace(loop_triangle, [1.0, -1.0], 3000, seed=5)
    ctx = LikelihoodContext.from_trace(loop_triangle, tr)
    fit = fit_mle(ctx)
    res = infer(ctx, fit.beta)
    assert np.all(res.se > 0)
    assert np.all(res.ci[:, 0] < fit.beta) and np.all(fit.beta < res.ci[:, 1])
    # se equals sqrt(diag(-H^{-1}))
    np.testing.assert_allclose(res.se, np.sqrt(np.diag(np.linalg.inv(-fit.hessian))), rtol=1e-8)


def test_information_psd():
    from oracles import random_instance

    rng = np.random.default_rng(12)
    for _ in range(40):
        g, tr, beta = random_instance(rng)
        ev = np.linalg.eigvalsh(information_estimate(LikelihoodContext.from_trace(g, tr), beta))
        assert ev.min() >= -1e-10 * max(ev.max(), 1e-300)


@pytest.mark.parametrize("factor, ratio", [(4, 2.0), (2, math.sqrt(2.0))])
def test_widths_shrink_like_root_k(loop_triangle, factor, ratio):
    from urnspread.likelihood import fit_mle

    k = 500
    widths = {k: [], factor * k: []}
    for r in range(50):
        for kk in widths:
            tr = simulate_trace(loop_triangle, [1.0, -1.0], kk, seed=10_000 * r + kk)
            ctx = LikelihoodContext.from_trace(loop_triangle, tr)
            res = infer(ctx, fit_mle(ctx).beta)
            widths[kk].append(res.ci[0, 1] - res.ci[0, 0])
    observed = np.median(widths[k]) / np.median(widths[factor * k])
    assert abs(observed / ratio - 1) < 0.3
