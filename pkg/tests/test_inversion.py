import math

import numpy as np
import pytest

from svsir import (
    CfProvider,
    InvalidParameter,
    MarketState,
    McConfig,
    ModelParams,
    OptionSpec,
    QuadratureSpec,
    SubdivisionExhausted,
    TailNotDecaying,
    characteristic_fn,
    gil_pelaez,
    simulate_exercise_prob,
)

HESTON = ModelParams(kappa=2.0, theta=0.04, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.03, beta=0.0)


def heston_provider(params, x, v, tau):
    def eval_fn(j, phi):
        return characteristic_fn(params, params.mu, x, v, tau, phi, j)

    proxy = tau * v + 0.5 * params.kappa * params.theta * tau**2
    return CfProvider(eval=eval_fn, decay_proxy=proxy)


def test_deep_in_the_money():
    log_k = math.log(100.0) - 20.0
    pair = gil_pelaez(heston_provider(HESTON, math.log(100.0), 0.04, 1.0), math.log(100.0), log_k)
    assert pair.r1 == pytest.approx(1.0, abs=1e-6)
    assert pair.r2 == pytest.approx(1.0, abs=1e-6)


def test_deep_out_of_the_money():
    log_k = math.log(100.0) + 20.0
    pair = gil_pelaez(heston_provider(HESTON, math.log(100.0), 0.04, 1.0), math.log(100.0), log_k)
    assert pair.r1 == pytest.approx(0.0, abs=1e-6)
    assert pair.r2 == pytest.approx(0.0, abs=1e-6)


def test_r2_matches_mc_exercise_probability():
    state = MarketState(spot=100.0, variance=0.04, tau=1.0)
    opt = OptionSpec(strike=105.0)
    pair = gil_pelaez(
        heston_provider(HESTON, math.log(state.spot), state.variance, state.tau),
        math.log(state.spot),
        math.log(opt.strike),
    )
    est = simulate_exercise_prob(HESTON, state, opt, McConfig(n_paths=100_000, seed=21))
    assert abs(pair.r2 - est.mean) <= 3.0 * est.std_error


def test_monotone_in_log_strike():
    provider = heston_provider(HESTON, math.log(100.0), 0.04, 1.0)
    strikes = [60.0, 80.0, 100.0, 120.0, 150.0]
    pairs = [gil_pelaez(provider, math.log(100.0), math.log(k)) for k in strikes]
    for earlier, later in zip(pairs, pairs[1:]):
        assert later.r1 <= earlier.r1 + 1e-8
        assert later.r2 <= earlier.r2 + 1e-8


def test_translation_consistency():
    # shifting x and ln K together leaves R_j unchanged: the integrand sees
    # only the difference through the phase product
    shift = 0.37
    base = heston_provider(HESTON, math.log(100.0), 0.04, 1.0)
    shifted = heston_provider(HESTON, math.log(100.0) + shift, 0.04, 1.0)
    p0 = gil_pelaez(base, math.log(100.0), math.log(90.0))
    p1 = gil_pelaez(shifted, math.log(100.0) + shift, math.log(90.0) + shift)
    tol = 10 * max(p0.achieved_error_estimate, p1.achieved_error_estimate) + 1e-12
    assert abs(p0.r1 - p1.r1) < tol
    assert abs(p0.r2 - p1.r2) < tol


def test_halving_tolerance_stays_within_error_estimate():
    provider = heston_provider(HESTON, math.log(100.0), 0.04, 1.0)
    loose_spec = QuadratureSpec(abs_tol=1e-6)
    tight_spec = QuadratureSpec(abs_tol=5e-7)
    loose = gil_pelaez(provider, math.log(100.0), math.log(110.0), loose_spec)
    tight = gil_pelaez(provider, math.log(100.0), math.log(110.0), tight_spec)
    assert abs(loose.r1 - tight.r1) <= loose.achieved_error_estimate + 1e-12
    assert abs(loose.r2 - tight.r2) <= loose.achieved_error_estimate + 1e-12


def test_probabilities_within_tolerance_band():
    provider = heston_provider(HESTON, math.log(100.0), 0.04, 1.0)
    spec = QuadratureSpec(abs_tol=1e-9)
    for strike in (50.0, 95.0, 100.0, 130.0):
        pair = gil_pelaez(provider, math.log(100.0), math.log(strike), spec)
        eps = 10 * spec.abs_tol
        assert -eps <= pair.r1 <= 1.0 + eps
        assert -eps <= pair.r2 <= 1.0 + eps
        assert pair.achieved_error_estimate <= spec.abs_tol


def test_degenerate_bypass_uses_phase_center():
    # point-mass law: zero variance everywhere, but a non-zero drift means
    # the indicator must be taken at the drifted location, not at bare x
    p = ModelParams(kappa=2.0, theta=0.0, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.03, beta=0.0)
    x = math.log(100.0)
    provider = heston_provider(p, x, 0.0, 1.0)
    assert provider.decay_proxy == 0.0
    # forward ln S_T = x + mu: strike between x and x+mu must exercise
    pair = gil_pelaez(provider, x, x + 0.5 * p.mu)
    assert pair.r1 == 1.0 and pair.r2 == 1.0
    pair = gil_pelaez(provider, x, x + 2.0 * p.mu)
    assert pair.r1 == 0.0 and pair.r2 == 0.0
    pair = gil_pelaez(provider, x, x + p.mu)  # exactly at the point mass
    assert pair.r1 == 0.5 and pair.r2 == 0.5


def test_tail_not_decaying_reported():
    # near-zero variance but above the degenerate threshold: |f| stays ~1 far
    # past any reasonable truncation budget
    p = ModelParams(kappa=2.0, theta=0.0, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.03, beta=0.0)
    provider = heston_provider(p, math.log(100.0), 2e-6, 1.0)
    with pytest.raises(TailNotDecaying):
        gil_pelaez(provider, math.log(100.0), math.log(100.0))


def test_subdivision_exhausted_reported():
    provider = heston_provider(HESTON, math.log(100.0), 0.04, 1.0)
    spec = QuadratureSpec(abs_tol=1e-12, max_subdivisions=4)
    with pytest.raises(SubdivisionExhausted):
        gil_pelaez(provider, math.log(100.0), math.log(100.0) - 20.0, spec)


def test_quadrature_spec_validation():
    with pytest.raises(InvalidParameter):
        QuadratureSpec(abs_tol=1e-2)
    with pytest.raises(InvalidParameter):
        QuadratureSpec(abs_tol=1e-13)
    with pytest.raises(InvalidParameter):
        QuadratureSpec(phi_max=0.0)
    with pytest.raises(InvalidParameter):
        QuadratureSpec(max_subdivisions=2)


def test_gauss_kronrod_panel_exactness():
    # the 15-point rule integrates smooth functions to machine precision
    from svsir.inversion import _adaptive_integral

    value, err = _adaptive_integral(np.cos, 0.0, math.pi / 2, 1e-12, 64, 4)
    assert value == pytest.approx(1.0, abs=1e-13)
    value, _ = _adaptive_integral(lambda t: t**7 - 3 * t**2 + 1.0, -1.0, 2.0, 1e-12, 64, 4)
    exact = (2.0**8 - 1.0) / 8 - (2.0**3 + 1.0) + 3.0
    assert value == pytest.approx(exact, rel=1e-13)
