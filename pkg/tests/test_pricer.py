import math

import numpy as np
import pytest

from conftest import draw_params
from svsir import (
    InvalidParameter,
    MarketState,
    McConfig,
    ModelParams,
    OptionKind,
    OptionSpec,
    bond_price,
    price_heston,
    price_sir,
    put_from_parity,
    simulate_price,
)
from svsir.pricer import MODEL_HESTON, MODEL_SIR

HESTON = ModelParams(kappa=2.0, theta=0.04, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.03, beta=0.0)
SIR = ModelParams(kappa=2.0, theta=0.04, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.03, beta=1.0)
STATE = MarketState(spot=100.0, variance=0.04, tau=1.0)


def test_zero_variance_call_is_discounted_forward():
    p = ModelParams(kappa=2.0, theta=0.0, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.03, beta=0.0)
    state = MarketState(spot=100.0, variance=0.0, tau=1.0)
    for strike in (80.0, 101.0, 103.2, 150.0):
        res = price_heston(p, state, OptionSpec(strike=strike))
        expected = max(0.0, 100.0 - strike * math.exp(-0.03))
        assert res.price == pytest.approx(expected, abs=1e-6)


def test_vanishing_strike_gives_spot():
    res = price_heston(HESTON, STATE, OptionSpec(strike=1e-12 * 100.0))
    assert res.price == pytest.approx(100.0, abs=1e-6)


def test_heston_call_vs_mc():
    opt = OptionSpec(strike=100.0)
    res = price_heston(HESTON, STATE, opt)
    est = simulate_price(HESTON, STATE, opt, McConfig(n_paths=50_000, seed=9))
    assert abs(res.price - est.mean) <= 3.0 * est.std_error


def test_heston_requires_beta_zero():
    with pytest.raises(InvalidParameter, match="beta"):
        price_heston(SIR, STATE, OptionSpec(strike=100.0))


def test_sir_delegates_at_beta_zero():
    res = price_sir(HESTON, STATE, OptionSpec(strike=100.0))
    assert res.model_tag == MODEL_HESTON
    ref = price_heston(HESTON, STATE, OptionSpec(strike=100.0))
    assert res.price == ref.price


def test_model_nesting_tiny_beta():
    nested = ModelParams(kappa=2.0, theta=0.04, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.03, beta=1e-12)
    res_sir = price_sir(nested, STATE, OptionSpec(strike=100.0))
    res_heston = price_heston(HESTON, STATE, OptionSpec(strike=100.0))
    assert res_sir.model_tag == MODEL_SIR
    assert abs(res_sir.price - res_heston.price) < 1e-6


def test_sir_zero_variance_uses_bond_discount():
    p = ModelParams(kappa=2.0, theta=0.0, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.03, beta=1.0)
    state = MarketState(spot=100.0, variance=0.0, tau=1.0)
    f_factor = bond_price(p, 0.0, 1.0).f_factor
    for strike in (90.0, 100.0, 110.0):
        res = price_sir(p, state, OptionSpec(strike=strike))
        assert res.price == pytest.approx(max(0.0, 100.0 - strike * f_factor), abs=1e-6)


def test_parity_identity_across_grid():
    for tau in (0.5, 1.0):
        state = MarketState(spot=100.0, variance=0.04, tau=tau)
        for strike in (80.0, 100.0, 120.0):
            call = price_sir(SIR, state, OptionSpec(strike=strike))
            put = price_sir(SIR, state, OptionSpec(strike=strike, kind=OptionKind.PUT))
            assert abs(call.price - put.price - (100.0 - strike * call.bond.price)) < 1e-6


def test_put_from_parity_symmetry_point():
    call = price_sir(SIR, STATE, OptionSpec(strike=100.0))
    atm_forward = 100.0 / call.bond.price
    call_af = price_sir(SIR, STATE, OptionSpec(strike=atm_forward))
    put_af = put_from_parity(call_af, STATE, OptionSpec(strike=atm_forward))
    assert put_af.price == pytest.approx(call_af.price, abs=1e-12)


def test_put_vanishes_with_strike():
    call = price_sir(SIR, STATE, OptionSpec(strike=1e-10 * 100.0))
    put = put_from_parity(call, STATE, OptionSpec(strike=1e-10 * 100.0))
    assert abs(put.price) < 1e-6


def test_put_non_negative_and_matches_mc():
    opt = OptionSpec(strike=110.0, kind=OptionKind.PUT)
    res = price_sir(SIR, STATE, opt)
    assert res.price > -1e-9
    est = simulate_price(SIR, STATE, opt, McConfig(n_paths=50_000, seed=33))
    assert abs(res.price - est.mean) <= 3.0 * est.std_error


def test_call_monotonicity_and_bounds():
    prices_k = []
    for strike in (60.0, 80.0, 100.0, 120.0, 140.0):
        res = price_sir(SIR, STATE, OptionSpec(strike=strike))
        bound_low = max(0.0, 100.0 - strike * res.bond.price)
        assert bound_low - 1e-6 <= res.price <= 100.0 + 1e-6
        prices_k.append(res.price)
    assert all(b <= a + 1e-8 for a, b in zip(prices_k, prices_k[1:]))

    prices_s = []
    for spot in (80.0, 100.0, 120.0):
        state = MarketState(spot=spot, variance=0.04, tau=1.0)
        prices_s.append(price_sir(SIR, state, OptionSpec(strike=100.0)).price)
    assert all(a <= b + 1e-8 for a, b in zip(prices_s, prices_s[1:]))


def test_maturity_zero_is_intrinsic():
    state = MarketState(spot=100.0, variance=0.04, tau=0.0)
    assert price_sir(SIR, state, OptionSpec(strike=80.0)).price == pytest.approx(20.0, abs=1e-12)
    assert price_sir(SIR, state, OptionSpec(strike=120.0)).price == pytest.approx(0.0, abs=1e-12)


def test_random_draws_nesting():
    rng = np.random.default_rng(14)
    for _ in range(3):
        p0 = draw_params(rng, beta=0.0)
        p_eps = ModelParams(**{**p0.__dict__, "beta": 1e-10})
        for strike in (90.0, 110.0):
            a = price_sir(p_eps, STATE, OptionSpec(strike=strike)).price
            b = price_heston(p0, STATE, OptionSpec(strike=strike)).price
            assert abs(a - b) < 1e-6


def test_result_fields_populated():
    res = price_sir(SIR, STATE, OptionSpec(strike=100.0))
    assert res.model_tag == MODEL_SIR
    assert 0.0 < res.bond.price < 1.0
    assert 0.0 <= res.r1 <= 1.0 and 0.0 <= res.r2 <= 1.0
    assert res.err_estimate >= 0.0
