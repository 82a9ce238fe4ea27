import math

import pytest

from svsir import (
    InvalidParameter,
    MarketState,
    McConfig,
    ModelParams,
    OptionKind,
    OptionSpec,
    bond_price,
    price_heston,
    simulate_bond,
    simulate_exercise_prob,
    simulate_price,
)

HESTON = ModelParams(kappa=2.0, theta=0.04, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.03, beta=0.0)
SIR = ModelParams(kappa=2.0, theta=0.04, sigma=0.3, lam=0.1, rho_sv=-0.5, mu=0.03, beta=1.0)
STATE = MarketState(spot=100.0, variance=0.04, tau=1.0)


def test_config_invariants():
    with pytest.raises(InvalidParameter, match="n_paths"):
        McConfig(n_paths=999)
    with pytest.raises(InvalidParameter, match="n_steps_per_year"):
        McConfig(n_paths=1000, n_steps_per_year=10)
    with pytest.raises(InvalidParameter, match="scheme"):
        McConfig(n_paths=1000, scheme="milstein")


def test_zero_noise_paths_are_deterministic():
    p = ModelParams(kappa=2.0, theta=0.0, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.03, beta=1.0)
    state = MarketState(spot=100.0, variance=0.0, tau=1.0)
    est = simulate_price(p, state, OptionSpec(strike=95.0), McConfig(n_paths=2000, seed=1))
    assert est.std_error == 0.0
    # exact up to the float accumulation of ~250 drift increments
    assert est.mean == pytest.approx(max(0.0, 100.0 - 95.0 * math.exp(-0.03)), abs=1e-10)


def test_bond_deterministic_cases():
    p0 = ModelParams(kappa=2.0, theta=0.04, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.04, beta=0.0)
    est = simulate_bond(p0, 0.09, 2.0, McConfig(n_paths=2000, seed=2))
    assert est.std_error == 0.0
    assert est.mean == pytest.approx(math.exp(-0.08), abs=1e-12)

    pz = ModelParams(kappa=2.0, theta=0.0, sigma=0.3, lam=0.0, rho_sv=-0.5, mu=0.04, beta=2.0)
    est = simulate_bond(pz, 0.0, 1.5, McConfig(n_paths=2000, seed=3))
    assert est.std_error == 0.0
    assert est.mean == pytest.approx(math.exp(-0.06), abs=1e-12)


def test_bond_vs_closed_form():
    est = simulate_bond(SIR, 0.04, 1.0, McConfig(n_paths=100_000, seed=4))
    closed = bond_price(SIR, 0.04, 1.0).price
    assert abs(closed - est.mean) <= 3.0 * est.std_error


def test_variance_mean_matches_square_root_process():
    from svsir.mc import _terminal

    cfg = McConfig(n_paths=100_000, seed=5)
    _, v_t, _ = _terminal(SIR, 0.04, 0.0, 1.0, cfg, with_stock=False)
    alpha = SIR.alpha
    theta_rn = SIR.kappa * SIR.theta / alpha
    expected = theta_rn + (0.04 - theta_rn) * math.exp(-alpha)
    se = v_t.std(ddof=1) / math.sqrt(v_t.size)
    assert abs(v_t.mean() - expected) <= 3.0 * se


def test_price_vs_semianalytic_heston():
    opt = OptionSpec(strike=105.0)
    res = price_heston(HESTON, STATE, opt)
    est = simulate_price(HESTON, STATE, opt, McConfig(n_paths=50_000, seed=6))
    assert abs(res.price - est.mean) <= 3.0 * est.std_error


def test_put_payoff_path():
    opt = OptionSpec(strike=100.0, kind=OptionKind.PUT)
    est = simulate_price(HESTON, STATE, opt, McConfig(n_paths=20_000, seed=7))
    assert est.mean > 0
    res = price_heston(HESTON, STATE, opt)
    assert abs(res.price - est.mean) <= 3.5 * est.std_error


def test_determinism_same_seed():
    cfg = McConfig(n_paths=5_000, seed=42)
    a = simulate_price(SIR, STATE, OptionSpec(strike=100.0), cfg)
    b = simulate_price(SIR, STATE, OptionSpec(strike=100.0), cfg)
    assert a == b  # bit-identical
    c = simulate_price(SIR, STATE, OptionSpec(strike=100.0), McConfig(n_paths=5_000, seed=43))
    assert c.mean != a.mean


def test_standard_error_definition():
    est = simulate_price(HESTON, STATE, OptionSpec(strike=100.0), McConfig(n_paths=4_000, seed=8))
    assert est.n_paths == 4_000
    assert est.std_error > 0


def test_convergence_scaling():
    se_small = simulate_price(HESTON, STATE, OptionSpec(strike=100.0),
                              McConfig(n_paths=4_000, seed=10)).std_error
    se_large = simulate_price(HESTON, STATE, OptionSpec(strike=100.0),
                              McConfig(n_paths=16_000, seed=11)).std_error
    assert se_large == pytest.approx(0.5 * se_small, rel=0.2)


def test_discretization_bias_under_control():
    # the two runs are independent draws, so the difference carries both
    # noise streams; the bias must hide inside that combined resolution
    opt = OptionSpec(strike=100.0)
    coarse = simulate_price(SIR, STATE, opt, McConfig(n_paths=50_000, n_steps_per_year=50, seed=12))
    fine = simulate_price(SIR, STATE, opt, McConfig(n_paths=50_000, n_steps_per_year=100, seed=12))
    assert abs(fine.mean - coarse.mean) < 2.0 * math.hypot(coarse.std_error, fine.std_error)


def test_exercise_prob_limits():
    est = simulate_exercise_prob(HESTON, STATE, OptionSpec(strike=1e-9), McConfig(n_paths=2000, seed=13))
    assert est.mean == 1.0 and est.std_error == 0.0
    est = simulate_exercise_prob(HESTON, STATE, OptionSpec(strike=1e8), McConfig(n_paths=2000, seed=14))
    assert est.mean == 0.0


def test_exercise_prob_requires_beta_zero():
    with pytest.raises(InvalidParameter, match="beta"):
        simulate_exercise_prob(SIR, STATE, OptionSpec(strike=100.0), McConfig(n_paths=2000, seed=15))


def test_tau_zero_short_circuit():
    state = MarketState(spot=100.0, variance=0.04, tau=0.0)
    est = simulate_price(SIR, state, OptionSpec(strike=90.0), McConfig(n_paths=2000, seed=16))
    assert est.mean == 10.0 and est.std_error == 0.0
