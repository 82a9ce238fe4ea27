"""European option prices for the constant-rate and stochastic-rate models.

Both models price through the same decomposition

    call = S * R_1 - K * B * R_2,

with B the discount bond and R_j the exercise probabilities from
:mod:`svsir.inversion`.  The constant-rate route (beta = 0) uses the closed
form characteristic function at log-spot x = ln S with discount exp(-mu*tau);
the stochastic-rate route uses the Riccati-integrated one at forward
log-moneyness x = ln(S / B(tau, v)), so that exp(x)*B = S and the discounting
lives entirely in the bond leg.  The bond and the characteristic function
share one parameter set: the lam entering the bond is the same risk-premium
constant entering b_j.

Puts come from parity, put = call - S + K*B, which is exact by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import bond, heston_cf, riccati
from .inversion import CfProvider, ProbabilityPair, QuadratureSpec, gil_pelaez
from .model import InvalidParameter, MarketState, ModelParams, OptionKind, OptionSpec, validate

MODEL_HESTON = "heston"
MODEL_SIR = "sir_heston"

# Riccati tolerances used for pricing: tighter than the solver default so the
# model-nesting identity (beta -> 0 equals the closed form) holds to 1e-6 in
# price units.
PRICING_ODE_TOL = riccati.ToleranceSpec(rel=1e-10, abs=1e-12)

# ODE batches are chunked to bounded width; frequencies are sorted first so a
# chunk shares a comparable step-size scale.
_CHUNK = 256


@dataclass(frozen=True)
class PriceResult:
    """Price plus the decomposition it was assembled from."""

    price: float
    r1: float
    r2: float
    bond: bond.BondValue
    model_tag: str
    err_estimate: float


def _decay_proxy(params: ModelParams, state: MarketState) -> float:
    # leading-order accumulated variance; ~0 means a pure-phase CF
    return state.tau * state.variance + 0.5 * params.kappa * params.theta * state.tau**2


def _heston_provider(params: ModelParams, state: MarketState) -> CfProvider:
    x = math.log(state.spot)
    v = state.variance
    tau = state.tau

    def eval_fn(j: int, phi: np.ndarray) -> np.ndarray:
        return heston_cf.characteristic_fn(params, params.mu, x, v, tau, phi, j)

    return CfProvider(eval=eval_fn, decay_proxy=_decay_proxy(params, state))


def _sir_provider(
    params: ModelParams,
    state: MarketState,
    x: float,
    tol: riccati.ToleranceSpec,
) -> CfProvider:
    v = state.variance
    tau = state.tau

    def eval_fn(j: int, phi: np.ndarray) -> np.ndarray:
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        order = np.argsort(phi)
        out = np.empty(phi.size, dtype=complex)
        for start in range(0, phi.size, _CHUNK):
            idx = order[start : start + _CHUNK]
            c_vals, d_vals, _ = riccati.integrate_cd_batch(params, tau, phi[idx], j, tol)
            out[idx] = np.exp(c_vals + d_vals * v + 1j * phi[idx] * x)
        return out

    return CfProvider(eval=eval_fn, decay_proxy=_decay_proxy(params, state))


def _assemble(
    state: MarketState,
    opt: OptionSpec,
    bond_value: bond.BondValue,
    pair: ProbabilityPair,
    tag: str,
) -> PriceResult:
    call = state.spot * pair.r1 - opt.strike * bond_value.price * pair.r2
    result = PriceResult(
        price=call,
        r1=pair.r1,
        r2=pair.r2,
        bond=bond_value,
        model_tag=tag,
        err_estimate=pair.achieved_error_estimate,
    )
    if opt.kind is OptionKind.PUT:
        result = put_from_parity(result, state, opt)
    return result


def price_heston(
    params: ModelParams,
    state: MarketState,
    opt: OptionSpec,
    quad: QuadratureSpec = QuadratureSpec(),
) -> PriceResult:
    """Semi-analytic price in the constant-rate model (requires beta = 0)."""
    validate(params)
    if params.beta != 0.0:
        raise InvalidParameter(
            f"beta: price_heston requires beta = 0, got {params.beta}; use price_sir"
        )
    disc = math.exp(-params.mu * state.tau)
    bond_value = bond.BondValue(price=disc, f_factor=disc, g_factor=0.0)
    provider = _heston_provider(params, state)
    pair = gil_pelaez(provider, math.log(state.spot), math.log(opt.strike), quad)
    return _assemble(state, opt, bond_value, pair, MODEL_HESTON)


def price_sir(
    params: ModelParams,
    state: MarketState,
    opt: OptionSpec,
    quad: QuadratureSpec = QuadratureSpec(),
    ode_tol: riccati.ToleranceSpec = PRICING_ODE_TOL,
) -> PriceResult:
    """Semi-analytic price in the stochastic-rate model (beta > 0).

    beta = 0 delegates to :func:`price_heston`.  The same current variance v
    drives both the bond leg and the characteristic function.
    """
    validate(params)
    if params.beta == 0.0:
        return price_heston(params, state, opt, quad)
    bond_value = bond.bond_price(params, state.variance, state.tau)
    x = math.log(state.spot / bond_value.price)
    provider = _sir_provider(params, state, x, ode_tol)
    pair = gil_pelaez(provider, x, math.log(opt.strike), quad)
    return _assemble(state, opt, bond_value, pair, MODEL_SIR)


def put_from_parity(call: PriceResult, state: MarketState, opt: OptionSpec) -> PriceResult:
    """put = call - S + K*B, exact for European payoffs without dividends."""
    put_price = call.price - state.spot + opt.strike * call.bond.price
    return replace(call, price=put_price)
