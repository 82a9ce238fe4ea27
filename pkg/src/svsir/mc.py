"""Monte Carlo oracle under the risk-neutral dynamics.

Simulates the joint system

    d ln S = (r - v+/2) dt + sqrt(v+) dz1,
    dv     = (kappa*theta - (kappa+lam)*v+) dt + sigma*sqrt(v+) dz2,
    r      = mu + beta*v+,        corr(dz1, dz2) = rho_sv,

with the full-truncation Euler scheme: v+ = max(v, 0) wherever the variance
enters a coefficient, while the carried state v itself is left uncapped.
The stochastic discount exp(-Integral r dt) is accumulated by the trapezoid
rule on the short-rate path.  The bond never needs its own driver: with
rho_bv = 1 it is a deterministic function of (tau, v) along each path.

Determinism contract: a counter-based Philox stream keyed by the seed, with
normal variates by inverse CDF, so identical (seed, inputs) give bit-identical
estimates on a platform; summation is numpy's pairwise reduction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .model import InvalidParameter, MarketState, ModelParams, OptionKind, OptionSpec, validate

_SCHEMES = ("full_truncation_euler",)


@dataclass(frozen=True)
class McConfig:
    n_paths: int
    n_steps_per_year: int = 250
    seed: int = 0
    scheme: str = "full_truncation_euler"

    def __post_init__(self) -> None:
        if self.n_paths < 1000:
            raise InvalidParameter(f"n_paths: must be >= 1000, got {self.n_paths}")
        if self.n_steps_per_year < 50:
            raise InvalidParameter(
                f"n_steps_per_year: must be >= 50, got {self.n_steps_per_year}"
            )
        if self.scheme not in _SCHEMES:
            raise InvalidParameter(f"scheme: must be one of {_SCHEMES}, got {self.scheme!r}")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_paths: int


def _estimate(samples: np.ndarray) -> McEstimate:
    n = samples.size
    # shift by the first sample before the moments: identical to the plain
    # two-pass formulas, but degenerate (constant) samples come out with a
    # standard error of exactly zero
    shifted = samples - samples[0]
    return McEstimate(
        mean=float(samples[0] + shifted.mean()),
        std_error=float(shifted.std(ddof=1) / math.sqrt(n)),
        n_paths=n,
    )


def _normals(rng: np.random.Generator, n: int) -> np.ndarray:
    u = rng.random(n)
    # rng.random() can emit exactly 0.0; keep ndtri finite
    np.maximum(u, 2.0**-53, out=u)
    return ndtri(u)


def _terminal(params: ModelParams, v0: float, ln_spot: float, tau: float, cfg: McConfig,
              with_stock: bool):
    """Terminal (ln S, v, Integral r dt) arrays after full-truncation Euler."""
    n = cfg.n_paths
    if tau == 0.0:
        return (np.full(n, ln_spot), np.full(n, v0), np.zeros(n))
    n_steps = max(1, math.ceil(tau * cfg.n_steps_per_year))
    dt = tau / n_steps
    sqrt_dt = math.sqrt(dt)
    rho = params.rho_sv
    rho_perp = math.sqrt(max(0.0, 1.0 - rho * rho))
    drift_level = params.kappa * params.theta
    alpha = params.alpha

    rng = np.random.Generator(np.random.Philox(cfg.seed))
    v = np.full(n, float(v0))
    ln_s = np.full(n, float(ln_spot))
    rate_integral = np.zeros(n)

    for _ in range(n_steps):
        v_pos = np.maximum(v, 0.0)
        r_now = params.mu + params.beta * v_pos
        vol = np.sqrt(v_pos)
        z2 = _normals(rng, n)
        if with_stock:
            z1 = rho * z2 + rho_perp * _normals(rng, n)
            ln_s += (r_now - 0.5 * v_pos) * dt + vol * sqrt_dt * z1
        v = v + (drift_level - alpha * v_pos) * dt + params.sigma * vol * sqrt_dt * z2
        r_next = params.mu + params.beta * np.maximum(v, 0.0)
        rate_integral += 0.5 * (r_now + r_next) * dt

    return ln_s, v, rate_integral


def simulate_price(
    params: ModelParams, state: MarketState, opt: OptionSpec, cfg: McConfig
) -> McEstimate:
    """Discounted-payoff estimate of the European option price."""
    validate(params)
    if state.tau == 0.0:
        intrinsic = (
            max(state.spot - opt.strike, 0.0)
            if opt.kind is OptionKind.CALL
            else max(opt.strike - state.spot, 0.0)
        )
        return McEstimate(mean=intrinsic, std_error=0.0, n_paths=cfg.n_paths)
    ln_s, _, rate_integral = _terminal(
        params, state.variance, math.log(state.spot), state.tau, cfg, with_stock=True
    )
    s_t = np.exp(ln_s)
    if opt.kind is OptionKind.CALL:
        payoff = np.maximum(s_t - opt.strike, 0.0)
    else:
        payoff = np.maximum(opt.strike - s_t, 0.0)
    return _estimate(np.exp(-rate_integral) * payoff)


def simulate_bond(params: ModelParams, v0: float, tau: float, cfg: McConfig) -> McEstimate:
    """Estimate of E[exp(-Integral_0^tau (mu + beta*v_s) ds)]; the closed-form
    bond's Monte Carlo counterpart."""
    validate(params)
    if v0 < 0:
        raise InvalidParameter(f"variance: must be >= 0, got {v0}")
    if tau < 0:
        raise InvalidParameter(f"tau: must be >= 0, got {tau}")
    _, _, rate_integral = _terminal(params, v0, 0.0, tau, cfg, with_stock=False)
    return _estimate(np.exp(-rate_integral))


def simulate_exercise_prob(
    params: ModelParams, state: MarketState, opt: OptionSpec, cfg: McConfig
) -> McEstimate:
    """Fraction of paths finishing above the strike, with binomial standard error.

    Requires beta = 0: only then is the plain risk-neutral path fraction
    directly comparable to the inversion's R_2.
    """
    validate(params)
    if params.beta != 0.0:
        raise InvalidParameter(
            f"beta: simulate_exercise_prob requires beta = 0, got {params.beta}"
        )
    ln_s, _, _ = _terminal(
        params, state.variance, math.log(state.spot), state.tau, cfg, with_stock=True
    )
    hits = float(np.count_nonzero(ln_s > math.log(opt.strike)))
    p_hat = hits / cfg.n_paths
    se = math.sqrt(p_hat * (1.0 - p_hat) / cfg.n_paths)
    return McEstimate(mean=p_hat, std_error=se, n_paths=cfg.n_paths)
