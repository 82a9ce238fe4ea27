"""Closed-form characteristic-function coefficients for the constant-rate model.

The log-spot characteristic function under measure j in {1, 2} is

    f_j(x, v, tau; phi) = exp(C(tau, phi) + D(tau, phi)*v + i*phi*x),

with the coefficient table

    zeta_1 = +1/2, zeta_2 = -1/2, a = kappa*theta,
    b_1 = kappa + lam - rho_sv*sigma,  b_2 = kappa + lam,

and, writing bb = b_j - rho_sv*sigma*phi*i,

    d = sqrt(bb^2 - sigma^2*(2*zeta_j*phi*i - phi^2)),
    C = r0*phi*i*tau + a/sigma^2 * [ (bb - d)*tau
            - 2*ln( (1 - h*exp(-d*tau)) / (1 - h) ) ],
    D = (bb - d)/sigma^2 * (1 - exp(-d*tau)) / (1 - h*exp(-d*tau)),
    h = (bb - d)/(bb + d).

This is the rearrangement that keeps the principal complex log continuous in
tau for all maturities (no 2*pi*i jumps): the principal square root gives
Re(d) >= 0, so exp(-d*tau) stays bounded and the log argument never winds
around the cut.  It is algebraically identical to the textbook form written
with g = 1/h and exp(+d*tau); the tests verify both the identity and the
continuity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import InvalidParameter, ModelParams


@dataclass(frozen=True)
class CfCoefficients:
    """Pair (C, D) defining the characteristic function at one (tau, phi, j)."""

    c_val: complex
    d_val: complex


def zeta(j: int) -> float:
    """Drift coefficient of the measure-j log-spot: +1/2 for j=1, -1/2 for j=2."""
    _check_j(j)
    return 0.5 if j == 1 else -0.5


def b_coeff(params: ModelParams, j: int) -> float:
    """Linear D coefficient: b_1 = kappa+lam-rho_sv*sigma, b_2 = kappa+lam."""
    _check_j(j)
    return params.alpha - params.rho_sv * params.sigma if j == 1 else params.alpha


def _check_j(j: int) -> None:
    if j not in (1, 2):
        raise InvalidParameter(f"j: measure index must be 1 or 2, got {j}")


def cd_arrays(params: ModelParams, r0: float, tau, phi, j: int):
    """Vectorised (C, D) over broadcastable ``tau`` and real ``phi`` arrays.

    phi = 0 is a removable singularity of h and is special-cased to the
    analytic limit C = D = 0.
    """
    _check_j(j)
    tau = np.asarray(tau, dtype=float)
    phi = np.asarray(phi, dtype=float)
    sigma = params.sigma
    sigma2 = sigma * sigma
    a = params.kappa * params.theta
    bj = b_coeff(params, j)
    zj = zeta(j)

    at_zero = phi == 0.0
    phi_safe = np.where(at_zero, 1.0, phi)

    bb = bj - params.rho_sv * sigma * phi_safe * 1j
    d = np.sqrt(bb * bb - sigma2 * (2.0 * zj * phi_safe * 1j - phi_safe * phi_safe))
    h = (bb - d) / (bb + d)
    e = np.exp(-d * tau)
    log_term = np.log((1.0 - h * e) / (1.0 - h))
    c_val = r0 * phi_safe * 1j * tau + (a / sigma2) * ((bb - d) * tau - 2.0 * log_term)
    d_val = (bb - d) / sigma2 * (1.0 - e) / (1.0 - h * e)

    zero = np.zeros(np.broadcast(tau, phi).shape, dtype=complex)
    c_val = np.where(at_zero, zero, c_val)
    d_val = np.where(at_zero, zero, d_val)
    return c_val, d_val


def closed_form_cd(params: ModelParams, r0: float, tau: float, phi: float, j: int) -> CfCoefficients:
    """Coefficients (C, D) of the constant-rate characteristic function.

    ``r0`` is the constant short rate entering C as r0*phi*i*tau; for the
    beta = 0 model it equals ``params.mu``.  ``phi`` must be real.
    """
    if tau < 0:
        raise InvalidParameter(f"tau: must be >= 0, got {tau}")
    c_val, d_val = cd_arrays(params, r0, tau, phi, j)
    return CfCoefficients(c_val=complex(c_val), d_val=complex(d_val))


def characteristic_fn(params: ModelParams, r0: float, x: float, v: float, tau: float, phi, j: int):
    """f_j = exp(C + D*v + i*phi*x); modulus <= 1 for real phi.

    ``phi`` may be a scalar or an array (vectorised evaluation for the
    quadrature layer).
    """
    if v < 0:
        raise InvalidParameter(f"variance: must be >= 0, got {v}")
    c_val, d_val = cd_arrays(params, r0, tau, phi, j)
    out = np.exp(c_val + d_val * v + 1j * np.asarray(phi, dtype=float) * x)
    return complex(out) if out.ndim == 0 else out
