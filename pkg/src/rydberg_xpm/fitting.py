"""Nonlinear least-squares fitting of transmission (and optionally phase)
spectra to the ladder-EIT model.

The free parameters are the resonant optical depth lump od_res = k_s L chi0
(degenerate product of density, length and dipole moment), the coupling Rabi
frequency, the ground-Rydberg dephasing rate and the coupling detuning
offset.  Positive-definite parameters are fitted in log space so bounds stay
implicit; the detuning is fitted in units of gamma_e for conditioning.

Minimization is a damped Gauss-Newton (Levenberg-Marquardt) iteration with a
central-difference Jacobian (step 1e-6 (1 + |u|) per component), declared
converged when the relative cost change drops below 1e-10 or the gradient
infinity-norm below 1e-8.  The parameter covariance is (J^T J)^-1 at the
optimum, mapped back to physical units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import EPSILON_0, HBAR, RB87_D2_CYCLING_DIPOLE
from .errors import DegenerateJacobianError, FitNonConvergenceError
from .susceptibility import EITParams, MediumGeometry, SpectrumTable, spectrum

GAMMA_E_DEFAULT = 1.0 / 26e-9  # rad/s, intermediate-state decay rate
_COST_RTOL = 1e-10
_GRAD_TOL = 1e-8
_FD_SCALE = 1e-6
_LAMBDA_INIT = 1e-3
_LAMBDA_MAX = 1e12


@dataclass(frozen=True)
class SpectrumData:
    """Measured spectrum rows; phase rows are optional."""

    delta_s: np.ndarray  # rad/s, strictly increasing
    transmission: np.ndarray
    sigma: np.ndarray
    phase: np.ndarray | None = None
    phase_sigma: np.ndarray | None = None

    def __post_init__(self):
        ds = np.asarray(self.delta_s, dtype=float)
        if ds.size < 8:
            raise ValueError("need at least 8 spectrum points")
        if not np.all(np.diff(ds) > 0):
            raise ValueError("delta_s must be strictly increasing")
        if np.any(np.asarray(self.sigma) <= 0):
            raise ValueError("sigma must be positive")
        if (self.phase is None) != (self.phase_sigma is None):
            raise ValueError("phase and phase_sigma must be given together")
        if self.phase is not None and np.any(np.asarray(self.phase_sigma) <= 0):
            raise ValueError("phase_sigma must be positive")


@dataclass(frozen=True)
class FitParameters:
    """Physical parameter vector of the spectrum model."""

    od_res: float  # resonant two-level optical depth k_s L chi0
    omega_c: float  # rad/s
    gamma_rg: float  # rad/s
    delta_c: float  # rad/s

    def as_array(self) -> np.ndarray:
        return np.array([self.od_res, self.omega_c, self.gamma_rg, self.delta_c])


@dataclass(frozen=True)
class FitResult:
    params: FitParameters
    stderr: FitParameters
    covariance: np.ndarray  # 4x4, physical units, order (od_res, omega_c, gamma_rg, delta_c)
    reduced_chisq: float
    iterations: int
    final_damping: float
    gradient_norm: float
    converged: bool


def params_to_eit(
    params: FitParameters,
    gamma_e: float = GAMMA_E_DEFAULT,
    geom: MediumGeometry | None = None,
    d_eg: float = RB87_D2_CYCLING_DIPOLE,
) -> tuple[EITParams, MediumGeometry]:
    """Build model inputs whose resonant optical depth equals od_res."""
    if geom is None:
        geom = MediumGeometry(length=61e-6)
    chi0_target = params.od_res / (geom.k_s * geom.length)
    rho = chi0_target * EPSILON_0 * HBAR * gamma_e / (2.0 * d_eg**2)
    eit = EITParams(
        gamma_e=gamma_e,
        gamma_rg=params.gamma_rg,
        omega_c=params.omega_c,
        delta_c=params.delta_c,
        rho=rho,
        d_eg=d_eg,
    )
    return eit, geom


def predict(
    params: FitParameters,
    delta_s_grid,
    gamma_e: float = GAMMA_E_DEFAULT,
    geom: MediumGeometry | None = None,
) -> SpectrumTable:
    """Forward model spectrum; shares the susceptibility code path."""
    eit, geom = params_to_eit(params, gamma_e=gamma_e, geom=geom)
    return spectrum(eit, geom, delta_s_grid)


def _encode(p: FitParameters, gamma_e: float) -> np.ndarray:
    if min(p.od_res, p.omega_c, p.gamma_rg) <= 0:
        raise ValueError("od_res, omega_c and gamma_rg must be positive to fit")
    return np.array(
        [math.log(p.od_res), math.log(p.omega_c), math.log(p.gamma_rg),
         p.delta_c / gamma_e]
    )


def _decode(u: np.ndarray, gamma_e: float) -> FitParameters:
    return FitParameters(
        od_res=math.exp(u[0]),
        omega_c=math.exp(u[1]),
        gamma_rg=math.exp(u[2]),
        delta_c=u[3] * gamma_e,
    )


def finite_difference_jacobian(
    fun, u: np.ndarray, central: bool = True, h_scale: float = _FD_SCALE
) -> np.ndarray:
    """Numerically differenced Jacobian, step h_scale (1 + |u_i|) per parameter."""
    r0 = fun(u)
    jac = np.empty((r0.size, u.size))
    for i in range(u.size):
        h = h_scale * (1.0 + abs(u[i]))
        up = u.copy()
        up[i] += h
        if central:
            um = u.copy()
            um[i] -= h
            jac[:, i] = (fun(up) - fun(um)) / (2.0 * h)
        else:
            jac[:, i] = (fun(up) - r0) / h
    return jac


def fit_spectrum(
    data: SpectrumData,
    initial: FitParameters,
    bounds: tuple[FitParameters, FitParameters] | None = None,
    include_phase: bool = False,
    max_iterations: int = 500,
    gamma_e: float = GAMMA_E_DEFAULT,
    geom: MediumGeometry | None = None,
) -> FitResult:
    """Weighted least-squares fit of the spectrum model.

    Raises FitNonConvergenceError (carrying the best point so far) at the
    iteration cap and DegenerateJacobianError when the normal equations are
    singular.
    """
    if include_phase and data.phase is None:
        raise ValueError("include_phase requires phase rows in the data")
    lo = hi = None
    if bounds is not None:
        lo = _encode(bounds[0], gamma_e)
        hi = _encode(bounds[1], gamma_e)
        u0 = _encode(initial, gamma_e)
        if np.any(u0 < lo) or np.any(u0 > hi):
            raise ValueError("initial parameters must lie within bounds")

    t_data = np.asarray(data.transmission, dtype=float)
    t_sigma = np.asarray(data.sigma, dtype=float)

    def residuals(u: np.ndarray) -> np.ndarray:
        table = predict(_decode(u, gamma_e), data.delta_s, gamma_e=gamma_e, geom=geom)
        r = (table.transmission - t_data) / t_sigma
        if include_phase:
            r_ph = (table.phase - np.asarray(data.phase)) / np.asarray(data.phase_sigma)
            r = np.concatenate((r, r_ph))
        return r

    def clamp(u: np.ndarray) -> np.ndarray:
        if lo is None:
            return u
        return np.clip(u, lo, hi)

    u = clamp(_encode(initial, gamma_e))
    r = residuals(u)
    cost = float(r @ r)
    lam = _LAMBDA_INIT
    grad_norm = math.inf
    converged = False
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        jac = finite_difference_jacobian(residuals, u)
        grad = jac.T @ r
        grad_norm = float(np.max(np.abs(grad)))
        if grad_norm < _GRAD_TOL:
            converged = True
            break
        hess = jac.T @ jac
        diag = np.diag(hess).copy()
        if np.any(diag <= 0.0) or not np.all(np.isfinite(diag)):
            raise DegenerateJacobianError(
                "a parameter has no effect on the model (zero Jacobian column)"
            )
        accepted = False
        while lam <= _LAMBDA_MAX:
            try:
                step = np.linalg.solve(hess + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError as exc:
                raise DegenerateJacobianError(str(exc)) from exc
            u_try = clamp(u + step)
            r_try = residuals(u_try)
            cost_try = float(r_try @ r_try)
            if math.isfinite(cost_try) and cost_try <= cost:
                rel_drop = (cost - cost_try) / max(cost, 1e-300)
                u, r, cost = u_try, r_try, cost_try
                lam = max(lam / 3.0, 1e-14)
                accepted = True
                if rel_drop < _COST_RTOL:
                    converged = True
                break
            lam *= 10.0
        if converged:
            break
        if not accepted:
            # damping exhausted without improvement: local optimum reached
            converged = grad_norm < 1e-3 * max(1.0, math.sqrt(cost))
            break

    params = _decode(u, gamma_e)
    jac = finite_difference_jacobian(residuals, u)
    grad_norm = float(np.max(np.abs(jac.T @ r)))
    hess = jac.T @ jac
    try:
        cov_u = np.linalg.inv(hess)
    except np.linalg.LinAlgError as exc:
        raise DegenerateJacobianError(str(exc)) from exc
    # map covariance from internal to physical coordinates
    scale = np.array([params.od_res, params.omega_c, params.gamma_rg, gamma_e])
    cov = cov_u * np.outer(scale, scale)
    n_res = r.size
    red_chisq = cost / max(n_res - 4, 1)
    stderr_vec = np.sqrt(np.maximum(np.diag(cov), 0.0))
    result = FitResult(
        params=params,
        stderr=FitParameters(*stderr_vec),
        covariance=cov,
        reduced_chisq=float(red_chisq),
        iterations=iterations,
        final_damping=float(lam),
        gradient_norm=grad_norm,
        converged=converged,
    )
    if not converged:
        raise FitNonConvergenceError(result)
    return result
