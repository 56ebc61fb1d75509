"""Effect of one stored Rydberg excitation on the target susceptibility.

A stored excitation at distance r shifts the Rydberg pair state by the van
der Waals potential V = -C6/r^6 (attractive for C6 > 0), which moves the
two-photon resonance of the target transition.  The shift enters the
susceptibility by substituting

    Delta_c + Delta_s  ->  Delta_c + Delta_s - V(r)/hbar

in the two-photon term, so the EIT feature is pushed to smaller signal
detuning as r shrinks.  Geometry is one-dimensional along the propagation
axis: r = |z - z0| with z0 the position of the stored excitation.

The controlled phase shift is the difference between the propagation phase
with and without a stored excitation; a hard-sphere estimate replaces the
gradual r^-6 crossover with a fully blockaded slab of length 2 R_b.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .constants import HBAR
from .errors import BlockadeClampWarning, QuadratureError
from .susceptibility import EITParams, MediumGeometry, chi, chi0, od_and_phase

# vdW shifts larger than this are numerically indistinguishable from the
# fully blockaded (two-level) limit and would overflow the inner fraction
_SHIFT_CAP = 1e25  # rad/s


@dataclass(frozen=True)
class BlockadeParams:
    """Interaction constant and geometry of the stored excitation.

    c6 > 0 corresponds to the attractive pair potential V = -C6/r^6.
    ``sign_reversed`` flips the signs of both detunings (Delta_s and Delta_c)
    to probe the asymmetry of the blockade-shifted response; the interaction
    itself is unchanged.
    """

    c6: float  # [J m^6]
    excitation_z: float  # [m], position of the stored excitation on the axis
    sign_reversed: bool = False

    def __post_init__(self):
        if self.c6 < 0:
            raise ValueError(f"c6 must be >= 0, got {self.c6}")


def vdw_shift(c6: float, r: float) -> float:
    """Pair-state shift V/hbar = -c6/(hbar r^6) [rad/s] at distance r."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    return -c6 / (HBAR * r**6)


def blockade_radius(c6: float, delta_t: float) -> float:
    """Radius where the |vdW shift| equals the EIT linewidth delta_t [rad/s]."""
    if not delta_t > 0:
        raise ValueError(f"delta_t must be positive, got {delta_t}")
    return (abs(c6) / (HBAR * delta_t)) ** (1.0 / 6.0)


def _signed(params: EITParams, blk: BlockadeParams, delta_s: float):
    """Apply the sign_reversed flag to (delta_s, delta_c)."""
    if blk.sign_reversed:
        return -delta_s, replace(params, delta_c=-params.delta_c)
    return delta_s, params


def chi_blockaded(
    params: EITParams, blk: BlockadeParams, delta_s: float, r: float
) -> complex:
    """Susceptibility at distance r from the stored excitation.

    For r -> infinity this reproduces chi(params, delta_s); for r -> 0 the
    diverging shift suppresses the coupling term and the two-level value is
    returned.
    """
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    ds, p = _signed(params, blk, delta_s)
    try:
        r6 = r**6
        shift = blk.c6 / (HBAR * r6) if r6 > 0.0 else math.inf
    except OverflowError:
        shift = math.inf
    gamma_e = p.gamma_e
    if p.omega_c == 0.0 or not math.isfinite(shift) or shift > _SHIFT_CAP:
        return 1j * chi0(p) * gamma_e / (gamma_e - 2j * ds)
    inner = p.gamma_rg - 2j * (p.delta_c + ds + shift)
    if inner == 0:
        return 0j  # exact transparency at the shifted two-photon resonance
    coupling = p.omega_c**2 / inner
    if not (math.isfinite(coupling.real) and math.isfinite(coupling.imag)):
        return 0j
    den = gamma_e - 2j * ds + coupling
    return 1j * chi0(p) * gamma_e / den


def integrated_phase(
    params: EITParams,
    geom: MediumGeometry,
    blk: BlockadeParams,
    delta_s: float,
    n_excitations: int,
    rel_tol: float = 1e-6,
) -> tuple[float, float]:
    """(OD, phase) of the target after the full medium, with 0 or 1 stored
    excitations.

    n = 0 is the uniform medium; n = 1 integrates the radius-resolved
    susceptibility along the axis with r = |z - z0|, by adaptive quadrature
    with the r^-6 feature bracketed, to relative tolerance ``rel_tol``.
    """
    if n_excitations not in (0, 1):
        raise ValueError("n_excitations must be 0 or 1")
    if n_excitations == 0:
        ds, p = _signed(params, blk, delta_s)
        od, phase = od_and_phase(chi(p, ds), geom)
        return float(od), float(phase)

    z0 = blk.excitation_z
    length = geom.length
    if not 0.0 <= z0 <= length:
        raise ValueError(
            f"excitation_z = {z0} must lie within the medium [0, {length}]"
        )

    # bracket the crossover: radii where the shift equals 0.1x..10x the
    # larger of the decay rate and the operating two-photon detuning
    w_ref = max(params.gamma_e, abs(params.delta_c + delta_s), params.gamma_rg)
    breaks = {z0}
    if blk.c6 > 0:
        for w in (0.1 * w_ref, w_ref, 10.0 * w_ref):
            r_w = blockade_radius(blk.c6, w)
            breaks.update((z0 - r_w, z0 + r_w))
    points = sorted(p for p in breaks if 0.0 < p < length)

    def integrand_re(z: float) -> float:
        return chi_blockaded(params, blk, delta_s, max(abs(z - z0), 1e-300)).real

    def integrand_im(z: float) -> float:
        return chi_blockaded(params, blk, delta_s, max(abs(z - z0), 1e-300)).imag

    # ask for two digits beyond the contract, within QUADPACK's floor
    epsrel = max(rel_tol * 1e-2, 1e-13)
    results = []
    for f in (integrand_im, integrand_re):
        val, err = quad(f, 0.0, length, points=points, limit=500, epsabs=0.0,
                        epsrel=epsrel)
        scale = max(abs(val), 1e-12 * length)
        if err > rel_tol * scale:
            raise QuadratureError(achieved=err / scale, requested=rel_tol)
        results.append(val)
    od = geom.k_s * results[0]
    phase = geom.k_s * results[1] / 2.0
    return float(od), float(phase)


def hard_sphere_controlled_phase(
    r_b: float,
    geom: MediumGeometry,
    phase_two_level: float,
    phase_eit: float,
) -> float:
    """Hard-sphere estimate (2 R_b / L) * (phase_two_level - phase_eit).

    The two phase arguments are full-medium propagation phases of the
    two-level and EIT configurations at the operating detuning.  When the
    blockade sphere exceeds the medium (2 R_b > L) the fraction is clamped
    to 1 and a BlockadeClampWarning is emitted.
    """
    if r_b < 0:
        raise ValueError(f"r_b must be >= 0, got {r_b}")
    frac = 2.0 * r_b / geom.length
    if frac > 1.0:
        warnings.warn(
            "blockade sphere exceeds the medium; clamping 2 R_b to L",
            BlockadeClampWarning,
            stacklevel=2,
        )
        frac = 1.0
    return frac * (phase_two_level - phase_eit)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    max_rel_residual: float


@dataclass(frozen=True)
class DensityScan:
    """Controlled phase versus atomic density, with linear fits."""

    rho: np.ndarray  # [1/m^3]
    phase0: np.ndarray
    phase1: np.ndarray
    controlled_phase: np.ndarray
    fit_phase0: LinearFit
    fit_phase1: LinearFit
    fit_controlled: LinearFit


def _linear_fit(x: np.ndarray, y: np.ndarray) -> LinearFit:
    if x.size == 1:
        # single point: the model is linear through the origin
        return LinearFit(float(y[0] / x[0]), 0.0, 0.0)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    scale = max(np.max(np.abs(y)), 1e-300)
    return LinearFit(float(slope), float(intercept), float(np.max(np.abs(resid)) / scale))


def density_scan(
    base: EITParams,
    geom: MediumGeometry,
    blk: BlockadeParams,
    delta_s: float,
    rho_grid,
) -> DensityScan:
    """Evaluate phases with and without a stored excitation on a density grid."""
    rho = np.asarray(rho_grid, dtype=float)
    if rho.size == 0:
        raise ValueError("rho_grid must be non-empty")
    if np.any(rho <= 0):
        raise ValueError("rho_grid entries must be positive")
    phase0 = np.empty(rho.size)
    phase1 = np.empty(rho.size)
    for i, r in enumerate(rho):
        p = replace(base, rho=float(r))
        _, phase0[i] = integrated_phase(p, geom, blk, delta_s, 0)
        _, phase1[i] = integrated_phase(p, geom, blk, delta_s, 1)
    ctrl = phase1 - phase0
    return DensityScan(
        rho=rho,
        phase0=phase0,
        phase1=phase1,
        controlled_phase=ctrl,
        fit_phase0=_linear_fit(rho, phase0),
        fit_phase1=_linear_fit(rho, phase1),
        fit_controlled=_linear_fit(rho, ctrl),
    )
