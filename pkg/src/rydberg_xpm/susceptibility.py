"""Complex EIT susceptibility for a ladder scheme, and propagation to
optical depth and phase.

The medium response to the signal field is

    chi = i chi0 Gamma_e / (Gamma_e - 2i Delta_s
                            + |Omega_c|^2 / (gamma_rg - 2i (Delta_c + Delta_s)))

with chi0 = 2 rho |d_eg|^2 / (epsilon0 hbar Gamma_e) the peak two-level value.
Setting Omega_c = 0 recovers the two-level Lorentzian.  Propagating through a
homogeneous medium of length L gives an optical depth OD = k_s L Im(chi) and a
phase shift phi = k_s L Re(chi) / 2; the intensity transmission is exp(-OD).

Sign conventions: Im(chi) >= 0 is absorption (passive medium); positive
detunings are blue.  The medium is treated as axially homogeneous (box-like
trap) and radial structure is ignored.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS, EPSILON_0, HBAR
from .errors import ExactEITWarning, NoEITFeatureError


@dataclass(frozen=True)
class EITParams:
    """Atomic and drive parameters entering the susceptibility.

    All rates and detunings are angular (rad/s).

    gamma_e:  population decay rate of the intermediate state
    gamma_rg: dephasing rate of the ground-Rydberg coherence
    omega_c:  coupling Rabi frequency (magnitude)
    delta_c:  coupling detuning
    rho:      atomic number density [1/m^3]
    d_eg:     signal-transition dipole matrix element [C m]
    """

    gamma_e: float
    gamma_rg: float
    omega_c: float
    delta_c: float
    rho: float
    d_eg: float

    def __post_init__(self):
        if not self.gamma_e > 0:
            raise ValueError(f"gamma_e must be positive, got {self.gamma_e}")
        if self.gamma_rg < 0:
            raise ValueError(f"gamma_rg must be >= 0, got {self.gamma_rg}")
        if self.omega_c < 0:
            raise ValueError(f"omega_c must be >= 0, got {self.omega_c}")
        if self.rho < 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if not self.d_eg > 0:
            raise ValueError(f"d_eg must be positive, got {self.d_eg}")


@dataclass(frozen=True)
class MediumGeometry:
    """Axial extent of the medium and the signal wave vector."""

    length: float  # axial FWHM of the cloud [m]
    k_s: float = CONSTANTS.k_s  # [1/m]

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if not self.k_s > 0:
            raise ValueError(f"k_s must be positive, got {self.k_s}")


@dataclass(frozen=True)
class SpectrumTable:
    """Row-wise susceptibility spectrum over a signal-detuning grid."""

    delta_s: np.ndarray  # rad/s
    transmission: np.ndarray
    phase: np.ndarray  # rad


def chi0(params: EITParams) -> float:
    """Peak two-level susceptibility magnitude 2 rho |d_eg|^2 / (eps0 hbar Gamma_e)."""
    return 2.0 * params.rho * params.d_eg**2 / (EPSILON_0 * HBAR * params.gamma_e)


def chi(params: EITParams, delta_s):
    """Evaluate the susceptibility at signal detuning(s) ``delta_s`` [rad/s].

    Accepts a scalar or an ndarray and returns a matching complex result.
    At an exact lossless EIT point (gamma_rg = 0 and Delta_c + Delta_s = 0
    with Omega_c > 0) the inner fraction diverges and the analytic limit
    chi = 0 is returned, flagged with :class:`ExactEITWarning`.
    """
    scalar = np.isscalar(delta_s)
    ds = np.asarray(delta_s, dtype=float)
    x0 = chi0(params)
    if params.omega_c == 0.0:
        den = params.gamma_e - 2j * ds
        out = 1j * x0 * params.gamma_e / den
    else:
        inner = params.gamma_rg - 2j * (params.delta_c + ds)
        exact = inner == 0
        inner = np.where(exact, 1.0, inner)  # placeholder, masked below
        with np.errstate(over="ignore", invalid="ignore"):
            coupling = params.omega_c**2 / inner
            # an inner term so small the fraction overflows is numerically an
            # exact transparency point as well; chi -> 0 in that limit
            exact = exact | ~np.isfinite(coupling.real) | ~np.isfinite(coupling.imag)
            coupling = np.where(exact, 0.0, coupling)
            den = params.gamma_e - 2j * ds + coupling
            out = 1j * x0 * params.gamma_e / den
        if np.any(exact):
            warnings.warn(
                "susceptibility evaluated at an exact lossless EIT point; "
                "returning the analytic limit chi = 0",
                ExactEITWarning,
                stacklevel=2,
            )
        out = np.where(exact, 0.0 + 0.0j, out)
    return complex(out[()]) if scalar else out


def two_level(params: EITParams) -> EITParams:
    """The same medium with the coupling beam off (Omega_c = 0)."""
    return EITParams(
        gamma_e=params.gamma_e,
        gamma_rg=params.gamma_rg,
        omega_c=0.0,
        delta_c=0.0,
        rho=params.rho,
        d_eg=params.d_eg,
    )


def od_and_phase(chi_value, geom: MediumGeometry):
    """Optical depth k_s L Im(chi) and phase shift k_s L Re(chi) / 2."""
    kl = geom.k_s * geom.length
    return kl * np.imag(chi_value), kl * np.real(chi_value) / 2.0


def transmission(od):
    """Intensity transmission exp(-OD); underflows cleanly to 0 at huge OD."""
    with np.errstate(under="ignore"):
        return np.exp(-np.asarray(od, dtype=float))[()]


def spectrum(params: EITParams, geom: MediumGeometry, delta_s_grid) -> SpectrumTable:
    """Transmission and phase over a strictly increasing detuning grid."""
    ds = np.atleast_1d(np.asarray(delta_s_grid, dtype=float))
    if ds.size == 0:
        raise ValueError("delta_s_grid must be non-empty")
    if ds.size > 1 and not np.all(np.diff(ds) > 0):
        raise ValueError("delta_s_grid must be strictly increasing")
    od, phase = od_and_phase(chi(params, ds), geom)
    return SpectrumTable(delta_s=ds, transmission=transmission(od), phase=phase)


def _feature_height(params: EITParams, geom: MediumGeometry, ds: float) -> float:
    """Transmission height of the EIT feature above the two-level background."""
    t_eit = transmission(od_and_phase(chi(params, ds), geom)[0])
    t_bg = transmission(od_and_phase(chi(two_level(params), ds), geom)[0])
    return float(t_eit - t_bg)


def transmission_fwhm(
    params: EITParams,
    geom: MediumGeometry,
    min_height: float = 1e-6,
    rel_tol: float = 1e-6,
) -> float:
    """Full width at half maximum of the EIT transmission feature [rad/s].

    The feature height is measured relative to the two-level background at
    the same detuning.  The peak is located next to the two-photon resonance
    Delta_s = -Delta_c and the half-height crossings are found by bisection
    on each side of it.

    Raises NoEITFeatureError when the coupling beam is off or the peak does
    not exceed the background by ``min_height``.
    """
    from scipy.optimize import brentq, minimize_scalar

    if params.omega_c == 0.0:
        raise NoEITFeatureError("no EIT feature: omega_c = 0")
    # the transparency feature lies between the dressed absorption lines at
    # roughly +-omega_c/2 around the two-photon resonance
    center = -params.delta_c
    half_span = 0.5 * max(params.omega_c, params.gamma_e)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExactEITWarning)
        grid = np.linspace(center - half_span, center + half_span, 401)
        heights = np.array([_feature_height(params, geom, d) for d in grid])
        i_pk = int(np.argmax(heights))
        lo = grid[max(i_pk - 1, 0)]
        hi = grid[min(i_pk + 1, grid.size - 1)]
        res = minimize_scalar(
            lambda d: -_feature_height(params, geom, d),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": rel_tol * params.gamma_e * 1e-4},
        )
        peak = float(res.x)
        h_peak = -float(res.fun)
        if not h_peak > min_height:
            raise NoEITFeatureError(
                f"no EIT feature: peak height {h_peak:.3e} above background "
                f"is below the measurable margin {min_height:.1e}"
            )
        half = h_peak / 2.0
        center = peak

        def g(ds: float) -> float:
            return _feature_height(params, geom, ds) - half

        edges = []
        for direction in (-1.0, +1.0):
            step = params.gamma_e / 16.0
            a = center
            b = center + direction * step
            for _ in range(200):
                if g(b) < 0.0:
                    break
                a = b
                step *= 2.0
                b = center + direction * step
            else:
                raise NoEITFeatureError("EIT feature has no half-height crossing")
            lo, hi = (a, b) if a < b else (b, a)
            edges.append(
                brentq(g, lo, hi, xtol=rel_tol * params.gamma_e * 1e-3, rtol=1e-14)
            )
    width = abs(edges[1] - edges[0])
    return width
