"""Run configuration: one self-describing JSON document.

All physical defaults equal the modeled experiment's values (see
``defaults``); frequencies are plain MHz, lengths um, densities cm^-3 --
conversion to angular/SI units happens here and nowhere else.  Unknown keys
are rejected with the dotted path of the offending key.
"""

from __future__ import annotations

import copy
import json
import math
from typing import Any

import numpy as np

from . import defaults
from .blockade import BlockadeParams
from .constants import TWO_PI, angular_from_mhz, c6_from_atomic_units
from .errors import ConfigError
from .fitting import FitParameters
from .photostatistics import ExperimentConfig
from .susceptibility import EITParams, MediumGeometry

_POS = ("positive", lambda v: v > 0)
_NONNEG = ("non-negative", lambda v: v >= 0)
_UNIT = ("in [0, 1]", lambda v: 0.0 <= v <= 1.0)
_ANY = ("finite", lambda v: True)

# section -> key -> (python types, (description, predicate))
_SCHEMA: dict[str, dict[str, tuple[tuple[type, ...], tuple]]] = {
    "physics": {
        "excited_lifetime_ns": ((int, float), _POS),
        "gamma_rg_mhz": ((int, float), _NONNEG),
        "omega_c_mhz": ((int, float), _NONNEG),
        "delta_c_mhz": ((int, float), _ANY),
        "delta_s_mhz": ((int, float), _ANY),
        "density_cm3": ((int, float), _POS),
        "dipole_moment_cm": ((int, float), _POS),
        "signal_wavelength_nm": ((int, float), _POS),
    },
    "geometry": {
        "length_um": ((int, float), _POS),
        "excitation_z_um": ((int, float), _NONNEG),
    },
    "blockade": {
        "c6_atomic_units": ((int, float), _NONNEG),
        "sign_reversed": ((bool,), _ANY),
    },
    "spectrum_grid": {
        "min_mhz": ((int, float), _ANY),
        "max_mhz": ((int, float), _ANY),
        "points": ((int,), _POS),
    },
    "density_grid": {
        "min_cm3": ((int, float), _POS),
        "max_cm3": ((int, float), _POS),
        "points": ((int,), _POS),
    },
    "statistics": {
        "mean_photons_control": ((int, float), _NONNEG),
        "mean_photons_target": ((int, float), _NONNEG),
        "detection_efficiency": ((int, float), _UNIT),
        "storage_retrieval_efficiency_zero_delay": ((int, float), _UNIT),
        "storage_retrieval_efficiency_delayed": ((int, float), _UNIT),
        "delayed_at_us": ((int, float), _POS),
        "delay_us": ((int, float), _NONNEG),
        "repetitions": ((int,), _POS),
        "rng_seed": ((int,), _NONNEG),
        "postselect": ((bool,), _ANY),
        "basis_mode": ((str,), ("'round_robin' or 'random'",
                                lambda v: v in ("round_robin", "random"))),
        "sigma_plus_suppression": ((int, float), ("greater than 1", lambda v: v > 1)),
        "coherence_factor": ((int, float), _UNIT),
    },
    "fit": {
        "initial_od_res": ((int, float), _POS),
        "initial_omega_c_mhz": ((int, float), _POS),
        "initial_gamma_rg_mhz": ((int, float), _POS),
        "initial_delta_c_mhz": ((int, float), _ANY),
        "include_phase": ((bool,), _ANY),
        "max_iterations": ((int,), _POS),
    },
    "retrieval_grid": {
        "max_us": ((int, float), _POS),
        "points": ((int,), _POS),
    },
}

DEFAULT_CONFIG: dict[str, dict[str, Any]] = {
    "physics": {
        "excited_lifetime_ns": defaults.EXCITED_LIFETIME_NS,
        "gamma_rg_mhz": defaults.GAMMA_RG_MHZ,
        "omega_c_mhz": defaults.OMEGA_C_MHZ,
        "delta_c_mhz": defaults.DELTA_C_MHZ,
        "delta_s_mhz": defaults.DELTA_S_OPERATING_MHZ,
        "density_cm3": defaults.DENSITY_CM3,
        "dipole_moment_cm": 2.534e-29,
        "signal_wavelength_nm": 780.0,
    },
    "geometry": {
        "length_um": defaults.LENGTH_UM,
        "excitation_z_um": defaults.LENGTH_UM / 2.0,
    },
    "blockade": {
        "c6_atomic_units": defaults.C6_ATOMIC_UNITS,
        "sign_reversed": False,
    },
    "spectrum_grid": {"min_mhz": -30.0, "max_mhz": 30.0, "points": 241},
    "density_grid": {"min_cm3": 2.0e11, "max_cm3": 1.8e12, "points": 9},
    "statistics": {
        "mean_photons_control": 0.6,
        "mean_photons_target": 0.9,
        "detection_efficiency": 0.25,
        "storage_retrieval_efficiency_zero_delay": 0.2,
        "storage_retrieval_efficiency_delayed": 0.07,
        "delayed_at_us": 4.5,
        "delay_us": 0.0,
        "repetitions": 60000,
        "rng_seed": 12345,
        "postselect": True,
        "basis_mode": "round_robin",
        "sigma_plus_suppression": 15.0,
        # phenomenological; reproduces the measured fringe visibility 0.75
        "coherence_factor": 0.75,
    },
    "fit": {
        "initial_od_res": 30.0,
        "initial_omega_c_mhz": 12.0,
        "initial_gamma_rg_mhz": 0.3,
        "initial_delta_c_mhz": 9.0,
        "include_phase": False,
        "max_iterations": 500,
    },
    "retrieval_grid": {"max_us": 10.0, "points": 101},
}


def _validate(raw: dict, schema=None, prefix: str = "") -> None:
    if schema is None:
        schema = _SCHEMA
    if not isinstance(raw, dict):
        raise ConfigError(prefix.rstrip(".") or "<root>", "expected a JSON object")
    for key, value in raw.items():
        path = f"{prefix}{key}"
        if key not in schema:
            raise ConfigError(path, "unknown key")
        spec = schema[key]
        if isinstance(spec, dict):
            _validate(value, spec, prefix=f"{path}.")
            continue
        types, (desc, pred) = spec
        # bool is an int subclass; keep the two distinct
        if isinstance(value, bool) and bool not in types:
            raise ConfigError(path, f"expected {types[0].__name__}, got bool")
        if not isinstance(value, types):
            raise ConfigError(
                path, f"expected {'/'.join(t.__name__ for t in types)}, "
                f"got {type(value).__name__}"
            )
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            if not math.isfinite(value):
                raise ConfigError(path, "must be finite")
        if not pred(value):
            raise ConfigError(path, f"must be {desc} (got {value!r})")


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


class RunConfig:
    """Validated, fully merged run configuration."""

    def __init__(self, overrides: dict | None = None):
        overrides = overrides or {}
        _validate(overrides)
        self.raw = _merge(DEFAULT_CONFIG, overrides)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON in {path}: {exc}") from exc
        return cls(data)

    # -- object builders ----------------------------------------------------

    def eit_params(self, rho: float | None = None) -> EITParams:
        p = self.raw["physics"]
        return EITParams(
            gamma_e=1.0 / (p["excited_lifetime_ns"] * 1e-9),
            gamma_rg=angular_from_mhz(p["gamma_rg_mhz"]),
            omega_c=angular_from_mhz(p["omega_c_mhz"]),
            delta_c=angular_from_mhz(p["delta_c_mhz"]),
            rho=p["density_cm3"] * 1e6 if rho is None else rho,
            d_eg=p["dipole_moment_cm"],
        )

    def geometry(self) -> MediumGeometry:
        g = self.raw["geometry"]
        lam = self.raw["physics"]["signal_wavelength_nm"] * 1e-9
        return MediumGeometry(length=g["length_um"] * 1e-6, k_s=TWO_PI / lam)

    def blockade(self) -> BlockadeParams:
        b = self.raw["blockade"]
        return BlockadeParams(
            c6=c6_from_atomic_units(b["c6_atomic_units"]),
            excitation_z=self.raw["geometry"]["excitation_z_um"] * 1e-6,
            sign_reversed=b["sign_reversed"],
        )

    @property
    def delta_s(self) -> float:
        return angular_from_mhz(self.raw["physics"]["delta_s_mhz"])

    def spectrum_grid(self) -> np.ndarray:
        g = self.raw["spectrum_grid"]
        if g["points"] > 1 and not g["max_mhz"] > g["min_mhz"]:
            raise ConfigError("spectrum_grid.max_mhz", "must exceed min_mhz")
        return angular_from_mhz(1.0) * np.linspace(g["min_mhz"], g["max_mhz"], g["points"])

    def density_grid(self) -> np.ndarray:
        g = self.raw["density_grid"]
        if g["points"] > 1 and not g["max_cm3"] > g["min_cm3"]:
            raise ConfigError("density_grid.max_cm3", "must exceed min_cm3")
        return 1e6 * np.linspace(g["min_cm3"], g["max_cm3"], g["points"])

    def experiment(self) -> ExperimentConfig:
        s = self.raw["statistics"]
        return ExperimentConfig(
            mean_photons_control=s["mean_photons_control"],
            mean_photons_target=s["mean_photons_target"],
            detection_efficiency=s["detection_efficiency"],
            storage_retrieval_efficiency_zero_delay=s[
                "storage_retrieval_efficiency_zero_delay"
            ],
            storage_retrieval_efficiency_delayed=s[
                "storage_retrieval_efficiency_delayed"
            ],
            delayed_at=s["delayed_at_us"] * 1e-6,
            delay=s["delay_us"] * 1e-6,
            repetitions=s["repetitions"],
            rng_seed=s["rng_seed"],
            basis_mode=s["basis_mode"],
            sigma_plus_suppression=s["sigma_plus_suppression"],
            coherence_factor=s["coherence_factor"],
        )

    def fit_initial(self) -> FitParameters:
        f = self.raw["fit"]
        return FitParameters(
            od_res=f["initial_od_res"],
            omega_c=angular_from_mhz(f["initial_omega_c_mhz"]),
            gamma_rg=angular_from_mhz(f["initial_gamma_rg_mhz"]),
            delta_c=angular_from_mhz(f["initial_delta_c_mhz"]),
        )
