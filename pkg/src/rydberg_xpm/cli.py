"""Command-line interface.

Subcommands: spectrum | blockade-phase | density-scan | tomography | fit |
retrieval.  All physical and statistical parameters come from one JSON
config (--config); flags exist only for file paths, the seed override and
subcommand selection.  Outputs are CSV (header row, 17 significant digits)
and JSON (with a config_echo block and the tool version), written
atomically.  Identical config and seed produce byte-identical outputs.

Exit codes: 0 success, 2 config error, 3 numerical failure,
4 insufficient statistics.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings

import numpy as np

from . import __version__
from .blockade import (
    blockade_radius,
    density_scan,
    hard_sphere_controlled_phase,
    integrated_phase,
)
from .config import RunConfig
from .constants import angular_from_mhz, mhz_from_angular
from .errors import (
    ConfigError,
    DegenerateJacobianError,
    FitNonConvergenceError,
    InsufficientStatisticsError,
    NoEITFeatureError,
    QuadratureError,
    RydbergXPMError,
)
from .fitting import SpectrumData, fit_spectrum
from .photostatistics import (
    estimate_stokes,
    retrieval_efficiency,
    simulate_batch,
    truth_stokes,
)
from .polarization import balanced_input_state, visibility
from .susceptibility import spectrum, transmission_fwhm, two_level

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_STATISTICS = 4


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header: list[str], columns: list[np.ndarray]) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_json(path: str, payload: dict, cfg: RunConfig) -> None:
    payload = dict(payload)
    payload["config_echo"] = cfg.raw
    payload["version"] = __version__
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_spectrum(cfg: RunConfig, outdir: str) -> int:
    params = cfg.eit_params()
    geom = cfg.geometry()
    grid = cfg.spectrum_grid()
    eit = spectrum(params, geom, grid)
    ref = spectrum(two_level(params), geom, grid)
    _write_csv(
        os.path.join(outdir, "spectrum.csv"),
        ["delta_s_mhz", "transmission_eit", "phase_eit_rad",
         "transmission_two_level", "phase_two_level_rad"],
        [grid / (2e6 * math.pi), np.atleast_1d(eit.transmission),
         np.atleast_1d(eit.phase), np.atleast_1d(ref.transmission),
         np.atleast_1d(ref.phase)],
    )
    try:
        delta_t_mhz = mhz_from_angular(transmission_fwhm(params, geom))
    except NoEITFeatureError:
        delta_t_mhz = None
    ds_op = cfg.delta_s
    op = spectrum(params, geom, [ds_op])
    op_ref = spectrum(two_level(params), geom, [ds_op])
    summary = {
        "delta_t_mhz": delta_t_mhz,
        "operating_delta_s_mhz": cfg.raw["physics"]["delta_s_mhz"],
        "phi0_at_operating_rad": float(op.phase[0]),
        "transmission_at_operating": float(op.transmission[0]),
        "phi_two_level_at_operating_rad": float(op_ref.phase[0]),
    }
    _write_json(os.path.join(outdir, "spectrum_summary.json"), summary, cfg)
    return EXIT_OK


def _phase_block(cfg: RunConfig, sign_reversed: bool) -> dict:
    params = cfg.eit_params()
    geom = cfg.geometry()
    blk = cfg.blockade()
    from dataclasses import replace

    blk = replace(blk, sign_reversed=sign_reversed)
    od0, phi0 = integrated_phase(params, geom, blk, cfg.delta_s, 0)
    od1, phi1 = integrated_phase(params, geom, blk, cfg.delta_s, 1)
    return {
        "od0": od0,
        "phi0_rad": phi0,
        "od1": od1,
        "phi1_rad": phi1,
        "controlled_phase_rad": phi1 - phi0,
    }


def cmd_blockade_phase(cfg: RunConfig, outdir: str) -> int:
    params = cfg.eit_params()
    geom = cfg.geometry()
    blk = cfg.blockade()
    try:
        delta_t = transmission_fwhm(params, geom)
        delta_t_mhz = mhz_from_angular(delta_t)
    except NoEITFeatureError:
        delta_t = None
        delta_t_mhz = None
    r_b = blockade_radius(blk.c6, delta_t) if (delta_t and blk.c6 > 0) else 0.0
    ds_op = cfg.delta_s
    eit_tab = spectrum(params, geom, [ds_op])
    ref_tab = spectrum(two_level(params), geom, [ds_op])
    phi_eit = float(eit_tab.phase[0])
    phi_ref = float(ref_tab.phase[0])
    hard_sphere = hard_sphere_controlled_phase(r_b, geom, phi_ref, phi_eit)
    forward = _phase_block(cfg, sign_reversed=False)
    reverse = _phase_block(cfg, sign_reversed=True)
    ratio = (
        abs(forward["controlled_phase_rad"]) / abs(reverse["controlled_phase_rad"])
        if reverse["controlled_phase_rad"] != 0
        else None
    )
    payload = {
        "delta_t_mhz": delta_t_mhz,
        "blockade_radius_um": r_b * 1e6,
        "phi_eit_rad": phi_eit,
        "phi_two_level_rad": phi_ref,
        "phase_difference_rad": phi_ref - phi_eit,
        "hard_sphere_controlled_phase_rad": hard_sphere,
        "integral": forward,
        "integral_sign_reversed": reverse,
        "forward_to_reversed_ratio": ratio,
    }
    _write_json(os.path.join(outdir, "blockade_phase.json"), payload, cfg)
    return EXIT_OK


def cmd_density_scan(cfg: RunConfig, outdir: str) -> int:
    scan = density_scan(
        cfg.eit_params(), cfg.geometry(), cfg.blockade(), cfg.delta_s,
        cfg.density_grid(),
    )
    _write_csv(
        os.path.join(outdir, "density_scan.csv"),
        ["rho_cm3", "phase0_rad", "phase1_rad", "controlled_phase_rad"],
        [scan.rho / 1e6, scan.phase0, scan.phase1, scan.controlled_phase],
    )
    def fit_dict(fit):
        return {
            "slope_rad_per_cm3": fit.slope * 1e6,
            "intercept_rad": fit.intercept,
            "max_rel_residual": fit.max_rel_residual,
        }

    payload = {
        "fit_phase0": fit_dict(scan.fit_phase0),
        "fit_phase1": fit_dict(scan.fit_phase1),
        "fit_controlled_phase": fit_dict(scan.fit_controlled),
        "controlled_phase_at_max_density_rad": float(scan.controlled_phase[-1]),
    }
    _write_json(os.path.join(outdir, "density_scan.json"), payload, cfg)
    return EXIT_OK


def cmd_tomography(cfg: RunConfig, outdir: str) -> int:
    params = cfg.eit_params()
    geom = cfg.geometry()
    blk = cfg.blockade()
    od0, phi0 = integrated_phase(params, geom, blk, cfg.delta_s, 0)
    od1, phi1 = integrated_phase(params, geom, blk, cfg.delta_s, 1)
    exp_cfg = cfg.experiment()
    input_state = balanced_input_state(od1)
    batch = simulate_batch(exp_cfg, (od0, phi0, od1, phi1), input_state)
    summary = estimate_stokes(batch, postselect=cfg.raw["statistics"]["postselect"])
    est = summary.stokes
    truth = truth_stokes(exp_cfg, od1, phi1, input_state)
    payload = {
        "stokes_estimate": {"s_hv": est.s_hv, "s_da": est.s_da, "s_lr": est.s_lr},
        "stokes_stderr": {
            "s_hv": summary.stderr[0],
            "s_da": summary.stderr[1],
            "s_lr": summary.stderr[2],
        },
        "counts": {k: list(v) for k, v in summary.counts.items()},
        "azimuth_rad": est.phi,
        "visibility": visibility(est),
        "n_postselected": summary.n_postselected,
        "n_total": summary.n_total,
        "truth": {
            "od0": od0, "phi0_rad": phi0, "od1": od1, "phi1_rad": phi1,
            "azimuth_rad": truth.phi, "visibility": visibility(truth),
        },
    }
    _write_json(os.path.join(outdir, "tomography.json"), payload, cfg)
    return EXIT_OK


def _read_spectrum_csv(path: str) -> SpectrumData:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        required = ["delta_s_mhz", "transmission", "sigma"]
        for col in required:
            if col not in header:
                raise ConfigError("<fit input>", f"missing CSV column {col!r}")
        optional = ["phase_rad", "phase_sigma"]
        has_phase = all(c in header for c in optional)
        columns = required + (optional if has_phase else [])
        idx = {c: header.index(c) for c in columns}
        rows = []
        for line in fh:
            line = line.strip()
            if line:
                parts = line.split(",")
                rows.append([float(parts[idx[c]]) for c in columns])
    data = np.asarray(rows, dtype=float)
    if data.size == 0:
        raise ConfigError("<fit input>", "no data rows")
    return SpectrumData(
        delta_s=angular_from_mhz(1.0) * data[:, 0],
        transmission=data[:, 1],
        sigma=data[:, 2],
        phase=data[:, 3] if has_phase else None,
        phase_sigma=data[:, 4] if has_phase else None,
    )


def cmd_fit(cfg: RunConfig, outdir: str, input_csv: str) -> int:
    data = _read_spectrum_csv(input_csv)
    fit_cfg = cfg.raw["fit"]
    result = fit_spectrum(
        data,
        cfg.fit_initial(),
        include_phase=fit_cfg["include_phase"],
        max_iterations=fit_cfg["max_iterations"],
        gamma_e=cfg.eit_params().gamma_e,
        geom=cfg.geometry(),
    )
    p, s = result.params, result.stderr
    payload = {
        "estimates": {
            "od_res": p.od_res,
            "omega_c_mhz": mhz_from_angular(p.omega_c),
            "gamma_rg_mhz": mhz_from_angular(p.gamma_rg),
            "delta_c_mhz": mhz_from_angular(p.delta_c),
        },
        "stderr": {
            "od_res": s.od_res,
            "omega_c_mhz": mhz_from_angular(s.omega_c),
            "gamma_rg_mhz": mhz_from_angular(s.gamma_rg),
            "delta_c_mhz": mhz_from_angular(s.delta_c),
        },
        "reduced_chisq": result.reduced_chisq,
        "iterations": result.iterations,
        "final_damping": result.final_damping,
        "gradient_norm": result.gradient_norm,
        "converged": result.converged,
    }
    _write_json(os.path.join(outdir, "fit.json"), payload, cfg)
    return EXIT_OK


def cmd_retrieval(cfg: RunConfig, outdir: str) -> int:
    exp_cfg = cfg.experiment()
    g = cfg.raw["retrieval_grid"]
    delays = np.linspace(0.0, g["max_us"] * 1e-6, g["points"])
    eta = np.array([retrieval_efficiency(exp_cfg, t) for t in delays])
    _write_csv(
        os.path.join(outdir, "retrieval.csv"),
        ["delay_us", "efficiency"],
        [delays * 1e6, eta],
    )
    eta0 = exp_cfg.storage_retrieval_efficiency_zero_delay
    etad = exp_cfg.storage_retrieval_efficiency_delayed
    tau = (
        exp_cfg.delayed_at / math.log(eta0 / etad) if 0 < etad < eta0 else None
    )
    payload = {
        "efficiency_zero_delay": eta0,
        "efficiency_delayed": etad,
        "delayed_at_us": exp_cfg.delayed_at * 1e6,
        "tau_us": tau * 1e6 if tau is not None else None,
    }
    _write_json(os.path.join(outdir, "retrieval.json"), payload, cfg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydberg-xpm",
        description="Rydberg-EIT cross-phase modulation model toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "blockade-phase", "density-scan", "tomography",
                 "fit", "retrieval"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file (defaults built in)")
        sp.add_argument("--output-dir", default=".", help="directory for outputs")
        sp.add_argument("--seed", type=int, help="override statistics.rng_seed")
        if name == "fit":
            sp.add_argument("--input", required=True,
                            help="CSV with delta_s_mhz, transmission, sigma columns")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("statistics.rng_seed", "must be non-negative")
            cfg.raw["statistics"]["rng_seed"] = args.seed
        outdir = args.output_dir
        os.makedirs(outdir, exist_ok=True)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # model-limit warnings are not CLI errors
            if args.command == "spectrum":
                return cmd_spectrum(cfg, outdir)
            if args.command == "blockade-phase":
                return cmd_blockade_phase(cfg, outdir)
            if args.command == "density-scan":
                return cmd_density_scan(cfg, outdir)
            if args.command == "tomography":
                return cmd_tomography(cfg, outdir)
            if args.command == "fit":
                return cmd_fit(cfg, outdir, args.input)
            if args.command == "retrieval":
                return cmd_retrieval(cfg, outdir)
            raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientStatisticsError as exc:
        print(f"insufficient statistics: {exc}", file=sys.stderr)
        return EXIT_STATISTICS
    except FitNonConvergenceError as exc:
        best = exc.best_result
        print(f"fit failed to converge: {exc}", file=sys.stderr)
        print(
            f"best point: od_res={best.params.od_res:.6g} "
            f"omega_c={mhz_from_angular(best.params.omega_c):.6g} MHz "
            f"gamma_rg={mhz_from_angular(best.params.gamma_rg):.6g} MHz "
            f"delta_c={mhz_from_angular(best.params.delta_c):.6g} MHz "
            f"(reduced chisq {best.reduced_chisq:.6g})",
            file=sys.stderr,
        )
        return EXIT_NUMERICAL
    except (QuadratureError, DegenerateJacobianError, NoEITFeatureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except RydbergXPMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # parameter invariants violated by the supplied configuration
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
