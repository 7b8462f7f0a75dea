"""Command-line interface: ``vmbpol <command> ...``.

Each command reads a run configuration, delegates to one library operation
and writes an artifact with a provenance header.  Failures exit non-zero with
a one-line JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
from pathlib import Path


from . import io
from ._version import __version__
from .birefringence import birefringence, is_b2_proportional
from .config import RunConfig, load_config
from .demodulation import demodulate, ellipticity_spectrum, estimate_psi, sensitivity_from_spectrum
from .exceptions import ConfigError, DataIOError, VmbError
from .exclusion import alp_exclusion, mcp_exclusion
from .experiments import compare_experiments, load_experiments, table2_experiments
from .limits import noise_floor_limits, rayleigh_fit
from .noise import noise_budget, shot_noise_sensitivity
from .synthesis import single_pass_retardation, synthesize

OUTPUT_ENV = "VMBPOL_OUTPUT_DIR"


def _output_path(args, cfg: RunConfig | None, suffix: str) -> Path:
    if getattr(args, "output", None):
        return Path(args.output)
    out = cfg["output"] if cfg is not None else {"dir": ".", "prefix": "vmbpol"}
    directory = os.environ.get(OUTPUT_ENV) or out["dir"]
    return Path(directory) / f"{out['prefix']}_{suffix}"


def _config(args) -> RunConfig:
    return load_config(args.config).override(args.set)


def _meta(cfg: RunConfig, command: str, seed=None, **extra) -> dict:
    return io.artifact_meta(cfg.sha256, seed, command=command, **extra)


def _emit(args, text: str) -> None:
    if not args.quiet:
        print(text)


# ------------------------------------------------------------------ commands


def cmd_predict(args) -> int:
    cfg = _config(args)
    model, beam = cfg.model(), cfg.beam()
    F = cfg.finesse()
    amp = 2.0 * F / math.pi if F > 0 else 1.0
    # magnets with different field angles add as phasors in 2 theta
    phasor = 0j
    per_magnet = []
    for m in cfg.magnets():
        opd = single_pass_retardation(m, model, beam)
        dn = birefringence(model, m.region, beam, path_integrated=is_b2_proportional(model)).delta_n
        psi = math.pi * opd / beam.wavelength
        per_magnet.append({"delta_n": dn, "psi_single_pass": psi})
        phasor += psi * cmath.exp(2j * m.orientation_offset)
    psi_single = abs(phasor)
    psi_cavity = amp * psi_single
    det = cfg.detector()
    I_out = cfg["optics"]["I_out_W"]
    s = shot_noise_sensitivity(I_out, det.q) if I_out > 0 else None
    t_snr = (s / psi_cavity) ** 2 if (s and psi_cavity > 0) else None
    report = {
        "model": cfg["model"]["kind"],
        "magnets": per_magnet,
        "finesse": F,
        "amplification": amp,
        "psi_single_pass": psi_single,
        "psi_cavity": psi_cavity,
        "s_shot": s,
        "time_snr1_s": t_snr,
    }
    path = io.write_json(_output_path(args, cfg, "predict.json"), report, _meta(cfg, "predict"))
    lines = [f"model            {report['model']}"]
    for i, pm in enumerate(per_magnet):
        lines.append(f"delta_n[{i}]       {pm['delta_n']:.6g}")
    lines += [
        f"psi single pass  {psi_single:.6g} rad",
        f"psi in cavity    {psi_cavity:.6g} rad  (F = {F:.6g})",
        f"s_shot           {s:.6g} 1/sqrt(Hz)" if s else "s_shot           n/a",
        f"T(SNR=1)         {t_snr:.6g} s" if t_snr else "T(SNR=1)         n/a",
        f"wrote {path}",
    ]
    _emit(args, "\n".join(lines))
    return 0


def cmd_synth(args) -> int:
    cfg = _config(args)
    syn = cfg["synthesis"]
    seed = syn["seed"] if args.seed is None else args.seed
    duration = syn["duration_s"] if args.duration is None else args.duration
    ts = synthesize(cfg.synth_config(), cfg.model(), duration, seed=seed, t0=syn["t0_s"], n_jobs=syn["n_jobs"])
    path = io.write_timeseries(_output_path(args, cfg, "timeseries.csv"), ts, _meta(cfg, "synth", seed))
    _emit(args, f"wrote {len(ts.samples)} samples to {path}")
    return 0


def _demod_record(cfg: RunConfig, ts):
    table = demodulate(ts, cfg.nu_mod(), cfg.nu_mag())
    out = table.to_dict()
    out["psi"] = estimate_psi(table)
    out["sensitivity"] = sensitivity_from_spectrum(table, sideband=cfg["analysis"]["sideband"])
    return table, out


def cmd_demod(args) -> int:
    cfg = _config(args)
    ts = io.read_timeseries(args.input)
    _, record = _demod_record(cfg, ts)
    path = io.write_json(_output_path(args, cfg, "spectral.json"), {"spectral_table": record}, _meta(cfg, "demod", ts.seed))
    _emit(args, f"psi = {record['psi']:.6g}   s = {record['sensitivity']:.6g} 1/sqrt(Hz)\nwrote {path}")
    return 0


def cmd_floor(args) -> int:
    cfg = _config(args)
    a = cfg["analysis"]
    meta_in, columns, data = io.read_csv(args.input)
    extra = {}
    if "amplitude" in columns:
        amps = data[:, columns.index("amplitude")]
        signal = meta_in.get("signal_value")
        seed = meta_in.get("seed")
    else:
        ts = io.read_timeseries(args.input)
        table, record = _demod_record(cfg, ts)
        sb = "minus" if a["sideband"] == "minus" else "plus"
        _, amps, signal = ellipticity_spectrum(ts, cfg.nu_mod(), cfg.nu_mag(), band=a["band_Hz"], table=table, sideband=sb)
        seed = ts.seed
        extra["psi"] = record["psi"]
        extra["sensitivity"] = record["sensitivity"]
    fit = rayleigh_fit(amps, n_bins=a["n_bins"], value_at_signal_bin=signal)
    F = cfg.finesse()
    limits = noise_floor_limits(
        fit.sigma, a["confidence"], F, cfg.total_length(), cfg.total_int_B2_dL(), cfg.beam().wavelength
    )
    payload = {"rayleigh_fit": fit.to_dict(), "limits": limits.to_dict(), **extra}
    path = io.write_json(_output_path(args, cfg, "floor.json"), payload, _meta(cfg, "floor", seed))
    _emit(
        args,
        f"sigma = {fit.sigma:.6g}  chi2/dof = {fit.chi2_per_dof:.3g}\n"
        f"delta_n < {limits.delta_n_limit:.4g}  A_e < {limits.A_e_limit:.4g} T^-2  "
        f"sigma_gg < {limits.sigma_gamma_gamma_limit:.3g} m^2 ({a['confidence']:.0%} c.l.)\nwrote {path}",
    )
    return 0


def cmd_exclude(args) -> int:
    cfg = _config(args)
    a = cfg["analysis"]
    limit = args.limit if args.limit is not None else a["delta_n_limit"]
    if limit is None:
        raise ConfigError([("analysis.delta_n_limit", "no limit given: pass --limit or set this key")])
    grid = cfg.mass_grid()
    kind = a["exclusion"]
    B, L = cfg.field_rms(), cfg.total_length()
    if kind == "alp_birefringence":
        curve = alp_exclusion(B, L, grid, delta_n_limit=limit, beam=cfg.beam())
    elif kind == "alp_dichroism":
        curve = alp_exclusion(B, L, grid, dichroism_limit=limit, beam=cfg.beam())
    else:
        curve = mcp_exclusion(kind.split("_")[1], limit, B, grid, beam=cfg.beam())
    meta = _meta(cfg, "exclude", exclusion=kind, limit=limit, quantity=curve.quantity)
    path = io.write_csv(_output_path(args, cfg, f"exclusion_{kind}.csv"), curve.columns, curve.rows(), meta)
    _emit(args, f"{int(curve.valid.sum())}/{len(grid)} valid points\nwrote {path}")
    return 0


def cmd_budget(args) -> int:
    cfg = _config(args)
    o = cfg["optics"]
    nb = noise_budget(cfg.eta0_grid(), o["I_out_W"], o["sigma2"], cfg.detector(), nu_mod=cfg.nu_mod())
    eta_opt, s_opt = nb.optimum()
    meta = _meta(cfg, "budget", eta0_optimum=eta_opt, s_total_optimum=s_opt)
    path = io.write_csv(_output_path(args, cfg, "budget.csv"), nb.columns, nb.rows(), meta)
    _emit(args, f"optimum eta0 = {eta_opt:.4g}, s_total = {s_opt:.4g} 1/sqrt(Hz)\nwrote {path}")
    return 0


def _duration(seconds: float) -> str:
    if seconds < 86400.0 * 365.25:
        return f"{seconds / 86400.0:.3g} d"
    return f"{seconds / (86400.0 * 365.25):.3g} yr"


def cmd_compare(args) -> int:
    params = load_experiments(args.input) if args.input else table2_experiments()
    figs = compare_experiments(params)
    header = f"{'experiment':<16}{'Psi_QED':>11}{'s_eff':>11}{'dn_eff':>11}{'A_e_eff':>11}{'T(SNR=1)':>12}"
    lines = [header]
    for f in figs:
        lines.append(
            f"{f.name:<16}{f.psi_qed:>11.3g}{f.s_eff:>11.3g}{f.delta_n_eff:>11.3g}{f.A_e_eff:>11.3g}"
            f"{_duration(f.time_snr1):>12}"
        )
    src = str(args.input) if args.input else "bundled"
    meta = io.artifact_meta(None, None, command="compare", source=src)
    out = Path(args.output) if args.output else Path(os.environ.get(OUTPUT_ENV) or ".") / "vmbpol_compare.json"
    path = io.write_json(out, {"experiments": [f.to_dict() for f in figs]}, meta)
    _emit(args, "\n".join(lines) + f"\nwrote {path}")
    return 0


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vmbpol", description="Vacuum magnetic birefringence polarimeter toolkit")
    p.add_argument("--version", action="version", version=f"vmbpol {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True, infile=False):
        if infile:
            sp.add_argument("input", help="input file")
        if config:
            sp.add_argument("config", help="run configuration (JSON or YAML)")
            sp.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="override a config key")
        sp.add_argument("-o", "--output", help="explicit output file")
        sp.add_argument("-q", "--quiet", action="store_true", help="suppress the text summary")

    sp = sub.add_parser("predict", help="expected birefringence and ellipticity")
    common(sp)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("synth", help="synthesize a detector time series")
    common(sp)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--duration", type=float, help="record length [s]")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("demod", help="demodulate a time series")
    common(sp, infile=True)
    sp.set_defaults(func=cmd_demod)

    sp = sub.add_parser("floor", help="Rayleigh noise floor and physics limits")
    common(sp, infile=True)
    sp.set_defaults(func=cmd_floor)

    sp = sub.add_parser("exclude", help="ALP or MCP exclusion curve")
    common(sp)
    sp.add_argument("--limit", type=float, help="birefringence (or dichroism) upper limit")
    sp.set_defaults(func=cmd_exclude)

    sp = sub.add_parser("budget", help="noise budget versus eta0")
    common(sp)
    sp.set_defaults(func=cmd_budget)

    sp = sub.add_parser("compare", help="figures of merit of the ongoing experiments")
    sp.add_argument("input", nargs="?", help="experiments JSON (default: bundled table)")
    sp.add_argument("-o", "--output", help="explicit output file")
    sp.add_argument("-q", "--quiet", action="store_true")
    sp.set_defaults(func=cmd_compare)
    return p


def _error_record(exc: Exception) -> dict:
    rec = {
        "error": getattr(exc, "code", "error"),
        "type": type(exc).__name__,
        "message": str(exc),
        "exit_code": getattr(exc, "exit_code", 1),
    }
    if getattr(exc, "errors", None):
        rec["errors"] = [{"key": k, "message": m} for k, m in exc.errors]
    return rec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VmbError as exc:
        print(json.dumps(_error_record(exc)), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        err = DataIOError(str(exc))
        print(json.dumps(_error_record(err)), file=sys.stderr)
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
