"""Command-line surface and file formats.

Panels travel as wide CSV: the first row holds the grid points, each
following row one curve, every value rendered with 17 significant
digits so files round-trip losslessly.  Every command writes a JSON
sidecar (<out>.meta.json) echoing the exact configuration and seeds
needed to regenerate its output.  Exit codes: 0 success, 1 invalid
input or configuration, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .bands import BAND_KINDS, _build_band
from .estimator import (
    hard_threshold,
    least_squares,
    per_curve_coeffs,
    pooled_stats,
    soft_threshold,
    sparsity_report,
    theoretical_levels,
)
from .grid_basis import Grid, fourier_basis, haar_basis, make_grid
from .metrics_bench import ScenarioConfig, run_scenario
from .process_sim import (
    CurvePanel,
    PanelConfig,
    ProcessSpec,
    SignalSpec,
    calibrate,
    generate_panel,
    sigma_k_theoretical,
)
from .selector import CandidateSpec, select

__all__ = ["main", "build_parser", "read_panel_csv", "write_panel_csv", "scenario_from_dict"]

FMT = "%.17g"


def _basis_builder(family: str):
    if family == "fourier":
        return fourier_basis
    if family == "haar":
        return haar_basis
    raise ValueError(f"unknown basis family {family!r}")


def signal_from_dict(d: dict) -> SignalSpec:
    kw = dict(d)
    kind = kw.pop("kind", "signal1")
    if "custom_values" in kw:
        kw["custom_values"] = tuple(kw["custom_values"])
    return SignalSpec(kind=kind, **kw)


def process_from_dict(d: dict) -> ProcessSpec:
    kw = dict(d)
    kind = kw.pop("kind", "bb")
    return ProcessSpec(kind=kind, **kw)


def panel_config_from_dict(d: dict, seed_override=None) -> PanelConfig:
    """Panel block: n, m, signal, process, seed, and either noise_sd or a
    calibration block {sigma_star, snr} that derives noise and signal scale."""
    grid = make_grid(int(d["m"]))
    signal = signal_from_dict(d.get("signal", {}))
    process = process_from_dict(d.get("process", {}))
    if "calibration" in d:
        cal = d["calibration"]
        calib = calibrate(process, grid, float(cal["sigma_star"]), float(cal["snr"]), signal)
        noise_sd, signal, process = calib.noise_sd, calib.signal, calib.process
    else:
        noise_sd = float(d["noise_sd"])
    seed = int(seed_override if seed_override is not None else d.get("seed", 0))
    return PanelConfig(
        n=int(d["n"]), grid=grid, signal=signal, process=process,
        noise_sd=noise_sd, seed=seed,
    )


def scenario_from_dict(d: dict, seed_override=None) -> ScenarioConfig:
    panel = panel_config_from_dict(d["panel"])
    estimators = tuple(CandidateSpec(**e) for e in d["estimators"])
    base = d.get("base_seed", 0)
    if seed_override is not None:
        base = seed_override
    return ScenarioConfig(
        panel=panel,
        estimators=estimators,
        bands=tuple(d.get("bands", ())),
        replicates=int(d.get("replicates", 100)),
        base_seed=int(base),
        band_basis_family=d.get("band_basis_family", "fourier"),
        band_alpha=float(d.get("band_alpha", 0.05)),
        oracle_checks=bool(d.get("oracle_checks", False)),
        oracle_alpha=float(d.get("oracle_alpha", 0.05)),
        oracle_delta=float(d.get("oracle_delta", 0.01)),
    )


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _write_json(path: str, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_meta(out: str, command: str, config: dict):
    _write_json(out + ".meta.json", {"command": command, "config": config})


def write_panel_csv(panel: CurvePanel, path: str):
    rows = np.vstack([panel.grid.points[None, :], panel.Y])
    np.savetxt(path, rows, fmt=FMT, delimiter=",")


def read_panel_csv(path: str) -> CurvePanel:
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    if rows.shape[0] < 3:
        raise ValueError("panel CSV needs a grid row plus at least two curves")
    grid = Grid(m=rows.shape[1], points=rows[0])
    return CurvePanel(grid=grid, Y=rows[1:])


def _write_table_csv(path: str, header, columns):
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for j in range(cols[0].shape[0]):
            cells = []
            for c in cols:
                v = c[j]
                if isinstance(v, (bool, np.bool_)):
                    cells.append(str(int(v)))
                elif isinstance(v, (int, np.integer)):
                    cells.append(str(int(v)))
                else:
                    cells.append(FMT % float(v))
            fh.write(",".join(cells) + "\n")


def _panel_echo(config: PanelConfig) -> dict:
    sig = {"kind": config.signal.kind, "c1": config.signal.c1, "c2": config.signal.c2, "c3": config.signal.c3}
    if config.signal.custom_values is not None:
        sig["custom_values"] = list(config.signal.custom_values)
    return {
        "n": config.n,
        "m": config.grid.m,
        "signal": sig,
        "process": {
            "kind": config.process.kind,
            "ar_phi": config.process.ar_phi,
            "innovation_sd": config.process.innovation_sd,
        },
        "noise_sd": config.noise_sd,
        "seed": config.seed,
        "signal_form": "negative_exponent_gaussians_or_indicators",
    }


def cmd_simulate(args) -> int:
    if args.scenario:
        cfg = panel_config_from_dict(_load_json(args.scenario)["panel"], seed_override=args.seed)
    else:
        d = {"n": args.n, "m": args.m, "signal": {"kind": args.signal},
             "process": {"kind": args.process}}
        if args.ar_phi is not None:
            d["process"]["ar_phi"] = args.ar_phi
        if args.innovation_sd is not None:
            d["process"]["innovation_sd"] = args.innovation_sd
        if args.sigma_star is not None or args.snr is not None:
            if args.sigma_star is None or args.snr is None:
                raise ValueError("calibration needs both --sigma-star and --snr")
            d["calibration"] = {"sigma_star": args.sigma_star, "snr": args.snr}
        else:
            d["noise_sd"] = args.noise_sd
        cfg = panel_config_from_dict(d, seed_override=args.seed)
    panel = generate_panel(cfg)
    if args.format == "json":
        _write_json(args.out, {"grid": list(panel.grid.points), "curves": panel.Y.tolist()})
    else:
        write_panel_csv(panel, args.out)
    _write_meta(args.out, "simulate", _panel_echo(cfg))
    return 0


def _fit_from_args(panel, args):
    basis = _basis_builder(args.basis)(panel.grid)
    stats = pooled_stats(per_curve_coeffs(panel, basis), args.alpha, args.delta)
    if args.rule == "hard":
        est = hard_threshold(stats, basis, args.multiplier)
    elif args.rule == "soft":
        est = soft_threshold(stats, basis, args.multiplier)
    else:
        est = least_squares(stats, basis)
    return basis, stats, est


def cmd_estimate(args) -> int:
    panel = read_panel_csv(args.panel)
    basis, stats, est = _fit_from_args(panel, args)
    k = np.arange(1, basis.m + 1)
    # active column marks coefficients present in the estimate; under the
    # >= tie convention a zero coefficient with a zero level is not counted
    _write_table_csv(
        args.out + ".coeffs.csv",
        ["k", "mu_hat", "s_k", "r_hat", "active"],
        [k, stats.mu_hat, stats.s_k, stats.r_hat, (est.coeffs != 0.0).astype(int)],
    )
    j = np.arange(1, basis.m + 1)
    _write_table_csv(
        args.out + ".fit.csv",
        ["j", "t_j", "f_hat"],
        [j, panel.grid.points, est.values],
    )
    _write_meta(args.out, "estimate", {
        "panel": args.panel, "basis": args.basis, "rule": args.rule,
        "multiplier": args.multiplier, "alpha": args.alpha, "delta": args.delta,
        "active_count": int(np.count_nonzero(est.coeffs)),
    })
    return 0


def cmd_select(args) -> int:
    panel = read_panel_csv(args.panel)
    if args.scenario:
        cands = [CandidateSpec(**e) for e in _load_json(args.scenario)["estimators"]]
    else:
        cands = [
            CandidateSpec(basis_family="fourier", rule="hard", multiplier=1, alpha=args.alpha),
            CandidateSpec(basis_family="haar", rule="hard", multiplier=1, alpha=args.alpha),
        ]
    split_seed = 0 if args.seed is None else args.seed
    result = select(panel, cands, split_seed)
    payload = {
        "winner": result.winner.label(),
        "winner_index": result.winner_index,
        "risks": {c.label(): (None if not np.isfinite(r) else float(r)) for c, r in zip(cands, result.risks)},
        "split_seed": result.split_seed,
        "i1_indices": result.i1_indices.tolist(),
        "i2_indices": result.i2_indices.tolist(),
        "warnings": list(result.warnings),
        "config": {"panel": args.panel, "seed": split_seed, "alpha": args.alpha},
    }
    _write_json(args.out, payload)
    return 0


def cmd_band(args) -> int:
    panel = read_panel_csv(args.panel)
    basis = _basis_builder(args.basis)(panel.grid)
    stats = pooled_stats(per_curve_coeffs(panel, basis), args.alpha, args.delta)
    process = None
    if args.kind == "competitor_theoretical":
        if not args.scenario:
            raise ValueError("competitor_theoretical needs --scenario for the process covariance")
        cfg = panel_config_from_dict(_load_json(args.scenario)["panel"])
        if cfg.grid.m != panel.grid.m:
            raise ValueError("scenario grid size does not match the stored panel")
        process = cfg
    band = _build_band(args.kind, panel, basis, stats, process)
    j = np.arange(1, basis.m + 1)
    _write_table_csv(
        args.out,
        ["j", "t_j", "center", "lower", "upper"],
        [j, panel.grid.points, band.center, band.lower, band.upper],
    )
    _write_meta(args.out, "band", {
        "panel": args.panel, "kind": args.kind, "basis": args.basis,
        "alpha": args.alpha, "delta": args.delta,
    })
    return 0


def cmd_sparsity(args) -> int:
    grid = make_grid(args.m)
    basis = _basis_builder(args.basis)(grid)
    signal = SignalSpec(kind=args.signal)
    process = ProcessSpec(kind=args.process)
    sigma_k = np.sqrt(sigma_k_theoretical(process, basis))
    levels = theoretical_levels(sigma_k, args.noise_sd, args.n, args.m, args.alpha, args.delta)
    report = sparsity_report(signal, basis, levels)
    payload = {
        "count": report.count,
        "active_indices": report.active_indices.tolist(),
        "sup_error": report.sup_error,
        "l2_error": report.l2_error,
        "config": {
            "signal": args.signal, "process": args.process, "basis": args.basis,
            "m": args.m, "n": args.n, "alpha": args.alpha, "delta": args.delta,
            "noise_sd": args.noise_sd,
        },
    }
    _write_json(args.out, payload)
    return 0


def _bench_csv_rows(report):
    rows = []
    for lab, e, md in zip(report.estimator_labels, report.sqrt_emse, report.sqrt_medmse):
        rows.append(("estimator", lab, FMT % e, FMT % md, "", ""))
    for kind, c, w in zip(report.band_kinds, report.coverage, report.mean_width):
        rows.append(("band", kind, "", "", FMT % c, FMT % w))
    for tag in sorted(report.oracle_pass_rates):
        rows.append(("oracle", tag, "", "", FMT % report.oracle_pass_rates[tag], ""))
    return rows


def cmd_bench(args) -> int:
    if not args.scenario:
        raise ValueError("bench needs --scenario")
    scenario = scenario_from_dict(_load_json(args.scenario), seed_override=args.seed)
    if args.replicates is not None:
        scenario = replace(scenario, replicates=args.replicates)
    report = run_scenario(scenario)
    _write_json(args.out + ".json", report.as_dict())
    with open(args.out + ".csv", "w", encoding="utf-8") as fh:
        fh.write("row_kind,label,sqrt_emse,sqrt_medmse,coverage_or_rate,mean_width\n")
        for row in _bench_csv_rows(report):
            fh.write(",".join(row) + "\n")
    return 0


def _add_common(p):
    # default None: fall back to the seed stored in the scenario/panel config
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--scenario", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="curveband",
        description="Adaptive mean-curve estimation and uniform confidence bands for noisy curve panels.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a noisy curve panel CSV")
    _add_common(p)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--signal", choices=("signal1", "signal2"), default="signal1")
    p.add_argument("--process", choices=("bb", "bm", "ar1", "arima11"), default="bb")
    p.add_argument("--noise-sd", type=float, default=0.1)
    p.add_argument("--sigma-star", type=float, default=None)
    p.add_argument("--snr", type=float, default=None)
    p.add_argument("--ar-phi", type=float, default=None)
    p.add_argument("--innovation-sd", type=float, default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("estimate", help="threshold-estimate the mean from a panel CSV")
    _add_common(p)
    p.add_argument("--panel", required=True)
    p.add_argument("--basis", choices=("fourier", "haar"), default="fourier")
    p.add_argument("--rule", choices=("hard", "soft", "least_squares"), default="hard")
    p.add_argument("--multiplier", type=float, default=1)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.0)
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("select", help="data-split selection among candidate estimators")
    _add_common(p)
    p.add_argument("--panel", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(fn=cmd_select)

    p = sub.add_parser("band", help="build a uniform confidence band from a panel CSV")
    _add_common(p)
    p.add_argument("--panel", required=True)
    p.add_argument("--kind", choices=BAND_KINDS, default="proposed_hard1")
    p.add_argument("--basis", choices=("fourier", "haar"), default="fourier")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.0)
    p.set_defaults(fn=cmd_band)

    p = sub.add_parser("sparsity", help="count true coefficients above theoretical levels")
    _add_common(p)
    p.add_argument("--signal", choices=("signal1", "signal2"), default="signal1")
    p.add_argument("--process", choices=("bb", "bm", "ar1", "arima11"), default="bb")
    p.add_argument("--basis", choices=("fourier", "haar"), default="fourier")
    p.add_argument("--m", type=int, default=256)
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--noise-sd", type=float, default=0.1)
    p.set_defaults(fn=cmd_sparsity)

    p = sub.add_parser("bench", help="run a scenario JSON and write report JSON + CSV")
    _add_common(p)
    p.add_argument("--replicates", type=int, default=None)
    p.set_defaults(fn=cmd_bench)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, RuntimeError, json.JSONDecodeError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
