"""Command-line front end: capacities, sweeps, thresholds, satellite table,
protocol simulation. Every command writes CSV output plus a JSON manifest
sufficient to re-run it bit-identically (see the `rerun` subcommand).

Exit codes: 0 success, 2 usage error, 3 numerical non-convergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from ._kernels import QuadratureNonConvergence, backend_name
from .capacity import KINDS, capacity
from .channel import ChannelParams
from .mathkit import QuadratureSpec
from .optimize import (
    crossing_threshold_fixed_eta,
    crossing_threshold_optimized,
    default_eta_bounds,
    optimize_eta,
    sweep_gamma,
)
from .protosim import (
    ProtocolConfig,
    estimate_stats,
    leakage_exhaustive,
    run_rounds,
    stats_to_csv,
    transcript_to_csv,
)
from .satgeo import PRESETS, AntennaPattern, load_scenario_config, scenario_table

_ALL_KINDS = sorted(KINDS)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _parse_range(text: str, log: bool) -> list[float]:
    """lo:hi:count range; a bare number is a single-point grid."""
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"range must be lo:hi:count, got {text!r}")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1 or hi < lo:
        raise ValueError(f"bad range {text!r}")
    if count == 1:
        return [lo]
    if log:
        if lo <= 0:
            raise ValueError("log range needs lo > 0")
        return list(np.exp(np.linspace(math.log(lo), math.log(hi), count)))
    return list(np.linspace(lo, hi, count))


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _write_manifest(outdir: str, command: str, params: dict, outputs: list[str],
                    seeds: dict | None = None) -> str:
    manifest = {
        "command": command,
        "params": params,
        "seeds": seeds or {},
        "version": __version__,
        "backend": backend_name(),
        "timestamp_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "outputs": outputs,
    }
    path = os.path.join(outdir, f"{command}_manifest.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _quad_spec(params: dict) -> QuadratureSpec:
    return QuadratureSpec(abs_tol=float(params.get("quad_tol", 1e-10)))


# --- command implementations (dict in, output paths out; reused by rerun) ---

def cmd_capacity(params: dict, outdir: str) -> list[str]:
    kind = params["kind"]
    p = ChannelParams(eta=float(params["eta"]), gamma=float(params["gamma"]))
    res = capacity(kind, p, _quad_spec(params))
    print(f"{kind} gamma={_fmt(p.gamma)} eta={_fmt(p.eta)} -> {_fmt(res.value)} bits")
    out = os.path.join(outdir, "capacity.csv")
    _write_csv(out, "kind,gamma,eta,capacity_bits",
               [[kind, _fmt(p.gamma), _fmt(p.eta), _fmt(res.value)]])
    return [out]


def cmd_optimize(params: dict, outdir: str) -> list[str]:
    kind = params["kind"]
    gamma = float(params["gamma"])
    if params.get("eta_lo") is not None:
        bounds = (float(params["eta_lo"]), float(params["eta_hi"]))
    else:
        bounds = default_eta_bounds(gamma)
    pt = optimize_eta(kind, gamma, bounds, _quad_spec(params))
    print(
        f"{kind} gamma={_fmt(gamma)}: eta*={_fmt(pt.eta_star)} "
        f"C*={_fmt(pt.capacity_star)} bits [{pt.status}]"
    )
    out = os.path.join(outdir, "optimize.csv")
    _write_csv(out, "kind,gamma,eta_star,capacity_star,status",
               [[kind, _fmt(gamma), _fmt(pt.eta_star), _fmt(pt.capacity_star), pt.status]])
    return [out]


def _sweep_task(task):
    kind, gamma, eta, opt, quad_tol = task
    spec = QuadratureSpec(abs_tol=quad_tol)
    if opt:
        return sweep_gamma(kind, [gamma], optimize=True, spec=spec)[0]
    return sweep_gamma(kind, [gamma], eta=eta, spec=spec)[0]


def cmd_sweep(params: dict, outdir: str) -> list[str]:
    kinds = _ALL_KINDS if params["kind"] == "all" else [params["kind"]]
    grid = _parse_range(params["gamma"], params.get("log", False))
    opt = bool(params.get("optimize_eta", False))
    eta = None if opt else float(params["eta"])
    jobs = int(params.get("jobs", 1))
    quad_tol = float(params.get("quad_tol", 1e-10))

    tasks = [(kind, g, eta, opt, quad_tol) for kind in kinds for g in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(_sweep_task, tasks))
    else:
        points = [_sweep_task(t) for t in tasks]

    out = os.path.join(outdir, "sweep.csv")
    _write_csv(
        out,
        "kind,gamma,eta,capacity_bits,status,error",
        [
            [pt.kind, _fmt(pt.gamma), _fmt(pt.eta), _fmt(pt.value), pt.status, pt.error]
            for pt in points
        ],
    )
    print(f"wrote {len(points)} rows to {out}")
    return [out]


def cmd_threshold(params: dict, outdir: str) -> list[str]:
    spec = _quad_spec(params)
    rows = []
    if params.get("optimized", False):
        g = crossing_threshold_optimized(spec)
        ow = optimize_eta("ow_soft", g, default_eta_bounds(g), spec)
        tw = optimize_eta("tw_soft", g, default_eta_bounds(g), spec)
        rows.append(["optimized", _fmt(g), _fmt(ow.capacity_star), _fmt(tw.capacity_star),
                     _fmt(abs(ow.capacity_star - tw.capacity_star))])
        print(f"optimized crossing gamma={_fmt(g)}")
    else:
        eta = float(params["eta"])
        g = crossing_threshold_fixed_eta(eta, spec)
        if g is None:
            print(f"no crossing for eta={_fmt(eta)} (degenerate)")
            rows.append([f"eta={_fmt(eta)}", "nan", "nan", "nan", "nan"])
        else:
            p = ChannelParams(eta=eta, gamma=g)
            c1 = capacity("ow_soft", p, spec).value
            c2 = capacity("tw_soft", p, spec).value
            rows.append([f"eta={_fmt(eta)}", _fmt(g), _fmt(c1), _fmt(c2), _fmt(abs(c1 - c2))])
            print(f"fixed-eta crossing gamma={_fmt(g)} at eta={_fmt(eta)}")
    out = os.path.join(outdir, "threshold.csv")
    _write_csv(out, "mode,gamma_cross,c_ow_soft,c_tw_soft,residual", rows)
    return [out]


def cmd_satellite(params: dict, outdir: str) -> list[str]:
    theta3db = math.radians(float(params.get("theta3db_deg", 1.0)))
    pattern = AntennaPattern(theta3db)
    if params.get("config"):
        preset, pattern = load_scenario_config(params["config"])
        presets = [preset]
    else:
        name = params["preset"]
        presets = list(PRESETS) if name == "all" else [name]
    spec = QuadratureSpec(abs_tol=float(params.get("quad_tol", 1e-14)))
    rows = scenario_table(presets, pattern, spec)
    out = os.path.join(outdir, "satellite.csv")
    _write_csv(
        out,
        "scenario,gamma_max,c_tw_soft,c_tw_hard,c_ow_soft,c_ow_hard",
        [
            [r.name, _fmt(r.gamma_max), _fmt(r.c_tw_soft), _fmt(r.c_tw_hard),
             _fmt(r.c_ow_soft), _fmt(r.c_ow_hard)]
            for r in rows
        ],
    )
    for r in rows:
        print(
            f"{r.name}: gamma_max={_fmt(r.gamma_max)} TW soft/hard="
            f"{_fmt(r.c_tw_soft)}/{_fmt(r.c_tw_hard)} OW soft/hard="
            f"{_fmt(r.c_ow_soft)}/{_fmt(r.c_ow_hard)}"
        )
    return [out]


def cmd_simulate(params: dict, outdir: str) -> list[str]:
    outputs = []
    if params.get("leakage_exhaustive", False):
        p = ChannelParams(eta=float(params["eta"]), gamma=float(params["gamma"]))
        res = leakage_exhaustive(
            int(params["n"]), int(params["m"]), p,
            int(params.get("bins", 4)), int(params.get("hash_seed", 1)),
        )
        print(
            f"exact leakage n={res.n} m={res.m} bins={res.bins}: "
            f"I(K;view)={_fmt(res.mi_key_eve)} bits, sd={_fmt(res.sd_uniform)}"
        )
        out = os.path.join(outdir, "leakage.csv")
        _write_csv(out, "n,m,bins,gamma,eta,mi_key_eve_bits,sd_uniform",
                   [[str(res.n), str(res.m), str(res.bins), _fmt(p.gamma), _fmt(p.eta),
                     _fmt(res.mi_key_eve), _fmt(res.sd_uniform)]])
        return [out]

    cfg = ProtocolConfig(
        block_len=int(params.get("n", 1)),
        params=ChannelParams(eta=float(params["eta"]), gamma=float(params["gamma"])),
        eve_mode=params.get("eve_mode", "hard"),
        public_channel_ber=float(params.get("public_ber", 0.0)),
        rng_seed=int(params.get("seed", 0)),
        hash_out_len=int(params.get("hash_out", 0)),
        hash_seed=int(params.get("hash_seed", 1)),
    )
    rounds = int(float(params.get("rounds", 100000)))
    tr = run_rounds(cfg, rounds)
    stats = estimate_stats(tr, cfg.eve_mode)
    out = os.path.join(outdir, "simulate_stats.csv")
    stats_to_csv(stats, out)
    outputs.append(out)
    print(
        f"rounds={rounds} n={cfg.block_len}: eps_a={stats.eps_a_hat:.6g} "
        f"eps_e={stats.eps_e_hat:.6g} mi_ab={stats.mi_ab_hat:.6g} "
        f"mi_ae={stats.mi_ae_hat:.6g}"
    )
    if params.get("transcript", False):
        tpath = os.path.join(outdir, "transcript.csv")
        transcript_to_csv(tr, tpath)
        outputs.append(tpath)
    return outputs


_COMMANDS = {
    "capacity": cmd_capacity,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "threshold": cmd_threshold,
    "satellite": cmd_satellite,
    "simulate": cmd_simulate,
}


def _dispatch(command: str, params: dict, outdir: str) -> int:
    os.makedirs(outdir, exist_ok=True)
    try:
        outputs = _COMMANDS[command](params, outdir)
    except QuadratureNonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, IOError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    seeds = {k: params[k] for k in ("seed", "hash_seed") if k in params}
    _write_manifest(outdir, command, params, outputs, seeds)
    return 0


def cmd_rerun(manifest_path: str, outdir: str | None) -> int:
    try:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read manifest: {exc}", file=sys.stderr)
        return 4
    command = manifest.get("command")
    if command not in _COMMANDS:
        print(f"manifest names unknown command {command!r}", file=sys.stderr)
        return 2
    target = outdir or os.path.dirname(os.path.abspath(manifest_path))
    return _dispatch(command, manifest["params"], target)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bpsksec",
        description="Gaussian-BPSK wiretap secrecy capacities, satellite "
        "scenarios and two-way protocol simulation",
    )
    ap.add_argument("--version", action="version", version=__version__)
    default_outdir = os.environ.get("BPSKSEC_OUTDIR", ".")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--outdir", default=default_outdir,
                       help="output directory (env BPSKSEC_OUTDIR)")
        p.add_argument("--quad-tol", type=float, dest="quad_tol",
                       help="quadrature absolute tolerance")

    p = sub.add_parser("capacity", help="evaluate one capacity")
    p.add_argument("--kind", required=True, choices=_ALL_KINDS)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)
    add_common(p)

    p = sub.add_parser("optimize", help="maximize capacity over eta")
    p.add_argument("--kind", required=True, choices=_ALL_KINDS)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--eta-lo", type=float, dest="eta_lo")
    p.add_argument("--eta-hi", type=float, dest="eta_hi")
    add_common(p)

    p = sub.add_parser("sweep", help="capacity curves over a gamma grid")
    p.add_argument("--kind", required=True, choices=_ALL_KINDS + ["all"])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gamma", help="lo:hi:count linear grid (or single value)")
    g.add_argument("--gamma-log", dest="gamma_log", help="lo:hi:count log grid")
    e = p.add_mutually_exclusive_group(required=True)
    e.add_argument("--eta", type=float, help="fixed eta per point")
    e.add_argument("--optimize-eta", action="store_true", dest="optimize_eta")
    p.add_argument("--jobs", type=int, default=1)
    add_common(p)

    p = sub.add_parser("threshold", help="OW/TW soft crossing in gamma")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--optimized", action="store_true")
    g.add_argument("--eta", type=float)
    add_common(p)

    p = sub.add_parser("satellite", help="worst-case scenario capacity table")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", choices=sorted(PRESETS) + ["all"])
    g.add_argument("--config", help="key=value scenario file")
    p.add_argument("--theta3db-deg", type=float, default=1.0, dest="theta3db_deg")
    add_common(p)

    p = sub.add_parser("simulate", help="run the two-way protocol simulator")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1, help="block length")
    p.add_argument("--rounds", default="100000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eve-mode", choices=["hard", "soft"], default="hard", dest="eve_mode")
    p.add_argument("--public-ber", type=float, default=0.0, dest="public_ber")
    p.add_argument("--hash-out", type=int, default=0, dest="hash_out")
    p.add_argument("--hash-seed", type=int, default=1, dest="hash_seed")
    p.add_argument("--transcript", action="store_true", help="also export transcript CSV")
    p.add_argument("--leakage-exhaustive", action="store_true", dest="leakage_exhaustive")
    p.add_argument("--m", type=int, help="hash output length for exhaustive leakage")
    p.add_argument("--bins", type=int, default=4)
    add_common(p)

    p = sub.add_parser("rerun", help="re-run a command from its manifest")
    p.add_argument("manifest")
    p.add_argument("--outdir")

    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "rerun":
        return cmd_rerun(args.manifest, args.outdir)

    params = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "outdir") and v is not None and v is not False
    }
    if args.command == "sweep":
        if params.pop("gamma_log", None) is not None:
            params["gamma"] = vars(args)["gamma_log"]
            params["log"] = True
    if args.command == "simulate" and params.get("leakage_exhaustive") and "m" not in params:
        print("error: --leakage-exhaustive requires --m", file=sys.stderr)
        return 2
    return _dispatch(args.command, params, args.outdir)


if __name__ == "__main__":
    sys.exit(main())
