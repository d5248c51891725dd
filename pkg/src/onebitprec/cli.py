"""Command-line front end: SER sweeps, small-instance validation, runtime benchmarks.

Subcommands
    sweep   Monte Carlo SER experiment; writes a CSV plus a JSON run manifest.
    oracle  Compare the LP relaxation and the greedy/quantized precoders
            against exhaustive enumeration on small instances.
    bench   Per-method precoding wall time versus the antenna count.

Configuration comes from defaults, then an optional config file (flat
``key = value`` lines, or a previously written JSON manifest), then explicit
command-line flags, in that order of precedence.
"""

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import __version__
from . import lp as lp_mod
from ._kernels import BACKEND
from .constellation import qam_spec
from .feasibility import build_system
from .precoders import Method, PrecodingError, exhaustive_milp, fgreedy, qlp, qzf, zf
from .sim import (STREAM_CHANNEL, STREAM_MESSAGE, SimConfig, run_sweep,
                  sample_channel, stream_rng)

CSV_COLUMNS = ["method", "snr_db", "epsilon", "trials", "symbol_errors", "ser",
               "mean_objective", "infeasible_count", "wall_time_ms"]

CONFIG_KEYS = ("nt", "k", "n", "trials", "snr_db", "epsilon", "seed", "methods", "noiseless")


def parse_snr_grid(text: str) -> tuple:
    """Parse '0:14:2' (inclusive) or a comma list like '0,2,4'."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3:
            raise ValueError(f"SNR range must be start:stop:step, got {text!r}")
        start, stop, step = parts
        if step <= 0:
            raise ValueError("SNR step must be positive")
        grid = np.arange(start, stop + step / 2, step)
        return tuple(float(v) for v in grid)
    return tuple(float(p) for p in text.split(","))


def parse_methods(text: str) -> tuple:
    names = [p.strip().lower() for p in text.split(",") if p.strip()]
    if not names:
        raise ValueError("method list is empty")
    by_value = {m.value: m for m in Method}
    out = []
    for name in names:
        if name not in by_value:
            raise ValueError(f"unknown method {name!r}; choose from {sorted(by_value)}")
        out.append(by_value[name])
    return tuple(out)


def _coerce(key: str, value):
    if key in ("nt", "k", "n", "trials", "seed"):
        return int(value)
    if key == "epsilon":
        return float(value)
    if key == "snr_db":
        if isinstance(value, (list, tuple)):
            return tuple(float(v) for v in value)
        return parse_snr_grid(str(value))
    if key == "methods":
        if isinstance(value, (list, tuple)):
            return parse_methods(",".join(str(v) for v in value))
        return parse_methods(str(value))
    if key == "noiseless":
        if isinstance(value, bool):
            return value
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    raise KeyError(key)


def load_config(path: str) -> dict:
    """Read a flat key=value config file or a JSON manifest."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    raw: dict = {}
    stripped = text.lstrip()
    if path.endswith(".json") or stripped.startswith("{"):
        data = json.loads(text)
        raw = data.get("config", data)
    else:
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            raw[key] = value
    out = {}
    for key, value in raw.items():
        if key not in CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}; known keys: {CONFIG_KEYS}")
        out[key] = _coerce(key, value)
    return out


def build_sim_config(args) -> SimConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(load_config(args.config))
    overrides = {
        "nt": getattr(args, "nt", None), "k": getattr(args, "k", None),
        "n": getattr(args, "n", None), "trials": getattr(args, "trials", None),
        "epsilon": getattr(args, "epsilon", None), "seed": getattr(args, "seed", None),
    }
    for key, val in overrides.items():
        if val is not None:
            values[key] = _coerce(key, val)
    if getattr(args, "snr", None) is not None:
        values["snr_db"] = parse_snr_grid(args.snr)
    if getattr(args, "methods", None) is not None:
        values["methods"] = parse_methods(args.methods)
    if getattr(args, "noiseless", False):
        values["noiseless"] = True
    return SimConfig(**values)


def config_as_dict(cfg: SimConfig) -> dict:
    return {
        "nt": cfg.nt, "k": cfg.k, "n": cfg.n,
        "snr_db": list(cfg.snr_db), "trials": cfg.trials,
        "epsilon": cfg.epsilon, "seed": cfg.seed,
        "methods": [m.value for m in cfg.methods],
        "noiseless": cfg.noiseless,
    }


def write_csv(path: str, rows: list):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([repr(row[col]) if isinstance(row[col], float) else row[col]
                             for col in CSV_COLUMNS])


def write_manifest(path: str, cfg: SimConfig, extras: dict):
    payload = {"config": config_as_dict(cfg),
               "version": __version__,
               "kernel_backend": BACKEND,
               "numpy_version": np.__version__}
    payload.update(extras)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _dump_failure(out_base: str, exc: PrecodingError) -> str | None:
    if not exc.lp_dump:
        return None
    dump_path = out_base + ".failure.txt"
    with open(dump_path, "w", encoding="utf-8") as fh:
        fh.write(str(exc) + "\n\n" + exc.lp_dump + "\n")
    return dump_path


def cmd_sweep(args) -> int:
    try:
        cfg = build_sim_config(args)
        cfg.validate()
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = args.out or "sweep.csv"
    t0 = time.perf_counter()
    try:
        stats = run_sweep(cfg)
    except PrecodingError as exc:
        dump = _dump_failure(out, exc)
        where = f" (instance dump: {dump})" if dump else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return 3
    elapsed = time.perf_counter() - t0
    write_csv(out, stats.rows(include_timing=not args.no_timing))
    write_manifest(out + ".manifest.json", cfg,
                   {"command": "sweep", "csv": out, "wall_clock_s": elapsed,
                    "timing_column": not args.no_timing})
    ser = stats.ser
    for mi, method in enumerate(cfg.methods):
        lo, hi = float(np.min(ser[mi])), float(np.max(ser[mi]))
        print(f"{method.value:8s} ser range [{lo:.3e}, {hi:.3e}] "
              f"infeasible {int(stats.infeasible[mi])}/{cfg.trials}")
    print(f"wrote {out} ({len(cfg.methods) * len(cfg.snr_db)} rows) in {elapsed:.1f}s")
    return 0


def cmd_oracle(args) -> int:
    try:
        cfg = build_sim_config(args)
        if cfg.nt * 2 > 24:
            raise ValueError(f"oracle mode needs 2*nt <= 24, got nt={cfg.nt}")
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    spec = qam_spec(cfg.n)
    instances = args.instances
    rows = []
    violations = 0
    gaps = []
    ratios = {"fgreedy": [], "qlp": [], "qzf": []}
    fg_hits = 0
    nonpos_rows = 0
    for i in range(instances):
        H = sample_channel(cfg.k, cfg.nt, stream_rng(cfg.seed, i, STREAM_CHANNEL))
        msg = stream_rng(cfg.seed, i, STREAM_MESSAGE).integers(0, 4, size=(cfg.k, cfg.n))
        sys_i = build_system(H, msg, spec)
        nonpos_rows += sys_i.nonpositive_weight_rows().size
        oracle = exhaustive_milp(sys_i)
        t_star = oracle.tau
        sol = lp_mod.solve(lp_mod.build_relaxation(sys_i))
        t_lp = float(sol.values[-1])
        fg = fgreedy(sys_i)
        ql = qlp(sys_i)
        qz = qzf(H, msg, spec)
        if t_lp < t_star - 1e-8:
            violations += 1
        gaps.append(t_lp - t_star)
        if t_star > 0:
            ratios["fgreedy"].append(fg.objective / t_star)
            ratios["qlp"].append(ql.objective / t_star)
            ratios["qzf"].append(qz.objective / t_star)
        if abs(fg.objective - t_star) <= 1e-9:
            fg_hits += 1
        rows.append({"instance": i, "t_star": t_star, "t_lp": t_lp,
                     "fgreedy": fg.objective, "qlp": ql.objective, "qzf": qz.objective,
                     "lp_iterations": sol.iterations})
    gaps_arr = np.asarray(gaps)
    print(f"instances {instances}  nt {cfg.nt}  k {cfg.k}  n {cfg.n}  seed {cfg.seed}")
    print(f"relaxation dominance violations (t_lp < t* - 1e-8): {violations}")
    print(f"t_lp - t* gap: mean {gaps_arr.mean():.6f}  max {gaps_arr.max():.6f}")
    for name, vals in ratios.items():
        arr = np.asarray(vals)
        print(f"{name:8s} objective / t*: mean {arr.mean():.4f}  min {arr.min():.4f}")
    print(f"fgreedy matches t* exactly on {fg_hits}/{instances} instances")
    print(f"rows with nonpositive decision-size weight: {nonpos_rows} "
          f"(kept in undivided form)")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.out}")
    return 1 if violations else 0


def cmd_bench(args) -> int:
    try:
        grid = [int(v) for v in args.nt_grid.split(",")]
        methods = parse_methods(args.methods) if args.methods else (Method.FGREEDY, Method.QLP, Method.QZF, Method.ZF)
        k, n, seed, repeats = args.k or 8, args.n or 2, args.seed or 1, args.repeats
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    spec = qam_spec(n)
    dispatch = {
        Method.FGREEDY: lambda H, msg, sysm: fgreedy(sysm),
        Method.QLP: lambda H, msg, sysm: qlp(sysm),
        Method.QZF: lambda H, msg, sysm: qzf(H, msg, spec),
        Method.ZF: lambda H, msg, sysm: zf(H, msg, spec),
    }
    print(f"kernel backend: {BACKEND}")
    print(f"{'nt':>6s} {'method':>8s} {'mean_ms':>10s} {'lp_iters':>9s}")
    results = []
    for nt in grid:
        times = {m: [] for m in methods}
        iters = []
        for rep in range(repeats):
            H = sample_channel(k, nt, stream_rng(seed, rep, STREAM_CHANNEL))
            msg = stream_rng(seed, rep, STREAM_MESSAGE).integers(0, 4, size=(k, n))
            sysm = build_system(H, msg, spec)
            iters.append(lp_mod.solve(lp_mod.build_relaxation(sysm)).iterations)
            for m in methods:
                if m not in dispatch:
                    continue
                t0 = time.perf_counter()
                dispatch[m](H, msg, sysm)
                times[m].append((time.perf_counter() - t0) * 1e3)
        for m in methods:
            if not times[m]:
                continue
            mean_ms = float(np.mean(times[m]))
            it = f"{np.mean(iters):9.1f}" if m is Method.FGREEDY else " " * 9
            print(f"{nt:6d} {m.value:>8s} {mean_ms:10.3f} {it}")
            results.append({"nt": nt, "method": m.value, "mean_ms": mean_ms,
                            "lp_iterations_mean": float(np.mean(iters))})
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(results[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(results)
        print(f"wrote {args.out}")
    return 0


def _add_common(p):
    p.add_argument("--config", help="config file (key = value lines, or a JSON manifest)")
    p.add_argument("--seed", type=int, help="base seed for all randomness")
    p.add_argument("--out", help="output path")
    p.add_argument("--nt", type=int, help="transmit antennas")
    p.add_argument("--k", type=int, help="users")
    p.add_argument("--n", type=int, help="constellation exponent (4^n-QAM)")
    p.add_argument("--epsilon", type=float, help="CSI error weight in [0, 1]")
    p.add_argument("--methods", help="comma list: fgreedy,qlp,qzf,zf,milp")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="onebitprec",
                                     description="1-bit DAC precoding experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="Monte Carlo SER sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--trials", type=int, help="Monte Carlo trials")
    p_sweep.add_argument("--snr", help="SNR grid in dB: start:stop:step or comma list")
    p_sweep.add_argument("--noiseless", action="store_true", help="disable additive noise")
    p_sweep.add_argument("--no-timing", action="store_true",
                         help="write 0.0 in wall_time_ms for byte-reproducible CSV")
    p_sweep.set_defaults(func=cmd_sweep, trials=None)

    p_oracle = sub.add_parser("oracle", help="validate against exhaustive enumeration")
    _add_common(p_oracle)
    p_oracle.add_argument("--instances", type=int, default=200)
    p_oracle.set_defaults(func=cmd_oracle, nt=4, k=2, n=2, seed=1)

    p_bench = sub.add_parser("bench", help="precoding run time versus antennas")
    _add_common(p_bench)
    p_bench.add_argument("--nt-grid", default="16,32,64,128")
    p_bench.add_argument("--repeats", type=int, default=30)
    p_bench.set_defaults(func=cmd_bench)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
