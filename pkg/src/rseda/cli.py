"""Command line: ``rseda bench | fit | synth``.

Settings come from built-in defaults, then an optional YAML file
(``--config``), then flags. Exit status: 0 success, 1 I/O or data error,
2 usage error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import logging
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from . import __version__, bench, io, rv
from .algorithm import RsEdaConfig, optimize
from .baseline import EmnaConfig, emna_optimize

log = logging.getLogger("rseda")

ALGORITHMS = ("rs-eda", "emna")

DEFAULTS = {
    "seed": 0,
    "rseda": {},
    "emna": {},
    "bench": {"dim": 5, "budget": 10**6, "reps": 1, "algs": "rs-eda,emna", "n_init": 20000, "population": None},
    "fit": {"j_max": 2, "budget": 300000, "n_init": 20000, "curve_points": 1000},
    "synth": {"times": "random:0:2000:30", "sigma": 5.0},
}


class UsageError(Exception):
    pass


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in (over or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path, section: str, flags: dict) -> dict:
    """Resolve defaults < file < flags for one command section.

    Returns the merged document; ``flags`` entries that are ``None`` were not
    given on the command line.
    """
    doc = copy.deepcopy(DEFAULTS)
    if path:
        with open(path, encoding="utf-8") as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise UsageError(f"config file {path} must hold a mapping")
        doc = _merge(doc, loaded)
    if flags.get("seed") is not None:
        doc["seed"] = flags.pop("seed")
    flags.pop("seed", None)
    doc[section] = _merge(doc[section], {k: v for k, v in flags.items() if v is not None})
    return doc


def _metadata(command: str, doc: dict) -> dict:
    return {"tool": "rseda", "version": __version__, "command": command, "seed": doc["seed"],
            "config": doc, "config_hash": io.config_hash(doc)}


def _rseda_config(doc: dict, budget: int, n_init: int, seed: int) -> RsEdaConfig:
    kw = {"n_init": n_init, "max_evaluations": budget}
    kw.update(doc.get("rseda") or {})
    kw["seed"] = seed
    try:
        return RsEdaConfig(**kw)
    except TypeError as exc:
        raise UsageError(f"bad rseda config section: {exc}") from None


def cmd_bench(args) -> int:
    doc = load_config(args.config, "bench", {"seed": args.seed, "dim": args.dim, "budget": args.budget,
                                             "reps": args.reps, "algs": args.algs, "n_init": args.n_init,
                                             "population": args.population})
    cfg = doc["bench"]
    algs = [a.strip() for a in str(cfg["algs"]).split(",") if a.strip()]
    unknown = [a for a in algs if a not in ALGORITHMS]
    if unknown or not algs:
        raise UsageError(f"unknown algorithm: {','.join(unknown) or '(none)'}; choose from {','.join(ALGORITHMS)}")
    dim, budget, reps, seed = int(cfg["dim"]), int(float(cfg["budget"])), int(cfg["reps"]), int(doc["seed"])
    n_init = int(cfg["n_init"])
    population = int(cfg["population"] or n_init)

    out = io.ensure_dir(args.out)
    traces = io.ensure_dir(out / "traces")
    inst = bench.make_instance(dim, seed)
    inst.save(out / "instance.json")
    rows = []
    for alg in algs:
        for rep in range(reps):
            run_seed = seed + rep
            t0 = time.perf_counter()
            if alg == "rs-eda":
                best, trace = optimize(inst.objective(), inst.bounds(), _rseda_config(doc, budget, n_init, run_seed))
            else:
                ekw = {"population_size": population, "max_evaluations": budget}
                ekw.update(doc.get("emna") or {})
                ekw["seed"] = run_seed
                try:
                    ecfg = EmnaConfig(**ekw)
                except TypeError as exc:
                    raise UsageError(f"bad emna config section: {exc}") from None
                best, trace = emna_optimize(inst.objective(), inst.bounds(), ecfg)
            wall = time.perf_counter() - t0
            trace.to_csv(traces / f"{alg}_seed{run_seed}.csv")
            rows.append([alg, run_seed, repr(best.fitness), trace.records[-1][0], f"{wall:.3f}"])
            log.info("%s seed %d: best g = %.6f (%d evaluations, %.1fs)", alg, run_seed, best.fitness,
                     trace.records[-1][0], wall)
    with open(out / "summary.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(io.SUMMARY_HEADER)
        w.writerows(rows)
    io.write_json(_metadata("bench", doc), out / "metadata.json")
    for alg in algs:
        vals = [float(r[2]) for r in rows if r[0] == alg]
        print(f"{alg:8s} mean final g = {np.mean(vals):.4f} over {len(vals)} run(s)")
    return 0


def _sidecar(report_path: Path, suffix: str) -> Path:
    return report_path.with_name(f"{report_path.stem}{suffix}")


def cmd_fit(args) -> int:
    doc = load_config(args.config, "fit", {"seed": args.seed, "j_max": args.j_max, "budget": args.budget,
                                           "n_init": args.n_init})
    cfg = doc["fit"]
    data = io.read_rv_csv(args.data)
    j_max = int(cfg["j_max"])
    if j_max < 0:
        raise UsageError("--jmax must be >= 0")
    config = _rseda_config(doc, int(float(cfg["budget"])), int(cfg["n_init"]), int(doc["seed"]))
    report = rv.select_model(data, j_max, config)

    out = Path(args.out)
    if out.parent:
        io.ensure_dir(out.parent)
    io.write_json(report.as_dict(), out)
    io.write_json(_metadata("fit", doc), _sidecar(out, "_meta.json"))
    grid = np.linspace(data.t.min(), data.t.max(), int(cfg["curve_points"]))
    print(f"{'j':>2} {'k':>3} {'n':>4} {'ln L':>14} {'BIC':>14}")
    for m in report.models:
        if m.available:
            io.write_curve_csv(grid, rv.model_velocity(grid, m.params), _sidecar(out, f"_curve_j{m.j}.csv"))
            mark = "  <- selected" if m.j == report.selected_j else ""
            print(f"{m.j:>2} {m.k:>3} {m.n:>4} {m.ln_l:>14.4f} {m.bic:>14.4f}{mark}")
        else:
            print(f"{m.j:>2} {m.k:>3} {m.n:>4} {'failed':>14} {'-':>14}")
    return 0


def parse_times(text: str, seed: int) -> np.ndarray:
    """``start:stop:count`` (even grid), ``random:start:stop:count`` (sorted
    uniform draws), or a comma-separated list of times."""
    parts = text.split(":")
    try:
        if parts[0] == "random" and len(parts) == 4:
            lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
            return np.sort(np.random.default_rng(seed).uniform(lo, hi, n))
        if len(parts) == 3:
            return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse times value {text!r}") from None


def cmd_synth(args) -> int:
    doc = load_config(args.config, "synth", {"seed": args.seed, "times": args.times, "sigma": args.sigma})
    cfg = doc["synth"]
    try:
        params = io.read_params_json(args.params)
    except (KeyError, TypeError) as exc:
        raise io.DataFormatError(f"invalid params file: {exc}") from None
    seed = int(doc["seed"])
    times = parse_times(str(cfg["times"]), seed)
    sigmas = np.full(times.shape, float(cfg["sigma"]))
    # noise stream is offset so it does not replay the epoch draws
    data = rv.generate_synthetic(params, times, sigmas, seed=seed + 1)
    out = Path(args.out)
    if out.parent:
        io.ensure_dir(out.parent)
    io.write_rv_csv(data, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rseda", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--config", default=None, help="YAML file with per-command sections")

    b = sub.add_parser("bench", help="run RSF7 benchmark repetitions")
    common(b)
    b.add_argument("--dim", type=int)
    b.add_argument("--budget", type=float)
    b.add_argument("--reps", type=int)
    b.add_argument("--algs", help="comma list from: " + ",".join(ALGORITHMS))
    b.add_argument("--n-init", dest="n_init", type=int)
    b.add_argument("--population", type=int, help="EMNA population (default: n-init)")
    b.add_argument("--out", required=True, help="output directory")
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("fit", help="fit 0..jmax planet models to an RV CSV and compare BIC")
    common(f)
    f.add_argument("data")
    f.add_argument("--jmax", dest="j_max", type=int)
    f.add_argument("--budget", type=float)
    f.add_argument("--n-init", dest="n_init", type=int)
    f.add_argument("--out", required=True, help="report JSON path")
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("synth", help="simulate an RV dataset from a params JSON")
    common(s)
    s.add_argument("params")
    s.add_argument("--times", help="start:stop:count, random:start:stop:count, or t1,t2,...")
    s.add_argument("--sigma", type=float)
    s.add_argument("--out", required=True, help="output CSV path")
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rseda: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, yaml.YAMLError) as exc:
        print(f"rseda: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
