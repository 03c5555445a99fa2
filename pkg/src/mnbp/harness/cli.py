"""Command-line entry point: ``mnbp <subcommand> ...``."""
from __future__ import annotations

import argparse
import sys

from ..code import build_code, save_matrix
from .config import ConfigError, load_config
from .csvio import write_curve_csv, write_stats_csv, write_trials_csv
from .experiment import calibrate, run_dp_curve, run_experiment


def _cmd_gen_code(args) -> int:
    code = build_code(args.q, args.n, args.rate, args.col_weight, args.seed)
    save_matrix(code.A, args.out[0])
    save_matrix(code.B, args.out[1])
    print(f"GF({code.q}) code N={code.N} M={code.M_len} rate={code.rate} "
          f"nnz(A)={code.A.nnz} nnz(B)={code.B.nnz}")
    return 0


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    if args.workers:
        cfg = cfg.replace(workers=args.workers)
    stats, records = run_experiment(cfg, with_records=True)
    out = args.out or cfg.out
    if out is None:
        raise ConfigError("no output path: pass --out or set 'out' in the config")
    write_stats_csv(stats, out)
    log = args.trials_log or cfg.trials_log
    if log:
        write_trials_csv([r for recs in records for r in recs], log)
    for s in stats:
        print(f"{s.channel} q={s.q} {s.source} noise={s.noise:g}: "
              f"<t_SUS>={s.mean_t_sus:.2f} <t_PUS>={s.mean_t_pus:.2f} "
              f"ratio_of_means={s.ratio_of_means:.3f} mean_ratio={s.mean_ratio:.3f} "
              f"paired={s.paired_trials}/{s.trials}")
    return 0


def _cmd_dp_curve(args) -> int:
    cfg = load_config(args.config)
    if args.workers:
        cfg = cfg.replace(workers=args.workers)
    curve = run_dp_curve(cfg, bin_width=args.bin_width, min_count=args.min_count)
    out = args.out or cfg.out
    if out is None:
        raise ConfigError("no output path: pass --out or set 'out' in the config")
    write_curve_csv(curve, out)
    print(f"{len(curve.bins)} non-empty bins, {len(curve.reported())} with a ratio")
    return 0


def _cmd_calibrate(args) -> int:
    cfg = load_config(args.config)
    cfg = cfg.replace(trials=args.trials)
    noise = calibrate(cfg, target=args.target, steps=args.steps,
                      log=lambda msg: print(msg, file=sys.stderr))
    print(f"{noise:.6g}")
    return 0


def _cmd_selftest(args) -> int:
    from ..selftest import run_selftest
    return run_selftest(seed=args.seed)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mnbp", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-code", help="generate and save A and B matrices")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--n", type=int, required=True, help="source block length in symbols")
    g.add_argument("--rate", default="1/3")
    g.add_argument("--col-weight", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", nargs=2, required=True, metavar=("A.mtx", "B.mtx"))
    g.set_defaults(func=_cmd_gen_code)

    e = sub.add_parser("experiment", help="Monte-Carlo SUS vs PUS statistics")
    e.add_argument("--config", required=True)
    e.add_argument("--out")
    e.add_argument("--trials-log")
    e.add_argument("--workers", type=int)
    e.set_defaults(func=_cmd_experiment)

    d = sub.add_parser("dp-curve", help="per-iteration correction gain ratio curve")
    d.add_argument("--config", required=True)
    d.add_argument("--out")
    d.add_argument("--bin-width", type=float)
    d.add_argument("--min-count", type=int)
    d.add_argument("--workers", type=int)
    d.set_defaults(func=_cmd_dp_curve)

    c = sub.add_parser("calibrate", help="bisect the noise level for a target PUS load")
    c.add_argument("--config", required=True)
    c.add_argument("--target", type=float, default=45.0)
    c.add_argument("--trials", type=int, default=40)
    c.add_argument("--steps", type=int, default=10)
    c.set_defaults(func=_cmd_calibrate)

    s = sub.add_parser("selftest", help="run the built-in oracle checks")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"mnbp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
