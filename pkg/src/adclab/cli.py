"""Command-line front end.

Subcommands: ``verify-theory`` (closed-form identity/optimality suite),
``train`` (one run from a config file), ``eval`` (re-score a checkpoint),
``sweep`` (lambda-prime grid), ``plot`` (density panel for a run dir).
"""

from __future__ import annotations

import argparse
import os
import sys

from adclab import rng, runner


def _cmd_verify_theory(args) -> int:
    checks = runner.verify_theory_suite(trials=args.trials, seed=args.seed)
    lines = ["name,value,threshold,passed"]
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{check.name:32s} {check.value: .3e}  (threshold {check.threshold:g})  {status}")
        lines.append(f"{check.name},{check.value!r},{check.threshold!r},{check.passed}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"report written to {args.out}")
    return 0 if all(c.passed for c in checks) else 1


def _cmd_train(args) -> int:
    config = runner.load_config(args.config)
    if args.out_dir:
        config.out_dir = args.out_dir
    elif config.out_dir is None:
        config.out_dir = f"run_{config.method_spec.method}_s{config.seed}"
    record = runner.train(config)
    for key, value in record.summary().items():
        print(f"{key} = {value}")
    print(f"artifacts in {config.out_dir}")
    return 1 if record.diverged else 0


def _cmd_eval(args) -> int:
    config = runner.load_config(args.config)
    method, seed, arrays = runner.load_checkpoint(args.checkpoint)
    if method != config.method_spec.method:
        print(f"warning: checkpoint method {method} != config method "
              f"{config.method_spec.method}", file=sys.stderr)
    params = runner.restore_params(config, arrays)
    row = runner.evaluate(config, params, step=0,
                          eval_gen=rng.philox_stream(config.seed, rng.STREAM_EVAL))
    print(runner.csv_header(config.data_spec.num_classes))
    print(runner.csv_row(row))
    return 0


def _cmd_sweep(args) -> int:
    config = runner.load_config(args.config)
    if args.out_dir:
        config.out_dir = args.out_dir
    grid = [float(v) for v in args.lambda_prime.split(",")]
    results = runner.sweep_lambda_prime(config, grid, workers=args.workers)
    cols = ["method", "lambda_prime", "seed", "final_step", "diverged", "l1_density",
            "max_frechet", "min_collapse", "label_consistency", "error"]
    lines = [",".join(cols)]
    for res in results:
        lines.append(",".join(str(res.get(c, "")) for c in cols))
    text = "\n".join(lines)
    print(text)
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        path = os.path.join(config.out_dir, "sweep.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"summary written to {path}")
    return 1 if any("error" in r for r in results) else 0


def _cmd_plot(args) -> int:
    path = runner.plot_run(args.run)
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adclab",
                                     description="conditional-GAN objective laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-theory", help="run the closed-form identity suite")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None, help="write a CSV report here")
    p.set_defaults(func=_cmd_verify_theory)

    p = sub.add_parser("train", help="train one configured method")
    p.add_argument("--config", type=str, required=True)
    p.add_argument("--out-dir", type=str, default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="re-evaluate metrics for a checkpoint")
    p.add_argument("--checkpoint", type=str, required=True)
    p.add_argument("--config", type=str, required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="lambda-prime sweep from a base config")
    p.add_argument("--config", type=str, required=True)
    p.add_argument("--lambda-prime", type=str, required=True,
                   help="comma-separated values in [0, 1]")
    p.add_argument("--out-dir", type=str, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("plot", help="render the density panel for a run directory")
    p.add_argument("--run", type=str, required=True)
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
