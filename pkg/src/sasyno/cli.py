"""Command-line entry point: ``sasyno {oversample,evaluate,validate-fig1,gen-data}``."""

import argparse
import logging
import sys

import numpy as np

from .dataset import generate_gaussian_imbalanced, load_csv, write_csv
from .harness import load_config, run_experiment, validate_disturbance, with_seed
from .samplers import SAMPLER_KINDS, SamplerConfig, apply_sampler
from .validation import DataFormatError


def _vector(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _label_column(text):
    return int(text) if text.lstrip("-").isdigit() else text


def build_parser():
    parser = argparse.ArgumentParser(prog="sasyno", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oversample", help="resample a CSV and write the result")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--sampler", default="sasyno", type=str.upper,
                   choices=SAMPLER_KINDS, metavar="{" + ",".join(k.lower() for k in SAMPLER_KINDS) + "}")
    p.add_argument("--label-column", default="-1", type=_label_column,
                   help="label column index or header name (default: last column)")
    p.add_argument("--k", type=int, default=5, help="neighbour count for SMOTE-family samplers")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("evaluate", help="run a Monte Carlo comparison from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--report-dir", help="override report.dir")
    p.add_argument("--jobs", type=int, help="parallel replicates")

    p = sub.add_parser("validate-fig1", help="check Gaussian jitter and 3-sigma box coverage")
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--draws", type=int, default=100_000)
    p.add_argument("--sigma", type=_vector, help="per-dimension sigma (default all ones)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gen-data", help="write a two-Gaussian imbalanced dataset as CSV")
    p.add_argument("--output", required=True)
    p.add_argument("--n0", type=int, default=50)
    p.add_argument("--n1", type=int, default=950)
    p.add_argument("--center0", type=_vector, default=[0.0, 0.0])
    p.add_argument("--center1", type=_vector, default=[1.0, 1.0])
    p.add_argument("--spread0", type=float, default=1.0)
    p.add_argument("--spread1", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _oversample(args):
    data = load_csv(args.input, args.label_column)
    config = SamplerConfig(args.sampler, k_neighbors=args.k)
    out = apply_sampler(config, data, np.random.default_rng(args.seed))
    write_csv(args.output, out)
    counts = ", ".join(f"{lab}={out.count(lab)}" for lab in out.labels)
    print(f"wrote {out.n_samples} rows ({counts}) to {args.output}")
    return 0


def _evaluate(args):
    config = load_config(args.config)
    if args.seed is not None:
        config = with_seed(config, args.seed)
    if args.report_dir:
        config.report_dir = args.report_dir
    if args.jobs:
        config.n_jobs = args.jobs
    report = run_experiment(config)
    sys.stdout.write(report.format_table())
    if config.report_dir:
        for path in report.write(config.report_dir).values():
            print(f"wrote {path}")
    return 0


def _validate(args):
    cov = validate_disturbance(args.dims, args.sigma, args.draws, np.random.default_rng(args.seed))
    sys.stdout.write(cov.format())
    return 0 if cov.passed else 1


def _gen_data(args):
    data = generate_gaussian_imbalanced(args.n0, args.n1, (args.center0, args.center1),
                                        (args.spread0, args.spread1), args.seed)
    write_csv(args.output, data, header=True)
    print(f"wrote {data.n_samples} rows to {args.output}")
    return 0


COMMANDS = {"oversample": _oversample, "evaluate": _evaluate,
            "validate-fig1": _validate, "gen-data": _gen_data}


def main(argv=None):
    # argparse exits with status 2 and usage text on bad input
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (DataFormatError, ValueError, OSError) as exc:
        print(f"sasyno {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
