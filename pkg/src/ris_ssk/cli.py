import argparse
import dataclasses
import logging
import sys
from collections.abc import Sequence

from ris_ssk.linkmodel import aggregate_k
from ris_ssk.model import Error, NakagamiParams, Rpm, RpmSymbol, SystemConfig, parse_scheme
from ris_ssk.montecarlo import MODES, McConfig, estimate_ped
from ris_ssk.sweep import (
    evaluate_row,
    load_sweep_config,
    run_sweep,
    write_rows,
    write_sweep_csv,
)
from ris_ssk.validation import run_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

DEFAULT_POINT_TRIALS = 1_000_000

# Shared options are accepted before or after the subcommand
GLOBAL_DEFAULTS = {
    "seed": None,
    "trials": None,
    "mode": None,
    "workers": 1,
    "verbose": False,
    "quiet": False,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, value)
    if args.verbose and args.quiet:
        parser.error("--verbose cannot be combined with --quiet")
    _configure_logging(args.verbose, args.quiet)
    try:
        status: int = args.handler(args, parser)
    except Error as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return status


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="Monte-Carlo seed")
    common.add_argument("--trials", type=int, help="Monte-Carlo trial count")
    common.add_argument("--mode", choices=MODES, help="Monte-Carlo system model")
    common.add_argument("--workers", type=int, help="worker processes (default: 1)")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")

    parser = argparse.ArgumentParser(
        prog="ris-ssk",
        parents=[common],
        description="Error probability of RIS-assisted SSK / SSK-RPM with impaired transceivers",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    point = commands.add_parser(
        "point", parents=[common], help="evaluate a single configuration"
    )
    point.add_argument("--scheme", type=parse_scheme, required=True, help="ssk or rpm-M")
    point.add_argument("--snr-db", type=float, required=True, help="average SNR in dB")
    point.add_argument("--n", type=int, default=32, help="RIS elements")
    point.add_argument("--nr", type=int, default=2, help="receive branches")
    point.add_argument("--m", type=float, default=1.0, help="Nakagami shape")
    point.add_argument("--omega", type=float, default=1.0, help="Nakagami spread")
    point.add_argument("--p", type=float, default=0.0, help="power balance factor")
    point.add_argument("--k", type=float, default=None, help="aggregate impairment level")
    point.add_argument("--kt", type=float, default=None, help="transmitter impairment level")
    point.add_argument("--kr", type=float, default=None, help="receiver impairment level")
    point.add_argument("--psi-index", type=int, default=None, help="pin RPM symbol 1..M")
    point.add_argument("--mc", action="store_true", help="add Monte-Carlo columns")
    point.set_defaults(handler=cmd_point)

    sweep = commands.add_parser("sweep", parents=[common], help="run a parameter sweep")
    sweep.add_argument("config", help="sweep config file")
    sweep.add_argument("-o", "--output", default=None, help="CSV path (default: config or stdout)")
    sweep.set_defaults(handler=cmd_sweep)

    validate = commands.add_parser("validate", parents=[common], help="run the invariant suite")
    validate.add_argument("--quick", action="store_true", help="reduced trial counts")
    validate.set_defaults(handler=cmd_validate)

    return parser


def cmd_point(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.k is not None and (args.kt is not None or args.kr is not None):
        parser.error("--k cannot be combined with --kt/--kr")
    if args.k is not None:
        k = args.k
    else:
        k = aggregate_k(args.kt or 0.0, args.kr or 0.0)

    cfg = SystemConfig.from_snr_db(
        args.snr_db,
        n_elements=args.n,
        n_branches=args.nr,
        k=k,
        scheme=args.scheme,
        channel=NakagamiParams(m=args.m, omega=args.omega, p=args.p),
    )
    psi = None
    if args.psi_index is not None:
        if not isinstance(cfg.scheme, Rpm):
            parser.error("--psi-index requires an rpm-M scheme")
        psi = RpmSymbol(index=args.psi_index, order=cfg.scheme.order).phase

    estimate = None
    if args.mc:
        mc = McConfig.fitted(
            args.trials if args.trials is not None else DEFAULT_POINT_TRIALS,
            seed=args.seed if args.seed is not None else 0,
            mode=args.mode if args.mode is not None else "exact",
        )
        estimate = estimate_ped(cfg, mc, psi=psi, workers=args.workers)

    ber = (cfg.n_branches & (cfg.n_branches - 1)) == 0
    row = evaluate_row(cfg, args.snr_db, estimate=estimate, ber=ber, psi=psi)
    write_rows(iter([row]), sys.stdout)

    summary = [
        f"{row['scheme']}: N={cfg.n_elements} N_R={cfg.n_branches} m={cfg.channel.m:g} "
        f"k={cfg.k:g} gamma={args.snr_db:g} dB",
        f"  PED (closed form)   {row['ped_analytic']}",
        f"  PED high-SNR floor  {row['ped_high_snr']}",
        f"  PED low-SNR limit   {row['ped_low_snr']}",
        f"  PED zero-SNR limit  {row['ped_zero_snr']}",
    ]
    if row["ber_bound"]:
        vacuous = " (vacuous)" if row["vacuous"] == "1" else ""
        summary.append(f"  BER union bound     {row['ber_bound']}{vacuous}")
    if estimate is not None:
        summary.append(
            f"  PED {estimate.mode} MC      {estimate.p_hat:.6e} "
            f"[{estimate.ci_low:.6e}, {estimate.ci_high:.6e}] from {estimate.trials} trials"
        )
    print("\n".join(summary), file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = load_sweep_config(args.config)
    overrides = {
        name: value
        for name, value in (("trials", args.trials), ("seed", args.seed), ("mode", args.mode))
        if value is not None
    }
    if overrides:
        spec = dataclasses.replace(spec, **overrides)

    output = args.output if args.output is not None else spec.output
    if output is None:
        write_rows(run_sweep(spec, workers=args.workers), sys.stdout)
    else:
        write_sweep_csv(spec, output, workers=args.workers)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    results = run_checks(quick=args.quick, workers=args.workers)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.name}: {result.detail}")
    failed = sum(not result.passed for result in results)
    if failed:
        print(f"{failed} of {len(results)} checks failed", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(message)s",
        stream=sys.stderr,
    )
