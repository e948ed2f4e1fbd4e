"""Command line entry point ``secrecy-pa``.

Exit status: 0 success, 1 I/O failure, 2 usage or configuration error.
"""

import argparse
import json
import logging
import sys
from dataclasses import replace

from .exceptions import SecrecyPAError
from .harness import CLIP_MODES, allocate_once, load_spec, run_cdf, run_snr_sweep, write_csv

EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser():
    parser = argparse.ArgumentParser(
        prog="secrecy-pa",
        description="Power allocation and secrecy-rate simulation for secure spatial modulation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON experiment config")
    common.add_argument("--threads", type=int, default=1, help="worker threads (0 = auto)")
    common.add_argument("--clip", choices=CLIP_MODES, default=None,
                        help="where to apply max(0, .) when averaging secrecy rates")

    p = sub.add_parser("sweep", parents=[common], help="average secrecy rate versus SNR")
    p.add_argument("--out", required=True, help="output CSV path")
    p = sub.add_parser("cdf", parents=[common], help="per-channel secrecy rates at one SNR")
    p.add_argument("--out", required=True, help="output CSV path")
    p = sub.add_parser("allocate", parents=[common], help="allocate power on one seeded channel")
    p.add_argument("--seed", type=_u64, required=True, help="channel seed")
    p.add_argument("--method", required=True, help="e.g. max_p, gd, es:0.01:mc_sr, fixed:0.5")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 0:
        print("secrecy-pa: --threads must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        spec = load_spec(args.config)
        if args.clip:
            spec = replace(spec, clip_mode=args.clip)
        if args.command == "allocate":
            result = allocate_once(spec, args.seed, args.method)
            print(json.dumps(result, sort_keys=True))
        elif args.command == "sweep":
            write_csv(run_snr_sweep(spec, args.threads), args.out)
        else:
            write_csv(run_cdf(spec, args.threads), args.out)
    except OSError as exc:
        print(f"secrecy-pa: {exc}", file=sys.stderr)
        return EXIT_IO
    except SecrecyPAError as exc:
        print(f"secrecy-pa: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
