"""``pq5g`` command line: demo, kat, bench and fuzz.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigurationError, KatFormatError
from .kem.hybrid import ALL_MODES, KemMode, ModeKind
from .kem.params import LEVELS

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2
log = logging.getLogger("pq5g")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 already; keep the message terse
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not -(2**63) <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pq5g", description="Quantum-safe UE-to-UE 5G communication simulator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, level_default=768, mode_default="hybrid"):
        sp.add_argument("--level", type=int, choices=LEVELS, default=level_default)
        sp.add_argument("--mode", choices=[k.value for k in ModeKind], default=mode_default)
        sp.add_argument("--seed", type=_seed, default=None, help="master seed; live entropy when absent")
        sp.add_argument("--output", "-o", type=Path, default=None, help="write the JSON result here")

    demo = sub.add_parser("demo", help="run the two-UE workflow")
    common(demo)
    demo.add_argument("--dn", action="store_true", help="two UPFs joined by a DN link")
    demo.add_argument("--topology", type=Path, default=None, help="topology JSON (or $PQ5G_TOPOLOGY)")
    demo.add_argument("--message", default="hello", help="application message sent by the client")
    demo.add_argument("--swap", action="store_true", help="UE1 acts as the server")
    demo.add_argument("--transport", choices=("inproc", "udp"), default="inproc")
    demo.add_argument("--dump-dir", type=Path, default=None, help="write one link-tap dump per link")

    kat = sub.add_parser("kat", help="check ML-KEM known-answer vectors")
    kat.add_argument("--level", type=int, choices=LEVELS, default=None,
                     help="level (default: every bundled level, or inferred from --kat-file)")
    kat.add_argument("--kat-file", type=Path, default=None)
    kat.add_argument("--format", choices=("fips203", "round3"), default="fips203")
    kat.add_argument("--output", "-o", type=Path, default=None)

    bench = sub.add_parser("bench", help="handshake latency bench (all modes unless --mode/--level)")
    common(bench, level_default=None, mode_default=None)
    bench.add_argument("--iters", type=_positive, default=100)
    bench.add_argument("--clients", type=_positive, default=1)

    fuzz = sub.add_parser("fuzz", help="randomized robustness suites")
    common(fuzz)
    fuzz.add_argument("--iters", type=_positive, default=200)
    return p


def _emit(doc: dict, output: Path | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False)
    if output is None:
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text + "\n")


def _selected_mode(args) -> KemMode:
    return KemMode(ModeKind(args.mode), args.level)


def cmd_demo(args) -> int:
    from .core5g.topology import resolve_topology
    from .ue_node import default_configs, run_workflow

    try:
        topology = resolve_topology(args.topology, dn=args.dn)
        if args.dn and not topology.dn_enabled:
            raise ConfigurationError("--dn given but the topology file disables the DN link")
        ue1, ue2 = default_configs(topology, "server" if args.swap else "client")
    except ConfigurationError as exc:
        print(f"pq5g demo: {exc}", file=sys.stderr)
        return EXIT_USAGE
    mode = _selected_mode(args)
    result = run_workflow(topology, ue1, ue2, mode, args.message.encode(), args.seed, transport=args.transport)
    for ue in (result.ue1, result.ue2):
        for entry in ue.transcript:
            print(f"[{ue.role:6}] {ue.supi}  {entry['tag']:<22} {entry['detail']}")
    if result.dn_frames:
        print(f"DN link carried {result.dn_frames} GTP-U frames")
    if args.dump_dir is not None and result.tap is not None:
        for path in result.tap.write(args.dump_dir):
            log.info("wrote %s", path)
    _emit(result.to_dict(), args.output)
    if result.success:
        print(f"success: {result.negotiated_mode}, handshake {result.handshake_duration_s * 1e3:.2f} ms")
        return EXIT_OK
    print(f"failure at {result.failing_step}: {result.error}", file=sys.stderr)
    return EXIT_FAILURE


def cmd_kat(args) -> int:
    from .kem.kat import bundled_kat_path, infer_level, load_rsp, verify

    if args.kat_file is not None:
        jobs = [(args.kat_file, args.level)]
    else:
        jobs = [(bundled_kat_path(lvl), lvl) for lvl in ([args.level] if args.level else LEVELS)]
    files, ok = [], True
    for path, level in jobs:
        try:
            records = load_rsp(path, args.format)
            level = level or infer_level(records)
        except (OSError, KatFormatError, ValueError) as exc:
            print(f"pq5g kat: cannot use {path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        report = verify(records, level)
        for c in report.failures:
            print(f"FAIL count={c.count} op={c.op} field={c.field} offset={c.offset} {c.detail}")
        n_fail = len(report.failures)
        print(f"ML-KEM-{level}: {len(report.checks) - n_fail}/{len(report.checks)} checks passed ({path.name})")
        ok &= report.passed
        files.append({"path": str(path), "format": args.format, **report.to_dict()})
    _emit({"schema": "pq5g.kat_report/v1", "success": ok, "files": files}, args.output)
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_bench(args) -> int:
    from .bench import run_bench

    modes = [
        m for m in ALL_MODES
        if (args.mode is None or m.kind.value == args.mode) and (args.level is None or m.level == args.level)
    ]
    seed = 0 if args.seed is None else args.seed
    report = run_bench(modes, args.iters, args.clients, seed)
    print(f"{'mode':<18}{'count':>7}{'fail':>6}{'mean us':>12}{'median us':>12}{'p95 us':>12}")
    for r in report["rows"]:
        print(f"{r['mode']:<18}{r['count']:>7}{r['failures']:>6}{r['mean_us']:>12.1f}"
              f"{r['median_us']:>12.1f}{r['p95_us']:>12.1f}")
    _emit(report, args.output)
    return EXIT_OK if report["failures"] == 0 else EXIT_FAILURE


def cmd_fuzz(args) -> int:
    from .fuzz import run_fuzz

    seed = 0 if args.seed is None else args.seed
    report = run_fuzz(args.iters, seed, modes=(_selected_mode(args),))
    for s in report["suites"]:
        print(f"{s['name']:<32} {s['cases']:>6} cases  {s['violations']} violations  {s['seconds']:.2f}s")
    _emit(report, args.output)
    return EXIT_OK if report["violations"] == 0 else EXIT_FAILURE


COMMANDS = {"demo": cmd_demo, "kat": cmd_kat, "bench": cmd_bench, "fuzz": cmd_fuzz}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"pq5g {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
