"""Command line pipeline: ``gen`` -> ``run`` -> ``audit`` -> ``report``, plus ``diff``.

Exit status: 0 on success / audit pass, 1 on audit failure or divergence,
2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from . import tracing
from .audit import checks_to_csv
from .classify import annotated_lines, classify
from .heap import HeapError, Strategy
from .oracle import run_both
from .workbench import atomic_write, full_audit, run
from .workload import (DEFAULT_MIX, GENERATORS, WorkloadError, WorkloadSpec, dump_workload,
                       generate, load_workload)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parse_mix(text: str) -> dict[str, float]:
    mix = {k: 0.0 for k in DEFAULT_MIX}
    for part in text.split(","):
        name, _, value = part.partition("=")
        if name.strip() not in mix:
            raise UsageError(f"unknown operation in --mix: {name!r}")
        try:
            mix[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"bad probability in --mix: {part!r}") from None
    return mix


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _spec(args) -> WorkloadSpec:
    spec = WorkloadSpec(generator=args.generator, size=args.size, seed=args.seed,
                        strategy=Strategy(args.strategy), drain_tail=args.drain_tail)
    if getattr(args, "mix", None):
        spec.mix = _parse_mix(args.mix)
    return spec


def _workload(args):
    if args.workload:
        try:
            with open(args.workload, encoding="utf-8") as fp:
                return load_workload(fp)
        except OSError as exc:
            raise UsageError(f"cannot read {args.workload}: {exc}") from None
    return generate(_spec(args))


def _workload_text(wl) -> str:
    buf = io.StringIO()
    dump_workload(wl, buf)
    return buf.getvalue()


def _load_trace(path: str):
    try:
        with open(path, encoding="utf-8") as fp:
            return tracing.load(fp)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except tracing.TraceFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_gen(args) -> int:
    _emit(_workload_text(generate(_spec(args))), args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    trace = run(_workload(args), args.strategy)
    _emit(tracing.serialize(trace).decode("utf-8"), args.out)
    return EXIT_OK


def _render(report_dict: dict, fmt: str) -> str:
    if fmt == "csv":
        return checks_to_csv(report_dict["checks"])
    return json.dumps(report_dict, indent=2) + "\n"


def cmd_audit(args) -> int:
    trace = _load_trace(args.trace)
    report = full_audit(trace, check_replay=not args.no_replay)
    _emit(_render(report.to_dict(), args.format), args.out)
    if args.annotated:
        cl = classify(trace)
        atomic_write(args.annotated, "".join(line + "\n"
                                             for line in annotated_lines(trace, cl.links)))
    for c in report.failures():
        print(f"FAIL {c.name}: lhs={c.lhs} rhs={c.rhs:.6f}", file=sys.stderr)
    return EXIT_OK if report.overall_pass else EXIT_FAIL


def cmd_report(args) -> int:
    try:
        with open(args.report, encoding="utf-8") as fp:
            data = json.load(fp)
    except OSError as exc:
        raise UsageError(f"cannot read {args.report}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.report}: invalid JSON: {exc}") from None
    if "checks" not in data:
        raise UsageError(f"{args.report} is not an audit report")
    _emit(_render(data, args.format), args.out)
    return EXIT_OK if data.get("overall_pass") else EXIT_FAIL


def cmd_diff(args) -> int:
    result = run_both(_workload(args), args.strategy)
    _emit(str(result) + "\n", args.out)
    return EXIT_OK if result.ok else EXIT_FAIL


def _add_workload_args(p, positional=True):
    if positional:
        p.add_argument("workload", nargs="?", help="workload file (default: generate one)")
    p.add_argument("--generator", choices=GENERATORS, default="random_mixed")
    p.add_argument("--size", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--drain-tail", action="store_true",
                   help="append delete-mins until every heap is empty")
    p.add_argument("--mix", help="random_mixed probabilities, e.g. insert=0.5,delete_min=0.5")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pairaudit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    strategies = [s.value for s in Strategy]

    p = sub.add_parser("gen", help="generate a workload file")
    _add_workload_args(p, positional=False)
    p.add_argument("--strategy", choices=strategies, default="twopass")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="run a workload with tracing")
    _add_workload_args(p)
    p.add_argument("--strategy", choices=strategies, default="twopass")
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("audit", help="classify and audit a trace")
    p.add_argument("trace")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.add_argument("--annotated", help="also write the annotated trace here")
    p.add_argument("--no-replay", action="store_true", help="skip the replay identity check")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("report", help="render a saved JSON audit report")
    p.add_argument("report")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("diff", help="compare the pairing heap against the reference queue")
    _add_workload_args(p)
    p.add_argument("--strategy", choices=strategies, default="twopass")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diff)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, WorkloadError, HeapError, OSError) as exc:
        print(f"pairaudit: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
