"""``qst`` command line: single runs, grid sweeps and the verification suites.

Exit codes: 0 pass, 1 bound or verification failure, 2 usage/config error.
Every flag can also come from ``--config FILE``, a flat ``key = value`` file
whose keys are the flag names without the leading dashes; flags win.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from .errors import QSTError
from .schedule import Pairing
from .sweep import SweepSpec, format_grid, run_sweep, worker_count
from .transfer import CSV_HEADER, Backend, Case, TransferConfig, fidelity_lower_bound, run_transfer
from .verify import format_table, run_verification

PAIRINGS = {"box": Pairing.ALGORITHM_BOX, "theorem": Pairing.THEOREM_PROOF}


class UsageError(Exception):
    pass


def read_config(path: str | os.PathLike) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def parse_range(text: str) -> tuple[int, int]:
    """``"3:40"`` or ``"3..40"`` (inclusive) or a single ``"7"``."""
    for sep in (":", ".."):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return int(lo), int(hi)
    return int(text), int(text)


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--backend", choices=[b.value for b in Backend])
    p.add_argument("--pairing", choices=sorted(PAIRINGS))
    p.add_argument("--free-angle", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qst", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one transfer; prints a CSV row")
    run.add_argument("--m", type=int)
    run.add_argument("--n", type=int)
    run.add_argument("--sender", type=int)
    run.add_argument("--receiver", type=int)
    run.add_argument("--h1", type=int)
    run.add_argument("--h2", type=int)
    run.add_argument("--header", action="store_true", help="print the CSV header first")
    _common_flags(run)
    run.set_defaults(backend="full", pairing="theorem", free_angle=0.0)

    sw = sub.add_parser("sweep", help="(m, n) grid of end-to-end fidelities")
    sw.add_argument("--m", "--m-range", dest="m_range", metavar="LO:HI")
    sw.add_argument("--n", "--n-range", dest="n_range", metavar="LO:HI")
    sw.add_argument("--case", choices=["same", "diff", "both"])
    sw.add_argument("--out", help="output CSV path (stdout if omitted)")
    _common_flags(sw)
    sw.set_defaults(backend="subspace", pairing="theorem", free_angle=0.0, case="same")

    ver = sub.add_parser("verify", help="run the property suites")
    ver.add_argument("--level", choices=["fast", "full"], default="fast")
    return parser


def parse_args(argv: list[str] | None) -> argparse.Namespace:
    parser = build_parser()
    pre, _ = parser.parse_known_args(argv)
    path = getattr(pre, "config", None)
    if path:
        values = read_config(path)
        subparser = parser._subparsers._group_actions[0].choices[pre.command]
        dests = {a.dest for a in subparser._actions}
        # sweep's --m/--n land in m_range/n_range
        alias = {"m": "m_range", "n": "n_range"} if pre.command == "sweep" else {}
        values = {alias.get(k, k): v for k, v in values.items()}
        unknown = sorted(set(values) - dests)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        subparser.set_defaults(**values)
    return parser.parse_args(argv)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required settings: " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _to_int(v):
    return v if v is None else int(v)


def cmd_run(args) -> int:
    _require(args, "m", "n", "sender", "receiver", "eps1", "eps2")
    config = TransferConfig(
        int(args.m), int(args.n), int(args.sender), int(args.receiver),
        float(args.eps1), float(args.eps2), Backend(args.backend), PAIRINGS[args.pairing],
        float(args.free_angle), _to_int(args.h1), _to_int(args.h2),
    )
    report = run_transfer(config)
    if args.header:
        print(CSV_HEADER)
    print(report.csv_row())
    return 0 if report.bound_satisfied else 1


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".part", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_sweep(args) -> int:
    _require(args, "m_range", "n_range", "eps1", "eps2")
    cases = [Case.SAME, Case.DIFF] if args.case == "both" else [Case(args.case)]
    workers = worker_count()
    status = 0
    for case in cases:
        spec = SweepSpec(parse_range(str(args.m_range)), parse_range(str(args.n_range)),
                         float(args.eps1), float(args.eps2), case, Backend(args.backend),
                         PAIRINGS[args.pairing], float(args.free_angle))
        rows = run_sweep(spec, workers)
        text = format_grid(rows)
        if args.out:
            out = Path(args.out)
            if len(cases) > 1:
                out = out.with_name(f"{out.stem}_{case.value}{out.suffix}")
            _write_atomic(out, text)
        else:
            sys.stdout.write(text)
        bound = fidelity_lower_bound(case, spec.eps1, spec.eps2)
        fs = [F for _, _, F in rows]
        bad = sum(F <= bound - 1e-12 for F in fs)
        print(f"{case.value}: {len(fs)} points, min F {min(fs):.6f}, max F {max(fs):.6f}, "
              f"bound {bound:.6f}, violations {bad}", file=sys.stderr)
        if bad:
            status = 1
    return status


def cmd_verify(args) -> int:
    results = run_verification(args.level, workers=worker_count())
    print(format_table(results))
    return 0 if all(r.passed for r in results) else 1


def main(argv: list[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:  # argparse usage errors exit 2 already
        return int(exc.code or 0)
    except (UsageError, OSError) as exc:
        print(f"qst: {exc}", file=sys.stderr)
        return 2
    handler = {"run": cmd_run, "sweep": cmd_sweep, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except (UsageError, QSTError, ValueError) as exc:
        print(f"qst: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qst: I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
