"""Command-line entry point: REPL, script runner and chart reports."""
from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from pathlib import Path

from .algorithms import DEFAULT_MAX_ORBIT
from .clifford import spinor_dimension
from .errors import TensorKernelError
from .geometry import chart_command
from .parser import split_statements
from .session import Session


def _default_max_orbit() -> int:
    value = os.environ.get("TENSORKERNEL_MAX_ORBIT")
    return int(value) if value else DEFAULT_MAX_ORBIT


def _session(args) -> Session:
    return Session(tex=args.tex, post_rules=not args.no_post_rules, max_orbit=args.max_orbit)


def bundled_scripts() -> list:
    root = resources.files("tensorkernel") / "scripts"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".tk"))


def read_script(path: str) -> str:
    p = Path(path)
    if p.exists():
        return p.read_text()
    bundled = resources.files("tensorkernel") / "scripts" / path
    if bundled.is_file():
        return bundled.read_text()
    raise FileNotFoundError(path)


def repl_loop(stream, out, session: Session) -> int:
    """Read statements from ``stream`` until EOF, printing results to ``out``."""
    buffer = ""
    interactive = hasattr(stream, "isatty") and stream.isatty()
    while True:
        if interactive:
            out.write("> " if not buffer.strip() else ". ")
            out.flush()
        line = stream.readline()
        if not line:
            break
        buffer += line
        try:
            parts = split_statements(buffer)
        except TensorKernelError as exc:
            out.write(f"error: {exc}\n")
            buffer = ""
            continue
        keep = ""
        for k, (stmt, lineno, _) in enumerate(parts):
            if k == len(parts) - 1 and not stmt.rstrip().endswith((";", ".")):
                keep = stmt + "\n"
                break
            for text in session.execute(stmt, lineno):
                out.write(text + "\n")
        buffer = keep
    if buffer.strip():
        for text in session.execute(buffer):
            out.write(text + "\n")
    return 0


def run_script(text: str, session: Session, check: bool, out) -> int:
    try:
        results = session.run_script(text)
    except TensorKernelError as exc:
        out.write(f"error: {exc}\n")
        return 2
    passed = failed = 0
    for res in results:
        for line in res.output:
            out.write(line + "\n")
        if not (check and res.checked):
            continue
        for k, want in enumerate(res.expected):
            got = res.output[k] if k < len(res.output) else "<no output>"
            if got == want:
                passed += 1
            else:
                failed += 1
                out.write(f"MISMATCH line {res.line}: expected {want!r}, got {got!r}\n")
        for extra in res.output[len(res.expected):]:
            failed += 1
            out.write(f"MISMATCH line {res.line}: unexpected output {extra!r}\n")
    if check:
        out.write(f"{passed}/{passed + failed} golden lines match\n")
        return 0 if failed == 0 else 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tensorkernel", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def session_flags(sp):
        sp.add_argument("--tex", action="store_true", help="print results as TeX")
        sp.add_argument("--no-post-rules", action="store_true",
                        help="do not run PostDefaultRules after each step")
        sp.add_argument("--max-orbit", type=int, default=_default_max_orbit(),
                        help="largest symmetry orbit canonicalise may enumerate")

    session_flags(sub.add_parser("repl", help="interactive session on stdin"))
    run = sub.add_parser("run", help="execute a script (a path or a bundled script name)")
    run.add_argument("file")
    run.add_argument("--check", action="store_true",
                     help="compare output against '#>' expected lines")
    session_flags(run)
    sub.add_parser("scripts", help="list bundled scripts")

    chart = sub.add_parser("chart", help="chart reports")
    chart.add_argument("action", choices=["show"])
    chart.add_argument("name")
    chart.add_argument("--tex", action="store_true")
    chris = sub.add_parser("christoffel", help="nonzero Christoffel symbols of a chart")
    chris.add_argument("name")
    chris.add_argument("--tex", action="store_true")
    mx = sub.add_parser("maxwell", help="Maxwell residuals on a chart")
    mx.add_argument("name")
    mx.add_argument("--spec", help="field spec file (tensorkernel-fields v1)")
    mx.add_argument("--tex", action="store_true")
    sd = sub.add_parser("spinor-dim", help="spinor dimension for vector dimension n")
    sd.add_argument("n", type=int)
    return p


def main(argv=None, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    out = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "repl":
            return repl_loop(stdin, out, _session(args))
        if args.command == "run":
            return run_script(read_script(args.file), _session(args), args.check, out)
        if args.command == "scripts":
            out.write("\n".join(bundled_scripts()) + "\n")
            return 0
        if args.command == "spinor-dim":
            out.write(f"{spinor_dimension(args.n)}\n")
            return 0
        if args.command == "chart":
            lines = chart_command(["chart", args.action, args.name], args.tex)
        elif args.command == "christoffel":
            lines = chart_command(["christoffel", args.name], args.tex)
        else:
            lines = chart_command(["maxwell", args.name], args.tex, args.spec)
        out.write("\n".join(lines) + "\n")
        return 0
    except (TensorKernelError, ValueError, OSError) as exc:
        out.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
