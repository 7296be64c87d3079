"""Interactive session: property table, expression registers and transcript."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .algorithms import DEFAULT_MAX_ORBIT, apply_post_rules, run_algorithm
from .errors import TensorKernelError, UnknownProperty
from .parser import Statement, parse_rule, parse_statement, split_statements
from .printing import print_plain, print_rule, print_tex
from .properties import PropertyTable
from .rewrite import make_rule


@dataclass
class StatementResult:
    text: str
    line: int
    output: list
    expected: list

    @property
    def checked(self) -> bool:
        return bool(self.expected)

    @property
    def passed(self) -> bool:
        return self.output == self.expected


@dataclass
class Session:
    props: PropertyTable = field(default_factory=PropertyTable)
    tex: bool = False
    post_rules: bool = True
    max_orbit: int = DEFAULT_MAX_ORBIT
    registers: dict = field(default_factory=dict)
    rules: dict = field(default_factory=dict)
    current: Optional[str] = None
    counter: int = 0
    transcript: list = field(default_factory=list)
    charts: dict = field(default_factory=dict)

    # ------------------------------------------------------------ printing

    def render(self, e) -> str:
        return print_tex(e) if self.tex else print_plain(e)

    def _line(self, label: str, body: str) -> str:
        return f"{label} := {body};"

    # ------------------------------------------------------------ execution

    def execute(self, text: str, line: int = 1) -> list:
        """Run one statement; errors are reported as output lines."""
        text = text.strip()
        if not text:
            return []
        try:
            out = self._execute(parse_statement(text, self.props, line))
        except TensorKernelError as exc:
            out = [f"error: {exc}"]
        self.transcript.extend(out)
        return out

    def _execute(self, st: Statement) -> list:
        quiet = st.terminator == "."
        if st.kind == "PropertyDecl":
            self.props.declare(st.payload["targets"], st.payload["property"], st.payload["args"])
            return []
        if st.kind == "ChartCommand":
            return self._chart(st.payload["words"])
        if st.kind == "AlgorithmCall":
            return self._algorithm(st.payload, quiet)
        return self._assign(st.payload, quiet)

    def _assign(self, p: dict, quiet: bool) -> list:
        if p["kind"] == "rule":
            rule = make_rule(p["lhs"], p["rhs"])
            name = p["name"] or f"rule{len(self.rules) + 1}"
            self.rules[name] = rule
            return [] if quiet else [self._line(name, print_rule(rule.lhs, rule.rhs, self.tex))]
        e = p["lhs"]
        if self.post_rules:
            e = apply_post_rules(e, self.props, self.max_orbit)
        label = p["name"]
        if label is None:
            self.counter += 1
            label = str(self.counter)
        self.registers[label] = e
        self.current = label
        return [] if quiet else [self._line(label, self.render(e))]

    def _resolve(self, target: str) -> str:
        target = target.strip()
        if target == "%":
            if self.current is None:
                raise UnknownProperty("no current expression")
            return self.current
        if target in self.registers:
            return target
        raise UnknownProperty(f"no expression named {target}")

    def _algorithm(self, p: dict, quiet: bool) -> list:
        label = self._resolve(p["target"])
        rule = None
        if p["name"] == "substitute":
            rule = self._rule_arg(p["args"])
        e = run_algorithm(p["name"], self.registers[label], self.props,
                          repeat=p["mode"] == "repeat", args=p["args"], rule=rule,
                          max_orbit=self.max_orbit)
        if self.post_rules:
            e = apply_post_rules(e, self.props, self.max_orbit)
        self.registers[label] = e
        self.current = label
        return [] if quiet else [self._line(label, self.render(e))]

    def _rule_arg(self, args: str):
        args = args.strip()
        if args.startswith("@(") and args.endswith(")"):
            name = args[2:-1].strip()
            if name not in self.rules:
                raise UnknownProperty(f"no rule named {name}")
            return self.rules[name]
        return parse_rule(args, self.props)

    def _chart(self, words: list) -> list:
        if words[:2] == ["show", "properties"]:
            text = self.props.describe()
            return text.splitlines() if text else ["(no properties declared)"]
        from .geometry import chart_command
        return chart_command(words, self.tex, charts=self.charts)

    # ------------------------------------------------------------ scripts

    def run_script(self, text: str) -> list:
        """Execute a script; returns one StatementResult per statement.

        The whole file is split and syntax-checked before anything runs.
        """
        statements = split_statements(text)
        for stmt, line, _ in statements:
            _syntax_check(stmt, line)
        results = []
        for stmt, line, expected in statements:
            results.append(StatementResult(stmt, line, self.execute(stmt, line), expected))
        return results


def _syntax_check(stmt: str, line: int) -> None:
    parse_statement(stmt, None, line)
