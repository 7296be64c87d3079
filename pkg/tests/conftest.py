import pytest

from tensorkernel import Session
from tensorkernel.parser import parse_expr
from tensorkernel.properties import PropertyTable

GAMMA_SETUP = """
::PostDefaultRules( @@prodsort!(%), @@eliminate_kr!(%), @@canonicalise!(%), @@collect_terms!(%) ).
{a,b,c,d,e,f}::Indices(vector).
{a,b,c,d,e,f}::Integer(0..3).
\\gamma_{#}::GammaMatrix(metric=g).
g_{a b}::Metric.
g_{a}^{b}::KroneckerDelta.
"""


def run_lines(session, text):
    """Execute a script fragment, returning all produced lines."""
    out = []
    for res in session.run_script(text):
        out.extend(res.output)
    return out


@pytest.fixture
def session():
    return Session()


@pytest.fixture
def gamma_session():
    s = Session()
    run_lines(s, GAMMA_SETUP)
    return s


@pytest.fixture
def props():
    return PropertyTable()


def declare(props, text):
    """Apply property declarations given in input syntax."""
    s = Session(props=props)
    lines = run_lines(s, text)
    assert not any(line.startswith("error") for line in lines), lines
    return props


def expr(text, props=None):
    return parse_expr(text, props)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
