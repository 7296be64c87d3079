from conftest import run_lines
from tensorkernel.session import Session


def test_register_numbering_and_percent():
    s = Session()
    out = run_lines(s, "A;\nB;\n@prodsort!(%);")
    assert out == ["1 := A;", "2 := B;", "2 := B;"]
    assert s.counter == 2 and s.current == "2"


def test_named_assignment_does_not_consume_numbers():
    s = Session()
    assert run_lines(s, "x := A;\nB;") == ["x := A;", "1 := B;"]


def test_algorithm_on_named_register():
    s = Session()
    out = run_lines(s, "{A,B}::Commuting.\nx := B A;\nC;\n@prodsort!(x);")
    assert out[-1] == "x := A B;"


def test_quiet_terminator():
    s = Session()
    assert run_lines(s, "A + A.\n@collect_terms!(%);") == ["1 := 2 A;"]


def test_no_current_expression():
    assert run_lines(Session(), "@distribute!(%);") == ["error: no current expression"]


def test_unknown_algorithm():
    s = Session()
    assert run_lines(s, "A;\n@frobnicate!(%);")[-1] == "error: unknown algorithm @frobnicate"


def test_free_index_mismatch_in_band():
    out = Session().execute("T^{a} + S_{b};")
    assert out == ["error: free indices {_b} do not match {^a}"]


def test_script_pre_pass_rejects_bad_statement_before_running():
    import pytest
    from tensorkernel.errors import FreeIndexMismatch
    s = Session()
    with pytest.raises(FreeIndexMismatch):
        s.run_script("A;\nT^{a} + S_{b};")
    assert s.counter == 0


def test_rules_are_named_separately():
    s = Session()
    out = run_lines(s, "B_{a} -> C_{a};\nr := D^{a} -> E^{a};\nX := B_{b} D^{b};\n"
                       "@substitute!(%)(@(rule1));\n@substitute!(%)(@(r));")
    assert out == ["rule1 := B_{a} -> C_{a};", "r := D^{a} -> E^{a};", "X := B_{b} D^{b};",
                   "X := C_{b} D^{b};", "X := C_{b} E^{b};"]


def test_inline_rule_argument():
    s = Session()
    out = run_lines(s, "X := B_{b} D^{b};\n@substitute!(%)(B_{a} -> C_{a});")
    assert out[-1] == "X := C_{b} D^{b};"


def test_missing_rule():
    s = Session()
    out = run_lines(s, "A;\n@substitute!(%)(@(nope));")
    assert out[-1] == "error: no rule named nope"


def test_post_rules_run_after_input_and_algorithms():
    s = Session()
    out = run_lines(s, "{A,B}::Commuting.\n::PostDefaultRules( @@prodsort!(%), @@collect_terms!(%) ).\n"
                       "B A + A B;")
    assert out == ["1 := 2 A B;"]


def test_tex_session():
    s = Session(tex=True)
    assert run_lines(s, "(1/2) A;") == [r"1 := \frac{1}{2} {A};"]


def test_run_script_attaches_expected_lines():
    s = Session()
    results = s.run_script("A;\n#> 1 := A;\nB;")
    assert [(r.line, r.checked, r.passed) for r in results] == [(1, True, True), (3, False, False)]


def test_deterministic_output():
    text = "R_{a b c d}::RiemannTensor.\nR_{c d a b} + R_{b a d c};\n@canonicalise!(%);"
    assert run_lines(Session(), text) == run_lines(Session(), text)


def test_user_chart_in_session():
    s = Session()
    run_lines(s, "chart define polar coords r,theta metric matrix([1,0],[0,r^2]);")
    assert run_lines(s, "christoffel polar;") == ["Gamma^r_theta theta = -r",
                                                  "Gamma^theta_r theta = 1/r"]
