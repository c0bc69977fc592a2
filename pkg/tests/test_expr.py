import pytest

from reqforge import expr as ex
from reqforge.errors import MissingVariable, ParseError, TypeMismatch
from reqforge.parser import parse_expr


def test_precedence_and_before_implies():
    assert parse_expr("a & b => c") == ex.Implies(
        ex.And(ex.Atom("a"), ex.Atom("b")), ex.Atom("c"))


def test_precedence_not_tightest():
    assert parse_expr("!a & b") == ex.And(ex.Not(ex.Atom("a")), ex.Atom("b"))


def test_implies_right_associative():
    assert parse_expr("a => b => c") == ex.Implies(
        ex.Atom("a"), ex.Implies(ex.Atom("b"), ex.Atom("c")))


def test_negated_comparison():
    assert parse_expr("!(x = 0)") == ex.Not(
        ex.Comparison(ex.Var("x"), "=", ex.Num(0)))


def test_if_then_else():
    assert parse_expr("if p then q else r") == ex.IfThenElse(
        ex.Atom("p"), ex.Atom("q"), ex.Atom("r"))


def test_function_applications_nest():
    got = parse_expr("grasp(TGT, BGP) & closer(SV, TGT)")
    assert got == ex.And(
        ex.FnApp("grasp", (ex.Var("TGT"), ex.Var("BGP"))),
        ex.FnApp("closer", (ex.Var("SV"), ex.Var("TGT"))),
    )


def test_arithmetic_inside_comparison():
    got = parse_expr("x + 2 * y > 10")
    assert got == ex.Comparison(
        ex.Arith("+", ex.Var("x"), ex.Arith("*", ex.Num(2), ex.Var("y"))),
        ">", ex.Num(10))


def test_boolean_in_arith_position_rejected():
    with pytest.raises(ParseError):
        parse_expr("(a & b) + 1 > 0")


def test_arith_in_boolean_position_rejected():
    with pytest.raises(ParseError):
        parse_expr("x + 1")


@pytest.mark.parametrize("text", [
    "a & b => c",
    "!(x = 0)",
    "if p then q else r",
    "grasp(TGT, BGP) & closer(SV, TGT)",
    "diff_setNL_observedNL > NLmax",
    "a | b & c <=> d",
    "x + 2 * y - 1 >= z / 4",
    "forall s: fault(s) => flagged(s)",
    "exists v: reading(v) < 10",
    "a => b => c",
    "!(position(SV) = position(TGT))",
])
def test_print_parse_round_trip(text):
    tree = parse_expr(text)
    assert parse_expr(ex.to_text(tree)) == tree


def test_eval_comparison_and_connectives():
    e = parse_expr("battery > 0 & !fault")
    assert ex.eval_bool(e, {"battery": 10, "fault": False}) is True
    assert ex.eval_bool(e, {"battery": 0, "fault": False}) is False


def test_eval_missing_variable():
    with pytest.raises(MissingVariable):
        ex.eval_bool(parse_expr("near"), {"grasp": True})


def test_eval_non_boolean_atom_rejected():
    with pytest.raises(TypeMismatch):
        ex.eval_bool(ex.Atom("x"), {"x": 3})


def test_eval_fnapp_by_canonical_name():
    e = parse_expr("grasp(TGT, BGP)")
    assert ex.eval_bool(e, {"grasp(TGT, BGP)": True}) is True


def test_eval_mode_constants():
    e = ex.Comparison(ex.Var("__mode"), "=", ex.Var("StartUpMode"))
    consts = frozenset({"StartUpMode"})
    assert ex.eval_bool(e, {"__mode": "StartUpMode"}, consts) is True
    assert ex.eval_bool(e, {"__mode": "Idle"}, consts) is False


def test_eval_if_then_else():
    e = parse_expr("if sel then a else b")
    assert ex.eval_bool(e, {"sel": True, "a": True, "b": False}) is True
    assert ex.eval_bool(e, {"sel": False, "a": True, "b": False}) is False


def test_variables_excludes_constants_and_includes_fnapp_keys():
    e = parse_expr("grasp(TGT, BGP) & __mode = m1 & x > 0")
    got = ex.variables(e, constants=frozenset({"m1"}))
    assert got == {"grasp(TGT, BGP)", "TGT", "BGP", "__mode", "x"}


def test_substitute_respects_binders():
    e = parse_expr("forall s: fault(s) & fault(t)")
    got = ex.substitute(e, "s", "ZZZ")
    assert got == e  # bound variable untouched
    got = ex.substitute(e, "t", "t1")
    assert ex.to_text(got) == "forall s: fault(s) & fault(t1)"


def test_negate_comparison_flips_operator():
    c = ex.Comparison(ex.Var("x"), "<=", ex.Num(4))
    assert ex.negate_comparison(c) == ex.Comparison(ex.Var("x"), ">", ex.Num(4))
