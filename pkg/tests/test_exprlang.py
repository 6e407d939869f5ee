import math
import struct

import pytest
from hypothesis import given
from hypothesis import strategies as st

from beambvp.exprlang import (
    BinOp,
    Call,
    ExprEvalError,
    ExprSyntaxError,
    Neg,
    Num,
    Power,
    Var,
    parse,
)


def test_parses_saturating_selfcoupling():
    fn = parse("u*(1-exp(-u))")
    assert fn.var == "u"
    assert isinstance(fn.ast, BinOp) and fn.ast.op == "*"
    assert fn.ast.left == Var("u")


def test_parses_quadratic_weight():
    fn = parse("t^2")
    assert fn.var == "t"
    assert fn.ast == Power(Var("t"), 2)


def test_parses_bounded_saturation():
    fn = parse("1-exp(-u)")
    assert fn.ast == BinOp("-", Num(1.0), Call("exp", Neg(Var("u"))))


def test_incomplete_expression_offset():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("u +")
    assert exc.value.offset == 3


def test_no_implicit_multiplication():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("2u")
    assert exc.value.offset == 1


def test_unknown_identifier():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("x+1")
    assert "x" in str(exc.value)


def test_declared_variable_enforced():
    with pytest.raises(ExprSyntaxError):
        parse("u+1", var="t")


def test_mixed_variables_rejected():
    with pytest.raises(ExprSyntaxError):
        parse("u+t")


def test_exponent_must_be_integer_literal():
    with pytest.raises(ExprSyntaxError):
        parse("u^2.5")
    with pytest.raises(ExprSyntaxError):
        parse("u^-2")
    with pytest.raises(ExprSyntaxError):
        parse("u^(2)")


def test_empty_expression():
    with pytest.raises(ExprSyntaxError):
        parse("   ")


def test_precedence_mul_over_add():
    assert parse("2+3*4")(0.0) == 14.0


def test_unary_minus_binds_looser_than_power():
    assert parse("-u^2")(2.0) == -4.0


def test_power_right_associative():
    assert parse("u^2^3")(2.0) == 2.0**8


def test_huge_exponent_rejected_at_parse_time():
    with pytest.raises(ExprSyntaxError):
        parse("u^9^9^9")
    with pytest.raises(ExprSyntaxError):
        parse("u^9999999")


def test_eval_examples():
    assert parse("u*(1-exp(-u))")(0.0) == 0.0
    assert parse("t^2")(0.5) == 0.25
    assert abs(parse("1-exp(-u)")(math.log(3.0)) - 2.0 / 3.0) < 1e-15


def test_division_by_zero():
    fn = parse("1/(u-1)")
    with pytest.raises(ExprEvalError):
        fn(1.0)


def test_overflow_reported():
    fn = parse("exp(exp(u))")
    with pytest.raises(ExprEvalError):
        fn(100.0)


def test_constant_expression_has_no_variable():
    fn = parse("3*2")
    assert fn.var is None
    assert fn(123.0) == 6.0


def test_eval_is_pure():
    fn = parse("u*(1-exp(-u))/(1+u^2)")
    first = struct.pack("<d", fn(0.731))
    for _ in range(5):
        assert struct.pack("<d", fn(0.731)) == first


ROUND_TRIP_SOURCES = [
    "u*(1-exp(-u))",
    "t^2",
    "1-exp(-u)",
    "-u^2+3*u-1/(u+2)",
    "exp(-(u^2))/(1+u)",
    "2+3*4",
    "((u))",
]


@pytest.mark.parametrize("src", ROUND_TRIP_SOURCES)
def test_pretty_round_trip(src):
    fn = parse(src)
    again = parse(fn.pretty())
    assert again.ast == fn.ast


@st.composite
def expressions(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        leaf = draw(st.sampled_from(["u", "1", "2", "0.5", "3.25"]))
        return leaf
    kind = draw(st.sampled_from(["+", "-", "*", "/", "^", "neg", "exp"]))
    left = draw(expressions(depth=depth - 1))
    if kind == "neg":
        return f"-({left})"
    if kind == "exp":
        return f"exp({left})"
    if kind == "^":
        return f"({left})^{draw(st.integers(min_value=0, max_value=4))}"
    right = draw(expressions(depth=depth - 1))
    return f"({left}){kind}({right})"


@given(expressions())
def test_pretty_round_trip_generated(src):
    fn = parse(src)
    assert parse(fn.pretty()).ast == fn.ast
