import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curveframes.expr import (
    DomainError,
    ParseError,
    UnboundVariable,
    compile_vectorized,
    const,
    differentiate,
    evaluate,
    parse,
    substitute,
    to_string,
    var,
)


def test_parse_builds_expected_structure():
    e = parse("sin(u)*cos(v)", {"u", "v"})
    assert e.op == "mul"
    assert e.args[0].op == "sin"
    assert e.args[1].op == "cos"
    assert e.args[0].args[0] is var("u")


def test_parse_evaluate_arithmetic():
    e = parse("u^2*v", {"u", "v"})
    assert evaluate(e, {"u": 3.0, "v": 2.0}) == 18.0


def test_parse_error_position_unbalanced():
    with pytest.raises(ParseError) as exc:
        parse("sin(", {"u"})
    assert exc.value.position == 4


def test_parse_rejects_unknown_identifier():
    with pytest.raises(ParseError):
        parse("u + w", {"u", "v"})


def test_parse_rejects_trailing_garbage():
    with pytest.raises(ParseError):
        parse("u + 1 )", {"u"})


def test_parse_rejects_empty():
    with pytest.raises(ParseError):
        parse("   ", {"u"})


def test_variable_shadowing_function_rejected():
    with pytest.raises(ValueError):
        parse("sin + 1", {"sin"})


def test_precedence_and_associativity():
    e = parse("2^3^2", {"u"})
    assert evaluate(e, {}) == 512.0  # right-associative
    e = parse("-2^2", {"u"})
    assert evaluate(e, {}) == -4.0  # ^ binds tighter than unary minus
    e = parse("1 - 2 - 3", {"u"})
    assert evaluate(e, {}) == -4.0  # left-associative
    e = parse("2 + 3 * 4", {"u"})
    assert evaluate(e, {}) == 14.0


def test_trivial_evaluations():
    assert evaluate(parse("sin(u)", {"u"}), {"u": math.pi / 2}) == 1.0
    assert evaluate(parse("exp(0) + cos(0)", set()), {}) == 2.0


def test_domain_errors():
    e = parse("1/u", {"u"})
    with pytest.raises(DomainError):
        evaluate(e, {"u": 0.0})
    with pytest.raises(DomainError):
        evaluate(parse("sqrt(u)", {"u"}), {"u": -1.0})
    with pytest.raises(DomainError):
        evaluate(parse("ln(u)", {"u"}), {"u": 0.0})


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        evaluate(parse("u + v", {"u", "v"}), {"u": 1.0})


def test_derivative_power_rule():
    e = parse("u^2*v", {"u", "v"})
    de = differentiate(e, "u")
    assert evaluate(de, {"u": 3.0, "v": 2.0}) == 12.0


def test_second_derivative_sin():
    e = parse("sin(u)", {"u"})
    d2 = differentiate(e, "u", 2)
    assert evaluate(d2, {"u": 0.0}) == 0.0


def test_third_derivative_quartic():
    e = parse("t^4", {"t"})
    d3 = differentiate(e, "t", 3)
    assert evaluate(d3, {"t": 1.0}) == 24.0


def test_derivative_of_other_variable_is_zero():
    e = parse("u^2", {"u", "v"})
    assert evaluate(differentiate(e, "v"), {"u": 5.0}) == 0.0


def test_roundtrip_is_identity_on_nodes():
    sources = [
        "sin(u)*cos(v)",
        "u^2*v - 3.5/v",
        "-(u + v) * exp(u)",
        "2^-u",
        "(u + v)^(u - v)",
        "abs(u - 1) + sqrt(v + 2)",
        "u + -2.0",
        "tan(u/v) - ln(v)",
        "1e-07 * u + 2.5e+16",
    ]
    for src in sources:
        e = parse(src, {"u", "v"})
        assert parse(to_string(e), {"u", "v"}) is e


def test_print_parenthesizes_structure():
    u, v = var("u"), var("v")
    from curveframes.expr import add, mul, neg, power

    assert parse(to_string(neg(mul(u, v))), {"u", "v"}) is neg(mul(u, v))
    assert parse(to_string(power(neg(u), const(2))), {"u", "v"}) is power(neg(u), const(2))
    assert parse(to_string(add(u, add(u, v))), {"u", "v"}) is add(u, add(u, v))


def test_interning_gives_identity_for_equal_trees():
    a = parse("u^2 + sin(u)", {"u"})
    b = parse("u^2 + sin(u)", {"u"})
    assert a is b


def test_substitute_composes():
    e = parse("u^2 + v", {"u", "v"})
    t = var("t")
    composed = substitute(e, {"u": parse("cos(t)", {"t"}), "v": t})
    expected = parse("cos(t)^2 + t", {"t"})
    assert composed is expected


_EXPR_LEAVES = st.one_of(
    st.sampled_from(["u", "v"]),
    st.floats(min_value=-3.0, max_value=3.0, allow_nan=False).map(lambda c: f"{c!r}"),
)


def _expr_strings():
    return st.recursive(
        _EXPR_LEAVES,
        lambda inner: st.one_of(
            st.tuples(inner, st.sampled_from(["+", "-", "*"]), inner).map(
                lambda t: f"({t[0]} {t[1]} {t[2]})"
            ),
            st.tuples(st.sampled_from(["sin", "cos", "exp"]), inner).map(
                lambda t: f"{t[0]}({t[1]})"
            ),
            st.tuples(inner, st.integers(min_value=1, max_value=4)).map(
                lambda t: f"({t[0]})^{t[1]}"
            ),
        ),
        max_leaves=12,
    )


@settings(max_examples=200, deadline=None)
@given(
    src=_expr_strings(),
    u0=st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
    v0=st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
)
def test_derivative_matches_central_difference(src, u0, v0):
    e = parse(src, {"u", "v"})
    de = differentiate(e, "u")
    h = 1e-6
    try:
        exact = evaluate(de, {"u": u0, "v": v0})
        fp = evaluate(e, {"u": u0 + h, "v": v0})
        fm = evaluate(e, {"u": u0 - h, "v": v0})
    except DomainError:
        return
    approx = (fp - fm) / (2 * h)
    scale = max(1.0, abs(exact), abs(fp), abs(fm))
    assert abs(exact - approx) / scale < 1e-7


@settings(max_examples=50, deadline=None)
@given(src=_expr_strings())
def test_roundtrip_property(src):
    e = parse(src, {"u", "v"})
    assert parse(to_string(e), {"u", "v"}) is e


def test_derivative_is_linear():
    rng = np.random.default_rng(7)
    f = parse("sin(u)*u^2", {"u"})
    g = parse("exp(u) - u", {"u"})
    a, b = 2.5, -1.25
    combo = (const(a) * f) + (const(b) * g)
    d_combo = differentiate(combo, "u")
    df, dg = differentiate(f, "u"), differentiate(g, "u")
    for u0 in rng.uniform(-2, 2, size=20):
        lhs = evaluate(d_combo, {"u": u0})
        rhs = a * evaluate(df, {"u": u0}) + b * evaluate(dg, {"u": u0})
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


def test_compile_vectorized_matches_evaluate():
    e = parse("sin(u)*cos(v) + u^3 / (v + 2) - abs(u)", {"u", "v"})
    f = compile_vectorized(e, ["u", "v"])
    rng = np.random.default_rng(3)
    us = rng.uniform(-3, 3, size=64)
    vs = rng.uniform(-1, 3, size=64)
    got = f(us, vs)
    want = np.array([evaluate(e, {"u": u, "v": v}) for u, v in zip(us, vs)])
    assert np.allclose(got, want, rtol=1e-15, atol=1e-15)


def test_compile_vectorized_constant_broadcasts():
    f = compile_vectorized(parse("3.5", set()) , ["t"])
    out = f(np.zeros(5))
    assert out.shape == (5,)
    assert np.all(out == 3.5)


def test_compile_vectorized_rejects_unknown_variable():
    with pytest.raises(UnboundVariable):
        compile_vectorized(parse("u", {"u"}), ["t"])
