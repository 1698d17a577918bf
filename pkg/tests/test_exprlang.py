import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slantgeo.exprlang import (
    BinOp,
    Call,
    Const,
    DomainError,
    ExprError,
    Neg,
    Var,
    compile_exprs,
    differentiate,
    evaluate,
    parse,
    pretty,
    subst,
    variables,
)

# (text, env) pairs used by the derivative oracle below. Points are chosen
# inside each expression's domain so central differences stay well defined.
DERIV_CORPUS = [
    ("x^3 - 2*x + 1", {"x": 0.7}),
    ("sin(x)*cos(2*x)", {"x": 1.1}),
    ("exp(-x^2)", {"x": 0.4}),
    ("log(x^2 + 1)", {"x": -0.8}),
    ("sqrt(x + 2)", {"x": 0.5}),
    ("x^y", {"x": 1.3, "y": 0.6}),
    ("atan(x/(1+y^2))", {"x": 0.9, "y": 0.2}),
    ("asin(x/2)", {"x": 0.6}),
    ("acos(1/(x^2+2))", {"x": 0.3}),
    ("tan(x)", {"x": 0.5}),
    ("abs(x)", {"x": -0.7}),
    ("sin(x)^cos(x)", {"x": 0.8}),
    ("(x + y)/(x - y)", {"x": 1.4, "y": 0.3}),
    ("0.2 + (x + y)/10", {"x": 0.25, "y": 0.75}),
]


def central_difference(expr, env, name, h=1e-6):
    hi = dict(env)
    lo = dict(env)
    hi[name] = env[name] + h
    lo[name] = env[name] - h
    return (evaluate(expr, hi) - evaluate(expr, lo)) / (2 * h)


@pytest.mark.parametrize("text,env", DERIV_CORPUS)
def test_derivative_matches_central_difference(text, env):
    expr = parse(text)
    for name in env:
        sym = evaluate(differentiate(expr, name), env)
        fd = central_difference(expr, env, name)
        assert sym == pytest.approx(fd, rel=1e-6, abs=1e-7)


def test_second_derivative_matches_central_difference():
    expr = parse("exp(x)*sin(2*x)")
    d2 = differentiate(differentiate(expr, "x"), "x")
    h = 1e-4
    for x0 in (0.0, 0.3, -1.2):
        fd = (
            evaluate(expr, {"x": x0 + h})
            - 2 * evaluate(expr, {"x": x0})
            + evaluate(expr, {"x": x0 - h})
        ) / h**2
        assert evaluate(d2, {"x": x0}) == pytest.approx(fd, rel=1e-5, abs=1e-6)


def test_precedence_and_associativity_values():
    cases = {
        "2^3^2": 512.0,  # right associative
        "-2^2": -4.0,  # unary minus binds looser than ^
        "2 - 3 - 4": -5.0,
        "6/3/2": 1.0,
        "2*3^2": 18.0,
        "(1+2)*3": 9.0,
        "2^-1": 0.5,
        "1 + 2*3 - 4/2": 5.0,
        "pi": math.pi,
        "e^1": math.e,
        "-x^2 + x": -0.25 + 0.5,
    }
    for text, want in cases.items():
        assert evaluate(parse(text), {"x": 0.5}) == pytest.approx(want, abs=1e-15)


def test_function_aliases_and_names():
    env = {"x1": 0.7, "x2": -0.3}
    got = evaluate(parse("arccos(1/(x1^2+x2^2+1))"), env)
    want = math.acos(1 / (0.7**2 + 0.3**2 + 1))
    assert got == pytest.approx(want, abs=1e-15)
    assert parse("arctan(x)") == parse("atan(x)")
    assert parse("arcsin(x)") == parse("asin(x)")


def test_domain_errors_name_offending_subexpression():
    with pytest.raises(DomainError, match="log"):
        evaluate(parse("log(x)"), {"x": -1.0})
    with pytest.raises(DomainError, match="sqrt"):
        evaluate(parse("sqrt(x - 2)"), {"x": 0.0})
    with pytest.raises(DomainError):
        evaluate(parse("1/(x - 1)"), {"x": 1.0})
    with pytest.raises(DomainError, match="acos"):
        evaluate(parse("acos(x)"), {"x": 2.0})
    # |x| has no derivative at the kink
    with pytest.raises(DomainError):
        evaluate(differentiate(parse("abs(x)"), "x"), {"x": 0.0})


def test_domain_errors_on_arrays():
    xs = np.array([0.5, 1.0, 2.0])
    assert np.allclose(evaluate(parse("log(x)"), {"x": xs}), np.log(xs))
    with pytest.raises(DomainError):
        evaluate(parse("log(x)"), {"x": np.array([0.5, -1.0])})
    with pytest.raises(DomainError):
        evaluate(parse("1/x"), {"x": np.array([1.0, 0.0])})


def test_unknown_identifier_lists_declared_names():
    with pytest.raises(ExprError) as err:
        parse("x1 + zz", names=["x1", "x2"])
    assert "zz" in str(err.value)
    assert "x1" in str(err.value) and "x2" in str(err.value)
    with pytest.raises(ExprError):
        parse("frob(x)")
    with pytest.raises(ExprError):
        parse("2 +")
    with pytest.raises(ExprError):
        parse("(1+2")


def test_variables_and_subst():
    expr = parse("sin(a)*b + c")
    assert variables(expr) == {"a", "b", "c"}
    composed = subst(expr, {"a": parse("u^2"), "b": parse("u+v"), "c": Const(1.0)})
    env = {"u": 0.6, "v": 1.1}
    want = math.sin(0.36) * 1.7 + 1.0
    assert evaluate(composed, env) == pytest.approx(want, abs=1e-15)


def test_array_evaluation_matches_scalar_loop():
    expr = parse("exp(-x^2) * sin(y) + x/2")
    xs = np.linspace(-1.0, 1.0, 17)
    ys = np.linspace(0.1, 2.0, 17)
    batch = evaluate(expr, {"x": xs, "y": ys})
    loop = np.array([evaluate(expr, {"x": float(x), "y": float(y)}) for x, y in zip(xs, ys)])
    assert np.allclose(batch, loop, atol=1e-15)


def test_compile_exprs_batch():
    exprs = [parse("x + y"), parse("x*y"), parse("2")]
    fn = compile_exprs(exprs, ["x", "y"])
    pts = np.array([[1.0, 2.0], [3.0, 4.0], [0.5, -1.0]])
    out = fn(pts)
    assert out.shape == (3, 3)
    assert np.allclose(out[0], [3.0, 7.0, -0.5])
    assert np.allclose(out[1], [2.0, 12.0, -0.5])
    assert np.allclose(out[2], 2.0)


def test_trivial_derivatives_fold_to_constants():
    assert differentiate(parse("sin(y)"), "x") == Const(0.0)
    assert differentiate(parse("x"), "x") == Const(1.0)
    assert differentiate(parse("3*x"), "x") == Const(3.0)


FUNCS = ["sin", "cos", "tan", "exp", "log", "sqrt", "asin", "acos", "atan", "abs"]

_names = st.sampled_from(["x1", "x2", "t", "u"])
_consts = st.one_of(
    st.integers(min_value=-9, max_value=9).map(lambda n: Const(float(n))),
    st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False).map(
        lambda v: Const(float(np.round(v, 4)))
    ),
)
_leaves = st.one_of(_consts, _names.map(Var))


def _branch(children):
    pair = st.tuples(children, children)
    return st.one_of(
        pair.map(lambda ab: BinOp("+", ab[0], ab[1])),
        pair.map(lambda ab: BinOp("-", ab[0], ab[1])),
        pair.map(lambda ab: BinOp("*", ab[0], ab[1])),
        pair.map(lambda ab: BinOp("/", ab[0], ab[1])),
        pair.map(lambda ab: BinOp("^", ab[0], ab[1])),
        # the parser folds a negated literal into the constant itself,
        # so Neg(Const) is not a reachable parse tree
        children.filter(lambda c: not isinstance(c, Const)).map(Neg),
        st.tuples(st.sampled_from(FUNCS), children).map(lambda fa: Call(fa[0], fa[1])),
    )


_expr_trees = st.recursive(_leaves, _branch, max_leaves=20)


@settings(max_examples=300, deadline=None)
@given(_expr_trees)
def test_pretty_parse_round_trip(expr):
    assert parse(pretty(expr)) == expr


@settings(max_examples=200, deadline=None)
@given(_expr_trees, st.sampled_from(["x1", "x2", "t"]))
def test_derivative_round_trips_through_pretty(expr, name):
    # the derivative is another tree; printing and reparsing must preserve it
    d = differentiate(expr, name)
    assert parse(pretty(d)) == d
