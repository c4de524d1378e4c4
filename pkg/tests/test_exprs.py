"""Expression grammar: parsing, contexts, rendering round-trip."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vqclab.circuit import exprs
from vqclab.circuit.errors import ExprError


def idx(text, **bindings):
    return exprs.eval_index(exprs.parse_expr(text), bindings, text)


def ang(text, inputs=(), weights=()):
    return exprs.angle_value(exprs.parse_expr(text), np.asarray(inputs),
                             np.asarray(weights))


class TestIndexContext:
    def test_precedence(self):
        assert idx("1 + 2 * 3") == 7
        assert idx("(1 + 2) * 3") == 9
        assert idx("-2 * 3") == -6
        assert idx("10 - 2 - 3") == 5  # left associative

    def test_modulo_and_division(self):
        assert idx("(i + 1) % 5", i=4) == 0
        assert idx("7 / 2") == 3
        assert idx("7 // 2") == 3
        assert idx("-7 // 2") == -4  # floor, not truncation

    def test_loop_variable(self):
        assert idx("2 * k + 1", k=3) == 7

    def test_unbound_variable(self):
        with pytest.raises(ExprError, match="unbound variable 'j'"):
            idx("j + 1")

    def test_pi_rejected(self):
        with pytest.raises(ExprError, match="'pi' is not allowed"):
            idx("pi")

    def test_float_literal_rejected(self):
        with pytest.raises(ExprError, match="non-integer literal"):
            idx("1.5 + 1")

    def test_refs_rejected(self):
        with pytest.raises(ExprError, match="not allowed in index"):
            idx("inputs[0]")

    def test_division_by_zero(self):
        with pytest.raises(ExprError, match="division by zero"):
            idx("1 / 0")
        with pytest.raises(ExprError, match="modulo by zero"):
            idx("1 % 0")


class TestAngleContext:
    def test_pi_and_arithmetic(self):
        assert ang("pi / 2") == pytest.approx(math.pi / 2)
        assert ang("-pi") == pytest.approx(-math.pi)
        assert ang("2 * pi - pi") == pytest.approx(math.pi)

    def test_refs(self):
        assert ang("inputs[1] * 0.8", inputs=[0.0, 2.0]) == pytest.approx(1.6)
        assert ang("weights[0] + inputs[0]", inputs=[1.0], weights=[2.0]) == 3.0

    def test_scientific_literal(self):
        assert ang("1e-2") == pytest.approx(0.01)

    def test_gradient_linear(self):
        expr = exprs.parse_expr("inputs[0] * 0.8")
        d_in, d_w = np.zeros(1), np.zeros(1)
        exprs.angle_grad(expr, np.array([1.0]), np.array([0.0]), 1.0, d_in, d_w)
        assert d_in[0] == pytest.approx(0.8)

    def test_gradient_product_and_quotient(self):
        # d/dw (w * x / 2) = x / 2; d/dx (w * x / 2) = w / 2
        expr = exprs.parse_expr("weights[0] * inputs[0] / 2")
        d_in, d_w = np.zeros(1), np.zeros(1)
        exprs.angle_grad(expr, np.array([3.0]), np.array([5.0]), 1.0, d_in, d_w)
        assert d_w[0] == pytest.approx(1.5)
        assert d_in[0] == pytest.approx(2.5)

    def test_reuse_accumulates(self):
        expr = exprs.parse_expr("weights[0] + weights[0]")
        d_in, d_w = np.zeros(0), np.zeros(1)
        exprs.angle_grad(expr, np.zeros(0), np.array([1.0]), 1.0, d_in, d_w)
        assert d_w[0] == pytest.approx(2.0)


class TestSyntaxErrors:
    @pytest.mark.parametrize("bad", ["", "1 +", "(1", "1 ** 2", "foo[0]",
                                     "inputs", "weights", "1 2", "@"])
    def test_rejected(self, bad):
        with pytest.raises(ExprError):
            exprs.parse_expr(bad)

    def test_error_carries_position(self):
        with pytest.raises(ExprError, match="column"):
            exprs.parse_expr("1 + $")


# -- render/parse round-trip -------------------------------------------------

_names = st.sampled_from(["i", "j", "k", "t"])


def _leaf():
    return st.one_of(
        st.integers(min_value=0, max_value=20).map(
            lambda v: exprs.Num(float(v), is_int=True)),
        st.floats(min_value=0.01, max_value=9.9, allow_nan=False).map(
            lambda v: exprs.Num(v, is_int=False)),
        st.just(exprs.Pi()),
        _names.map(exprs.Name),
        st.tuples(st.sampled_from(["inputs", "weights"]),
                  st.integers(0, 8)).map(
            lambda t: exprs.Ref(t[0], (exprs.Num(float(t[1]), is_int=True),))),
    )


_exprs = st.recursive(
    _leaf(),
    lambda children: st.one_of(
        children.map(exprs.Neg),
        st.tuples(st.sampled_from(["+", "-", "*", "/", "//", "%"]),
                  children, children).map(lambda t: exprs.BinOp(*t)),
    ),
    max_leaves=12,
)


@given(_exprs)
def test_render_parse_round_trip(tree):
    assert exprs.parse_expr(exprs.render(tree)) == tree
