"""Arithmetic expression trees for wire indices and gate angles.

The circuit description language embeds small arithmetic expressions as
strings, e.g. ``"(i + 1) % 5"`` for a wire index or ``"inputs[i] * 0.8"``
for a gate angle.  One grammar serves both uses:

    expr    := term  (("+" | "-") term)*
    term    := unary (("*" | "/" | "//" | "%") unary)*
    unary   := "-" unary | atom
    atom    := NUMBER | "pi" | NAME | NAME "[" expr ("," expr)* "]"
             | "(" expr ")"

Precedence: unary minus binds tightest, then ``* / // %``, then ``+ -``.
``pi`` is a keyword constant.  Only ``inputs`` and ``weights`` may be
subscripted; any other NAME is a loop variable bound by an enclosing
``for`` node.

Context rules are enforced at evaluation time, not parse time:

* Index context (wire positions, subscripts, loop ranges): the expression
  must evaluate to an integer.  ``pi``, float literals and
  ``inputs``/``weights`` references are rejected; ``/`` and ``//`` both
  mean floor division; ``%`` is the modulo.  Division or modulo by zero
  is an error.
* Angle context: real arithmetic with ``+ - * /``; ``//`` and ``%`` are
  rejected outside subscripts.  ``inputs[...]`` and ``weights[...]``
  references are allowed and the expression is differentiable in them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ExprError


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float
    is_int: bool


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Ref:
    base: str  # "inputs" or "weights"
    indices: tuple


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / // %
    left: object
    right: object


Expr = object  # union of the node classes above


# ---------------------------------------------------------------------------
# Tokenizer / parser

_SUBSCRIPTABLE = ("inputs", "weights")


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = seen_exp = False
            while j < n:
                d = text[j]
                if d.isdigit():
                    j += 1
                elif d == "." and not seen_dot and not seen_exp:
                    seen_dot = True
                    j += 1
                elif d in "eE" and j > i and not seen_exp and j + 1 < n and (
                    text[j + 1].isdigit() or text[j + 1] in "+-"
                ):
                    seen_exp = True
                    j += 2 if text[j + 1] in "+-" else 1
                else:
                    break
            lit = text[i:j]
            tokens.append(("num", lit, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            tokens.append(("op", "//", i))
            i += 2
            continue
        if c in "+-*/%":
            tokens.append(("op", c, i))
            i += 1
            continue
        if c in "()[],":
            tokens.append((c, c, i))
            i += 1
            continue
        raise ExprError(f"unexpected character {c!r}", text, i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.advance()
        if tok[0] != kind:
            raise ExprError(f"expected {kind!r}, found {tok[1]!r}", self.text, tok[2])
        return tok

    def parse(self) -> Expr:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprError(f"unexpected trailing token {tok[1]!r}", self.text, tok[2])
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/", "//", "%"):
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.advance()
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.advance()
        kind, lit, at = tok
        if kind == "num":
            if "." in lit or "e" in lit or "E" in lit:
                return Num(float(lit), is_int=False)
            return Num(float(int(lit)), is_int=True)
        if kind == "name":
            if lit == "pi":
                return Pi()
            if self.peek()[0] == "[":
                if lit not in _SUBSCRIPTABLE:
                    raise ExprError(
                        f"only 'inputs' and 'weights' may be subscripted, not {lit!r}",
                        self.text,
                        at,
                    )
                self.advance()
                indices = [self.expr()]
                while self.peek()[0] == ",":
                    self.advance()
                    indices.append(self.expr())
                self.expect("]")
                return Ref(lit, tuple(indices))
            if lit in _SUBSCRIPTABLE:
                raise ExprError(f"{lit!r} must be subscripted, e.g. {lit}[0]", self.text, at)
            return Name(lit)
        if kind == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprError(f"unexpected token {lit!r}", self.text, at)


def parse_expr(text: str) -> Expr:
    """Parse an expression string into its tree form."""
    if not isinstance(text, str):
        raise ExprError(f"expression must be a string, got {type(text).__name__}", str(text), 0)
    if not text.strip():
        raise ExprError("empty expression", text, 0)
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Evaluation


def substitute(expr: Expr, bindings: dict) -> Expr:
    """Replace bound loop-variable names with integer literals."""
    if isinstance(expr, Name) and expr.ident in bindings:
        return Num(float(bindings[expr.ident]), is_int=True)
    if isinstance(expr, Neg):
        return Neg(substitute(expr.operand, bindings))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, substitute(expr.left, bindings), substitute(expr.right, bindings))
    if isinstance(expr, Ref):
        return Ref(expr.base, tuple(substitute(ix, bindings) for ix in expr.indices))
    return expr


def eval_index(expr: Expr, bindings: dict, source: str) -> int:
    """Evaluate in index context; must produce an integer."""
    if isinstance(expr, Num):
        if not expr.is_int:
            raise ExprError("non-integer literal in index expression", source, 0)
        return int(expr.value)
    if isinstance(expr, Pi):
        raise ExprError("'pi' is not allowed in index expressions", source, 0)
    if isinstance(expr, Name):
        if expr.ident in bindings:
            return int(bindings[expr.ident])
        raise ExprError(f"unbound variable {expr.ident!r} in index expression", source, 0)
    if isinstance(expr, Ref):
        raise ExprError(f"{expr.base!r} reference not allowed in index expressions", source, 0)
    if isinstance(expr, Neg):
        return -eval_index(expr.operand, bindings, source)
    if isinstance(expr, BinOp):
        left = eval_index(expr.left, bindings, source)
        right = eval_index(expr.right, bindings, source)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if expr.op in ("/", "//"):
            if right == 0:
                raise ExprError("division by zero in index expression", source, 0)
            return left // right
        if expr.op == "%":
            if right == 0:
                raise ExprError("modulo by zero in index expression", source, 0)
            return left % right
    raise ExprError(f"cannot evaluate index expression node {expr!r}", source, 0)


def angle_value(expr: Expr, inputs, weights) -> float:
    """Evaluate a resolved angle expression (all loop variables substituted)."""
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Pi):
        return math.pi
    if isinstance(expr, Ref):
        if expr.base == "inputs":
            return float(inputs[_ref_flat_index(expr)])
        return float(weights[_ref_multi_index(expr)])
    if isinstance(expr, Neg):
        return -angle_value(expr.operand, inputs, weights)
    if isinstance(expr, BinOp):
        left = angle_value(expr.left, inputs, weights)
        right = angle_value(expr.right, inputs, weights)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if expr.op == "/":
            return left / right
        raise ExprError(f"operator {expr.op!r} not allowed in angle expressions", render(expr), 0)
    if isinstance(expr, Name):
        raise ExprError(f"unbound variable {expr.ident!r} in angle expression", render(expr), 0)
    raise ExprError(f"cannot evaluate angle expression node {expr!r}", render(expr), 0)


def angle_grad(expr: Expr, inputs, weights, seed: float, d_inputs, d_weights) -> None:
    """Accumulate ``seed * d(expr)/d(ref)`` into the gradient buffers.

    ``d_inputs`` is a flat vector indexed like ``inputs``; ``d_weights``
    matches the weights tensor shape.  Reverse-mode on the tiny tree.
    """
    if isinstance(expr, (Num, Pi)):
        return
    if isinstance(expr, Ref):
        if expr.base == "inputs":
            d_inputs[_ref_flat_index(expr)] += seed
        else:
            d_weights[_ref_multi_index(expr)] += seed
        return
    if isinstance(expr, Neg):
        angle_grad(expr.operand, inputs, weights, -seed, d_inputs, d_weights)
        return
    if isinstance(expr, BinOp):
        if expr.op == "+":
            angle_grad(expr.left, inputs, weights, seed, d_inputs, d_weights)
            angle_grad(expr.right, inputs, weights, seed, d_inputs, d_weights)
        elif expr.op == "-":
            angle_grad(expr.left, inputs, weights, seed, d_inputs, d_weights)
            angle_grad(expr.right, inputs, weights, -seed, d_inputs, d_weights)
        elif expr.op == "*":
            lv = angle_value(expr.left, inputs, weights)
            rv = angle_value(expr.right, inputs, weights)
            angle_grad(expr.left, inputs, weights, seed * rv, d_inputs, d_weights)
            angle_grad(expr.right, inputs, weights, seed * lv, d_inputs, d_weights)
        elif expr.op == "/":
            lv = angle_value(expr.left, inputs, weights)
            rv = angle_value(expr.right, inputs, weights)
            angle_grad(expr.left, inputs, weights, seed / rv, d_inputs, d_weights)
            angle_grad(expr.right, inputs, weights, -seed * lv / (rv * rv), d_inputs, d_weights)
        else:
            raise ExprError(
                f"operator {expr.op!r} not allowed in angle expressions", render(expr), 0
            )
        return
    raise ExprError(f"cannot differentiate node {expr!r}", render(expr), 0)


def _ref_flat_index(ref: Ref) -> int:
    # After resolution every subscript is a single integer literal.
    (ix,) = ref.indices
    return int(ix.value)


def _ref_multi_index(ref: Ref) -> tuple:
    return tuple(int(ix.value) for ix in ref.indices)


def iter_refs(expr: Expr):
    """Yield every inputs/weights reference in the tree."""
    if isinstance(expr, Ref):
        yield expr
    elif isinstance(expr, Neg):
        yield from iter_refs(expr.operand)
    elif isinstance(expr, BinOp):
        yield from iter_refs(expr.left)
        yield from iter_refs(expr.right)


def free_names(expr: Expr) -> set:
    """Loop-variable names referenced by the expression (including in subscripts)."""
    if isinstance(expr, Name):
        return {expr.ident}
    if isinstance(expr, Neg):
        return free_names(expr.operand)
    if isinstance(expr, BinOp):
        return free_names(expr.left) | free_names(expr.right)
    if isinstance(expr, Ref):
        out = set()
        for ix in expr.indices:
            out |= free_names(ix)
        return out
    return set()


def const_value(expr: Expr):
    """Value of a reference-free, variable-free expression, else None."""
    if free_names(expr) or any(True for _ in iter_refs(expr)):
        return None
    try:
        return angle_value(expr, None, None)
    except (ExprError, ZeroDivisionError):
        return None


# ---------------------------------------------------------------------------
# Rendering (inverse of parse_expr up to whitespace)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "//": 2, "%": 2}


def render(expr: Expr, parent_prec: int = 0) -> str:
    if isinstance(expr, Num):
        if expr.is_int:
            v = int(expr.value)
            return str(v) if v >= 0 else f"(-{-v})"
        return repr(expr.value)
    if isinstance(expr, Pi):
        return "pi"
    if isinstance(expr, Name):
        return expr.ident
    if isinstance(expr, Ref):
        inner = ", ".join(render(ix) for ix in expr.indices)
        return f"{expr.base}[{inner}]"
    if isinstance(expr, Neg):
        return f"(-{render(expr.operand, 3)})"
    if isinstance(expr, BinOp):
        prec = _PREC[expr.op]
        # Right operand always gets a higher effective precedence so that
        # right-nested trees reparse to the same structure.
        text = f"{render(expr.left, prec)} {expr.op} {render(expr.right, prec + 1)}"
        return f"({text})" if prec < parent_prec else text
    raise TypeError(f"not an expression node: {expr!r}")
