"""Parsing and evaluation of substrate-dependent expressions.

Expressions are real functions of the single variable ``S``. The grammar,
from loosest to tightest binding, is ``+ -`` < ``* /`` < unary ``-`` < ``^``,
with ``^`` right-associative and the rest left-associative. ``exp``, ``ln``
and ``sqrt`` are built in; any other identifier must be bound to a numeric
constant at parse time. Exponents must not depend on ``S``.

Evaluation propagates first derivatives with dual numbers, so every parsed
expression yields both its value and an exact d/dS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ExprError(ValueError):
    """Base class for expression parsing and evaluation failures."""


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownIdentifierError(ParseError):
    pass


class EvalError(ExprError):
    """Evaluation failed at a specific substrate value."""

    def __init__(self, message: str, S: float):
        super().__init__(f"{message} (at S={S!r})")
        self.S = S


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    """The substrate variable ``S``."""


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str  # one of FUNCTIONS
    arg: "Node"


Node = Num | Var | Neg | Bin | Call

FUNCTIONS = ("exp", "ln", "sqrt")


def contains_var(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Neg):
        return contains_var(node.arg)
    if isinstance(node, Bin):
        return contains_var(node.left) or contains_var(node.right)
    if isinstance(node, Call):
        return contains_var(node.arg)
    return False


def _const_node(value: float) -> Node:
    # Keep literals non-negative so printing round-trips through the parser,
    # which only ever produces unsigned Num leaves.
    v = float(value)
    if v < 0.0:
        return Neg(Num(-v))
    return Num(v)


# ---------------------------------------------------------------------------
# Tokenizer

_OPS = "+-*/^()"


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lit = text[i:j]
            try:
                float(lit)
            except ValueError:
                raise ParseError(f"malformed number {lit!r}", i) from None
            tokens.append(("num", lit, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser (recursive descent)

class _Parser:
    def __init__(self, text: str, constants: dict[str, float]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.constants = constants

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, at = self.take()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}, found {text or 'end of input'!r}", at)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, at = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing {text!r}", at)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                node = Bin(text, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                node = Bin(text, node, self.unary())
            else:
                return node

    def unary(self) -> Node:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, text, at = self.peek()
        if kind == "op" and text == "^":
            self.take()
            expo = self.unary()  # right-associative, may carry a unary minus
            if contains_var(expo):
                raise ParseError("exponent must not depend on S", at)
            return Bin("^", base, expo)
        return base

    def atom(self) -> Node:
        kind, text, at = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text == "S":
                return Var()
            if text in self.constants:
                return _const_node(self.constants[text])
            raise UnknownIdentifierError(f"unknown identifier {text!r}", at)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected {text or 'end of input'!r}", at)


def parse(text: str, constants: dict[str, float] | None = None) -> Node:
    """Parse ``text`` into an AST, binding ``constants`` as numeric literals."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    return _Parser(text, dict(constants or {})).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_text(node: Node, _context: int = 0) -> str:
    """Render an AST as text; ``parse(to_text(ast))`` reproduces ``ast``."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "S"
    if isinstance(node, Call):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.arg, _PREC["neg"] + 1)
        text = f"-{inner}"
        return f"({text})" if _context > _PREC["neg"] else text
    if isinstance(node, Bin):
        prec = _PREC[node.op]
        if node.op == "^":
            # left operand must outrank ^ itself; the exponent re-parses as a
            # unary expression, so it only needs to outrank * and /
            left = to_text(node.left, prec + 1)
            right = to_text(node.right, _PREC["neg"])
        else:
            left = to_text(node.left, prec)
            right = to_text(node.right, prec + 1)
        text = f"{left}{node.op}{right}"
        return f"({text})" if _context > prec else text
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Dual numbers

@dataclass(frozen=True)
class Dual:
    """First-order dual number ``v + d*eps`` for forward-mode derivatives."""

    v: float
    d: float = 0.0

    def __add__(self, other):
        o = _as_dual(other)
        return Dual(self.v + o.v, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_dual(other)
        return Dual(self.v - o.v, self.d - o.d)

    def __rsub__(self, other):
        o = _as_dual(other)
        return Dual(o.v - self.v, o.d - self.d)

    def __mul__(self, other):
        o = _as_dual(other)
        return Dual(self.v * o.v, self.v * o.d + self.d * o.v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_dual(other)
        return Dual(self.v / o.v, (self.d * o.v - self.v * o.d) / (o.v * o.v))

    def __rtruediv__(self, other):
        return _as_dual(other).__truediv__(self)

    def __neg__(self):
        return Dual(-self.v, -self.d)


def _as_dual(x) -> Dual:
    return x if isinstance(x, Dual) else Dual(float(x))


# ---------------------------------------------------------------------------
# Evaluation

def eval_value(node: Node, S: float) -> float:
    """Evaluate the expression at ``S`` (value only, no derivative)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return S
    if isinstance(node, Neg):
        return -eval_value(node.arg, S)
    if isinstance(node, Bin):
        a = eval_value(node.left, S)
        if node.op == "^":
            return _pow_value(a, eval_value(node.right, S), S)
        b = eval_value(node.right, S)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0.0:
            raise EvalError("division by zero", S)
        return a / b
    if isinstance(node, Call):
        a = eval_value(node.arg, S)
        if node.name == "exp":
            return math.exp(a)
        if node.name == "ln":
            if a <= 0.0:
                raise EvalError("ln of non-positive value", S)
            return math.log(a)
        if a < 0.0:
            raise EvalError("sqrt of negative value", S)
        return math.sqrt(a)
    raise TypeError(f"not an AST node: {node!r}")


def eval_dual(node: Node, S: float) -> tuple[float, float]:
    """Evaluate at ``S`` returning ``(value, d/dS)`` via dual numbers."""
    r = _eval_dual(node, S, Dual(S, 1.0))
    return r.v, r.d


def _eval_dual(node: Node, S: float, s: Dual) -> Dual:
    if isinstance(node, Num):
        return Dual(node.value)
    if isinstance(node, Var):
        return s
    if isinstance(node, Neg):
        return -_eval_dual(node.arg, S, s)
    if isinstance(node, Bin):
        a = _eval_dual(node.left, S, s)
        if node.op == "^":
            return _pow_dual(a, eval_value(node.right, S), S)
        b = _eval_dual(node.right, S, s)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b.v == 0.0:
            raise EvalError("division by zero", S)
        return a / b
    if isinstance(node, Call):
        a = _eval_dual(node.arg, S, s)
        if node.name == "exp":
            e = math.exp(a.v)
            return Dual(e, a.d * e)
        if node.name == "ln":
            if a.v <= 0.0:
                raise EvalError("ln of non-positive value", S)
            return Dual(math.log(a.v), a.d / a.v)
        if a.v < 0.0:
            raise EvalError("sqrt of negative value", S)
        r = math.sqrt(a.v)
        if a.v == 0.0:
            return Dual(0.0, 0.0 if a.d == 0.0 else math.inf)
        return Dual(r, 0.5 * a.d / r)
    raise TypeError(f"not an AST node: {node!r}")


def _pow_value(base: float, expo: float, S: float) -> float:
    if float(expo).is_integer():
        e = int(expo)
        if base == 0.0 and e < 0:
            raise EvalError("zero raised to a negative power", S)
        return base ** e
    if base <= 0.0:
        raise EvalError("non-integer power of a non-positive base", S)
    return base ** expo


def _pow_dual(base: Dual, expo: float, S: float) -> Dual:
    v = _pow_value(base.v, expo, S)
    if expo == 0.0:
        return Dual(1.0, 0.0)
    if float(expo).is_integer():
        e = int(expo)
        if base.v == 0.0:
            # v = 0 for e >= 1; derivative only non-trivial when e == 1
            return Dual(v, base.d if e == 1 else 0.0)
        return Dual(v, expo * base.v ** (e - 1) * base.d)
    return Dual(v, expo * base.v ** (expo - 1.0) * base.d)
