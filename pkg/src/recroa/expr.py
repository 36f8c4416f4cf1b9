"""Arithmetic expressions over state variables x1..xd.

Grammar (see README for the full EBNF):

    expr   := term  (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' INTEGER)?
    atom   := NUMBER | VARIABLE | '(' expr ')'

Exponents are restricted to non-negative integer literals and are
evaluated by repeated multiplication, so negative bases never hit a
domain error.  Division by zero is not trapped here; it produces an
IEEE inf/nan which downstream code treats as a divergence signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "ParseError",
    "parse",
    "to_text",
    "evaluate",
    "max_var_index",
    "Program",
    "compile_program",
    "OP_CONST",
    "OP_VAR",
    "OP_NEG",
    "OP_ADD",
    "OP_SUB",
    "OP_MUL",
    "OP_DIV",
    "OP_POW",
]


class ParseError(ValueError):
    """Syntax or arity error, with a 0-based character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    index: int  # 1-based, i.e. x1 has index 1


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of + - * /
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int  # >= 0


# ---------------------------------------------------------------------------
# Tokenizer


_TOK_NUM = "num"
_TOK_VAR = "var"
_TOK_OP = "op"
_TOK_LPAREN = "("
_TOK_RPAREN = ")"
_TOK_END = "end"


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens: list[tuple[str, object, int]] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/^":
            tokens.append((_TOK_OP, ch, i))
            i += 1
            continue
        if ch == "(":
            tokens.append((_TOK_LPAREN, ch, i))
            i += 1
            continue
        if ch == ")":
            tokens.append((_TOK_RPAREN, ch, i))
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            lit = text[i:j]
            try:
                value = float(lit)
            except ValueError:
                raise ParseError(f"bad number literal '{lit}'", i) from None
            tokens.append((_TOK_NUM, value, i))
            i = j
            continue
        if ch == "x":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError("variable must be 'x' followed by digits", i)
            idx = int(text[i + 1 : j])
            if idx < 1:
                raise ParseError(f"variable index must be >= 1, got x{idx}", i)
            tokens.append((_TOK_VAR, idx, i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append((_TOK_END, None, n))
    return tokens


# ---------------------------------------------------------------------------
# Recursive-descent parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, object, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, object, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, ops: str) -> bool:
        kind, val, _ = self.peek()
        if kind == _TOK_OP and val in ops:
            self.advance()
            return True
        return False

    def parse(self) -> Expr:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != _TOK_END:
            raise ParseError(f"unexpected {val!r}", pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == _TOK_OP and val in "+-":
                self.advance()
                node = BinOp(str(val), node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == _TOK_OP and val in "*/":
                self.advance()
                node = BinOp(str(val), node, self.factor())
            else:
                return node

    def factor(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == _TOK_OP and val == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == _TOK_OP and val == "^":
            self.advance()
            kind, val, pos = self.advance()
            if kind != _TOK_NUM or float(val) != int(float(val)) or float(val) < 0:
                raise ParseError("exponent must be a non-negative integer literal", pos)
            return Pow(base, int(float(val)))
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.advance()
        if kind == _TOK_NUM:
            return Num(float(val))
        if kind == _TOK_VAR:
            return Var(int(val))
        if kind == _TOK_LPAREN:
            node = self.expr()
            kind, val, pos = self.advance()
            if kind != _TOK_RPAREN:
                raise ParseError("expected ')'", pos)
            return node
        if kind == _TOK_END:
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected {val!r}", pos)


def parse(text: str) -> Expr:
    """Parse one expression string into an AST."""
    return _Parser(text).parse()


def max_var_index(node: Expr) -> int:
    """Largest variable index referenced (0 for constant expressions)."""
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Num):
        return 0
    if isinstance(node, Neg):
        return max_var_index(node.operand)
    if isinstance(node, Pow):
        return max_var_index(node.base)
    if isinstance(node, BinOp):
        return max(max_var_index(node.left), max_var_index(node.right))
    raise TypeError(f"not an Expr: {node!r}")


# ---------------------------------------------------------------------------
# Pretty-printing (re-parses to an equivalent tree)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "pow": 4, "atom": 5}


def _render(node: Expr) -> tuple[str, int]:
    if isinstance(node, Num):
        text = repr(node.value)
        # a negative literal needs the precedence of a unary minus
        return text, _PREC["neg"] if node.value < 0 else _PREC["atom"]
    if isinstance(node, Var):
        return f"x{node.index}", _PREC["atom"]
    if isinstance(node, Neg):
        inner, prec = _render(node.operand)
        if prec < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}", _PREC["neg"]
    if isinstance(node, Pow):
        base, prec = _render(node.base)
        if prec < _PREC["atom"]:
            base = f"({base})"
        return f"{base}^{node.exponent}", _PREC["pow"]
    if isinstance(node, BinOp):
        lhs, lp = _render(node.left)
        rhs, rp = _render(node.right)
        prec = _PREC[node.op]
        if lp < prec:
            lhs = f"({lhs})"
        # right operand keeps parens at equal precedence: re-association would
        # change the tree and hence the floating-point result
        if rp <= prec:
            rhs = f"({rhs})"
        return f"{lhs} {node.op} {rhs}", prec
    raise TypeError(f"not an Expr: {node!r}")


def to_text(node: Expr) -> str:
    """Render an AST back to a parseable string."""
    return _render(node)[0]


# ---------------------------------------------------------------------------
# Tree-walking evaluator (reference path; the compiled program is the fast one)


def evaluate(node: Expr, state: np.ndarray) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return float(state[node.index - 1])
    if isinstance(node, Neg):
        return -evaluate(node.operand, state)
    if isinstance(node, Pow):
        base = evaluate(node.base, state)
        if node.exponent == 0:
            return 1.0
        acc = base
        for _ in range(node.exponent - 1):
            acc = acc * base
        return acc
    if isinstance(node, BinOp):
        a = evaluate(node.left, state)
        b = evaluate(node.right, state)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        with np.errstate(divide="ignore", invalid="ignore"):
            return float(np.float64(a) / np.float64(b))
    raise TypeError(f"not an Expr: {node!r}")


# ---------------------------------------------------------------------------
# Compilation to a flat stack program shared by both evaluation backends

OP_CONST = 0
OP_VAR = 1
OP_NEG = 2
OP_ADD = 3
OP_SUB = 4
OP_MUL = 5
OP_DIV = 6
OP_POW = 7


@dataclass(frozen=True, eq=False)
class Program:
    """One stack program per state coordinate, flattened into shared arrays.

    Instructions for coordinate i live at code[starts[i]:starts[i+1]].
    """

    dimension: int
    code: np.ndarray  # int64[n_instr]
    iarg: np.ndarray  # int64[n_instr]  (variable index or exponent)
    farg: np.ndarray  # float64[n_instr] (constants)
    starts: np.ndarray  # int64[dimension + 1]
    stack_size: int


def _emit(node: Expr, code: list, iarg: list, farg: list) -> int:
    """Append RPN instructions, returning the stack depth needed."""
    if isinstance(node, Num):
        code.append(OP_CONST)
        iarg.append(0)
        farg.append(float(node.value))
        return 1
    if isinstance(node, Var):
        code.append(OP_VAR)
        iarg.append(node.index - 1)
        farg.append(0.0)
        return 1
    if isinstance(node, Neg):
        depth = _emit(node.operand, code, iarg, farg)
        code.append(OP_NEG)
        iarg.append(0)
        farg.append(0.0)
        return depth
    if isinstance(node, Pow):
        depth = _emit(node.base, code, iarg, farg)
        code.append(OP_POW)
        iarg.append(node.exponent)
        farg.append(0.0)
        return depth
    if isinstance(node, BinOp):
        dl = _emit(node.left, code, iarg, farg)
        dr = _emit(node.right, code, iarg, farg)
        op = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}[node.op]
        code.append(op)
        iarg.append(0)
        farg.append(0.0)
        return max(dl, dr + 1)
    raise TypeError(f"not an Expr: {node!r}")


def compile_program(exprs: list[Expr] | tuple[Expr, ...]) -> Program:
    """Compile one expression per coordinate into a Program."""
    code: list[int] = []
    iarg: list[int] = []
    farg: list[float] = []
    starts = [0]
    stack = 1
    for node in exprs:
        stack = max(stack, _emit(node, code, iarg, farg))
        starts.append(len(code))
    return Program(
        dimension=len(exprs),
        code=np.asarray(code, dtype=np.int64),
        iarg=np.asarray(iarg, dtype=np.int64),
        farg=np.asarray(farg, dtype=np.float64),
        starts=np.asarray(starts, dtype=np.int64),
        stack_size=int(stack),
    )
