"""A small expression language for elements of the skew algebra.

Grammar::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' '(' rational ')')?
    atom   := ident | number | '(' expr ')'

``q`` and ``beta`` are reserved identifiers.  Exponents must be parenthesized.
Subtraction is stored as multiplication by the scalar ``-1``, and the printer
emits it as ``a - b``, so ``parse(to_text(a)) == a`` holds structurally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .coeffs import BETA, RatFunc
from .qcombinatorics import HalfInt, expand_power_depth
from .skewalg import AlgebraContext, TruncatedSeries, series_invert, series_mul

__all__ = [
    "Sum",
    "Product",
    "Power",
    "Var",
    "Scalar",
    "QPower",
    "Beta",
    "Ast",
    "ParseError",
    "EvalError",
    "parse",
    "to_text",
    "normalize",
    "evaluate",
    "evaluate_commutative",
    "to_generator_spec",
    "variables",
]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Scalar:
    value: Fraction


@dataclass(frozen=True)
class QPower:
    exponent: Fraction


@dataclass(frozen=True)
class Beta:
    pass


@dataclass(frozen=True)
class Sum:
    items: tuple


@dataclass(frozen=True)
class Product:
    items: tuple


@dataclass(frozen=True)
class Power:
    base: object
    exponent: Fraction


Ast = Union[Sum, Product, Power, Var, Scalar, QPower, Beta]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.line, self.col, self.expected = line, col, tuple(expected)
        exp = f"; expected one of {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"{message} at line {line}, column {col}{exp}")


class EvalError(ValueError):
    pass


# --- lexer / parser -----------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()/]))")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            line, col = _linecol(text, i)
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        i = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def _linecol(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _lex(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected, tok=None):
        tok = tok or self.tok
        line, col = _linecol(self.text, tok.pos)
        what = "end of input" if tok.kind == "end" else f"{tok.text!r}"
        raise ParseError(f"unexpected {what}", line, col, tuple(expected))

    def accept(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.fail([repr(text)])

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            self.fail(["'+'", "'-'", "'*'", "'^'", "end of input"])
        return node

    def expr(self):
        items = [self.signed_term(self.accept("-"))]
        while True:
            if self.accept("+"):
                items.append(self.signed_term(False))
            elif self.accept("-"):
                items.append(self.signed_term(True))
            else:
                break
        return items[0] if len(items) == 1 else Sum(tuple(items))

    def signed_term(self, negative: bool):
        factors = self.term()
        if negative:
            if len(factors) == 1 and isinstance(factors[0], Scalar):
                return Scalar(-factors[0].value)
            factors = [Scalar(Fraction(-1))] + factors
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def term(self):
        factors = [self.factor()]
        while self.accept("*"):
            factors.append(self.factor())
        return factors

    def factor(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            if not (self.tok.kind == "op" and self.tok.text == "("):
                self.fail(["'('"])
            self.i += 1
            etok = self.tok
            e = self.rational()
            self.expect(")")
            return _make_power(base, e, self, etok)
        return base

    def rational(self) -> Fraction:
        neg = self.accept("-")
        if self.tok.kind != "num":
            self.fail(["integer"])
        v = Fraction(int(self.tok.text))
        self.i += 1
        if self.accept("/"):
            if self.tok.kind != "num":
                self.fail(["integer"])
            d = int(self.tok.text)
            if d == 0:
                self.fail(["nonzero integer"])
            v /= d
            self.i += 1
        return -v if neg else v

    def atom(self):
        tok = self.tok
        if tok.kind == "ident":
            self.i += 1
            if tok.text == "q":
                return QPower(Fraction(1))
            if tok.text == "beta":
                return Beta()
            return Var(tok.text)
        if tok.kind == "num":
            self.i += 1
            v = Fraction(int(tok.text))
            if self.accept("/"):
                if self.tok.kind != "num" or int(self.tok.text) == 0:
                    self.fail(["nonzero integer"])
                v /= int(self.tok.text)
                self.i += 1
            return Scalar(v)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.fail(["identifier", "number", "'('"])


def _make_power(base, e: Fraction, parser: _Parser, etok: _Tok):
    if isinstance(base, QPower):
        v = base.exponent * e
        if 4 % v.denominator:
            parser.fail(["exponent of q with denominator 1, 2 or 4"], etok)
        return QPower(v)
    if e.denominator not in (1, 2):
        parser.fail(["exponent with denominator 1 or 2"], etok)
    if isinstance(base, (Beta, Scalar)) and e.denominator != 1:
        parser.fail(["integer exponent"], etok)
    return Power(base, e)


def parse(text: str) -> Ast:
    """Parse ``text``; raises :class:`ParseError` with line, column and expected tokens."""
    return _Parser(text).parse()


# --- printer --------------------------------------------------------------


def _frac(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _is_neg_product(node) -> bool:
    return isinstance(node, Product) and len(node.items) >= 2 and node.items[0] == Scalar(Fraction(-1))


def to_text(node: Ast) -> str:
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Scalar):
        v = node.value
        return _frac(v) if v >= 0 and v.denominator == 1 else f"({_frac(v)})"
    if isinstance(node, QPower):
        return "q" if node.exponent == 1 else f"q^({_frac(node.exponent)})"
    if isinstance(node, Beta):
        return "beta"
    if isinstance(node, Power):
        return f"{_wrap(node.base, power=True)}^({_frac(node.exponent)})"
    if isinstance(node, Product):
        return " * ".join(_wrap(x) for x in node.items)
    if isinstance(node, Sum):
        out = []
        for k, x in enumerate(node.items):
            if _is_neg_product(x):
                body = " * ".join(_wrap(y) for y in x.items[1:])
                out.append(f" - {body}" if k else f"-{body}")
            else:
                out.append(f" + {_wrap(x, in_sum=True)}" if k else _wrap(x, in_sum=True))
        return "".join(out)
    raise TypeError(f"not an expression node: {node!r}")


def _wrap(node, *, power: bool = False, in_sum: bool = False) -> str:
    text = to_text(node)
    if isinstance(node, Sum) or (isinstance(node, Product) and not in_sum):
        return f"({text})"
    if power and isinstance(node, Power):
        return f"({text})"
    return text


def normalize(text: str) -> str:
    """Canonical spelling of an expression (a fixed point of parse/print)."""
    return to_text(parse(text))


def variables(node: Ast) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Sum, Product)):
        return set().union(*(variables(x) for x in node.items))
    if isinstance(node, Power):
        return variables(node.base)
    return set()


# --- evaluation -----------------------------------------------------------


def _coeff(node):
    """Scalar value of a coefficient-only node, or ``None``."""
    if isinstance(node, Scalar):
        return RatFunc(node.value)
    if isinstance(node, QPower):
        from .coeffs import q_power

        return q_power(int(node.exponent * 4))
    if isinstance(node, Beta):
        return BETA
    if isinstance(node, Power):
        c = _coeff(node.base)
        return None if c is None else c ** int(node.exponent)
    if isinstance(node, Product):
        out = RatFunc(1)
        for x in node.items:
            c = _coeff(x)
            if c is None:
                return None
            out = out * c
        return out
    if isinstance(node, Sum):
        out = RatFunc(0)
        for x in node.items:
            c = _coeff(x)
            if c is None:
                return None
            out = out + c
        return out
    return None


def _linear_sites(ctx: AlgebraContext, node) -> list[int] | None:
    """Sites of a plain sum of distinct variables, else ``None``."""
    if not isinstance(node, Sum):
        return None
    sites = []
    for x in node.items:
        if not isinstance(x, Var):
            return None
        if not ctx.has_name(x.name):
            raise EvalError(f"unregistered variable {x.name!r}")
        sites.append(ctx.site_of(x.name))
    return sites if len(set(sites)) == len(sites) else None


def evaluate(node: Ast, ctx: AlgebraContext, depth: int = 8) -> TruncatedSeries:
    """Evaluate to a truncated series; every infinite expansion is taken ``depth`` levels deep."""
    c = _coeff(node)
    if c is not None:
        return TruncatedSeries.exact(ctx.scalar(ctx.mode.coerce(c)))
    if isinstance(node, Var):
        if not ctx.has_name(node.name):
            raise EvalError(f"unregistered variable {node.name!r}")
        return TruncatedSeries.exact(ctx.var(node.name))
    if isinstance(node, Sum):
        out = None
        for x in node.items:
            v = evaluate(x, ctx, depth)
            out = v if out is None else out + v
        return out
    if isinstance(node, Product):
        out = None
        for x in node.items:
            v = evaluate(x, ctx, depth)
            out = v if out is None else series_mul(out, v)
        return out
    if isinstance(node, Power):
        e = HalfInt(node.exponent)
        if isinstance(node.base, Var):
            if not ctx.has_name(node.base.name):
                raise EvalError(f"unregistered variable {node.base.name!r}")
            return TruncatedSeries.exact(ctx.var(node.base.name, e.value))
        if e.is_integer() and int(e) >= 0:
            base = evaluate(node.base, ctx, depth)
            out = TruncatedSeries.exact(ctx.one())
            for _ in range(int(e)):
                out = series_mul(out, base)
            return out
        sites = _linear_sites(ctx, node.base)
        if sites is not None:
            types = {ctx.type_of_site(s) for s in sites}
            if len(types) != 1:
                raise EvalError("a series base must have summands of a single type")
            return expand_power_depth(ctx, sites, e, depth)
        if e.is_integer():
            base = evaluate(node.base, ctx, depth)
            if base.cut is None and len(base.body) > 1:
                base = TruncatedSeries(base.body, base.lead - depth, base.lead)
            inv = series_invert(base)
            out = TruncatedSeries.exact(ctx.one())
            for _ in range(-int(e)):
                out = series_mul(out, inv)
            return out
        raise EvalError("half-integer powers need a single variable or a plain sum of variables")
    raise EvalError(f"cannot evaluate {node!r}")


def evaluate_commutative(node: Ast):
    """The ``q = 1`` image as a :class:`~qlattice.classical.CommElement`."""
    from .classical import CommElement

    if isinstance(node, Var):
        return CommElement.var(node.name)
    if isinstance(node, Scalar):
        return CommElement.scalar(node.value)
    if isinstance(node, QPower):
        return CommElement.scalar(1)
    if isinstance(node, Beta):
        raise EvalError("beta has no commutative image")
    if isinstance(node, Sum):
        out = CommElement.zero()
        for x in node.items:
            out = out + evaluate_commutative(x)
        return out
    if isinstance(node, Product):
        out = CommElement.scalar(1)
        for x in node.items:
            out = out * evaluate_commutative(x)
        return out
    if isinstance(node, Power):
        e = node.exponent
        if isinstance(node.base, Var):
            return CommElement.var(node.base.name, e)
        if e.denominator == 1:
            return evaluate_commutative(node.base) ** int(e)
        coeffs = _form_coeffs(node.base)
        if coeffs is None:
            raise EvalError("half-integer powers need a single variable or a linear form")
        return CommElement.form_power(coeffs, e)
    raise EvalError(f"cannot evaluate {node!r}")


def _form_coeffs(node) -> dict[str, int] | None:
    if not isinstance(node, Sum):
        return None
    out: dict[str, int] = {}
    for x in node.items:
        if isinstance(x, Var):
            out[x.name] = out.get(x.name, 0) + 1
        elif isinstance(x, Product) and len(x.items) == 2 and isinstance(x.items[0], Scalar) and isinstance(x.items[1], Var):
            c = x.items[0].value
            if c.denominator != 1:
                return None
            out[x.items[1].name] = out.get(x.items[1].name, 0) + int(c)
        else:
            return None
    return out


_SITE = re.compile(r"^x(-?\d+)$")


def to_generator_spec(node: Ast):
    """Read a product of powers of site sums as a :class:`~qlattice.virasoro.GeneratorSpec`."""
    from .virasoro import GeneratorSpec

    items = node.items if isinstance(node, Product) else (node,)
    factors = []
    for x in items:
        base, e = (x.base, x.exponent) if isinstance(x, Power) else (x, Fraction(1))
        names = [base] if isinstance(base, Var) else list(base.items) if isinstance(base, Sum) else None
        if names is None or not all(isinstance(v, Var) and _SITE.match(v.name) for v in names):
            raise EvalError("a generator is a product of powers of sums of site variables x<i>")
        factors.append((tuple(int(_SITE.match(v.name).group(1)) for v in names), e))
    return GeneratorSpec(factors)
