"""Exact coefficient domains.

Three domains are provided:

* :class:`LaurentPoly` -- Laurent polynomials over Q in ``s`` (``s = q^(1/4)``)
  and the spectral parameter ``beta``.
* :class:`RatFunc` -- rational functions in ``s`` and ``beta``.
* :class:`CyclotomicElem` -- polynomials in ``q`` reduced modulo the N-th
  cyclotomic polynomial, modelling ``q`` as a primitive N-th root of unity.

``q`` itself is always ``s**4``; every power of ``q`` that occurs in the
engine is a multiple of 1/4, so all coefficients stay polynomial in ``s``.

Polynomial arithmetic and gcds are delegated to FLINT (``python-flint``).
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import flint

__all__ = [
    "LaurentPoly",
    "RatFunc",
    "CyclotomicElem",
    "RatFuncMode",
    "CyclotomicMode",
    "RATFUNC",
    "cyclotomic",
    "cyclo_reduce",
    "ratfunc_arith",
    "ratfunc_eq",
    "q_power",
    "BETA",
]

_CTX = flint.fmpq_mpoly_ctx.get(("s", "beta"), "lex")
_S, _B = _CTX.gens()
_ONE = _CTX.from_dict({(0, 0): 1})
_ZERO = _CTX.from_dict({})


def _fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, flint.fmpq):
        return Fraction(int(c.p), int(c.q))
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


def _fmpq(c) -> flint.fmpq:
    c = _fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def _mono(es: int, eb: int):
    return _CTX.from_dict({(es, eb): 1})


def _min_exponents(p) -> tuple[int, int]:
    monoms = p.monoms()
    return int(min(m[0] for m in monoms)), int(min(m[1] for m in monoms))


def _format_qpow(es: int) -> str:
    if es == 0:
        return ""
    e = Fraction(es, 4)
    if e == 1:
        return "q"
    return f"q^({e})"


def _format_monomial(es: int, eb: int) -> str:
    parts = []
    if es:
        parts.append(_format_qpow(es))
    if eb:
        parts.append("beta" if eb == 1 else f"beta^({eb})")
    return "*".join(parts)


def _format_terms(terms: dict[tuple[int, int], Fraction]) -> str:
    if not terms:
        return "0"
    out = []
    # heaviest beta power first, then descending q power
    for i, key in enumerate(sorted(terms, key=lambda k: (-k[1], -k[0]))):
        c = terms[key]
        mono = _format_monomial(*key)
        neg = c < 0
        a = -c if neg else c
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


class LaurentPoly:
    """Laurent polynomial in ``s`` and ``beta`` with rational coefficients.

    Stored as ``p * s**shift[0] * beta**shift[1]`` where ``p`` is an ordinary
    polynomial whose minimal exponents are zero.
    """

    __slots__ = ("_p", "_shift")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            terms = {(0, 0): terms}
        clean = {}
        for (es, eb), c in terms.items():
            c = _fraction(c)
            if c:
                clean[(int(es), int(eb))] = clean.get((int(es), int(eb)), 0) + c
        clean = {k: v for k, v in clean.items() if v}
        if not clean:
            self._p, self._shift = _ZERO, (0, 0)
            return
        ms = min(k[0] for k in clean)
        mb = min(k[1] for k in clean)
        self._p = _CTX.from_dict({(k[0] - ms, k[1] - mb): _fmpq(v) for k, v in clean.items()})
        self._shift = (ms, mb)

    @classmethod
    def _from_poly(cls, p, shift=(0, 0)) -> "LaurentPoly":
        obj = cls.__new__(cls)
        if p.is_zero():
            obj._p, obj._shift = _ZERO, (0, 0)
            return obj
        ms, mb = _min_exponents(p)
        if ms or mb:
            p = _CTX.from_dict({(m[0] - ms, m[1] - mb): c for m, c in zip(p.monoms(), p.coeffs())})
        obj._p = p
        obj._shift = (shift[0] + ms, shift[1] + mb)
        return obj

    @classmethod
    def monomial(cls, es: int = 0, eb: int = 0, coeff=1) -> "LaurentPoly":
        return cls({(es, eb): coeff})

    @classmethod
    def s_power(cls, es: int) -> "LaurentPoly":
        return cls({(es, 0): 1})

    def terms(self) -> dict[tuple[int, int], Fraction]:
        ms, mb = self._shift
        return {(int(m[0]) + ms, int(m[1]) + mb): _fraction(c) for m, c in zip(self._p.monoms(), self._p.coeffs())}

    def __len__(self) -> int:
        return len(self._p)

    def __bool__(self) -> bool:
        return not self._p.is_zero()

    def is_monomial(self) -> bool:
        return len(self._p) == 1

    def is_constant(self) -> bool:
        return self._p.is_constant() and self._shift == (0, 0)

    def uses_beta(self) -> bool:
        return any(int(m[1]) for m in self._p.monoms()) or self._shift[1] != 0

    def constant_value(self) -> Fraction:
        if not self._p:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return _fraction(self._p.coeffs()[0])

    def _aligned(self, other: "LaurentPoly"):
        """Both operands as polynomials over a common monomial shift."""
        if not self._p:
            return _ZERO, other._p, other._shift
        if not other._p:
            return self._p, _ZERO, self._shift
        ms = min(self._shift[0], other._shift[0])
        mb = min(self._shift[1], other._shift[1])
        a = self._p * _mono(self._shift[0] - ms, self._shift[1] - mb)
        b = other._p * _mono(other._shift[0] - ms, other._shift[1] - mb)
        return a, b, (ms, mb)

    @staticmethod
    def _coerce(x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            return x
        return LaurentPoly({(0, 0): x})

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        a, b, sh = self._aligned(other)
        return LaurentPoly._from_poly(a + b, sh)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._from_poly(-self._p, self._shift)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        a, b, sh = self._aligned(other)
        return LaurentPoly._from_poly(a - b, sh)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        sh = (self._shift[0] + other._shift[0], self._shift[1] + other._shift[1])
        return LaurentPoly._from_poly(self._p * other._p, sh)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ZeroDivisionError("only monomials are invertible Laurent polynomials")
            (es, eb), c = next(iter(self.terms().items()))
            return LaurentPoly({(es * n, eb * n): c**n})
        return LaurentPoly._from_poly(self._p**n, (self._shift[0] * n, self._shift[1] * n))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._shift == other._shift and self._p == other._p

    def __hash__(self):
        return hash((self._shift, str(self._p)))

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact division; raises ``ArithmeticError`` if ``other`` does not divide."""
        if not other:
            raise ZeroDivisionError("division by zero Laurent polynomial")
        quo, rem = divmod(self._p, other._p)
        if not rem.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        sh = (self._shift[0] - other._shift[0], self._shift[1] - other._shift[1])
        return LaurentPoly._from_poly(quo, sh)

    def subs(self, s=None, beta=None):
        """Substitute values for ``s`` and/or ``beta``.

        Values may be rationals or Laurent polynomials; negative powers of a
        value are only allowed when it is invertible (nonzero rational or
        monomial).
        """
        if s is None and beta is None:
            return self
        vs = LaurentPoly(s) if isinstance(s, (int, Fraction)) else s
        vb = LaurentPoly(beta) if isinstance(beta, (int, Fraction)) else beta
        total = LaurentPoly()
        for (es, eb), c in self.terms().items():
            term = LaurentPoly(c)
            term = term * (vs**es if vs is not None else LaurentPoly.monomial(es, 0))
            term = term * (vb**eb if vb is not None else LaurentPoly.monomial(0, eb))
            total = total + term
        return total

    def in_q(self) -> "LaurentPoly":
        """Divide every ``s`` exponent by 4, i.e. read slot 0 as ``q`` rather than ``s``."""
        terms = self.terms()
        if any(es % 4 or eb for es, eb in terms):
            raise ValueError(f"{self} is not a Laurent polynomial in q alone")
        return LaurentPoly({(es // 4, 0): c for (es, _), c in terms.items()})

    def __str__(self):
        return _format_terms(self.terms())

    def __repr__(self):
        return f"LaurentPoly({self})"


class RatFunc:
    """Element of Q(s, beta).

    The stored pair ``(num, den)`` is always coprime with a monic denominator,
    so structurally equal objects are equal functions.  :func:`ratfunc_eq`
    still compares by cross-multiplication.
    """

    __slots__ = ("_n", "_d")

    def __init__(self, num=0, den=1):
        if isinstance(num, RatFunc) or isinstance(den, RatFunc):
            r = RatFunc._coerce(num) / RatFunc._coerce(den)
            self._n, self._d = r._n, r._d
            return
        num = LaurentPoly._coerce(num)
        den = LaurentPoly._coerce(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        es = num._shift[0] - den._shift[0]
        eb = num._shift[1] - den._shift[1]
        n = num._p * _mono(max(es, 0), max(eb, 0))
        d = den._p * _mono(max(-es, 0), max(-eb, 0))
        self._n, self._d = _normalize(n, d)

    @classmethod
    def _raw(cls, n, d) -> "RatFunc":
        obj = cls.__new__(cls)
        obj._n, obj._d = n, d
        return obj

    @property
    def num(self) -> LaurentPoly:
        return LaurentPoly._from_poly(self._n)

    @property
    def den(self) -> LaurentPoly:
        return LaurentPoly._from_poly(self._d)

    @staticmethod
    def _coerce(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, LaurentPoly):
            return RatFunc(x)
        if isinstance(x, (int, Fraction, flint.fmpq)):
            f = _fraction(x)
            return RatFunc._raw(_CTX.from_dict({(0, 0): _fmpq(f)}) if f else _ZERO, _ONE)
        raise TypeError(f"cannot coerce {x!r} to RatFunc")

    def __bool__(self):
        return not self._n.is_zero()

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if o._n.is_zero():
            return self
        if self._n.is_zero():
            return o
        if self._d == o._d:
            return RatFunc._raw(*_normalize(self._n + o._n, self._d))
        return RatFunc._raw(*_normalize(self._n * o._d + o._n * self._d, self._d * o._d))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self._n, self._d)

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self._n.is_zero() or o._n.is_zero():
            return RatFunc._raw(_ZERO, _ONE)
        # cross-cancel before multiplying keeps the gcds small
        g1 = self._n.gcd(o._d)
        g2 = o._n.gcd(self._d)
        n = (self._n / g1) * (o._n / g2)
        d = (self._d / g2) * (o._d / g1)
        lc = d.leading_coefficient()
        if lc != 1:
            n, d = n / lc, d / lc
        return RatFunc._raw(n, d)

    __rmul__ = __mul__

    def mul_spow(self, k: int) -> "RatFunc":
        """Multiply by ``s**k`` without a general gcd."""
        if k == 0 or self._n.is_zero():
            return self
        n, d = self._n, self._d
        if k > 0:
            c = min(k, _s_content(d))
            if c:
                d = d / _mono(c, 0)
            if k - c:
                n = n * _mono(k - c, 0)
        else:
            k = -k
            c = min(k, _s_content(n))
            if c:
                n = n / _mono(c, 0)
            if k - c:
                d = d * _mono(k - c, 0)
        return RatFunc._raw(n, d)

    def inverse(self) -> "RatFunc":
        if self._n.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        n, d = self._d, self._n
        lc = d.leading_coefficient()
        return RatFunc._raw(n / lc, d / lc)

    def __truediv__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc._raw(self._n**n, self._d**n)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self._n == o._n and self._d == o._d

    def __hash__(self):
        return hash((str(self._n), str(self._d)))

    def is_constant(self) -> bool:
        return self._n.is_constant() and self._d.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        if self._n.is_zero():
            return Fraction(0)
        return _fraction(self._n.coeffs()[0]) / _fraction(self._d.coeffs()[0])

    def uses_beta(self) -> bool:
        return self.num.uses_beta() or self.den.uses_beta()

    def subs(self, s=None, beta=None) -> "RatFunc":
        """Substitute for ``s``/``beta``; values may be rationals, LaurentPoly or RatFunc.

        Raises ``ZeroDivisionError`` when the substitution hits a pole.
        """

        def ev(p: LaurentPoly) -> RatFunc:
            total = RatFunc(0)
            for (es, eb), c in p.terms().items():
                term = RatFunc(c)
                term = term * (RatFunc._coerce(s) ** es if s is not None else RatFunc(LaurentPoly.monomial(es, 0)))
                term = term * (RatFunc._coerce(beta) ** eb if beta is not None else RatFunc(LaurentPoly.monomial(0, eb)))
                total = total + term
            return total

        den = ev(self.den)
        if not den:
            raise ZeroDivisionError(f"substitution hits a pole of {self}")
        return ev(self.num) / den

    def __str__(self):
        n = str(self.num)
        if self._d == _ONE:
            return n
        d = str(self.den)
        if len(self._n) > 1:
            n = f"({n})"
        return f"{n}*({d})^(-1)"

    def __repr__(self):
        return f"RatFunc({self})"


def _s_content(p) -> int:
    return int(min(m[0] for m in p.monoms()))


def _normalize(n, d):
    if n.is_zero():
        return _ZERO, _ONE
    if not d.is_constant():
        g = n.gcd(d)
        if not g.is_one():
            n, d = n / g, d / g
    lc = d.leading_coefficient()
    if lc != 1:
        n, d = n / lc, d / lc
    return n, d


BETA = RatFunc(LaurentPoly.monomial(0, 1))


@lru_cache(maxsize=4096)
def q_power(quarters: int) -> RatFunc:
    """``q^(quarters/4)`` as a rational function (i.e. ``s**quarters``)."""
    return RatFunc(LaurentPoly.s_power(quarters))


def ratfunc_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def ratfunc_eq(a, b) -> bool:
    """Equality of rational functions by cross-multiplication."""
    a, b = RatFunc._coerce(a), RatFunc._coerce(b)
    return a._n * b._d == b._n * a._d


# --- cyclotomic quotient -------------------------------------------------

_cyclo_lock = threading.Lock()
_cyclo_cache: dict[int, LaurentPoly] = {}


def cyclotomic(N: int) -> LaurentPoly:
    """The N-th cyclotomic polynomial ``Phi_N(q)`` (as usual, ``q = s^4``).

    Computed by dividing ``q^N - 1`` by all ``Phi_d`` with ``d | N, d < N``.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    with _cyclo_lock:
        cached = _cyclo_cache.get(N)
    if cached is not None:
        return cached
    p = LaurentPoly({(4 * N, 0): 1, (0, 0): -1})
    for d in range(1, N):
        if N % d == 0:
            p = p.exact_div(cyclotomic(d))
    with _cyclo_lock:
        _cyclo_cache[N] = p
    return p


@lru_cache(maxsize=None)
def _cyclo_dense(N: int) -> tuple[Fraction, ...]:
    terms = cyclotomic(N).in_q().terms()
    out = [Fraction(0)] * (max(k[0] for k in terms) + 1)
    for (e, _), c in terms.items():
        out[e] = c
    return tuple(out)


def _reduce_dense(coeffs: list[Fraction], N: int) -> tuple[Fraction, ...]:
    mod = _cyclo_dense(N)
    deg = len(mod) - 1  # Phi_N is monic
    c = list(coeffs)
    for i in range(len(c) - 1, deg - 1, -1):
        lead = c[i]
        if lead:
            for j in range(deg + 1):
                c[i - deg + j] -= lead * mod[j]
    c = c[:deg] + [Fraction(0)] * max(0, deg - len(c))
    return tuple(c)


class CyclotomicElem:
    """Element of Q[q]/(Phi_N(q)), canonical representative of degree < deg Phi_N."""

    __slots__ = ("N", "rep")

    def __init__(self, N: int, coeffs=()):
        self.N = N
        self.rep = _reduce_dense([_fraction(c) for c in coeffs], N)

    @classmethod
    def q_pow(cls, N: int, e: int) -> "CyclotomicElem":
        # q^N = 1 modulo Phi_N, so negative powers wrap around
        e %= N
        return cls(N, [0] * e + [1])

    def _check(self, other) -> "CyclotomicElem":
        if isinstance(other, (int, Fraction)):
            return CyclotomicElem(self.N, [other])
        if not isinstance(other, CyclotomicElem):
            raise TypeError(f"cannot combine CyclotomicElem with {type(other).__name__}")
        if other.N != self.N:
            raise ValueError("cyclotomic moduli differ")
        return other

    def __add__(self, other):
        o = self._check(other)
        return CyclotomicElem(self.N, [a + b for a, b in zip(self.rep, o.rep)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElem(self.N, [-a for a in self.rep])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        o = self._check(other)
        prod = [Fraction(0)] * (len(self.rep) + len(o.rep))
        for i, a in enumerate(self.rep):
            if a:
                for j, b in enumerate(o.rep):
                    if b:
                        prod[i + j] += a * b
        return CyclotomicElem(self.N, prod)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of CyclotomicElem are not supported")
        out = CyclotomicElem(self.N, [1])
        for _ in range(n):
            out = out * self
        return out

    def __bool__(self):
        return any(self.rep)

    def is_zero(self) -> bool:
        return not any(self.rep)

    def __eq__(self, other):
        try:
            o = self._check(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.rep == o.rep

    def __hash__(self):
        return hash((self.N, self.rep))

    def to_laurent(self) -> LaurentPoly:
        return LaurentPoly({(4 * i, 0): c for i, c in enumerate(self.rep) if c})

    def __str__(self):
        terms = {(4 * i, 0): c for i, c in enumerate(self.rep) if c}
        return _format_terms(terms)

    def __repr__(self):
        return f"CyclotomicElem(N={self.N}, {self})"


def cyclo_reduce(p: LaurentPoly, N: int) -> CyclotomicElem:
    """Reduce a Laurent polynomial in ``q`` modulo ``Phi_N``.

    Negative powers are handled through ``q^-1 = q^(N-1)``, valid in the quotient.
    """
    if p.uses_beta():
        raise ValueError("cyclotomic reduction needs a polynomial in q alone")
    terms = p.in_q().terms()
    if not terms:
        return CyclotomicElem(N)
    coeffs = [Fraction(0)] * N
    for (e, _), c in terms.items():
        coeffs[e % N] += c
    return CyclotomicElem(N, coeffs)


# --- coefficient modes -----------------------------------------------------


class RatFuncMode:
    """Coefficients in Q(s, beta)."""

    name = "ratfunc"

    def __init__(self):
        self.one = RatFunc(1)
        self.zero = RatFunc(0)

    def qpow(self, quarters: int) -> RatFunc:
        return q_power(quarters)

    def mul_qpow(self, c: RatFunc, quarters: int) -> RatFunc:
        return c.mul_spow(quarters)

    def coerce(self, x) -> RatFunc:
        return RatFunc._coerce(x)

    def __eq__(self, other):
        return isinstance(other, RatFuncMode)

    def __hash__(self):
        return hash("ratfunc")

    def __repr__(self):
        return "RatFuncMode()"


class CyclotomicMode:
    """Coefficients in Q[q]/(Phi_N): q is a primitive N-th root of unity."""

    name = "cyclotomic"

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("N must be a positive integer")
        self.N = N
        self.one = CyclotomicElem(N, [1])
        self.zero = CyclotomicElem(N)

    def qpow(self, quarters: int) -> CyclotomicElem:
        if quarters % 4:
            raise ValueError("fractional powers of q are not available in cyclotomic mode")
        return CyclotomicElem.q_pow(self.N, quarters // 4)

    def mul_qpow(self, c: CyclotomicElem, quarters: int) -> CyclotomicElem:
        if quarters == 0:
            return c
        return c * self.qpow(quarters)

    def coerce(self, x) -> CyclotomicElem:
        if isinstance(x, CyclotomicElem):
            if x.N != self.N:
                raise ValueError("cyclotomic moduli differ")
            return x
        if isinstance(x, RatFunc):
            if not x.den.is_monomial():
                raise ValueError("only Laurent polynomial coefficients reduce into the cyclotomic quotient")
            return cyclo_reduce(x.num, self.N) * cyclo_reduce(x.den**-1, self.N)
        if isinstance(x, LaurentPoly):
            return cyclo_reduce(x, self.N)
        return CyclotomicElem(self.N, [x])

    def __eq__(self, other):
        return isinstance(other, CyclotomicMode) and other.N == self.N

    def __hash__(self):
        return hash(("cyclotomic", self.N))

    def __repr__(self):
        return f"CyclotomicMode({self.N})"


RATFUNC = RatFuncMode()
