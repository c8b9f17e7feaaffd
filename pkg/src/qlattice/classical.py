"""Commutative (q = 1) side: Poisson brackets and first-order vector fields.

Expressions live in a commutative ring of functions in named slots (``x1``,
``x2``, ..., ``Uminus``, ``Uplus`` and any auxiliary slot such as ``V``).
Besides Laurent monomials with half-integer exponents they may contain
half-integer powers of linear forms like ``(x1 + x2)^(-1/2)``, which is what
the commutative images of the generators need.

Representation: an element is a sum over *sectors*.  A sector is a pair
``(half_slots, half_forms)`` recording which square roots ``sqrt(v)`` and
``sqrt(L)`` multiply it; the remaining factor is a rational function with
integer exponents, stored reduced as ``num / den`` over flint.  Distinct
sectors are linearly independent over the rational functions, so an element
is zero exactly when every sector's numerator is.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping

import flint

__all__ = [
    "CommElement",
    "Derivation",
    "apply_derivation",
    "bracket_action",
    "poisson_bracket",
    "rep_fields",
    "hw_report",
    "HWReport",
    "slot_key",
    "linear_form",
    "euler_field",
    "sl2_defects",
]

_SITE = re.compile(r"^x(-?\d+)$")


def slot_key(name: str):
    """Position of a slot on the line: ``Uminus`` first, sites by index, then ``Uplus``, then the rest."""
    m = _SITE.match(name)
    if m:
        return (1, int(m.group(1)), name)
    if name == "Uminus":
        return (0, 0, name)
    if name == "Uplus":
        return (2, 0, name)
    return (3, 0, name)


@lru_cache(maxsize=None)
def _ctx(slots: tuple[str, ...]):
    return flint.fmpq_mpoly_ctx.get(slots if slots else ("_",), "lex")


def linear_form(coeffs: Mapping[str, int]) -> tuple[tuple[str, int], ...]:
    """Normalized key of ``sum c_v v``: integer coefficients, gcd 1, first coefficient positive."""
    items = sorted(((v, int(c)) for v, c in coeffs.items() if c), key=lambda t: slot_key(t[0]))
    if len(items) < 2:
        raise ValueError("a linear form needs at least two slots")
    g = 0
    for _, c in items:
        g = gcd(g, c)
    if g != 1 or items[0][1] < 0:
        raise ValueError("only primitive forms with positive leading coefficient may carry a square root")
    return tuple(items)


def _sorted_slots(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=slot_key))


class CommElement:
    """Element of the commutative function ring described in the module docstring."""

    __slots__ = ("slots", "sectors")

    def __init__(self, slots: Iterable[str], sectors: Mapping | None = None):
        self.slots = _sorted_slots(slots)
        ctx = _ctx(self.slots)
        clean = {}
        for key, (n, d) in (sectors or {}).items():
            if n.context() is not ctx:
                raise ValueError("sector polynomial in the wrong context")
            if n.is_zero():
                continue
            clean[key] = _reduce(n, d)
        self.sectors = clean

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, slots=()) -> "CommElement":
        return cls(slots)

    @classmethod
    def scalar(cls, c, slots=()) -> "CommElement":
        ctx = _ctx(_sorted_slots(slots))
        c = Fraction(c)
        if not c:
            return cls(slots)
        return cls(slots, {((), ()): (ctx.from_dict({(0,) * ctx.nvars(): flint.fmpq(c.numerator, c.denominator)}), ctx.from_dict({(0,) * ctx.nvars(): 1}))})

    @classmethod
    def var(cls, name: str, exponent=1) -> "CommElement":
        return cls.monomial({name: exponent})

    @classmethod
    def monomial(cls, exps: Mapping[str, object], coeff=1) -> "CommElement":
        slots = _sorted_slots(exps)
        ctx = _ctx(slots)
        n = ctx.nvars()
        num_e = [0] * n
        den_e = [0] * n
        half = []
        for v, e in exps.items():
            d = Fraction(e) * 2
            if d.denominator != 1:
                raise ValueError(f"exponent {e} is not a half-integer")
            d = int(d)
            if d % 2:
                half.append(v)
                d -= 1
            i = slots.index(v) if slots != () else 0
            k = d // 2
            if k >= 0:
                num_e[i] += k
            else:
                den_e[i] -= k
        c = Fraction(coeff)
        num = ctx.from_dict({tuple(num_e): flint.fmpq(c.numerator, c.denominator)})
        den = ctx.from_dict({tuple(den_e): 1})
        return cls(slots, {(_sorted_slots(half), ()): (num, den)})

    @classmethod
    def form_power(cls, coeffs: Mapping[str, int], exponent) -> "CommElement":
        """``(sum c_v v)^exponent`` for a half-integer exponent."""
        d = Fraction(exponent) * 2
        if d.denominator != 1:
            raise ValueError(f"exponent {exponent} is not a half-integer")
        d = int(d)
        if d % 2 == 0:
            return _linear(coeffs) ** (d // 2)
        key = linear_form(coeffs)
        root = cls(_sorted_slots(v for v, _ in key), {((), (key,)): _one(_sorted_slots(v for v, _ in key))})
        return root * _linear(coeffs) ** ((d - 1) // 2)

    # arithmetic ---------------------------------------------------------

    def _lift(self, slots: tuple[str, ...]) -> dict:
        if slots == self.slots:
            return self.sectors
        ctx = _ctx(slots)
        idx = [slots.index(v) for v in self.slots]
        out = {}
        for key, (n, d) in self.sectors.items():
            out[key] = (_remap(n, idx, ctx), _remap(d, idx, ctx))
        return out

    def _unify(self, other: "CommElement"):
        slots = _sorted_slots(self.slots + other.slots)
        return slots, self._lift(slots), other._lift(slots)

    @staticmethod
    def _coerce(x) -> "CommElement":
        if isinstance(x, CommElement):
            return x
        if isinstance(x, (int, Fraction)):
            return CommElement.scalar(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        slots, a, b = self._unify(other)
        out = dict(a)
        for key, (n, d) in b.items():
            if key in out:
                n0, d0 = out[key]
                out[key] = (n0 * d + n * d0, d0 * d)
            else:
                out[key] = (n, d)
        return CommElement(slots, out)

    __radd__ = __add__

    def __neg__(self):
        return CommElement(self.slots, {k: (-n, d) for k, (n, d) in self.sectors.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        slots, a, b = self._unify(other)
        ctx = _ctx(slots)
        out: dict = {}
        for (hs1, hf1), (n1, d1) in a.items():
            for (hs2, hf2), (n2, d2) in b.items():
                n, d = n1 * n2, d1 * d2
                hs = set(hs1) ^ set(hs2)
                for v in set(hs1) & set(hs2):
                    n = n * ctx.gens()[slots.index(v)]
                hf = set(hf1) ^ set(hf2)
                for L in set(hf1) & set(hf2):
                    n = n * _form_poly(L, slots)
                key = (_sorted_slots(hs), tuple(sorted(hf)))
                if key in out:
                    n0, d0 = out[key]
                    out[key] = (n0 * d + n * d0, d0 * d)
                else:
                    out[key] = (n, d)
        return CommElement(slots, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = CommElement.scalar(1, self.slots)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "CommElement":
        if len(self.sectors) != 1:
            raise ZeroDivisionError("only single-sector elements are inverted")
        ((hs, hf), (n, d)), = self.sectors.items()
        ctx = _ctx(self.slots)
        # (R sqrt(P))^-1 = sqrt(P) / (R P)
        p = ctx.from_dict({(0,) * ctx.nvars(): 1})
        for v in hs:
            p = p * ctx.gens()[self.slots.index(v)]
        for L in hf:
            p = p * _form_poly(L, self.slots)
        return CommElement(self.slots, {(hs, hf): (d, n * p)})

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("CommElement is not hashable")

    def is_zero(self) -> bool:
        return not self.sectors

    def __bool__(self):
        return not self.is_zero()

    # calculus -----------------------------------------------------------

    def diff(self, v: str) -> "CommElement":
        """Partial derivative in slot ``v`` (all other slots held fixed)."""
        if v not in self.slots:
            return CommElement(self.slots)
        ctx = _ctx(self.slots)
        i = self.slots.index(v)
        xv = ctx.gens()[i]
        out = {}
        for (hs, hf), (n, d) in self.sectors.items():
            # d(R sqrt(P)) = sqrt(P) (R' + R * sum c/(2 p)) over the square-root factors p
            sn, sd = ctx.from_dict({}), ctx.from_dict({(0,) * ctx.nvars(): 1})
            if v in hs:
                sn, sd = sn * 2 * xv + sd, sd * 2 * xv
            for L in hf:
                c = dict(L).get(v, 0)
                if c:
                    P = _form_poly(L, self.slots)
                    sn, sd = sn * 2 * P + sd * c, sd * 2 * P
            nn = (n.derivative(i) * d - n * d.derivative(i)) * sd + n * d * sn
            dd = d * d * sd
            out[(hs, hf)] = (nn, dd)
        return CommElement(self.slots, out)

    def degree(self) -> Fraction | None:
        """Common total degree, or ``None`` when the element is not homogeneous."""
        degs = set()
        for (hs, hf), (n, d) in self.sectors.items():
            dd = int(d.total_degree())
            half = Fraction(len(hs) + len(hf), 2)
            for exps in n.monoms():
                degs.add(sum(int(e) for e in exps) - dd + half)
            if any(sum(int(e) for e in m) != dd for m in d.monoms()):
                return None
        if len(degs) > 1:
            return None
        return degs.pop() if degs else Fraction(0)

    def uses_slot(self, v: str) -> bool:
        return not self.diff(v).is_zero() if v in self.slots else False

    def __str__(self):
        if not self.sectors:
            return "0"
        parts = []
        for (hs, hf), (n, d) in sorted(self.sectors.items(), key=lambda t: (t[0][0], tuple(map(str, t[0][1])))):
            roots = [f"{v}^(1/2)" for v in hs] + ["(" + " + ".join(f"{c}*{v}" if c != 1 else v for v, c in L) + ")^(1/2)" for L in hf]
            body = f"({n})" if d.is_one() else f"({n})/({d})"
            parts.append(" * ".join([body] + roots))
        return " + ".join(parts)

    def __repr__(self):
        return f"CommElement({self})"


def _reduce(n, d):
    if d.is_zero():
        raise ZeroDivisionError("zero denominator")
    g = n.gcd(d)
    if not g.is_one():
        n, d = n / g, d / g
    lc = d.leading_coefficient()
    if lc != 1:
        n, d = n / lc, d / lc
    return n, d


def _remap(p, idx, ctx):
    n = ctx.nvars()
    out = {}
    for exps, c in p.to_dict().items():
        e = [0] * n
        for j, k in enumerate(exps):
            if j < len(idx):
                e[idx[j]] = int(k)
        out[tuple(e)] = c
    return ctx.from_dict(out)


def _one(slots):
    ctx = _ctx(slots)
    one = ctx.from_dict({(0,) * ctx.nvars(): 1})
    return (one, one)


def _form_poly(L, slots):
    ctx = _ctx(slots)
    g = ctx.gens()
    out = ctx.from_dict({})
    for v, c in L:
        out = out + c * g[slots.index(v)]
    return out


def _linear(coeffs: Mapping[str, int]) -> CommElement:
    out = CommElement.zero()
    for v, c in coeffs.items():
        out = out + CommElement.var(v) * c
    return out


# --- vector fields -------------------------------------------------------


@dataclass(frozen=True)
class Derivation:
    """``sum_k c_k d/d(target_k)``."""

    components: tuple[tuple[CommElement, str], ...]

    def __init__(self, components):
        object.__setattr__(self, "components", tuple((CommElement._coerce(c), str(v)) for c, v in components))

    def __call__(self, f: CommElement) -> CommElement:
        return apply_derivation(self, f)


def apply_derivation(D: Derivation, f: CommElement) -> CommElement:
    out = CommElement.zero()
    for c, v in D.components:
        df = f.diff(v)
        if df:
            out = out + c * df
    return out


def bracket_action(D1: Derivation, D2: Derivation, f: CommElement) -> CommElement:
    """``D1(D2 f) - D2(D1 f)``."""
    return D1(D2(f)) - D2(D1(f))


def poisson_bracket(i: str, f: CommElement) -> CommElement:
    """``{X_i, f}``: ``-X_i X_j d_j`` below ``i``, ``+X_i X_j d_j`` above, ``X_i^2 d_i`` on ``i`` itself."""
    xi = CommElement.var(i)
    ki = slot_key(i)
    comps = []
    for v in f.slots:
        if v == i:
            comps.append((xi * xi, v))
        elif slot_key(v) < ki:
            comps.append((-(xi * CommElement.var(v)), v))
        else:
            comps.append((xi * CommElement.var(v), v))
    return apply_derivation(Derivation(comps), f)


def rep_fields(kind: str) -> tuple[Derivation, Derivation, Derivation]:
    """``(E, H, F)`` of the commutative sl2-type representations.

    For ``three_point``/``four_point`` the shifted tail ``U_+ - X_3 (- X_4)``
    is an independent slot named ``V``; ``F = d/dV``.
    """
    x = CommElement.var
    if kind == "two_point":
        U = x("Uplus")
        F = Derivation([(1, "Uplus")])
        H = Derivation([(U, "Uplus"), (x("x1"), "x1"), (x("x2"), "x2")])
        E = Derivation([
            (U * U, "Uplus"),
            (x("x1") * (x("x1") + x("x2") + U), "x1"),
            (x("x2") * (x("x2") + U), "x2"),
        ])
        return E, H, F
    if kind in ("three_point", "four_point"):
        V = x("V")
        F = Derivation([(1, "V")])
        H = Derivation([(V, "V"), (x("x1"), "x1"), (x("x2"), "x2"), (x("x3"), "x3")])
        E = Derivation([
            (V * V, "V"),
            (x("x1") * (x("x1") + x("x2") + x("x3") + V), "x1"),
            (x("x2") * (x("x2") + x("x3") + V), "x2"),
            (x("x3") * (x("x3") + V), "x3"),
        ])
        return E, H, F
    raise ValueError(f"unknown representation {kind!r}; choose two_point, three_point or four_point")


@dataclass
class HWReport:
    kind: str
    H: CommElement
    E: CommElement
    F: CommElement

    def as_dict(self) -> dict[str, str]:
        return {"H": str(self.H), "E": str(self.E), "F": str(self.F)}


def hw_report(kind: str, f: CommElement) -> HWReport:
    """Apply ``H``, ``E`` and ``F`` to ``f`` and return all three; nothing is asserted."""
    E, H, F = rep_fields(kind)
    return HWReport(kind, H(f), E(f), F(f))


def euler_field(slots: Iterable[str]) -> Derivation:
    """``sum_v v d/dv`` over the given slots: the total-degree operator."""
    return Derivation([(CommElement.var(v), v) for v in _sorted_slots(slots)])


def sl2_defects(kind: str, f: CommElement) -> dict[str, CommElement]:
    """``([H,E] - 2E) f``, ``([H,F] + 2F) f`` and ``([E,F] - H) f`` for the fields of ``kind``."""
    E, H, F = rep_fields(kind)
    return {
        "HE": bracket_action(H, E, f) - E(f) * 2,
        "HF": bracket_action(H, F, f) + F(f) * 2,
        "EF": bracket_action(E, F, f) - H(f),
    }
