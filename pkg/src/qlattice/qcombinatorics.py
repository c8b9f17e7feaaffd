"""q-integers, q-binomials, q-Pochhammer symbols and binomial expansions.

``expand_power`` expands ``(x_i1 + ... + x_in)^gamma`` for same-type sites by
repeatedly splitting off one extreme site ``A`` and using the q-binomial
theorem for ``A + T`` where ``A T' = q^c T' A`` holds for every degree-one
monomial ``T'`` of the remaining sum ``T``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, total_ordering

from .coeffs import RATFUNC, RatFunc, q_power
from .skewalg import AlgebraContext, Element, TruncatedSeries, mul

__all__ = [
    "HalfInt",
    "POLE",
    "gauss_binom",
    "balanced_binom",
    "q_integer",
    "qpochhammer",
    "qpochhammer_recip",
    "expand_power",
    "expand_power_depth",
    "power_lead",
]


@total_ordering
class HalfInt:
    """Exact element of (1/2)Z, stored doubled."""

    __slots__ = ("d",)

    def __init__(self, value=0, *, doubled: int | None = None):
        if doubled is not None:
            self.d = int(doubled)
            return
        if isinstance(value, HalfInt):
            self.d = value.d
            return
        f = Fraction(value) * 2
        if f.denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        self.d = int(f)

    @property
    def value(self) -> Fraction:
        return Fraction(self.d, 2)

    def is_integer(self) -> bool:
        return self.d % 2 == 0

    def __add__(self, other):
        return HalfInt(doubled=self.d + HalfInt(other).d)

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInt(doubled=self.d - HalfInt(other).d)

    def __rsub__(self, other):
        return HalfInt(other) - self

    def __neg__(self):
        return HalfInt(doubled=-self.d)

    def __eq__(self, other):
        try:
            return self.d == HalfInt(other).d
        except (ValueError, TypeError):
            return NotImplemented

    def __lt__(self, other):
        return self.d < HalfInt(other).d

    def __hash__(self):
        return hash(self.value)

    def __int__(self):
        if self.d % 2:
            raise ValueError(f"{self} is not an integer")
        return self.d // 2

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"HalfInt({self.value})"


def _qq(e4: int) -> RatFunc:
    return q_power(e4)


@lru_cache(maxsize=8192)
def _gauss(d: int, k: int, c: int) -> RatFunc:
    # gamma = d/2, Q = q^c; Q^e = s^(4 c e); 4 c (gamma - j + 1) = 2 c (d - 2j + 2)
    out = RatFunc(1)
    for j in range(1, k + 1):
        num = 1 - _qq(2 * c * (d - 2 * j + 2))
        if not num:
            return RatFunc(0)
        out = out * num / (1 - _qq(4 * c * j))
    return out


def gauss_binom(gamma, k: int, c: int = 1) -> RatFunc:
    """Gaussian binomial ``prod_{j=1..k} (1 - Q^(gamma-j+1)) / (1 - Q^j)`` with ``Q = q^c``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if c == 0 and k > 0:
        raise ZeroDivisionError("Q = 1 makes the Gaussian binomial singular")
    return _gauss(HalfInt(gamma).d, k, c)


def q_integer(m: int, c: int = 1) -> RatFunc:
    """Balanced q-integer ``(q_c^m - q_c^-m) / (q_c - q_c^-1)``."""
    return (_qq(4 * c * m) - _qq(-4 * c * m)) / (_qq(4 * c) - _qq(-4 * c))


def balanced_binom(n: int, k: int, c: int = 1) -> RatFunc:
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    out = RatFunc(1)
    for j in range(1, k + 1):
        out = out * q_integer(n - j + 1, c) / q_integer(j, c)
    return out


class _Pole:
    """Value of ``(z)_n`` for ``n < 0``: a pole, so its reciprocal is 0."""

    def __rtruediv__(self, other):
        return RatFunc(0)

    def __mul__(self, other):
        return self

    __rmul__ = __mul__

    def __repr__(self):
        return "POLE"


POLE = _Pole()


def qpochhammer(z, n: int):
    """``(z)_n = prod_{j<n} (1 - q^j z)``; for ``n < 0`` returns :data:`POLE`."""
    if n < 0:
        return POLE
    z = RatFunc._coerce(z)
    out = RatFunc(1)
    for j in range(n):
        out = out * (1 - _qq(4 * j) * z)
    return out


def qpochhammer_recip(z, n: int) -> RatFunc:
    """``1 / (z)_n`` with the convention that it vanishes for ``n < 0``."""
    return 1 / qpochhammer(z, n)


# --- expansion of powers of sums ----------------------------------------


def _check_sites(ctx: AlgebraContext, sites) -> tuple[list[int], int]:
    sites = list(sites)
    if not sites:
        raise ValueError("expand_power needs at least one site")
    if len(set(sites)) != len(sites):
        raise ValueError("repeated site in sum")
    types = {ctx.type_of_site(s) for s in sites}
    if len(types) != 1:
        raise ValueError("all summands of a series base must have the same type")
    (t,) = types
    return sites, ctx.orientation * ctx.pairing[t][t]


def power_lead(sites, gamma, direction: str = "low") -> Fraction:
    """Leading filtration weight of ``(sum x_sites)^gamma``."""
    g = HalfInt(gamma).value
    if direction == "low":
        return g * max(sites)
    return -g * min(sites)


def expand_power(ctx: AlgebraContext, sites, gamma, cut=None, direction: str = "low") -> TruncatedSeries:
    """``(sum_{i in sites} x_i)^gamma`` as a truncated series.

    ``direction="low"`` expands in powers of the lowest site (weights fall
    with the order); ``"high"`` expands in powers of the highest site and uses
    the opposite filtration.  Nonnegative integer powers are always exact and
    ignore ``cut``.
    """
    if direction not in ("low", "high"):
        raise ValueError("direction must be 'low' or 'high'")
    sites, c = _check_sites(ctx, sites)
    g = HalfInt(gamma)
    f = 1 if direction == "low" else -1
    exact = g.d >= 0 and g.is_integer()
    if not exact and cut is None:
        raise ValueError("a non-polynomial power needs a cut")
    order = sorted(sites, key=lambda s: f * s)
    body = _expand(ctx, tuple(order), g.d, None if exact else Fraction(cut), c, f)
    if exact:
        return TruncatedSeries.exact(body, f)
    return TruncatedSeries(body, Fraction(cut), power_lead(sites, g, direction), f)


def expand_power_depth(ctx: AlgebraContext, sites, gamma, depth: int, direction: str = "low") -> TruncatedSeries:
    """As :func:`expand_power` with the cut placed ``depth`` below the leading weight."""
    lead = power_lead(list(sites), gamma, direction)
    return expand_power(ctx, sites, gamma, lead - depth, direction)


def _expand(ctx, order: tuple, d: int, cut, c: int, f: int) -> Element:
    """Body of ``(sum x_order)^(d/2)``; ``order[0]`` is split off first."""
    if len(order) == 1:
        (s,) = order
        mono = ((s, d),) if d else ()
        if cut is not None and Fraction(f * s * d, 2) < cut:
            return ctx.zero()
        return Element(ctx, {mono: ctx.mode.one}) if ctx._keep(mono) else ctx.zero()
    i0, rest, top = order[0], order[1:], order[-1]
    # with direction "high" the extra site sits above the rest, flipping the exchange sign
    cq = c * f
    out = ctx.zero()
    k = 0
    while True:
        if d >= 0 and d % 2 == 0 and 2 * k > d:
            break
        lead_k = Fraction(f * ((d - 2 * k) * top + 2 * k * i0), 2)
        if cut is not None and lead_k < cut:
            break
        coeff = gauss_binom(HalfInt(doubled=d), k, cq)
        if coeff:
            sub_cut = None if cut is None else cut - f * k * i0
            sub = _expand(ctx, rest, d - 2 * k, sub_cut, c, f)
            if sub:
                xk = Element(ctx, {((i0, 2 * k),): ctx.mode.one} if k else {(): ctx.mode.one})
                term = mul(ctx, sub, xk)
                out = out + term * ctx.mode.coerce(coeff)
        k += 1
    return out
