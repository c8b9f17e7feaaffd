"""q-commuting skew-Laurent monomial algebra.

Variables live at integer sites and carry a type.  For sites ``i < j``::

    x_i^a x_j^b = q^(B[t_i][t_j] * a * b) x_j^b x_i^a

Monomials are stored in canonical form: descending site, exponents kept as
doubled integers so half-integer powers are exact.  A monomial is a tuple of
``(site, doubled_exponent)`` pairs.

Truncation uses the site-weight ``w(m) = sum(site * exponent)``.  A
:class:`TruncatedSeries` knows its terms exactly at every weight ``>= cut``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .coeffs import RATFUNC, CyclotomicMode, RatFuncMode

__all__ = [
    "AlgebraContext",
    "ContextError",
    "Element",
    "TruncatedSeries",
    "PRESETS",
    "reorder_pair",
    "mul",
    "commutator",
    "graded_commutator",
    "degree",
    "is_homogeneous",
    "series_mul",
    "series_invert",
    "series_commutator",
    "monomial_weight",
]

Monomial = tuple  # tuple[tuple[int, int], ...], descending site, doubled exponents

PRESETS: dict[str, tuple[tuple[int, ...], ...]] = {
    "sl2-lattice": ((1,),),
    "sl3": ((2, -1), (-1, 2)),
    "affine-sl2": ((2, -2), (-2, 2)),
    # one type, used with sums of x_i and of x_i^-1 over the same sites
    "affine-sl2-laurent": ((2,),),
}


class ContextError(ValueError):
    """Raised for ill-formed contexts or operands from different contexts."""


@dataclass(frozen=True)
class AlgebraContext:
    """Variable registry, pairing matrix and coefficient mode.

    ``variables`` is a sequence of ``(name, site, type)``; types index ``pairing``
    from 0.  ``orientation=-1`` flips the sign convention of the exchange rule.
    ``nil_exponent`` (if set) imposes ``x_i^N = 0`` for every variable.
    """

    variables: tuple[tuple[str, int, int], ...]
    pairing: tuple[tuple[int, ...], ...]
    mode: object = RATFUNC
    orientation: int = 1
    nil_exponent: int | None = None
    tails: tuple[str, ...] = ()
    _by_name: dict = field(default_factory=dict, compare=False, repr=False)
    _by_site: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        B = self.pairing
        r = len(B)
        if any(len(row) != r for row in B):
            raise ContextError("pairing matrix must be square")
        for a in range(r):
            for b in range(r):
                if B[a][b] != B[b][a]:
                    raise ContextError("pairing matrix must be symmetric")
        if self.orientation not in (1, -1):
            raise ContextError("orientation must be +1 or -1")
        for name, site, t in self.variables:
            if not 0 <= t < r:
                raise ContextError(f"type {t} of {name} outside the pairing matrix")
            if name in self._by_name:
                raise ContextError(f"duplicate variable name {name}")
            if site in self._by_site:
                raise ContextError(f"site {site} is already occupied by {self._by_site[site][0]}")
            self._by_name[name] = (site, t)
            self._by_site[site] = (name, t)

    # -- construction -------------------------------------------------

    @classmethod
    def preset(
        cls,
        name: str,
        sites: Iterable[int],
        *,
        tails: bool = False,
        tail_type: int = 0,
        mode=RATFUNC,
        orientation: int = 1,
        nil_exponent: int | None = None,
    ) -> "AlgebraContext":
        """Build a context from a named pairing.

        Variables are named ``x<site>``.  In the two-type presets odd sites get
        type 0 and even sites type 1.
        """
        if name not in PRESETS:
            raise ContextError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        B = PRESETS[name]
        sites = sorted(set(sites))
        if len(B) == 1:
            variables = [(f"x{i}", i, 0) for i in sites]
        else:
            variables = [(f"x{i}", i, 0 if i % 2 else 1) for i in sites]
        ctx = cls(tuple(variables), B, mode, orientation, nil_exponent)
        if tails:
            ctx = ctx.with_tails(tail_type)
        return ctx

    def with_tails(self, type_minus: int = 0, type_plus: int | None = None) -> "AlgebraContext":
        """Add ``Uminus`` at ``min site - 1`` and ``Uplus`` at ``max site + 1``."""
        if self.tails:
            raise ContextError("context already has tails")
        if not self.variables:
            raise ContextError("tails need at least one registered site")
        if type_plus is None:
            type_plus = type_minus
        lo = min(s for _, s, _ in self.variables)
        hi = max(s for _, s, _ in self.variables)
        variables = self.variables + (("Uminus", lo - 1, type_minus), ("Uplus", hi + 1, type_plus))
        return AlgebraContext(
            variables, self.pairing, self.mode, self.orientation, self.nil_exponent, ("Uminus", "Uplus")
        )

    def with_mode(self, mode) -> "AlgebraContext":
        return AlgebraContext(
            self.variables, self.pairing, mode, self.orientation, self.nil_exponent, self.tails
        )

    # -- queries --------------------------------------------------------------

    def site_of(self, name: str) -> int:
        try:
            return self._by_name[name][0]
        except KeyError:
            raise ContextError(f"unregistered variable {name!r}") from None

    def type_of_site(self, site: int) -> int:
        try:
            return self._by_site[site][1]
        except KeyError:
            raise ContextError(f"no variable at site {site}") from None

    def name_of_site(self, site: int) -> str:
        return self._by_site[site][0]

    def has_site(self, site: int) -> bool:
        return site in self._by_site

    def has_name(self, name: str) -> bool:
        return name in self._by_name

    @property
    def sites(self) -> list[int]:
        return sorted(self._by_site)

    def window_sites(self) -> list[int]:
        """Sites that are not tail sentinels."""
        tail_sites = {self._by_name[t][0] for t in self.tails}
        return [s for s in self.sites if s not in tail_sites]

    def tail_site(self, which: str) -> int:
        if which not in self.tails:
            raise ContextError(f"context has no tail {which!r}")
        return self._by_name[which][0]

    @property
    def ntypes(self) -> int:
        return len(self.pairing)

    def same_algebra(self, other: "AlgebraContext") -> bool:
        return self is other or self == other

    # -- elements ---------------------------------------------------------

    def var(self, name: str, exponent=1) -> "Element":
        site = self.site_of(name)
        return self.monomial({site: exponent})

    def x(self, site: int, exponent=1) -> "Element":
        self.type_of_site(site)
        return self.monomial({site: exponent})

    def monomial(self, exps: Mapping[int, object], coeff=None) -> "Element":
        mono = make_monomial(exps)
        for s, _ in mono:
            self.type_of_site(s)
        c = self.mode.one if coeff is None else self.mode.coerce(coeff)
        return Element(self, {mono: c} if self._keep(mono) else {})

    def scalar(self, c) -> "Element":
        return Element(self, {(): self.mode.coerce(c)})

    def one(self) -> "Element":
        return Element(self, {(): self.mode.one})

    def zero(self) -> "Element":
        return Element(self, {})

    def _keep(self, mono: Monomial) -> bool:
        N = self.nil_exponent
        return N is None or all(d < 2 * N for _, d in mono)


def _doubled(e) -> int:
    e = Fraction(e)
    d = 2 * e
    if d.denominator != 1:
        raise ValueError(f"exponent {e} is not a half-integer")
    return int(d)


def make_monomial(exps: Mapping[int, object]) -> Monomial:
    """Canonical monomial from a ``site -> exponent`` map (exponents may be half-integers)."""
    items = [(int(s), _doubled(e)) for s, e in exps.items()]
    return tuple(sorted(((s, d) for s, d in items if d), reverse=True))


def monomial_weight(mono: Monomial) -> Fraction:
    return Fraction(sum(s * d for s, d in mono), 2)


def _weight2(mono: Monomial) -> int:
    return sum(s * d for s, d in mono)


def reorder_pair(ctx: AlgebraContext, i: int, a, j: int, b):
    """The factor ``g`` with ``x_i^a x_j^b = g * x_j^b x_i^a``."""
    if i == j:
        raise ContextError("reorder_pair needs two distinct sites")
    sgn = 1 if i < j else -1
    B = ctx.pairing[ctx.type_of_site(i)][ctx.type_of_site(j)]
    quarters = sgn * ctx.orientation * B * _doubled(a) * _doubled(b)
    return ctx.mode.qpow(quarters)


class _PairTable:
    """Cache of the integer pairing by site pair for one context."""

    __slots__ = ("ctx", "cache")

    def __init__(self, ctx):
        self.ctx = ctx
        self.cache = {}

    def __call__(self, i, k):
        key = (i, k)
        v = self.cache.get(key)
        if v is None:
            ctx = self.ctx
            v = ctx.orientation * ctx.pairing[ctx.type_of_site(i)][ctx.type_of_site(k)]
            self.cache[key] = v
        return v


_pair_tables: dict[int, _PairTable] = {}


def _pairs(ctx) -> _PairTable:
    t = _pair_tables.get(id(ctx))
    if t is None or t.ctx is not ctx:
        t = _PairTable(ctx)
        _pair_tables[id(ctx)] = t
    return t


def mono_mul(ctx: AlgebraContext, m1: Monomial, m2: Monomial) -> tuple[Monomial, int]:
    """Canonical form of ``m1 * m2`` and the q exponent (in quarters) it picks up."""
    if not m1:
        return m2, 0
    if not m2:
        return m1, 0
    P = _pairs(ctx)
    quarters = 0
    for i, da in m1:
        for k, db in m2:
            if i < k:
                quarters += P(i, k) * da * db
    merged = dict(m1)
    for k, db in m2:
        merged[k] = merged.get(k, 0) + db
    mono = tuple(sorted(((s, d) for s, d in merged.items() if d), reverse=True))
    return mono, quarters


def exchange_exponent(ctx: AlgebraContext, m1: Monomial, m2: Monomial) -> int:
    """``chi`` (in quarters) with ``m1 m2 = q^chi m2 m1``."""
    _, a = mono_mul(ctx, m1, m2)
    _, b = mono_mul(ctx, m2, m1)
    return a - b


class Element:
    """Finite sum of canonical monomials with coefficients in the context mode."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: AlgebraContext, terms: Mapping | None = None):
        self.ctx = ctx
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    # arithmetic -------------------------------------------------------

    def _other(self, other) -> "Element":
        if isinstance(other, Element):
            if not self.ctx.same_algebra(other.ctx):
                raise ContextError("elements belong to different contexts")
            return other
        return self.ctx.scalar(other)

    def __add__(self, other):
        other = self._other(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            out[m] = c if v is None else v + c
        return Element(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if isinstance(other, Element):
            return mul(self.ctx, self, other)
        c = self.ctx.mode.coerce(other)
        return Element(self.ctx, {m: v * c for m, v in self.terms.items()})

    def __rmul__(self, other):
        c = self.ctx.mode.coerce(other)
        return Element(self.ctx, {m: c * v for m, v in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) != 1:
                raise ZeroDivisionError("only single terms have exact inverses; use series_invert")
            (m, c), = self.terms.items()
            inv = _monomial_power(self.ctx, m, n)
            return inv * _coeff_inverse(c) ** (-n)
        out = self.ctx.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Element):
            try:
                other = self._other(other)
            except Exception:
                return NotImplemented
        return self.ctx.same_algebra(other.ctx) and (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coeff(self, mono) -> object:
        if isinstance(mono, Mapping):
            mono = make_monomial(mono)
        return self.terms.get(mono, self.ctx.mode.zero)

    def map_coeffs(self, f) -> "Element":
        return Element(self.ctx, {m: f(c) for m, c in self.terms.items()})

    def restrict(self, pred) -> "Element":
        return Element(self.ctx, {m: c for m, c in self.terms.items() if pred(m)})

    def sorted_terms(self):
        """Terms by descending weight, then monomial, for deterministic output."""
        return sorted(self.terms.items(), key=lambda mc: (-_weight2(mc[0]), mc[0]))

    def uses_site(self, site: int) -> bool:
        return any(s == site for m in self.terms for s, _ in m)

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"Element({self})"


def _coeff_inverse(c):
    if hasattr(c, "inverse"):
        return c.inverse()
    raise ZeroDivisionError("coefficient is not invertible in this mode")


def _monomial_power(ctx: AlgebraContext, m: Monomial, n: int) -> Element:
    """``m**n`` for any integer ``n`` as an Element."""
    base = Element(ctx, {m: ctx.mode.one})
    if n >= 0:
        return base**n
    # m = x_top ... x_bottom, so m^-1 = x_bottom^-1 ... x_top^-1
    inv = ctx.one()
    for s, d in reversed(m):
        inv = inv * Element(ctx, {((s, -d),): ctx.mode.one})
    return inv ** (-n)


def _format_exp(d: int) -> str:
    if d == 2:
        return ""
    e = Fraction(d, 2)
    return f"^({e})"


def format_monomial(ctx: AlgebraContext, mono: Monomial) -> str:
    if not mono:
        return "1"
    return "*".join(f"{ctx.name_of_site(s)}{_format_exp(d)}" for s, d in mono)


def format_element(e: Element) -> str:
    """Parseable text, heaviest terms first."""
    if not e.terms:
        return "0"
    parts = []
    one = e.ctx.mode.one
    for i, (m, c) in enumerate(e.sorted_terms()):
        mono = format_monomial(e.ctx, m)
        if c == one:
            txt, neg = mono, False
        elif c == -one:
            txt, neg = mono, True
        else:
            txt = f"({c})"
            if m:
                txt += "*" + mono
            neg = False
        if i == 0:
            parts.append(("-" if neg else "") + txt)
        else:
            parts.append((" - " if neg else " + ") + txt)
    return "".join(parts)


def mul(
    ctx: AlgebraContext, a: Element, b: Element, *, min_weight2: int | None = None, wsign: int = 1
) -> Element:
    """Normal-form product.

    Terms whose doubled weight ``wsign * sum(site * 2 * exponent)`` is below
    ``min_weight2`` are never formed.
    """
    if not (ctx.same_algebra(a.ctx) and ctx.same_algebra(b.ctx)):
        raise ContextError("elements belong to different contexts")
    mode = ctx.mode
    out: dict = {}
    bt = [(m, c, wsign * _weight2(m)) for m, c in b.terms.items()]
    if min_weight2 is not None:
        bt.sort(key=lambda t: -t[2])
    N2 = 2 * ctx.nil_exponent if ctx.nil_exponent is not None else None
    for m1, c1 in a.terms.items():
        w1 = wsign * _weight2(m1)
        for m2, c2, w2 in bt:
            if min_weight2 is not None and w1 + w2 < min_weight2:
                break
            mono, quarters = mono_mul(ctx, m1, m2)
            if N2 is not None and any(d >= N2 for _, d in mono):
                continue
            c = mode.mul_qpow(c1 * c2, quarters)
            v = out.get(mono)
            out[mono] = c if v is None else v + c
    return Element(ctx, out)


def degree(ctx: AlgebraContext, e: Element):
    """Degree per type as a tuple of Fractions if homogeneous, else the per-term list."""
    degs = [_mono_degree(ctx, m) for m, _ in e.sorted_terms()]
    if not degs:
        return tuple(Fraction(0) for _ in range(ctx.ntypes))
    first = degs[0]
    if all(d == first for d in degs):
        return first
    return degs


def _mono_degree(ctx: AlgebraContext, m: Monomial) -> tuple[Fraction, ...]:
    d2 = [0] * ctx.ntypes
    for s, d in m:
        d2[ctx.type_of_site(s)] += d
    return tuple(Fraction(x, 2) for x in d2)


def is_homogeneous(ctx: AlgebraContext, e: Element) -> bool:
    return isinstance(degree(ctx, e), tuple)


def _pair_degrees_quarters(ctx: AlgebraContext, d1, d2) -> int:
    B = ctx.pairing
    total = Fraction(0)
    for a in range(ctx.ntypes):
        for b in range(ctx.ntypes):
            total += B[a][b] * d1[a] * d2[b]
    q4 = 4 * total
    if q4.denominator != 1:
        raise ValueError("degree pairing is not a multiple of 1/4")
    return int(q4)


def commutator(a: Element, b: Element) -> Element:
    return a * b - b * a


def _homogeneous_parts(ctx: AlgebraContext, e: Element) -> dict:
    parts: dict = defaultdict(dict)
    for m, c in e.terms.items():
        parts[_mono_degree(ctx, m)][m] = c
    return parts


def graded_commutator(a: Element, b: Element, *, sign: int = 1) -> Element:
    """``a b - q^(sign * <deg a, deg b>) b a`` (``a`` split into homogeneous parts)."""
    ctx = a.ctx
    db = degree(ctx, b)
    if not isinstance(db, tuple):
        raise ValueError("graded commutator needs a homogeneous second argument")
    out = ctx.zero()
    for da, terms in _homogeneous_parts(ctx, a).items():
        part = Element(ctx, terms)
        qf = ctx.mode.qpow(sign * _pair_degrees_quarters(ctx, da, db))
        out = out + part * b - (b * part) * qf
    return out


# --- truncated series ---------------------------------------------------


class TruncatedSeries:
    """An Element known exactly at every weight ``>= cut``.

    ``cut is None`` means exact.  ``lead`` bounds the weight of every term of
    the true (untruncated) value from above.  ``filtration=-1`` measures weight
    with the opposite sign, which is what expansions in powers of the
    highest site need.
    """

    __slots__ = ("body", "lead", "cut", "filtration")

    def __init__(self, body: Element, cut=None, lead=None, filtration: int = 1):
        cut = None if cut is None else Fraction(cut)
        f = filtration
        if cut is not None:
            c2 = 2 * cut
            body = body.restrict(lambda m: f * _weight2(m) >= c2)
        if lead is None:
            if body.terms:
                lead = max(Fraction(f * _weight2(m), 2) for m in body.terms)
            else:
                lead = cut if cut is not None else Fraction(0)
        self.body = body
        self.lead = Fraction(lead)
        self.cut = cut
        self.filtration = f
        if cut is not None and self.lead < cut:
            self.lead = cut

    @property
    def ctx(self) -> AlgebraContext:
        return self.body.ctx

    @classmethod
    def exact(cls, e: Element, filtration: int = 1) -> "TruncatedSeries":
        return cls(e, None, None, filtration)

    def is_exact(self) -> bool:
        return self.cut is None

    def weight(self, mono: Monomial) -> Fraction:
        return Fraction(self.filtration * _weight2(mono), 2)

    @property
    def depth(self):
        return None if self.cut is None else self.lead - self.cut

    def truncate(self, cut) -> "TruncatedSeries":
        cut = Fraction(cut)
        if self.cut is not None and cut < self.cut:
            raise ValueError("cannot refine a series below its own cut")
        return TruncatedSeries(self.body, cut, self.lead, self.filtration)

    def is_zero_above_cut(self) -> bool:
        return self.body.is_zero()

    def _lift(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.filtration != self.filtration:
                raise ValueError("series use opposite filtrations")
            return other
        if not isinstance(other, Element):
            other = self.body._other(other)
        return TruncatedSeries.exact(other, self.filtration)

    def __add__(self, other):
        other = self._lift(other)
        if self.cut is None:
            cut = other.cut
        elif other.cut is None:
            cut = self.cut
        else:
            cut = max(self.cut, other.cut)
        lead = max(self.lead, other.lead)
        return TruncatedSeries(self.body + other.body, cut, lead, self.filtration)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.body, self.cut, self.lead, self.filtration)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (TruncatedSeries, Element)):
            return series_mul(self, self._lift(other))
        return TruncatedSeries(self.body * other, self.cut, self.lead, self.filtration)

    def __rmul__(self, other):
        if isinstance(other, Element):
            return series_mul(self._lift(other), self)
        return TruncatedSeries(other * self.body, self.cut, self.lead, self.filtration)

    def __str__(self):
        tail = "" if self.cut is None else f" + O(w < {self.cut})"
        return f"{self.body}{tail}"

    def __repr__(self):
        return f"TruncatedSeries({self.body}, cut={self.cut}, lead={self.lead})"


def _ceil2(cut: Fraction) -> int:
    c2 = 2 * cut
    return -((-c2.numerator) // c2.denominator)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Product with ``cut = max(a.cut + b.lead, a.lead + b.cut)``."""
    if a.filtration != b.filtration:
        raise ValueError("series use opposite filtrations")
    ctx = a.ctx
    cands = []
    if a.cut is not None:
        cands.append(a.cut + b.lead)
    if b.cut is not None:
        cands.append(a.lead + b.cut)
    cut = max(cands) if cands else None
    min_w2 = None if cut is None else _ceil2(cut)
    body = mul(ctx, a.body, b.body, min_weight2=min_w2, wsign=a.filtration)
    return TruncatedSeries(body, cut, a.lead + b.lead, a.filtration)


def series_commutator(a: TruncatedSeries, b: TruncatedSeries, *, q_quarters: int = 0) -> TruncatedSeries:
    """``a b - q^(q_quarters/4) b a`` on series."""
    ba = series_mul(b, a)
    if q_quarters:
        ba = ba * a.ctx.mode.qpow(q_quarters)
    return series_mul(a, b) - ba


def series_invert(a: TruncatedSeries) -> TruncatedSeries:
    """Inverse of ``a = c m (1 + eps)`` as ``sum (-eps)^k (c m)^-1``."""
    ctx = a.ctx
    f = a.filtration
    if not a.body.terms:
        raise ZeroDivisionError("cannot invert a series with no known terms")
    w = {m: f * _weight2(m) for m in a.body.terms}
    top = max(w.values())
    heads = [m for m in a.body.terms if w[m] == top]
    if len(heads) != 1:
        raise ValueError("series has no unique leading monomial")
    top_w = Fraction(top, 2)
    if top_w < a.lead:
        raise ValueError("leading term of the series is not known above the cut")
    m = heads[0]
    c = a.body.terms[m]
    lead_inv = _monomial_power(ctx, m, -1) * _coeff_inverse(c)
    if len(a.body.terms) == 1 and a.cut is None:
        return TruncatedSeries.exact(lead_inv, f)
    if a.cut is None:
        raise ValueError("inverse of a multi-term element is an infinite series; give it a cut first")
    depth = top_w - a.cut
    # eps has strictly negative relative weight, so its powers die out above -depth
    neg_eps = TruncatedSeries(-(lead_inv * (a.body - Element(ctx, {m: c}))), -depth, Fraction(0), f)
    total = TruncatedSeries(ctx.one(), -depth, Fraction(0), f)
    power = TruncatedSeries.exact(ctx.one(), f)
    while True:
        power = series_mul(power, neg_eps)
        if not power.body.terms:
            break
        total = total + power
    res = series_mul(total, TruncatedSeries.exact(lead_inv, f))
    return TruncatedSeries(res.body, a.cut - 2 * top_w, -top_w, f)
