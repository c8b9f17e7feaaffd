"""Lattice Virasoro generator candidates and their invariance checks.

A generator is an ordered product of powers of same-type site sums, described
by a :class:`GeneratorSpec`.  :func:`check_invariance` commutes it with the
screening sum ``Uminus + sum_{window} x_i + Uplus`` to a given depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coeffs import RatFunc
from .qcombinatorics import HalfInt, expand_power, power_lead
from .skewalg import (
    AlgebraContext,
    Element,
    TruncatedSeries,
    degree,
    monomial_weight,
    series_commutator,
    series_mul,
)

__all__ = [
    "GeneratorSpec",
    "InvarianceReport",
    "build_generator",
    "shift",
    "check_invariance",
    "classical_trivia",
    "abcd_generator",
    "build_F",
    "compose_rho",
    "proportional_compare",
    "F_PRESETS",
    "GENERATOR_PRESETS",
    "generator_preset",
    "ladder",
    "context_for",
    "has_tail_terms",
    "window_commutator",
    "serre_compat_report",
]


@dataclass(frozen=True)
class GeneratorSpec:
    """Ordered factors ``(sites, exponent)``; each factor is ``(sum x_sites)^exponent``."""

    factors: tuple[tuple[tuple[int, ...], HalfInt], ...]
    window: tuple[int, int] | None = None

    def __init__(self, factors, window=None):
        norm = []
        for sites, e in factors:
            sites = tuple(sorted(int(s) for s in sites))
            if not sites:
                raise ValueError("a factor needs at least one site")
            norm.append((sites, HalfInt(e)))
        object.__setattr__(self, "factors", tuple(norm))
        object.__setattr__(self, "window", None if window is None else (int(window[0]), int(window[1])))

    @property
    def total_degree(self) -> Fraction:
        return sum((e.value for _, e in self.factors), Fraction(0))

    @property
    def sites(self) -> list[int]:
        return sorted({s for sites, _ in self.factors for s in sites})

    def default_window(self) -> tuple[int, int]:
        if self.window is not None:
            return self.window
        s = self.sites
        return (s[0], s[-1])

    def lead(self) -> Fraction:
        return sum((power_lead(sites, e) for sites, e in self.factors), Fraction(0))

    def to_text(self) -> str:
        parts = []
        for sites, e in self.factors:
            base = " + ".join(f"x{s}" for s in sites)
            if len(sites) > 1:
                base = f"({base})"
            parts.append(base if e == 1 else f"{base}^({e.value})")
        return " * ".join(parts)

    def __str__(self):
        return self.to_text()


def shift(spec: GeneratorSpec, k: int) -> GeneratorSpec:
    """Move every site by ``k``."""
    window = None if spec.window is None else (spec.window[0] + k, spec.window[1] + k)
    return GeneratorSpec([(tuple(s + k for s in sites), e) for sites, e in spec.factors], window)


def classical_trivia(i: int, inverse: bool = False) -> GeneratorSpec:
    """``X_i X_{i+1}^-1 X_{i+2} (X_i + X_{i+1} + X_{i+2})^-1`` (or the inverse-ordered variant)."""
    if inverse:
        return GeneratorSpec([((i, i + 1, i + 2), 1), ((i,), -1), ((i + 1,), 1), ((i + 2,), -1)])
    return GeneratorSpec([((i,), 1), ((i + 1,), -1), ((i + 2,), 1), ((i, i + 1, i + 2), -1)])


def abcd_generator(n: int) -> GeneratorSpec:
    """``(X_4 + ... + X_n)^-1 X_4 X_2 (X_3 + ... + X_{n-1})^-1``."""
    if n < 5:
        raise ValueError("abcd_generator needs n >= 5")
    return GeneratorSpec(
        [(tuple(range(4, n + 1)), -1), ((4,), 1), ((2,), 1), (tuple(range(3, n)), -1)]
    )


def _nested_family(k: int) -> GeneratorSpec:
    return GeneratorSpec(
        [(tuple(range(2, k + 1)), -1), (tuple(range(3, k + 1)), 1), ((2,), 1), ((1, 2), -1)]
    )


_h = Fraction(1, 2)

GENERATOR_PRESETS: dict[str, GeneratorSpec] = {
    "sigma-half": GeneratorSpec([((3, 4), -_h), ((4,), _h), ((3,), _h), ((2, 3), -_h)], (2, 4)),
    "inverse-pair": GeneratorSpec([((3, 4), -1), ((4,), 1), ((3,), 1), ((2, 3), -1)]),
    "nested-sum": GeneratorSpec([((2, 3, 4), -1), ((3, 4), 1), ((2,), 1), ((1, 2), -1)]),
    "nested-family-3": _nested_family(3),
    "nested-family-4": _nested_family(4),
    "nested-family-5": _nested_family(5),
    "abcd-5": abcd_generator(5),
    "abcd-6": abcd_generator(6),
    "composite-4": GeneratorSpec([((4, 5), -_h), ((4,), _h), ((2,), _h), ((3, 4), -_h)]),
    "composite-5": GeneratorSpec([((4, 5, 6), -_h), ((4,), _h), ((2,), _h), ((3, 4, 5), -_h)]),
    "serre-compat-minus": GeneratorSpec(
        [((4, 5), -_h), ((4,), 3 * _h), ((2,), _h), ((3,), -1), ((3, 4), -_h)], (2, 5)
    ),
    "serre-compat-plus": GeneratorSpec(
        [((4, 5), -_h), ((4,), 3 * _h), ((2,), _h), ((3,), -1), ((3, 4), _h)], (2, 5)
    ),
    "trivia-1": classical_trivia(1),
}


def generator_preset(name: str) -> GeneratorSpec:
    try:
        return GENERATOR_PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown generator preset {name!r}; choose from {sorted(GENERATOR_PRESETS)}") from None


def context_for(sites: Sequence[int], *, tails: bool = True, mode=None) -> AlgebraContext:
    """sl2-lattice context on ``sites`` (plus tails)."""
    kw = {} if mode is None else {"mode": mode}
    return AlgebraContext.preset("sl2-lattice", sites, tails=tails, **kw)


def build_generator(ctx: AlgebraContext, spec: GeneratorSpec, cut=None, *, depth=None) -> TruncatedSeries:
    """Ordered product of the expanded factors.

    Give either an absolute weight ``cut`` or a ``depth`` below the leading weight.
    """
    lead = spec.lead()
    if depth is not None:
        cut = lead - Fraction(depth)
    if cut is None:
        raise ValueError("build_generator needs a cut or a depth")
    cut = Fraction(cut)
    if cut > lead:
        raise ValueError("cut lies above the leading weight of the generator")
    slack = lead - cut
    out = None
    for sites, e in spec.factors:
        if len(sites) == 1:
            f = TruncatedSeries.exact(ctx.monomial({sites[0]: e.value}))
        else:
            f = expand_power(ctx, sites, e, power_lead(sites, e) - slack)
        out = f if out is None else series_mul(out, f)
    return out


def has_tail_terms(e: Element) -> bool:
    tails = [e.ctx.tail_site(t) for t in e.ctx.tails]
    return any(e.uses_site(s) for s in tails)


@dataclass
class InvarianceReport:
    residual: TruncatedSeries
    cut: Fraction
    verdict: str
    per_site: dict[str, int] = field(default_factory=dict)
    generator_terms: int = 0
    depth: Fraction | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def residual_term_count(self) -> int:
        return len(self.residual.body)


def check_invariance(
    ctx: AlgebraContext,
    spec: GeneratorSpec,
    window: tuple[int, int] | None = None,
    cut=None,
    *,
    depth=None,
) -> InvarianceReport:
    """Commute the generator with ``Uminus + sum_{window} x_i + Uplus`` above the cut."""
    deg = spec.total_degree
    if deg != 0:
        raise ValueError(f"invariance checks need a degree-0 generator (got degree {deg})")
    if not ctx.tails:
        raise ValueError("invariance checks need a context with tails")
    lo, hi = window if window is not None else spec.default_window()
    G = build_generator(ctx, spec, cut, depth=depth)
    names = [t for t in ctx.tails] + [ctx.name_of_site(s) for s in ctx.window_sites() if lo <= s <= hi]
    total = None
    per_site = {}
    for name in names:
        piece = series_commutator(TruncatedSeries.exact(ctx.var(name)), G)
        if name in ctx.tails and not piece.body.terms:
            # each term of G has degree 0, so the tail commutes with it exactly
            piece = TruncatedSeries.exact(ctx.zero())
        per_site[name] = len(piece.body)
        total = piece if total is None else total + piece
    verdict = "pass" if not total.body.terms else "fail"
    return InvarianceReport(
        residual=total,
        cut=total.cut,
        verdict=verdict,
        per_site=per_site,
        generator_terms=len(G.body),
        depth=None if G.cut is None else G.lead - G.cut,
    )


# --- the F / rho ladder --------------------------------------------------

F_PRESETS: dict[str, list[tuple[tuple[int, ...], Fraction]]] = {
    "two-point": [((1,), _h), ((2,), -_h), ((1, 2), -_h)],
    "three-point": [((1,), _h), ((2,), -_h), ((2, 3), -_h)],
    "four-point": [((1,), _h), ((2,), -_h), ((2, 3, 4), -_h)],
}


def _screening_sum(ctx: AlgebraContext) -> TruncatedSeries:
    out = ctx.zero()
    for s in ctx.sites:
        out = out + ctx.x(s)
    return TruncatedSeries.exact(out)


def build_F(ctx: AlgebraContext, preset: str, sign, depth=8, *, offset: int = 0, graded_sign: int = 1):
    """``F^(-1/2)`` of a preset (shifted by ``offset``), or ``F^(1/2) = [Sigma^X, F^(-1/2)]_q``.

    The bracket is ``S F - q^(graded_sign <deg S, deg F>) F S`` with ``S`` the
    full screening sum of the context, tails included.
    """
    if preset not in F_PRESETS:
        raise ValueError(f"unknown F preset {preset!r}; choose from {sorted(F_PRESETS)}")
    sign = Fraction(sign)
    if sign not in (_h, -_h):
        raise ValueError("sign must be +1/2 or -1/2")
    spec = shift(GeneratorSpec(F_PRESETS[preset]), offset)
    F = build_generator(ctx, spec, depth=depth)
    if sign < 0:
        return F
    S = _screening_sum(ctx)
    # <deg S, deg F> = B * 1 * (-1/2); in quarters that is -2 B
    quarters = graded_sign * 4 * ctx.pairing[0][0] * spec.total_degree
    return series_commutator(S, F, q_quarters=int(quarters))


def compose_rho(Fa_minus, Fb_plus, Fa_plus, Fb_minus, weight) -> TruncatedSeries:
    """``Fa_minus Fb_plus - q^weight Fa_plus Fb_minus``."""
    depths = {x.depth for x in (Fa_minus, Fb_plus, Fa_plus, Fb_minus)}
    if len(depths) != 1:
        raise ValueError(f"inputs were built at different depths: {sorted(map(str, depths))}")
    w4 = Fraction(weight) * 4
    if w4.denominator != 1:
        raise ValueError("weight must be a multiple of 1/4")
    ctx = Fa_minus.ctx
    return series_mul(Fa_minus, Fb_plus) - series_mul(Fa_plus, Fb_minus) * ctx.mode.qpow(int(w4))


def proportional_compare(a: TruncatedSeries, b: TruncatedSeries):
    """``lam`` with ``a = lam * b`` on every weight known for both, or ``None``."""
    cuts = [x.cut for x in (a, b) if x.cut is not None]
    cut = max(cuts) if cuts else None
    A = a.body if cut is None else TruncatedSeries(a.body, cut).body
    Bb = b.body if cut is None else TruncatedSeries(b.body, cut).body
    if not A.terms or not Bb.terms:
        return None
    if set(A.terms) != set(Bb.terms):
        return None
    top = max(Bb.terms, key=lambda m: (monomial_weight(m), m))
    lam = A.terms[top] / Bb.terms[top]
    for m, c in Bb.terms.items():
        if A.terms[m] != lam * c:
            return None
    return lam


def _closed_product(ctx, pieces, depth) -> TruncatedSeries:
    """Product of factor lists and explicit elements, expanded to ``depth``."""
    out = None
    for p in pieces:
        if isinstance(p, Element):
            f = TruncatedSeries.exact(p)
        else:
            f = build_generator(ctx, GeneratorSpec(p), depth=depth)
        out = f if out is None else series_mul(out, f)
    return out


@dataclass
class LadderEntry:
    name: str
    rho: TruncatedSeries
    closed: TruncatedSeries | None
    ratio: object
    tail_free: bool
    weight: Fraction


def ladder(depth=8, weight=Fraction(-1, 2), *, graded_sign: int = 1) -> list[LadderEntry]:
    """Build the rho combinations and compare them with their expected closed forms."""
    out = []

    def F(ctx, preset, sign, offset):
        return build_F(ctx, preset, sign, depth, offset=offset, graded_sign=graded_sign)

    # rho_{1,3} from F_{1,2} and F_{2,3}, expected proportional to F_{1,2} X_3 F_{2,3}
    ctx = context_for(range(1, 4))
    rho = compose_rho(F(ctx, "two-point", -_h, 0), F(ctx, "two-point", _h, 1),
                      F(ctx, "two-point", _h, 0), F(ctx, "two-point", -_h, 1), weight)
    closed = _closed_product(ctx, [F_PRESETS["two-point"], ctx.x(3), shift(GeneratorSpec(F_PRESETS["two-point"]), 1).factors], depth)
    out.append(_entry("rho-1-3", rho, closed, weight))

    # rho_{1,4} from F_{1,2} and F_{3,4}, expected proportional to F_{1,2} (X_3 + X_4) F_{3,4}
    ctx = context_for(range(1, 5))
    rho = compose_rho(F(ctx, "two-point", -_h, 0), F(ctx, "two-point", _h, 2),
                      F(ctx, "two-point", _h, 0), F(ctx, "two-point", -_h, 2), weight)
    closed = _closed_product(
        ctx, [F_PRESETS["two-point"], ctx.x(3) + ctx.x(4), shift(GeneratorSpec(F_PRESETS["two-point"]), 2).factors], depth
    )
    out.append(_entry("rho-1-4", rho, closed, weight))

    # three-point family: F_{1,2,3} with F_{2,3,4}, expected proportional to F_{1,2,3} X_4 F_{2,3,4}
    rho = compose_rho(F(ctx, "three-point", -_h, 0), F(ctx, "three-point", _h, 1),
                      F(ctx, "three-point", _h, 0), F(ctx, "three-point", -_h, 1), weight)
    closed = _closed_product(
        ctx, [F_PRESETS["three-point"], ctx.x(4), shift(GeneratorSpec(F_PRESETS["three-point"]), 1).factors], depth
    )
    out.append(_entry("rho-1-4-three-point", rho, closed, weight))

    # F_{1,2,3} with F_{3,4,5}: expected proportional to the plain product F_{1,2,3} F_{3,4,5}
    ctx = context_for(range(1, 6))
    rho = compose_rho(F(ctx, "three-point", -_h, 0), F(ctx, "three-point", _h, 2),
                      F(ctx, "three-point", _h, 0), F(ctx, "three-point", -_h, 2), weight)
    closed = _closed_product(ctx, [F_PRESETS["three-point"], shift(GeneratorSpec(F_PRESETS["three-point"]), 2).factors], depth)
    out.append(_entry("rho-1-5-three-point", rho, closed, weight))
    return out


def _entry(name, rho, closed, weight) -> LadderEntry:
    tail_free = not has_tail_terms(rho.body)
    ratio = proportional_compare(rho, closed) if closed is not None else None
    return LadderEntry(name, rho, closed, ratio, tail_free, Fraction(weight))


def window_commutator(ctx: AlgebraContext, spec: GeneratorSpec, window=None, *, depth=8, q_quarters: int = 0):
    """``[sum_{window} x_i, G]`` (optionally q-twisted), without tails and for any degree."""
    lo, hi = window if window is not None else spec.default_window()
    G = build_generator(ctx, spec, depth=depth)
    S = ctx.zero()
    for s in ctx.window_sites():
        if lo <= s <= hi:
            S = S + ctx.x(s)
    return series_commutator(TruncatedSeries.exact(S), G, q_quarters=q_quarters)


def serre_compat_report(depth=8) -> dict[str, dict]:
    """The two sign variants of the Serre-compatibility generator, side by side."""
    out = {}
    for name in ("serre-compat-minus", "serre-compat-plus"):
        spec = GENERATOR_PRESETS[name]
        ctx = context_for(range(1, 7), tails=False)
        res = window_commutator(ctx, spec, depth=depth)
        out[name] = {
            "degree": spec.total_degree,
            "residual_terms": len(res.body),
            "verdict": "pass" if not res.body.terms else "fail",
        }
    return out
