"""Coefficient recursions and closed forms for the two- and three-point R operators.

Two points: ``R(alpha) = sum C_i alpha^i`` solves

    (beta alpha + 1) R(q^-1 alpha) = R(alpha) (alpha + beta)

order by order.  Three points: ``R = sum C_{n,m} alpha_0^n alpha_1^m`` with
``alpha_i = x_i x_{i+1}^-1`` is meant to intertwine ``beta x_0 + x_1 + x_2`` with
``x_0 + x_1 + beta x_2``; :func:`lift_R_and_verify` checks that directly in
the x-variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coeffs import BETA, RatFunc, q_power
from .qcombinatorics import qpochhammer, qpochhammer_recip
from .skewalg import AlgebraContext, Element, exchange_exponent, make_monomial

__all__ = [
    "two_point_recursion",
    "two_point_closed",
    "verify_reduced_two_point",
    "three_point_recursion",
    "three_point_closed",
    "lift_R_and_verify",
    "LiftReport",
]


def _q(e: int) -> RatFunc:
    return q_power(4 * e)


def two_point_recursion(imax: int) -> list[RatFunc]:
    """``C_0 = 1``, ``C_i = (1 - q^(1-i) beta) / (q^-i - beta) * C_(i-1)``."""
    if imax < 0:
        raise ValueError("imax must be nonnegative")
    C = [RatFunc(1)]
    for i in range(1, imax + 1):
        C.append((1 - _q(1 - i) * BETA) / (_q(-i) - BETA) * C[-1])
    return C


def two_point_closed(i: int) -> RatFunc:
    """``(-q beta)^i (1/beta)_i / (q beta)_i``."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    return (-_q(1) * BETA) ** i * qpochhammer(BETA.inverse(), i) * qpochhammer_recip(_q(1) * BETA, i)


def verify_reduced_two_point(order: int, C: list[RatFunc] | None = None) -> list[RatFunc]:
    """Residual (LHS - RHS) of the reduced equation at each alpha-order ``0..order``."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if C is None:
        C = two_point_recursion(order)
    out = []
    for k in range(order + 1):
        cur = C[k]
        prev = C[k - 1] if k >= 1 else RatFunc(0)
        lhs = BETA * _q(1 - k) * prev + _q(-k) * cur
        rhs = prev + BETA * cur
        out.append(lhs - rhs)
    return out


def three_point_recursion(nmax: int, mmax: int) -> dict[tuple[int, int], RatFunc]:
    """Table ``C_{n,m}`` for ``n <= nmax, m <= mmax``; the ``m = 0`` column is the two-point one."""
    if nmax < 0 or mmax < 0:
        raise ValueError("table bounds must be nonnegative")
    C: dict[tuple[int, int], RatFunc] = {}
    col0 = two_point_recursion(nmax)
    for n in range(nmax + 1):
        C[(n, 0)] = col0[n]
    for m in range(1, mmax + 1):
        C[(0, m)] = (1 - _q(1 - m)) / (BETA - _q(-m)) * C[(0, m - 1)]
    for m in range(1, mmax + 1):
        den = _q(-m) - BETA
        for n in range(1, nmax + 1):
            a = (_q(1 - m) - _q(2 - n - m) * BETA) / den * C[(n - 1, m - 1)]
            b = (1 - _q(1 - n - m)) / den * C[(n, m - 1)]
            C[(n, m)] = a + b
    return C


def three_point_closed(n: int, m: int) -> RatFunc:
    """``(-q beta)^n q^(m(m-1)/2) (1/beta)_n / ((beta)_m (q beta)_(n-m))``; zero when ``m > n``."""
    if n < 0 or m < 0:
        raise ValueError("indices must be nonnegative")
    recip = qpochhammer_recip(_q(1) * BETA, n - m)
    if not recip:
        return RatFunc(0)
    num = (-_q(1) * BETA) ** n * q_power(2 * m * (m - 1)) * qpochhammer(BETA.inverse(), n)
    return num * qpochhammer_recip(BETA, m) * recip


@dataclass
class LiftReport:
    """Outcome of the x-variable check of the three-point equation."""

    residual: Element
    strata: dict[int, Element] = field(default_factory=dict)
    alpha_exchange_quarters: int = 0

    @property
    def alpha_convention(self) -> str:
        e = self.alpha_exchange_quarters
        return f"alpha0 alpha1 = q^({e}/4) alpha1 alpha0"


def _stratum(mono) -> int:
    """alpha-order ``a + b`` of a degree-one monomial ``x1 alpha_0^a alpha_1^b``.

    ``x2`` alone is ``x1 alpha_1^-1`` and so sits in stratum -1.
    """
    exps = dict(mono)
    return (exps.get(0, 0) - exps.get(2, 0)) // 2


def lift_R_and_verify(ctx: AlgebraContext, order: int, *, C=None, beta=None) -> LiftReport:
    """Residual of ``(b x0 + x1 + x2) R - R (x0 + x1 + b x2)`` on strata ``0..order-1``.

    ``beta`` optionally replaces the spectral parameter by a value (applied to
    the coefficients of ``R`` and to the weights of the two sums).
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    if ctx.ntypes != 1 or ctx.pairing[0][0] != 1:
        raise ValueError("the lift check needs a single-type context with B = [1]")
    for s in (0, 1, 2):
        ctx.type_of_site(s)
    if C is None:
        C = three_point_recursion(order, order)
    b = BETA if beta is None else RatFunc._coerce(beta)

    def coeff(c: RatFunc):
        return ctx.mode.coerce(c if beta is None else c.subs(beta=beta))

    a0 = ctx.monomial({0: 1, 1: -1})
    a1 = ctx.monomial({1: 1, 2: -1})
    R = ctx.zero()
    pow0 = [ctx.one()]
    pow1 = [ctx.one()]
    for _ in range(order):
        pow0.append(pow0[-1] * a0)
        pow1.append(pow1[-1] * a1)
    for n in range(order + 1):
        for m in range(order + 1 - n):
            c = C[(n, m)]
            if c:
                R = R + (pow0[n] * pow1[m]) * coeff(c)
    x0, x1, x2 = ctx.x(0), ctx.x(1), ctx.x(2)
    bc = ctx.mode.coerce(b)
    left = x0 * bc + x1 + x2
    right = x0 + x1 + x2 * bc
    full = left * R - R * right
    residual = full.restrict(lambda mono: _stratum(mono) <= order - 1)
    strata: dict[int, Element] = {L: ctx.zero() for L in range(-1, order)}
    for mono, c in residual.terms.items():
        L = _stratum(mono)
        strata[L] = strata[L] + Element(ctx, {mono: c})
    chi = exchange_exponent(ctx, make_monomial({0: 1, 1: -1}), make_monomial({1: 1, 2: -1}))
    return LiftReport(residual, strata, chi)
