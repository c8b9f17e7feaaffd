"""Screening sums, quantum Serre residuals and root-of-unity nilpotency."""

from __future__ import annotations

from dataclasses import dataclass

from .coeffs import CyclotomicMode
from .qcombinatorics import balanced_binom
from .skewalg import AlgebraContext, Element, degree

__all__ = ["ScreeningSpec", "build_screening", "serre_residual", "nilpotency_check", "serre_window_check"]


@dataclass(frozen=True)
class ScreeningSpec:
    """Sum of ``x_i`` (or ``x_i^-1`` for ``variant="inverse"``) over sites of one type."""

    type: int
    window: tuple[int, int]
    variant: str = "plain"

    def __post_init__(self):
        lo, hi = self.window
        if lo > hi:
            raise ValueError("empty window")
        if self.variant not in ("plain", "inverse"):
            raise ValueError("variant must be 'plain' or 'inverse'")


def build_screening(ctx: AlgebraContext, spec: ScreeningSpec) -> Element:
    if spec.variant == "inverse" and ctx.ntypes != 1:
        raise ValueError("the inverse variant is only defined in single-type contexts")
    lo, hi = spec.window
    sites = [s for s in ctx.window_sites() if lo <= s <= hi and ctx.type_of_site(s) == spec.type]
    if not sites:
        raise ValueError(f"no sites of type {spec.type} in window {lo}..{hi}")
    e = -1 if spec.variant == "inverse" else 1
    out = ctx.zero()
    for s in sites:
        out = out + ctx.x(s, e)
    return out


def serre_residual(ctx: AlgebraContext, Ea: Element, Eb: Element, a_ij: int, c: int = 1) -> Element:
    """``sum_v (-1)^v [1-a_ij choose v]_{q^c} Ea^(1-a_ij-v) Eb Ea^v`` (exact)."""
    if a_ij > 0:
        raise ValueError("a_ij must be nonpositive")
    for e in (Ea, Eb):
        if not isinstance(degree(ctx, e), tuple):
            raise ValueError("Serre residual needs homogeneous arguments")
    n = 1 - a_ij
    powers = [ctx.one()]
    for _ in range(n):
        powers.append(powers[-1] * Ea)
    out = ctx.zero()
    for v in range(n + 1):
        coeff = ctx.mode.coerce(balanced_binom(n, v, c))
        term = powers[n - v] * Eb * powers[v]
        out = out + term * (coeff if v % 2 == 0 else -coeff)
    return out


def serre_window_check(preset: str, sites_per_type: int, *, swap: bool = False) -> Element:
    """Residual of the Serre relation between the two screening sums of a preset.

    ``sl3`` and ``affine-sl2`` interleave the two types on sites ``1..2n``;
    ``affine-sl2-laurent`` pairs ``sum x_i`` with ``sum x_i^-1`` on ``1..n``.
    """
    if preset == "affine-sl2-laurent":
        ctx = AlgebraContext.preset(preset, range(1, sites_per_type + 1))
        win = (1, sites_per_type)
        E1 = build_screening(ctx, ScreeningSpec(0, win))
        E2 = build_screening(ctx, ScreeningSpec(0, win, "inverse"))
    else:
        ctx = AlgebraContext.preset(preset, range(1, 2 * sites_per_type + 1))
        win = (1, 2 * sites_per_type)
        E1 = build_screening(ctx, ScreeningSpec(0, win))
        E2 = build_screening(ctx, ScreeningSpec(1, win))
    if swap:
        E1, E2 = E2, E1
    a_ij = {"sl3": -1, "affine-sl2": -2, "affine-sl2-laurent": -2}[preset]
    return serre_residual(ctx, E1, E2, a_ij, 1)


def nilpotency_check(n_sites: int, N: int) -> bool:
    """Whether ``(x_1 + ... + x_n)^N`` vanishes when ``q`` is a primitive N-th root of unity.

    Uses ``x_i x_j = q x_j x_i`` (``i < j``) and the quotient ``x_i^N = 0``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if n_sites < 1:
        raise ValueError("need at least one site")
    ctx = AlgebraContext.preset("sl2-lattice", range(1, n_sites + 1), mode=CyclotomicMode(N), nil_exponent=N)
    S = ctx.zero()
    for i in range(1, n_sites + 1):
        S = S + ctx.x(i)
    P = ctx.one()
    for _ in range(N):
        P = P * S
    return P.is_zero()
