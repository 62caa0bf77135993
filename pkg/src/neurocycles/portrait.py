"""Symbolic phase-portrait codes and the known-portrait catalogue.

A rough (structurally stable) portrait is encoded over the alphabet
{s, u, S, U}: lowercase for a stable/unstable equilibrium, uppercase for
a stable/unstable limit cycle.  Subscript 1 marks the left steady state
(smaller u0) and cycles around it, subscript 2 the right one; symbols
carry no subscript when the steady state is unique, and unsubscripted
cycle symbols in a three-state portrait enclose all steady states.
Cycles sharing a subscript are listed inner to outer.  A saddle
contributes no symbol (its presence is implied by two subscripted
equilibrium tokens).

The catalogue holds the 22 codes known to occur in this model: fifteen
numbered portraits, seven subscript-mirrored variants, and the
three-nested-cycle portrait uSUS.  It is closed under the subscript swap
induced by the model's point symmetry.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .dynamics import (
    CycleStability,
    LimitCycle,
    SectionRay,
    big_cycle_scan,
    cycle_enclosure,
    find_cycles,
)
from .model import EquilibriumKind, Params, State, equilibria

__all__ = [
    "PortraitCode",
    "DegenerateParametersError",
    "CATALOGUE",
    "classify_portrait",
    "is_catalogued",
]


class DegenerateParametersError(RuntimeError):
    """The point is too close to a bifurcation set to carry a rough code.

    ``what`` names the degenerate object (equilibrium or cycle) that
    blocked classification.
    """

    def __init__(self, what: str):
        super().__init__(what)
        self.what = what


_TOKEN_RE = re.compile(r"([suSU])([12]?)")


@dataclass(frozen=True)
class PortraitCode:
    """Ordered token list; each token is (symbol, subscript 0|1|2)."""

    tokens: tuple[tuple[str, int], ...]

    def __str__(self) -> str:
        return "".join(f"{sym}{sub if sub else ''}" for sym, sub in self.tokens)

    @classmethod
    def parse(cls, text: str) -> "PortraitCode":
        tokens = []
        pos = 0
        for m in _TOKEN_RE.finditer(text):
            if m.start() != pos:
                raise ValueError(f"cannot parse portrait code {text!r}")
            tokens.append((m.group(1), int(m.group(2)) if m.group(2) else 0))
            pos = m.end()
        if pos != len(text) or not tokens:
            raise ValueError(f"cannot parse portrait code {text!r}")
        return cls(tokens=tuple(tokens))

    def canonical(self) -> "PortraitCode":
        """Group order: subscript-1 tokens, subscript-2 tokens, unsubscripted."""
        groups: dict[int, list[tuple[str, int]]] = {1: [], 2: [], 0: []}
        for tok in self.tokens:
            groups[tok[1]].append(tok)
        return PortraitCode(tokens=tuple(groups[1] + groups[2] + groups[0]))

    def swap_subscripts(self) -> "PortraitCode":
        """Image of the code under the left/right symmetry, canonicalized."""
        swapped = tuple((sym, {0: 0, 1: 2, 2: 1}[sub]) for sym, sub in self.tokens)
        return PortraitCode(tokens=swapped).canonical()


# Lists of portraits known for this model: the fifteen numbered codes with
# their mirrored variants, plus the three-nested-cycle portrait.
CATALOGUE: tuple[str, ...] = (
    "s1s2",          # 1
    "s1s2US",        # 2
    "s1U1s2US",      # 3
    "s1s2U2US",      # 3_1
    "s1U1s2",        # 4
    "s1s2U2",        # 4_1
    "u1s2",          # 5
    "s1u2",          # 5_1
    "u1s2US",        # 6
    "s1u2US",        # 6_1
    "s1U1s2S",       # 7
    "s1s2U2S",       # 7_1
    "s1U1s2U2S",     # 8
    "u1s2U2S",       # 9
    "s1U1u2S",       # 9_1
    "u1s2S",         # 10
    "s1u2S",         # 10_1
    "u1u2S",         # 11
    "s",             # 12
    "sUS",           # 13
    "uS",            # 14
    "uSUS",          # 15
)

_CATALOGUE_CANONICAL = frozenset(str(PortraitCode.parse(code).canonical())
                                 for code in CATALOGUE)


def is_catalogued(code: PortraitCode | str) -> bool:
    """Membership in the known-portrait catalogue (up to canonical order)."""
    if isinstance(code, str):
        code = PortraitCode.parse(code)
    return str(code.canonical()) in _CATALOGUE_CANONICAL


def _cycle_tokens(cycles: list[LimitCycle], sub: int) -> list[tuple[str, int]]:
    out = []
    for cyc in cycles:
        if cyc.stability is CycleStability.SEMI_STABLE:
            raise DegenerateParametersError(
                f"semi-stable cycle at radius {cyc.radius:.6g}")
        out.append(("S" if cyc.stability is CycleStability.STABLE else "U", sub))
    return out


def classify_portrait(p: Params, r_max: float | None = None,
                      trace_guard: float = 1e-6,
                      n_grid: int = 200,
                      rtol: float = 1e-10, atol: float = 1e-12,
                      t_max: float = 150.0) -> PortraitCode:
    """Symbolic portrait code of a parameter point.

    Finds the steady states, assigns s/u to each non-saddle, scans for
    cycles around each and (with three states) around all of them, and
    assembles the code in the conventional order.  Refuses to answer
    within ``trace_guard`` of a zero-trace equilibrium, at a fold, or
    when a semi-stable (double) cycle is detected: codes are only defined
    for structurally stable portraits, so boundary points raise
    DegenerateParametersError instead of guessing.
    """
    eqs = equilibria(p)
    if len(eqs) == 2:
        raise DegenerateParametersError("double (fold) steady state")
    for eq in eqs:
        if eq.kind is EquilibriumKind.DEGENERATE:
            raise DegenerateParametersError(
                f"degenerate equilibrium at u0={eq.u0:.6g}")
        if eq.kind is not EquilibriumKind.SADDLE and abs(eq.trace) < trace_guard:
            raise DegenerateParametersError(
                f"near-zero trace ({eq.trace:.3g}) at u0={eq.u0:.6g}")
    tokens: list[tuple[str, int]] = []
    if len(eqs) == 1:
        eq = eqs[0]
        tokens.append(("s" if eq.kind.is_stable else "u", 0))
        cycles = find_cycles(p, eq, r_max, n_grid=n_grid, rtol=rtol, atol=atol,
                             t_max=t_max)
        tokens.extend(_cycle_tokens(cycles, 0))
    else:
        non_saddle = [eq for eq in eqs if eq.kind is not EquilibriumKind.SADDLE]
        if len(non_saddle) != 2:
            raise DegenerateParametersError(
                f"unexpected saddle count among {len(eqs)} steady states")
        for sub, eq in enumerate(non_saddle, start=1):
            tokens.append(("s" if eq.kind.is_stable else "u", sub))
            cycles = find_cycles(p, eq, r_max, n_grid=n_grid, rtol=rtol,
                                 atol=atol, t_max=t_max)
            # The anchored return map also has fixed points on cycles that
            # wind around everything; only cycles enclosing this steady
            # state alone carry its subscript.
            others = [e for e in eqs if e is not eq]
            ray = SectionRay(State(eq.u0, eq.v0))
            local = [cyc for cyc in cycles
                     if not math.isfinite(cyc.period)
                     or not any(cycle_enclosure(p, ray.origin, ray.direction,
                                                cyc, others, rtol, atol))]
            tokens.extend(_cycle_tokens(local, sub))
        big = big_cycle_scan(p, eqs, r_max if r_max is not None else 50.0,
                             n_grid=n_grid, rtol=rtol, atol=atol, t_max=t_max)
        tokens.extend(_cycle_tokens(big, 0))
    return PortraitCode(tokens=tuple(tokens)).canonical()
