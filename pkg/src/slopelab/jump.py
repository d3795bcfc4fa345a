"""Height jump of the Ceresa cycle at a boundary point of the moduli space.

The jump equals the slope of the dual graph.  ``jump_crosscheck`` compares
it against the contraction identity, in which every one-edge contraction
contributes the lambda-invariant of a loop graph or of a segment.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import GenusTooSmall, IdentityViolation, NotStable
from .graph import PolarizedGraph, bridge_type, contract_all_but, minimal_model
from .invariants import lambda_direct, slope

BANANA = "banana"
LOOPS_AND_BRIDGES = "loops-and-bridges"
NONVANISHING = "nonvanishing"


@dataclass(frozen=True)
class JumpReport:
    jump: Fraction
    lam: Fraction
    branch_lambdas: dict[str, Fraction]
    residual: Fraction
    vanishing: str


def _prepare(g: PolarizedGraph, m: Mapping[str, object] | None) -> PolarizedGraph:
    if g.genus < 2:
        raise GenusTooSmall(f"needs genus >= 2, got {g.genus}")
    if m:
        g = g.with_lengths(m)
    if not g.is_stable:
        raise NotStable("height jump needs a stable graph")
    return g


def height_jump(g: PolarizedGraph, m: Mapping[str, object] | None = None) -> Fraction:
    return slope(_prepare(g, m))


def jump_crosscheck(g: PolarizedGraph, m: Mapping[str, object] | None = None) -> JumpReport:
    g = _prepare(g, m)
    gen = g.genus
    j = slope(g)
    lam = lambda_direct(g)
    branch = {}
    for e in g.edges:
        gi = contract_all_but(g, e.id).graph
        li = lambda_direct(gi)
        if e.id in g.bridges:
            h = bridge_type(g, e.id)
            expected = Fraction(4 * h * (gen - h)) * e.length / (8 * gen + 4)
        else:
            expected = gen * e.length / (8 * gen + 4)
        if li != expected:
            raise IdentityViolation(f"contraction to edge {e.id}: lambda {li} != {expected}")
        branch[e.id] = li
    residual = j - (8 * gen + 4) * (lam - sum(branch.values(), Fraction(0)))
    if residual != 0:
        raise IdentityViolation(f"jump identity residual {residual}")
    return JumpReport(j, lam, branch, residual, classify_vanishing(g))


def classify_vanishing(g: PolarizedGraph) -> str:
    """Which case of the vanishing theorem applies to the minimal model, if any."""
    mm = minimal_model(g)
    gen = mm.genus
    if (
        all(v.genus == 0 for v in mm.vertices)
        and len(mm.vertices) == 2
        and len(mm.edges) == gen + 1
        and not any(e.is_loop for e in mm.edges)
    ):
        return BANANA
    if all(b.kind in ("loop", "bridge") for b in mm.blocks.blocks):
        return LOOPS_AND_BRIDGES
    return NONVANISHING
