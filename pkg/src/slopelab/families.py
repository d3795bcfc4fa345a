"""Named example graphs used by tests, the CLI and the corpus."""
from __future__ import annotations

from itertools import combinations

from .graph import PolarizedGraph


def point(g: int) -> PolarizedGraph:
    return PolarizedGraph.build([("p", g)], [])


def loop_graph(g: int, length=1) -> PolarizedGraph:
    """One vertex of genus g-1 carrying a single loop."""
    return PolarizedGraph.build([("p", g - 1)], [("e1", "p", "p", length)])


def circle(length=1) -> PolarizedGraph:
    return loop_graph(1, length)


def segment(h: int, k: int, length=1) -> PolarizedGraph:
    return PolarizedGraph.build([("u", h), ("v", k)], [("e1", "u", "v", length)])


def two_gon(g: int, h: int, m1=1, m2=1) -> PolarizedGraph:
    """Two vertices of genera h and g-h-1 joined by two edges."""
    return PolarizedGraph.build(
        [("p1", h), ("p2", g - h - 1)], [("e1", "p1", "p2", m1), ("e2", "p1", "p2", m2)]
    )


def banana(g: int, lengths=None, genera=(0, 0)) -> PolarizedGraph:
    """Two vertices joined by g+1 parallel edges (genus g when genera are 0)."""
    lengths = lengths or [1] * (g + 1)
    return PolarizedGraph.build(
        [("u", genera[0]), ("v", genera[1])],
        [(f"e{i + 1}", "u", "v", l) for i, l in enumerate(lengths)],
    )


def theta(m1=1, m2=1, m3=1, genera=(0, 0)) -> PolarizedGraph:
    return banana(2, [m1, m2, m3], genera)


def dumbbell(a=1, b=1, c=1) -> PolarizedGraph:
    return PolarizedGraph.build(
        [("u", 0), ("v", 0)], [("a", "u", "u", a), ("b", "u", "v", b), ("c", "v", "v", c)]
    )


def complete_graph(n: int, length=1) -> PolarizedGraph:
    vs = [(f"v{i}", 0) for i in range(n)]
    es = [(f"e{i}{j}", f"v{i}", f"v{j}", length) for i, j in combinations(range(n), 2)]
    return PolarizedGraph.build(vs, es)


def caterpillar(spine: list, loops: list) -> PolarizedGraph:
    """A path of bridges with loops hanging at the vertices.

    ``spine`` holds the bridge lengths, ``loops[i]`` the list of loop lengths
    at vertex i.  Vertices without loops get genus 1 so that the result is
    stable.
    """
    n = len(spine) + 1
    vs, es = [], []
    for i in range(n):
        here = loops[i] if i < len(loops) else []
        vs.append((f"x{i}", 0 if here else 1))
        for j, l in enumerate(here):
            es.append((f"l{i}_{j}", f"x{i}", f"x{i}", l))
    for i, l in enumerate(spine):
        es.append((f"b{i}", f"x{i}", f"x{i + 1}", l))
    return PolarizedGraph.build(vs, es)
