"""Seeded random corpus of polarized graphs and the identity checks run on it."""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import combinations

from .errors import InputError, SlopelabError
from .graph import PolarizedGraph, is_two_connected, minimal_model
from .invariants import epsilon, lambda_direct, lambda_from_slope, phi, slope
from .jump import LOOPS_AND_BRIDGES, BANANA, classify_vanishing, jump_crosscheck
from .laplace import foster_coefficients, green_function, admissible_measure, network, tau
from .tropical import jac_moment

MAX_VERTICES = 8
MAX_EDGES = 12
MAX_B1 = 5
MAX_GENUS = 6


def random_length(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 12), rng.randint(1, 12))


def random_graph(rng: random.Random) -> PolarizedGraph:
    """A connected polarized graph with 2 <= genus <= 6 and K >= 0."""
    while True:
        nv = rng.randint(1, MAX_VERTICES)
        ends = [(rng.randrange(i), i) for i in range(1, nv)]
        room = min(MAX_B1, MAX_EDGES - len(ends))
        for _ in range(rng.randint(0, room)):
            ends.append((rng.randrange(nv), rng.randrange(nv)))
        b1 = len(ends) - nv + 1
        val = [0] * nv
        for a, b in ends:
            val[a] += 1
            val[b] += 1
        q = [1 if val[i] <= 1 else 0 for i in range(nv)]
        if nv == 1 and not ends:
            q[0] = 2
        if b1 + sum(q) > MAX_GENUS:
            continue
        # sprinkle extra genus, keeping many graphs with q = 0 off the leaves
        while b1 + sum(q) < MAX_GENUS and rng.random() < 0.35:
            q[rng.randrange(nv)] += 1
        if b1 + sum(q) < 2:
            q[rng.randrange(nv)] += 2 - b1 - sum(q)
        vs = [(f"v{i}", q[i]) for i in range(nv)]
        es = [(f"e{k}", f"v{a}", f"v{b}", random_length(rng)) for k, (a, b) in enumerate(ends)]
        return PolarizedGraph.build(vs, es)


def generate(seed: int, count: int) -> list[PolarizedGraph]:
    rng = random.Random(seed)
    return [random_graph(rng) for _ in range(count)]


def random_lengths(g: PolarizedGraph, rng: random.Random) -> dict[str, Fraction]:
    return {e.id: random_length(rng) for e in g.edges}


# checks --------------------------------------------------------------------------


def check_pipeline(g: PolarizedGraph) -> bool:
    return lambda_from_slope(g) == lambda_direct(g)


def check_nonnegative(g: PolarizedGraph) -> bool:
    return slope(g) >= 0


def check_classifier(g: PolarizedGraph) -> bool:
    return (classify_vanishing(g) in (BANANA, LOOPS_AND_BRIDGES)) == (slope(g) == 0)


def check_jump(g: PolarizedGraph, rng: random.Random, trials: int = 5) -> bool:
    mm = minimal_model(g)
    cls = classify_vanishing(mm)
    for _ in range(trials):
        rep = jump_crosscheck(mm, random_lengths(mm, rng))
        if rep.residual != 0 or rep.jump < 0:
            return False
        if (rep.jump == 0) != (cls in (BANANA, LOOPS_AND_BRIDGES)):
            return False
    return True


def check_tropical(g: PolarizedGraph) -> bool:
    mom = jac_moment(g)
    delta = g.total_length
    return mom + tau(g) / 2 == delta / 8 and 2 * phi(g) == delta + epsilon(g) - 12 * mom


def check_foster(g: PolarizedGraph) -> bool:
    return sum(foster_coefficients(g).values(), Fraction(0)) == g.b1


def check_metric(g: PolarizedGraph) -> bool:
    net = network(g)
    n = net.n
    r = [[net.resistance(i, j) for j in range(n)] for i in range(n)]
    for i in range(n):
        if r[i][i] != 0:
            return False
        for j in range(n):
            if r[i][j] != r[j][i] or (i != j and r[i][j] <= 0):
                return False
            for k in range(n):
                if r[i][k] > r[i][j] + r[j][k]:
                    return False
    return True


def check_j_positive(g: PolarizedGraph) -> bool:
    """On 2-connected graphs ``j_z(x, y) > 0`` whenever ``z`` differs from x and y."""
    if not is_two_connected(g):
        return True
    net = network(g)
    n = net.n
    for z in range(n):
        for x in range(n):
            for y in range(n):
                if z not in (x, y) and net.j(z, x, y) <= 0:
                    return False
    return True


def check_green_diagonal(g: PolarizedGraph) -> bool:
    # green_function raises if the quarter-point sample disagrees with the fit
    green_function(g, admissible_measure(g))
    return True


def check_rayleigh(g: PolarizedGraph) -> bool:
    net = network(g)
    for e in g.edges:
        if e.id in g.bridges:
            continue
        h = g.without_edge(e.id)
        net2 = network(h)
        for i, j in combinations(range(net.n), 2):
            if net2.resistance(i, j) < net.resistance(i, j):
                return False
    return True


CHECKS = {
    "pipeline": check_pipeline,
    "nonnegative": check_nonnegative,
    "classifier": check_classifier,
    "tropical": check_tropical,
    "foster": check_foster,
    "metric": check_metric,
    "j_positive": check_j_positive,
    "green_diagonal": check_green_diagonal,
    "rayleigh": check_rayleigh,
}


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SLOPELAB_THREADS", "1")))
    except ValueError:
        return 1


def _run_one(job) -> tuple[dict[str, bool], list[dict]]:
    seed, k, g, names = job
    # per-graph stream so results do not depend on scheduling
    rng = random.Random(seed * 1_000_003 + k)
    results, failures = {}, []
    for name in names:
        try:
            ok = check_jump(g, rng) if name == "jump" else CHECKS[name](g)
            if not ok:
                failures.append({"graph": k, "check": name})
        except SlopelabError as exc:
            ok = False
            failures.append({"graph": k, "check": name, "error": str(exc)})
        results[name] = ok
    return results, failures


def run_corpus(seed: int, count: int, checks: list[str] | None = None,
               threads: int | None = None) -> dict:
    """Run the named checks (all by default) and count passes and failures."""
    if count < 1:
        raise InputError("count must be at least 1")
    names = list(checks) if checks else list(CHECKS) + ["jump"]
    unknown = [n for n in names if n != "jump" and n not in CHECKS]
    if unknown:
        raise InputError(f"unknown checks: {unknown}")
    jobs = [(seed, k, g, names) for k, g in enumerate(generate(seed, count))]
    workers = threads or _threads()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, jobs, chunksize=4))
    else:
        outcomes = [_run_one(job) for job in jobs]
    tally = {name: {"pass": 0, "fail": 0} for name in names}
    failures = []
    for results, fails in outcomes:
        for name, ok in results.items():
            tally[name]["pass" if ok else "fail"] += 1
        failures.extend(fails)
    return {
        "seed": seed,
        "count": count,
        "checks": tally,
        "failures": failures,
        "ok": not failures,
    }
