"""Independent exact solver for region-mass extremes over all couplings.

Maximising the mass a coupling of ``(eta_a, eta_b)`` puts on a set of cells
is a transportation problem with 0/1 gains, i.e. a bipartite max-flow:
source -> row x (capacity ``eta_a(x)``), row x -> column y (uncapacitated,
only for cells in the region), column y -> sink (capacity ``eta_b(y)``).
Scaling every marginal by the least common denominator ``D`` makes the
capacities integers, so the max-flow is integral and the answer is an exact
rational with denominator dividing ``D``.

This file deliberately shares no code with :mod:`mte.variability`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .core import Marginal
from .errors import DimensionMismatch, ROutOfRange, InvariantViolation
from .variability import VariabilityPair

Region = Callable[[int, int], bool]


@dataclass(frozen=True)
class TransportInstance:
    k: int
    scale: int
    supplies: tuple[int, ...]
    demands: tuple[int, ...]
    gain: tuple[tuple[int, ...], ...]


def transport_instance(region: Region, eta_a: Marginal, eta_b: Marginal) -> TransportInstance:
    if eta_a.k != eta_b.k:
        raise DimensionMismatch(f"marginals have k={eta_a.k} and k={eta_b.k}")
    k = eta_a.k
    scale = math.lcm(*(p.denominator for p in (*eta_a.p, *eta_b.p)))
    supplies = tuple(int(p * scale) for p in eta_a.p)
    demands = tuple(int(p * scale) for p in eta_b.p)
    gain = tuple(tuple(int(bool(region(x, y))) for y in range(k)) for x in range(k))
    return TransportInstance(k, scale, supplies, demands, gain)


def max_flow(instance: TransportInstance) -> int:
    g = nx.DiGraph()
    g.add_node("s")
    g.add_node("t")
    for x, s in enumerate(instance.supplies):
        g.add_edge("s", ("row", x), capacity=s)
    for y, d in enumerate(instance.demands):
        g.add_edge(("col", y), "t", capacity=d)
    for x in range(instance.k):
        for y in range(instance.k):
            if instance.gain[x][y]:
                # no capacity attribute: networkx treats the edge as unbounded
                g.add_edge(("row", x), ("col", y))
    value = nx.maximum_flow_value(g, "s", "t", flow_func=edmonds_karp)
    if not 0 <= value <= instance.scale:
        raise InvariantViolation(f"max-flow {value} outside [0, {instance.scale}]")
    return int(value)


def lp_max_region_mass(region: Region, eta_a: Marginal, eta_b: Marginal) -> Fraction:
    """Exact maximum over couplings of the mass placed on ``region``."""
    instance = transport_instance(region, eta_a, eta_b)
    return Fraction(max_flow(instance), instance.scale)


def oracle_variability(r: int, eta_a: Marginal, eta_b: Marginal) -> VariabilityPair:
    if eta_a.k != eta_b.k:
        raise DimensionMismatch(f"marginals have k={eta_a.k} and k={eta_b.k}")
    k = eta_a.k
    if isinstance(r, bool) or int(r) != r or not -(k - 1) <= r <= k - 1:
        raise ROutOfRange(f"r={r} is outside {-(k - 1)}..{k - 1}")
    r = int(r)
    nu_lower = lp_max_region_mass(lambda x, y: x - y < r, eta_a, eta_b)
    nu_upper = 1 - lp_max_region_mass(lambda x, y: x - y > r, eta_a, eta_b)
    return VariabilityPair(r, nu_lower, nu_upper)
