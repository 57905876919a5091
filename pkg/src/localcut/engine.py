"""Per-arc weight conditions on random cuts, and their least solutions.

The central objects: a directed multigraph, a table of conditional edge
probabilities ("risks"), and an arc weight function with values >= 1.  An
edge's effective risk discounts its table entries by the cheapest path
product from the edge's tail, minimized over the vertices reachable from
its head.  The per-arc condition asks each arc weight to cover 1 plus the
effective risks of its parallel edges; when it holds, membership
probabilities of adjacent vertices differ by at most the arc weight factor,
and reachable vertices bound each other through path products.

The condition's right-hand side is monotone in the weight function, so the
least solution is the limit of the usual increasing iteration started at
the zero function (whose image is defined to be the all-ones function).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .digraph import (Arc, DigraphError, MultiDigraph, SimpleDigraph,
                      check_weights, min_product_weights, reachable,
                      underlying_simple)
from .probability import (ENUM_CAP, CutModel, ProductSpace, RiskTable,
                          risk_table_exact, vertex_probabilities)

TOL = 1e-12
ITER_CAP = 10 ** 5
VALUE_CAP = 1e9


class IndeterminateError(RuntimeError):
    """Iteration cap reached without convergence or divergence."""

    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations


@dataclass(frozen=True)
class CutInstance:
    graph: MultiDigraph
    risks: RiskTable
    space: ProductSpace | None = None
    model: CutModel | None = None

    @staticmethod
    def build(graph: MultiDigraph, risks: RiskTable,
              space: ProductSpace | None = None,
              model: CutModel | None = None) -> "CutInstance":
        risks.validate(graph)
        return CutInstance(graph, risks, space, model)

    @property
    def simple(self) -> SimpleDigraph:
        return underlying_simple(self.graph)


def _is_zero_function(weights: Mapping[Arc, float]) -> bool:
    return all(w == 0.0 for w in weights.values())


def _tail_products(inst: CutInstance,
                   weights: Mapping[Arc, float]) -> dict[str, dict[str, float]]:
    simple = inst.simple
    tails = {tail for tail, _ in simple.arcs}
    return {t: min_product_weights(simple, weights, t) for t in tails}


def risk_of_edge(inst: CutInstance, weights: Mapping[Arc, float],
                 edge_id: str) -> float:
    """Effective risk of one edge under the given weights."""
    edge = inst.graph.edge_by_id[edge_id]
    simple = inst.simple
    check_weights(simple, weights)
    products = min_product_weights(simple, weights, edge.tail)
    return min(inst.risks.entries[(edge_id, z)] * products[z]
               for z in reachable(simple, edge.head))


def apply_risk_operator(inst: CutInstance,
                        weights: Mapping[Arc, float]) -> dict[Arc, float]:
    """One step of the monotone update: arc -> 1 + sum of edge risks.

    The all-zero input is the conventional starting point and maps to the
    all-ones function; otherwise every entry must be >= 1 (path products
    below 1 would break the cheapest-first search).
    """
    simple = inst.simple
    if _is_zero_function(weights):
        return {arc: 1.0 for arc in simple.arcs}
    products = _tail_products(inst, weights)
    reach = {head: reachable(simple, head)
             for _, head in simple.arcs}
    out: dict[Arc, float] = {}
    for arc in simple.arcs:
        tail, head = arc
        total = 0.0
        for eid in inst.graph.edges_by_arc[arc]:
            total += min(inst.risks.entries[(eid, z)] * products[tail][z]
                         for z in reach[head])
        out[arc] = 1.0 + total
    return out


@dataclass(frozen=True)
class WeightReport:
    weights: dict[Arc, float]
    margins: dict[Arc, float]     # weight - 1 - summed edge risks, per arc
    feasible: bool
    iterations: int


def check_weight_condition(inst: CutInstance, weights: Mapping[Arc, float],
                           tol: float = TOL) -> WeightReport:
    """Check the per-arc condition; feasible iff every margin >= -tol."""
    updated = apply_risk_operator(inst, weights)
    margins = {arc: weights[arc] - updated[arc] for arc in updated}
    feasible = all(m >= -tol for m in margins.values())
    return WeightReport(dict(weights), margins, feasible, 0)


@dataclass(frozen=True)
class FixedPointResult:
    status: str                   # "converged" or "diverged"
    weights: dict[Arc, float] | None
    iterations: int
    report: WeightReport | None
    max_entry: float
    min_step: float               # most negative per-entry step observed


def least_weight_solution(inst: CutInstance, tol: float = TOL,
                          iter_cap: int = ITER_CAP,
                          value_cap: float = VALUE_CAP) -> FixedPointResult:
    """Iterate the risk operator from the zero function.

    The chain increases pointwise and sits below every feasible weight
    function, so it either converges to the least solution, blows past
    value_cap when none exists, or runs out of iterations (indeterminate,
    raised as IndeterminateError).
    """
    simple = inst.simple
    current = {arc: 1.0 for arc in simple.arcs}   # image of the zero function
    iterations = 1
    min_step = 0.0
    if not simple.arcs:
        return FixedPointResult("converged", current, iterations,
                                WeightReport(current, {}, True, iterations),
                                0.0, 0.0)
    while iterations < iter_cap:
        nxt = apply_risk_operator(inst, current)
        iterations += 1
        sup_step = 0.0
        for arc, value in nxt.items():
            step = value - current[arc]
            sup_step = max(sup_step, abs(step))
            min_step = min(min_step, step)
        current = nxt
        peak = max(current.values())
        if peak > value_cap:
            return FixedPointResult("diverged", None, iterations, None,
                                    peak, min_step)
        if sup_step < tol:
            check = check_weight_condition(inst, current, tol=max(tol, 1e-9))
            report = WeightReport(current, check.margins, check.feasible,
                                  iterations)
            return FixedPointResult("converged", current, iterations, report,
                                    peak, min_step)
    raise IndeterminateError(
        f"no convergence or divergence within {iter_cap} iterations",
        iterations)


@dataclass(frozen=True)
class ArcBound:
    tail: str
    head: str
    head_prob: float
    tail_prob_times_weight: float
    ok: bool


@dataclass(frozen=True)
class PairBound:
    source: str
    target: str
    lower_bound: float            # Pr(target in A) / path product
    source_prob: float
    ok: bool


@dataclass(frozen=True)
class BoundReport:
    arc_rows: tuple[ArcBound, ...]
    pair_rows: tuple[PairBound, ...]
    all_ok: bool


def probability_bounds(inst: CutInstance, weights: Mapping[Arc, float],
                       tol: float = 1e-9, *,
                       cap: int = ENUM_CAP) -> BoundReport:
    """Compare exact membership probabilities against the guaranteed bounds.

    Needs the instance's exact space and model.  The weights must pass
    check_weight_condition first; the bounds are only promised then.
    """
    if inst.space is None or inst.model is None:
        raise ValueError("probability_bounds needs an exact space and model")
    if not check_weight_condition(inst, weights).feasible:
        raise ValueError("weights do not satisfy the per-arc condition")
    probs = vertex_probabilities(inst.space, inst.model, cap=cap)
    simple = inst.simple
    arc_rows = []
    for arc in sorted(simple.arcs):
        tail, head = arc
        rhs = probs[tail] * weights[arc]
        arc_rows.append(ArcBound(tail, head, probs[head], rhs,
                                 probs[head] <= rhs + tol))
    pair_rows = []
    for source in sorted(simple.vertices):
        products = min_product_weights(simple, weights, source)
        for target in sorted(reachable(simple, source)):
            lower = probs[target] / products[target]
            pair_rows.append(PairBound(source, target, lower, probs[source],
                                       probs[source] >= lower - tol))
    all_ok = all(r.ok for r in arc_rows) and all(r.ok for r in pair_rows)
    return BoundReport(tuple(arc_rows), tuple(pair_rows), all_ok)


@dataclass(frozen=True)
class TelescopingResult:
    ok: bool
    lhs: float
    rhs: float


def telescoping_check(a: Sequence[float], b: Sequence[float],
                      tol: float = TOL) -> TelescopingResult:
    """Check sum_i (prod_{j<i} a_j)(b_i - a_i) <= prod b - prod a.

    Requires a_i >= 0 and b_i >= max(a_i, 1); with one term the two sides
    agree exactly.
    """
    if len(a) != len(b) or not a:
        raise ValueError("need two equal-length nonempty sequences")
    for x, y in zip(a, b):
        if x < 0.0:
            raise ValueError(f"a entry {x} is negative")
        if y < max(x, 1.0) - 1e-12:
            raise ValueError(f"b entry {y} is below max(a, 1) = {max(x, 1.0)}")
    lhs = 0.0
    prefix = 1.0
    for x, y in zip(a, b):
        lhs += prefix * (y - x)
        prefix *= x
    rhs = math.prod(b) - math.prod(a)
    return TelescopingResult(lhs <= rhs + tol, lhs, rhs)


# ------------------------------------------- nonrepetitive-sequence builder

def _nonrep_prefix_length(seq: Sequence) -> int:
    """Length of the longest prefix without two equal adjacent blocks."""
    n = len(seq)
    for end in range(1, n + 1):
        # a block copy ending exactly at `end` (everything shorter was clean)
        j = end - 1
        for t in range(1, end // 2 + 1):
            if all(seq[j - t - k] == seq[j - k] for k in range(t)):
                return end - 1
    return n


def _blocks_equal(seq: Sequence, s: int, t: int) -> bool:
    """Does position block [s, s+t) repeat immediately after (0-based s)?"""
    return all(seq[k] == seq[k + t] for k in range(s, s + t))


def build_nonrep_instance(lists: Sequence[Sequence], *,
                          risk_mode: str = "exact",
                          cap: int = ENUM_CAP) -> CutInstance:
    """Instance for building a sequence, position i drawn from lists[i].

    Digraph: a path v1 <- v2 <- ... <- vn; the arc into v_i carries one
    edge e_{s}_{t} for every block pair (start s, length t) whose copy ends
    at position i+1.  The random vertex set collects the prefixes that are
    free of adjacent equal blocks; the random edge set collects the block
    pairs that actually repeated.

    risk_mode "exact" enumerates the product space for the risk table;
    "bound" stores the per-position product bound at the witness vertex
    v_{s+t-1} and a sound 1.0 everywhere else, and needs no enumeration.
    """
    n = len(lists)
    if n == 0:
        raise ValueError("need at least one position")
    if any(len(values) == 0 for values in lists):
        raise ValueError("every position needs a nonempty symbol list")
    if risk_mode not in ("exact", "bound"):
        raise ValueError(f"unknown risk_mode {risk_mode!r}")

    vertices = [f"v{i}" for i in range(1, n + 1)]
    edges = []           # (edge_id, tail, head) with block data alongside
    block_of: dict[str, tuple[int, int]] = {}
    for i in range(1, n):                 # arc (v_{i+1} -> v_i)
        end = i + 1                       # copy ends at position end
        for t in range(1, end // 2 + 1):
            s = end - 2 * t + 1
            eid = f"e_{s}_{t}"
            edges.append((eid, f"v{i + 1}", f"v{i}"))
            block_of[eid] = (s, t)
    graph = MultiDigraph.build(vertices, edges)

    space = ProductSpace.uniform(
        [(f"a{i}", list(values)) for i, values in enumerate(lists, start=1)])

    def a_of(point) -> frozenset[str]:
        seq = [point[f"a{i}"] for i in range(1, n + 1)]
        good = _nonrep_prefix_length(seq)
        return frozenset(f"v{i}" for i in range(1, good + 1))

    def f_of(point) -> frozenset[str]:
        seq = [point[f"a{i}"] for i in range(1, n + 1)]
        return frozenset(eid for eid, (s, t) in block_of.items()
                         if _blocks_equal(seq, s - 1, t))

    model = CutModel(graph, a_of, f_of)

    if risk_mode == "exact":
        risks = risk_table_exact(space, model, cap=cap)
    else:
        simple = underlying_simple(graph)
        entries: dict[tuple[str, str], float] = {}
        for e in graph.edges:
            s, t = block_of[e.id]
            witness = f"v{s + t - 1}"
            bound = 1.0
            for k in range(s, s + t):
                bound /= len(lists[k + t - 1])   # list at position k+t
            for z in reachable(simple, e.head):
                entries[(e.id, z)] = bound if z == witness else 1.0
        risks = RiskTable(entries)
        risks.validate(graph)
    return CutInstance(graph, risks, space, model)
