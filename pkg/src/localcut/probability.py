"""Finite product probability spaces: exact enumeration, conditioning,
Monte-Carlo estimation, and exact risk tables for cut models.

Conditional probabilities follow the convention Pr(P | Q) = 0 whenever
Pr(Q) = 0, so Pr(P | Q) * Pr(Q) = Pr(P and Q) holds without case splits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping

import numpy as np

from .digraph import MultiDigraph, reachable, underlying_simple

SamplePoint = dict
Event = Callable[[SamplePoint], bool]

ENUM_CAP = 1 << 22
WEIGHT_SUM_TOL = 1e-12


class EnumerationCapError(RuntimeError):
    """The outcome count exceeds the enumeration cap."""


class SpaceError(ValueError):
    """Malformed product-space data."""


@dataclass(frozen=True)
class Variable:
    name: str
    values: tuple
    weights: tuple[float, ...]


@dataclass(frozen=True)
class ProductSpace:
    """Independent named variables, each with a finite weighted value set."""

    variables: tuple[Variable, ...]

    @staticmethod
    def build(variables: list[tuple[str, list, list[float]]]) -> "ProductSpace":
        out = []
        seen: set[str] = set()
        for name, values, weights in variables:
            if name in seen:
                raise SpaceError(f"duplicate variable {name!r}")
            seen.add(name)
            if not values:
                raise SpaceError(f"variable {name!r} has no values")
            if len(values) != len(weights):
                raise SpaceError(f"variable {name!r}: {len(values)} values "
                                 f"but {len(weights)} weights")
            if any(w < 0 for w in weights):
                raise SpaceError(f"variable {name!r} has a negative weight")
            if abs(sum(weights) - 1.0) > WEIGHT_SUM_TOL:
                raise SpaceError(f"variable {name!r}: weights sum to "
                                 f"{sum(weights)}, not 1")
            out.append(Variable(name, tuple(values), tuple(weights)))
        return ProductSpace(tuple(out))

    @staticmethod
    def uniform(variables: list[tuple[str, list]]) -> "ProductSpace":
        return ProductSpace.build(
            [(name, values, [1.0 / len(values)] * len(values))
             for name, values in variables])

    @property
    def n_outcomes(self) -> int:
        return math.prod(len(v.values) for v in self.variables)

    def check_cap(self, cap: int = ENUM_CAP) -> None:
        if self.n_outcomes > cap:
            raise EnumerationCapError(
                f"{self.n_outcomes} outcomes exceed cap {cap}")

    def outcomes(self, cap: int = ENUM_CAP) -> Iterator[tuple[SamplePoint, float]]:
        """Yield (sample point, probability) for every outcome."""
        self.check_cap(cap)
        names = [v.name for v in self.variables]
        pairs = [list(zip(v.values, v.weights)) for v in self.variables]
        for combo in itertools.product(*pairs):
            prob = 1.0
            for _, w in combo:
                prob *= w
            yield dict(zip(names, (val for val, _ in combo))), prob

    def outcomes_exact(self, cap: int = ENUM_CAP) -> Iterator[tuple[SamplePoint, Fraction]]:
        """Outcome enumeration with exact rational probabilities.

        Weights are taken at their binary-float values, so the rationals
        reproduce the float inputs exactly rather than any decimal intent.
        """
        self.check_cap(min(cap, 1 << 16))
        names = [v.name for v in self.variables]
        pairs = [[(val, Fraction(w)) for val, w in zip(v.values, v.weights)]
                 for v in self.variables]
        for combo in itertools.product(*pairs):
            prob = Fraction(1)
            for _, w in combo:
                prob *= w
            yield dict(zip(names, (val for val, _ in combo))), prob

    def sample_batch(self, trials: int, seed: int) -> list[SamplePoint]:
        """Deterministic batch of independent samples for the given seed."""
        rng = np.random.default_rng(seed)
        columns = []
        for var in self.variables:
            idx = rng.choice(len(var.values), size=trials, p=np.array(var.weights))
            columns.append([var.values[i] for i in idx])
        names = [v.name for v in self.variables]
        return [dict(zip(names, row)) for row in zip(*columns)] if columns else \
               [{} for _ in range(trials)]


class _Kahan:
    """Compensated accumulator; the corpus sums thousands of tiny terms."""

    __slots__ = ("total", "carry")

    def __init__(self) -> None:
        self.total = 0.0
        self.carry = 0.0

    def add(self, x: float) -> None:
        y = x - self.carry
        t = self.total + y
        self.carry = (t - self.total) - y
        self.total = t


def exact_prob(space: ProductSpace, event: Event, *,
               cap: int = ENUM_CAP, exact: bool = False):
    """Probability of the event by full enumeration.

    With exact=True the sum is done in rationals (small spaces only) and a
    Fraction is returned.
    """
    if exact:
        total = Fraction(0)
        for point, prob in space.outcomes_exact(cap):
            if event(point):
                total += prob
        return total
    acc = _Kahan()
    for point, prob in space.outcomes(cap):
        if event(point):
            acc.add(prob)
    return acc.total


def cond_prob(space: ProductSpace, event: Event, given: Event, *,
              cap: int = ENUM_CAP, exact: bool = False):
    """Pr(event | given); 0 when the condition has probability 0."""
    if exact:
        joint = Fraction(0)
        base = Fraction(0)
        for point, prob in space.outcomes_exact(cap):
            if given(point):
                base += prob
                if event(point):
                    joint += prob
        return joint / base if base else Fraction(0)
    joint = _Kahan()
    base = _Kahan()
    for point, prob in space.outcomes(cap):
        if given(point):
            base.add(prob)
            if event(point):
                joint.add(prob)
    return joint.total / base.total if base.total > 0.0 else 0.0


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    half_width: float      # 95% normal-approximation interval half-width
    conditioned: bool      # False when no trial satisfied the condition
    hits: int              # trials satisfying the condition
    trials: int


def estimate_cond_prob(space: ProductSpace, event: Event, given: Event,
                       trials: int, seed: int) -> McEstimate:
    """Monte-Carlo estimate of Pr(event | given), deterministic per seed."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    hits = 0
    joint = 0
    for point in space.sample_batch(trials, seed):
        if given(point):
            hits += 1
            if event(point):
                joint += 1
    if hits == 0:
        return McEstimate(0.0, math.inf, False, 0, trials)
    p = joint / hits
    half = 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / hits)
    return McEstimate(p, half, True, hits, trials)


# ------------------------------------------------------------- cut models

@dataclass(frozen=True)
class CutModel:
    """Measurable assignment of an out-closed vertex set and a cut.

    a_of maps a sample point to the random vertex set; f_of maps it to the
    random edge set.  Validity (out-closure, cut coverage) is checked by
    validate_cut_model, not assumed.
    """

    digraph: MultiDigraph
    a_of: Callable[[SamplePoint], frozenset[str]]
    f_of: Callable[[SamplePoint], frozenset[str]]


@dataclass(frozen=True)
class ModelCheck:
    ok: bool
    counterexample: SamplePoint | None
    reason: str


def validate_cut_model(space: ProductSpace, model: CutModel, *,
                       cap: int = ENUM_CAP) -> ModelCheck:
    """Check out-closure of A and cut coverage of F on every outcome of
    positive probability."""
    graph = model.digraph
    simple = underlying_simple(graph)
    arcs_by_head: dict[str, list[tuple[str, tuple[str, ...]]]] = {}
    for (tail, head), eids in graph.edges_by_arc.items():
        arcs_by_head.setdefault(head, []).append((tail, eids))
    for point, prob in space.outcomes(cap):
        if prob <= 0.0:
            continue
        inside = model.a_of(point)
        for tail, head in simple.arcs:
            if tail in inside and head not in inside:
                return ModelCheck(False, point,
                                  f"A not out-closed: arc ({tail},{head})")
        chosen = model.f_of(point)
        for eid in chosen:
            if eid not in graph.edge_by_id:
                return ModelCheck(False, point, f"F names unknown edge {eid!r}")
        for head in inside:
            for tail, eids in arcs_by_head.get(head, ()):
                if tail not in inside and not any(e in chosen for e in eids):
                    return ModelCheck(False, point,
                                      f"F misses boundary arc ({tail},{head})")
    return ModelCheck(True, None, "ok")


@dataclass(frozen=True)
class RiskTable:
    """Conditional edge probabilities Pr(e in F | z in A), keyed by
    (edge id, vertex id) with z restricted to vertices reachable from the
    head of e."""

    entries: dict[tuple[str, str], float]

    def validate(self, graph: MultiDigraph) -> None:
        simple = underlying_simple(graph)
        want: set[tuple[str, str]] = set()
        for e in graph.edges:
            for z in reachable(simple, e.head):
                want.add((e.id, z))
        have = set(self.entries)
        if have != want:
            missing = sorted(want - have)[:3]
            extra = sorted(have - want)[:3]
            raise ValueError(f"risk table domain mismatch; "
                             f"missing={missing} extra={extra}")
        for key, p in self.entries.items():
            if not (-1e-12 <= p <= 1.0 + 1e-12):
                raise ValueError(f"risk {p} at {key} outside [0,1]")


def risk_table_exact(space: ProductSpace, model: CutModel, *,
                     cap: int = ENUM_CAP) -> RiskTable:
    """Exact risk table by one sweep over the outcome space."""
    graph = model.digraph
    simple = underlying_simple(graph)
    reach = {v: reachable(simple, v) for v in graph.vertices}
    vertex_mass = {v: _Kahan() for v in graph.vertices}
    joint = {(e.id, z): _Kahan() for e in graph.edges for z in reach[e.head]}
    pairs_by_edge = {e.id: tuple(reach[e.head]) for e in graph.edges}
    for point, prob in space.outcomes(cap):
        if prob <= 0.0:
            continue
        inside = model.a_of(point)
        chosen = model.f_of(point)
        for v in inside:
            vertex_mass[v].add(prob)
        for eid in chosen:
            for z in pairs_by_edge[eid]:
                if z in inside:
                    joint[(eid, z)].add(prob)
    entries = {}
    for key, acc in joint.items():
        base = vertex_mass[key[1]].total
        entries[key] = min(acc.total / base, 1.0) if base > 0.0 else 0.0
    table = RiskTable(entries)
    table.validate(graph)
    return table


def vertex_probabilities(space: ProductSpace, model: CutModel, *,
                         cap: int = ENUM_CAP) -> dict[str, float]:
    """Pr(v in A) for every vertex, by enumeration."""
    acc = {v: _Kahan() for v in model.digraph.vertices}
    for point, prob in space.outcomes(cap):
        if prob <= 0.0:
            continue
        for v in model.a_of(point):
            acc[v].add(prob)
    return {v: k.total for v, k in acc.items()}


# ---------------------------------------------------------------- JSON I/O

def space_from_json(obj: dict) -> ProductSpace:
    """Parse {"variables": [{"name","values","weights"}, ...]}."""
    try:
        rows = obj["variables"]
        triples = [(r["name"], r["values"], [float(w) for w in r["weights"]])
                   for r in rows]
    except (KeyError, TypeError) as exc:
        raise SpaceError(f"bad product-space object: {exc}") from exc
    return ProductSpace.build(triples)


def risk_table_from_json(obj: dict, graph: MultiDigraph) -> RiskTable:
    """Parse {"risks": [{"edge","z","p"}, ...]}; unlisted reachable pairs
    default to 1.0 (a trivially sound upper bound)."""
    simple = underlying_simple(graph)
    entries: dict[tuple[str, str], float] = {}
    for e in graph.edges:
        for z in reachable(simple, e.head):
            entries[(e.id, z)] = 1.0
    try:
        rows = obj["risks"]
    except (KeyError, TypeError) as exc:
        raise SpaceError(f"bad risk object: {exc}") from exc
    for r in rows:
        try:
            key = (r["edge"], r["z"])
            p = float(r["p"])
        except (KeyError, TypeError) as exc:
            raise SpaceError(f"bad risk row {r!r}: {exc}") from exc
        if key not in entries:
            raise SpaceError(f"risk row {key} is not a reachable pair")
        entries[key] = p
    table = RiskTable(entries)
    table.validate(graph)
    return table
