"""Weight conditions for random downward-closed families over a ground set.

A family instance draws a downward-closed collection of subsets of a
finite ground set, together with one bundle of "blame" events per element:
whenever an element sits on the family's boundary (some member stops being
a member once the element is added), at least one of its events must have
occurred.  Element weights tau >= 1 satisfy the condition when each
tau(i) covers 1 plus, for every event in i's bundle, the worst conditional
probability of the event times the weight product of a chosen witness set
containing i.  A feasible tau lower-bounds the probability that the full
ground set is a member by 1 over the product of all weights.

The subset-lattice reduction realizes all of this as a cut instance on the
powerset digraph, one deletion arc per (element, subset) pair, carrying
one edge per event in the element's bundle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .digraph import MultiDigraph
from .engine import IndeterminateError
from .instances import Hypergraph
from .probability import (ENUM_CAP, CutModel, Event, ProductSpace,
                          SamplePoint, _Kahan)

TOL = 1e-12
ITER_CAP = 10 ** 5
VALUE_CAP = 1e9

HYPERCUBE_MAX_GROUND = 4

Subset = frozenset


@dataclass(frozen=True)
class FamilyInstance:
    ground: tuple[str, ...]
    space: ProductSpace
    member: Callable[[SamplePoint, Subset], bool]
    events: dict[str, tuple[tuple[str, Event], ...]]   # element -> (label, event)

    @staticmethod
    def build(ground: Iterable[str], space: ProductSpace,
              member: Callable[[SamplePoint, Subset], bool],
              events: Mapping[str, Sequence[tuple[str, Event]]]) -> "FamilyInstance":
        g = tuple(sorted(ground))
        if len(set(g)) != len(g) or not g:
            raise ValueError("ground set must be nonempty without duplicates")
        evs: dict[str, tuple[tuple[str, Event], ...]] = {}
        for elem in g:
            bundle = tuple(events.get(elem, ()))
            labels = [label for label, _ in bundle]
            if len(set(labels)) != len(labels):
                raise ValueError(f"element {elem!r} repeats an event label")
            evs[elem] = bundle
        unknown = set(events) - set(g)
        if unknown:
            raise ValueError(f"events for unknown elements {sorted(unknown)}")
        return FamilyInstance(g, space, member, evs)


def family_of(inst: FamilyInstance, point: SamplePoint) -> frozenset[Subset]:
    """The family at one sample point, listed explicitly."""
    subsets = all_subsets(inst.ground)
    return frozenset(s for s in subsets if inst.member(point, s))


def all_subsets(ground: Sequence[str]) -> list[Subset]:
    out = []
    for r in range(len(ground) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(ground, r))
    return out


def boundary(family: Iterable[Subset], ground: Sequence[str]) -> frozenset[str]:
    """Elements whose addition can eject a member of a downward-closed
    family.  Raises if the family is empty or not downward-closed."""
    members = frozenset(frozenset(s) for s in family)
    if not members:
        raise ValueError("family is empty")
    for s in members:
        for elem in s:
            if s - {elem} not in members:
                raise ValueError(f"not downward-closed: {sorted(s)} is a member "
                                 f"but {sorted(s - {elem})} is not")
    out = set()
    for elem in ground:
        for s in members:
            if elem not in s and s | {elem} not in members:
                out.add(elem)
                break
    return frozenset(out)


@dataclass(frozen=True)
class FamilyValidation:
    ok: bool
    counterexample: SamplePoint | None
    reason: str


def validate_family_instance(inst: FamilyInstance, *,
                             cap: int = ENUM_CAP) -> FamilyValidation:
    """Check, on every positive-probability outcome: the family is nonempty
    and downward-closed, and every boundary element has a true event."""
    for point, prob in inst.space.outcomes(cap):
        if prob <= 0.0:
            continue
        try:
            edge_elems = boundary(family_of(inst, point), inst.ground)
        except ValueError as exc:
            return FamilyValidation(False, point, str(exc))
        for elem in edge_elems:
            if not any(event(point) for _, event in inst.events[elem]):
                return FamilyValidation(
                    False, point,
                    f"boundary element {elem!r} has no true event")
    return FamilyValidation(True, None, "ok")


def tau_of_set(tau: Mapping[str, float], subset: Iterable[str]) -> float:
    return math.prod(tau[i] for i in subset)


def witness_bound(inst: FamilyInstance, event: Event, witness: Subset,
                  tau: Mapping[str, float], *, p_bound: float | None = None,
                  cap: int = ENUM_CAP, outside_cap: int = 20) -> float:
    """Worst conditional event probability times the witness weight product.

    The conditional is maximized over subsets Z disjoint from the witness
    set, conditioning on Z being a family member; Pr(cond) = 0 contributes
    0.  With p_bound given, enumeration is skipped and the bound is
    p_bound * tau(witness).
    """
    weight = tau_of_set(tau, witness)
    if p_bound is not None:
        return p_bound * weight
    outside = [i for i in inst.ground if i not in witness]
    if len(outside) > outside_cap:
        raise ValueError(f"{len(outside)} outside elements exceed cap "
                         f"{outside_cap}")
    zs = all_subsets(outside)
    base = [_Kahan() for _ in zs]
    joint = [_Kahan() for _ in zs]
    for point, prob in inst.space.outcomes(cap):
        if prob <= 0.0:
            continue
        happened = event(point)
        for idx, z in enumerate(zs):
            if inst.member(point, z):
                base[idx].add(prob)
                if happened:
                    joint[idx].add(prob)
    worst = 0.0
    for idx in range(len(zs)):
        if base[idx].total > 0.0:
            worst = max(worst, joint[idx].total / base[idx].total)
    return worst * weight


WitnessMap = Mapping[tuple[str, str], Subset]   # (element, label) -> witness


def _check_witnesses(inst: FamilyInstance, witnesses: WitnessMap) -> None:
    ground = set(inst.ground)
    for elem, bundle in inst.events.items():
        for label, _ in bundle:
            w = witnesses.get((elem, label))
            if w is None:
                raise ValueError(f"no witness for ({elem!r}, {label!r})")
            if elem not in w:
                raise ValueError(f"witness for ({elem!r}, {label!r}) "
                                 f"does not contain the element")
            if not set(w) <= ground:
                raise ValueError(f"witness for ({elem!r}, {label!r}) "
                                 f"leaves the ground set")


@dataclass(frozen=True)
class FamilyConditionReport:
    feasible: bool
    margins: dict[str, float]
    sigma: dict[tuple[str, str], float]
    bound: float                   # guaranteed Pr(ground set is a member)


def check_family_condition(inst: FamilyInstance, tau: Mapping[str, float],
                           witnesses: WitnessMap, *,
                           p_bounds: Mapping[tuple[str, str], float] | None = None,
                           tol: float = TOL,
                           cap: int = ENUM_CAP) -> FamilyConditionReport:
    """Per-element margins of the weight condition, and the implied bound."""
    for elem in inst.ground:
        if not tau[elem] >= 1.0:
            raise ValueError(f"tau[{elem!r}] = {tau[elem]} is below 1")
    _check_witnesses(inst, witnesses)
    sigma: dict[tuple[str, str], float] = {}
    margins: dict[str, float] = {}
    for elem in inst.ground:
        total = 0.0
        for label, event in inst.events[elem]:
            pb = None if p_bounds is None else p_bounds[(elem, label)]
            value = witness_bound(inst, event, witnesses[(elem, label)], tau,
                                  p_bound=pb, cap=cap)
            sigma[(elem, label)] = value
            total += value
        margins[elem] = tau[elem] - 1.0 - total
    feasible = all(m >= -tol for m in margins.values())
    return FamilyConditionReport(feasible, margins, sigma,
                                 1.0 / tau_of_set(tau, inst.ground))


# -------------------------------------------------- subset-lattice reduction

def subset_id(subset: Iterable[str]) -> str:
    return "{" + ",".join(sorted(subset)) + "}"


@dataclass(frozen=True)
class HypercubeReduction:
    graph: MultiDigraph
    model: CutModel
    weights: dict[tuple[str, str], float]
    vertex_of: dict[Subset, str]


def hypercube_digraph(inst: FamilyInstance,
                      tau: Mapping[str, float]) -> HypercubeReduction:
    """Cut instance on the powerset digraph of the ground set.

    Each arc deletes one element; it carries one edge per event in that
    element's bundle (a bundle with no events gets a never-true filler so
    the lattice stays fully connected).  Arc weights are the deleted
    element's tau; every path from S to Z <= S then multiplies to
    tau(S - Z) regardless of deletion order.
    """
    if len(inst.ground) > HYPERCUBE_MAX_GROUND:
        raise ValueError(f"ground set of {len(inst.ground)} exceeds "
                         f"{HYPERCUBE_MAX_GROUND}")
    subsets = all_subsets(inst.ground)
    vertex_of = {s: subset_id(s) for s in subsets}
    never: tuple[tuple[str, Event], ...] = (("never", lambda point: False),)
    bundles = {elem: (inst.events[elem] or never) for elem in inst.ground}
    edges = []
    weights: dict[tuple[str, str], float] = {}
    event_edges: dict[str, list[str]] = {}
    for s in subsets:
        for elem in s:
            below = s - {elem}
            arc = (vertex_of[s], vertex_of[below])
            weights[arc] = tau[elem]
            for label, _ in bundles[elem]:
                eid = f"{elem}|{vertex_of[below]}|{label}"
                edges.append((eid, arc[0], arc[1]))
                event_edges.setdefault(f"{elem}|{label}", []).append(eid)
    graph = MultiDigraph.build(vertex_of.values(), edges)

    def a_of(point: SamplePoint) -> frozenset[str]:
        return frozenset(vertex_of[s] for s in subsets
                         if inst.member(point, s))

    def f_of(point: SamplePoint) -> frozenset[str]:
        hit: list[str] = []
        for elem in inst.ground:
            for label, event in bundles[elem]:
                if event(point):
                    hit.extend(event_edges[f"{elem}|{label}"])
        return frozenset(hit)

    model = CutModel(graph, a_of, f_of)
    return HypercubeReduction(graph, model, weights, vertex_of)


# ----------------------------------------------------- least tau solutions

@dataclass(frozen=True)
class TauSolveResult:
    status: str                    # "converged" or "diverged"
    tau: dict[str, float] | None
    iterations: int
    min_step: float


def least_tau_solution(ground: Sequence[str],
                       terms: Mapping[str, Sequence[tuple[float, Subset]]],
                       tol: float = TOL, iter_cap: int = ITER_CAP,
                       value_cap: float = VALUE_CAP) -> TauSolveResult:
    """Least tau with tau(i) = 1 + sum of p * tau(witness) per element.

    terms[i] lists (probability bound, witness set) pairs; each witness
    must contain i.  Same contract as the arc-weight iteration: increasing
    chain from all-ones, convergence to the least solution, divergence
    verdict past value_cap, IndeterminateError at the iteration cap.
    """
    for elem in ground:
        for p, witness in terms.get(elem, ()):
            if elem not in witness:
                raise ValueError(f"witness {sorted(witness)} misses {elem!r}")
            if p < 0.0:
                raise ValueError("negative probability bound")
    tau = {elem: 1.0 for elem in ground}
    iterations = 1
    min_step = 0.0
    while iterations < iter_cap:
        nxt = {}
        for elem in ground:
            total = 0.0
            for p, witness in terms.get(elem, ()):
                total += p * tau_of_set(tau, witness)
            nxt[elem] = 1.0 + total
        iterations += 1
        sup_step = 0.0
        for elem in ground:
            step = nxt[elem] - tau[elem]
            sup_step = max(sup_step, abs(step))
            min_step = min(min_step, step)
        tau = nxt
        if max(tau.values()) > value_cap:
            return TauSolveResult("diverged", None, iterations, min_step)
        if sup_step < tol:
            return TauSolveResult("converged", tau, iterations, min_step)
    raise IndeterminateError(
        f"no convergence or divergence within {iter_cap} iterations",
        iterations)


# ------------------------------------------- proper-coloring family builder

def hypergraph_coloring_family(hypergraph: Hypergraph, colors: int = 2,
                               *, witness_drop: bool = True
                               ) -> tuple[FamilyInstance, WitnessMap]:
    """Family of vertex subsets containing no monochromatic edge, under a
    uniform random coloring.

    Each vertex's bundle has one event per incident edge: that edge is
    monochromatic.  Default witnesses drop one other vertex from the edge
    (witness_drop=True); otherwise the whole edge is the witness.
    """
    if colors < 2:
        raise ValueError("need at least two colors")
    space = ProductSpace.uniform(
        [(f"c_{v}", list(range(colors))) for v in hypergraph.vertices])

    def member(point: SamplePoint, subset: Subset) -> bool:
        for edge in hypergraph.edges:
            if edge <= subset:
                it = iter(edge)
                first = point[f"c_{next(it)}"]
                if all(point[f"c_{v}"] == first for v in it):
                    return False
        return True

    def mono_event(edge: Subset) -> Event:
        members = sorted(edge)

        def event(point: SamplePoint) -> bool:
            first = point[f"c_{members[0]}"]
            return all(point[f"c_{v}"] == first for v in members[1:])

        return event

    events: dict[str, list[tuple[str, Event]]] = {v: [] for v in hypergraph.vertices}
    witnesses: dict[tuple[str, str], Subset] = {}
    for idx, edge in enumerate(hypergraph.edges):
        label = f"mono{idx}"
        ev = mono_event(edge)
        for v in edge:
            events[v].append((label, ev))
            if witness_drop and len(edge) >= 2:
                dropped = max(u for u in edge if u != v)
                witnesses[(v, label)] = frozenset(edge - {dropped})
            else:
                witnesses[(v, label)] = frozenset(edge)
    inst = FamilyInstance.build(hypergraph.vertices, space, member, events)
    return inst, witnesses
