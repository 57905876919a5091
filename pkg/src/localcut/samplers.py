"""Randomized constructions with independent verifiers.

Three samplers (hypergraph 2-coloring by resampling, repetition-free
sequence building with erase-on-repeat repair, greedy acyclic edge
coloring) plus the checkers that gate their success reports.  The
checkers never share state with the samplers, so a passing report really
is evidence.  All procedures are deterministic in (instance, seed, cap)
and stop with an honest cap-exhausted report rather than looping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from .instances import Graph, Hypergraph, ListAssignment

__all__ = [
    "Graph", "Hypergraph", "ListAssignment", "SamplerError",
    "PaletteTooSmallError", "BudgetExceededError", "SamplerReport",
    "moser_tardos_two_coloring", "verify_proper_2coloring",
    "nonrep_sequence_build", "is_nonrepetitive",
    "greedy_acyclic_edge_coloring", "is_acyclic_edge_coloring",
    "is_nonrepetitive_coloring",
]

RESAMPLE_CAP = 10 ** 5
DRAW_CAP = 10 ** 6
PATH_BUDGET = 10 ** 6


class SamplerError(ValueError):
    pass


class PaletteTooSmallError(SamplerError):
    """Raised when a greedy step finds every color forbidden."""


class BudgetExceededError(RuntimeError):
    """Raised when an exhaustive check would overrun its step budget."""


@dataclass(frozen=True)
class SamplerReport:
    success: bool
    steps: int
    seed: int
    note: str = ""


# -------------------------------------------------- hypergraph 2-coloring

def verify_proper_2coloring(hypergraph: Hypergraph,
                            coloring: Mapping[str, int]
                            ) -> tuple[bool, frozenset | None]:
    """True when no edge is monochromatic; otherwise the first bad edge."""
    missing = [v for v in hypergraph.vertices if v not in coloring]
    if missing:
        raise SamplerError(f"coloring misses vertex {missing[0]!r}")
    for edge in hypergraph.edges:
        shades = {coloring[v] for v in edge}
        if len(shades) == 1:
            return False, edge
    return True, None


def moser_tardos_two_coloring(hypergraph: Hypergraph, seed: int,
                              cap: int = RESAMPLE_CAP
                              ) -> tuple[dict[str, int] | None, SamplerReport]:
    """Random 2-coloring, then resample the vertices of the first
    monochromatic edge until none remains or the cap is hit."""
    if cap < 0:
        raise SamplerError("cap must be nonnegative")
    rng = np.random.default_rng(seed)
    order = hypergraph.vertices
    colors = {v: int(b) for v, b in zip(order, rng.integers(0, 2, len(order)))}
    resamples = 0
    while True:
        bad = next((edge for edge in hypergraph.edges
                    if len({colors[v] for v in edge}) == 1), None)
        if bad is None:
            ok, _ = verify_proper_2coloring(hypergraph, colors)
            if not ok:
                raise RuntimeError("verifier rejected a finished coloring")
            return colors, SamplerReport(True, resamples, seed)
        if resamples >= cap:
            return None, SamplerReport(False, resamples, seed,
                                       "resample cap exhausted")
        for v in sorted(bad):
            colors[v] = int(rng.integers(0, 2))
        resamples += 1


# -------------------------------------------- repetition-free sequences

def _symbol_codes(symbols: Sequence[Hashable],
                  table: dict[Hashable, int]) -> None:
    for s in symbols:
        if s not in table:
            table[s] = len(table)


def _trailing_runs(codes: np.ndarray, length: int, size: int) -> np.ndarray:
    """runs[t] = number of trailing positions j with
    codes[length-1-j] == codes[length-1-j-t], for shifts t = 1..length-1.

    Levels are peeled vectorized; surviving shifts shrink geometrically,
    so the expected cost is linear in the buffer length.
    """
    runs = np.zeros(size, dtype=np.int64)
    if length < 2:
        return runs
    shifts = np.arange(1, length)
    active = np.arange(length - 1)
    depth = 0
    while active.size:
        pos = length - 1 - depth
        prev = pos - shifts[active]
        ok = prev >= 0
        matched = np.zeros(active.size, dtype=bool)
        matched[ok] = codes[prev[ok]] == codes[pos]
        runs[shifts[active[matched]]] += 1
        active = active[matched]
        depth += 1
    return runs


def nonrep_sequence_build(lists: ListAssignment, seed: int,
                          cap: int = DRAW_CAP
                          ) -> tuple[tuple[Hashable, ...] | None,
                                     SamplerReport]:
    """Append uniform draws from each position's list; whenever the new
    symbol completes a doubled block, erase the block's second half
    (shortest block first) and keep drawing.

    Detection rides on a maintained trailing-run table: after appending
    at 0-based position m the suffix of length 2t is doubled exactly when
    the run at shift t reaches t.
    """
    if cap < 0:
        raise SamplerError("cap must be nonnegative")
    n = len(lists)
    rng = np.random.default_rng(seed)
    table: dict[Hashable, int] = {}
    for symbols in lists.lists:
        _symbol_codes(symbols, table)
    codes = np.zeros(n, dtype=np.int64)
    buf: list[Hashable] = []
    runs = np.zeros(n + 1, dtype=np.int64)
    shifts = np.arange(n + 1, dtype=np.int64)
    draws = 0
    while len(buf) < n:
        if draws >= cap:
            return None, SamplerReport(False, draws, seed,
                                       "draw cap exhausted")
        position = len(buf)
        symbols = lists.lists[position]
        symbol = symbols[int(rng.integers(0, len(symbols)))]
        draws += 1
        codes[position] = table[symbol]
        buf.append(symbol)
        m = position
        if m:
            matches = codes[m - 1::-1] == codes[m]
            runs[1:m + 1] = (runs[1:m + 1] + 1) * matches
        half = (m + 1) // 2
        hits = np.nonzero(runs[1:half + 1] >= shifts[1:half + 1])[0]
        if hits.size:
            t = int(hits[0]) + 1
            del buf[-t:]
            runs = _trailing_runs(codes, len(buf), n + 1)
    sequence = tuple(buf)
    check = is_nonrepetitive(sequence)
    if not check.ok:
        raise RuntimeError("verifier rejected a finished sequence")
    for symbol, symbols in zip(sequence, lists.lists):
        if symbol not in symbols:
            raise RuntimeError("sequence strayed outside its lists")
    return sequence, SamplerReport(True, draws, seed)


@dataclass(frozen=True)
class NonrepCheck:
    ok: bool
    witness: tuple[int, int] | None   # 1-based (s, t): halves at s and s+t


def is_nonrepetitive(sequence: Sequence[Hashable]) -> NonrepCheck:
    """Looks for indices s, t with the t-blocks at s and s+t equal,
    scanning block lengths ascending and start positions ascending."""
    n = len(sequence)
    table: dict[Hashable, int] = {}
    _symbol_codes(sequence, table)
    codes = np.array([table[s] for s in sequence], dtype=np.int64)
    for t in range(1, n // 2 + 1):
        eq = codes[t:] == codes[:-t]
        sums = np.concatenate(([0], np.cumsum(eq)))
        starts = np.nonzero(sums[t:] - sums[:-t] == t)[0]
        for k in starts:
            if k + 2 * t <= n:
                return NonrepCheck(False, (int(k) + 1, t))
    return NonrepCheck(True, None)


# ------------------------------------------------ acyclic edge coloring

EdgeColoring = dict[frozenset, int]


def _forbidden_colors(graph: Graph, edge: frozenset,
                      coloring: EdgeColoring) -> set[int]:
    """Colors excluded for `edge`: those on adjacent edges, plus the color
    of any edge that would close a 2-colored 4-cycle.  Counting each
    adjacent edge once (a matched pair contributes its shared color and
    one closure) gives at most deg(x)-1 + deg(y)-1 distinct entries."""
    x, y = sorted(edge)
    banned: set[int] = set()
    shades_x: dict[int, str] = {}
    shades_y: dict[int, str] = {}
    for v, shades in ((x, shades_x), (y, shades_y)):
        for u in graph.neighbors[v]:
            c = coloring.get(frozenset((v, u)))
            if c is not None:
                banned.add(c)
                shades[c] = u
    edge_set = set(graph.edges)
    for d, v in shades_x.items():
        u = shades_y.get(d)
        if u is None:
            continue
        closing = frozenset((u, v))
        if closing in edge_set:
            c = coloring.get(closing)
            if c is not None:
                banned.add(c)
    return banned


def _bichromatic_cycle(graph: Graph, edge: frozenset, color: int,
                       coloring: EdgeColoring,
                       at: dict[tuple[str, int], frozenset]
                       ) -> list[frozenset] | None:
    """A cycle through `edge` alternating `color` with some other shade,
    or None.  Properness makes the alternating walk deterministic."""
    x, y = sorted(edge)
    others = {c for (v, c) in at if v in (x, y) and c != color}
    for d in sorted(others):
        path = []
        cur, want = x, d
        for _ in range(len(graph.edges) + 1):
            nxt = at.get((cur, want))
            if nxt is None or nxt == edge:
                break
            path.append(nxt)
            (a, b) = sorted(nxt)
            cur = b if cur == a else a
            want = color if want == d else d
            if cur == y:
                if want == color:
                    return path + [edge]
                break
    return None


def greedy_acyclic_edge_coloring(graph: Graph, palette: int, seed: int,
                                 cap: int = RESAMPLE_CAP
                                 ) -> tuple[EdgeColoring | None,
                                            SamplerReport]:
    """Color edges in input order, drawing uniformly outside the forbidden
    set (adjacent colors and 4-cycle closures).  2-colored cycles of
    length six or more can still appear; the freshly colored edge is then
    uncolored and redrawn.  Raises when some step has no color at all,
    which a palette of size 2(max degree - 1) + 1 rules out."""
    if palette < 1:
        raise SamplerError("palette must be nonempty")
    if cap < 0:
        raise SamplerError("cap must be nonnegative")
    rng = np.random.default_rng(seed)
    coloring: EdgeColoring = {}
    at: dict[tuple[str, int], frozenset] = {}
    draws = 0
    for edge in graph.edges:
        banned = _forbidden_colors(graph, edge, coloring)
        allowed = [c for c in range(palette) if c not in banned]
        if not allowed:
            raise PaletteTooSmallError(
                f"no color left for edge {sorted(edge)} with palette "
                f"{palette}")
        while True:
            if draws >= cap:
                return None, SamplerReport(False, draws, seed,
                                           "draw cap exhausted")
            c = allowed[int(rng.integers(0, len(allowed)))]
            draws += 1
            coloring[edge] = c
            for v in edge:
                at[(v, c)] = edge
            cycle = _bichromatic_cycle(graph, edge, c, coloring, at)
            if cycle is None:
                break
            if len(cycle) < 6:
                raise RuntimeError("closure bookkeeping missed a 4-cycle")
            del coloring[edge]
            for v in edge:
                del at[(v, c)]
    check = is_acyclic_edge_coloring(graph, coloring)
    if not check.ok:
        raise RuntimeError("verifier rejected a finished edge coloring")
    return coloring, SamplerReport(True, draws, seed)


@dataclass(frozen=True)
class AcyclicCheck:
    ok: bool
    kind: str                     # "", "adjacent", or "cycle"
    witness: tuple


def is_acyclic_edge_coloring(graph: Graph,
                             coloring: Mapping[frozenset, int]
                             ) -> AcyclicCheck:
    """Proper on adjacent edges and, for every pair of colors, the edges
    in those two colors form a forest.  Witnesses: a same-colored adjacent
    pair, or the vertex sequence of a 2-colored cycle."""
    missing = [edge for edge in graph.edges if edge not in coloring]
    if missing:
        raise SamplerError(f"coloring misses edge {sorted(missing[0])}")
    for v in graph.vertices:
        seen: dict[int, frozenset] = {}
        for u in graph.neighbors[v]:
            edge = frozenset((v, u))
            c = coloring[edge]
            if c in seen:
                return AcyclicCheck(False, "adjacent",
                                    (tuple(sorted(seen[c])),
                                     tuple(sorted(edge))))
            seen[c] = edge
    pairs = sorted({frozenset((coloring[e], coloring[f]))
                    for e in graph.edges for f in graph.edges
                    if coloring[e] != coloring[f]},
                   key=sorted)
    for pair in pairs:
        adj: dict[str, list[str]] = {}
        for edge in graph.edges:
            if coloring[edge] in pair:
                a, b = sorted(edge)
                adj.setdefault(a, []).append(b)
                adj.setdefault(b, []).append(a)
        visited: set[str] = set()
        for root in sorted(adj):
            if root in visited:
                continue
            component = []
            stack = [root]
            visited.add(root)
            degree_sum = 0
            while stack:
                v = stack.pop()
                component.append(v)
                degree_sum += len(adj[v])
                for u in adj[v]:
                    if u not in visited:
                        visited.add(u)
                        stack.append(u)
            if degree_sum // 2 >= len(component):
                # properness bounds degrees by 2, so the component is a
                # single cycle; walk it for the witness
                start = component[0]
                cycle = [start]
                prev, cur = None, start
                while True:
                    nxt = next(u for u in adj[cur] if u != prev)
                    if nxt == start:
                        break
                    cycle.append(nxt)
                    prev, cur = cur, nxt
                return AcyclicCheck(False, "cycle", tuple(cycle))
    return AcyclicCheck(True, "", ())


# ------------------------------------- repetitively colored path checker

@dataclass(frozen=True)
class NonrepColoringCheck:
    ok: bool
    witness: tuple[str, ...] | None


def is_nonrepetitive_coloring(graph: Graph, coloring: Mapping[str, Hashable],
                              max_vertices: int,
                              budget: int = PATH_BUDGET
                              ) -> NonrepColoringCheck:
    """Exhaustively checks simple paths on up to `max_vertices` vertices
    for a color sequence whose first half repeats as its second half.
    Enumeration is exponential; `budget` caps extension steps and
    overruns raise rather than silently truncate."""
    missing = [v for v in graph.vertices if v not in coloring]
    if missing:
        raise SamplerError(f"coloring misses vertex {missing[0]!r}")
    if max_vertices < 2:
        return NonrepColoringCheck(True, None)
    steps = 0
    for start in graph.vertices:
        stack: list[tuple[list[str], set[str]]] = [([start], {start})]
        while stack:
            path, used = stack.pop()
            length = len(path)
            if length % 2 == 0:
                half = length // 2
                if all(coloring[path[i]] == coloring[path[i + half]]
                       for i in range(half)):
                    return NonrepColoringCheck(False, tuple(path))
            if length >= max_vertices:
                continue
            for u in graph.neighbors[path[-1]]:
                if u in used:
                    continue
                steps += 1
                if steps > budget:
                    raise BudgetExceededError(
                        f"path enumeration exceeded {budget} steps")
                stack.append((path + [u], used | {u}))
    return NonrepColoringCheck(True, None)
