"""Classical lopsided local-lemma checker and its weight translation.

The input is the textbook shape: n events with probabilities p_i, a
neighborhood map, and levels mu_i in [0, 1).  Feasibility means
p_i <= mu_i * prod_{j in Gamma(i)} (1 - mu_j) for every i, which buys
Pr(no event occurs) >= prod_i (1 - mu_i).  The translation
tau_i = 1 / (1 - mu_i) turns a feasible level vector into element weights
whose condition margins are checkable directly and whose full product
reproduces the same bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .engine import IndeterminateError

TOL = 1e-12
ITER_CAP = 10 ** 4


class LllError(ValueError):
    """Malformed instance data or out-of-range parameters."""


@dataclass(frozen=True)
class LllInstance:
    """Events indexed 1..n with probabilities, neighborhoods, and levels."""

    n: int
    gamma: dict[int, frozenset[int]]
    probs: dict[int, float]
    mu: dict[int, float]

    @staticmethod
    def build(n: int, gamma: Mapping[int, frozenset[int]],
              probs: Mapping[int, float],
              mu: Mapping[int, float]) -> "LllInstance":
        if n < 1:
            raise LllError("need at least one event")
        idx = set(range(1, n + 1))
        for table, name in ((gamma, "gamma"), (probs, "p"), (mu, "mu")):
            if set(table) != idx:
                raise LllError(f"{name} must be indexed 1..{n}")
        for i in idx:
            if not frozenset(gamma[i]) <= idx:
                raise LllError(f"gamma[{i}] leaves 1..{n}")
            if i in gamma[i]:
                raise LllError(f"gamma[{i}] contains {i}")
            if not 0.0 <= probs[i] <= 1.0:
                raise LllError(f"p[{i}] = {probs[i]} outside [0,1]")
            if not 0.0 <= mu[i] < 1.0:
                raise LllError(f"mu[{i}] = {mu[i]} outside [0,1)")
        return LllInstance(n, {i: frozenset(gamma[i]) for i in idx},
                           {i: float(probs[i]) for i in idx},
                           {i: float(mu[i]) for i in idx})


def instance_from_json(obj: dict) -> LllInstance:
    """Parse {"n", "gamma": [[...]...], "p": [...], "mu": [...]} with
    1-based neighbor indices."""
    try:
        n = int(obj["n"])
        gamma_rows = obj["gamma"]
        probs = [float(x) for x in obj["p"]]
        mu = [float(x) for x in obj["mu"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise LllError(f"bad instance object: {exc}") from exc
    if not (len(gamma_rows) == len(probs) == len(mu) == n):
        raise LllError(f"arrays must all have length n={n}")
    gamma = {i + 1: frozenset(int(j) for j in row)
             for i, row in enumerate(gamma_rows)}
    return LllInstance.build(n,
                             gamma,
                             {i + 1: p for i, p in enumerate(probs)},
                             {i + 1: m for i, m in enumerate(mu)})


@dataclass(frozen=True)
class LopsidedReport:
    feasible: bool
    margins: dict[int, float]     # mu_i * prod(1 - mu_j) - p_i
    bound: float                  # prod_i (1 - mu_i)


def check_lopsided(inst: LllInstance, tol: float = TOL) -> LopsidedReport:
    margins = {}
    for i in range(1, inst.n + 1):
        allowance = inst.mu[i] * math.prod(1.0 - inst.mu[j]
                                           for j in inst.gamma[i])
        margins[i] = allowance - inst.probs[i]
    feasible = all(m >= -tol for m in margins.values())
    bound = math.prod(1.0 - inst.mu[i] for i in range(1, inst.n + 1))
    return LopsidedReport(feasible, margins, bound)


@dataclass(frozen=True)
class MuTauResult:
    tau: dict[int, float]
    margins: dict[int, float]     # tau_i - 1 - p_i * tau(Gamma(i) + i)
    product_identity_error: float # |bound * prod tau - 1|


def mu_to_tau(inst: LllInstance, tol: float = TOL) -> MuTauResult:
    """Translate levels to weights tau_i = 1/(1 - mu_i) and check that a
    feasible instance satisfies the per-element weight condition.

    Raises LllError when the instance fails the lopsided check: the
    translation is only claimed for feasible inputs.
    """
    report = check_lopsided(inst, tol)
    if not report.feasible:
        raise LllError("instance fails the lopsided condition")
    tau = {i: 1.0 / (1.0 - inst.mu[i]) for i in range(1, inst.n + 1)}
    margins = {}
    for i in range(1, inst.n + 1):
        closed = inst.gamma[i] | {i}
        margins[i] = tau[i] - 1.0 - inst.probs[i] * math.prod(
            tau[j] for j in closed)
    identity = abs(report.bound * math.prod(tau.values()) - 1.0)
    return MuTauResult(tau, margins, identity)


@dataclass(frozen=True)
class AutoMuResult:
    status: str                   # "converged" or "infeasible"
    mu: dict[int, float] | None
    iterations: int


def auto_mu(probs: Mapping[int, float], gamma: Mapping[int, frozenset[int]],
            tol: float = TOL, iter_cap: int = ITER_CAP) -> AutoMuResult:
    """Search for feasible levels by iterating mu_i = p_i / prod(1 - mu_j).

    Started at mu = p the chain increases and stays below any feasible
    level vector, so crossing 1 proves infeasibility.  Convergence yields
    levels satisfying the lopsided condition with equality.
    """
    idx = sorted(probs)
    for i in idx:
        if not 0.0 <= probs[i] < 1.0:
            raise LllError(f"p[{i}] = {probs[i]} outside [0,1)")
    mu = {i: probs[i] for i in idx}
    iterations = 0
    while iterations < iter_cap:
        iterations += 1
        nxt = {}
        for i in idx:
            denom = math.prod(1.0 - mu[j] for j in gamma[i])
            if denom <= 0.0:
                return AutoMuResult("infeasible", None, iterations)
            nxt[i] = probs[i] / denom
        if any(v >= 1.0 for v in nxt.values()):
            return AutoMuResult("infeasible", None, iterations)
        sup_step = max(abs(nxt[i] - mu[i]) for i in idx) if idx else 0.0
        mu = nxt
        if sup_step < tol:
            return AutoMuResult("converged", mu, iterations)
    raise IndeterminateError(
        f"no convergence or infeasibility within {iter_cap} iterations",
        iterations)
