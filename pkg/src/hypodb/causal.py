"""Causal structure of a system of equations.

A complete system (as many equations as variables) admits a total causal
mapping: a bijection assigning each equation the variable it determines,
found here as a perfect matching of the equation-variable bipartite graph.
The induced directed dependencies and their transitive closure expose the
causal ordering; strongly coupled variables show up as cycles.  A guarded
brute-force decomposition into minimal self-contained blocks is kept as a
small-scale oracle (the general problem is intractable).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _kernels
from .errors import IncompleteStructureError, SizeGuardError
from .structure import Structure


@dataclass(frozen=True)
class CausalMapping:
    """Bijection equation id -> variable name, each equation to a variable it contains."""

    pairs: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    def variable_of(self, equation: str) -> str:
        return self.as_dict()[equation]


def is_complete(structure: Structure) -> bool:
    return structure.n_equations == structure.n_variables


def _matching_arrays(structure: Structure) -> tuple[np.ndarray, np.ndarray, int]:
    indptr, indices = structure.csr()
    match_l, match_r, matched = _kernels.hopcroft_karp(
        indptr, indices, structure.n_equations, structure.n_variables
    )
    return match_l, match_r, matched


def tcm(structure: Structure) -> CausalMapping:
    """Total causal mapping via maximum matching; deterministic for a fixed
    incidence order (greedy seed first, then shortest augmenting paths)."""
    if not is_complete(structure):
        raise IncompleteStructureError(
            "structure is not complete",
            equations=structure.n_equations,
            variables=structure.n_variables,
        )
    match_l, _, matched = _matching_arrays(structure)
    if matched < structure.n_equations:
        raise IncompleteStructureError(
            "no total causal mapping: some equation subset is over-constrained",
            matched=int(matched),
            equations=structure.n_equations,
        )
    pairs = tuple(
        (structure.equations[i], structure.variables[int(match_l[i])])
        for i in range(structure.n_equations)
    )
    return CausalMapping(pairs)


@dataclass(frozen=True)
class CausalDeps:
    edges: frozenset[tuple[str, str]]

    def __contains__(self, edge: tuple[str, str]) -> bool:
        return edge in self.edges


def direct_deps(structure: Structure, mapping: CausalMapping) -> CausalDeps:
    """(x_a, x_b) iff some equation mapped to x_b mentions x_a (a != b)."""
    var_of = mapping.as_dict()
    edges: set[tuple[str, str]] = set()
    for i, eq in enumerate(structure.equations):
        x_b = var_of[eq]
        for v in structure.incidence[i]:
            x_a = structure.variables[v]
            if x_a != x_b:
                edges.add((x_a, x_b))
    return CausalDeps(frozenset(edges))


def transitive_closure(deps: CausalDeps) -> CausalDeps:
    succ: dict[str, set[str]] = {}
    for a, b in deps.edges:
        succ.setdefault(a, set()).add(b)
    closed: set[tuple[str, str]] = set()
    for start in succ:
        stack = list(succ[start])
        reached: set[str] = set()
        while stack:
            node = stack.pop()
            if node in reached:
                continue
            reached.add(node)
            stack.extend(succ.get(node, ()))
        closed.update((start, r) for r in reached)
    return CausalDeps(frozenset(closed))


def classify(structure: Structure, mapping: CausalMapping,
             domains: frozenset[str] | None = None) -> dict[str, frozenset[str]]:
    """Partition variables into exogenous, endogenous and domain sets.

    A variable x is exogenous when its determining equation mentions nothing
    beyond x and domain variables: its value is set outside the system.
    """
    domains = structure.domains if domains is None else domains
    var_of = mapping.as_dict()
    exo: set[str] = set()
    endo: set[str] = set()
    for i, eq in enumerate(structure.equations):
        x = var_of[eq]
        if x in domains:
            continue
        rest = structure.vars_of(i) - {x} - domains
        (exo if not rest else endo).add(x)
    dom = set(structure.variables) & domains
    return {
        "exogenous": frozenset(exo),
        "endogenous": frozenset(endo),
        "domain": frozenset(dom),
    }


def first_causes(closure: CausalDeps, exogenous: frozenset[str], x: str) -> frozenset[str]:
    """Exogenous ancestors of x that have no causal predecessor of their own."""
    has_pred = {b for _, b in closure.edges}
    return frozenset(
        a for a in exogenous
        if (a, x) in closure.edges and a not in has_pred
    )


_COA_GUARD = 12


def coa_bruteforce(structure: Structure) -> list[list[frozenset[str]]]:
    """Recursive decomposition into minimal self-contained variable blocks.

    Exhaustive search over equation subsets, usable only at toy scale; each
    recursive step reports the minimal complete substructures found, then
    eliminates their variables and recurses on the remainder.
    """
    if structure.n_equations > _COA_GUARD:
        raise SizeGuardError(
            f"brute-force causal ordering guarded at {_COA_GUARD} equations",
            equations=structure.n_equations,
        )
    if not is_complete(structure):
        raise IncompleteStructureError("structure is not complete")

    eq_vars: dict[str, frozenset[str]] = {
        structure.equations[i]: structure.vars_of(i) for i in range(structure.n_equations)
    }
    levels: list[list[frozenset[str]]] = []
    remaining = dict(eq_vars)
    while remaining:
        minimal = _minimal_complete_subsets(remaining)
        if not minimal:
            raise IncompleteStructureError("no minimal complete substructure found")
        blocks = [frozenset().union(*(remaining[f] for f in sub)) for sub in minimal]
        levels.append(sorted(blocks, key=sorted))
        eliminated: set[str] = set().union(*blocks)
        used_eqs: set[str] = set().union(*(set(sub) for sub in minimal))
        remaining = {
            f: vs - eliminated
            for f, vs in remaining.items()
            if f not in used_eqs
        }
        if any(not vs for vs in remaining.values()):
            raise IncompleteStructureError("over-constrained remainder")
    return levels


def _minimal_complete_subsets(eq_vars: dict[str, frozenset[str]]) -> list[tuple[str, ...]]:
    names = list(eq_vars)
    found: list[tuple[str, ...]] = []
    found_sets: list[set[str]] = []
    # scan all sizes: a level may hold disjoint minimal blocks of different
    # sizes; candidates containing an already-found block are not minimal
    for k in range(1, len(names) + 1):
        for sub in combinations(names, k):
            if any(s.issubset(sub) for s in found_sets):
                continue
            vs = frozenset().union(*(eq_vars[f] for f in sub))
            if len(vs) != k:
                continue
            if _has_perfect_matching({f: eq_vars[f] for f in sub}, vs):
                found.append(sub)
                found_sets.append(set(sub))
    return found


def _has_perfect_matching(eq_vars: dict[str, frozenset[str]], variables: frozenset[str]) -> bool:
    var_index = {v: i for i, v in enumerate(sorted(variables))}
    rows = [sorted(var_index[v] for v in vs) for vs in eq_vars.values()]
    indptr = np.zeros(len(rows) + 1, np.int64)
    for i, row in enumerate(rows):
        indptr[i + 1] = indptr[i] + len(row)
    indices = np.array([v for row in rows for v in row], np.int64)
    _, _, matched = _kernels.hopcroft_karp(indptr, indices, len(rows), len(var_index))
    return matched == len(rows)


def enumerate_perfect_matchings(structure: Structure, limit: int = 100000) -> list[CausalMapping]:
    """All total causal mappings, by backtracking.  Test oracle; small inputs only."""
    if structure.n_equations > 10:
        raise SizeGuardError("matching enumeration guarded at 10 equations")
    n = structure.n_equations
    rows = [sorted(structure.incidence[i]) for i in range(n)]
    order = sorted(range(n), key=lambda i: len(rows[i]))
    used: set[int] = set()
    assign: dict[int, int] = {}
    out: list[CausalMapping] = []

    def rec(pos: int) -> None:
        if len(out) >= limit:
            return
        if pos == n:
            pairs = tuple(
                (structure.equations[i], structure.variables[assign[i]]) for i in range(n)
            )
            out.append(CausalMapping(pairs))
            return
        i = order[pos]
        for v in rows[i]:
            if v not in used:
                used.add(v)
                assign[i] = v
                rec(pos + 1)
                used.discard(v)
                del assign[i]

    rec(0)
    return out
