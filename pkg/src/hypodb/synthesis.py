"""Uncertainty introduction: learn empirical u-factors from trial data, build
the factorization, and materialize u-factor and predictive projections.

The empirical side groups exogenous attributes whose per-phenomenon value
partitions coincide exactly (parameters are set values, compared by their
canonical decimals, never by epsilon); each group becomes one repair-key
random variable.  The theoretical side folds the encoded claims down to
their first causes, merges equivalent keys, and joins everything back onto
the fact table so every prediction row carries the condition columns of the
u-factors it descends from.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .causal import CausalMapping, classify, tcm
from .errors import StoreError, ValidationError
from .fd import (
    FD,
    FDSet,
    PHI,
    UPSILON,
    folding,
    h_encode,
    merge,
    phi_projection,
    upsilon_projection,
)
from .ingest import BigFactTable
from .structure import Structure
from .urel import URelation, WorldTable, ra_join, ra_project, ra_select, repair_key


@dataclass(frozen=True)
class UFactorGroup:
    """A maximal set of exogenous attributes with identical per-phi partitions."""

    pivot: str
    members: tuple[str, ...]  # excludes the pivot

    @property
    def attrs(self) -> tuple[str, ...]:
        return (self.pivot, *self.members)


def u_factor_learning(table: BigFactTable, exogenous: frozenset[str]) -> list[UFactorGroup]:
    """Group exogenous attributes by exact per-phi partition equality.

    Two attributes land in one group iff, within every phenomenon, their
    row partitions by value coincide (a one-to-one correspondence of
    values).  Single-valued attributes form degenerate certain groups.
    Groups are ordered by their first member's fact-table column; the pivot
    is the lexicographically least member.
    """
    if table.n_rows == 0:
        raise ValidationError("u-factor learning on an empty fact table")
    data = table.data
    phis = data["phi"]
    exo_cols = [c for c in table.var_columns if c in exogenous]
    signatures: dict[str, bytes] = {}
    for col in exo_cols:
        pair = np.stack([phis.astype(np.float64), data[col]], axis=1)
        _, first_idx, inverse = np.unique(
            pair, axis=0, return_index=True, return_inverse=True
        )
        # label each row by the first row index of its (phi, value) block:
        # equal partitions <=> equal label arrays, across attributes
        signatures[col] = first_idx[inverse.ravel()].tobytes()
    groups: dict[bytes, list[str]] = {}
    for col in exo_cols:
        groups.setdefault(signatures[col], []).append(col)
    out = []
    for members in groups.values():
        pivot = min(members)
        out.append(UFactorGroup(pivot, tuple(m for m in members if m != pivot)))
    return out


def u_factorize(table: BigFactTable, groups: list[UFactorGroup], world: WorldTable,
                relation_names: list[str] | None = None
                ) -> tuple[list[URelation], dict[tuple[int, str], tuple[int, list[tuple]]]]:
    """Materialize one u-factor projection per group.

    Per group: group the fact table by (phi, pivot, members) with row counts,
    repair phi as a key weighted by count, and project the counts away.
    Returns the projections plus, per (phi, pivot), the created variable and
    its alternatives' value tuples in first-seen order.
    """
    data = table.data
    phis = data["phi"]
    rels: list[URelation] = []
    alt_index: dict[tuple[int, str], tuple[int, list[tuple]]] = {}
    for gi, group in enumerate(groups):
        cols = ["phi", *group.attrs]
        stacked = np.stack([phis.astype(np.float64)] + [data[a] for a in group.attrs], axis=1)
        uniq, first_idx, counts = np.unique(
            stacked, axis=0, return_index=True, return_counts=True
        )
        order = np.argsort(first_idx, kind="stable")  # first-seen order
        uniq, counts = uniq[order], counts[order]
        name = relation_names[gi] if relation_names else f"factor_{group.pivot}"
        plain = URelation(
            name,
            tuple(cols) + ("__count",),
            {
                "phi": uniq[:, 0].astype(np.int64),
                **{a: uniq[:, 1 + i].copy() for i, a in enumerate(group.attrs)},
                "__count": counts.astype(np.float64),
            },
        )
        rel, var_map = repair_key(world, plain, ["phi"], "__count", name)
        rels.append(rel)
        for (phi_val,), (vid, row_order) in var_map.items():
            value_rows = [tuple(uniq[i, 1:]) for i in row_order]
            alt_index[(int(phi_val), group.pivot)] = (vid, value_rows)
    return rels, alt_index


@dataclass
class Factorization:
    """The fd sets driving synthesis, with empirical/theoretical provenance."""

    sigma: FDSet
    omega: FDSet
    omega_folded: FDSet
    gamma: FDSet
    gamma_prime: FDSet
    groups: list[UFactorGroup]

    @property
    def claims(self) -> list[FD]:
        return list(upsilon_projection(self.gamma).fds)

    @property
    def empirical(self) -> list[FD]:
        return list(phi_projection(self.gamma).fds)


def build_factorization(sigma: FDSet, table: BigFactTable,
                        exogenous: frozenset[str]) -> Factorization:
    """Omega = learned empirical fds + the claims of sigma; the factorization
    is the merge of Omega's folding, and its repaired variant adds the
    ``phi -> group`` fds that key repairing introduces."""
    groups = u_factor_learning(table, exogenous)
    learned = [
        FD.of({PHI, g.pivot}, b) for g in groups for b in g.members
    ]
    omega = FDSet(learned + list(upsilon_projection(sigma).fds), sigma.universe)
    omega_folded = folding(omega)
    gamma = merge(omega_folded)
    repaired = [FD.of({PHI}, g.attrs) for g in groups]
    gamma_prime = FDSet(list(gamma.fds) + repaired, gamma.universe)
    return Factorization(sigma, omega, omega_folded, gamma, gamma_prime, groups)


def u_propagate(table: BigFactTable, fact: Factorization, factor_rels: list[URelation],
                y0: URelation, world: WorldTable, hypothesis_id: int,
                domains: frozenset[str], claim_names: list[str] | None = None
                ) -> list[URelation]:
    """Materialize one predictive projection per claim of the factorization.

    For claim Z -> T: the pivots in Z select which u-factor projections to
    join; the projection keeps S = (Z minus pivots) plus phi as data columns
    and carries the unioned condition columns of phi's explanation variable
    and the joined u-factors.
    """
    pivot_of = {g.pivot: i for i, g in enumerate(fact.groups)}
    rels: list[URelation] = []
    h_rel = URelation(f"H{hypothesis_id}", table.columns, table.data)
    for ci, claim in enumerate(fact.claims):
        z = claim.lhs
        pivots = sorted(p for p in z if p in pivot_of)
        s_cols = (z - set(pivots) - {UPSILON}) | {PHI}
        base = ra_select(y0, [("upsilon", "=", hypothesis_id)])
        for p in pivots:
            base = ra_join(base, factor_rels[pivot_of[p]])
        joined = ra_join(base, h_rel)
        ordered = ["phi", "upsilon"]
        ordered += [c for c in table.var_columns if c in s_cols]
        ordered += [c for c in table.var_columns if c in claim.rhs and c not in ordered]
        name = claim_names[ci] if claim_names else f"Y{hypothesis_id}_claim{ci + 1}"
        rels.append(ra_project(joined, ordered, name))
    return rels


@dataclass
class SynthesisResult:
    hypothesis_id: int
    mapping: CausalMapping
    classes: dict[str, frozenset[str]]
    factorization: Factorization
    factor_names: list[str]
    claim_names: list[str]
    claim_fds: list[FD]
    trial_worlds: dict[tuple[int, int], dict[int, int]]  # (phi, tid) -> {vid: alt}
    priors: dict[tuple[int, int], float] = field(default_factory=dict)
    # trials whose posterior mass underflowed to exactly zero: their worlds
    # are purged from the projections and they stay out of later updates
    dead_trials: set[tuple[int, int]] = field(default_factory=set)

    def report(self) -> dict:
        f = self.factorization
        return {
            "hypothesis_id": self.hypothesis_id,
            "exogenous": sorted(self.classes["exogenous"]),
            "endogenous": sorted(self.classes["endogenous"]),
            "domain": sorted(self.classes["domain"]),
            "groups": [
                {"pivot": g.pivot, "members": list(g.members)} for g in f.groups
            ],
            "sigma": f.sigma.to_text(),
            "omega": f.omega.to_text(),
            "gamma": f.gamma.to_text(),
            "gamma_prime": f.gamma_prime.to_text(),
            "factors": self.factor_names,
            "claims": {
                name: str(fd) for name, fd in zip(self.claim_names, self.claim_fds)
            },
        }


def synthesize(structure: Structure, table: BigFactTable, y0: URelation,
               y0_map: dict[int, tuple[int, list[int]]], world: WorldTable,
               hypothesis_id: int) -> tuple[SynthesisResult, list[URelation]]:
    """Full pipeline for one hypothesis: encode, learn, fold, merge,
    factorize, propagate.  Returns the synthesis record and all projections
    (u-factor projections first, then predictive projections)."""
    if table.n_rows == 0:
        raise StoreError(f"hypothesis {hypothesis_id} has no loaded trials")
    for phi_val in {p for p, _ in table.trials}:
        if phi_val not in y0_map:
            raise StoreError(
                f"no explanation recorded for phenomenon {phi_val} "
                f"(hypothesis {hypothesis_id})"
            )
    mapping = tcm(structure)
    sigma = h_encode(structure, mapping)
    classes = classify(structure, mapping)
    fact = build_factorization(sigma, table, classes["exogenous"])
    factor_names = [f"Y{hypothesis_id}_factor{i + 1}" for i in range(len(fact.groups))]
    factor_rels, alt_index = u_factorize(table, fact.groups, world, factor_names)
    claim_rels = u_propagate(
        table, fact, factor_rels, y0, world, hypothesis_id, structure.domains
    )
    trial_worlds, priors = _trial_worlds(
        table, fact.groups, alt_index, y0_map, world, hypothesis_id
    )
    result = SynthesisResult(
        hypothesis_id=hypothesis_id,
        mapping=mapping,
        classes=classes,
        factorization=fact,
        factor_names=factor_names,
        claim_names=[r.name for r in claim_rels],
        claim_fds=fact.claims,
        trial_worlds=trial_worlds,
        priors=priors,
    )
    return result, factor_rels + claim_rels


def _trial_worlds(table: BigFactTable, groups: list[UFactorGroup],
                  alt_index: dict, y0_map: dict, world: WorldTable,
                  hypothesis_id: int) -> tuple[dict, dict]:
    """Map each loaded trial onto its world: one alternative per u-factor
    variable plus the explanation variable's alternative for this hypothesis."""
    data = table.data
    trial_worlds: dict[tuple[int, int], dict[int, int]] = {}
    priors: dict[tuple[int, int], float] = {}
    for phi_val, tid in table.trials:
        rows = table.trial_rows(phi_val, tid)
        i0 = int(rows[0])
        theta: dict[int, int] = {}
        y0_vid, upsilons = y0_map[phi_val]
        theta[y0_vid] = upsilons.index(hypothesis_id) + 1
        for g in groups:
            vid, value_rows = alt_index[(phi_val, g.pivot)]
            for a in g.attrs:
                col = data[a][rows]
                if col.size and not np.all(col == col[0]):
                    raise StoreError(
                        f"trial (phi={phi_val}, tid={tid}) parameter {a!r} "
                        "varies within the trial"
                    )
            row_vals = tuple(float(data[a][i0]) for a in g.attrs)
            alt = next(
                k + 1 for k, vals in enumerate(value_rows)
                if all(v == w for v, w in zip(vals, row_vals))
            )
            theta[vid] = alt
        trial_worlds[(phi_val, tid)] = theta
        p = 1.0
        for vid, alt in theta.items():
            p *= world.marginal(vid, alt)
        priors[(phi_val, tid)] = p
    return trial_worlds, priors
