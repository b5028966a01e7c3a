"""Embedded U-relational machinery: condition columns, world table, repair-key,
positive relational algebra and exact confidence aggregation.

A U-relation's rows carry, next to their data tuple, a set of assignments
``variable -> value index`` in fixed-width condition slots (``-1`` marks an
empty slot).  The world table stores each discrete random variable's marginal
probabilities; value indices run from 1 in first-seen order.

Representation is columnar throughout (NumPy arrays per data column, two
``(n, k)`` int32 matrices for the condition slots) so the same code serves
both toy fixtures and 100 MB trial loads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NonDisjointGroupError, StoreError, UnknownIdError, ValidationError

_OPS: dict[str, Callable] = {
    "=": lambda a, b: a == b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}

_INT_COLUMNS = {"phi", "upsilon", "tid"}


class WorldTable:
    """Marginal probabilities of the discrete random variables.

    Variables are named ``x_<id>`` in creation order; alternatives of
    variable v are 1..len(marginals(v)).
    """

    def __init__(self):
        self._probs: dict[int, np.ndarray] = {}
        self._next_id = 0

    def new_variable(self, marginals: Sequence[float]) -> int:
        arr = np.asarray(marginals, np.float64)
        if arr.size == 0 or np.any(arr <= 0):
            raise ValidationError("marginals must be positive")
        if abs(float(arr.sum()) - 1.0) > 1e-9:
            raise ValidationError(f"marginals sum to {arr.sum()}, expected 1")
        vid = self._next_id
        self._next_id += 1
        self._probs[vid] = arr
        return vid

    def variables(self) -> list[int]:
        return sorted(self._probs)

    @property
    def capacity(self) -> int:
        """One past the highest variable id ever created."""
        return self._next_id

    def name(self, vid: int) -> str:
        return f"x_{vid}"

    def id_of(self, name: str) -> int:
        if not name.startswith("x_"):
            raise UnknownIdError(f"bad variable name {name!r}")
        vid = int(name[2:])
        if vid not in self._probs:
            raise UnknownIdError(f"unknown variable {name!r}")
        return vid

    def marginals(self, vid: int) -> np.ndarray:
        try:
            return self._probs[vid]
        except KeyError:
            raise UnknownIdError(f"unknown variable x_{vid}") from None

    def marginal(self, vid: int, value: int) -> float:
        arr = self.marginals(vid)
        if not 1 <= value <= arr.size:
            raise UnknownIdError(f"variable x_{vid} has no alternative {value}")
        return float(arr[value - 1])

    def replace_marginals(self, vid: int, marginals: Sequence[float]) -> None:
        if vid not in self._probs:
            raise UnknownIdError(f"unknown variable x_{vid}")
        arr = np.asarray(marginals, np.float64)
        if abs(float(arr.sum()) - 1.0) > 1e-9:
            raise ValidationError(f"marginals sum to {arr.sum()}, expected 1")
        self._probs[vid] = arr

    def drop(self, vid: int) -> None:
        self._probs.pop(vid, None)

    def to_obj(self) -> dict:
        return {
            "next_id": self._next_id,
            "variables": {str(v): list(map(float, arr)) for v, arr in self._probs.items()},
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "WorldTable":
        w = cls()
        w._next_id = int(obj.get("next_id", 0))
        for k, probs in obj.get("variables", {}).items():
            w._probs[int(k)] = np.asarray(probs, np.float64)
        return w


@dataclass
class URelation:
    name: str
    columns: tuple[str, ...]
    data: dict[str, np.ndarray]
    cond_vars: np.ndarray = field(default=None)  # (n, k) int32, -1 empty
    cond_vals: np.ndarray = field(default=None)

    def __post_init__(self):
        n = self.n_rows
        if self.cond_vars is None:
            self.cond_vars = np.full((n, 0), -1, np.int32)
            self.cond_vals = np.full((n, 0), -1, np.int32)
        for c in self.columns:
            if len(self.data[c]) != n:
                raise ValidationError(f"column {c!r} length mismatch in {self.name!r}")

    @property
    def n_rows(self) -> int:
        if not self.columns:
            return 0 if self.cond_vars is None else self.cond_vars.shape[0]
        return len(self.data[self.columns[0]])

    @property
    def n_cond_slots(self) -> int:
        return self.cond_vars.shape[1]

    @classmethod
    def from_rows(cls, name: str, columns: Sequence[str], rows: Iterable[Sequence],
                  conds: Iterable[Iterable[tuple[int, int]]] | None = None) -> "URelation":
        columns = tuple(columns)
        rows = [tuple(r) for r in rows]
        data = {}
        for i, c in enumerate(columns):
            vals = [r[i] for r in rows]
            dtype = np.int64 if c in _INT_COLUMNS else np.float64
            data[c] = np.asarray(vals, dtype)
        if conds is None:
            cv = cd = None
        else:
            conds = [sorted(tuple(c)) for c in conds]
            k = max((len(c) for c in conds), default=0)
            cv = np.full((len(rows), k), -1, np.int32)
            cd = np.full((len(rows), k), -1, np.int32)
            for i, assigns in enumerate(conds):
                for j, (var, val) in enumerate(assigns):
                    cv[i, j] = var
                    cd[i, j] = val
        return cls(name, columns, data, cv, cd)

    def row_assignments(self, i: int) -> tuple[tuple[int, int], ...]:
        out = []
        for j in range(self.n_cond_slots):
            v = int(self.cond_vars[i, j])
            if v >= 0:
                out.append((v, int(self.cond_vals[i, j])))
        return tuple(out)

    def row_tuple(self, i: int) -> tuple:
        return tuple(self.data[c][i] for c in self.columns)

    def take(self, idx: np.ndarray, name: str | None = None) -> "URelation":
        return URelation(
            name or self.name,
            self.columns,
            {c: self.data[c][idx] for c in self.columns},
            self.cond_vars[idx],
            self.cond_vals[idx],
        )


def _normalize_conds(cond_vars: np.ndarray, cond_vals: np.ndarray
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sort slots by variable id, drop duplicates, flag conflicting rows.

    Returns (vars, vals, consistent_mask); duplicate assignments of one
    variable to the same value collapse, to different values conflict.
    """
    n, k = cond_vars.shape
    if k == 0:
        return cond_vars, cond_vals, np.ones(n, bool)
    cond_vars = cond_vars.copy()
    cond_vals = cond_vals.copy()
    consistent = np.ones(n, bool)
    for a in range(k):
        for b in range(a + 1, k):
            same = (cond_vars[:, a] >= 0) & (cond_vars[:, a] == cond_vars[:, b])
            if not same.any():
                continue
            clash = same & (cond_vals[:, a] != cond_vals[:, b])
            consistent &= ~clash
            dup = same & (cond_vals[:, a] == cond_vals[:, b])
            cond_vars[dup, b] = -1
            cond_vals[dup, b] = -1
    big = np.iinfo(np.int32).max
    sort_key = np.where(cond_vars < 0, big, cond_vars)
    order = np.argsort(sort_key, axis=1, kind="stable")
    cond_vars = np.take_along_axis(cond_vars, order, 1)
    cond_vals = np.take_along_axis(cond_vals, order, 1)
    used = int((cond_vars >= 0).sum(axis=1).max()) if n else 0
    return cond_vars[:, :used], cond_vals[:, :used], consistent


def repair_key(world: WorldTable, rel: URelation, key: Sequence[str], weight: str,
               name: str | None = None) -> tuple[URelation, dict]:
    """Repair ``key`` in a certain relation, weighting alternatives by ``weight``.

    One fresh random variable per distinct key value; each row becomes one
    alternative with marginal weight/group-total; the weight column is
    dropped.  Returns the U-relation and a map key-value -> (variable id,
    [row order of alternatives]).
    """
    if rel.n_rows == 0:
        raise ValidationError("repair-key on empty relation")
    if rel.n_cond_slots != 0:
        raise ValidationError("repair-key expects a certain relation")
    w = np.asarray(rel.data[weight], np.float64)
    if np.any(w <= 0):
        raise ValidationError("repair-key weights must be strictly positive")
    key = tuple(key)
    keys = [tuple(rel.data[c][i] for c in key) for i in range(rel.n_rows)]
    groups: dict[tuple, list[int]] = {}
    for i, kv in enumerate(keys):
        groups.setdefault(kv, []).append(i)
    out_cols = tuple(c for c in rel.columns if c != weight)
    cv = np.full((rel.n_rows, 1), -1, np.int32)
    cd = np.full((rel.n_rows, 1), -1, np.int32)
    var_map: dict = {}
    for kv, rows_idx in groups.items():
        total = float(w[rows_idx].sum())
        vid = world.new_variable([float(w[i]) / total for i in rows_idx])
        var_map[kv] = (vid, list(rows_idx))
        for alt, i in enumerate(rows_idx, start=1):
            cv[i, 0] = vid
            cd[i, 0] = alt
    out = URelation(
        name or f"repair({rel.name})",
        out_cols,
        {c: rel.data[c] for c in out_cols},
        cv, cd,
    )
    return out, var_map


def ra_select(rel: URelation, predicates: Iterable[tuple[str, str, object]],
              name: str | None = None) -> URelation:
    mask = np.ones(rel.n_rows, bool)
    for attr, op, value in predicates:
        if attr not in rel.data:
            raise ValidationError(f"unknown attribute {attr!r} in {rel.name!r}")
        if op not in _OPS:
            raise ValidationError(f"unknown operator {op!r}")
        col = rel.data[attr]
        mask &= _OPS[op](col, col.dtype.type(value))
    return rel.take(np.flatnonzero(mask), name)


def ra_project(rel: URelation, attrs: Sequence[str], name: str | None = None) -> URelation:
    """Projection onto ``attrs``; condition columns are always retained."""
    attrs = tuple(dict.fromkeys(attrs))
    for a in attrs:
        if a not in rel.data:
            raise ValidationError(f"unknown attribute {a!r} in {rel.name!r}")
    return URelation(name or rel.name, attrs, {a: rel.data[a] for a in attrs},
                     rel.cond_vars, rel.cond_vals)


def ra_join(left: URelation, right: URelation, on: Sequence[str] | None = None,
            name: str | None = None) -> URelation:
    """Natural join; condition-column pairs union, inconsistent rows drop."""
    if on is None:
        on = [c for c in left.columns if c in right.columns]
    on = list(on)
    for c in on:
        if c not in left.data or c not in right.data:
            raise ValidationError(f"join attribute {c!r} missing")
    if on:
        import pandas as pd

        ldf = pd.DataFrame({c: left.data[c] for c in on})
        ldf["__l"] = np.arange(left.n_rows)
        rdf = pd.DataFrame({c: right.data[c] for c in on})
        rdf["__r"] = np.arange(right.n_rows)
        merged = ldf.merge(rdf, on=on, how="inner")
        li = merged["__l"].to_numpy()
        ri = merged["__r"].to_numpy()
    else:  # cross product
        li = np.repeat(np.arange(left.n_rows), right.n_rows)
        ri = np.tile(np.arange(right.n_rows), left.n_rows)
    cv = np.hstack([left.cond_vars[li], right.cond_vars[ri]])
    cd = np.hstack([left.cond_vals[li], right.cond_vals[ri]])
    cv, cd, ok = _normalize_conds(cv, cd)
    out_cols = tuple(left.columns) + tuple(c for c in right.columns if c not in left.columns)
    data = {}
    for c in left.columns:
        data[c] = left.data[c][li]
    for c in right.columns:
        if c not in data:
            data[c] = right.data[c][ri]
    keep = np.flatnonzero(ok)
    return URelation(
        name or f"({left.name} join {right.name})",
        out_cols,
        {c: v[keep] for c, v in data.items()},
        cv[keep], cd[keep],
    )


def conf(world: WorldTable, rel: URelation, group_by: Sequence[str]
         ) -> list[tuple[tuple, float]]:
    """Confidence aggregate: probability per group of data values.

    Exact only when the distinct condition sets inside a group are pairwise
    disjoint as events (they conflict on some variable) or identical;
    anything else raises, marking an instance outside the restricted case.
    """
    group_by = tuple(group_by)
    for c in group_by:
        if c not in rel.data:
            raise ValidationError(f"unknown attribute {c!r} in {rel.name!r}")
    groups: dict[tuple, list[int]] = {}
    for i in range(rel.n_rows):
        kv = tuple(_scalar(rel.data[c][i]) for c in group_by)
        groups.setdefault(kv, []).append(i)
    out = []
    for kv, idx in groups.items():
        arr = np.asarray(idx)
        combo = np.hstack([rel.cond_vars[arr], rel.cond_vals[arr]])
        uniq = np.unique(combo, axis=0)
        k = rel.n_cond_slots
        sets = []
        for row in uniq:
            assigns = tuple(
                (int(row[j]), int(row[k + j])) for j in range(k) if row[j] >= 0
            )
            sets.append(assigns)
        _check_disjoint(sets, rel.name, kv)
        p = 0.0
        for assigns in sets:
            q = 1.0
            for var, val in assigns:
                q *= world.marginal(var, val)
            p += q
        out.append((kv, p))
    return out


def _check_disjoint(sets: list[tuple[tuple[int, int], ...]], relname: str, group) -> None:
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            a = dict(sets[i])
            b = dict(sets[j])
            if not any(v in a and a[v] != val for v, val in b.items()):
                raise NonDisjointGroupError(
                    "condition sets overlap as events; exact confidence "
                    "is only defined for the disjoint/hierarchical case",
                    relation=relname, group=list(map(_scalar, group)),
                )


def world_probability(world: WorldTable, assignment: dict[str, int] | dict[int, int]) -> float:
    p = 1.0
    for var, val in assignment.items():
        vid = world.id_of(var) if isinstance(var, str) else var
        p *= world.marginal(vid, int(val))
    return p


def enumerate_worlds(world: WorldTable) -> list[tuple[dict[int, int], float]]:
    """All possible worlds with their probabilities.  Test oracle; guarded."""
    vids = world.variables()
    total = 1
    for v in vids:
        total *= world.marginals(v).size
        if total > 4096:
            raise StoreError("world enumeration guarded at 4096 worlds")
    worlds: list[tuple[dict[int, int], float]] = [({}, 1.0)]
    for v in vids:
        arr = world.marginals(v)
        worlds = [
            ({**assign, v: alt}, p * float(arr[alt - 1]))
            for assign, p in worlds
            for alt in range(1, arr.size + 1)
        ]
    return worlds


def _scalar(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x
