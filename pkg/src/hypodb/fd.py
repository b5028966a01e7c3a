"""Functional-dependency types and reasoning.

Implements the encoding of complete structures into fd sets, attribute
closure (with the linear-time unsatisfied-lhs counter optimization), the
attribute folding that back-substitutes every fd to its first causes while
ruling out cycles, merging of equivalent keys, normal-form and lossless-join
checks, and a guarded pseudo-transitive-closure brute force.

Attribute names are plain strings; ``phi`` and ``upsilon`` are the reserved
epistemological attributes (phenomenon id and hypothesis id).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .causal import CausalMapping
from .errors import (
    NoFdForAttributeError,
    SizeGuardError,
    ValidationError,
)
from .structure import Structure

PHI = "phi"
UPSILON = "upsilon"


@dataclass(frozen=True)
class FD:
    """One functional dependency lhs -> rhs.

    rhs is a set: singleton after encoding, possibly larger after merge.
    Fully trivial fds (rhs contained in lhs) are rejected outright; a merged
    fd may still carry a cycle partner on both sides.
    """

    lhs: frozenset[str]
    rhs: frozenset[str]

    def __post_init__(self):
        if not self.lhs:
            raise ValidationError("fd with empty lhs")
        if not self.rhs:
            raise ValidationError("fd with empty rhs")
        if self.rhs <= self.lhs:
            raise ValidationError(
                f"trivial fd rejected: {sorted(self.rhs)} determined by its own lhs"
            )

    @staticmethod
    def of(lhs: Iterable[str] | str, rhs: Iterable[str] | str) -> "FD":
        if isinstance(lhs, str):
            lhs = (lhs,)
        if isinstance(rhs, str):
            rhs = (rhs,)
        return FD(frozenset(lhs), frozenset(rhs))

    @property
    def rhs_attr(self) -> str:
        (a,) = self.rhs
        return a

    def __str__(self) -> str:
        return f"{' '.join(sorted(self.lhs))} -> {' '.join(sorted(self.rhs))}"


class _Compiled:
    """Integer CSR image of an fd set, shared by the kernels."""

    __slots__ = (
        "attrs", "attr_index", "lhs_indptr", "lhs_indices",
        "rhs_indptr", "rhs_indices", "occ_indptr", "occ_indices",
        "rhs_attr", "rhs_to_fd",
    )

    def __init__(self, attrs: list[str], lhs_indptr, lhs_indices, rhs_indptr, rhs_indices):
        self.attrs = attrs
        self.attr_index = {a: i for i, a in enumerate(attrs)}
        self.lhs_indptr = lhs_indptr
        self.lhs_indices = lhs_indices
        self.rhs_indptr = rhs_indptr
        self.rhs_indices = rhs_indices
        n_attrs = len(attrs)
        n_fds = len(lhs_indptr) - 1
        counts = np.bincount(lhs_indices, minlength=n_attrs) if len(lhs_indices) else np.zeros(n_attrs, np.int64)
        self.occ_indptr = np.zeros(n_attrs + 1, np.int64)
        np.cumsum(counts, out=self.occ_indptr[1:])
        if len(lhs_indices):
            fd_ids = np.repeat(np.arange(n_fds, dtype=np.int64), np.diff(lhs_indptr))
            order = np.argsort(lhs_indices, kind="stable")
            self.occ_indices = fd_ids[order]
        else:
            self.occ_indices = np.zeros(0, np.int64)
        # singleton-rhs extras, set lazily by folding_arrays
        self.rhs_attr = None
        self.rhs_to_fd = None

    @property
    def n_attrs(self) -> int:
        return len(self.attrs)

    @property
    def n_fds(self) -> int:
        return len(self.lhs_indptr) - 1

    def folding_arrays(self):
        if self.rhs_attr is None:
            if not np.all(np.diff(self.rhs_indptr) == 1):
                raise ValidationError("folding requires singleton-rhs fds")
            rhs_attr = self.rhs_indices.astype(np.int64)
            rhs_to_fd = np.full(self.n_attrs, -1, np.int64)
            for j in range(self.n_fds):
                a = rhs_attr[j]
                if rhs_to_fd[a] != -1:
                    raise ValidationError(
                        f"folding requires one fd per rhs attribute; "
                        f"{self.attrs[int(a)]!r} has several"
                    )
                rhs_to_fd[a] = j
            self.rhs_attr = rhs_attr
            self.rhs_to_fd = rhs_to_fd
        return (self.rhs_attr, self.lhs_indptr, self.lhs_indices,
                self.occ_indptr, self.occ_indices)


class FDSet:
    """An ordered set of fds over a universe of attributes.

    Treated as immutable: all operations return new sets.  The integer image
    used by the kernels is built lazily and cached; sets can equally be
    constructed straight from compiled arrays (the large-scale path), in
    which case the python-level fd tuples materialize only on demand.
    """

    def __init__(self, fds: Iterable[FD] = (), universe: Iterable[str] = ()):
        self._fds: tuple[FD, ...] | None = tuple(fds)
        seen: dict[str, None] = {}
        for fd in self._fds:
            for a in sorted(fd.lhs):
                seen.setdefault(a, None)
            for a in sorted(fd.rhs):
                seen.setdefault(a, None)
        for a in universe:
            seen.setdefault(a, None)
        self._universe = tuple(seen)
        self._compiled: _Compiled | None = None

    @classmethod
    def from_compiled(cls, attrs: list[str], lhs_indptr, lhs_indices, rhs_attr) -> "FDSet":
        self = cls.__new__(cls)
        self._fds = None
        self._universe = tuple(attrs)
        n_fds = len(rhs_attr)
        rhs_indptr = np.arange(n_fds + 1, dtype=np.int64)
        self._compiled = _Compiled(
            list(attrs), lhs_indptr, lhs_indices, rhs_indptr,
            np.asarray(rhs_attr, np.int64),
        )
        return self

    @property
    def fds(self) -> tuple[FD, ...]:
        if self._fds is None:
            c = self._compiled
            out = []
            for j in range(c.n_fds):
                lhs = frozenset(c.attrs[int(i)] for i in c.lhs_indices[c.lhs_indptr[j]:c.lhs_indptr[j + 1]])
                rhs = frozenset(c.attrs[int(i)] for i in c.rhs_indices[c.rhs_indptr[j]:c.rhs_indptr[j + 1]])
                out.append(FD(lhs, rhs))
            self._fds = tuple(out)
        return self._fds

    @property
    def universe(self) -> tuple[str, ...]:
        return self._universe

    def __len__(self) -> int:
        if self._fds is not None:
            return len(self._fds)
        return self._compiled.n_fds

    def __iter__(self):
        return iter(self.fds)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FDSet):
            return NotImplemented
        return set(self.fds) == set(other.fds)

    def __repr__(self) -> str:
        return f"FDSet({len(self)} fds over {len(self._universe)} attributes)"

    def compiled(self) -> _Compiled:
        if self._compiled is None:
            index = {a: i for i, a in enumerate(self._universe)}
            n_fds = len(self._fds)
            lhs_indptr = np.zeros(n_fds + 1, np.int64)
            rhs_indptr = np.zeros(n_fds + 1, np.int64)
            for j, fd in enumerate(self._fds):
                lhs_indptr[j + 1] = lhs_indptr[j] + len(fd.lhs)
                rhs_indptr[j + 1] = rhs_indptr[j] + len(fd.rhs)
            lhs_indices = np.empty(int(lhs_indptr[-1]), np.int64)
            rhs_indices = np.empty(int(rhs_indptr[-1]), np.int64)
            for j, fd in enumerate(self._fds):
                lhs_indices[lhs_indptr[j]:lhs_indptr[j + 1]] = sorted(index[a] for a in fd.lhs)
                rhs_indices[rhs_indptr[j]:rhs_indptr[j + 1]] = sorted(index[a] for a in fd.rhs)
            self._compiled = _Compiled(list(self._universe), lhs_indptr, lhs_indices,
                                       rhs_indptr, rhs_indices)
        return self._compiled

    # -- serialization ------------------------------------------------------

    def to_text(self) -> str:
        """Canonical text form: one ``lhs -> rhs`` per line, fully sorted."""
        return "\n".join(sorted(str(fd) for fd in self.fds))

    @classmethod
    def from_text(cls, text: str) -> "FDSet":
        fds = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "->" not in line:
                raise ValidationError(f"bad fd line: {line!r}")
            left, right = line.split("->", 1)
            fds.append(FD.of(left.split(), right.split()))
        return cls(fds)

    def singleton_decomposition(self) -> frozenset[tuple[frozenset[str], str]]:
        """R3-decomposed view for order-insensitive set comparison."""
        out = set()
        for fd in self.fds:
            for a in fd.rhs:
                if a not in fd.lhs:
                    out.add((fd.lhs, a))
        return frozenset(out)


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

def h_encode(structure: Structure, mapping: CausalMapping,
             domains: Iterable[str] | None = None) -> FDSet:
    """Encode a complete structure into a non-redundant, singleton-rhs fd set.

    For each mapped pair (f, x) with Z the other variables of f: an
    exogenous x (Z empty or all domain variables) yields ``Z phi -> x``
    unless x is itself a domain variable, which is suppressed; an endogenous
    x yields ``Z upsilon -> x``.
    """
    domains = frozenset(structure.domains if domains is None else domains)
    var_of = mapping.as_dict()
    fds: list[FD] = []
    for i, eq in enumerate(structure.equations):
        x = var_of[eq]
        z = structure.vars_of(i) - {x}
        if not z or z <= domains:
            if x not in domains:
                fds.append(FD.of(z | {PHI}, x))
        else:
            fds.append(FD.of(z | {UPSILON}, x))
    universe = list(structure.variables) + [PHI, UPSILON]
    return FDSet(fds, universe)


def h_encode_compiled(structure: Structure, mapping: CausalMapping) -> FDSet:
    """Array-level encoder used on large structures; same output as h_encode."""
    indptr, indices = structure.csr()
    var_index = {v: i for i, v in enumerate(structure.variables)}
    var_of = mapping.as_dict()
    match_l = np.array(
        [var_index[var_of[eq]] for eq in structure.equations], np.int64
    )
    n_vars = structure.n_variables
    domain_mask = np.zeros(n_vars, np.uint8)
    for d in structure.domains:
        if d in var_index:
            domain_mask[var_index[d]] = 1
    lhs_indptr, lhs_indices, rhs_attr = _kernels.encode_fds(
        indptr, indices, match_l, domain_mask, n_vars
    )
    attrs = list(structure.variables) + [PHI, UPSILON]
    return FDSet.from_compiled(attrs, lhs_indptr, lhs_indices, rhs_attr)


# ---------------------------------------------------------------------------
# Closure and implication
# ---------------------------------------------------------------------------

def x_closure(fdset: FDSet, attrs: Iterable[str]) -> frozenset[str]:
    """Attribute closure of ``attrs``; linear in total fd length."""
    c = fdset.compiled()
    known: list[int] = []
    extra: set[str] = set()
    for a in attrs:
        i = c.attr_index.get(a)
        if i is None:
            extra.add(a)
        else:
            known.append(i)
    seed = np.array(sorted(set(known)), np.int64)
    mask = _kernels.x_closure_mask(
        c.lhs_indptr, c.lhs_indices, c.rhs_indptr, c.rhs_indices,
        c.occ_indptr, c.occ_indices, c.n_attrs, seed,
    )
    return frozenset(c.attrs[i] for i in np.flatnonzero(mask)) | extra


def implies(fdset: FDSet, fd: FD | tuple[Iterable[str], Iterable[str]]) -> bool:
    """Membership of lhs -> rhs in the closure; a plain (lhs, rhs) pair is
    accepted so trivial dependencies (true by reflexivity) can be asked."""
    if isinstance(fd, FD):
        lhs, rhs = fd.lhs, fd.rhs
    else:
        lhs, rhs = (frozenset((x,)) if isinstance(x, str) else frozenset(x) for x in fd)
    return rhs <= x_closure(fdset, lhs)


# ---------------------------------------------------------------------------
# Folding
# ---------------------------------------------------------------------------

def a_folding(fdset: FDSet, attr: str) -> frozenset[str]:
    """The unique attribute folding of ``attr``: its fd back-substituted by
    pseudo-transitivity as far as possible, with cycle partners retained."""
    c = fdset.compiled()
    arrays = c.folding_arrays()
    target = c.attr_index.get(attr)
    if target is None or c.rhs_to_fd[target] < 0:
        raise NoFdForAttributeError(f"no fd determines attribute {attr!r}")
    mask = _kernels.a_folding_mask(*arrays, c.n_attrs, target)
    return frozenset(c.attrs[i] for i in np.flatnonzero(mask))


def folding(fdset: FDSet) -> FDSet:
    """Folding of the whole set: one folded fd per original rhs attribute."""
    c = fdset.compiled()
    arrays = c.folding_arrays()
    out_indptr, out_indices = _kernels.folding_all(*arrays, c.n_attrs)
    return FDSet.from_compiled(list(c.attrs), out_indptr, out_indices,
                               arrays[0].copy())


# ---------------------------------------------------------------------------
# Projections and merge
# ---------------------------------------------------------------------------

def upsilon_projection(fdset: FDSet) -> FDSet:
    return FDSet([fd for fd in fdset.fds if UPSILON in fd.lhs], fdset.universe)


def phi_projection(fdset: FDSet) -> FDSet:
    return FDSet([fd for fd in fdset.fds if UPSILON not in fd.lhs], fdset.universe)


def merge(fdset: FDSet) -> FDSet:
    """Merge fds whose left-hand sides are equivalent under the set's closure.

    Processes fds in insertion order and keeps the first lhs of an
    equivalence class; later members contribute their rhs plus their lhs
    surplus to the merged rhs (cycle partners migrate to the rhs block).
    """
    merged: list[FD] = []
    closures: dict[frozenset[str], frozenset[str]] = {}

    def closure_of(attrs: frozenset[str]) -> frozenset[str]:
        if attrs not in closures:
            closures[attrs] = x_closure(fdset, attrs)
        return closures[attrs]

    for fd in fdset.fds:
        hit = None
        for i, kept in enumerate(merged):
            if fd.lhs <= closure_of(kept.lhs) and kept.lhs <= closure_of(fd.lhs):
                hit = i
                break
        if hit is None:
            merged.append(fd)
        else:
            kept = merged[hit]
            surplus = fd.lhs - kept.lhs
            merged[hit] = FD(kept.lhs, kept.rhs | surplus | fd.rhs)
    return FDSet(merged, fdset.universe)


# ---------------------------------------------------------------------------
# Normal-form style checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckReport:
    ok: bool
    witness: FD | None = None
    reason: str = ""


def check_singleton_rhs(fdset: FDSet) -> CheckReport:
    for fd in fdset.fds:
        if len(fd.rhs) != 1:
            return CheckReport(False, fd, "rhs is not a singleton")
    return CheckReport(True)


def check_nonredundant(fdset: FDSet) -> CheckReport:
    fds = fdset.fds
    for i, fd in enumerate(fds):
        rest = FDSet([f for j, f in enumerate(fds) if j != i], fdset.universe)
        if fd.rhs <= x_closure(rest, fd.lhs):
            return CheckReport(False, fd, "fd derivable from the others")
    return CheckReport(True)


def check_left_reduced(fdset: FDSet) -> CheckReport:
    for fd in fdset.fds:
        for b in fd.lhs:
            if fd.rhs <= x_closure(fdset, fd.lhs - {b}):
                return CheckReport(False, fd, f"attribute {b!r} extraneous in lhs")
    return CheckReport(True)


def check_canonical(fdset: FDSet) -> CheckReport:
    for chk in (check_singleton_rhs, check_nonredundant, check_left_reduced):
        rep = chk(fdset)
        if not rep.ok:
            return rep
    return CheckReport(True)


def check_parsimonious(fdset: FDSet) -> CheckReport:
    rep = check_canonical(fdset)
    if not rep.ok:
        return rep
    seen: dict[str, FD] = {}
    for fd in fdset.fds:
        a = fd.rhs_attr
        if a in seen:
            return CheckReport(False, fd, f"second fd with rhs {a!r}")
        seen[a] = fd
    return CheckReport(True)


def fd_checks(fdset: FDSet) -> dict[str, CheckReport]:
    return {
        "singleton_rhs": check_singleton_rhs(fdset),
        "nonredundant": check_nonredundant(fdset),
        "left_reduced": check_left_reduced(fdset),
        "canonical": check_canonical(fdset),
        "parsimonious": check_parsimonious(fdset),
    }


# ---------------------------------------------------------------------------
# BCNF and lossless join
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BcnfViolation:
    scheme: tuple[str, ...]
    lhs: frozenset[str]
    gained: frozenset[str]


_BCNF_EXHAUSTIVE_LIMIT = 12


def bcnf_check(schemes: Sequence[Iterable[str]], fdset: FDSet) -> tuple[bool, list[BcnfViolation]]:
    """Per-scheme BCNF against the closure projected onto the scheme.

    Small schemes are tested over every proper attribute subset; wider ones
    fall back to lhs-derived candidates (exact subset testing is
    exponential), which covers every violation the given fds can induce.
    """
    violations: list[BcnfViolation] = []
    for scheme in schemes:
        attrs = tuple(dict.fromkeys(scheme))
        uset = frozenset(attrs)
        if len(attrs) <= _BCNF_EXHAUSTIVE_LIMIT:
            candidates = _all_proper_subsets(attrs)
        else:
            candidates = set()
            for fd in fdset.fds:
                for base in (fd.lhs, fd.lhs | fd.rhs):
                    cut = frozenset(base) & uset
                    if cut and cut != uset:
                        candidates.add(cut)
            candidates.update(frozenset({a}) for a in attrs)
        for x in candidates:
            closure = x_closure(fdset, x)
            gained = (closure & uset) - x
            if gained and not uset <= closure:
                violations.append(BcnfViolation(attrs, x, frozenset(gained)))
    return (not violations), violations


def _all_proper_subsets(attrs: tuple[str, ...]) -> set[frozenset[str]]:
    out: set[frozenset[str]] = set()
    n = len(attrs)
    for bits in range(1, (1 << n) - 1):
        out.add(frozenset(attrs[i] for i in range(n) if bits >> i & 1))
    return out


def lossless_check(columns: Sequence[str], rows: Iterable[Sequence],
                   projections: Sequence[Iterable[str]]) -> bool:
    """Instance-based lossless-join test.

    True iff the natural join of the projected instances equals the
    projection of the instance onto the union of the projected attributes.
    """
    col_index = {c: i for i, c in enumerate(columns)}
    projs = [tuple(dict.fromkeys(p)) for p in projections]
    for p in projs:
        for a in p:
            if a not in col_index:
                raise ValidationError(f"projection attribute {a!r} not in instance")
    rows = [tuple(r) for r in rows]

    def distinct(attrs: tuple[str, ...]) -> set[tuple]:
        idx = [col_index[a] for a in attrs]
        return {tuple(r[i] for i in idx) for r in rows}

    union_attrs = tuple(dict.fromkeys(a for p in projs for a in p))
    target = distinct(union_attrs)

    acc_attrs = projs[0]
    acc = distinct(projs[0])
    for p in projs[1:]:
        shared = tuple(a for a in p if a in acc_attrs)
        extra = tuple(a for a in p if a not in acc_attrs)
        right: dict[tuple, list[tuple]] = {}
        p_rows = distinct(p)
        sh_idx = [p.index(a) for a in shared]
        ex_idx = [p.index(a) for a in extra]
        for r in p_rows:
            right.setdefault(tuple(r[i] for i in sh_idx), []).append(tuple(r[i] for i in ex_idx))
        a_sh_idx = [acc_attrs.index(a) for a in shared]
        joined: set[tuple] = set()
        for r in acc:
            key = tuple(r[i] for i in a_sh_idx)
            for ext in right.get(key, ()):
                joined.add(r + ext)
        acc = joined
        acc_attrs = acc_attrs + extra

    reorder = [acc_attrs.index(a) for a in union_attrs]
    joined_view = {tuple(r[i] for i in reorder) for r in acc}
    return joined_view == target


# ---------------------------------------------------------------------------
# Pseudo-transitive closure (guarded brute force)
# ---------------------------------------------------------------------------

_PTC_GUARD = 10


def ptc_bruteforce(fdset: FDSet) -> FDSet:
    """Fixpoint of rule R5 over singleton-rhs fds; tiny universes only.

    Trivial derivations stay inside the fixpoint (they can enable further
    derivations through cycles) but are dropped from the returned set, which
    holds exactly the non-trivial derivable fds.
    """
    if len(fdset.universe) > _PTC_GUARD:
        raise SizeGuardError(
            f"pseudo-transitive closure guarded at {_PTC_GUARD} attributes",
            attributes=len(fdset.universe),
        )
    rep = check_singleton_rhs(fdset)
    if not rep.ok:
        raise ValidationError("ptc brute force requires singleton-rhs fds")
    current: set[tuple[frozenset[str], str]] = {
        (fd.lhs, fd.rhs_attr) for fd in fdset.fds
    }
    changed = True
    while changed:
        changed = False
        snapshot = list(current)
        for lhs1, a in snapshot:
            for lhs2, b in snapshot:
                if a in lhs2:
                    derived = (lhs1 | (lhs2 - {a}), b)
                    if derived[0] and derived not in current:
                        current.add(derived)
                        changed = True
    fds = [FD.of(lhs, rhs) for lhs, rhs in sorted(current, key=lambda t: (sorted(t[0]), t[1]))
           if rhs not in lhs]
    return FDSet(fds, fdset.universe)
