"""Hypothesis structure documents and the equation-variable incidence graph.

A structure document is the machine-readable form of a hypothesis: a JSON
object with an id, declared domain variables, optional constants, and a list
of named DSL equations.  Building a :class:`Structure` from a document adds
the bookkeeping a simulation grid implies: one equation owning each domain
variable plus exogenous ``<d>_min``, ``<d>_max``, ``<d>_delta`` parameters,
unless the document already defines them.

A :class:`Structure` can also be built directly from an explicit incidence
map (``{"f1": ["t"], ...}``), which bypasses the DSL and the grid parameters;
this is how externally prepared systems of equations are loaded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError
from .expr import equation_vars, parse_equation


@dataclass(frozen=True)
class StructureDoc:
    hypothesis_id: int
    domains: tuple[str, ...]
    constants: tuple[str, ...]
    equations: tuple[tuple[str, str], ...]  # (name, expr)
    incidence: tuple[tuple[str, tuple[str, ...]], ...] | None = None

    def to_json(self) -> str:
        obj: dict = {
            "hypothesis_id": self.hypothesis_id,
            "domains": list(self.domains),
            "constants": list(self.constants),
        }
        if self.incidence is not None:
            obj["incidence"] = {name: list(vs) for name, vs in self.incidence}
        else:
            obj["equations"] = [{"name": n, "expr": e} for n, e in self.equations]
        return json.dumps(obj, indent=2)


def parse_structure(doc_text: str) -> StructureDoc:
    """Parse and validate a structure document; expressions are not evaluated."""
    try:
        obj = json.loads(doc_text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(obj, dict):
        raise ParseError("structure document must be a JSON object")
    try:
        hypothesis_id = int(obj["hypothesis_id"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("missing or non-integer 'hypothesis_id'") from None
    domains = tuple(obj.get("domains", []))
    constants = tuple(obj.get("constants", []))
    if len(set(domains)) != len(domains):
        raise ParseError("duplicate domain declaration")
    if set(domains) & set(constants):
        raise ParseError("unknown domain reference: a domain cannot also be a constant")

    if "incidence" in obj:
        inc = obj["incidence"]
        if not isinstance(inc, dict) or not inc:
            raise ParseError("at least one equation required in 'incidence'")
        incidence = tuple((str(name), tuple(str(v) for v in vs)) for name, vs in inc.items())
        for name, vs in incidence:
            if not vs:
                raise ParseError(f"equation {name!r} has no variables")
        return StructureDoc(hypothesis_id, domains, constants, (), incidence)

    eqs = obj.get("equations", [])
    if not eqs:
        raise ParseError("at least one equation required")
    names: list[str] = []
    equations: list[tuple[str, str]] = []
    for i, eq in enumerate(eqs):
        if not isinstance(eq, dict) or "name" not in eq or "expr" not in eq:
            raise ParseError(f"equation #{i + 1} must have 'name' and 'expr'")
        name, expr = str(eq["name"]), str(eq["expr"])
        if name in names:
            raise ParseError(f"duplicate equation name {name!r}")
        names.append(name)
        try:
            parsed = parse_equation(expr)
        except ParseError as exc:
            raise ParseError(
                f"equation {name!r}: {exc.message}", line=i + 1, column=exc.column
            ) from exc
        if parsed.is_differential and not domains:
            raise ParseError(
                f"equation {name!r}: unknown domain reference (differential form "
                "requires a declared domain)", line=i + 1,
            )
        equations.append((name, expr))
    return StructureDoc(hypothesis_id, domains, constants, tuple(equations))


@dataclass
class Structure:
    """Equation-variable incidence of a system of equations.

    ``incidence[i]`` lists variable indices of equation i.  The first entry
    is the equation's declared target when the structure came from a
    document, which seeds the matching deterministically.
    """

    equations: list[str]
    variables: list[str]
    incidence: list[list[int]]
    domains: frozenset[str] = field(default_factory=frozenset)
    _csr: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        index = {v: i for i, v in enumerate(self.variables)}
        if len(index) != len(self.variables):
            raise ValidationError("duplicate variable names")
        if len(set(self.equations)) != len(self.equations):
            raise ValidationError("duplicate equation names")
        for row in self.incidence:
            if len(row) == 0:
                raise ValidationError("equation with empty variable set")

    @property
    def n_equations(self) -> int:
        return len(self.equations)

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def length(self) -> int:
        """Total variable occurrences across equations."""
        return sum(len(row) for row in self.incidence)

    def vars_of(self, eq_index: int) -> frozenset[str]:
        return frozenset(self.variables[v] for v in self.incidence[eq_index])

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        if self._csr is None:
            indptr = np.zeros(len(self.incidence) + 1, np.int64)
            for i, row in enumerate(self.incidence):
                indptr[i + 1] = indptr[i] + len(row)
            indices = np.empty(int(indptr[-1]), np.int64)
            pos = 0
            for row in self.incidence:
                for v in row:
                    indices[pos] = v
                    pos += 1
            self._csr = (indptr, indices)
        return self._csr

    @classmethod
    def from_vars(cls, eq_vars: dict[str, list[str] | tuple[str, ...]],
                  domains: frozenset[str] = frozenset()) -> "Structure":
        """Build from an equation -> variable-name list map (order preserved)."""
        equations = list(eq_vars)
        variables: list[str] = []
        index: dict[str, int] = {}
        incidence: list[list[int]] = []
        for name in equations:
            row: list[int] = []
            seen: set[str] = set()
            for v in eq_vars[name]:
                if v in seen:
                    continue
                seen.add(v)
                if v not in index:
                    index[v] = len(variables)
                    variables.append(v)
                row.append(index[v])
            incidence.append(row)
        return cls(equations, variables, incidence, domains)


def grid_parameters(domain: str) -> tuple[str, str, str]:
    return f"{domain}_min", f"{domain}_max", f"{domain}_delta"


def build_structure(doc: StructureDoc) -> Structure:
    """Expand a document into the full incidence the encoder consumes.

    DSL documents get, per declared domain ``d``: an equation owning ``d``
    itself and setter equations for ``d_min``, ``d_max``, ``d_delta``
    (skipped for any the user already defines).  Incidence documents are
    taken verbatim.
    """
    if doc.incidence is not None:
        return Structure.from_vars(dict(doc.incidence), frozenset(doc.domains))

    eq_vars: dict[str, tuple[str, ...]] = {}
    targets: set[str] = set()
    for name, expr in doc.equations:
        parsed = parse_equation(expr)
        vs = equation_vars(expr, doc.domains, doc.constants)
        targets.add(parsed.target)
        if parsed.is_differential:
            ordered = (parsed.target,) + tuple(sorted(vs))
        else:
            ordered = (parsed.target,) + tuple(sorted(vs - {parsed.target}))
        eq_vars[name] = ordered

    for d in doc.domains:
        if d in doc.constants:
            raise ValidationError(f"domain {d!r} declared constant")
        if d not in targets:
            eq_vars[f"__{d}"] = (d,)
        for p in grid_parameters(d):
            if p not in targets:
                eq_vars[f"__{p}"] = (p,)
    return Structure.from_vars(eq_vars, frozenset(doc.domains))
