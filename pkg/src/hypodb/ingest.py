"""Trial and observation ingestion: manifests, the denormalized fact table
per hypothesis, and phenomenon observation series.

Trial CSVs arrive with one column per symbol; a manifest maps hypothesis
symbols onto phenomenon symbols (and may alias spellings, e.g. ``x_0`` for
``x__t_min``).  Rows are stamped with (tid, phi, upsilon) on load.  Domain
grid parameters (``<d>_min``/``<d>_max``/``<d>_delta``) absent from the CSV
are derived from the domain column itself.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DuplicateError, ParseError, ValidationError
from .structure import Structure, grid_parameters


@dataclass(frozen=True)
class TrialManifest:
    phenomenon_id: int
    hypothesis_id: int
    trial_id: int
    mappings: tuple[tuple[str, str], ...] = ()  # hypothesis symbol -> phenomenon symbol
    data_path: str | None = None

    @classmethod
    def from_json(cls, text: str) -> "TrialManifest":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid manifest JSON: {exc.msg}",
                             line=exc.lineno, column=exc.colno) from exc
        try:
            return cls(
                phenomenon_id=int(obj["phenomenon_id"]),
                hypothesis_id=int(obj["hypothesis_id"]),
                trial_id=int(obj["trial_id"]),
                mappings=tuple((str(k), str(v)) for k, v in obj.get("mappings", {}).items()),
                data_path=obj.get("data_path"),
            )
        except (KeyError, TypeError, ValueError):
            raise ParseError("manifest requires integer phenomenon_id, "
                             "hypothesis_id and trial_id") from None

    def mapping_dict(self) -> dict[str, str]:
        d = dict(self.mappings)
        if len(d) != len(self.mappings):
            raise ValidationError("duplicate mapping source symbol")
        if len(set(d.values())) != len(d):
            raise ValidationError(
                "many-to-one symbol mappings are rejected: two hypothesis "
                "symbols map to one phenomenon symbol"
            )
        return d


class BigFactTable:
    """Denormalized trial data of one hypothesis: (tid, phi, upsilon, domain
    coordinates, parameters, predictions), no nulls, keyed by
    (tid, phi, upsilon, domains)."""

    def __init__(self, hypothesis_id: int, variables: list[str], domains: list[str]):
        self.hypothesis_id = hypothesis_id
        ordered = list(domains) + [v for v in variables if v not in domains]
        self.columns: tuple[str, ...] = ("tid", "phi", "upsilon", *ordered)
        self.var_columns: tuple[str, ...] = tuple(ordered)
        self.domains: tuple[str, ...] = tuple(domains)
        self._chunks: list[dict[str, np.ndarray]] = []
        self._data: dict[str, np.ndarray] | None = None
        self.trials: list[tuple[int, int]] = []  # (phi, tid) in load order

    @property
    def n_rows(self) -> int:
        return len(self.data["tid"])

    @property
    def data(self) -> dict[str, np.ndarray]:
        if self._data is None:
            if not self._chunks:
                self._data = {
                    c: np.zeros(0, np.int64 if c in ("tid", "phi", "upsilon") else np.float64)
                    for c in self.columns
                }
            else:
                self._data = {
                    c: np.concatenate([ch[c] for ch in self._chunks])
                    for c in self.columns
                }
        return self._data

    def append(self, chunk: dict[str, np.ndarray], phi: int, tid: int) -> None:
        if (phi, tid) in self.trials:
            raise DuplicateError(
                f"trial (phi={phi}, upsilon={self.hypothesis_id}, tid={tid}) already loaded"
            )
        self._chunks.append(chunk)
        self._data = None
        self.trials.append((phi, tid))

    def trial_rows(self, phi: int, tid: int) -> np.ndarray:
        d = self.data
        return np.flatnonzero((d["phi"] == phi) & (d["tid"] == tid))

    def row_tuples(self) -> list[tuple]:
        d = self.data
        cols = [d[c] for c in self.columns]
        return [tuple(col[i] for col in cols) for i in range(self.n_rows)]


def load_trial_csv(structure: Structure, manifest: TrialManifest, csv_text: str | io.TextIOBase,
                   ) -> dict[str, np.ndarray]:
    """Parse one trial CSV into fact-table columns (not yet appended).

    The header is renamed through the inverse symbol mapping, grid parameters
    are filled in from the domain column when missing, and every cell must be
    numeric.
    """
    if isinstance(csv_text, str):
        csv_text = io.StringIO(csv_text)
    try:
        df = pd.read_csv(csv_text, skipinitialspace=True)
    except Exception as exc:
        raise ParseError(f"cannot read trial CSV: {exc}") from exc
    if df.empty:
        raise ValidationError("trial CSV has no data rows")
    inverse = {phen: hyp for hyp, phen in manifest.mapping_dict().items()}
    df = df.rename(columns=lambda c: inverse.get(c.strip(), c.strip()))
    unknown_sources = [h for h in dict(manifest.mappings) if h not in structure.variables]
    if unknown_sources:
        raise ValidationError(
            f"mapping source(s) {unknown_sources} are not hypothesis variables"
        )

    present = set(df.columns)
    needed = list(structure.variables)
    derivable: dict[str, float] = {}
    for d in structure.domains:
        if d not in present:
            raise ValidationError(f"missing column: {d!r} (domain)")
        coords = pd.to_numeric(df[d], errors="coerce").to_numpy(np.float64)
        d_min, d_max, d_delta = grid_parameters(d)
        uniq = np.unique(coords)
        if d_min in needed and d_min not in present:
            derivable[d_min] = float(uniq.min())
        if d_max in needed and d_max not in present:
            derivable[d_max] = float(uniq.max())
        if d_delta in needed and d_delta not in present:
            derivable[d_delta] = float(uniq[1] - uniq[0]) if uniq.size > 1 else 0.0

    missing = [v for v in needed if v not in present and v not in derivable]
    if missing:
        raise ValidationError(f"missing column(s): {sorted(missing)}")

    n = len(df)
    out: dict[str, np.ndarray] = {
        "tid": np.full(n, manifest.trial_id, np.int64),
        "phi": np.full(n, manifest.phenomenon_id, np.int64),
        "upsilon": np.full(n, manifest.hypothesis_id, np.int64),
    }
    for v in needed:
        if v in derivable:
            out[v] = np.full(n, derivable[v], np.float64)
            continue
        col = pd.to_numeric(df[v], errors="coerce").to_numpy(np.float64)
        bad = np.flatnonzero(np.isnan(col) & ~df[v].isna().to_numpy())
        if df[v].isna().any() or bad.size:
            row = int(df[v].isna().to_numpy().argmax() if df[v].isna().any() else bad[0])
            raise ValidationError(
                f"non-numeric or empty cell in column {v!r} at data row {row + 1}"
            )
        out[v] = col
    return out


@dataclass
class ObservationSet:
    """Observed series of a phenomenon: strictly increasing coordinates of
    the primary domain plus one numeric series per observed symbol."""

    phenomenon_id: int
    coordinate_name: str
    coordinates: np.ndarray
    values: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        diffs = np.diff(self.coordinates)
        if np.any(diffs <= 0):
            pos = int(np.flatnonzero(diffs <= 0)[0]) + 1
            raise ValidationError(
                f"observation coordinates must be strictly increasing "
                f"(violated at row {pos + 1})"
            )
        for sym, series in self.values.items():
            if len(series) != len(self.coordinates):
                raise ValidationError(f"series {sym!r} length mismatch")

    @property
    def n_points(self) -> int:
        return len(self.coordinates)

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(self.values)


def load_observations_csv(phenomenon_id: int, csv_text: str | io.TextIOBase) -> ObservationSet:
    """First column is the primary domain coordinate; the rest are symbols."""
    if isinstance(csv_text, str):
        csv_text = io.StringIO(csv_text)
    try:
        df = pd.read_csv(csv_text, skipinitialspace=True)
    except Exception as exc:
        raise ParseError(f"cannot read observation CSV: {exc}") from exc
    if df.empty or len(df.columns) < 2:
        raise ValidationError("observation CSV needs a coordinate column, at "
                              "least one symbol column and one data row")
    coord_name = str(df.columns[0]).strip()
    coords = pd.to_numeric(df.iloc[:, 0], errors="coerce").to_numpy(np.float64)
    if np.isnan(coords).any():
        raise ValidationError("non-numeric coordinate cell")
    values = {}
    for c in df.columns[1:]:
        series = pd.to_numeric(df[c], errors="coerce").to_numpy(np.float64)
        if np.isnan(series).any():
            raise ValidationError(f"non-numeric cell in series {c!r}")
        values[str(c).strip()] = series
    return ObservationSet(phenomenon_id, coord_name, coords, values)


def canonical_value(x: float) -> str:
    """Canonical decimal key for parameter identity (exact, no epsilon)."""
    return repr(float(x))
