"""The research store: registry of phenomena, hypotheses, trials and
observations, the explanation table, the world table, and every synthesized
U-relation, with directory persistence.

Mutations are serialized through a single writer lock; reads work on the
immutable snapshots the operations produce.  Persistence layout:

    <dir>/registry.json      ids, documents, manifests, synthesis metadata
    <dir>/world.json         random-variable marginals
    <dir>/relations/<name>.csv   one file per relation; condition columns
                                 serialized as leading ``x3=2`` token columns
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .causal import CausalMapping, tcm
from .conditioning import (
    PosteriorTable,
    TrialPrediction,
    condition_predictions,
    sample_log_likelihood,
)
from .errors import (
    ConditioningError,
    DuplicateError,
    StoreError,
    UnknownIdError,
    ValidationError,
)
from .fd import FDSet, h_encode, lossless_check, bcnf_check
from .ingest import (
    BigFactTable,
    ObservationSet,
    TrialManifest,
    load_observations_csv,
    load_trial_csv,
)
from .structure import Structure, StructureDoc, build_structure, parse_structure
from .synthesis import SynthesisResult, synthesize
from .urel import URelation, WorldTable, conf, ra_select, repair_key

FORMAT_VERSION = 1


@dataclass
class Hypothesis:
    hypothesis_id: int
    name: str
    doc: StructureDoc
    structure: Structure


@dataclass
class QuerySpec:
    projection: str
    filters: list[tuple[str, str, float]]
    order: list[str]
    group: list[str]
    aggregate: str = "none"  # none | conf
    columns: list[str] | None = None


class Store:
    def __init__(self):
        self.phenomena: dict[int, str] = {}
        self.observations: dict[int, ObservationSet] = {}
        self.hypotheses: dict[int, Hypothesis] = {}
        self.explanations: dict[tuple[int, int], float] = {}
        self.fact_tables: dict[int, BigFactTable] = {}
        self.manifests: dict[tuple[int, int, int], TrialManifest] = {}
        self.world = WorldTable()
        self.relations: dict[str, URelation] = {}
        self.y0_map: dict[int, tuple[int, list[int]]] = {}
        self.synthesis: dict[int, SynthesisResult] = {}
        self.posteriors: dict[int, PosteriorTable] = {}
        self._y0_stamp: tuple | None = None
        self._lock = threading.RLock()

    # ------------------------------------------------------------------ ETL

    def add_phenomenon(self, phi: int, description: str = "") -> None:
        with self._lock:
            self.phenomena[int(phi)] = description

    def add_hypothesis(self, doc: StructureDoc | str, name: str = "") -> Hypothesis:
        with self._lock:
            if isinstance(doc, str):
                doc = parse_structure(doc)
            structure = build_structure(doc)
            hyp = Hypothesis(doc.hypothesis_id, name, doc, structure)
            self.hypotheses[doc.hypothesis_id] = hyp
            return hyp

    def record_explanation(self, phi: int, upsilon: int, weight: float) -> None:
        with self._lock:
            if weight <= 0:
                raise ValidationError(f"explanation weight must be positive, got {weight}")
            if phi not in self.phenomena:
                raise UnknownIdError(f"unknown phenomenon {phi}")
            if upsilon not in self.hypotheses:
                raise UnknownIdError(f"unknown hypothesis {upsilon}")
            self.explanations[(int(phi), int(upsilon))] = float(weight)
            if self.synthesis and tuple(self.explanation_rows()) != self._y0_stamp:
                # the explanation variable's alternatives or weights changed:
                # everything built over the old distribution is stale
                for vid, _ in self.y0_map.values():
                    self.world.drop(vid)
                self._invalidate_synthesis()
                self.y0_map = {}
                self._y0_stamp = None
                self.relations.pop("Y0", None)

    def load_trial(self, manifest: TrialManifest, csv_text: str) -> int:
        with self._lock:
            ups = manifest.hypothesis_id
            if ups not in self.hypotheses:
                raise UnknownIdError(f"unknown hypothesis {ups}")
            if manifest.phenomenon_id not in self.phenomena:
                raise UnknownIdError(f"unknown phenomenon {manifest.phenomenon_id}")
            key = (manifest.phenomenon_id, ups, manifest.trial_id)
            if key in self.manifests:
                raise DuplicateError(
                    f"trial (phi={key[0]}, upsilon={key[1]}, tid={key[2]}) already loaded"
                )
            hyp = self.hypotheses[ups]
            chunk = load_trial_csv(hyp.structure, manifest, csv_text)
            table = self.fact_tables.get(ups)
            if table is None:
                doc_domains = list(hyp.doc.domains)
                table = BigFactTable(ups, list(hyp.structure.variables), doc_domains)
                self.fact_tables[ups] = table
            table.append(chunk, manifest.phenomenon_id, manifest.trial_id)
            self.manifests[key] = manifest
            self.relations[f"H{ups}"] = URelation(f"H{ups}", table.columns, table.data)
            if ups in self.synthesis:
                # no incremental re-synthesis: a new trial invalidates the
                # hypothesis's projections and any posterior built over them
                self._drop_hypothesis_artifacts(ups)
                for phi_val in {p for p, _ in table.trials}:
                    self.posteriors.pop(phi_val, None)
            return int(chunk["tid"].shape[0])

    def load_observations(self, phi: int, csv_text: str) -> ObservationSet:
        with self._lock:
            if phi not in self.phenomena:
                raise UnknownIdError(f"unknown phenomenon {phi}")
            obs = load_observations_csv(phi, csv_text)
            self.observations[phi] = obs
            return obs

    # ------------------------------------------------------------ encoding

    def encode(self, upsilon: int) -> FDSet:
        hyp = self._hypothesis(upsilon)
        return h_encode(hyp.structure, tcm(hyp.structure))

    def _hypothesis(self, upsilon: int) -> Hypothesis:
        if upsilon not in self.hypotheses:
            raise UnknownIdError(f"unknown hypothesis {upsilon}")
        return self.hypotheses[upsilon]

    # ----------------------------------------------------------- synthesis

    def explanation_rows(self) -> list[tuple[int, int, float]]:
        return [(p, u, w) for (p, u), w in self.explanations.items()]

    def build_y0(self) -> URelation:
        """Repair phi as a key of the explanation table, weighted by Conf.

        Rebuilding invalidates previous synthesis results: the explanation
        variable's alternatives changed, so re-synthesis is required.
        """
        with self._lock:
            rows = self.explanation_rows()
            if not rows:
                raise StoreError("no explanations recorded")
            stamp = tuple(rows)
            if stamp == self._y0_stamp and "Y0" in self.relations:
                return self.relations["Y0"]
            for phi, (vid, _) in self.y0_map.items():
                self.world.drop(vid)
            self._invalidate_synthesis()
            h0 = URelation.from_rows(
                "H0", ("phi", "upsilon", "conf"),
                [(p, u, w) for p, u, w in rows],
            )
            y0, var_map = repair_key(self.world, h0, ["phi"], "conf", "Y0")
            self.relations["Y0"] = y0
            self.y0_map = {
                int(kv[0]): (vid, [rows[i][1] for i in order])
                for kv, (vid, order) in var_map.items()
            }
            self._y0_stamp = stamp
            return y0

    def _invalidate_synthesis(self) -> None:
        for ups, synth in list(self.synthesis.items()):
            for name in synth.factor_names + synth.claim_names:
                self.relations.pop(name, None)
            for theta in synth.trial_worlds.values():
                for vid in theta:
                    if not any(vid == y for y, _ in self.y0_map.values()):
                        self.world.drop(vid)
        self.synthesis.clear()
        self.posteriors.clear()

    def synthesize_hypothesis(self, upsilon: int) -> SynthesisResult:
        with self._lock:
            hyp = self._hypothesis(upsilon)
            table = self.fact_tables.get(upsilon)
            if table is None or table.n_rows == 0:
                raise StoreError(f"hypothesis {upsilon} has no loaded trials")
            y0 = self.build_y0()
            if upsilon in self.synthesis:
                self._drop_hypothesis_artifacts(upsilon)
                # the empirical distribution is rebuilt from trial data, so
                # posteriors computed over the old projections are stale
                for phi_val in {p for p, _ in table.trials}:
                    self.posteriors.pop(phi_val, None)
            result, rels = synthesize(
                hyp.structure, table, y0, self.y0_map, self.world, upsilon
            )
            for rel in rels:
                self.relations[rel.name] = rel
            self.synthesis[upsilon] = result
            return result

    def _drop_hypothesis_artifacts(self, upsilon: int) -> None:
        synth = self.synthesis.pop(upsilon, None)
        if synth is None:
            return
        y0_vids = {vid for vid, _ in self.y0_map.values()}
        dropped: set[int] = set()
        for theta in synth.trial_worlds.values():
            for vid in theta:
                if vid not in y0_vids:
                    dropped.add(vid)
        for vid in dropped:
            self.world.drop(vid)
        for name in synth.factor_names + synth.claim_names:
            self.relations.pop(name, None)

    # ---------------------------------------------------------- analytics

    def explaining(self, phi: int) -> list[int]:
        return [u for (p, u) in self.explanations if p == phi]

    def _resolve_symbol(self, phi: int, upsilon: int, symbol: str) -> str:
        """Map a phenomenon symbol back to this hypothesis's variable."""
        for (p, u, _), manifest in self.manifests.items():
            if p == phi and u == upsilon:
                for hyp_sym, phen_sym in manifest.mappings:
                    if phen_sym == symbol:
                        return hyp_sym
        if symbol in self.hypotheses[upsilon].structure.variables:
            return symbol
        raise UnknownIdError(
            f"symbol {symbol!r} is not mapped for hypothesis {upsilon} at phenomenon {phi}"
        )

    def _claim_for(self, upsilon: int, hyp_sym: str) -> URelation:
        synth = self.synthesis.get(upsilon)
        if synth is None:
            raise StoreError(f"hypothesis {upsilon} is not synthesized")
        for name, fd in zip(synth.claim_names, synth.claim_fds):
            if hyp_sym in fd.rhs:
                return self.relations[name]
        for name in synth.claim_names:
            if hyp_sym in self.relations[name].columns:
                return self.relations[name]
        raise UnknownIdError(
            f"no predictive projection of hypothesis {upsilon} carries {hyp_sym!r}"
        )

    def _world_probability_of(self, synth: SynthesisResult, phi: int, tid: int) -> float:
        if (phi, tid) in synth.dead_trials:
            return 0.0
        p = 1.0
        for vid, alt in synth.trial_worlds[(phi, tid)].items():
            try:
                p *= self.world.marginal(vid, alt)
            except UnknownIdError:
                return 0.0  # variable dropped: measure-zero world
        return p

    def _theta_mask(self, rel: URelation, theta: dict[int, int]) -> np.ndarray:
        lookup = np.full(self.world.capacity + 1, -1, np.int32)
        for vid, alt in theta.items():
            lookup[vid] = alt
        cv, cd = rel.cond_vars, rel.cond_vals
        ok = np.ones(rel.n_rows, bool)
        for j in range(rel.n_cond_slots):
            var = cv[:, j]
            filled = var >= 0
            ok &= ~filled | (lookup[np.where(filled, var, 0)] == cd[:, j]) & filled
        return ok

    def _gather_predictions(self, phi: int, symbol: str) -> list[TrialPrediction]:
        if phi not in self.phenomena:
            raise UnknownIdError(f"unknown phenomenon {phi}")
        upsilons = self.explaining(phi)
        if not upsilons:
            raise StoreError(f"no hypotheses explain phenomenon {phi}")
        predictions: list[TrialPrediction] = []
        for ups in upsilons:
            synth = self.synthesis.get(ups)
            if synth is None:
                raise StoreError(
                    f"hypothesis {ups} explains phenomenon {phi} but is not synthesized"
                )
            table = self.fact_tables[ups]
            hyp_sym = self._resolve_symbol(phi, ups, symbol)
            rel = self._claim_for(ups, hyp_sym)
            doc_domains = self.hypotheses[ups].doc.domains
            domain_col = next((d for d in doc_domains if d in rel.columns), None)
            if domain_col is None:
                raise ConditioningError(
                    f"projection {rel.name!r} carries no domain coordinate"
                )
            seen_thetas: set[tuple] = set()
            for p, tid in table.trials:
                if p != phi:
                    continue
                if (phi, tid) in synth.dead_trials:
                    continue  # zero posterior mass after earlier conditioning
                theta = synth.trial_worlds[(phi, tid)]
                key = tuple(sorted(theta.items()))
                if key in seen_thetas:
                    continue  # duplicate-parameter trial: same world
                seen_thetas.add(key)
                prior = 1.0
                for vid, alt in theta.items():
                    prior *= self.world.marginal(vid, alt)
                if prior == 0.0:
                    continue  # world already ruled out by earlier conditioning
                mask = self._theta_mask(rel, theta) & (rel.data["phi"] == phi)
                idx = np.flatnonzero(mask)
                predictions.append(TrialPrediction(
                    phi, ups, tid, prior,
                    rel.data[domain_col][idx], rel.data[hyp_sym][idx],
                ))
        predictions.sort(key=lambda t: (t.upsilon, t.tid))
        return predictions

    def condition(self, phi: int, symbol: str, sigma: float,
                  intersect: bool = False) -> PosteriorTable:
        """Condition the distribution at phenomenon phi on its observations of
        ``symbol``; updates the world table so conf() reflects the posteriors."""
        with self._lock:
            obs = self.observations.get(phi)
            if obs is None:
                raise StoreError(f"no observations loaded for phenomenon {phi}")
            if symbol not in obs.values:
                raise UnknownIdError(
                    f"phenomenon {phi} observations carry no symbol {symbol!r}"
                )
            predictions = self._gather_predictions(phi, symbol)
            if not predictions:
                raise StoreError(f"no trials loaded for phenomenon {phi}")
            table = condition_predictions(
                predictions, obs.coordinates, obs.values[symbol], sigma, intersect
            )
            table.symbol = symbol
            self._apply_posterior(phi, predictions, table, sigma, intersect, obs, symbol)
            self.posteriors[phi] = table
            return table

    def _apply_posterior(self, phi: int, predictions: list[TrialPrediction],
                         table: PosteriorTable, sigma: float, intersect: bool,
                         obs: ObservationSet, symbol: str) -> None:
        """Fold the posterior back into the world table.

        The joint posterior does not factor over the original independent
        u-factor variables, so per hypothesis they are replaced by one
        composite trial variable whose alternatives are the trials.
        """
        y0_vid, y0_ups = self.y0_map[phi]
        by_trial = table.by_trial()
        logls = {
            (p.upsilon, p.tid): sample_log_likelihood(
                obs.coordinates, obs.values[symbol], p.coords, p.values,
                sigma, intersect)
            for p in predictions
        }
        y0_marginals = list(self.world.marginals(y0_vid))
        for ups in self.explaining(phi):
            synth = self.synthesis[ups]
            trials = [(p, t) for (p, t) in self.fact_tables[ups].trials if p == phi]
            covered = [(p, t) for (p, t) in trials if (ups, t) in by_trial]
            if not covered:
                continue
            post_sum = sum(by_trial[(ups, t)].posterior for _, t in covered)
            logw = np.array(
                [logls[(ups, t)] + np.log(by_trial[(ups, t)].prior) for _, t in covered]
            )
            w = np.exp(logw - logw.max())
            # alternatives that underflow to exactly zero cannot live on a
            # random variable (marginals are strictly positive); those trials
            # become dead worlds and their rows are purged below
            live = [pt for pt, wi in zip(covered, w) if wi > 0.0]
            synth.dead_trials.update(pt for pt, wi in zip(covered, w) if wi == 0.0)
            w = w[w > 0.0]
            comp_marginals = w / w.sum()
            comp_vid = self.world.new_variable(list(comp_marginals))
            old_vids: set[int] = set()
            for p, t in covered:
                old_vids.update(v for v in synth.trial_worlds[(phi, t)] if v != y0_vid)
            new_thetas: dict[tuple[int, int], dict[int, int]] = {}
            for alt, (p, t) in enumerate(live, start=1):
                old = synth.trial_worlds[(phi, t)]
                new_thetas[(phi, t)] = {y0_vid: old[y0_vid], comp_vid: alt}
            self._rewrite_conditions(synth, phi, new_thetas)
            for (p, t), theta in new_thetas.items():
                synth.trial_worlds[(p, t)] = theta
            for vid in old_vids:
                self.world.drop(vid)
            y0_marginals[y0_ups.index(ups)] = post_sum
        self.world.replace_marginals(y0_vid, y0_marginals)

    def _rewrite_conditions(self, synth: SynthesisResult, phi: int,
                            new_thetas: dict[tuple[int, int], dict[int, int]]) -> None:
        old_thetas = {key: dict(synth.trial_worlds[key]) for key in new_thetas}
        for name in synth.claim_names + synth.factor_names:
            rel = self.relations.get(name)
            if rel is None:
                continue
            phi_rows = rel.data["phi"] == phi if "phi" in rel.data else np.ones(rel.n_rows, bool)
            # a claim row matches exactly one trial's world; a u-factor row
            # matches every trial picking its alternative and is duplicated
            # per trial so conf() sums the right composite marginals; rows of
            # this phenomenon matching no live world carry zero mass and are
            # purged (their variables are about to be dropped)
            pieces_idx: list[np.ndarray] = []
            pieces_conds: list[tuple[np.ndarray, np.ndarray]] = []
            for key, new_theta in new_thetas.items():
                mask = self._theta_mask(rel, old_thetas[key]) & phi_rows
                idx = np.flatnonzero(mask)
                if idx.size == 0:
                    continue
                assigns = sorted(new_theta.items())
                cv = np.full((idx.size, len(assigns)), -1, np.int32)
                cd = np.full((idx.size, len(assigns)), -1, np.int32)
                for j, (vid, alt) in enumerate(assigns):
                    cv[:, j] = vid
                    cd[:, j] = alt
                pieces_idx.append(idx)
                pieces_conds.append((cv, cd))
            rest = np.flatnonzero(~phi_rows)
            pieces_idx.append(rest)
            pieces_conds.append((rel.cond_vars[rest], rel.cond_vals[rest]))
            k = max(c[0].shape[1] for c in pieces_conds)
            all_idx = np.concatenate(pieces_idx)
            cv = np.full((all_idx.size, k), -1, np.int32)
            cd = np.full((all_idx.size, k), -1, np.int32)
            pos = 0
            for (pcv, pcd) in pieces_conds:
                n = pcv.shape[0]
                cv[pos:pos + n, :pcv.shape[1]] = pcv
                cd[pos:pos + n, :pcv.shape[1]] = pcd
                pos += n
            order = np.argsort(all_idx, kind="stable")
            self.relations[name] = URelation(
                rel.name, rel.columns,
                {c: rel.data[c][all_idx[order]] for c in rel.columns},
                cv[order], cd[order],
            )

    def rank(self, phi: int, at: tuple[str, float] | None = None,
             symbol: str | None = None) -> list[dict]:
        """Ranked table (phi, upsilon, tid, value, prior, posterior); falls
        back to prior order when no conditioning has happened."""
        if phi not in self.phenomena:
            raise UnknownIdError(f"unknown phenomenon {phi}")
        post = self.posteriors.get(phi)
        if symbol is None:
            if post is not None:
                symbol = post.symbol
            elif phi in self.observations and self.observations[phi].symbols:
                symbol = self.observations[phi].symbols[0]
        by_trial = post.by_trial() if post else {}
        rows: list[dict] = []
        for ups in self.explaining(phi):
            synth = self.synthesis.get(ups)
            if synth is None:
                continue
            rel = None
            domain_col = hyp_sym = None
            if symbol is not None:
                try:
                    hyp_sym = self._resolve_symbol(phi, ups, symbol)
                    rel = self._claim_for(ups, hyp_sym)
                    doc_domains = self.hypotheses[ups].doc.domains
                    domain_col = next((d for d in doc_domains if d in rel.columns), None)
                except (UnknownIdError, StoreError):
                    rel = None
            for p, tid in self.fact_tables[ups].trials:
                if p != phi:
                    continue
                value = None
                if rel is not None and at is not None and domain_col is not None:
                    theta = synth.trial_worlds[(phi, tid)]
                    mask = self._theta_mask(rel, theta) & (rel.data["phi"] == phi)
                    mask &= rel.data[at[0] if at[0] in rel.data else domain_col] == at[1]
                    idx = np.flatnonzero(mask)
                    if idx.size:
                        value = float(rel.data[hyp_sym][idx[0]])
                prow = by_trial.get((ups, tid))
                if prow is not None:
                    posterior = prow.posterior
                elif post is not None:
                    # outside the last conditioning: report the world's
                    # current probability (zero for ruled-out worlds)
                    posterior = self._world_probability_of(synth, phi, tid)
                else:
                    posterior = None
                rows.append({
                    "phi": phi, "upsilon": ups, "tid": tid,
                    "value": value,
                    "prior": synth.priors[(phi, tid)],
                    "posterior": posterior,
                })
        rows.sort(key=lambda r: (
            -(r["posterior"] if r["posterior"] is not None else -1.0),
            -r["prior"], r["upsilon"], r["tid"],
        ))
        return rows

    # -------------------------------------------------------------- query

    def query(self, spec: QuerySpec) -> tuple[list[str], list[list]]:
        if spec.projection not in self.relations:
            raise UnknownIdError(f"unknown projection {spec.projection!r}")
        rel = self.relations[spec.projection]
        plain = [(a, op, v) for a, op, v in spec.filters if a != "tid" or "tid" in rel.data]
        tid_filters = [(a, op, v) for a, op, v in spec.filters
                       if a == "tid" and "tid" not in rel.data]
        rel = ra_select(rel, plain) if plain else rel
        if tid_filters:
            mask = np.ones(rel.n_rows, bool)
            for _, op, v in tid_filters:
                if op != "=":
                    raise ValidationError("tid filters on projections support '=' only")
                tid_mask = np.zeros(rel.n_rows, bool)
                for ups, synth in self.synthesis.items():
                    for (p, t), theta in synth.trial_worlds.items():
                        if t == int(v):
                            tid_mask |= self._theta_mask(rel, theta)
                mask &= tid_mask
            rel = rel.take(np.flatnonzero(mask))
        if spec.aggregate == "conf":
            group = spec.group or [c for c in rel.columns]
            result = conf(self.world, rel, group)
            cols = list(group) + ["conf"]
            out_rows = [list(kv) + [p] for kv, p in result]
        else:
            cols = list(spec.columns or rel.columns)
            derived_tid = "tid" in cols and "tid" not in rel.data
            if derived_tid:
                tid_col = self._derive_tid(rel)
            out_rows = []
            for i in range(rel.n_rows):
                row = []
                for c in cols:
                    if c == "tid" and derived_tid:
                        row.append(int(tid_col[i]))
                    elif c in rel.data:
                        row.append(rel.data[c][i].item())
                    else:
                        raise UnknownIdError(f"unknown column {c!r}")
                out_rows.append(row)
        if spec.order:
            idx_of = {c: i for i, c in enumerate(cols)}
            for c in spec.order:
                if c not in idx_of:
                    raise UnknownIdError(f"cannot order by unknown column {c!r}")
            out_rows.sort(key=lambda r: tuple(r[idx_of[c]] for c in spec.order))
        return cols, out_rows

    def _derive_tid(self, rel: URelation) -> np.ndarray:
        out = np.full(rel.n_rows, -1, np.int64)
        for ups, synth in self.synthesis.items():
            for (p, t), theta in synth.trial_worlds.items():
                mask = self._theta_mask(rel, theta)
                if "phi" in rel.data:
                    mask &= rel.data["phi"] == p
                out[mask & (out == -1)] = t
        return out

    # -------------------------------------------------------------- verify

    def verify(self, upsilon: int) -> dict:
        """Run the BCNF and lossless-join checks on a synthesized schema."""
        synth = self.synthesis.get(upsilon)
        if synth is None:
            raise StoreError(f"hypothesis {upsilon} is not synthesized")
        table = self.fact_tables[upsilon]
        gamma_prime = synth.factorization.gamma_prime
        schemes = [list(self.relations[n].columns)
                   for n in synth.factor_names + synth.claim_names]
        ok_bcnf, violations = bcnf_check(schemes, gamma_prime)
        factor_attrs = [["phi", *g.attrs] for g in synth.factorization.groups]
        rows = table.row_tuples()
        ok_factors = lossless_check(table.columns, rows, factor_attrs) if factor_attrs else True
        ok_claims = True
        for claim_fd in synth.claim_fds:
            pivots = [g.pivot for g in synth.factorization.groups if g.pivot in claim_fd.lhs]
            projs = [["phi", "upsilon"]]
            projs += [["phi", *g.attrs] for g in synth.factorization.groups if g.pivot in pivots]
            projs.append(list(table.columns))
            if not lossless_check(table.columns, rows, projs):
                ok_claims = False
        return {
            "hypothesis_id": upsilon,
            "bcnf": ok_bcnf,
            "bcnf_violations": [
                {"scheme": list(v.scheme), "lhs": sorted(v.lhs), "gained": sorted(v.gained)}
                for v in violations
            ],
            "lossless_u_factors": bool(ok_factors),
            "lossless_predictive": bool(ok_claims),
        }

    # --------------------------------------------------------- persistence

    def save(self, path: str) -> None:
        with self._lock:
            os.makedirs(os.path.join(path, "relations"), exist_ok=True)
            registry = {
                "version": FORMAT_VERSION,
                "phenomena": {str(k): v for k, v in self.phenomena.items()},
                "hypotheses": {
                    str(k): {"name": h.name, "doc": json.loads(h.doc.to_json())}
                    for k, h in self.hypotheses.items()
                },
                "explanations": [[p, u, w] for (p, u), w in self.explanations.items()],
                "manifests": [
                    {
                        "phenomenon_id": m.phenomenon_id,
                        "hypothesis_id": m.hypothesis_id,
                        "trial_id": m.trial_id,
                        "mappings": dict(m.mappings),
                    }
                    for m in self.manifests.values()
                ],
                "observations": {
                    str(phi): {
                        "coordinate": obs.coordinate_name,
                        "coordinates": obs.coordinates.tolist(),
                        "values": {k: v.tolist() for k, v in obs.values.items()},
                    }
                    for phi, obs in self.observations.items()
                },
                "fact_tables": {
                    str(u): {"trials": [list(t) for t in tbl.trials],
                             "domains": list(tbl.domains),
                             "var_columns": list(tbl.var_columns)}
                    for u, tbl in self.fact_tables.items()
                },
                "y0_map": {str(p): [vid, ups] for p, (vid, ups) in self.y0_map.items()},
                "y0_stamp": [list(t) for t in self._y0_stamp] if self._y0_stamp else None,
                "synthesis": {str(u): _synth_to_obj(s) for u, s in self.synthesis.items()},
                "posteriors": {str(p): t.to_obj() for p, t in self.posteriors.items()},
            }
            with open(os.path.join(path, "registry.json"), "w") as fh:
                json.dump(registry, fh, indent=1)
            with open(os.path.join(path, "world.json"), "w") as fh:
                json.dump({"version": FORMAT_VERSION, **self.world.to_obj()}, fh, indent=1)
            kept = set()
            for name, rel in self.relations.items():
                _write_relation_csv(os.path.join(path, "relations", f"{name}.csv"), rel)
                kept.add(f"{name}.csv")
            for fn in os.listdir(os.path.join(path, "relations")):
                if fn.endswith(".csv") and fn not in kept:
                    os.remove(os.path.join(path, "relations", fn))

    @classmethod
    def load(cls, path: str) -> "Store":
        store = cls()
        registry = _read_json(os.path.join(path, "registry.json"))
        world_obj = _read_json(os.path.join(path, "world.json"))
        for obj in (registry, world_obj):
            if obj.get("version") != FORMAT_VERSION:
                raise StoreError(
                    f"store format version mismatch: found {obj.get('version')}, "
                    f"expected {FORMAT_VERSION}"
                )
        store.world = WorldTable.from_obj(world_obj)
        store.phenomena = {int(k): v for k, v in registry["phenomena"].items()}
        for k, h in registry["hypotheses"].items():
            store.add_hypothesis(json.dumps(h["doc"]), h.get("name", ""))
        store.explanations = {
            (int(p), int(u)): float(w) for p, u, w in registry["explanations"]
        }
        for m in registry["manifests"]:
            man = TrialManifest(
                int(m["phenomenon_id"]), int(m["hypothesis_id"]), int(m["trial_id"]),
                tuple((k, v) for k, v in m.get("mappings", {}).items()),
            )
            store.manifests[(man.phenomenon_id, man.hypothesis_id, man.trial_id)] = man
        for p, o in registry.get("observations", {}).items():
            store.observations[int(p)] = ObservationSet(
                int(p), o["coordinate"], np.asarray(o["coordinates"], np.float64),
                {k: np.asarray(v, np.float64) for k, v in o["values"].items()},
            )
        rel_dir = os.path.join(path, "relations")
        if os.path.isdir(rel_dir):
            for fn in sorted(os.listdir(rel_dir)):
                if fn.endswith(".csv"):
                    name = fn[:-4]
                    store.relations[name] = _read_relation_csv(
                        os.path.join(rel_dir, fn), name
                    )
        for u_str, meta in registry.get("fact_tables", {}).items():
            ups = int(u_str)
            rel = store.relations.get(f"H{ups}")
            if rel is None:
                continue
            table = BigFactTable(ups, list(meta["var_columns"]), list(meta["domains"]))
            table._chunks = [dict(rel.data)]
            table.trials = [tuple(t) for t in meta["trials"]]
            store.fact_tables[ups] = table
        store.y0_map = {
            int(p): (int(v[0]), [int(u) for u in v[1]])
            for p, v in registry.get("y0_map", {}).items()
        }
        stamp = registry.get("y0_stamp")
        store._y0_stamp = tuple(tuple(t) for t in stamp) if stamp else None
        for u_str, obj in registry.get("synthesis", {}).items():
            store.synthesis[int(u_str)] = _synth_from_obj(obj)
        for p_str, obj in registry.get("posteriors", {}).items():
            store.posteriors[int(p_str)] = PosteriorTable.from_obj(obj)
        return store

    def status(self) -> dict:
        return {
            "phenomena": len(self.phenomena),
            "hypotheses": len(self.hypotheses),
            "trials": len(self.manifests),
            "relations": sorted(self.relations),
            "synthesized": sorted(self.synthesis),
            "conditioned": sorted(self.posteriors),
            "variables": len(self.world.variables()),
        }


# ---------------------------------------------------------------- helpers

def _write_relation_csv(path: str, rel: URelation) -> None:
    frame = {}
    for j in range(rel.n_cond_slots):
        cv = rel.cond_vars[:, j]
        cd = rel.cond_vals[:, j]
        tokens = np.where(
            cv >= 0,
            np.char.add(
                np.char.add(np.char.add("x", cv.astype("U11")), "="),
                cd.astype("U11"),
            ),
            "",
        )
        frame[f"__cond{j + 1}"] = tokens
    for c in rel.columns:
        frame[c] = rel.data[c]
    pd.DataFrame(frame).to_csv(path, index=False)


def _read_relation_csv(path: str, name: str) -> URelation:
    df = pd.read_csv(path, keep_default_na=False, na_values=[])
    cond_cols = [c for c in df.columns if c.startswith("__cond")]
    data_cols = [c for c in df.columns if not c.startswith("__cond")]
    n = len(df)
    cv = np.full((n, len(cond_cols)), -1, np.int32)
    cd = np.full((n, len(cond_cols)), -1, np.int32)
    for j, c in enumerate(cond_cols):
        series = df[c].astype(str)
        filled = series.str.contains("=", regex=False)
        if filled.any():
            parts = series[filled].str.split("=", expand=True)
            cv[filled.to_numpy(), j] = parts[0].str.lstrip("x").astype(np.int32)
            cd[filled.to_numpy(), j] = parts[1].astype(np.int32)
    data = {}
    for c in data_cols:
        dtype = np.int64 if c in ("phi", "upsilon", "tid") else np.float64
        data[c] = pd.to_numeric(df[c]).to_numpy(dtype)
    return URelation(name, tuple(data_cols), data, cv, cd)


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise StoreError(f"missing store file {path!r}") from None
    except json.JSONDecodeError as exc:
        raise StoreError(
            f"corrupted store file {path!r}: {exc.msg} at offset {exc.pos}",
            offset=exc.pos,
        ) from None


def _synth_to_obj(s: SynthesisResult) -> dict:
    f = s.factorization
    return {
        "hypothesis_id": s.hypothesis_id,
        "mapping": list(map(list, s.mapping.pairs)),
        "classes": {k: sorted(v) for k, v in s.classes.items()},
        "sigma": f.sigma.to_text(),
        "omega": f.omega.to_text(),
        "omega_folded": f.omega_folded.to_text(),
        "gamma": f.gamma.to_text(),
        "gamma_prime": f.gamma_prime.to_text(),
        "groups": [{"pivot": g.pivot, "members": list(g.members)} for g in f.groups],
        "factor_names": s.factor_names,
        "claim_names": s.claim_names,
        "claim_fds": [str(fd) for fd in s.claim_fds],
        "trial_worlds": {
            f"{p}:{t}": {str(v): a for v, a in theta.items()}
            for (p, t), theta in s.trial_worlds.items()
        },
        "priors": {f"{p}:{t}": w for (p, t), w in s.priors.items()},
        "dead_trials": sorted(f"{p}:{t}" for p, t in s.dead_trials),
    }


def _synth_from_obj(obj: dict) -> SynthesisResult:
    from .fd import FD
    from .synthesis import Factorization, UFactorGroup

    groups = [UFactorGroup(g["pivot"], tuple(g["members"])) for g in obj["groups"]]
    fact = Factorization(
        sigma=FDSet.from_text(obj["sigma"]),
        omega=FDSet.from_text(obj["omega"]),
        omega_folded=FDSet.from_text(obj["omega_folded"]),
        gamma=FDSet.from_text(obj["gamma"]),
        gamma_prime=FDSet.from_text(obj["gamma_prime"]),
        groups=groups,
    )
    claim_fds = []
    for line in obj["claim_fds"]:
        left, right = line.split("->")
        claim_fds.append(FD.of(left.split(), right.split()))
    return SynthesisResult(
        hypothesis_id=int(obj["hypothesis_id"]),
        mapping=CausalMapping(tuple((e, v) for e, v in obj["mapping"])),
        classes={k: frozenset(v) for k, v in obj["classes"].items()},
        factorization=fact,
        factor_names=list(obj["factor_names"]),
        claim_names=list(obj["claim_names"]),
        claim_fds=claim_fds,
        trial_worlds={
            (int(k.split(":")[0]), int(k.split(":")[1])): {
                int(v): int(a) for v, a in theta.items()
            }
            for k, theta in obj["trial_worlds"].items()
        },
        priors={
            (int(k.split(":")[0]), int(k.split(":")[1])): float(w)
            for k, w in obj["priors"].items()
        },
        dead_trials={
            (int(k.split(":")[0]), int(k.split(":")[1]))
            for k in obj.get("dead_trials", [])
        },
    )
