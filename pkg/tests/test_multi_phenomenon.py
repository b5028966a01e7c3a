"""The two-phenomena research setup: the growth models explain both the US
population and the lynx series, so their projections span two phenomena and
conditioning one must leave the other's worlds untouched."""

import json

import numpy as np
import pytest

from hypodb.ingest import TrialManifest
from hypodb.store import QuerySpec, Store
from hypodb.urel import conf, ra_select

from . import scenarios
from .scenarios import LYNX_OBSERVED, _growth_series

US_CENSUS = [  # decennial population, millions
    (1790, 3.9), (1800, 5.3), (1810, 7.2), (1820, 9.6), (1830, 12.9),
    (1840, 17.1), (1850, 23.2), (1860, 31.4), (1870, 38.6), (1880, 50.2),
    (1890, 63.0), (1900, 76.2), (1910, 92.2), (1920, 106.0), (1930, 123.2),
]


def two_phenomena_store() -> Store:
    store = Store()
    store.add_phenomenon(1, "US population 1790-1930")
    store.add_phenomenon(2, "Lynx population 1900-1920")
    for ups, doc in scenarios.DEMO_POPULATION_DOCS.items():
        store.add_hypothesis(json.dumps(doc))
    for phi, ups in [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3)]:
        store.record_explanation(phi, ups, 1)

    years1 = [y for y, _ in US_CENSUS]
    mapping1 = (("t", "Year"), ("x", "Population"))
    # Malthusian trials track the early census growth (~3% yearly over decades)
    for tid, rate in [(1, 0.30), (2, 0.34)]:
        xs = _growth_series(3.9, rate, years=len(years1))
        lines = ["Year,x__t_min,b,Population"]
        for y, x in zip(years1, xs):
            lines.append(f"{y},3.9,{rate},{x}")
        store.load_trial(TrialManifest(1, 1, tid, mapping1), "\n".join(lines))
    for tid, (rate, cap) in [(1, (0.31, 210.0)), (2, (0.35, 180.0))]:
        xs = _growth_series(3.9, rate, years=len(years1), cap=cap)
        lines = ["Year,x__t_min,K,b,Population"]
        for y, x in zip(years1, xs):
            lines.append(f"{y},3.9,{cap},{rate},{x}")
        store.load_trial(TrialManifest(1, 2, tid, mapping1), "\n".join(lines))

    helper = scenarios.lynx_store()
    for (phi, ups, tid), manifest in helper.manifests.items():
        table = helper.fact_tables[ups]
        rows = table.trial_rows(phi, tid)
        cols = [c for c in table.columns if c not in ("tid", "phi", "upsilon")]
        lines = [",".join(cols)]
        for i in rows:
            lines.append(",".join(repr(float(table.data[c][i])) for c in cols))
        store.load_trial(
            TrialManifest(phi, ups, tid, manifest.mappings), "\n".join(lines)
        )
    store.load_observations(
        1, "\n".join(["Year,Population"] + [f"{y},{v}" for y, v in US_CENSUS])
    )
    store.load_observations(
        2, "\n".join(["Year,Lynx"] + [f"{y},{v}" for y, v in LYNX_OBSERVED])
    )
    return store


@pytest.fixture(scope="module")
def store():
    s = two_phenomena_store()
    for ups in (1, 2, 3):
        s.synthesize_hypothesis(ups)
    return s


def test_claim_projection_spans_both_phenomena(store):
    synth = store.synthesis[1]
    rel = store.relations[synth.claim_names[0]]
    assert set(np.unique(rel.data["phi"])) == {1, 2}


def test_per_phenomenon_explanation_variables(store):
    v1, ups1 = store.y0_map[1]
    v2, ups2 = store.y0_map[2]
    assert v1 != v2
    assert ups1 == [1, 2]
    assert ups2 == [1, 2, 3]
    assert np.allclose(store.world.marginals(v1), [0.5, 0.5])
    assert np.allclose(store.world.marginals(v2), [1 / 3] * 3)


def test_priors_normalize_per_phenomenon(store):
    for phi in (1, 2):
        total = 0.0
        for ups in store.explaining(phi):
            synth = store.synthesis[ups]
            total += sum(p for (f, t), p in synth.priors.items() if f == phi)
        assert abs(total - 1.0) < 1e-9


def test_conditioning_one_phenomenon_preserves_the_other(store):
    before = store.rank(2, ("t", 1904.0))
    table = store.condition(1, "Population", 8.0)
    assert abs(sum(r.posterior for r in table.rows) - 1.0) < 1e-9
    # the saturating model tracks the census tail; the exponential overshoots
    assert table.rows[0].upsilon == 2
    after = store.rank(2, ("t", 1904.0))
    assert after == before  # phenomenon 2 untouched
    # now condition the lynx side too; both posteriors coexist
    lynx = store.condition(2, "Lynx", 10.0)
    assert lynx.rows[0].upsilon == 3
    assert store.posteriors.keys() == {1, 2}
    again = store.condition(1, "Population", 8.0)
    assert abs(sum(r.posterior for r in again.rows) - 1.0) < 1e-9


def test_range_filter_queries(store):
    synth = store.synthesis[3]
    spec = QuerySpec(
        synth.claim_names[0],
        [("phi", "=", 2), ("t", ">=", 1905.0), ("t", "<=", 1910.0), ("tid", "=", 2)],
        ["t"], [], "none", ["t", "y"],
    )
    cols, rows = store.query(spec)
    assert cols == ["t", "y"]
    assert [r[0] for r in rows] == [1905.0, 1906.0, 1907.0, 1908.0, 1909.0, 1910.0]


def test_conf_respects_selection_ranges(store):
    # runs after the conditioning test on the shared store: confidences over
    # the oscillating model's worlds must add up to its posterior mass
    synth = store.synthesis[3]
    rel = store.relations[synth.claim_names[0]]
    sel = ra_select(rel, [("phi", "=", 2), ("t", ">=", 1904.0), ("t", "<", 1905.0)])
    got = conf(store.world, sel, ["phi", "upsilon", "y"])
    assert len(got) == 6
    post = store.posteriors[2].by_trial()
    expected = sum(row.posterior for (u, _), row in post.items() if u == 3)
    assert abs(sum(p for _, p in got) - expected) < 1e-9
