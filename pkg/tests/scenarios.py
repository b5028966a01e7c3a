"""Shared scenario builders: the population-dynamics, free-fall, hemoglobin,
blood-vessel and baroreflex research setups used across the tests, plus the
expected encodings they must reproduce."""

from __future__ import annotations

import json
import math

from hypodb.ingest import TrialManifest
from hypodb.store import Store

# ---------------------------------------------------------------------------
# Structure documents (explicit incidence for the compact systems, DSL for
# the rest), paired with the fd sets they must encode to.
# ---------------------------------------------------------------------------

POPULATION_DOCS = {
    1: {"hypothesis_id": 1, "domains": ["t"], "incidence": {
        "f1": ["t"], "f2": ["x0"], "f3": ["b"],
        "f4": ["x", "t", "x0", "b"]}},
    2: {"hypothesis_id": 2, "domains": ["t"], "incidence": {
        "f1": ["t"], "f2": ["x0"], "f3": ["K"], "f4": ["b"],
        "f5": ["x", "t", "x0", "K", "b"]}},
    3: {"hypothesis_id": 3, "domains": ["t"], "incidence": {
        "f1": ["t"], "f2": ["x0"], "f3": ["b"], "f4": ["p"], "f5": ["y0"],
        "f6": ["d"], "f7": ["r"],
        "f8": ["x", "t", "x0", "b", "p", "y"],
        "f9": ["y", "t", "y0", "d", "r", "x"]}},
}

POPULATION_SIGMAS = {
    1: """
        phi -> x0
        phi -> b
        b t upsilon x0 -> x
    """,
    2: """
        phi -> x0
        phi -> K
        phi -> b
        K b t upsilon x0 -> x
    """,
    3: """
        phi -> x0
        phi -> b
        phi -> p
        phi -> y0
        phi -> d
        phi -> r
        b p t upsilon x0 y -> x
        d r t upsilon x y0 -> y
    """,
}

FREE_FALL_DOCS = {
    1: {"hypothesis_id": 1, "domains": ["t"], "incidence": {
        "f_t": ["t"], "f_g": ["g"], "f_v0": ["v0"], "f_s0": ["s0"],
        "f_a": ["a", "g"], "f_v": ["v", "g", "v0", "t"],
        "f_s": ["s", "g", "v0", "s0", "t"]}},
    2: {"hypothesis_id": 2, "domains": ["t"], "incidence": {
        "f_t": ["t"], "f_g": ["g"], "f_D": ["D"], "f_s0": ["s0"],
        "f_a": ["a"], "f_v": ["v", "g", "D"],
        "f_s": ["s", "g", "D", "s0", "t"]}},
    3: {"hypothesis_id": 3, "domains": ["t"], "incidence": {
        "f_t": ["t"], "f_g": ["g"], "f_D": ["D"], "f_s0": ["s0"],
        "f_a": ["a"], "f_v": ["v", "g", "D"],
        "f_s": ["s", "g", "D", "s0", "t"]}},
}

FREE_FALL_SIGMAS = {
    1: """
        phi -> g
        phi -> v0
        phi -> s0
        g upsilon -> a
        g t upsilon v0 -> v
        g s0 t upsilon v0 -> s
    """,
    2: """
        phi -> g
        phi -> D
        phi -> s0
        phi -> a
        D g upsilon -> v
        D g s0 t upsilon -> s
    """,
}
FREE_FALL_SIGMAS[3] = FREE_FALL_SIGMAS[2]


def _setters(symbols: str) -> list[dict]:
    return [{"name": f"set_{s}", "expr": f"{s} = 1"} for s in symbols.split()]


HEMOGLOBIN_DOCS = {
    28: {"hypothesis_id": 28, "domains": ["pO2"], "equations": [
        {"name": "f_sat", "expr": "SHbO2_H = hill(KO2, n, pO2)"},
        {"name": "f_k", "expr": "KO2 = k(n, p50)"},
        *_setters("n p50"),
    ]},
    31: {"hypothesis_id": 31, "domains": ["pO2"], "equations": [
        {"name": "f_sat", "expr": "SHbO2_Ad = adair(A1, A2, A3, A4, pO2)"},
        {"name": "f_a1", "expr": "A1 = c1(p50)"},
        {"name": "f_a2", "expr": "A2 = c2(p50)"},
        {"name": "f_a4", "expr": "A4 = c4(p50)"},
        *_setters("A3 p50"),
    ]},
    32: {"hypothesis_id": 32, "domains": ["pO2"], "equations": [
        {"name": "f_sat", "expr": "SHbO2_D = sat(KO2, pO2)"},
        {"name": "f_k", "expr": "KO2 = k(term1, term2, term3)"},
        {"name": "f_t1", "expr": "term1 = t1(HpRBC, K6p, alphaO2)"},
        {"name": "f_t2", "expr": "term2 = t2(HpRBC, K3, K5, alphaCO2, pCO2)"},
        {"name": "f_t3", "expr": "term3 = t3(HpRBC, K2, K4, alphaCO2, pCO2)"},
        {"name": "f_h", "expr": "HpRBC = h(pH)"},
        *_setters("K2 K3 K4 K5 K6p alphaCO2 alphaO2 pCO2 pH"),
    ]},
}

HEMOGLOBIN_SIGMAS = {
    28: """
        KO2 n pO2 upsilon -> SHbO2_H
        n p50 upsilon -> KO2
        phi -> n
        phi -> p50
        phi -> pO2_delta
        phi -> pO2_max
        phi -> pO2_min
    """,
    31: """
        A1 A2 A3 A4 pO2 upsilon -> SHbO2_Ad
        p50 upsilon -> A1
        p50 upsilon -> A2
        p50 upsilon -> A4
        phi -> A3
        phi -> p50
        phi -> pO2_delta
        phi -> pO2_max
        phi -> pO2_min
    """,
    32: """
        KO2 pO2 upsilon -> SHbO2_D
        term1 term2 term3 upsilon -> KO2
        HpRBC K6p alphaO2 upsilon -> term1
        HpRBC K3 K5 alphaCO2 pCO2 upsilon -> term2
        HpRBC K2 K4 alphaCO2 pCO2 upsilon -> term3
        pH upsilon -> HpRBC
        phi -> K2
        phi -> K3
        phi -> K4
        phi -> K5
        phi -> K6p
        phi -> alphaCO2
        phi -> alphaO2
        phi -> pCO2
        phi -> pH
        phi -> pO2_delta
        phi -> pO2_max
        phi -> pO2_min
    """,
}

VESSEL_DOCS = {
    60: {"hypothesis_id": 60, "domains": ["t"], "equations": [
        {"name": "f_fin", "expr": "Fin = q(Fcomp, Fout)"},
        {"name": "f_fout", "expr": "Fout = q(Pin, Pout, R)"},
        {"name": "f_fcomp", "expr": "Fcomp = q(V, V__t_min, t)"},
        {"name": "f_r", "expr": "R = q(D, L, mu)"},
        {"name": "f_v", "expr": "V = q(D, L)"},
        {"name": "f_a", "expr": "A = q(D, Pin, T)"},
        {"name": "f_at", "expr": "Atarget = q(A, C1a, C1p, C2a, C2p, C3a, Dp100, Pin, T, Ttarget)"},
        {"name": "f_d", "expr": "D = q(Atarget, Cglobal, Cmyo, Pin)"},
        {"name": "f_t", "expr": "T = q(D, D__t_min, Dc, Tc, Ttarget, t, taud)"},
        {"name": "f_tt", "expr": "Ttarget = q(A, A__t_min, Atarget, t, taua)"},
        {"name": "f_a0", "expr": "A__t_min = q(Ac)"},
        {"name": "f_ac", "expr": "Ac = q(Cglobal, Cmyo, Tc)"},
        {"name": "f_d0", "expr": "D__t_min = q(Dc)"},
        {"name": "f_tc", "expr": "Tc = q(Dc, Pmean)"},
        {"name": "f_pin", "expr": "Pin = q(Pamp, Pmean, t, tnorm)"},
        {"name": "f_dc", "expr": "Dc = q(C1a, C1p, C2a, C2p, C3a, Cglobal, Cmyo, Dp100, Pc)"},
        *_setters("C1a C1p C2a C2p C3a Cglobal Cmyo Dp100 L Pamp Pc Pext Pmean Pout V__t_min mu taua taud tnorm"),
    ]},
    89: {"hypothesis_id": 89, "domains": ["t"], "equations": [
        {"name": "f_a", "expr": "A = q(D, P, T)"},
        {"name": "f_at", "expr": "Atarget = q(A, C1a, C1p, C2a, C2p, C3a, Dp100, P, T, Ttarget)"},
        {"name": "f_d", "expr": "D = q(Atarget, Cglobal, Cmyo, P)"},
        {"name": "f_t", "expr": "T = q(D, D__t_min, Dc, Tc, Ttarget, t, taud)"},
        {"name": "f_tt", "expr": "Ttarget = q(A, A__t_min, Atarget, t, taua)"},
        {"name": "f_a0", "expr": "A__t_min = q(Ac)"},
        {"name": "f_tc", "expr": "Tc = q(Dc, Pc)"},
        {"name": "f_ac", "expr": "Ac = q(Cglobal, Cmyo, Dc, Pc)"},
        {"name": "f_d0", "expr": "D__t_min = q(Dc)"},
        {"name": "f_p", "expr": "P = q(DelP, Pc)"},
        {"name": "f_dc", "expr": "Dc = q(C1a, C1p, C2a, C2p, C3a, Cglobal, Cmyo, Dp100, Pc)"},
        {"name": "f_delp", "expr": "DelP = q(t)"},
        *_setters("C1a C1p C2a C2p C3a Cglobal Cmyo Dp100 Pc taua taud"),
    ]},
}

VESSEL_SIGMAS = {
    60: """
        Fcomp Fout upsilon -> Fin
        Pin Pout R upsilon -> Fout
        V V__t_min t upsilon -> Fcomp
        D L mu upsilon -> R
        D L upsilon -> V
        D Pin T upsilon -> A
        A C1a C1p C2a C2p C3a Dp100 Pin T Ttarget upsilon -> Atarget
        Atarget Cglobal Cmyo Pin upsilon -> D
        D D__t_min Dc Tc Ttarget t taud upsilon -> T
        A A__t_min Atarget t taua upsilon -> Ttarget
        Ac upsilon -> A__t_min
        Cglobal Cmyo Tc upsilon -> Ac
        Dc upsilon -> D__t_min
        Dc Pmean upsilon -> Tc
        Pamp Pmean t tnorm upsilon -> Pin
        C1a C1p C2a C2p C3a Cglobal Cmyo Dp100 Pc upsilon -> Dc
        phi -> C1a
        phi -> C1p
        phi -> C2a
        phi -> C2p
        phi -> C3a
        phi -> Cglobal
        phi -> Cmyo
        phi -> Dp100
        phi -> L
        phi -> Pamp
        phi -> Pc
        phi -> Pext
        phi -> Pmean
        phi -> Pout
        phi -> V__t_min
        phi -> mu
        phi -> t_delta
        phi -> t_max
        phi -> t_min
        phi -> taua
        phi -> taud
        phi -> tnorm
    """,
    89: """
        D P T upsilon -> A
        A C1a C1p C2a C2p C3a Dp100 P T Ttarget upsilon -> Atarget
        Atarget Cglobal Cmyo P upsilon -> D
        D D__t_min Dc Tc Ttarget t taud upsilon -> T
        A A__t_min Atarget t taua upsilon -> Ttarget
        Ac upsilon -> A__t_min
        Dc Pc upsilon -> Tc
        Cglobal Cmyo Dc Pc upsilon -> Ac
        Dc upsilon -> D__t_min
        DelP Pc upsilon -> P
        C1a C1p C2a C2p C3a Cglobal Cmyo Dp100 Pc upsilon -> Dc
        phi t -> DelP
        phi -> C1a
        phi -> C1p
        phi -> C2a
        phi -> C2p
        phi -> C3a
        phi -> Cglobal
        phi -> Cmyo
        phi -> Dp100
        phi -> Pc
        phi -> t_delta
        phi -> t_max
        phi -> t_min
        phi -> taua
        phi -> taud
    """,
}

_BARO_CLAIMS = [
    ("Period", "HR"),
    ("HR", "Beta, HR_p, HR_s, HRmin, HRo"),
    ("HR_p", "HRo, delta_HR_p"),
    ("delta_HR_p", "delta_HR_pfast, delta_HR_pslow"),
    ("HR_s", "HRo, delta_HR_s"),
    ("delta_HR_s", "Time, delta_HR_s__Time_min, delta_HR_ss, tau_HR_nor"),
    ("delta_HR_pfast", "Gamma, delta_HR_ps"),
    ("delta_HR_pslow", "Gamma, Time, delta_HR_ps, delta_HR_pslow__Time_min, tau_HR_ach"),
    ("delta_HR_ss", "K_nor, c_nor, delta_HR_smax"),
    ("delta_HR_ps", "C_ach, K_ach, delta_HR_pmax"),
    ("c_nor", "Time, Ts, c_nor__Time_min, q_nor, tau_nor"),
    ("C_ach", "C_ach__Time_min, Time, Tp, q_ach, tau_ach"),
    ("Ts", "Gs, Tsmax, Tsmin, alpha_cns, alpha_s0"),
    ("Tp", "Gp, Tpmax, Tpmin, alpha_cns, alpha_p0"),
    ("alpha_cns", "Gcns, n"),
    ("n", "S, Zeta, delta, delta_th"),
    ("delta", "Eps_1, Eps_wall"),
    ("Eps_1", "B1, Eps_1__Time_min, Eps_2, Eps_2__Time_min, Eps_wall, K1, Kne, Time"),
    ("Eps_2", "B1, B2, Eps_1, Eps_1__Time_min, Eps_2__Time_min, Eps_3, Eps_3__Time_min, K1, K2, Time"),
    ("Eps_3", "B2, B3, Eps_2, Eps_2__Time_min, Eps_3__Time_min, K2, K3, Time"),
    ("Eps_wall", "R, R0"),
    ("R", "A"),
    ("A", "A__Time_min, Bwall, Cwall, P, R0, Time"),
    ("delta_HR_smax", "HRmax, HRo"),
    ("delta_HR_pmax", "HRmin, HRo"),
]

_BARO_PARAMS = (
    "A__Time_min B1 B2 B3 Beta Bwall C_ach__Time_min Cwall Eps_1__Time_min "
    "Eps_2__Time_min Eps_3__Time_min Gamma Gcns Gp Gs HRmax HRmin HRo K1 K2 K3 "
    "K_ach K_nor Kne P R0 S Tpmax Tpmin Tsmax Tsmin Zeta alpha_p0 alpha_s0 "
    "c_nor__Time_min delta_HR_pslow__Time_min delta_HR_s__Time_min delta_th "
    "q_ach q_nor tau_HR_ach tau_HR_nor tau_ach tau_nor"
)

BAROREFLEX_DOC = {
    "hypothesis_id": 1001,
    "domains": ["Time"],
    "equations": [
        *[{"name": f"f_{tgt}", "expr": f"{tgt} = q({deps})"} for tgt, deps in _BARO_CLAIMS],
        {"name": "f_data", "expr": "data = q(Time)"},
        *_setters(_BARO_PARAMS),
    ],
}

BAROREFLEX_SIGMA = "\n".join(
    [f"{' '.join(sorted(deps.replace(',', ' ').split() + ['upsilon']))} -> {tgt}"
     for tgt, deps in _BARO_CLAIMS]
    + ["Time phi -> data"]
    + [f"phi -> {p}" for p in _BARO_PARAMS.split()]
    + [f"phi -> Time_{s}" for s in ("delta", "max", "min")]
)

DEMO_POPULATION_DOCS = {
    1: {"hypothesis_id": 1, "domains": ["t"], "equations": [
        {"name": "f1", "expr": "x' = b*x"},
        {"name": "f2", "expr": "x__t_min = 200"},
        {"name": "f3", "expr": "b = 10"},
    ]},
    2: {"hypothesis_id": 2, "domains": ["t"], "equations": [
        {"name": "f1", "expr": "x' = b*(1 - x/K)*x"},
        {"name": "f2", "expr": "x__t_min = 200"},
        {"name": "f3", "expr": "b = 10"},
        {"name": "f4", "expr": "K = 300"},
    ]},
    # Lotka-Volterra in the repository's explicit form: the rate expressions
    # list their dependencies; initial conditions are separate events.
    3: {"hypothesis_id": 3, "domains": ["t"], "equations": [
        {"name": "f1", "expr": "x = rate(x, b - p*y, t)"},
        {"name": "f2", "expr": "y = rate(y, r*x - d, t)"},
        {"name": "f3", "expr": "x__t_min = 30"},
        {"name": "f4", "expr": "y__t_min = 4"},
        {"name": "f5", "expr": "b = 0.5"},
        {"name": "f6", "expr": "p = 0.02"},
        {"name": "f7", "expr": "d = 0.75"},
        {"name": "f8", "expr": "r = 0.02"},
    ]},
}

DEMO_POPULATION_SIGMAS = {
    1: """
        b t upsilon x__t_min -> x
        phi -> b
        phi -> t_delta
        phi -> t_max
        phi -> t_min
        phi -> x__t_min
    """,
    2: """
        K b t upsilon x__t_min -> x
        phi -> K
        phi -> b
        phi -> t_delta
        phi -> t_max
        phi -> t_min
        phi -> x__t_min
    """,
    3: """
        b p t upsilon y -> x
        d r t upsilon x -> y
        phi -> b
        phi -> d
        phi -> p
        phi -> r
        phi -> t_delta
        phi -> t_max
        phi -> t_min
        phi -> x__t_min
        phi -> y__t_min
    """,
}


# ---------------------------------------------------------------------------
# Data-backed scenario builders
# ---------------------------------------------------------------------------

LV_PARAMS = {
    1: (.5, .02, .75, .02), 2: (.5, .018, .75, .023),
    3: (.4, .02, .8, .02), 4: (.4, .018, .8, .023),
    5: (.397, .02, .786, .02), 6: (.397, .018, .786, .023),
}


def lotka_volterra_store(phi: int = 1) -> Store:
    """The population-dynamics scenario: three hypotheses explain one
    phenomenon, with the six Lotka-Volterra trials loaded."""
    store = Store()
    store.add_phenomenon(phi, "population dynamics")
    for ups, doc in POPULATION_DOCS.items():
        store.add_hypothesis(json.dumps(doc))
    store.record_explanation(phi, 1, 2)
    store.record_explanation(phi, 2, 2)
    store.record_explanation(phi, 3, 1)
    fixed_xy = [(30, 4), (50.1, 62.9), (13.8, 8.65), (79.3, 8.23), (12.6, 30.7)]
    for tid, (b, p, d, r) in LV_PARAMS.items():
        lines = ["t,x0,b,p,y0,d,r,x,y"]
        for i, t in enumerate((0, 5, 10, 15, 20)):
            if tid == 6:
                x, y = fixed_xy[i]
            else:
                x, y = 30 + tid * i, 4 + tid + i
            lines.append(f"{t},30,{b},{p},4,{d},{r},{x},{y}")
        store.load_trial(TrialManifest(phi, 3, tid), "\n".join(lines))
    return store


FREE_FALL_WEIGHTS = {1: 3, 2: 1, 3: 1}


def free_fall_store(times=(0.0, 1.0, 2.0, 3.0)) -> Store:
    """Fall study setup: six free-fall trials and four each for the
    Stokes and velocity-squared alternatives, weighted 3/1/1."""
    store = Store()
    store.add_phenomenon(1, "object falling in the atmosphere")
    for ups, doc in FREE_FALL_DOCS.items():
        store.add_hypothesis(json.dumps(doc))
    for ups, w in FREE_FALL_WEIGHTS.items():
        store.record_explanation(1, ups, w)
    tid = 0
    for g in (32.0, 32.2):
        for v0 in (0.0, 10.0, 20.0):
            tid += 1
            lines = ["t,g,v0,s0,a,v,s"]
            for t in times:
                lines.append(
                    f"{t},{g},{v0},5000,{-g},{-g * t + v0},{5000 - g / 2 * t * t + v0 * t}"
                )
            store.load_trial(TrialManifest(1, 1, tid), "\n".join(lines))
    funcs = {2: lambda g, D: -math.sqrt(g * D / 4.6e-4),
             3: lambda g, D: -g * D * D / 3.29e-6}
    for ups, vfun in funcs.items():
        tid = 0
        for g in (32.0, 32.2):
            for D in (0.001, 0.0011):
                tid += 1
                v = vfun(g, D)
                lines = ["t,g,D,s0,a,v,s"]
                for t in times:
                    lines.append(f"{t},{g},{D},5000,0,{v},{5000 + v * t}")
                store.load_trial(TrialManifest(1, ups, tid), "\n".join(lines))
    return store


# lynx-tuned parameter sweep: three (b, d) alternatives times two (p, r)
# alternatives, same correlated-pair design as the population fixture
LV_LYNX_PARAMS = {
    1: (.55, .025, .8, .033), 2: (.55, .028, .8, .03),
    3: (.5, .025, .85, .033), 4: (.5, .028, .85, .03),
    5: (.45, .025, .9, .033), 6: (.45, .028, .9, .03),
}

LYNX_OBSERVED = [
    (1900, 4.0), (1901, 6.1), (1902, 9.8), (1903, 35.2), (1904, 59.4),
    (1905, 41.7), (1906, 19.0), (1907, 13.0), (1908, 8.3), (1909, 9.1),
    (1910, 7.4), (1911, 8.0), (1912, 12.3), (1913, 19.5), (1914, 45.7),
    (1915, 51.1), (1916, 29.7), (1917, 15.8), (1918, 9.7), (1919, 10.1),
    (1920, 8.6),
]


def _lv_series(x0, y0, b, p, d, r, years=21, steps_per_year=40):
    """RK4-stepped predator-prey series (fixture data only)."""
    def f(x, y):
        return x * (b - p * y), y * (r * x - d)

    xs, ys = [x0], [y0]
    x, y = x0, y0
    h = 1.0 / steps_per_year
    for _ in range(years - 1):
        for _ in range(steps_per_year):
            k1x, k1y = f(x, y)
            k2x, k2y = f(x + h / 2 * k1x, y + h / 2 * k1y)
            k3x, k3y = f(x + h / 2 * k2x, y + h / 2 * k2y)
            k4x, k4y = f(x + h * k3x, y + h * k3y)
            x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
            y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        xs.append(x)
        ys.append(y)
    return xs, ys


def _growth_series(x0, b, years=21, cap=None):
    xs = [x0]
    x = x0
    for _ in range(years - 1):
        dx = b * x if cap is None else b * (1 - x / cap) * x
        x = x + dx
        xs.append(x)
    return xs


def lynx_store() -> Store:
    """The demo analytics scenario: the lynx phenomenon explained by the
    Malthusian, logistic and Lotka-Volterra models (two, two and six trials),
    with the Hudson's Bay observation series loaded."""
    store = Store()
    store.add_phenomenon(2, "Lynx population in Hudson's Bay, 1900-1920")
    for ups, doc in DEMO_POPULATION_DOCS.items():
        store.add_hypothesis(json.dumps(doc))
        store.record_explanation(2, ups, 1)
    years = [y for y, _ in LYNX_OBSERVED]
    mapping = {"t": "Year", "x": "Lynx"}
    for tid, b in [(1, 0.04), (2, 0.06)]:
        xs = _growth_series(4.0, b)
        lines = ["Year,x__t_min,b,x"]
        for y, x in zip(years, xs):
            lines.append(f"{y},4.0,{b},{x}")
        store.load_trial(TrialManifest(2, 1, tid, tuple(mapping.items())), "\n".join(lines))
    for tid, (b, cap) in [(1, (0.3, 60.0)), (2, (0.5, 45.0))]:
        xs = _growth_series(4.0, b, cap=cap)
        lines = ["Year,x__t_min,K,b,x"]
        for y, x in zip(years, xs):
            lines.append(f"{y},4.0,{cap},{b},{x}")
        store.load_trial(TrialManifest(2, 2, tid, tuple(mapping.items())), "\n".join(lines))
    for tid, (b, p, d, r) in LV_LYNX_PARAMS.items():
        xs, ys = _lv_series(30.0, 4.0, b, p, d, r)
        lines = ["Year,x__t_min,y__t_min,b,p,d,r,y,x"]
        for yr, x, y in zip(years, xs, ys):
            lines.append(f"{yr},30.0,4.0,{b},{p},{d},{r},{y},{x}")
        store.load_trial(
            TrialManifest(2, 3, tid, tuple({"t": "Year", "y": "Lynx"}.items())),
            "\n".join(lines),
        )
    obs_lines = ["Year,Lynx"] + [f"{y},{v}" for y, v in LYNX_OBSERVED]
    store.load_observations(2, "\n".join(obs_lines))
    return store


# reference analytics table for the fall study: predicted positions at the
# queried instant with their prior weights and the expected posteriors
FALL_ANALYTICS = [
    # (upsilon, s-prediction, prior, expected posterior)
    (1, 2188.36, .1, 0.16718810150932492),
    (1, 2205.82, .1, 0.1681562049268911),
    (1, 2320.51, .1, 0.16657680628838295),
    (1, 2337.97, .1, 0.16514261552369686),
    (1, 2452.66, .1, 0.14880635482534424),
    (1, 2470.12, .1, 0.14541298913266534),
    (2, 2930.59, .05, 0.019892388507915363),
    (2, 2943.44, .05, 0.018824538899522295),
    (2, 4991.92, .05, 0.0),
    (2, 4991.97, .05, 0.0),
    (3, 4778.87, .05, 0.0),
    (3, 4779.56, .05, 0.0),
    (3, 4944.72, .05, 0.0),
    (3, 4944.89, .05, 0.0),
]
FALL_ANALYTICS_OBSERVED = 2250.0
