"""Hot integer kernels with a numba @njit backend and a pure-NumPy fallback.

The three loops that dominate runtime on large hypothesis structures live
here: maximum bipartite matching (Hopcroft-Karp over CSR adjacency),
attribute closure with per-fd unsatisfied-lhs counters, and attribute
folding.  Each kernel is written once as a plain function over NumPy arrays;
the jitted variant is the same code object compiled with numba.

Backend selection: numba is used when importable unless the environment
variable ``HYPODB_DISABLE_NUMBA`` is set to a non-empty value, in which case
the interpreted fallback runs.  Both backends execute identical code, so
results are bit-for-bit identical; ``hypodb bench`` compares their timings.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    _HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAS_NUMBA = False

_INF = np.int64(1) << 60


def numba_enabled() -> bool:
    return _HAS_NUMBA and not os.environ.get("HYPODB_DISABLE_NUMBA")


def backend_name() -> str:
    return "numba" if numba_enabled() else "python"


# ---------------------------------------------------------------------------
# Hopcroft-Karp maximum matching on a bipartite CSR graph.
# ---------------------------------------------------------------------------

def _hopcroft_karp(indptr, indices, n_left, n_right):
    """Maximum matching; returns (match_left, match_right, matched count).

    Adjacency order is significant: the greedy seeding pass and the
    augmenting DFS both scan neighbours in CSR order, which makes the
    returned matching deterministic for a fixed input ordering.
    """
    match_l = np.full(n_left, -1, np.int64)
    match_r = np.full(n_right, -1, np.int64)
    matched = 0
    for u in range(n_left):
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if match_r[v] == -1:
                match_r[v] = u
                match_l[u] = v
                matched += 1
                break
    dist = np.zeros(n_left, np.int64)
    queue = np.zeros(n_left, np.int64)
    stack_u = np.zeros(n_left + 1, np.int64)
    stack_k = np.zeros(n_left + 1, np.int64)
    while True:
        # BFS phase: layer left vertices by alternating-path depth.
        qh = 0
        qt = 0
        free_right = False
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue[qt] = u
                qt += 1
            else:
                dist[u] = _INF
        while qh < qt:
            u = queue[qh]
            qh += 1
            for k in range(indptr[u], indptr[u + 1]):
                w = match_r[indices[k]]
                if w == -1:
                    free_right = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue[qt] = w
                    qt += 1
        if not free_right:
            break
        # DFS phase: vertex-disjoint shortest augmenting paths.
        for u0 in range(n_left):
            if match_l[u0] != -1:
                continue
            top = 0
            stack_u[0] = u0
            stack_k[0] = indptr[u0]
            while top >= 0:
                u = stack_u[top]
                k = stack_k[top]
                if k >= indptr[u + 1]:
                    dist[u] = _INF
                    top -= 1
                    if top >= 0:
                        stack_k[top] += 1
                    continue
                v = indices[k]
                w = match_r[v]
                if w == -1:
                    for t in range(top, -1, -1):
                        uu = stack_u[t]
                        vv = indices[stack_k[t]]
                        match_l[uu] = vv
                        match_r[vv] = uu
                    matched += 1
                    top = -1
                elif dist[w] == dist[u] + 1:
                    top += 1
                    stack_u[top] = w
                    stack_k[top] = indptr[w]
                else:
                    stack_k[top] += 1
    return match_l, match_r, matched


# ---------------------------------------------------------------------------
# Attribute closure with the per-fd unsatisfied-lhs counter optimization.
# ---------------------------------------------------------------------------

def _x_closure(lhs_indptr, lhs_indices, rhs_indptr, rhs_indices,
               occ_indptr, occ_indices, n_attrs, seed):
    """Closure of ``seed`` under the fds; linear in total fd length.

    ``occ_*`` is the transposed index: for each attribute, the fds whose lhs
    contains it.  A counter per fd tracks how many of its lhs attributes are
    still outside the closure; the fd fires when the counter hits zero.
    """
    n_fds = lhs_indptr.shape[0] - 1
    count = np.empty(n_fds, np.int64)
    for j in range(n_fds):
        count[j] = lhs_indptr[j + 1] - lhs_indptr[j]
    closed = np.zeros(n_attrs, np.uint8)
    queue = np.empty(n_attrs, np.int64)
    qt = 0
    for s in range(seed.shape[0]):
        a = seed[s]
        if closed[a] == 0:
            closed[a] = 1
            queue[qt] = a
            qt += 1
    qh = 0
    while qh < qt:
        a = queue[qh]
        qh += 1
        for o in range(occ_indptr[a], occ_indptr[a + 1]):
            j = occ_indices[o]
            count[j] -= 1
            if count[j] == 0:
                for r in range(rhs_indptr[j], rhs_indptr[j + 1]):
                    b = rhs_indices[r]
                    if closed[b] == 0:
                        closed[b] = 1
                        queue[qt] = b
                        qt += 1
    return closed


# ---------------------------------------------------------------------------
# Attribute folding (acyclic pseudo-transitive reasoning).
# ---------------------------------------------------------------------------

def _a_folding(rhs_attr, lhs_indptr, lhs_indices, occ_indptr, occ_indices,
               n_attrs, target, in_astar, in_lambda, consumed, in_cur):
    """One attribute folding; fills the scratch arrays and returns pass count.

    Scans the fd list in insertion order in repeated passes, consuming any fd
    whose rhs already lies in the reached set, until a pass adds nothing.  A
    consumed rhs B is reinstated when some earlier-consumed attribute in its
    own lhs depends mutually on B (a causal cycle), which keeps cycle
    partners in the folded lhs.  The cycle test scans B's occurrence list
    (the fds whose lhs contains B), so one folding costs O(total fd length).
    """
    n_fds = rhs_attr.shape[0]
    in_astar[target] = 1
    astar_count = 1
    size = 0
    passes = 0
    while size < astar_count:
        size = astar_count
        passes += 1
        for j in range(n_fds):
            if consumed[j] == 1:
                continue
            b = rhs_attr[j]
            if in_astar[b] == 0:
                continue
            consumed[j] = 1
            in_lambda[b] = 1
            for k in range(lhs_indptr[j], lhs_indptr[j + 1]):
                in_cur[lhs_indices[k]] = 1
            # cyclic fd: an already-consumed <X, C> with C in this lhs and
            # B in X reinstates B (simulates the cyclic application of R5)
            for o in range(occ_indptr[b], occ_indptr[b + 1]):
                j2 = occ_indices[o]
                if consumed[j2] == 1:
                    c2 = rhs_attr[j2]
                    if in_cur[c2] == 1 and in_lambda[c2] == 1:
                        in_lambda[b] = 0
                        break
            for k in range(lhs_indptr[j], lhs_indptr[j + 1]):
                c = lhs_indices[k]
                in_cur[c] = 0
                if in_astar[c] == 0:
                    in_astar[c] = 1
                    astar_count += 1
    return passes


def _folding_all(rhs_attr, lhs_indptr, lhs_indices, occ_indptr, occ_indices, n_attrs):
    """Folding of every fd in the set; returns CSR (out_indptr, out_indices).

    Output fd j has the same rhs as input fd j and lhs equal to the attribute
    folding of that rhs, emitted in ascending attribute order.  Scratch
    arrays are cleared through the reached set, not wholesale, so the
    combined cost stays proportional to total reachable fd length.
    """
    n_fds = rhs_attr.shape[0]
    in_astar = np.zeros(n_attrs, np.uint8)
    in_lambda = np.zeros(n_attrs, np.uint8)
    consumed = np.zeros(n_fds, np.uint8)
    in_cur = np.zeros(n_attrs, np.uint8)
    out_indptr = np.zeros(n_fds + 1, np.int64)
    cap = lhs_indices.shape[0] + n_fds
    buf = np.zeros(cap, np.int64)
    pos = 0
    for j in range(n_fds):
        _a_folding(rhs_attr, lhs_indptr, lhs_indices, occ_indptr, occ_indices,
                   n_attrs, rhs_attr[j], in_astar, in_lambda, consumed, in_cur)
        n = 0
        for a in range(n_attrs):
            if in_astar[a] == 1 and in_lambda[a] == 0:
                n += 1
        if pos + n > cap:
            cap = 2 * cap + n
            grown = np.zeros(cap, np.int64)
            grown[:pos] = buf[:pos]
            buf = grown
        for a in range(n_attrs):
            if in_astar[a] == 1:
                if in_lambda[a] == 0:
                    buf[pos] = a
                    pos += 1
                in_lambda[a] = 0
                in_astar[a] = 0
        for j2 in range(n_fds):
            consumed[j2] = 0
        out_indptr[j + 1] = pos
    return out_indptr, buf[:pos].copy()


# ---------------------------------------------------------------------------
# Structure -> fd arrays encoder.
# ---------------------------------------------------------------------------

def _encode_fds(indptr, indices, match_l, domain_mask, n_vars):
    """Encode matched equations into fd CSR arrays.

    Attribute ids: variables keep their index, ``n_vars`` is phi and
    ``n_vars + 1`` is upsilon.  Equations mapped to a domain variable with an
    all-domain remainder emit nothing (the suppressed dimension fd).
    """
    phi = n_vars
    ups = n_vars + 1
    n_eq = indptr.shape[0] - 1
    kinds = np.zeros(n_eq, np.int64)  # 0 skip, 1 exogenous, 2 endogenous
    sizes = np.zeros(n_eq, np.int64)
    for i in range(n_eq):
        x = match_l[i]
        z_len = 0
        z_nondom = 0
        for k in range(indptr[i], indptr[i + 1]):
            v = indices[k]
            if v == x:
                continue
            z_len += 1
            if domain_mask[v] == 0:
                z_nondom += 1
        if z_len == 0 or z_nondom == 0:
            if domain_mask[x] == 0:
                kinds[i] = 1
                sizes[i] = z_len + 1
        else:
            kinds[i] = 2
            sizes[i] = z_len + 1
    n_out = 0
    total = 0
    for i in range(n_eq):
        if kinds[i] != 0:
            n_out += 1
            total += sizes[i]
    lhs_indptr = np.zeros(n_out + 1, np.int64)
    lhs_indices = np.zeros(total, np.int64)
    rhs_attr = np.zeros(n_out, np.int64)
    j = 0
    pos = 0
    for i in range(n_eq):
        if kinds[i] == 0:
            continue
        x = match_l[i]
        rhs_attr[j] = x
        for k in range(indptr[i], indptr[i + 1]):
            v = indices[k]
            if v != x:
                lhs_indices[pos] = v
                pos += 1
        lhs_indices[pos] = phi if kinds[i] == 1 else ups
        pos += 1
        j += 1
        lhs_indptr[j] = pos
    return lhs_indptr, lhs_indices, rhs_attr


# ---------------------------------------------------------------------------
# Backend dispatch.
# ---------------------------------------------------------------------------

if _HAS_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    _hopcroft_karp_jit = _jit(_hopcroft_karp)
    _x_closure_jit = _jit(_x_closure)
    _a_folding_jit = _jit(_a_folding)
    _encode_fds_jit = _jit(_encode_fds)
else:  # pragma: no cover
    _hopcroft_karp_jit = _x_closure_jit = _a_folding_jit = _encode_fds_jit = None


def _make_jitted_folding_all():
    # _folding_all calls _a_folding by name; the jitted variant must call the
    # jitted inner kernel, so it is rebuilt as a closure over it.
    if not _HAS_NUMBA:  # pragma: no cover
        return None
    afold = _a_folding_jit

    @numba.njit(cache=True, nogil=True)
    def folding_all(rhs_attr, lhs_indptr, lhs_indices, occ_indptr, occ_indices, n_attrs):
        n_fds = rhs_attr.shape[0]
        in_astar = np.zeros(n_attrs, np.uint8)
        in_lambda = np.zeros(n_attrs, np.uint8)
        consumed = np.zeros(n_fds, np.uint8)
        in_cur = np.zeros(n_attrs, np.uint8)
        out_indptr = np.zeros(n_fds + 1, np.int64)
        cap = lhs_indices.shape[0] + n_fds
        buf = np.zeros(cap, np.int64)
        pos = 0
        for j in range(n_fds):
            afold(rhs_attr, lhs_indptr, lhs_indices, occ_indptr, occ_indices,
                  n_attrs, rhs_attr[j], in_astar, in_lambda, consumed, in_cur)
            n = 0
            for a in range(n_attrs):
                if in_astar[a] == 1 and in_lambda[a] == 0:
                    n += 1
            if pos + n > cap:
                cap = 2 * cap + n
                grown = np.zeros(cap, np.int64)
                grown[:pos] = buf[:pos]
                buf = grown
            for a in range(n_attrs):
                if in_astar[a] == 1:
                    if in_lambda[a] == 0:
                        buf[pos] = a
                        pos += 1
                    in_lambda[a] = 0
                    in_astar[a] = 0
            for j2 in range(n_fds):
                consumed[j2] = 0
            out_indptr[j + 1] = pos
        return out_indptr, buf[:pos].copy()

    return folding_all


_folding_all_jit = _make_jitted_folding_all()


def hopcroft_karp(indptr, indices, n_left, n_right):
    if numba_enabled():
        return _hopcroft_karp_jit(indptr, indices, n_left, n_right)
    return _hopcroft_karp(indptr, indices, n_left, n_right)


def x_closure_mask(lhs_indptr, lhs_indices, rhs_indptr, rhs_indices,
                   occ_indptr, occ_indices, n_attrs, seed):
    if numba_enabled():
        return _x_closure_jit(lhs_indptr, lhs_indices, rhs_indptr, rhs_indices,
                              occ_indptr, occ_indices, n_attrs, seed)
    return _x_closure(lhs_indptr, lhs_indices, rhs_indptr, rhs_indices,
                      occ_indptr, occ_indices, n_attrs, seed)


def a_folding_mask(rhs_attr, lhs_indptr, lhs_indices, occ_indptr, occ_indices,
                   n_attrs, target):
    n_fds = rhs_attr.shape[0]
    in_astar = np.zeros(n_attrs, np.uint8)
    in_lambda = np.zeros(n_attrs, np.uint8)
    consumed = np.zeros(n_fds, np.uint8)
    in_cur = np.zeros(n_attrs, np.uint8)
    fn = _a_folding_jit if numba_enabled() else _a_folding
    fn(rhs_attr, lhs_indptr, lhs_indices, occ_indptr, occ_indices,
       n_attrs, target, in_astar, in_lambda, consumed, in_cur)
    return (in_astar == 1) & (in_lambda == 0)


def folding_all(rhs_attr, lhs_indptr, lhs_indices, occ_indptr, occ_indices, n_attrs):
    if numba_enabled():
        return _folding_all_jit(rhs_attr, lhs_indptr, lhs_indices,
                                occ_indptr, occ_indices, n_attrs)
    return _folding_all(rhs_attr, lhs_indptr, lhs_indices,
                        occ_indptr, occ_indices, n_attrs)


def encode_fds(indptr, indices, match_l, domain_mask, n_vars):
    if numba_enabled():
        return _encode_fds_jit(indptr, indices, match_l, domain_mask, n_vars)
    return _encode_fds(indptr, indices, match_l, domain_mask, n_vars)


def warmup() -> None:
    """Compile the jitted kernels on tiny inputs (no-op on the fallback)."""
    indptr = np.array([0, 1, 2], np.int64)
    indices = np.array([0, 1], np.int64)
    hopcroft_karp(indptr, indices, 2, 2)
    seed = np.array([0], np.int64)
    occ_indptr = np.array([0, 1, 1], np.int64)
    occ_indices = np.array([0], np.int64)
    rhs_indptr = np.array([0, 1], np.int64)
    rhs_indices = np.array([1], np.int64)
    lhs_indptr = np.array([0, 1], np.int64)
    lhs_indices = np.array([0], np.int64)
    x_closure_mask(lhs_indptr, lhs_indices, rhs_indptr, rhs_indices,
                   occ_indptr, occ_indices, 2, seed)
    rhs_attr = np.array([1], np.int64)
    a_folding_mask(rhs_attr, lhs_indptr, lhs_indices, occ_indptr, occ_indices, 2, 1)
    folding_all(rhs_attr, lhs_indptr, lhs_indices, occ_indptr, occ_indices, 2)
    match_l = np.array([0, 1], np.int64)
    domain_mask = np.zeros(2, np.uint8)
    encode_fds(indptr, indices, match_l, domain_mask, 2)
