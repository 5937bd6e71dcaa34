"""Numba kernels over packed adjacency rows.

Adjacency is an ``(n, W)`` array of ``uint64``; bit ``j & 63`` of word
``j >> 6`` in row ``i`` is set iff ``i`` and ``j`` are adjacent.  Every kernel
that loops over words takes ``wtag``, a tuple of ``W`` zeros: numba compiles
one specialisation per tuple length, which makes ``W`` a compile-time constant
and lets LLVM unroll the word loops.  Widths are powers of two (see
:func:`word_width`) so only a handful of specialisations ever exist.
"""

import numba as nb
import numpy as np
from numba.cpython.unsafe.numbers import trailing_zeros

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0

ONE = np.uint64(1)
ZERO = np.uint64(0)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


def word_width(n: int) -> int:
    """Row width in 64-bit words for ``n`` nodes, rounded up to a power of two."""
    words = max(1, (n + 63) >> 6)
    return 1 << (words - 1).bit_length()


def wtag(width: int) -> tuple:
    return (0,) * width


@nb.njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@nb.njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@nb.njit(cache=True)
def splitmix64_output(seed, index):
    """Output number ``index`` (0-based) of the SplitMix64 stream seeded with ``seed``."""
    return mix64(seed + (np.uint64(index) + ONE) * GOLDEN_GAMMA)


@nb.njit(cache=True)
def fill_gnp(n, p, seed, rows):
    """Overwrite ``rows`` with a G(n, p) sample.

    Pairs are visited row-major, (0,1), (0,2), ..., (0,n-1), (1,2), ...; pair
    number k consumes SplitMix64 output k of ``seed`` and the edge is present
    iff ``(output >> 11) * 2**-53 < p``.
    """
    rows[:, :] = ZERO
    state = seed
    for i in range(n):
        wi = i >> 6
        bi = ONE << np.uint64(i & 63)
        for j in range(i + 1, n):
            state += GOLDEN_GAMMA
            u = np.float64(mix64(state) >> np.uint64(11)) * _INV_2_53
            if u < p:
                rows[i, j >> 6] |= ONE << np.uint64(j & 63)
                rows[j, wi] |= bi


@nb.njit(cache=True)
def _full_mask(wtag, n):
    full = np.zeros(len(wtag), np.uint64)
    for v in range(n):
        full[v >> 6] |= ONE << np.uint64(v & 63)
    return full


@nb.njit(cache=True)
def _colors_reach(wtag, rows, P, need, U, Q):
    # greedy sequential colouring of P; True once `need` classes are used
    W = len(wtag)
    rem = 0
    for w in range(W):
        U[w] = P[w]
        rem += popcount64(P[w])
    k = 0
    while rem > 0:
        k += 1
        if k >= need:
            return True
        for w in range(W):
            Q[w] = U[w]
        for w in range(W):
            while Q[w] != ZERO:
                b = trailing_zeros(Q[w])
                v = w * 64 + b
                m = ~(ONE << np.uint64(b))
                U[w] &= m
                rem -= 1
                for x in range(W):
                    Q[x] &= ~rows[v, x]
                Q[w] &= m
    return False


@nb.njit(cache=True)
def count_maximal_cliques(wtag, rows, n, rmin, rmax, ycount, xcount, bound):
    """Count maximal cliques with ``rmin <= size <= rmax``.

    Bron-Kerbosch with Tomita pivoting over bitsets.  ``ycount[s]`` is
    incremented for every maximal clique of size ``s`` and ``xcount[s]`` when
    that clique is also dominating.  Subtrees that cannot reach ``rmin`` are
    cut by a size test and, when ``bound`` is set, by a greedy colouring test.
    """
    W = len(wtag)
    depth = rmax + 1
    P = np.zeros((depth, W), np.uint64)
    X = np.zeros((depth, W), np.uint64)
    D = np.zeros((depth, W), np.uint64)
    C = np.zeros((depth, W), np.uint64)
    U = np.empty(W, np.uint64)
    Q = np.empty(W, np.uint64)
    full = _full_mask(wtag, n)
    for w in range(W):
        P[0, w] = full[w]
    d = 0
    entering = True
    while d >= 0:
        if entering:
            entering = False
            pc = 0
            xany = ZERO
            for w in range(W):
                pc += popcount64(P[d, w])
                xany |= X[d, w]
            if pc == 0:
                if xany == ZERO and d >= rmin:
                    ycount[d] += 1
                    dom = True
                    for w in range(W):
                        if D[d, w] != full[w]:
                            dom = False
                    if dom:
                        xcount[d] += 1
                d -= 1
                continue
            if d == rmax or d + pc < rmin:
                d -= 1
                continue
            if bound and rmin - d > 2:
                if not _colors_reach(wtag, rows, P[d], rmin - d, U, Q):
                    d -= 1
                    continue
            piv = -1
            best = -1
            for w in range(W):
                q = P[d, w] | X[d, w]
                while q != ZERO:
                    b = trailing_zeros(q)
                    q &= q - ONE
                    u = w * 64 + b
                    c = 0
                    for x in range(W):
                        c += popcount64(P[d, x] & rows[u, x])
                    if c > best:
                        best = c
                        piv = u
            for w in range(W):
                C[d, w] = P[d, w] & ~rows[piv, w]
        v = -1
        for w in range(W):
            if C[d, w] != ZERO:
                b = trailing_zeros(C[d, w])
                C[d, w] &= ~(ONE << np.uint64(b))
                v = w * 64 + b
                break
        if v < 0:
            d -= 1
            continue
        vw = v >> 6
        vb = ONE << np.uint64(v & 63)
        for w in range(W):
            r = rows[v, w]
            P[d + 1, w] = P[d, w] & r
            X[d + 1, w] = X[d, w] & r
            D[d + 1, w] = D[d, w] | r
        D[d + 1, vw] |= vb
        P[d, vw] &= ~vb
        X[d, vw] |= vb
        d += 1
        entering = True


@nb.njit(cache=True)
def degeneracy_order(wtag, rows, n):
    """Repeatedly remove a minimum-degree vertex; returns the removal order."""
    deg = np.zeros(n, np.int64)
    for v in range(n):
        c = 0
        for w in range(len(wtag)):
            c += popcount64(rows[v, w])
        deg[v] = c
    alive = np.ones(n, np.bool_)
    out = np.empty(n, np.int64)
    for k in range(n):
        best = -1
        for v in range(n):
            if alive[v] and (best < 0 or deg[v] < deg[best]):
                best = v
        out[k] = best
        alive[best] = False
        bw = best >> 6
        bb = ONE << np.uint64(best & 63)
        for v in range(n):
            if alive[v] and (rows[v, bw] & bb) != ZERO:
                deg[v] -= 1
    return out


@nb.njit(cache=True)
def permute_rows(wtag, rows, n, perm):
    """Relabel so that new node ``i`` is old node ``perm[i]``."""
    out = np.zeros_like(rows)
    for i in range(n):
        src = perm[i]
        for k in range(n):
            t = perm[k]
            if (rows[src, t >> 6] >> np.uint64(t & 63)) & ONE:
                out[i, k >> 6] |= ONE << np.uint64(k & 63)
    return out


@nb.njit(cache=True)
def root_coloring(wtag, rows, n):
    """Greedy colour classes of the whole graph, vertices listed by colour."""
    W = len(wtag)
    U = _full_mask(wtag, n)
    Q = np.empty(W, np.uint64)
    order = np.empty(n, np.int64)
    color = np.empty(n, np.int64)
    rem = n
    k = 0
    idx = 0
    while rem > 0:
        k += 1
        for w in range(W):
            Q[w] = U[w]
        for w in range(W):
            while Q[w] != ZERO:
                b = trailing_zeros(Q[w])
                v = w * 64 + b
                m = ~(ONE << np.uint64(b))
                U[w] &= m
                rem -= 1
                for x in range(W):
                    Q[x] &= ~rows[v, x]
                Q[w] &= m
                order[idx] = v
                color[idx] = k
                idx += 1
    return order, color


@nb.njit(cache=True)
def take_child(wtag, rows, cand, v, verts):
    """Remove ``v`` from ``cand`` and list ``cand & N(v)`` into ``verts``."""
    cand[v >> 6] &= ~(ONE << np.uint64(v & 63))
    m = 0
    for w in range(len(wtag)):
        q = cand[w] & rows[v, w]
        while q != ZERO:
            b = trailing_zeros(q)
            q &= q - ONE
            verts[m] = w * 64 + b
            m += 1
    return m


@nb.njit(cache=True)
def induced_rows(wtag, rows, verts, m, rank, local):
    """Adjacency of the subgraph induced on ``verts[:m]``, relabelled 0..m-1."""
    W = len(wtag)
    sel = np.zeros(W, np.uint64)
    for a in range(m):
        u = verts[a]
        rank[u] = a
        sel[u >> 6] |= ONE << np.uint64(u & 63)
    for a in range(m):
        u = verts[a]
        for w in range(W):
            q = sel[w] & rows[u, w]
            while q != ZERO:
                b = trailing_zeros(q)
                q &= q - ONE
                c = rank[w * 64 + b]
                local[a, c >> 6] |= ONE << np.uint64(c & 63)


@nb.njit(cache=True)
def clique_search(wtag, rows, n, d0, best):
    """Branch and bound for a clique larger than ``best`` on top of ``d0`` chosen vertices.

    Every vertex of ``rows`` is assumed adjacent to the ``d0`` vertices
    already chosen.  Bounds come from greedy colouring in index order; only
    vertices whose colour can still beat ``best`` are kept for branching.
    Returns the improved (or unchanged) ``best``.
    """
    W = len(wtag)
    P = np.zeros((n + 1, W), np.uint64)
    order = np.empty((n + 1, n), np.int32)
    color = np.empty((n + 1, n), np.int32)
    pos = np.empty(n + 1, np.int64)
    U = np.empty(W, np.uint64)
    Q = np.empty(W, np.uint64)
    full = _full_mask(wtag, n)
    for w in range(W):
        P[0, w] = full[w]
    d = 0
    while True:
        kmin = best - d0 - d + 1
        if kmin < 1:
            kmin = 1
        rem = 0
        for w in range(W):
            U[w] = P[d, w]
            rem += popcount64(U[w])
        k = 0
        idx = 0
        while rem > 0:
            k += 1
            for w in range(W):
                Q[w] = U[w]
            for w in range(W):
                while Q[w] != ZERO:
                    b = trailing_zeros(Q[w])
                    v = w * 64 + b
                    m = ~(ONE << np.uint64(b))
                    U[w] &= m
                    rem -= 1
                    for x in range(W):
                        Q[x] &= ~rows[v, x]
                    Q[w] &= m
                    if k >= kmin:
                        order[d, idx] = v
                        color[d, idx] = k
                        idx += 1
        pos[d] = idx - 1
        while d >= 0:
            i = pos[d]
            if i < 0 or d0 + d + color[d, i] <= best:
                d -= 1
                continue
            v = order[d, i]
            pos[d] = i - 1
            P[d, v >> 6] &= ~(ONE << np.uint64(v & 63))
            acc = ZERO
            for w in range(W):
                x = P[d, w] & rows[v, w]
                P[d + 1, w] = x
                acc |= x
            if acc == ZERO:
                if d0 + d + 1 > best:
                    best = d0 + d + 1
                continue
            break
        if d < 0:
            break
        d += 1
    return best


@nb.njit(cache=True)
def small_graph_table(n):
    """Maximal and dominating clique counts by size for every graph on n <= 6 nodes.

    Graph number ``mask`` has pair k (row-major, i < j) present iff bit k of
    ``mask`` is set.  Returns ``(edges, ytab, xtab)`` with ``ytab[mask, s]``
    the number of maximal s-cliques.
    """
    M = n * (n - 1) // 2
    G = 1 << M
    pi = np.empty(M, np.int64)
    pj = np.empty(M, np.int64)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            pi[k] = i
            pj[k] = j
            k += 1
    edges = np.zeros(G, np.int64)
    ytab = np.zeros((G, n + 1), np.int64)
    xtab = np.zeros((G, n + 1), np.int64)
    rows = np.zeros((max(n, 1), 1), np.uint64)
    for mask in range(G):
        rows[:, :] = ZERO
        e = 0
        for k in range(M):
            if (mask >> k) & 1:
                rows[pi[k], 0] |= ONE << np.uint64(pj[k])
                rows[pj[k], 0] |= ONE << np.uint64(pi[k])
                e += 1
        edges[mask] = e
        count_maximal_cliques((0,), rows, n, 1, n, ytab[mask], xtab[mask], False)
    return edges, ytab, xtab


@nb.njit(cache=True)
def trial_counts(wtag, n, p, rmin, rmax, master, start, stop, xs, ys):
    """Dominating and maximal clique counts, summed over sizes ``rmin..rmax``,
    for trials ``start..stop-1`` of the stream rooted at ``master``."""
    rows = np.zeros((max(n, 1), len(wtag)), np.uint64)
    yc = np.zeros(rmax + 1, np.int64)
    xc = np.zeros(rmax + 1, np.int64)
    for t in range(start, stop):
        seed = splitmix64_output(master, t)
        fill_gnp(n, p, seed, rows)
        yc[:] = 0
        xc[:] = 0
        count_maximal_cliques(wtag, rows, n, rmin, rmax, yc, xc, True)
        xs[t - start] = xc.sum()
        ys[t - start] = yc.sum()
