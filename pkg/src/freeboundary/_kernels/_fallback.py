"""Pure-Python (numpy) implementations of the hot loops.

Signatures mirror the compiled ``_core`` module exactly.
"""
import numpy as np

_CHUNK = 1 << 16


def pair_exponent_buckets(adj, lengths, cells, weights, nbuckets):
    """Bucket sums of ``W[c_i, c_j]`` over ordered pairs ``i != j`` of terms.

    Terms are in lexicographic order, so ``lcp(i, j)`` is the minimum of the
    adjacent common-prefix lengths ``adj[i:j]``. The bucket of a pair is
    ``len_i + len_j - 2 lcp``.
    """
    adj = np.asarray(adj, dtype=np.int64)
    lengths = np.asarray(lengths, dtype=np.int64)
    cells = np.asarray(cells, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.int64)
    out = np.zeros(nbuckets, dtype=np.int64)
    t = len(lengths)
    for i in range(t - 1):
        lcp = np.minimum.accumulate(adj[i:])
        idx = lengths[i] + lengths[i + 1:] - 2 * lcp
        w = weights[cells[i], cells[i + 1:]] + weights[cells[i + 1:], cells[i]]
        np.add.at(out, idx, w)
    return out


def _matchings(M, a, b, c, d):
    m1 = M[a, b] + M[c, d]
    m2 = M[a, c] + M[b, d]
    m3 = M[a, d] + M[b, c]
    return m1 - m3, m2 - m3


def quad_mismatch(E, img, quads):
    """Flag quadruples whose two independent cross-ratios change under ``img``.

    ``E[i, j]`` is the exponent vector of ``d(i, j)`` over a coprime base, so
    products of distances compare exactly as sums of exponents.
    """
    E = np.asarray(E, dtype=np.int64)
    img = np.asarray(img, dtype=np.int64)
    quads = np.asarray(quads, dtype=np.int64)
    out = np.zeros(len(quads), dtype=np.uint8)
    for s in range(0, len(quads), _CHUNK):
        q = quads[s:s + _CHUNK]
        a, b, c, d = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
        r1, r2 = _matchings(E, a, b, c, d)
        s1, s2 = _matchings(E, img[a], img[b], img[c], img[d])
        bad = np.any(r1 != s1, axis=1) | np.any(r2 != s2, axis=1)
        out[s:s + _CHUNK] = bad
    return out


def quad_log_deviation(logd, img, quads):
    """``max |CR(g q) / CR(q) - 1|`` over the two independent cross-ratios."""
    logd = np.asarray(logd, dtype=np.float64)
    img = np.asarray(img, dtype=np.int64)
    quads = np.asarray(quads, dtype=np.int64)
    out = np.zeros(len(quads), dtype=np.float64)
    for s in range(0, len(quads), _CHUNK):
        q = quads[s:s + _CHUNK]
        a, b, c, d = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
        r1, r2 = _matchings(logd, a, b, c, d)
        s1, s2 = _matchings(logd, img[a], img[b], img[c], img[d])
        out[s:s + _CHUNK] = np.maximum(np.abs(np.expm1(s1 - r1)), np.abs(np.expm1(s2 - r2)))
    return out


def triangle_candidates(D, rtol):
    """Triples ``(i, j, k)``, ``j`` distinct from ``i, k``, with
    ``D[i,k] > (D[i,j] + D[j,k]) * (1 - rtol)``."""
    D = np.asarray(D, dtype=np.float64)
    found = []
    for j in range(D.shape[0]):
        via = D[:, j, None] + D[None, j, :]
        hits = np.argwhere(D > via * (1.0 - rtol))
        for i, k in hits:
            if i != j and k != j:
                found.append((int(i), j, int(k)))
    return np.array(found, dtype=np.int64).reshape(-1, 3)
