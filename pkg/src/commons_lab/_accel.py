"""Hot kernels for sparse weighted homomorphism counting.

The target is integer-scaled and stored in CSR form with sorted column
indices per row; the pattern is compiled into a placement plan (see
``homomorphism._plan``). Two interchangeable backends evaluate the same sum:

* ``numba``: a depth-first enumeration compiled with ``@njit`` (int64 only);
* ``numpy``: breadth-first frontier expansion, vectorised, works for int64
  and for object arrays of Python ints (exact, no overflow).

Set ``COMMONS_LAB_NUMBA=0`` to force the numpy path everywhere.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_ENV = "COMMONS_LAB_NUMBA"

try:  # pragma: no cover - exercised implicitly
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False


def numba_enabled() -> bool:
    return _HAVE_NUMBA and os.environ.get(NUMBA_ENV, "1").strip().lower() not in ("0", "false", "no", "off")


def _hom_csr_py(anchor, back_ptr, back_pos, indptr, indices, data, node_w, roots):
    k = anchor.shape[0]
    assign = np.zeros(k, np.int64)
    cursor = np.zeros(k, np.int64)
    stop = np.zeros(k, np.int64)
    acc = np.zeros(k, np.int64)
    total = 0
    for r in range(roots.shape[0]):
        root = roots[r]
        w0 = node_w[root]
        if w0 == 0:
            continue
        if k == 1:
            total += w0
            continue
        assign[0] = root
        acc[0] = w0
        depth = 1
        a = assign[anchor[1]]
        cursor[1] = indptr[a]
        stop[1] = indptr[a + 1]
        while depth >= 1:
            if cursor[depth] >= stop[depth]:
                depth -= 1
                continue
            p = cursor[depth]
            cursor[depth] += 1
            cand = indices[p]
            w = acc[depth - 1] * data[p] * node_w[cand]
            if w == 0:
                continue
            for q in range(back_ptr[depth], back_ptr[depth + 1]):
                u = assign[back_pos[q]]
                lo = indptr[u]
                hi = indptr[u + 1]
                end = hi
                while lo < hi:
                    mid = (lo + hi) // 2
                    if indices[mid] < cand:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < end and indices[lo] == cand:
                    w *= data[lo]
                else:
                    w = 0
                    break
            if w == 0:
                continue
            if depth == k - 1:
                total += w
            else:
                assign[depth] = cand
                acc[depth] = w
                depth += 1
                a = assign[anchor[depth]]
                cursor[depth] = indptr[a]
                stop[depth] = indptr[a + 1]
    return total


if _HAVE_NUMBA:
    _hom_csr_jit = numba.njit(cache=True, nogil=True)(_hom_csr_py)
else:  # pragma: no cover
    _hom_csr_jit = None


def hom_csr_numba(plan, csr, node_w, roots) -> int:
    """int64 enumeration; the caller guarantees no overflow."""
    if _hom_csr_jit is None:  # pragma: no cover
        raise RuntimeError("numba is not available")
    anchor, back_ptr, back_pos = plan
    indptr, indices, data = csr
    return int(
        _hom_csr_jit(
            anchor, back_ptr, back_pos, indptr, indices, data.astype(np.int64), node_w.astype(np.int64), roots
        )
    )


def _lookup(keys, data, rows, cols, n):
    """Weights at (rows, cols); 0 where the pair is absent."""
    q = rows.astype(np.int64) * n + cols
    pos = np.searchsorted(keys, q)
    pos_c = np.minimum(pos, keys.shape[0] - 1)
    hit = keys[pos_c] == q
    out = np.zeros(q.shape[0], dtype=data.dtype)
    if data.dtype == object:
        out[:] = 0
    out[hit] = data[pos_c[hit]]
    return out


def hom_csr_numpy(plan, csr, node_w, roots, chunk: int = 4096) -> int:
    """Frontier expansion; exact for int64 (bounded) and object dtypes."""
    anchor, back_ptr, back_pos = plan
    indptr, indices, data = csr
    n = indptr.shape[0] - 1
    k = anchor.shape[0]
    rows_of = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    keys = rows_of * n + indices
    total = 0
    for start in range(0, roots.shape[0], chunk):
        r = roots[start : start + chunk]
        w = node_w[r]
        keep = w != 0
        assign = r[keep].reshape(-1, 1)
        w = w[keep]
        for depth in range(1, k):
            if assign.shape[0] == 0:
                break
            a = assign[:, anchor[depth]]
            starts = indptr[a]
            counts = indptr[a + 1] - starts
            rep = np.repeat(np.arange(assign.shape[0]), counts)
            offsets = np.cumsum(counts) - counts
            pos = starts[rep] + (np.arange(rep.shape[0]) - offsets[rep])
            cand = indices[pos]
            nw = w[rep] * data[pos] * node_w[cand]
            for q in range(back_ptr[depth], back_ptr[depth + 1]):
                nw = nw * _lookup(keys, data, assign[rep, back_pos[q]], cand, n)
            keep = nw != 0
            assign = np.concatenate([assign[rep[keep]], cand[keep].reshape(-1, 1)], axis=1)
            w = nw[keep]
        if assign.shape[0]:
            total += int(w.sum()) if w.dtype != object else sum(w.tolist())
    return total
