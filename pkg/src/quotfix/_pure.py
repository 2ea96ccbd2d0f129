"""Pure-Python/NumPy implementations of the hot kernels.

The compiled module ``quotfix._kernels`` provides the same functions with
identical contracts; ``quotfix._backend`` picks whichever is available. Keep
the two in sync: tests compare them on random inputs.
"""

from __future__ import annotations

import numpy as np


def gfp_rref(a: np.ndarray, p: int) -> int:
    """Reduced row echelon form of ``a`` modulo the prime ``p``, in place.

    Entries must already lie in [0, p). Returns the rank.
    """
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r, :] = (a[r, :] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            a[mask, :] = (a[mask, :] - np.outer(col[mask], a[r, :])) % p
        r += 1
    return r


def label_components(cells: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """Component labels for packed cells under ``x ~ x + s`` adjacency.

    ``cells`` must be sorted and duplicate-free. Labels are normalized so that
    component k has the k-th smallest minimal cell.
    """
    n = cells.size
    if n == 0:
        return np.empty(0, dtype=np.int64)
    us = []
    vs = []
    for s in steps:
        nb = cells + np.int64(s)
        idx = np.searchsorted(cells, nb)
        cand = np.flatnonzero(idx < n)
        hit = cand[cells[idx[cand]] == nb[cand]]
        us.append(hit)
        vs.append(idx[hit])
    u = np.concatenate(us) if us else np.empty(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.empty(0, dtype=np.int64)

    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    graph = coo_matrix(
        (np.ones(u.size, dtype=np.int8), (u, v)), shape=(n, n)
    )
    ncomp, labels = connected_components(graph, directed=False)
    _, first = np.unique(labels, return_index=True)
    remap = np.empty(ncomp, dtype=np.int64)
    remap[np.argsort(first, kind="stable")] = np.arange(ncomp, dtype=np.int64)
    return remap[labels]


def grouped_min(keys: np.ndarray, vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minimum of ``vals`` per distinct key. Returns (sorted unique keys, mins)."""
    if keys.size == 0:
        return keys.copy(), vals.copy()
    order = np.argsort(keys, kind="stable")  # radix sort on int64
    k = keys[order]
    head = np.empty(k.size, dtype=bool)
    head[0] = True
    head[1:] = k[1:] != k[:-1]
    starts = np.flatnonzero(head)
    return k[head].copy(), np.minimum.reduceat(vals[order], starts)


def merge_indices(hay: np.ndarray, needles: np.ndarray) -> np.ndarray:
    """Index of each needle in ``hay``, or -1; both arrays must be sorted."""
    if hay.size == 0:
        return np.full(needles.size, -1, dtype=np.int64)
    idx = np.searchsorted(hay, needles).astype(np.int64, copy=False)
    np.minimum(idx, hay.size - 1, out=idx)
    idx[hay[idx] != needles] = -1
    return idx


def merge_min(chunks_c: list, chunks_v: list) -> tuple[np.ndarray, np.ndarray]:
    """grouped_min over the union of several sorted key arrays."""
    if not chunks_c:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy()
    return grouped_min(np.concatenate(chunks_c), np.concatenate(chunks_v))


def supercover(anum: np.ndarray, bnum: np.ndarray, den: int) -> np.ndarray:
    """Cells of Z_{>=0}^m whose closed unit box meets the segment a -> b.

    Endpoints are given as integer numerators over the common denominator
    ``den``. Cells with a negative index are clipped (the grid covers the
    nonnegative orthant only). Output rows may repeat; order is unspecified.
    """
    m = len(anum)
    anum = [int(x) for x in anum]
    bnum = [int(x) for x in bnum]
    den = int(den)
    out: list[list[int]] = []
    cell = [0] * m

    def rec(j: int, t0n: int, t0d: int, t1n: int, t1d: int) -> None:
        if j == m:
            out.append(cell.copy())
            return
        aj = anum[j]
        dj = bnum[j] - anum[j]
        v0n, v0d = aj * t0d + t0n * dj, den * t0d
        v1n, v1d = aj * t1d + t1n * dj, den * t1d
        if v0n * v1d <= v1n * v0d:
            lon, lod, hin, hid = v0n, v0d, v1n, v1d
        else:
            lon, lod, hin, hid = v1n, v1d, v0n, v0d
        kmin = -((-lon) // lod) - 1  # ceil(lo) - 1
        kmax = hin // hid  # floor(hi)
        if kmin < 0:
            kmin = 0
        for k in range(kmin, kmax + 1):
            if dj == 0:
                cell[j] = k
                rec(j + 1, t0n, t0d, t1n, t1d)
                continue
            if dj > 0:
                lo_n, lo_d = k * den - aj, dj
                hi_n, hi_d = (k + 1) * den - aj, dj
            else:
                lo_n, lo_d = aj - (k + 1) * den, -dj
                hi_n, hi_d = aj - k * den, -dj
            # intersect [lo, hi] with [t0, t1]
            nt0n, nt0d = (t0n, t0d) if t0n * lo_d >= lo_n * t0d else (lo_n, lo_d)
            nt1n, nt1d = (t1n, t1d) if t1n * hi_d <= hi_n * t1d else (hi_n, hi_d)
            if nt0n * nt1d <= nt1n * nt0d:
                cell[j] = k
                rec(j + 1, nt0n, nt0d, nt1n, nt1d)

    rec(0, 0, 1, 1, 1)
    return np.array(out, dtype=np.int64).reshape(len(out), m)
