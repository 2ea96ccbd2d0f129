# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels. Contracts match quotfix._pure."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef long long _modinv(long long a, long long p):
    # extended Euclid; a in (0, p), p prime
    cdef long long old_r = a, r = p
    cdef long long old_s = 1, s = 0
    cdef long long q, tmp
    while r != 0:
        q = old_r // r
        tmp = old_r - q * r
        old_r = r
        r = tmp
        tmp = old_s - q * s
        old_s = s
        s = tmp
    old_s %= p
    if old_s < 0:
        old_s += p
    return old_s


def gfp_rref(cnp.ndarray[cnp.int64_t, ndim=2] a, long long p):
    """Reduced row echelon form modulo prime p, in place. Returns the rank."""
    cdef Py_ssize_t rows = a.shape[0], cols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef long long inv, f, tmp
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        inv = _modinv(a[r, c], p)
        for j in range(cols):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(rows):
            if i == r:
                continue
            f = a[i, c]
            if f == 0:
                continue
            for j in range(cols):
                a[i, j] = (a[i, j] - f * a[r, j]) % p
                if a[i, j] < 0:
                    a[i, j] += p
        r += 1
    return r


cdef Py_ssize_t _find(cnp.int64_t* parent, Py_ssize_t x):
    cdef Py_ssize_t root = x, tmp
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        tmp = parent[x]
        parent[x] = root
        x = tmp
    return root


def label_components(cnp.ndarray[cnp.int64_t, ndim=1] cells,
                     cnp.ndarray[cnp.int64_t, ndim=1] steps):
    """Union-find labeling; see quotfix._pure.label_components."""
    cdef Py_ssize_t n = cells.shape[0]
    out = np.empty(n, dtype=np.int64)
    if n == 0:
        return out
    cdef cnp.ndarray[cnp.int64_t, ndim=1] parent_arr = np.arange(n, dtype=np.int64)
    cdef cnp.int64_t* parent = <cnp.int64_t*> parent_arr.data
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels = out
    cdef Py_ssize_t i, j, ra, rb, k
    cdef long long target
    cdef Py_ssize_t nsteps = steps.shape[0]
    for k in range(nsteps):
        # cells + step is sorted, so one forward merge finds all neighbors
        i = 0
        for j in range(n):
            target = cells[j] + steps[k]
            while i < n and cells[i] < target:
                i += 1
            if i == n:
                break
            if cells[i] == target:
                ra = _find(parent, j)
                rb = _find(parent, i)
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
    cdef Py_ssize_t nxt = 0
    for i in range(n):
        labels[i] = -1
    for i in range(n):
        ra = _find(parent, i)
        if labels[ra] < 0:
            labels[ra] = nxt
            nxt += 1
    for i in range(n):
        if parent[i] != i:
            labels[i] = labels[_find(parent, i)]
    return out


def merge_indices(cnp.ndarray[cnp.int64_t, ndim=1] hay,
                  cnp.ndarray[cnp.int64_t, ndim=1] needles):
    """Index of each needle in hay, or -1; both arrays must be sorted."""
    cdef Py_ssize_t n = hay.shape[0], m = needles.shape[0]
    out_arr = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = out_arr
    cdef Py_ssize_t i = 0, j
    cdef cnp.int64_t t
    for j in range(m):
        t = needles[j]
        while i < n and hay[i] < t:
            i += 1
        if i < n and hay[i] == t:
            out[j] = i
        else:
            out[j] = -1
    return out_arr


DEF MERGE_MAX = 24


def merge_min(list chunks_c, list chunks_v):
    """Minimum value per distinct key over several sorted key arrays.

    Same contract as grouped_min(concatenate(chunks_c), concatenate(chunks_v))
    but linear-time when every chunk is sorted. Falls back for many chunks.
    """
    cdef Py_ssize_t k = len(chunks_c)
    if k == 0:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy()
    if k > MERGE_MAX:
        return grouped_min(np.concatenate(chunks_c), np.concatenate(chunks_v))
    cdef cnp.int64_t* cp[MERGE_MAX]
    cdef cnp.int64_t* vp[MERGE_MAX]
    cdef Py_ssize_t ln[MERGE_MAX]
    cdef Py_ssize_t pos[MERGE_MAX]
    cdef Py_ssize_t total = 0, i
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ca, va
    keepalive = []
    for i in range(k):
        ca = np.ascontiguousarray(chunks_c[i], dtype=np.int64)
        va = np.ascontiguousarray(chunks_v[i], dtype=np.int64)
        keepalive.append((ca, va))
        cp[i] = <cnp.int64_t*> ca.data
        vp[i] = <cnp.int64_t*> va.data
        ln[i] = ca.shape[0]
        pos[i] = 0
        total += ln[i]
    out_c = np.empty(total, dtype=np.int64)
    out_v = np.empty(total, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] oc = out_c
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ov = out_v
    cdef Py_ssize_t m = 0
    cdef cnp.int64_t best, val, key
    cdef bint have
    while True:
        have = False
        for i in range(k):
            if pos[i] < ln[i]:
                key = cp[i][pos[i]]
                if not have or key < best:
                    best = key
                    have = True
        if not have:
            break
        val = 0
        have = False
        for i in range(k):
            while pos[i] < ln[i] and cp[i][pos[i]] == best:
                if not have or vp[i][pos[i]] < val:
                    val = vp[i][pos[i]]
                    have = True
                pos[i] += 1
        oc[m] = best
        ov[m] = val
        m += 1
    return out_c[:m].copy(), out_v[:m].copy()


def grouped_min(cnp.ndarray[cnp.int64_t, ndim=1] keys,
                cnp.ndarray[cnp.int64_t, ndim=1] vals):
    """Minimum value per distinct key; returns (sorted unique keys, mins)."""
    cdef Py_ssize_t n = keys.shape[0]
    if n == 0:
        return keys.copy(), vals.copy()
    order = np.argsort(keys, kind="stable")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] k = keys[order]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] v = vals[order]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] uk = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] uv = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t i, m = 0
    uk[0] = k[0]
    uv[0] = v[0]
    for i in range(1, n):
        if k[i] != uk[m]:
            m += 1
            uk[m] = k[i]
            uv[m] = v[i]
        elif v[i] < uv[m]:
            uv[m] = v[i]
    return uk[: m + 1].copy(), uv[: m + 1].copy()


cdef struct Buf:
    cnp.int64_t* data
    Py_ssize_t used
    Py_ssize_t cap


cdef int _emit(Buf* buf, long long* cell, Py_ssize_t m, list keepalive) except -1:
    cdef Py_ssize_t j
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arr
    if buf.used + m > buf.cap:
        arr = np.empty(buf.cap * 2, dtype=np.int64)
        arr[: buf.used] = keepalive[0][: buf.used]
        keepalive[0] = arr
        buf.data = <cnp.int64_t*> arr.data
        buf.cap = buf.cap * 2
    for j in range(m):
        buf.data[buf.used + j] = cell[j]
    buf.used += m
    return 0


cdef int _rec(Py_ssize_t j, Py_ssize_t m, long long* anum, long long* bnum,
              long long den, long long t0n, long long t0d, long long t1n,
              long long t1d, long long* cell, Buf* buf, list keepalive) except -1:
    cdef long long aj, dj, v0n, v0d, v1n, v1d, lon, lod, hin, hid
    cdef long long kmin, kmax, k, lo_n, lo_d, hi_n, hi_d, nt0n, nt0d, nt1n, nt1d
    if j == m:
        _emit(buf, cell, m, keepalive)
        return 0
    aj = anum[j]
    dj = bnum[j] - anum[j]
    v0n = aj * t0d + t0n * dj
    v0d = den * t0d
    v1n = aj * t1d + t1n * dj
    v1d = den * t1d
    if v0n * v1d <= v1n * v0d:
        lon = v0n
        lod = v0d
        hin = v1n
        hid = v1d
    else:
        lon = v1n
        lod = v1d
        hin = v0n
        hid = v0d
    # ceil(lo) - 1 and floor(hi) with positive denominators
    if lon >= 0:
        kmin = (lon + lod - 1) // lod - 1
    else:
        kmin = -((-lon) // lod) - 1
    if hin >= 0:
        kmax = hin // hid
    else:
        kmax = -((-hin + hid - 1) // hid)
    if kmin < 0:
        kmin = 0
    for k in range(kmin, kmax + 1):
        if dj == 0:
            cell[j] = k
            _rec(j + 1, m, anum, bnum, den, t0n, t0d, t1n, t1d, cell, buf, keepalive)
            continue
        if dj > 0:
            lo_n = k * den - aj
            lo_d = dj
            hi_n = (k + 1) * den - aj
            hi_d = dj
        else:
            lo_n = aj - (k + 1) * den
            lo_d = -dj
            hi_n = aj - k * den
            hi_d = -dj
        if t0n * lo_d >= lo_n * t0d:
            nt0n = t0n
            nt0d = t0d
        else:
            nt0n = lo_n
            nt0d = lo_d
        if t1n * hi_d <= hi_n * t1d:
            nt1n = t1n
            nt1d = t1d
        else:
            nt1n = hi_n
            nt1d = hi_d
        if nt0n * nt1d <= nt1n * nt0d:
            cell[j] = k
            _rec(j + 1, m, anum, bnum, den, nt0n, nt0d, nt1n, nt1d, cell, buf, keepalive)
    return 0


def supercover(cnp.ndarray[cnp.int64_t, ndim=1] anum,
               cnp.ndarray[cnp.int64_t, ndim=1] bnum,
               long long den):
    """Closed-box supercover of a rational segment; see quotfix._pure."""
    cdef Py_ssize_t m = anum.shape[0]
    cdef long long a_loc[8]
    cdef long long b_loc[8]
    cdef long long cell[8]
    cdef Py_ssize_t j
    if m > 8:
        raise ValueError("supercover supports dimension <= 8")
    for j in range(m):
        a_loc[j] = anum[j]
        b_loc[j] = bnum[j]
        cell[j] = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arr = np.empty(1024, dtype=np.int64)
    keepalive = [arr]
    cdef Buf buf
    buf.data = <cnp.int64_t*> arr.data
    buf.used = 0
    buf.cap = 1024
    _rec(0, m, a_loc, b_loc, den, 0, 1, 1, 1, cell, &buf, keepalive)
    out = keepalive[0][: buf.used].copy()
    return out.reshape(buf.used // m if m else 0, m)
