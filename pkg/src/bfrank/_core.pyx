# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled implementations of the hot search kernels.

Mirrors ``bfrank._core_py`` function for function; see that module for the
calling convention and the semantics of each kernel.  ``flat`` and ``ptype``
arrive as contiguous int buffers (array('i') on the caller side), partial
maps as small Python sequences copied into C arrays on entry.
"""

from cpython.bytes cimport PyBytes_FromStringAndSize
from libc.stdint cimport int64_t
from libc.stdlib cimport free, malloc


cdef int _bit_length(int v) noexcept:
    cdef int b = 0
    while v:
        b += 1
        v >>= 1
    return b


cdef int* _seq_to_c(seq, Py_ssize_t k) except NULL:
    cdef int* out = <int*> malloc((k if k else 1) * sizeof(int))
    cdef Py_ssize_t i
    if out == NULL:
        raise MemoryError()
    for i in range(k):
        out[i] = seq[i]
    return out


def compatible_ys(const int[::1] flat, int n, A, B, int x, ran_mask):
    cdef Py_ssize_t k = len(A)
    cdef int* Ac = _seq_to_c(A, k)
    cdef int* Bc = _seq_to_c(B, k)
    cdef const unsigned char[::1] rm = ran_mask
    cdef int y, a, b, ok
    cdef Py_ssize_t i
    cdef int xi = x * n
    out = []
    try:
        for y in range(n):
            if rm[y]:
                continue
            if flat[xi + x] != flat[y * n + y]:
                continue
            ok = 1
            for i in range(k):
                a = Ac[i]
                b = Bc[i]
                if flat[xi + a] != flat[y * n + b] or flat[a * n + x] != flat[b * n + y]:
                    ok = 0
                    break
            if ok:
                out.append(y)
    finally:
        free(Ac)
        free(Bc)
    return out


def refined_pair_labels(const int[::1] flat, int n, const int[::1] ptype,
                        A, B, dict intern, int rounds=3):
    """Rows are packed into sorted int64 vectors keyed as bytes when the
    atom codes are narrow enough; otherwise a structured-tuple path is used.
    The choice depends only on the structure (flat, n), never on the map, so
    labels stay comparable across calls against one intern table.
    """
    cdef Py_ssize_t k = len(A)
    if k == 0:
        return []
    cdef int amax = 0, r
    cdef Py_ssize_t t
    for t in range(<Py_ssize_t> n * n):
        if flat[t] > amax:
            amax = flat[t]
    cdef int abits = _bit_length(amax)
    cdef int lbits = 63 - 4 * abits
    if lbits < 20:
        return _labels_tuples(flat, n, ptype, A, B, intern, rounds)
    if lbits > 62:
        lbits = 62

    cdef int* Ac = _seq_to_c(A, k)
    cdef int* Bc = _seq_to_c(B, k)
    cdef int64_t* lab = <int64_t*> malloc(k * sizeof(int64_t))
    cdef int64_t* nxt = <int64_t*> malloc(k * sizeof(int64_t))
    # row buffer: labels[i] followed by the k-1 packed row entries
    cdef int64_t* row = <int64_t*> malloc((k + 1) * sizeof(int64_t))
    cdef Py_ssize_t i, j, m, rl
    cdef int a, b, an, bn, changed
    cdef int64_t entry, cap = (<int64_t> 1) << lbits
    try:
        if lab == NULL or nxt == NULL or row == NULL:
            raise MemoryError()
        for i in range(k):
            key = (<long> ptype[Ac[i]]) * n + ptype[Bc[i]]
            lab[i] = intern.setdefault(key, len(intern))
        for r in range(rounds):
            changed = 0
            for i in range(k):
                a = Ac[i]
                b = Bc[i]
                an = a * n
                bn = b * n
                row[0] = lab[i]
                rl = 1
                for j in range(k):
                    if j == i:
                        continue
                    entry = (((((((lab[j] << abits)
                                  | flat[an + Ac[j]]) << abits)
                                | flat[Ac[j] * n + a]) << abits)
                              | flat[bn + Bc[j]]) << abits) | flat[Bc[j] * n + b]
                    # insertion sort into row[1..rl)
                    m = rl
                    while m > 1 and row[m - 1] > entry:
                        row[m] = row[m - 1]
                        m -= 1
                    row[m] = entry
                    rl += 1
                key = PyBytes_FromStringAndSize(<char*> row, rl * sizeof(int64_t))
                nxt[i] = intern.setdefault(key, len(intern))
            if len(intern) >= cap:
                raise OverflowError("label intern table exceeded packing width")
            for i in range(k):
                if nxt[i] != lab[i]:
                    changed = 1
                lab[i] = nxt[i]
            if not changed:
                break
        return [lab[i] for i in range(k)]
    finally:
        free(Ac)
        free(Bc)
        free(lab)
        free(nxt)
        free(row)


def _labels_tuples(const int[::1] flat, int n, const int[::1] ptype,
                   A, B, dict intern, int rounds):
    cdef Py_ssize_t k = len(A)
    cdef int* Ac = _seq_to_c(A, k)
    cdef int* Bc = _seq_to_c(B, k)
    cdef Py_ssize_t i, j
    cdef int a, b, an, bn
    labels = []
    try:
        for i in range(k):
            key = (ptype[Ac[i]], ptype[Bc[i]])
            labels.append(intern.setdefault(key, len(intern)))
        for _ in range(rounds):
            nxt = []
            for i in range(k):
                a = Ac[i]
                b = Bc[i]
                an = a * n
                bn = b * n
                row = []
                for j in range(k):
                    if j == i:
                        continue
                    row.append((labels[j],
                                flat[an + Ac[j]], flat[Ac[j] * n + a],
                                flat[bn + Bc[j]], flat[Bc[j] * n + b]))
                row.sort()
                key = (labels[i], tuple(row))
                nxt.append(intern.setdefault(key, len(intern)))
            if nxt == labels:
                break
            labels = nxt
    finally:
        free(Ac)
        free(Bc)
    return labels


def pair_fingerprint(const int[::1] flat, int n, const int[::1] ptype,
                     A, B, dict intern, int rounds=3):
    labels = refined_pair_labels(flat, n, ptype, A, B, intern, rounds)
    return (len(A),) + tuple(sorted(labels))


cdef int _ext_rec(const int* flat, int n, const int* ptype, int* amap,
                  unsigned char* used, const int* rest, int nrest,
                  int idx) noexcept:
    cdef int x, y, a, b, ok, xi
    if idx == nrest:
        return 1
    x = rest[idx]
    xi = x * n
    for y in range(n):
        if used[y] or ptype[x] != ptype[y]:
            continue
        ok = 1
        for a in range(n):
            b = amap[a]
            if b == -1:
                continue
            if flat[xi + a] != flat[y * n + b] or flat[a * n + x] != flat[b * n + y]:
                ok = 0
                break
        if ok:
            amap[x] = y
            used[y] = 1
            if _ext_rec(flat, n, ptype, amap, used, rest, nrest, idx + 1):
                return 1
            amap[x] = -1
            used[y] = 0
    return 0


cdef int _extends_c(const int* flat, int n, const int* ptype,
                    const int* A, const int* B, Py_ssize_t k,
                    int* amap, unsigned char* used, int* rest) noexcept:
    """Seed verification plus DFS completion; scratch buffers of size n are
    supplied by the caller."""
    cdef Py_ssize_t i, j
    cdef int a, b, a2, b2, nrest
    for a in range(n):
        amap[a] = -1
        used[a] = 0
    for i in range(k):
        a = A[i]
        b = B[i]
        if amap[a] == -1:
            if used[b] or ptype[a] != ptype[b]:
                return 0
            amap[a] = b
            used[b] = 1
        elif amap[a] != b:
            return 0
    for a in range(n):
        b = amap[a]
        if b == -1:
            continue
        if flat[a * n + a] != flat[b * n + b]:
            return 0
        for a2 in range(a + 1, n):
            b2 = amap[a2]
            if b2 == -1:
                continue
            if flat[a * n + a2] != flat[b * n + b2] or flat[a2 * n + a] != flat[b2 * n + b]:
                return 0
    nrest = 0
    for a in range(n):
        if amap[a] == -1:
            rest[nrest] = a
            nrest += 1
    return _ext_rec(flat, n, ptype, amap, used, rest, nrest, 0)


def extends_to_automorphism(const int[::1] flat, int n, const int[::1] ptype, A, B):
    cdef Py_ssize_t k = len(A)
    if n == 0:
        return True
    cdef int* Ac = _seq_to_c(A, k)
    cdef int* Bc = _seq_to_c(B, k)
    cdef int* amap = <int*> malloc(n * sizeof(int))
    cdef unsigned char* used = <unsigned char*> malloc(n)
    cdef int* rest = <int*> malloc(n * sizeof(int))
    cdef int res
    try:
        if amap == NULL or used == NULL or rest == NULL:
            raise MemoryError()
        res = _extends_c(&flat[0], n, &ptype[0], Ac, Bc, k, amap, used, rest)
    finally:
        free(Ac)
        free(Bc)
        free(amap)
        free(used)
        free(rest)
    return res != 0


cdef int _iso_rec(const int* flat, int n, const int* ptype,
                  const int* A1, const int* B1, const int* A2, const int* B2,
                  Py_ssize_t k, const int* order, const int* candm,
                  const int* candcnt, int* phi, unsigned char* used,
                  int* scratch, Py_ssize_t idx) noexcept:
    # scratch holds ga (k), hb (k), amap (n), used2 (as ints, n), rest (n)
    cdef Py_ssize_t t, c
    cdef int i, j, i2, j2, a1i, b1i, a2j, b2j, ok
    cdef int* ga
    cdef int* hb
    cdef int* amap
    cdef unsigned char* used2
    cdef int* rest
    if idx == k:
        ga = scratch
        hb = scratch + k
        amap = scratch + 2 * k
        rest = scratch + 2 * k + n
        used2 = <unsigned char*> (scratch + 2 * k + 2 * n)
        for t in range(k):
            ga[t] = A2[phi[t]]
            hb[t] = B2[phi[t]]
        if not _extends_c(flat, n, ptype, A1, ga, k, amap, used2, rest):
            return 0
        return _extends_c(flat, n, ptype, B1, hb, k, amap, used2, rest)
    i = order[idx]
    a1i = A1[i]
    b1i = B1[i]
    for c in range(candcnt[i]):
        j = candm[i * k + c]
        if used[j]:
            continue
        a2j = A2[j]
        b2j = B2[j]
        ok = 1
        for t in range(idx):
            i2 = order[t]
            j2 = phi[i2]
            if (flat[a1i * n + A1[i2]] != flat[a2j * n + A2[j2]]
                    or flat[A1[i2] * n + a1i] != flat[A2[j2] * n + a2j]
                    or flat[b1i * n + B1[i2]] != flat[b2j * n + B2[j2]]
                    or flat[B1[i2] * n + b1i] != flat[B2[j2] * n + b2j]):
                ok = 0
                break
        if not ok:
            continue
        phi[i] = j
        used[j] = 1
        if _iso_rec(flat, n, ptype, A1, B1, A2, B2, k, order, candm, candcnt,
                    phi, used, scratch, idx + 1):
            return 1
        phi[i] = -1
        used[j] = 0
    return 0


def map_isomorphic(const int[::1] flat, int n, const int[::1] ptype,
                   A1, B1, l1, A2, B2, l2):
    cdef Py_ssize_t k = len(A1)
    if k == 0:
        return True
    cdef int* A1c = _seq_to_c(A1, k)
    cdef int* B1c = _seq_to_c(B1, k)
    cdef int* A2c = _seq_to_c(A2, k)
    cdef int* B2c = _seq_to_c(B2, k)
    cdef int* l1c = _seq_to_c(l1, k)
    cdef int* l2c = _seq_to_c(l2, k)
    cdef int* candm = <int*> malloc(k * k * sizeof(int))
    cdef int* candcnt = <int*> malloc(k * sizeof(int))
    cdef int* order = <int*> malloc(k * sizeof(int))
    cdef int* phi = <int*> malloc(k * sizeof(int))
    cdef unsigned char* used = <unsigned char*> malloc(k)
    cdef int* scratch = <int*> malloc((2 * k + 3 * n) * sizeof(int))
    cdef Py_ssize_t i, j, t
    cdef int tmp, res = 0, empty = 0
    try:
        if (candm == NULL or candcnt == NULL or order == NULL or phi == NULL
                or used == NULL or scratch == NULL):
            raise MemoryError()
        for i in range(k):
            candcnt[i] = 0
            for j in range(k):
                if l2c[j] == l1c[i]:
                    candm[i * k + candcnt[i]] = j
                    candcnt[i] += 1
            if candcnt[i] == 0:
                empty = 1
                break
        if not empty:
            for i in range(k):
                order[i] = i
                phi[i] = -1
                used[i] = 0
            # insertion sort by ascending candidate count
            for i in range(1, k):
                tmp = order[i]
                t = i
                while t > 0 and candcnt[order[t - 1]] > candcnt[tmp]:
                    order[t] = order[t - 1]
                    t -= 1
                order[t] = tmp
            res = _iso_rec(&flat[0], n, &ptype[0], A1c, B1c, A2c, B2c, k,
                           order, candm, candcnt, phi, used, scratch, 0)
    finally:
        free(A1c)
        free(B1c)
        free(A2c)
        free(B2c)
        free(l1c)
        free(l2c)
        free(candm)
        free(candcnt)
        free(order)
        free(phi)
        free(used)
        free(scratch)
    return res != 0
