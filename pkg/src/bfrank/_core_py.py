"""Pure-Python implementations of the hot search kernels.

The compiled extension ``bfrank._core`` mirrors this module function for
function; ``bfrank._backend`` picks whichever is importable.  All kernels
work on a flattened n*n integer atom matrix so both implementations share
one calling convention.

A partial map is passed as two equal-length sequences A (domain points) and
B (image points); position i maps A[i] to B[i].
"""

from __future__ import annotations


def compatible_ys(flat, n, A, B, x, ran_mask):
    """All y such that extending the map by x -> y preserves atom codes.

    ``ran_mask`` is a bytearray marking points already used as images.
    """
    out = []
    xi = x * n
    for y in range(n):
        if ran_mask[y]:
            continue
        if flat[xi + x] != flat[y * n + y]:
            continue
        ok = True
        for a, b in zip(A, B):
            if flat[xi + a] != flat[y * n + b] or flat[a * n + x] != flat[b * n + y]:
                ok = False
                break
        if ok:
            out.append(y)
    return out


def refined_pair_labels(flat, n, ptype, A, B, intern, rounds=3):
    """Per-pair labels refined over the pair set, as small integers.

    Starts from the (domain point type, image point type) of each pair and
    iterates a color-refinement step; every structured label is interned
    through the caller-owned ``intern`` dict, so labels from different calls
    against the same dict are comparable.  Invariant under relabeling of
    either side by an atom-preserving permutation, which is all the
    classifier needs (completeness is supplied by the verified isomorphism
    test).
    """
    k = len(A)
    if k == 0:
        return []
    labels = []
    for a, b in zip(A, B):
        key = (ptype[a], ptype[b])
        labels.append(intern.setdefault(key, len(intern)))
    for _ in range(rounds):
        nxt = []
        for i in range(k):
            a, b = A[i], B[i]
            an, bn = a * n, b * n
            row = sorted(
                (labels[j],
                 flat[an + A[j]], flat[A[j] * n + a],
                 flat[bn + B[j]], flat[B[j] * n + b])
                for j in range(k) if j != i
            )
            key = (labels[i], tuple(row))
            nxt.append(intern.setdefault(key, len(intern)))
        if nxt == labels:
            break
        labels = nxt
    return labels


def pair_fingerprint(flat, n, ptype, A, B, intern, rounds=3):
    """Sound double-coset invariant of a partial map: the sorted multiset of
    refined pair labels together with the map size."""
    labels = refined_pair_labels(flat, n, ptype, A, B, intern, rounds)
    return (len(A),) + tuple(sorted(labels))


def map_isomorphic(flat, n, ptype, A1, B1, l1, A2, B2, l2):
    """Are two partial maps in one orbit under atom-preserving permutations
    acting on domain and image sides independently?

    ``l1``/``l2`` are the refined pair labels of each map (from one intern
    table).  Backtracks over label-compatible pair matchings phi and then
    checks that A1 -> A2[phi] and B1 -> B2[phi] each extend to a full
    atom-preserving bijection.
    """
    k = len(A1)
    if k == 0:
        return True
    cand = [[j for j in range(k) if l2[j] == l1[i]] for i in range(k)]
    if any(not c for c in cand):
        return False
    order = sorted(range(k), key=lambda i: len(cand[i]))
    phi = [-1] * k
    used = [False] * k

    def rec(idx):
        if idx == k:
            ga = [A2[phi[i]] for i in range(k)]
            hb = [B2[phi[i]] for i in range(k)]
            return extends_to_automorphism(flat, n, ptype, A1, ga) and \
                extends_to_automorphism(flat, n, ptype, B1, hb)
        i = order[idx]
        a1i, b1i = A1[i], B1[i]
        for j in cand[i]:
            if used[j]:
                continue
            a2j, b2j = A2[j], B2[j]
            ok = True
            for t in range(idx):
                i2 = order[t]
                j2 = phi[i2]
                if (flat[a1i * n + A1[i2]] != flat[a2j * n + A2[j2]]
                        or flat[A1[i2] * n + a1i] != flat[A2[j2] * n + a2j]
                        or flat[b1i * n + B1[i2]] != flat[b2j * n + B2[j2]]
                        or flat[B1[i2] * n + b1i] != flat[B2[j2] * n + b2j]):
                    ok = False
                    break
            if not ok:
                continue
            phi[i] = j
            used[j] = True
            if rec(idx + 1):
                return True
            phi[i] = -1
            used[j] = False
        return False

    return rec(0)


def extends_to_automorphism(flat, n, ptype, A, B):
    """True iff the partial map A -> B extends to a bijection of the whole
    carrier preserving every atom code.  Depth-first search with forward
    pruning on atom rows and on the precomputed point-type codes ``ptype``
    (equal row multisets are necessary for any such bijection).  The seed
    map itself is re-verified first."""
    amap = [-1] * n
    used = bytearray(n)
    for a, b in zip(A, B):
        if amap[a] == -1:
            if used[b] or ptype[a] != ptype[b]:
                return False
            amap[a] = b
            used[b] = 1
        elif amap[a] != b:
            return False
    dom = [a for a in range(n) if amap[a] != -1]
    for i, a in enumerate(dom):
        b = amap[a]
        if flat[a * n + a] != flat[b * n + b]:
            return False
        for a2 in dom[i + 1:]:
            b2 = amap[a2]
            if flat[a * n + a2] != flat[b * n + b2] or flat[a2 * n + a] != flat[b2 * n + b]:
                return False
    rest = [a for a in range(n) if amap[a] == -1]

    def rec(idx):
        if idx == len(rest):
            return True
        x = rest[idx]
        xi = x * n
        for y in range(n):
            if used[y] or ptype[x] != ptype[y]:
                continue
            ok = True
            for a in range(n):
                b = amap[a]
                if b == -1:
                    continue
                if flat[xi + a] != flat[y * n + b] or flat[a * n + x] != flat[b * n + y]:
                    ok = False
                    break
            if ok:
                amap[x] = y
                used[y] = 1
                if rec(idx + 1):
                    return True
                amap[x] = -1
                used[y] = 0
        return False

    return rec(0)
