"""The back-and-forth engine.

Tuple equivalence at level alpha, Scott rank, ultrahomogeneity, and the
independent naive oracle.

The engine never enumerates tuples.  A pair of same-length distinct-support
tuples is the same thing as a partial isomorphism of the structure, and the
level-(alpha+1) relation is one refinement step on the set of surviving
partial isomorphisms:

    p survives  iff  for every x there is y (and for every y there is x)
                     with p + (x -> y) still surviving.

Extensions by a point already in the domain reduce to p itself, so only
fresh extensions matter and the state space is finite.  Since the surviving
set is closed under composition with atom-preserving permutations on either
side, the engine works on one representative per such class: classes are
bucketed by a sound refinement invariant and merged only after an explicit
isomorphism test, so the quotient is exact.  The Scott rank is the first
level at which a refinement step removes nothing.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from itertools import permutations, product

from ._backend import (
    compatible_ys,
    extends_to_automorphism,
    map_isomorphic,
    refined_pair_labels,
)
from .errors import ResourceLimitError
from .spaces import (
    FiniteMetricSpace,
    PointTuple,
    StructureView,
    dedupe_reduce,
    metric_view,
    qf_type,
)

MAX_CLASSES = 500_000
MAX_FAMILY_TUPLES = 200_000
MAX_HOMOGENEITY_MAPS = 2_000_000

# documented envelope of the naive oracle; see naive_equivalence
NAIVE_MAX_CARRIER = 7
NAIVE_MAX_ALPHA = 6
NAIVE_MAX_LENGTH = 5


def _intern_atoms(view: StructureView):
    """Flattened n*n atom-code matrix and per-point color codes, as C int
    arrays (the compiled kernels take them as typed memoryviews).

    Point colors are refined to the color-refinement fixpoint; they are
    automorphism-invariant, so the kernels may prune any candidate pairing
    of differently colored points."""
    n = view.size
    codes: dict[object, int] = {}
    flat = []
    for i in range(n):
        for j in range(n):
            flat.append(codes.setdefault(view.atoms[i][j], len(codes)))
    color = [flat[i * n + i] for i in range(n)]
    while True:
        seen: dict[object, int] = {}
        nxt = [
            seen.setdefault(
                (color[i],
                 tuple(sorted((color[j], flat[i * n + j], flat[j * n + i])
                              for j in range(n) if j != i))),
                len(seen),
            )
            for i in range(n)
        ]
        stable = len(set(nxt)) == len(set(color))
        color = nxt
        if stable:
            break
    return array("i", flat), array("i", color)


class _MapClass:
    __slots__ = ("A", "B", "labels", "fwd", "bwd", "death")

    def __init__(self, A, B, labels):
        self.A = A
        self.B = B
        self.labels = labels  # refined pair labels, cached for iso tests
        self.fwd = {}
        self.bwd = {}
        self.death = None  # level at which the class leaves the hierarchy


class _Machine:
    """Refinement machine for one structure view."""

    def __init__(self, view: StructureView, max_classes: int = MAX_CLASSES):
        self.view = view
        n = view.size
        self.n = n
        flat, ptype = _intern_atoms(view)
        self.flat = flat
        self.ptype = ptype
        self.max_classes = max_classes
        self.intern: dict[object, int] = {}  # shared label-interning table
        self.classes: list[_MapClass] = []
        self.buckets: dict[tuple, list[int]] = {}
        self._build()
        self.rank = self._refine()

    # -- class identification ---------------------------------------------

    def _labels(self, A, B):
        # one refinement round: point colors are already a fixpoint, so a
        # single pair-level sweep buys most of the bucketing power
        return refined_pair_labels(self.flat, self.n, self.ptype, A, B,
                                   self.intern, 1)

    def _isomorphic(self, A1, B1, l1, A2, B2, l2) -> bool:
        """Exact test: do atom-preserving permutations g, h of the carrier
        exist with  {(g a, h b)} = the second map?  ``l1``/``l2`` are the
        precomputed refined pair labels of each map."""
        return map_isomorphic(self.flat, self.n, self.ptype,
                              A1, B1, l1, A2, B2, l2)

    def _classify(self, A, B) -> int:
        labels = self._labels(A, B)
        fp = (len(A),) + tuple(sorted(labels))
        bucket = self.buckets.setdefault(fp, [])
        for cid in bucket:
            c = self.classes[cid]
            if self._isomorphic(A, B, labels, c.A, c.B, c.labels):
                return cid
        cid = len(self.classes)
        if cid >= self.max_classes:
            raise ResourceLimitError(
                "equivalence engine exceeded %d map classes" % self.max_classes
            )
        self.classes.append(_MapClass(tuple(A), tuple(B), labels))
        bucket.append(cid)
        return cid

    def classify_map(self, A, B):
        """Class id of an arbitrary partial map, or None when the map does
        not even preserve quantifier-free data."""
        flat, n = self.flat, self.n
        k = len(A)
        for i in range(k):
            a, b = A[i], B[i]
            for j in range(i, k):
                a2, b2 = A[j], B[j]
                if flat[a * n + a2] != flat[b * n + b2] or \
                        flat[a2 * n + a] != flat[b2 * n + b]:
                    return None
        labels = self._labels(A, B)
        fp = (k,) + tuple(sorted(labels))
        for cid in self.buckets.get(fp, []):
            c = self.classes[cid]
            if self._isomorphic(A, B, labels, c.A, c.B, c.labels):
                return cid
        raise AssertionError("valid map missing from a complete machine")

    # -- enumeration and refinement ---------------------------------------

    def _build(self):
        n = self.n
        self._classify((), ())
        i = 0
        while i < len(self.classes):
            c = self.classes[i]
            dom = set(c.A)
            ran_mask = bytearray(n)
            for b in c.B:
                ran_mask[b] = 1
            bwd: dict[int, set[int]] = {y: set() for y in range(n) if not ran_mask[y]}
            for x in range(n):
                if x in dom:
                    continue
                ids = set()
                for y in compatible_ys(self.flat, n, c.A, c.B, x, ran_mask):
                    pos = 0
                    while pos < len(c.A) and c.A[pos] < x:
                        pos += 1
                    A2 = c.A[:pos] + (x,) + c.A[pos:]
                    B2 = c.B[:pos] + (y,) + c.B[pos:]
                    cid = self._classify(A2, B2)
                    ids.add(cid)
                    bwd[y].add(cid)
                c.fwd[x] = tuple(sorted(ids))
            for y, ids in bwd.items():
                c.bwd[y] = tuple(sorted(ids))
            i += 1

    def _refine(self) -> int:
        classes = self.classes
        level = 0
        alive = set(range(len(classes)))
        while True:
            dying = []
            for cid in alive:
                c = classes[cid]
                ok = all(
                    any(classes[ch].death is None for ch in ids)
                    for ids in c.fwd.values()
                ) and all(
                    any(classes[ch].death is None for ch in ids)
                    for ids in c.bwd.values()
                )
                if not ok:
                    dying.append(cid)
            if not dying:
                return level
            for cid in dying:
                classes[cid].death = level + 1
                alive.discard(cid)
            level += 1

    def alive_at(self, cid: int, level: int) -> bool:
        d = self.classes[cid].death
        return d is None or level < d


_machines: dict[StructureView, _Machine] = {}


def _machine(view: StructureView) -> _Machine:
    m = _machines.get(view)
    if m is None:
        m = _machines[view] = _Machine(view)
    return m


# -- public operations -----------------------------------------------------


@dataclass
class EquivalenceFamily:
    """Leveled partitions of canonical (distinct-support) tuples.

    ``partitions[k][alpha]`` assigns a class id to each tuple of
    ``tuples[k]``; ids are numbered in order of each class's
    lexicographically least member.  ``stabilization`` is the Scott rank of
    the underlying structure (computed over all lengths, independently of
    ``max_length``).
    """

    view: StructureView
    max_length: int
    stabilization: int
    tuples: dict[int, list[PointTuple]]
    partitions: dict[int, list[list[int]]]

    def class_counts(self) -> dict[int, list[int]]:
        """Number of classes per length, per level."""
        return {
            k: [len(set(p)) for p in levels]
            for k, levels in self.partitions.items()
        }


def compute_family(view: StructureView, max_length: int) -> EquivalenceFamily:
    """Materialize the leveled partitions for tuple lengths 0..max_length
    (clamped to the carrier size)."""
    if max_length < 0:
        raise ValueError("max_length must be >= 0")
    n = view.size
    K = min(max_length, n)
    m = _machine(view)
    total = sum(_perm_count(n, k) for k in range(K + 1))
    if total > MAX_FAMILY_TUPLES:
        raise ResourceLimitError(
            "family would materialize %d tuples (limit %d)" % (total, MAX_FAMILY_TUPLES)
        )
    tuples = {k: sorted(permutations(range(n), k)) for k in range(K + 1)}
    partitions: dict[int, list[list[int]]] = {}
    for k in range(K + 1):
        ts = tuples[k]
        levels = []
        groups = [list(range(len(ts)))]  # indices; refined level by level
        for level in range(m.rank + 1):
            new_groups = []
            for g in groups:
                sub: list[list[int]] = []
                for idx in g:
                    placed = False
                    for s in sub:
                        leader = ts[s[0]]
                        if _tuples_equivalent(m, leader, ts[idx], level):
                            s.append(idx)
                            placed = True
                            break
                    if not placed:
                        sub.append([idx])
                new_groups.extend(sub)
            # number classes by lexicographically least member
            new_groups.sort(key=lambda s: s[0])
            assignment = [0] * len(ts)
            for cid, s in enumerate(new_groups):
                for idx in s:
                    assignment[idx] = cid
            levels.append(assignment)
            groups = new_groups
        partitions[k] = levels
    return EquivalenceFamily(view, K, m.rank, tuples, partitions)


def _perm_count(n, k):
    c = 1
    for i in range(k):
        c *= n - i
    return c


def _tuples_equivalent(m: _Machine, a: PointTuple, b: PointTuple, alpha: int) -> bool:
    sa, pa = dedupe_reduce(a)
    sb, pb = dedupe_reduce(b)
    if pa != pb:
        return False
    cid = m.classify_map(sa, sb)
    if cid is None:
        return False
    return m.alive_at(cid, min(alpha, m.rank))


def are_equivalent(view: StructureView, a: PointTuple, b: PointTuple, alpha: int) -> bool:
    """Level-alpha back-and-forth equivalence of two tuples (repeats
    allowed)."""
    if len(a) != len(b):
        raise ValueError("tuples must have equal length")
    return _tuples_equivalent(_machine(view), tuple(a), tuple(b), alpha)


def scott_rank(view: StructureView) -> int:
    """Least level at which level-equivalence implies the next level, over
    tuples of every length."""
    return _machine(view).rank


# -- naive oracle ----------------------------------------------------------


def naive_equivalence(view: StructureView, a: PointTuple, b: PointTuple,
                      alpha: int) -> bool:
    """Literal recursive evaluation of the leveled equivalence definition.

    No canonicalization and no partition machinery: level 0 compares
    quantifier-free types, a successor level checks the two extension
    conditions point by point.  Memoized per view, exponential all the
    same; guarded to carriers <= 7, alpha <= 6, tuple length <= 5.
    """
    if len(a) != len(b):
        raise ValueError("tuples must have equal length")
    n = view.size
    if n > NAIVE_MAX_CARRIER or alpha > NAIVE_MAX_ALPHA or len(a) > NAIVE_MAX_LENGTH:
        raise ResourceLimitError(
            "naive oracle limited to carrier <= %d, alpha <= %d, length <= %d"
            % (NAIVE_MAX_CARRIER, NAIVE_MAX_ALPHA, NAIVE_MAX_LENGTH)
        )
    memo = _naive_memos.setdefault(view, {})
    return _naive(view, frozenset(zip(a, b)), alpha, memo)


_naive_memos: dict[StructureView, dict] = {}


def _naive(view, pairs, alpha, memo):
    # the recursion state is the set of coordinate pairs.  The definition
    # is invariant under permuting positions and under repeating a position
    # (both the qf-type condition and the extension clauses only see which
    # pairs (a_i, b_i) occur), so the deduplicated pair set is a faithful
    # canonical form; it also caps the recursion depth at n^2.
    key = (pairs, alpha)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if alpha == 0:
        atoms = view.atoms
        res = all((p == r) == (q == s) and atoms[p][r] == atoms[q][s]
                  for p, q in pairs for r, s in pairs)
    else:
        n = view.size
        res = True
        for x in range(n):
            if not any(_naive(view, pairs | {(x, y)}, alpha - 1, memo)
                       for y in range(n)):
                res = False
                break
        if res:
            for y in range(n):
                if not any(_naive(view, pairs | {(x, y)}, alpha - 1, memo)
                           for x in range(n)):
                    res = False
                    break
    memo[key] = res
    memo[(frozenset((q, p) for p, q in pairs), alpha)] = res
    return res


def naive_rank(view: StructureView, max_length: int | None = None) -> int:
    """Scott rank by the oracle alone: smallest alpha such that
    alpha-equivalence implies (alpha+1)-equivalence over all tuple pairs
    (repeats included) up to the given length.

    For carriers of <= 4 points, length 4 is exhaustive: any longer pair
    either differs in equality pattern (hence is inequivalent at every
    level) or reduces to a pair of length <= 4.
    """
    n = view.size
    if max_length is None:
        max_length = min(n, 4)
    if n > NAIVE_MAX_CARRIER:
        raise ResourceLimitError("naive rank limited to carrier <= %d"
                                 % NAIVE_MAX_CARRIER)
    all_tuples = []
    for k in range(max_length + 1):
        all_tuples.extend(product(range(n), repeat=k))
    memo = _naive_memos.setdefault(view, {})
    pending = [(a, b) for a in all_tuples for b in all_tuples if len(a) == len(b)]
    for alpha in range(NAIVE_MAX_ALPHA):
        still = [(a, b) for (a, b) in pending
                 if _naive(view, frozenset(zip(a, b)), alpha, memo)]
        if all(_naive(view, frozenset(zip(a, b)), alpha + 1, memo)
               for (a, b) in still):
            return alpha
        pending = still
    raise ResourceLimitError("naive rank did not stabilize within alpha <= %d"
                             % NAIVE_MAX_ALPHA)


# -- ultrahomogeneity ------------------------------------------------------


def is_ultrahomogeneous(space: FiniteMetricSpace):
    """Decide whether every distance-preserving injection between subsets
    extends to a self-isometry of the whole space.

    Enumerates partial isometries in breadth-first order (smallest domains
    first) and runs an extension search for each, so a False verdict comes
    with a witnessing map of minimal domain size.  Returns
    ``(verdict, witness)`` where the witness is a list of (point, point)
    pairs or None.
    """
    view = metric_view(space)
    n = space.size
    flat, ptype = _intern_atoms(view)
    checked = 0
    layer = [((), ())]
    while layer:
        nxt = []
        for A, B in layer:
            checked += 1
            if checked > MAX_HOMOGENEITY_MAPS:
                raise ResourceLimitError(
                    "homogeneity search exceeded %d partial isometries"
                    % MAX_HOMOGENEITY_MAPS)
            if A and not extends_to_automorphism(flat, n, ptype, A, B):
                return False, list(zip(A, B))
            start = A[-1] + 1 if A else 0
            ran = set(B)
            for x in range(start, n):
                for y in range(n):
                    if y in ran:
                        continue
                    ok = all(
                        space.dist[x][a] == space.dist[y][b] for a, b in zip(A, B)
                    )
                    if ok:
                        nxt.append((A + (x,), B + (y,)))
        layer = sorted(nxt)
    return True, None
