"""Distance-matrix invariants of finite metric spaces, realized exactly.

Everything here works over exact rationals: matrix fingerprints of tuples,
the sets of all such fingerprints of a fixed order, max-norm formula
evaluation, existential-positive equivalence with anchors, exhaustive
isometric-embedding search, and greedy epsilon-nets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import ResourceLimitError
from .spaces import FiniteMetricSpace, PointTuple

MAX_TUPLE_ENUM = 2_000_000

Matrix = tuple[tuple[Fraction, ...], ...]


def distance_matrix(space: FiniteMetricSpace, t: PointTuple) -> Matrix:
    """Pairwise distances of a tuple, read off entrywise (repeats allowed)."""
    return tuple(tuple(space.dist[x][y] for y in t) for x in t)


def max_norm_distance(A: Matrix, B: Matrix) -> Fraction:
    """Max norm of the entrywise difference of two equal-order matrices."""
    if len(A) != len(B):
        raise ValueError("matrix orders differ: %d vs %d" % (len(A), len(B)))
    best = Fraction(0)
    for ra, rb in zip(A, B):
        for va, vb in zip(ra, rb):
            d = abs(va - vb)
            if d > best:
                best = d
    return best


def dn_set(space: FiniteMetricSpace, n: int,
           max_tuples: int = MAX_TUPLE_ENUM) -> tuple[Matrix, ...]:
    """All order-n distance matrices over the full tuple space (repeats
    included), as a sorted deduplicated tuple."""
    if n < 1:
        raise ValueError("order must be >= 1")
    if space.size ** n > max_tuples:
        raise ResourceLimitError(
            "dn_set would enumerate %d tuples (limit %d)"
            % (space.size ** n, max_tuples))
    seen = {distance_matrix(space, t) for t in product(range(space.size), repeat=n)}
    return tuple(sorted(seen))


@dataclass(frozen=True)
class DnComparison:
    equal: bool
    first_diff_n: int | None = None
    witness: Matrix | None = None
    witness_side: str | None = None  # "left" / "right": which space has it


def compare_dn(x: FiniteMetricSpace, y: FiniteMetricSpace, max_n: int,
               max_tuples: int = MAX_TUPLE_ENUM) -> DnComparison:
    """Exact equality of the distance-matrix sets for every order up to
    max_n, with the first differing order and one one-sided matrix as
    diagnostics."""
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    for n in range(1, max_n + 1):
        dx = dn_set(x, n, max_tuples)
        dy = dn_set(y, n, max_tuples)
        if dx != dy:
            sx, sy = set(dx), set(dy)
            only_x = sorted(sx - sy)
            if only_x:
                return DnComparison(False, n, only_x[0], "left")
            return DnComparison(False, n, sorted(sy - sx)[0], "right")
    return DnComparison(True)


@dataclass(frozen=True)
class FormulaSpec:
    """A target rational matrix and a positive tolerance; the evaluated
    formula says the tuple's distance matrix is within the tolerance in
    max norm."""

    A: Matrix
    p: Fraction

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError("tolerance must be positive")
        if any(len(row) != len(self.A) for row in self.A):
            raise ValueError("target matrix must be square")


def eval_phi(space: FiniteMetricSpace, spec: FormulaSpec, t: PointTuple) -> bool:
    if len(t) != len(spec.A):
        raise ValueError("tuple length %d does not match order %d"
                         % (len(t), len(spec.A)))
    return max_norm_distance(distance_matrix(space, t), spec.A) < spec.p


def _anchored_match(space_x, anchor_a, xs, space_y, anchor_b, eps):
    """Is there a tuple ys in space_y with the combined anchored distance
    matrix within eps (strictly; eps=0 means exactly equal) of the one for
    xs?  Backtracking over positions with entrywise pruning."""
    def close(u, v):
        return u == v if eps == 0 else abs(u - v) < eps

    dx, dy = space_x.dist, space_y.dist
    k = len(anchor_a)
    nx, ny = len(xs), space_y.size
    ys: list[int] = []

    def rec(i):
        if i == nx:
            return True
        xi = xs[i]
        for cand in range(ny):
            ok = all(close(dx[anchor_a[r]][xi], dy[anchor_b[r]][cand])
                     for r in range(k))
            if ok:
                ok = all(close(dx[xs[j]][xi], dy[ys[j]][cand]) for j in range(i))
            if ok:
                ys.append(cand)
                if rec(i + 1):
                    return True
                ys.pop()
        return False

    return rec(0)


def ep_equivalent(space_x: FiniteMetricSpace, anchor_a: PointTuple,
                  space_y: FiniteMetricSpace, anchor_b: PointTuple,
                  n: int, eps: Fraction,
                  max_tuples: int = MAX_TUPLE_ENUM) -> bool:
    """Two-sided existential-positive equivalence of the anchored spaces at
    order n: every length-n tuple on either side admits a tuple on the
    other whose anchored distance matrix is within eps in max norm
    (exactly equal when eps = 0)."""
    if len(anchor_a) != len(anchor_b):
        raise ValueError("anchors must have equal length")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    def close(u, v):
        return u == v if eps == 0 else abs(u - v) < eps

    k = len(anchor_a)
    for r in range(k):
        for s in range(k):
            if not close(space_x.dist[anchor_a[r]][anchor_a[s]],
                         space_y.dist[anchor_b[r]][anchor_b[s]]):
                return False
    for src, sa, dst, db in ((space_x, anchor_a, space_y, anchor_b),
                             (space_y, anchor_b, space_x, anchor_a)):
        if src.size ** n > max_tuples:
            raise ResourceLimitError(
                "ep_equivalent would enumerate %d tuples (limit %d)"
                % (src.size ** n, max_tuples))
        for xs in product(range(src.size), repeat=n):
            if not _anchored_match(src, sa, xs, dst, db, eps):
                return False
    return True


def find_isometric_embedding(space_x: FiniteMetricSpace,
                             space_y: FiniteMetricSpace,
                             anchor_a: PointTuple = (),
                             anchor_b: PointTuple = ()):
    """Exhaustive search for a distance-preserving injection of the whole
    first space into the second, extending the anchor assignment.  Returns
    the injection as a point-index mapping (dict) or None; the search is
    complete, so None certifies nonexistence."""
    if len(anchor_a) != len(anchor_b):
        raise ValueError("anchors must have equal length")
    dx, dy = space_x.dist, space_y.dist
    mapping: dict[int, int] = {}
    used = set()
    for a, b in zip(anchor_a, anchor_b):
        if a in mapping:
            if mapping[a] != b:
                return None
            continue
        if b in used:
            return None
        for a2, b2 in mapping.items():
            if dx[a][a2] != dy[b][b2]:
                return None
        mapping[a] = b
        used.add(b)
    rest = [p for p in range(space_x.size) if p not in mapping]

    def rec(i):
        if i == len(rest):
            return True
        x = rest[i]
        for y in range(space_y.size):
            if y in used:
                continue
            if all(dx[x][a] == dy[y][b] for a, b in mapping.items()):
                mapping[x] = y
                used.add(y)
                if rec(i + 1):
                    return True
                del mapping[x]
                used.discard(y)
        return False

    if rec(0):
        return dict(mapping)
    return None


def is_isometric(space_x: FiniteMetricSpace, space_y: FiniteMetricSpace) -> bool:
    """Equal sizes plus an unanchored embedding; for equal finite sizes any
    embedding is automatically a bijection."""
    if space_x.size != space_y.size:
        return False
    return find_isometric_embedding(space_x, space_y) is not None


def epsilon_net(space: FiniteMetricSpace, eps: Fraction) -> list[int]:
    """Greedy covering subset, lowest index first: every point is strictly
    within eps of some chosen point."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    net: list[int] = []
    for p in range(space.size):
        if not any(space.dist[p][q] < eps for q in net):
            net.append(p)
    return net
