"""Truncated instances of the recursive ultrametric tree family.

The family is indexed by a width parameter n (a natural or "unbounded") and
an ordinal below w^w.  The construction is the paperless version at desk
scale only in one respect: every unbounded index range is cut at ``cap``,
and an unbounded width parameter is realized as n = cap.  Members are
prefix-closed sets of finite sequences of naturals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ResourceLimitError
from .ordinals import OrdinalCNF
from .spaces import FiniteMetricSpace, StructureView, function_view

MAX_TREE_NODES = 5_000

Node = tuple[int, ...]


@dataclass(frozen=True)
class TreeSpec:
    """Build parameters.  ``n=None`` marks the unbounded width value."""

    n: int | None
    alpha: OrdinalCNF
    cap: int
    depth_cap: int | None = None

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("cap must be >= 1")
        if self.n is not None and self.n < 0:
            raise ValueError("n must be >= 0")


@dataclass(frozen=True)
class FiniteTree:
    nodes: frozenset[Node]

    def __post_init__(self):
        if () not in self.nodes:
            raise ValueError("tree must contain the empty sequence")
        for s in self.nodes:
            if s and s[:-1] not in self.nodes:
                raise ValueError("node set not prefix-closed at %r" % (s,))

    @property
    def sorted_nodes(self) -> list[Node]:
        return sorted(self.nodes)

    @property
    def size(self) -> int:
        return len(self.nodes)


def pairing(i: int, d: int) -> int:
    """Cantor diagonal pairing; fixes the enumeration order of glued
    subtrees at limit stages."""
    return (i + d) * (i + d + 1) // 2 + d


def limit_enumeration(alpha: OrdinalCNF, c: OrdinalCNF, d: int) -> int:
    """Head index assigned to the pair (c, d) at a limit stage: c must lie
    on the canonical fundamental sequence of alpha."""
    if not alpha.is_limit:
        raise ValueError("alpha must be a limit ordinal")
    if not c < alpha:
        raise ValueError("c must be below alpha")
    i = 0
    while True:
        member = alpha.fundamental_sequence(i)
        if member == c:
            return pairing(i, d)
        if c < member:
            raise ValueError(
                "%s is not on the canonical fundamental sequence of %s" % (c, alpha)
            )
        i += 1


def build_tree(spec: TreeSpec, max_nodes: int = MAX_TREE_NODES) -> FiniteTree:
    """Exact node set of the truncated construction.

    Base stage: the root plus one child per a < n.  Successor stage: the
    root, the even-headed copies 2a carrying the width-a tree for a < cap,
    and for a < n the odd-headed copies 2a+1 carrying the unbounded-width
    tree.  Limit stage: heads pairing(i, d) carrying the unbounded-width
    tree of the i-th fundamental-sequence member, for i < cap and d <= n.
    """
    memo: dict[tuple[int | None, OrdinalCNF], frozenset[Node]] = {}
    nodes = _build(spec.n, spec.alpha, spec.cap, memo, max_nodes)
    if spec.depth_cap is not None:
        nodes = frozenset(s for s in nodes if len(s) <= spec.depth_cap)
    return FiniteTree(nodes)


def _build(n, alpha, cap, memo, max_nodes):
    key = (n, alpha)
    hit = memo.get(key)
    if hit is not None:
        return hit
    n_eff = cap if n is None else n
    acc: set[Node] = {()}
    if alpha.is_zero:
        for a in range(n_eff):
            acc.add((a,))
    elif alpha.is_successor:
        beta = alpha.predecessor()
        for a in range(cap):
            for s in _build(a, beta, cap, memo, max_nodes):
                acc.add((2 * a,) + s)
        if n_eff:
            unbounded = _build(None, beta, cap, memo, max_nodes)
            for a in range(n_eff):
                for s in unbounded:
                    acc.add((2 * a + 1,) + s)
    else:
        for i in range(cap):
            sub = _build(None, alpha.fundamental_sequence(i), cap, memo, max_nodes)
            for d in range(n_eff + 1):
                head = pairing(i, d)
                for s in sub:
                    acc.add((head,) + s)
    if len(acc) > max_nodes:
        raise ResourceLimitError(
            "tree construction exceeded %d nodes" % max_nodes
        )
    result = frozenset(acc)
    memo[key] = result
    return result


def node_label(s: Node) -> str:
    return "[" + ",".join(str(v) for v in s) + "]"


def parse_node_label(text: str) -> Node:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError("node label must look like [a,b,c]: %r" % text)
    body = text[1:-1].strip()
    if not body:
        return ()
    return tuple(int(v) for v in body.split(","))


def format_nodes(tree: FiniteTree) -> str:
    return "\n".join(node_label(s) for s in tree.sorted_nodes) + "\n"


def parse_nodes(text: str) -> FiniteTree:
    nodes = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        nodes.add(parse_node_label(line))
    return FiniteTree(frozenset(nodes))


def _common_prefix_len(s: Node, t: Node) -> int:
    k = 0
    for a, b in zip(s, t):
        if a != b:
            break
        k += 1
    return k


def tree_metric_space(tree: FiniteTree, base: int = 2) -> FiniteMetricSpace:
    """Ultrametric on the node set: d(s, t) = base^-L for distinct s, t
    where L is the length of their longest common prefix.

    Built directly (the axioms hold by construction); any base > 1 gives
    an ultrametric.
    """
    if base < 2:
        raise ValueError("base must be >= 2")
    nodes = tree.sorted_nodes
    n = len(nodes)
    zero = Fraction(0)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(zero)
            else:
                row.append(Fraction(1, base ** _common_prefix_len(nodes[i], nodes[j])))
        rows.append(tuple(row))
    labels = tuple(node_label(s) for s in nodes)
    return FiniteMetricSpace(labels, tuple(rows), ultrametric=True)


def tree_function_structure(tree: FiniteTree) -> StructureView:
    """Immediate-predecessor view: each node maps to its parent, the root
    to itself (keeping the function total; the root stays atomically
    definable as the unique fixpoint)."""
    nodes = tree.sorted_nodes
    index = {s: i for i, s in enumerate(nodes)}
    pred = [index[s[:-1]] if s else index[s] for s in nodes]
    return function_view([node_label(s) for s in nodes], pred)
