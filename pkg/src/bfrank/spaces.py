"""Finite metric spaces with exact rational distances, and the two
structure views (distance relations / immediate-predecessor function) the
equivalence engine operates on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import SpaceFormatError, SpaceValidationError

Point = int
PointTuple = tuple[int, ...]


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A validated finite metric space over labeled points.

    ``dist`` is a square matrix of nonnegative Fractions.  ``ultrametric``
    is set when the max-inequality d(i,k) <= max(d(i,j), d(j,k)) holds for
    every triple.  Construct through :func:`validate_space`.
    """

    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    ultrametric: bool = False

    @property
    def size(self) -> int:
        return len(self.labels)

    def d(self, x: int, y: int) -> Fraction:
        return self.dist[x][y]

    def relabel(self, perm: tuple[int, ...]) -> "FiniteMetricSpace":
        """Space with point i carrying the data of point perm[i]."""
        n = self.size
        rows = tuple(
            tuple(self.dist[perm[i]][perm[j]] for j in range(n)) for i in range(n)
        )
        return FiniteMetricSpace(
            tuple(self.labels[perm[i]] for i in range(n)), rows, self.ultrametric
        )


def validate_space(rows, labels=None) -> FiniteMetricSpace:
    """Check the metric axioms and build a space.

    Raises SpaceValidationError with the witnessing pair/triple on the first
    violation found: non-square shape, asymmetry, nonzero diagonal, zero
    off-diagonal, negative entry, or triangle violation.
    """
    m = len(rows)
    mat = []
    for i, row in enumerate(rows):
        if len(row) != m:
            raise SpaceValidationError(
                "row %d has %d entries, expected %d" % (i, len(row), m), witness=(i,)
            )
        mat.append(tuple(Fraction(v) for v in row))
    mat = tuple(mat)
    if labels is None:
        labels = tuple("p%d" % i for i in range(m))
    else:
        labels = tuple(labels)
        if len(labels) != m:
            raise SpaceValidationError("expected %d labels" % m)
    for i in range(m):
        if mat[i][i] != 0:
            raise SpaceValidationError(
                "nonzero diagonal at (%d,%d)" % (i, i), witness=(i, i)
            )
        for j in range(i + 1, m):
            if mat[i][j] != mat[j][i]:
                raise SpaceValidationError(
                    "asymmetric at (%d,%d)" % (i, j), witness=(i, j)
                )
            if mat[i][j] <= 0:
                raise SpaceValidationError(
                    "nonpositive off-diagonal distance at (%d,%d)" % (i, j),
                    witness=(i, j),
                )
    ultra = True
    for i in range(m):
        for j in range(m):
            for k in range(m):
                if mat[i][k] > mat[i][j] + mat[j][k]:
                    raise SpaceValidationError(
                        "triangle violation at (%d,%d,%d)" % (i, j, k),
                        witness=(i, j, k),
                    )
                if mat[i][k] > max(mat[i][j], mat[j][k]):
                    ultra = False
    return FiniteMetricSpace(labels, mat, ultrametric=ultra)


def satisfies_R(space: FiniteMetricSpace, q: Fraction, x: int, y: int) -> bool:
    """The atomic relation of the distance signature: d(x,y) < q."""
    if q <= 0:
        raise ValueError("threshold must be positive")
    return space.d(x, y) < q


def parse_space_file(text: str) -> FiniteMetricSpace:
    """Parse the space file format.

    ``#`` starts a comment; a comment line ``# labels: a b c`` supplies point
    names.  The first data token is the point count m, followed by m rows of
    m rationals (``p/q`` or integer).
    """
    labels = None
    tokens: list[tuple[str, int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.lower().startswith("labels:"):
                labels = body[len("labels:"):].split()
            continue
        for tok in stripped.split():
            tokens.append((tok, lineno))
    if not tokens:
        raise SpaceFormatError("no data in space file")
    head, headline = tokens[0]
    try:
        m = int(head)
    except ValueError:
        raise SpaceFormatError("point count %r is not an integer" % head, headline)
    if m < 1:
        raise SpaceFormatError("point count must be >= 1", headline)
    body = tokens[1:]
    if len(body) != m * m:
        raise SpaceFormatError(
            "expected %d matrix entries, found %d" % (m * m, len(body)),
            body[-1][1] if body else headline,
        )
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            tok, lineno = body[i * m + j]
            try:
                row.append(Fraction(tok))
            except (ValueError, ZeroDivisionError):
                raise SpaceFormatError("bad rational %r" % tok, lineno)
            if "." in tok:
                raise SpaceFormatError(
                    "decimal literal %r rejected, use p/q" % tok, lineno
                )
        rows.append(row)
    if labels is not None and len(labels) != m:
        raise SpaceFormatError("labels: line has %d names, expected %d"
                               % (len(labels), m))
    return validate_space(rows, labels)


def format_space_file(space: FiniteMetricSpace, comment: str | None = None) -> str:
    """Inverse of parse_space_file."""
    lines = []
    if comment:
        for c in comment.splitlines():
            lines.append("# " + c)
    lines.append("# labels: " + " ".join(space.labels))
    lines.append(str(space.size))
    for row in space.dist:
        lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


# -- structure views -------------------------------------------------------


@dataclass(frozen=True)
class StructureView:
    """A finite structure presented to the equivalence engine.

    ``atoms[i][j]`` is a hashable code such that a map between point sets
    preserves every atomic formula of the view's signature exactly when it
    preserves all atom codes (including the diagonal) and the equality
    pattern.  For the metric view the code is the exact distance; for the
    predecessor-function view it encodes f(i)=j, f(j)=i and f(i)=i.
    """

    kind: str  # "metric" | "function"
    labels: tuple[str, ...]
    atoms: tuple[tuple[object, ...], ...]
    space: FiniteMetricSpace | None = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return len(self.labels)

    def __hash__(self):
        # exact-rational atoms make the generated hash expensive; views are
        # immutable, so compute once (engine/oracle memos key on the view)
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.kind, self.labels, self.atoms))
            object.__setattr__(self, "_hash", h)
        return h


def metric_view(space: FiniteMetricSpace) -> StructureView:
    return StructureView("metric", space.labels, space.dist, space=space)


def function_view(labels, pred) -> StructureView:
    """View of a total unary function ``pred`` (point index -> point index).

    atoms[i][j] for i != j packs (pred(i)==j, pred(j)==i); the diagonal
    packs pred(i)==i, so fixpoints are atomically definable.
    """
    n = len(labels)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(2 if pred[i] == i else 0)
            else:
                row.append((2 if pred[i] == j else 0) | (1 if pred[j] == i else 0))
        rows.append(tuple(row))
    return StructureView("function", tuple(labels), tuple(rows))


# -- tuples and quantifier-free types --------------------------------------


def dedupe_reduce(t: PointTuple) -> tuple[PointTuple, tuple[int, ...]]:
    """Split a tuple into its subsequence of first occurrences plus the
    pattern mapping each position to its support position."""
    support: list[int] = []
    seen: dict[int, int] = {}
    pattern = []
    for p in t:
        if p not in seen:
            seen[p] = len(support)
            support.append(p)
        pattern.append(seen[p])
    return tuple(support), tuple(pattern)


def reconstruct(support: PointTuple, pattern: tuple[int, ...]) -> PointTuple:
    return tuple(support[i] for i in pattern)


@dataclass(frozen=True)
class QfType:
    """Canonical quantifier-free type fingerprint of a tuple: the equality
    pattern together with the atom codes over all position pairs."""

    pattern: tuple[int, ...]
    atoms: tuple[tuple[object, ...], ...]


def qf_type(view: StructureView, t: PointTuple) -> QfType:
    n = view.size
    for p in t:
        if not 0 <= p < n:
            raise IndexError("point index %d out of range" % p)
    _, pattern = dedupe_reduce(t)
    a = view.atoms
    rows = tuple(tuple(a[x][y] for y in t) for x in t)
    return QfType(pattern, rows)
