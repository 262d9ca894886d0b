"""Ordinals below w^w in Cantor normal form.

An ordinal is a finite sum  w^e1*c1 + w^e2*c2 + ... + w^ek*ck  with strictly
decreasing natural exponents and positive natural coefficients.  The empty
sum is 0.  Input strings use ``w`` for the first infinite ordinal, e.g.
``w^2*3+w+5``.

Only the operations the rest of the package needs are provided: parsing,
printing, comparison, limit/successor classification, multiplication by w on
the right, and canonical fundamental sequences for limits.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

from .errors import OrdinalParseError

_TERM_RE = re.compile(
    r"""^(?:
            (?P<nat>\d+)                                  # plain natural
          | w (?:\^(?P<exp>\d+))? (?:\*(?P<coeff>\d+))?   # w, w^e, w*c, w^e*c
        )$""",
    re.VERBOSE,
)


@total_ordering
@dataclass(frozen=True)
class OrdinalCNF:
    """An ordinal below w^w as a tuple of (exponent, coefficient) terms."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if exps != sorted(exps, reverse=True) or len(set(exps)) != len(exps):
            raise ValueError("exponents must be strictly decreasing")
        if any(c < 1 or e < 0 for e, c in self.terms):
            raise ValueError("coefficients must be >= 1, exponents >= 0")

    # -- classification ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_limit(self) -> bool:
        """True for limit ordinals (0 is not a limit here)."""
        return bool(self.terms) and self.terms[-1][0] >= 1

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == 0

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    # -- order -------------------------------------------------------------

    def __lt__(self, other: "OrdinalCNF") -> bool:
        return self.terms < other.terms

    # -- arithmetic (only what is needed) ----------------------------------

    def predecessor(self) -> "OrdinalCNF":
        """Predecessor of a successor ordinal."""
        if not self.is_successor:
            raise ValueError("predecessor of a non-successor ordinal")
        e, c = self.terms[-1]
        rest = self.terms[:-1]
        if c > 1:
            rest = rest + ((e, c - 1),)
        return OrdinalCNF(rest)

    def times_omega(self) -> "OrdinalCNF":
        """Right multiplication by w: lower terms are absorbed,
        the result is w^(e+1) for leading exponent e.  0*w = 0."""
        if self.is_zero:
            return self
        return OrdinalCNF(((self.terms[0][0] + 1, 1),))

    def fundamental_sequence(self, k: int) -> "OrdinalCNF":
        """k-th member of the canonical increasing sequence converging to a
        limit ordinal: (g + w^e*c)[k] is g + w^e*(c-1) + w^(e-1)*k, with the
        usual degenerate cases dropped."""
        if not self.is_limit:
            raise ValueError("fundamental sequence of a non-limit ordinal")
        e, c = self.terms[-1]
        head = list(self.terms[:-1])
        if c > 1:
            head.append((e, c - 1))
        if e == 1:
            if k > 0:
                head.append((0, k))
        else:
            if k > 0:
                head.append((e - 1, k))
        return OrdinalCNF(tuple(head))

    # -- text form ---------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
            else:
                base = "w" if e == 1 else "w^%d" % e
                parts.append(base if c == 1 else "%s*%d" % (base, c))
        return "+".join(parts)


ZERO = OrdinalCNF()
ONE = OrdinalCNF(((0, 1),))
OMEGA = OrdinalCNF(((1, 1),))


def cnf_parse(text: str) -> OrdinalCNF:
    """Parse an ordinal expression.

    The grammar is ``0 | k | w | w^e | term*c | term+term+...``.  Out-of-order
    or repeated exponents are normalized by genuine ordinal addition of the
    terms left to right (so ``1+w`` parses to ``w``).
    """
    text = text.strip()
    if not text:
        raise OrdinalParseError("empty ordinal expression")
    acc: list[tuple[int, int]] = []
    for raw in text.split("+"):
        raw = raw.strip()
        m = _TERM_RE.match(raw)
        if not m:
            raise OrdinalParseError("bad ordinal term %r" % raw)
        if m.group("nat") is not None:
            e, c = 0, int(m.group("nat"))
        else:
            e = int(m.group("exp")) if m.group("exp") else 1
            c = int(m.group("coeff")) if m.group("coeff") else 1
        if c == 0:
            continue
        # ordinal addition: terms below the new exponent are absorbed
        while acc and acc[-1][0] < e:
            acc.pop()
        if acc and acc[-1][0] == e:
            acc[-1] = (e, acc[-1][1] + c)
        else:
            acc.append((e, c))
    return OrdinalCNF(tuple(acc))


def cnf_compare(a: OrdinalCNF, b: OrdinalCNF) -> int:
    """-1, 0 or 1 according to ordinal order."""
    if a.terms < b.terms:
        return -1
    if a.terms > b.terms:
        return 1
    return 0
