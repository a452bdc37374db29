"""Hirzebruch-Jung continued fractions with exact integer arithmetic.

A chain ``[n1, ..., nl]`` (all entries >= 2) evaluates to

    n1 - 1/(n2 - 1/(... - 1/nl)) = q/q1

and encodes the exceptional chain of the cyclic quotient singularity of
type (1/q)(1, q1); the j-th curve in the chain has self-intersection -nj.
The empty chain is permitted and stands for the smooth (order 1) case,
matching the convention that the determinant of an empty intersection
matrix is 1.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Iterator


class HjCf:
    """A Hirzebruch-Jung continued fraction, immutable after construction.

    Two integer sequences are cached at construction; they drive every
    downstream formula:

        u[0] = 0, u[1] = 1,  u[j+1] = n_j * u[j] - u[j-1]
        v[l] = 1, v[l+1] = 0, v[j-1] = n_j * v[j] - v[j+1]

    Here u[s] is the order of the truncated chain [n1..n(s-1)] and v[s] the
    order of [n(s+1)..nl].  In particular u[l+1] = v[0] = q (the order),
    v[1] = q1, and u[l] = ql (the reversed chain evaluates to q/ql).
    """

    __slots__ = ("entries", "u_seq", "v_seq")

    def __init__(self, entries: Iterable[int] = ()):
        ent = tuple(int(n) for n in entries)
        if any(n < 2 for n in ent):
            raise ValueError(f"chain entries must all be >= 2, got {list(ent)}")
        u = [0, 1]
        for n in ent:
            u.append(n * u[-1] - u[-2])
        w = [0, 1]
        for n in reversed(ent):
            w.append(n * w[-1] - w[-2])
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "u_seq", tuple(u))
        object.__setattr__(self, "v_seq", tuple(reversed(w)))

    def __setattr__(self, name, value):
        raise AttributeError("HjCf is immutable")

    # -- basic accessors ---------------------------------------------------

    @property
    def l(self) -> int:
        """Length of the chain (number of exceptional curves)."""
        return len(self.entries)

    @property
    def trace(self) -> int:
        """Sum of the entries."""
        return sum(self.entries)

    @property
    def q(self) -> int:
        """Order of the chain, |det| of its intersection matrix (1 if empty)."""
        return self.u_seq[-1]

    @property
    def q1(self) -> int:
        """Order of [n2..nl]; q/q1 is the value of the chain."""
        if not self.entries:
            raise ValueError("the empty chain has no q1")
        return self.v_seq[1]

    @property
    def ql(self) -> int:
        """Order of [n1..n(l-1)]; the reversed chain evaluates to q/ql."""
        if not self.entries:
            raise ValueError("the empty chain has no ql")
        return self.u_seq[-2]

    # -- comparisons / hashing --------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, HjCf) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __lt__(self, other: "HjCf") -> bool:
        return self.entries < other.entries

    def __repr__(self) -> str:
        return f"HjCf({list(self.entries)})"

    def __str__(self) -> str:
        return "[" + ",".join(str(n) for n in self.entries) + "]"

    # -- derived chains ----------------------------------------------------

    def reverse(self) -> "HjCf":
        return HjCf(self.entries[::-1])

    def canonical(self) -> "HjCf":
        """Lexicographic minimum of the chain and its reverse.

        A chain and its reverse present the same singularity type, so sets of
        types are always compared through this normal form.
        """
        rev = self.entries[::-1]
        return self if self.entries <= rev else HjCf(rev)

    def is_canonical(self) -> bool:
        return self.entries <= self.entries[::-1]


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def cf_evaluate(cf: HjCf) -> tuple[int, int | None]:
    """Evaluate a chain to the pair (q, q1); the empty chain gives (1, None)."""
    if not cf.entries:
        return (1, None)
    return (cf.q, cf.q1)


def cf_from_pair(q: int, q1: int) -> HjCf:
    """Expand q/q1 into the unique chain with all entries >= 2.

    Requires q >= 2, 1 <= q1 < q and gcd(q, q1) = 1; round-trips with
    cf_evaluate.
    """
    if q < 2:
        raise ValueError(f"order must be >= 2, got {q}")
    if not 1 <= q1 < q:
        raise ValueError(f"q1 must satisfy 1 <= q1 < q, got q1={q1}, q={q}")
    if gcd(q, q1) != 1:
        raise ValueError(f"q and q1 must be coprime, got {q}/{q1}")
    entries = []
    a, b = q, q1
    while b:
        n = -(-a // b)
        entries.append(n)
        a, b = b, n * b - a
    return HjCf(entries)


def cf_reverse(cf: HjCf) -> HjCf:
    return cf.reverse()


def cf_canonical(cf: HjCf) -> HjCf:
    return cf.canonical()


def chain_order(entries: Iterable[int]) -> int:
    """Order of an entry sequence without building an HjCf (empty gives 1)."""
    a, b = 0, 1
    for n in entries:
        a, b = b, n * b - a
    return b


def cf_deleted_det(cf: HjCf, deleted_indices: Iterable[int]) -> int:
    """|det| of the intersection matrix with rows/columns deleted.

    ``deleted_indices`` are 1-based positions.  Deleting positions splits the
    chain into runs, and the determinant is the product of the orders of the
    runs (the matrix becomes block diagonal); an empty run contributes 1.
    """
    deleted = set(deleted_indices)
    if not all(1 <= i <= cf.l for i in deleted):
        raise ValueError(f"deleted positions {sorted(deleted)} out of range 1..{cf.l}")
    det = 1
    run: list[int] = []
    for pos, n in enumerate(cf.entries, start=1):
        if pos in deleted:
            det *= chain_order(run)
            run = []
        else:
            run.append(n)
    return det * chain_order(run)


def cf_bump(cf: HjCf, j: int) -> int:
    """Order of the chain with its j-th entry increased by one.

    Equals u_j * v_j + q, which is strictly greater than q.
    """
    if not 1 <= j <= cf.l:
        raise ValueError(f"position {j} out of range 1..{cf.l}")
    return cf.u_seq[j] * cf.v_seq[j] + cf.q


def cf_mod3_criterion(cf: HjCf) -> bool:
    """True iff q1 + ql + trace*q is not divisible by 3.

    This holds exactly when the order q is divisible by 3, a fact used to
    obstruct square discriminants in the order-(2,3,5,q) scans.
    """
    if not cf.entries:
        raise ValueError("criterion undefined for the empty chain")
    return (cf.q1 + cf.ql + cf.trace * cf.q) % 3 != 0


def enumerate_cfs_of_order(q: int) -> list[HjCf]:
    """All chains of order q up to reversal, canonical and sorted.

    For q with a primitive-root-like unit group (q = 4, p^k or 2 p^k) the
    count is phi(q)/2 + 1; in general it is (phi(q) + #{x : x^2 = 1 mod q})/2.
    """
    if q < 2:
        raise ValueError(f"order must be >= 2, got {q}")
    seen: set[tuple[int, ...]] = set()
    for q1 in range(1, q):
        if gcd(q, q1) != 1:
            continue
        ent = _expand_entries(q, q1)
        seen.add(min(ent, ent[::-1]))
    return [HjCf(e) for e in sorted(seen)]


def _expand_entries(q: int, q1: int) -> tuple[int, ...]:
    entries = []
    a, b = q, q1
    while b:
        n = -(-a // b)
        entries.append(n)
        a, b = b, n * b - a
    return tuple(entries)


def enumerate_cfs_by_shape(
    length: int, trace: int, max_entry: int | None = None
) -> list[HjCf]:
    """All chains with the given length and entry sum, up to reversal.

    Entries run over 2..max_entry (unbounded by default).  Generation is by
    raw composition enumeration followed by canonical deduplication; all uses
    here have length <= 9, so no cleverness is warranted.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if trace < 2 * length:
        raise ValueError(f"trace {trace} impossible for length {length}")
    cap = trace if max_entry is None else max_entry
    seen: set[tuple[int, ...]] = set()
    for ent in _compositions(length, trace, cap):
        seen.add(min(ent, ent[::-1]))
    return [HjCf(e) for e in sorted(seen)]


def _compositions(length: int, total: int, cap: int) -> Iterator[tuple[int, ...]]:
    if length == 1:
        if 2 <= total <= cap:
            yield (total,)
        return
    hi = min(cap, total - 2 * (length - 1))
    for first in range(2, hi + 1):
        for rest in _compositions(length - 1, total - first, cap):
            yield (first,) + rest


def parse_cf(text: str) -> HjCf:
    """Parse a chain from text.

    Accepts the bracket form ``[3,2,2]``, a fraction ``19/9`` (expanded via
    cf_from_pair) or a bare integer ``7`` (meaning 7/1).
    """
    s = text.strip()
    if s.startswith("["):
        if not s.endswith("]"):
            raise ValueError(f"unbalanced brackets in {text!r}")
        body = s[1:-1].strip()
        if not body:
            return HjCf()
        return HjCf(int(tok) for tok in body.split(","))
    if "/" in s:
        num, den = s.split("/", 1)
        return cf_from_pair(int(num), int(den))
    return cf_from_pair(int(s), 1)
