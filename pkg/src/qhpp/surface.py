"""Invariants of cyclic quotient singularities and surface candidates.

A candidate is an ordered list of cyclic quotient singularities placed on a
Q-homology projective plane (b0 = b2 = b4 = 1, so the Euler number of the
surface is 3 and the Noether relation gives K^2 = 9 - L on the minimal
resolution, L being the total number of exceptional curves).

The key derived numbers are, with f: S' -> S the minimal resolution:

* per singularity, the adjunction divisor Dp supported on the exceptional
  chain, with coefficients 1 - (v_j + u_j)/q, its intersection Dp.K = -Dp^2,
  and the self-intersection of the discriminant-group generator, -ql/q;
* K_S^2 = (9 - L) + sum_p Dp.K;
* the orbifold Euler characteristic e_orb = 3 - sum_p (1 - 1/q_p);
* det R = product of the orders, and the discriminant D = det R * K_S^2,
  which must be a positive perfect square for the candidate to survive;
* D' = D / c^2 when the exceptional lattice has primitive closure of
  index c (c = 1 whenever the orders are pairwise coprime).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .hjcf import HjCf, parse_cf
from .ratio import format_rational, is_positive_square

__all__ = [
    "CyclicSing",
    "SurfaceCandidate",
    "BmyStatus",
    "GramConfig",
    "dp_data",
    "candidate_invariants",
    "bmy_status",
    "gram_determinant",
    "candidate_to_dict",
    "candidate_to_json",
    "is_positive_square",
]


@dataclass(frozen=True)
class CyclicSing:
    """A cyclic quotient singularity with its resolution-divisor data."""

    cf: HjCf
    q: int
    dp_coeffs: tuple[Fraction, ...]
    dp_dot_k: Fraction
    dp_sq: Fraction
    ep_sq: Fraction

    @property
    def l(self) -> int:
        return self.cf.l

    def __str__(self) -> str:
        return str(self.cf)


def dp_data(cf: HjCf | str) -> CyclicSing:
    """Adjunction data of the chain: coefficients, Dp.K, Dp^2 and ep^2.

    The coefficient of the j-th curve is 1 - (v_j + u_j)/q, each in [0, 1).
    Dp.K = sum coeff_j * (n_j - 2) = -Dp^2, and the value is cross-checked
    against the closed form 2l - trace + 2 - (q1 + ql + 2)/q at construction.
    """
    if isinstance(cf, str):
        cf = parse_cf(cf)
    if not cf.entries:
        raise ValueError("dp_data needs a nonempty chain")
    q = cf.q
    coeffs = tuple(
        1 - Fraction(cf.v_seq[j] + cf.u_seq[j], q) for j in range(1, cf.l + 1)
    )
    dot_k = sum(
        (c * (n - 2) for c, n in zip(coeffs, cf.entries)), start=Fraction(0)
    )
    closed = 2 * cf.l - cf.trace + 2 - Fraction(cf.q1 + cf.ql + 2, q)
    if -dot_k != closed:
        raise AssertionError(
            f"adjunction data inconsistent for {cf}: {-dot_k} != {closed}"
        )
    return CyclicSing(
        cf=cf,
        q=q,
        dp_coeffs=coeffs,
        dp_dot_k=dot_k,
        dp_sq=-dot_k,
        ep_sq=-Fraction(cf.ql, q),
    )


@dataclass(frozen=True)
class SurfaceCandidate:
    """A list of cyclic singularities with all derived surface invariants."""

    sings: tuple[CyclicSing, ...]
    c: int
    L: int
    ks2_smooth: Fraction
    ks2: Fraction
    det_r: int
    d_value: Fraction
    e_orb: Fraction
    d_prime: Fraction

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(s.q for s in self.sings)

    @property
    def pairwise_coprime(self) -> bool:
        qs = self.orders
        return all(
            gcd(qs[i], qs[j]) == 1 for i in range(len(qs)) for j in range(i + 1, len(qs))
        )

    def canonical_key(self) -> tuple:
        return (
            tuple(sorted(self.orders)),
            tuple(sorted(s.cf.canonical().entries for s in self.sings)),
        )


def candidate_invariants(
    sings: list[HjCf | str], c: int = 1
) -> SurfaceCandidate:
    """Build a candidate from chains and compute every derived invariant.

    ``c`` is the index of the primitive closure of the exceptional lattice;
    it is caller-supplied (default 1).  c^2 must divide det R so that
    det R / c^2 is an integer, and pairwise coprime orders force c = 1.
    """
    data = tuple(dp_data(cf) for cf in sings)
    if not data:
        raise ValueError("a candidate needs at least one singularity")
    if c < 1:
        raise ValueError(f"c must be a positive integer, got {c}")
    L = sum(s.l for s in data)
    det_r = 1
    for s in data:
        det_r *= s.q
    if det_r % (c * c) != 0:
        raise ValueError(f"c={c} rejected: c^2 does not divide det R = {det_r}")
    ks2_smooth = Fraction(9 - L)
    ks2 = ks2_smooth + sum((s.dp_dot_k for s in data), start=Fraction(0))
    e_orb = 3 - sum((1 - Fraction(1, s.q) for s in data), start=Fraction(0))
    cand = SurfaceCandidate(
        sings=data,
        c=c,
        L=L,
        ks2_smooth=ks2_smooth,
        ks2=ks2,
        det_r=det_r,
        d_value=det_r * ks2,
        e_orb=e_orb,
        d_prime=Fraction(det_r * ks2, c * c),
    )
    if c != 1 and cand.pairwise_coprime:
        raise ValueError(
            f"c={c} rejected: pairwise coprime orders {cand.orders} force c=1"
        )
    return cand


class BmyStatus(enum.Enum):
    """Classification of a candidate against the orbifold BMY inequalities.

    K^2 <= 3 e_orb must hold when K is nef, and 0 <= e_orb when either K or
    -K is nef.  E_ORB_NEGATIVE therefore kills a candidate outright,
    VIOLATES_K_AMPLE rules out ample K (leaving the del Pezzo side), and
    OK_K_AMPLE means ample K passes the filter.  OK marks candidates with
    K^2 <= 0, where the nef-K inequality does not apply.
    """

    OK_K_AMPLE = "OK_K_AMPLE"
    VIOLATES_K_AMPLE = "VIOLATES_K_AMPLE"
    E_ORB_NEGATIVE = "E_ORB_NEGATIVE"
    OK = "OK"


def bmy_status(cand: SurfaceCandidate) -> BmyStatus:
    if cand.e_orb < 0:
        return BmyStatus.E_ORB_NEGATIVE
    if cand.ks2 <= 0:
        return BmyStatus.OK
    if cand.ks2 <= 3 * cand.e_orb:
        return BmyStatus.OK_K_AMPLE
    return BmyStatus.VIOLATES_K_AMPLE


def candidate_to_dict(cand: SurfaceCandidate) -> dict:
    """JSON-ready summary; rationals as ``p/q`` strings in lowest terms."""
    return {
        "sings": [str(s.cf) for s in cand.sings],
        "orders": list(cand.orders),
        "L": cand.L,
        "ks2": format_rational(cand.ks2),
        "detR": cand.det_r,
        "D": format_rational(cand.d_value),
        "D_square": is_positive_square(cand.d_value),
        "three_e_orb": format_rational(3 * cand.e_orb),
        "bmy": bmy_status(cand).value,
    }


def candidate_to_json(cand: SurfaceCandidate) -> str:
    return json.dumps(candidate_to_dict(cand), sort_keys=True)


# ---------------------------------------------------------------------------
# small Gram matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GramConfig:
    """A symmetric integer intersection configuration.

    ``diagonal`` holds the self-intersections; ``off_diagonal`` maps index
    pairs (i, j), i < j, 0-based, to intersection numbers.
    """

    diagonal: tuple[int, ...]
    off_diagonal: dict[tuple[int, int], int]

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def matrix(self) -> list[list[int]]:
        n = self.size
        m = [[0] * n for _ in range(n)]
        for i, d in enumerate(self.diagonal):
            m[i][i] = d
        for (i, j), w in self.off_diagonal.items():
            if not (0 <= i < n and 0 <= j < n and i != j):
                raise ValueError(f"edge ({i},{j}) out of range for size {n}")
            if w < 0:
                raise ValueError(f"intersection numbers must be >= 0, got {w}")
            m[i][j] = w
            m[j][i] = w
        return m


def gram_determinant(cfg: GramConfig) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    m = cfg.matrix()
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]
