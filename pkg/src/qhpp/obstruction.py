"""Curve-class obstruction calculus on the minimal resolution.

A hypothetical curve class E on the minimal resolution is described by its
leading coefficient m (relative to the generator M of the Picard group whose
pairing with the pullback of K is K^2/sqrt(D')) together with the incidence
numbers E.A(j,p) against the exceptional curves.  The intersection numbers

    E.K  = (+-m/sqrt(D')) K^2 - sum_p sum_j (1 - (v_j+u_j)/q) E.A(j)
    E^2  = (m^2/D') K^2 - sum_p sum_j disc(p, j) E.A(j)

with disc(p, j) the local discrepancy sum, turn the existence of (-1)-curves
and minimal curves into bounded Diophantine problems over the non-negative
integers; those problems and their exact solver live here as well.

The sign of the leading term depends on which of K or -K is ample; the
regime is always an explicit parameter and never inferred.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .ratio import rational_sqrt
from .surface import CyclicSing, SurfaceCandidate

__all__ = [
    "Regime",
    "Incidence",
    "CurveClass",
    "DiophProblem",
    "degree_sum",
    "local_discrepancy",
    "ek_formula",
    "esq_formula",
    "esq_two_component",
    "m_upper_bound",
    "solve_dioph",
    "minimal_curve_m",
    "aggregated_problem",
    "component_problem",
]


class Regime(enum.Enum):
    """Ampleness convention fixing the sign of the leading coefficient."""

    K_AMPLE = "K"
    ANTI_K_AMPLE = "-K"


@dataclass(frozen=True)
class Incidence:
    """Non-negative intersection numbers with each exceptional curve.

    ``rows[p][j]`` is E.A(j+1) at the p-th singularity (0-based here,
    1-based in the formulas).
    """

    rows: tuple[tuple[int, ...], ...]

    @staticmethod
    def zero(cand: SurfaceCandidate) -> "Incidence":
        return Incidence(tuple((0,) * s.l for s in cand.sings))

    @staticmethod
    def from_hits(cand: SurfaceCandidate, hits: dict[tuple[int, int], int]) -> "Incidence":
        """Build an incidence from {(sing index, 1-based position): count}."""
        rows = [[0] * s.l for s in cand.sings]
        for (p, j), val in hits.items():
            rows[p][j - 1] = val
        return Incidence(tuple(tuple(r) for r in rows))

    def validate_against(self, cand: SurfaceCandidate) -> None:
        if len(self.rows) != len(cand.sings):
            raise ValueError("incidence rows do not match the singularity list")
        for row, s in zip(self.rows, cand.sings):
            if len(row) != s.l:
                raise ValueError(f"incidence row {row} does not match chain {s.cf}")
            if any(x < 0 for x in row):
                raise ValueError("incidence numbers must be non-negative")


@dataclass(frozen=True)
class CurveClass:
    """A curve class: leading coefficient, candidate surface and incidence."""

    m: int
    cand: SurfaceCandidate
    incidence: Incidence
    regime: Regime = Regime.K_AMPLE

    def __post_init__(self):
        self.incidence.validate_against(self.cand)


def degree_sum(curve: CurveClass) -> Fraction:
    """sum_p sum_j (1 - (v_j+u_j)/q) E.A(j,p), the adjunction-weighted degree."""
    total = Fraction(0)
    for sing, row in zip(curve.cand.sings, curve.incidence.rows):
        for coeff, ea in zip(sing.dp_coeffs, row):
            if ea:
                total += coeff * ea
    return total


def local_discrepancy(sing: CyclicSing, incidence_row: tuple[int, ...], j: int) -> Fraction:
    """The discrepancy sum at position j (1-based) of one chain:

    sum_{k<=j} (v_j u_k / q) EA_k  +  sum_{k>j} (v_k u_j / q) EA_k.
    """
    if not 1 <= j <= sing.l:
        raise ValueError(f"position {j} out of range 1..{sing.l}")
    cf = sing.cf
    q = sing.q
    total = Fraction(0)
    for k in range(1, sing.l + 1):
        ea = incidence_row[k - 1]
        if not ea:
            continue
        if k <= j:
            total += Fraction(cf.v_seq[j] * cf.u_seq[k], q) * ea
        else:
            total += Fraction(cf.v_seq[k] * cf.u_seq[j], q) * ea
    return total


def _leading_ek_term(curve: CurveClass) -> Fraction:
    if curve.m == 0:
        return Fraction(0)
    sqrt_dp = rational_sqrt(curve.cand.d_prime)
    sign = 1 if curve.regime is Regime.K_AMPLE else -1
    return sign * Fraction(curve.m) / sqrt_dp * curve.cand.ks2


def ek_formula(curve: CurveClass) -> Fraction:
    """E.K on the minimal resolution; needs D' to be a rational square."""
    return _leading_ek_term(curve) - degree_sum(curve)


def esq_formula(curve: CurveClass) -> Fraction:
    """E^2 from the full double sum of local discrepancies."""
    lead = Fraction(0)
    if curve.m != 0:
        rational_sqrt(curve.cand.d_prime)
        lead = Fraction(curve.m * curve.m) / curve.cand.d_prime * curve.cand.ks2
    total = Fraction(0)
    for sing, row in zip(curve.cand.sings, curve.incidence.rows):
        for j in range(1, sing.l + 1):
            ea = row[j - 1]
            if ea:
                total += local_discrepancy(sing, row, j) * ea
    return lead - total


def esq_two_component(curve: CurveClass) -> Fraction:
    """E^2 by the closed form valid when each chain carries at most two hits.

    Must agree with esq_formula wherever it applies; rejects incidences with
    three or more nonzero entries on one chain.
    """
    lead = Fraction(0)
    if curve.m != 0:
        rational_sqrt(curve.cand.d_prime)
        lead = Fraction(curve.m * curve.m) / curve.cand.d_prime * curve.cand.ks2
    total = Fraction(0)
    for sing, row in zip(curve.cand.sings, curve.incidence.rows):
        support = [j for j in range(1, sing.l + 1) if row[j - 1]]
        if len(support) > 2:
            raise ValueError(
                f"chain {sing.cf} carries {len(support)} hits; at most 2 allowed"
            )
        cf = sing.cf
        q = sing.q
        if len(support) >= 1:
            s = support[0]
            ea_s = row[s - 1]
            total += Fraction(cf.v_seq[s] * cf.u_seq[s], q) * ea_s * ea_s
        if len(support) == 2:
            s, t = support
            ea_s, ea_t = row[s - 1], row[t - 1]
            total += Fraction(cf.v_seq[t] * cf.u_seq[t], q) * ea_t * ea_t
            total += 2 * Fraction(cf.v_seq[t] * cf.u_seq[s], q) * ea_s * ea_t
    return lead - total


def m_upper_bound(d_prime: Fraction | int, L: int) -> Fraction:
    """sqrt(D') / (L - 9), the ceiling for the leading coefficient of a
    (-1)-curve on a non-rational surface with L > 9 exceptional curves."""
    if L <= 9:
        raise ValueError(f"bound needs L > 9, got L={L}")
    root = rational_sqrt(Fraction(d_prime))
    if root <= 0:
        raise ValueError("D' must be positive")
    return root / (L - 9)


def minimal_curve_m(cand: SurfaceCandidate, incidence: Incidence) -> Fraction:
    """Leading coefficient forced on a minimal (-1)-curve when -K is ample.

    From C.K = -1 written in the anti-ample regime:
        m = sqrt(D') * (1 - degree_sum) / K^2.
    The caller checks positivity and integrality of the result.
    """
    if cand.ks2 == 0:
        raise ValueError("K^2 = 0: leading coefficient undefined")
    incidence.validate_against(cand)
    curve = CurveClass(m=0, cand=cand, incidence=incidence, regime=Regime.ANTI_K_AMPLE)
    root = rational_sqrt(cand.d_prime)
    return root * (1 - degree_sum(curve)) / cand.ks2


# ---------------------------------------------------------------------------
# bounded Diophantine problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiophProblem:
    """sum coeffs[i] * x[i] = target over non-negative integers x.

    All coefficients must be positive, which makes the solution set finite
    (x[i] <= target/coeffs[i]).  Optional extras:

    * ``group_constraints``: pairs (index tuple, exact sum); a solution must
      satisfy sum_{i in group} coeffs[i] * x[i] == exact sum;
    * ``quad_coeffs`` with ``quad_bound``: keep only solutions with
      sum quad_coeffs[i] * x[i]^2 <= quad_bound.
    """

    coeffs: tuple[Fraction, ...]
    target: Fraction
    group_constraints: tuple[tuple[tuple[int, ...], Fraction], ...] = ()
    quad_coeffs: tuple[Fraction, ...] | None = None
    quad_bound: Fraction | None = None

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("at least one coefficient required")
        if any(c <= 0 for c in self.coeffs):
            raise ValueError("all coefficients must be positive")
        if self.quad_coeffs is not None:
            if len(self.quad_coeffs) != len(self.coeffs):
                raise ValueError("quad_coeffs length mismatch")
            if any(c <= 0 for c in self.quad_coeffs):
                raise ValueError("quadratic coefficients must be positive")
            if self.quad_bound is None:
                raise ValueError("quad_coeffs given without quad_bound")

    def to_dict(self) -> dict:
        """Wire form: rationals as strings, ``quad`` null when absent."""
        from .ratio import format_rational

        return {
            "coeffs": [format_rational(c) for c in self.coeffs],
            "target": format_rational(self.target),
            "quad": None
            if self.quad_coeffs is None
            else {
                "coeffs": [format_rational(c) for c in self.quad_coeffs],
                "bound": format_rational(self.quad_bound),
            },
        }

    @staticmethod
    def from_dict(data: dict) -> "DiophProblem":
        from .ratio import parse_rational

        quad = data.get("quad")
        return DiophProblem(
            coeffs=tuple(parse_rational(c) for c in data["coeffs"]),
            target=parse_rational(data["target"]),
            quad_coeffs=None
            if quad is None
            else tuple(parse_rational(c) for c in quad["coeffs"]),
            quad_bound=None if quad is None else parse_rational(quad["bound"]),
        )


def solve_dioph(problem: DiophProblem) -> list[tuple[int, ...]]:
    """The complete, lexicographically sorted solution list.

    Enumeration is a depth-first search over cleared-denominator integers;
    an empty list is a normal outcome.
    """
    n = len(problem.coeffs)
    den = lcm(
        problem.target.denominator, *(c.denominator for c in problem.coeffs)
    )
    cleared = [int(c * den) for c in problem.coeffs]
    target = problem.target * den
    if target.denominator != 1 or target < 0:
        return []
    solutions: list[tuple[int, ...]] = []
    vec = [0] * n

    def dfs(i: int, remaining: int) -> None:
        if i == n - 1:
            if remaining % cleared[i] == 0:
                vec[i] = remaining // cleared[i]
                solutions.append(tuple(vec))
            return
        step = cleared[i]
        for x in range(remaining // step + 1):
            vec[i] = x
            dfs(i + 1, remaining - x * step)

    dfs(0, int(target))

    def keep(sol: tuple[int, ...]) -> bool:
        for idx, exact in problem.group_constraints:
            got = sum((problem.coeffs[i] * sol[i] for i in idx), start=Fraction(0))
            if got != exact:
                return False
        if problem.quad_coeffs is not None:
            qsum = sum(
                (qc * x * x for qc, x in zip(problem.quad_coeffs, sol)),
                start=Fraction(0),
            )
            if qsum > problem.quad_bound:
                return False
        return True

    return [s for s in solutions if keep(s)]


# ---------------------------------------------------------------------------
# problem builders used by the elimination pipelines
# ---------------------------------------------------------------------------


def component_problem(
    cand: SurfaceCandidate,
    target: Fraction,
    with_quad_bound: Fraction | None = None,
    group_sums: dict[int, Fraction] | None = None,
) -> tuple[DiophProblem, list[tuple[int, int]]]:
    """Full-granularity degree equation over every positive-coefficient curve.

    Returns the problem plus the (sing index, 1-based position) label of each
    variable.  Curves with coefficient zero cannot contribute to the degree
    sum and are omitted; with a quadratic filter active they would only ever
    be set to zero anyway.
    """
    coeffs: list[Fraction] = []
    quads: list[Fraction] = []
    labels: list[tuple[int, int]] = []
    groups: list[tuple[tuple[int, ...], Fraction]] = []
    for p, sing in enumerate(cand.sings):
        members = []
        for j in range(1, sing.l + 1):
            coeff = sing.dp_coeffs[j - 1]
            if coeff > 0:
                members.append(len(coeffs))
                coeffs.append(coeff)
                quads.append(
                    Fraction(sing.cf.v_seq[j] * sing.cf.u_seq[j], sing.q)
                )
                labels.append((p, j))
        if group_sums is not None and p in group_sums:
            groups.append((tuple(members), group_sums[p]))
    problem = DiophProblem(
        coeffs=tuple(coeffs),
        target=target,
        group_constraints=tuple(groups),
        quad_coeffs=tuple(quads) if with_quad_bound is not None else None,
        quad_bound=with_quad_bound,
    )
    return problem, labels


def aggregated_problem(
    cand: SurfaceCandidate, target: Fraction
) -> tuple[DiophProblem, list[int]]:
    """One variable per singularity with nonzero coefficients.

    The coefficient is gcd(numerators)/q_p, the finest common step of that
    chain's contributions; the variable counts steps.  Returns the problem
    and the singularity index of each variable.
    """
    from math import gcd as _gcd

    coeffs: list[Fraction] = []
    labels: list[int] = []
    for p, sing in enumerate(cand.sings):
        nums = [
            (c * sing.q).numerator for c in sing.dp_coeffs if c > 0
        ]
        if not nums:
            continue
        g = 0
        for v in nums:
            g = _gcd(g, v)
        coeffs.append(Fraction(g, sing.q))
        labels.append(p)
    return DiophProblem(coeffs=tuple(coeffs), target=target), labels
