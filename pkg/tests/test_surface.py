"""Singularity and candidate invariant tests."""

import json
import random
from fractions import Fraction

import pytest

from qhpp.hjcf import HjCf
from qhpp.ratio import format_rational, is_positive_square, parse_rational, rational_sqrt
from qhpp.surface import (
    BmyStatus,
    GramConfig,
    bmy_status,
    candidate_invariants,
    candidate_to_dict,
    dp_data,
    gram_determinant,
)

# ---------------------------------------------------------------------------
# rationals
# ---------------------------------------------------------------------------


def test_rational_round_trip():
    for text in ["134/133", "-17/231", "5", "0", "-3"]:
        assert format_rational(parse_rational(text)) == text
    assert format_rational(Fraction(4, 8)) == "1/2"


def test_is_positive_square():
    assert is_positive_square(9216)
    assert is_positive_square(Fraction(9216))
    assert not is_positive_square(Fraction(6, 133))
    assert not is_positive_square(0)
    assert not is_positive_square(-4)
    assert not is_positive_square(260)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(36) == 6
    with pytest.raises(ValueError):
        rational_sqrt(Fraction(2))
    with pytest.raises(ValueError):
        rational_sqrt(-1)


# ---------------------------------------------------------------------------
# adjunction data
# ---------------------------------------------------------------------------


def test_dp_data_examples():
    d7 = dp_data(HjCf([7]))
    assert d7.dp_coeffs == (Fraction(5, 7),)
    assert d7.dp_dot_k == Fraction(25, 7)
    assert d7.dp_sq == -Fraction(25, 7)

    for n in (2, 4, 6, 9):
        dn = dp_data(HjCf([2] * n))
        assert all(c == 0 for c in dn.dp_coeffs)
        assert dn.dp_dot_k == 0

    d32 = dp_data(HjCf([3, 2]))
    assert d32.dp_coeffs == (Fraction(2, 5), Fraction(1, 5))


def test_dp_data_l1_closed_form():
    for n in range(2, 12):
        d = dp_data(HjCf([n]))
        assert d.dp_sq == -Fraction((n - 2) ** 2, n)
        assert d.ep_sq == -Fraction(1, n)


def test_dp_data_rejects_empty():
    with pytest.raises(ValueError):
        dp_data(HjCf())


def test_ep_sq():
    assert dp_data(HjCf([3, 2])).ep_sq == -Fraction(3, 5)
    assert dp_data(HjCf([3, 2, 2, 2, 2, 2, 2, 2, 2])).ep_sq == -Fraction(17, 19)


def test_adjunction_identity_random():
    rng = random.Random(7)
    for _ in range(200):
        cf = HjCf([rng.randint(2, 6) for _ in range(rng.randint(1, 7))])
        d = dp_data(cf)
        assert d.dp_dot_k == -d.dp_sq
        assert all(0 <= c < 1 for c in d.dp_coeffs)


# ---------------------------------------------------------------------------
# candidates
# ---------------------------------------------------------------------------


def test_candidate_row1():
    cand = candidate_invariants(["[2]", "[2,2]", "[7]", "[13]"])
    assert cand.L == 5
    assert cand.ks2 == Fraction(1536, 91)
    assert 3 * cand.e_orb == Fraction(29, 182)
    assert cand.det_r == 546
    assert cand.d_value == 9216 == 96 * 96
    assert bmy_status(cand) == BmyStatus.VIOLATES_K_AMPLE


def test_candidate_row2():
    cand = candidate_invariants(["[2]", "[2,2]", "[7]", "[3,2,2,2,2,2,2,2,2]"])
    assert cand.ks2 == Fraction(6, 133)
    assert cand.d_value == 36
    assert cand.L == 13
    assert bmy_status(cand) == BmyStatus.OK_K_AMPLE


def test_candidate_with_closure_index():
    cand = candidate_invariants(["[2]", "[3]", "[5]", "[2,2,2,2,2,2,2,2]"], c=3)
    assert cand.d_value == 36
    assert cand.d_prime == 4


def test_candidate_e_orb_negative():
    cand = candidate_invariants(["[2]", "[3]", "[7]", "[43]"])
    assert cand.e_orb < 0
    assert bmy_status(cand) == BmyStatus.E_ORB_NEGATIVE


def test_bmy_ok_when_ks2_nonpositive():
    # a long chain pushes K^2 below zero while e_orb stays non-negative
    cand = candidate_invariants(["[2]", "[2,2,2,2,2,2,2,2,2,2]"])
    assert cand.ks2 < 0 <= cand.e_orb
    assert bmy_status(cand) == BmyStatus.OK


def test_candidate_rejects_bad_c():
    with pytest.raises(ValueError):
        candidate_invariants(["[2]", "[3]"], c=0)
    with pytest.raises(ValueError):
        candidate_invariants(["[2]", "[3]", "[5]", "[7]"], c=5)  # 25 ∤ 210
    with pytest.raises(ValueError):
        # coprime orders force c = 1
        candidate_invariants(["[2]", "[3]", "[5]", "[2,2,2,2,2,2]"], c=2)


def test_candidate_rejects_empty_chain():
    with pytest.raises(ValueError):
        candidate_invariants(["[2]", "[]"])


def test_candidate_reversal_invariance():
    a = candidate_invariants(["[2]", "[2,2]", "[7]", "[5,4]"])
    b = candidate_invariants(["[2]", "[2,2]", "[7]", "[4,5]"])
    assert (a.ks2, a.d_value, a.e_orb, a.L) == (b.ks2, b.d_value, b.e_orb, b.L)


def test_candidate_serialization_schema():
    cand = candidate_invariants(["[2]", "[2,2]", "[7]", "[13]"])
    d = candidate_to_dict(cand)
    assert d == {
        "sings": ["[2]", "[2,2]", "[7]", "[13]"],
        "orders": [2, 3, 7, 13],
        "L": 5,
        "ks2": "1536/91",
        "detR": 546,
        "D": "9216",
        "D_square": True,
        "three_e_orb": "29/182",
        "bmy": "VIOLATES_K_AMPLE",
    }
    json.dumps(d)  # must be JSON-ready


def test_d_value_can_be_non_integer():
    cand = candidate_invariants(["[3]", "[4,3]"])
    assert cand.d_value.denominator > 1 or cand.d_value.denominator == 1
    assert cand.d_value == cand.det_r * cand.ks2
    assert not is_positive_square(Fraction(1, 2))


# ---------------------------------------------------------------------------
# Gram determinants
# ---------------------------------------------------------------------------


def naive_det(m):
    size = len(m)
    if size == 0:
        return 1
    if size == 1:
        return m[0][0]
    total = 0
    for j in range(size):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        total += (-1) ** j * m[0][j] * naive_det(minor)
    return total


def test_gram_reference_configurations():
    star = GramConfig((-1, -2, -3, -5), {(0, 1): 1, (0, 2): 1, (0, 3): 1})
    assert gram_determinant(star) == -1
    chain_edges = {(0, 1): 1, (0, 2): 1, (0, 3): 1, (3, 4): 1}
    assert abs(gram_determinant(GramConfig((-1, -2, -3, -2, -3), chain_edges))) == 13
    assert abs(gram_determinant(GramConfig((-1, -2, -3, -3, -2), chain_edges))) == 7
    a4_end = {(0, 1): 1, (0, 2): 1, (0, 3): 1, (3, 4): 1, (4, 5): 1, (5, 6): 1}
    assert abs(gram_determinant(GramConfig((-1, -2, -3, -2, -2, -2, -2), a4_end))) == 19
    a4_mid = {(0, 1): 1, (0, 2): 1, (0, 4): 1, (3, 4): 1, (4, 5): 1, (5, 6): 1}
    assert abs(gram_determinant(GramConfig((-1, -2, -3, -2, -2, -2, -2), a4_mid))) == 31


def test_gram_trivial_cases():
    assert gram_determinant(GramConfig((-2,), {})) == -2
    assert gram_determinant(GramConfig((), {})) == 1
    # singular configuration
    assert gram_determinant(GramConfig((1, 1), {(0, 1): 1})) == 0


def test_gram_matches_cofactor_oracle_random():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 6)
        diag = tuple(rng.randint(-6, -1) for _ in range(n))
        off = {}
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.4:
                    off[(i, j)] = rng.randint(0, 2)
        cfg = GramConfig(diag, off)
        assert gram_determinant(cfg) == naive_det(cfg.matrix())


def test_gram_rejects_bad_edges():
    with pytest.raises(ValueError):
        gram_determinant(GramConfig((-1, -2), {(0, 2): 1}))
    with pytest.raises(ValueError):
        gram_determinant(GramConfig((-1, -2), {(0, 1): -1}))
