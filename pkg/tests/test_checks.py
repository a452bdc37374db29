"""Property suites at reduced size (the acceptance run uses full sizes)."""

from qhpp import checks


def test_cf_identities():
    assert checks.check_cf_identities(80).ok


def test_uv_inequalities():
    assert checks.check_uv_inequalities(80, n_random=1_000).ok


def test_mod3():
    assert checks.check_mod3(80).ok


def test_dp_closed_form():
    assert checks.check_dp_closed_form(80).ok


def test_round_trip():
    assert checks.check_round_trip(120).ok


def test_class_counts():
    # includes orders like 15, 21, 24 whose unit group is not cyclic, where
    # the count is (phi(q) + #{x : x^2 = 1})/2 rather than phi(q)/2 + 1
    assert checks.check_class_counts(120).ok


def test_esq_identity():
    assert checks.check_esq_identity(n_random=1_000).ok


def test_prop_int_inequalities():
    assert checks.check_prop_int_inequalities(n_random=500).ok


def test_reversal_invariance():
    assert checks.check_reversal_invariance(n_random=200).ok


def test_dioph_oracle():
    assert checks.check_dioph_oracle(n_random=200).ok


def test_run_all_returns_every_suite():
    names = {fn.__name__.removeprefix("check_") for fn in checks.ALL_CHECKS}
    assert len(checks.ALL_CHECKS) == 11
    assert {"cf_identities", "dioph_oracle", "coeff_tables"} <= names
