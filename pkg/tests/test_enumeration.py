"""Pipeline tests: families, stage counts, fixture diffing, determinism."""

import json
from math import gcd

import pytest

from qhpp.enumeration import (
    enumerate_order_tuples,
    l11_rationality_checks,
    lemma_q20_pipeline,
    noA2_scan,
    run_pipeline,
    small_q_pipeline,
    step5_pipeline,
    step6_classification,
    table1_pipeline,
)
from qhpp.fixtures import load_fixtures
from qhpp.surface import candidate_invariants

# ---------------------------------------------------------------------------
# order-tuple families
# ---------------------------------------------------------------------------


def test_families_derived():
    fams = enumerate_order_tuples(50)
    described = {f.describe() for f in fams}
    assert len(fams) == 3
    unbounded = [f for f in fams if f.free_min and f.free_max is None]
    assert len(unbounded) == 1
    f235 = unbounded[0]
    assert f235.fixed_orders == (2, 3, 5)
    assert f235.free_min == 7 and f235.coprime_modulus == 30
    f237 = next(f for f in fams if f.fixed_orders == (2, 3, 7))
    assert (f237.free_min, f237.free_max, f237.coprime_modulus) == (11, 41, 42)
    assert [t[3] for t in f237.instances(50)] == [11, 13, 17, 19, 23, 25, 29, 31, 37, 41]
    assert any(f.fixed_orders == (2, 3, 11, 13) for f in fams)


def test_family_235_instances_coprime():
    f235 = next(
        f for f in enumerate_order_tuples(200) if f.fixed_orders == (2, 3, 5)
    )
    qs = [t[3] for t in f235.instances(200)]
    assert all(gcd(q, 30) == 1 for q in qs)
    assert qs[0] == 7 and 49 in qs and 77 in qs


def test_families_cap_validation():
    with pytest.raises(ValueError):
        enumerate_order_tuples(40)


# ---------------------------------------------------------------------------
# main candidate table
# ---------------------------------------------------------------------------


def test_table1_counts_and_fixture_match():
    report = table1_pipeline()
    assert report.stages == [("types", 1092), ("D_square", 24)]
    assert report.matches_fixture
    assert len(report.survivors) == 24
    per_tuple = report.details["per_tuple_types"]
    assert per_tuple["(2, 3, 7, 11)"] == 48  # 2 * 4 * 6
    assert per_tuple["(2, 3, 11, 13)"] == 84
    assert sum(v for k, v in per_tuple.items() if k != "(2, 3, 11, 13)") == 1008


def test_table1_row_values():
    report = table1_pipeline()
    by_no = {s["no"]: s for s in report.survivors}
    assert by_no[1]["ks2"] == "1536/91" and by_no[1]["cmp"] == ">"
    assert by_no[2]["ks2"] == "6/133" and by_no[2]["cmp"] == "<"
    assert by_no[15]["ks2"] == "50/231"
    assert all(by_no[i]["cmp"] == ">" for i in range(1, 25) if i != 2)


def test_table1_survivors_canonically_serialized():
    report = table1_pipeline()
    blob1 = json.dumps(report.survivors, sort_keys=True)
    blob2 = json.dumps(table1_pipeline().survivors, sort_keys=True)
    assert blob1 == blob2


def test_stage_counts_weakly_decreasing():
    for report in (table1_pipeline(), lemma_q20_pipeline(), small_q_pipeline()):
        filter_stages = [c for n, c in report.stages if not n.startswith("cand")]
        assert all(a >= b for a, b in zip(filter_stages, filter_stages[1:]))


# ---------------------------------------------------------------------------
# low-rank scan
# ---------------------------------------------------------------------------


def test_q20_pipeline_counts():
    report = lemma_q20_pipeline()
    assert report.stages == [("cases", 126), ("D_square", 11), ("BMY", 4)]
    # the recomputed tally disagrees with the printed 42+80+6 = 128: the
    # first sub-case has 40 reversal classes, and the mismatch is surfaced
    assert report.details["case_tallies"] == [40, 80, 6]
    assert any("128" in m for m in report.mismatches)
    assert any("[42, 80, 6]" in m for m in report.mismatches)
    # no other mismatch: the 11 surviving rows and BMY rows all agree
    assert len(report.mismatches) == 2


def test_q20_survivor_rows():
    report = lemma_q20_pipeline()
    by_no = {s["no"]: s for s in report.survivors}
    assert len(by_no) == 11
    assert by_no[2]["ks2"] == "1/165" and by_no[2]["orders"] == [2, 3, 5, 22]
    assert by_no[4]["ks2"] == "8/645" and by_no[4]["orders"] == [2, 3, 5, 43]
    assert report.details["bmy_rows"] == [1, 2, 3, 4]


def test_q20_tallies_match_printed_shape_lists():
    # the derived multisets agree with the printed lists; only the
    # arrangement count of the first sub-case differs (42 vs 40)
    report = lemma_q20_pipeline()
    assert report.details["case_tallies"][1:] == [80, 6]


# ---------------------------------------------------------------------------
# small fourth order
# ---------------------------------------------------------------------------


def test_small_q_pipeline():
    report = small_q_pipeline()
    stages = dict(report.stages)
    # exact recomputation yields 12 square-discriminant cases, not the 6
    # printed; the row [2]+[3]+[2,2,2,2]+[3,2] has D = 260, not a square
    assert stages["D_square"] == 12
    assert stages["BMY"] == 1
    assert any("row 3" in m for m in report.mismatches)
    bogus = candidate_invariants(["[2]", "[3]", "[2,2,2,2]", "[3,2]"])
    assert bogus.d_value == 260
    bmy_rows = [s for s in report.survivors if s["cmp"] == "<"]
    assert len(bmy_rows) == 1
    assert bmy_rows[0]["orders"] == [2, 3, 5, 9]
    assert bmy_rows[0]["no"] == 1


def test_small_q_extra_survivors_all_violate_bmy():
    report = small_q_pipeline()
    extra = [s for s in report.survivors if "no" not in s]
    assert len(extra) == 7
    assert all(s["cmp"] == ">" for s in extra)
    assert all(s["D_square"] for s in extra)


# ---------------------------------------------------------------------------
# rationality eliminations
# ---------------------------------------------------------------------------


def test_l11_rationality_checks():
    report = l11_rationality_checks()
    assert report.matches_fixture
    assert report.stages == [("cases", 4), ("eliminated", 4)]
    by_case = {r["case"]: r for r in report.survivors}
    assert by_case[1]["agg_solutions"] == [[]]
    assert by_case[2]["m_bound"] == "1/2"
    assert by_case[2]["eliminated_by"] == "no_positive_m"
    assert by_case[3]["agg_solutions"] == [[[0, 1, 27], [1, 1, 16], [2, 1, 5]]]
    assert by_case[3]["quad_bound"] == "111/110"
    assert by_case[3]["surviving_realizations"] == 0
    assert by_case[4]["targets"] == ["647/645", "649/645"]
    assert by_case[4]["component_solutions"] == [[], []]


# ---------------------------------------------------------------------------
# minimal-curve pipelines
# ---------------------------------------------------------------------------


def test_step5_pipeline():
    report = step5_pipeline()
    assert report.matches_fixture
    stages = dict(report.stages)
    assert stages["cases [5]"] == 11
    assert stages["cases [2,3]"] == 16
    assert stages["cases [2,2,2,2]"] == 11
    assert stages["survivors [5]"] == 0
    assert stages["survivors [2,3]"] == 0
    assert stages["survivors [2,2,2,2]"] == 0


def test_step5_filters_are_all_needed():
    report = step5_pipeline()
    for sub in report.details["sub_cases"]:
        assert all(not case["passes_all"] for case in sub["cases"])
    # the [5] sub-case contains the order-9 chain killed only by the gcd test
    sub5 = next(s for s in report.details["sub_cases"] if s["p3"] == "[5]")
    a8 = next(c for c in sub5["cases"] if c["cf"] == "[2,2,2,2,2,2,2,2]")
    assert a8["q"] == 9 and a8["D"] == "36"


def test_step6_classification():
    report = step6_classification()
    assert report.matches_fixture
    rules = report.details["rules"]
    assert rules["A"] == [1, 2, 3, 4, 6, 8, 9, 11, 12, 13, 17, 19]
    assert rules["B"] == [7, 10, 14, 16, 18]
    assert rules["C"] == [5, 20, 21, 22]
    assert rules["residual"] == [15, 23, 24]
    assert report.details["case24"] == {
        "eliminated_by": "L_violation",
        "L": 10,
        "required": 11,
    }


def test_step6_case15_sweep_values():
    report = step6_classification()
    branches = report.details["case15"]["branches"]
    ms = {b.get("m") for b in branches if b["outcome"] == "non_integer"}
    assert ms == {"27/5", "13/5", "34/5", "49/5", "16/5"}
    negatives = {b["value"] for b in branches if b["outcome"] == "negative"}
    assert "-17/231" in negatives
    geometric = [b for b in branches if b["outcome"] == "geometric"]
    assert len(geometric) == 1 and geometric[0]["m"] == "11"


def test_step6_case23_sweep_values():
    report = step6_classification()
    branches = report.details["case23"]["branches"]
    assert all(b["outcome"] in ("negative", "geometric") for b in branches)
    negatives = {b["value"] for b in branches if b["outcome"] == "negative"}
    assert {"-17/429", "-10/143"} <= negatives


# ---------------------------------------------------------------------------
# order-3 singularity scan
# ---------------------------------------------------------------------------


def test_noA2_scan_small():
    report = noA2_scan(60)
    assert report.matches_fixture
    stages = dict(report.stages)
    assert stages["D_square"] == 0
    assert stages["candidates"] == 3 * stages["cfs"]
    assert report.details["mod3_witness_ok"]


def test_noA2_example_row():
    # the order-7 single-curve chain with the A4 third singularity
    from qhpp.ratio import is_positive_square

    cand = candidate_invariants(["[2]", "[2,2]", "[2,2,2,2]", "[7]"])
    assert cand.d_value == 960
    assert not is_positive_square(cand.d_value)


def test_noA2_validates_cap():
    with pytest.raises(ValueError):
        noA2_scan(5)


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------


def test_run_pipeline_dispatch():
    assert run_pipeline("step5").pipeline == "step5"
    assert run_pipeline("noA2", cap=60).details["q_cap"] == 60
    with pytest.raises(ValueError):
        run_pipeline("bogus")


def test_reports_deterministic_across_threads():
    for name in ("table1", "q20", "small-q"):
        a = run_pipeline(name, threads=1).to_dict()
        b = run_pipeline(name, threads=3).to_dict()
        assert a == b


def test_report_json_round_trip():
    report = table1_pipeline()
    blob = json.dumps(report.to_dict(), sort_keys=True)
    assert json.loads(blob)["matches_fixture"] is True


def test_lemma24_fixture_values():
    from qhpp.obstruction import DiophProblem, m_upper_bound, solve_dioph
    from qhpp.ratio import format_rational, parse_rational, rational_sqrt

    fx = load_fixtures()["lemma24"]
    cand = candidate_invariants(list(fx["sings"]))
    assert format_rational(cand.ks2) == fx["ks2"]
    assert format_rational(cand.d_value) == fx["D"]
    assert cand.L == fx["L"]
    assert format_rational(m_upper_bound(cand.d_prime, cand.L)) == fx["m_bound"]
    # the degree target for the forced m = 1 curve
    assert 1 + cand.ks2 / rational_sqrt(cand.d_value) == parse_rational(fx["target"])
    prob = DiophProblem(
        tuple(parse_rational(c) for c in fx["coeffs"]), parse_rational(fx["target"])
    )
    assert [list(s) for s in solve_dioph(prob)] == fx["solutions"]


def test_coeff_tables_check():
    from qhpp.checks import check_coeff_tables

    result = check_coeff_tables()
    assert result.ok, result.detail


def test_fixture_override_env(tmp_path, monkeypatch):
    import qhpp.fixtures as fx

    data = load_fixtures()
    broken = json.loads(json.dumps(data))
    broken["table1"]["stage_counts"]["types"] = 999
    path = tmp_path / "tables.json"
    path.write_text(json.dumps(broken))
    monkeypatch.setenv(fx.ENV_VAR, str(path))
    fx._load.cache_clear()
    try:
        report = table1_pipeline()
        assert any("999" in m for m in report.mismatches)
    finally:
        monkeypatch.delenv(fx.ENV_VAR)
        fx._load.cache_clear()
