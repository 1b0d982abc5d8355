import pytest

from mwspoilers.blt_io import emit_blt, parse_blt
from mwspoilers.core import Profile, default_names
from mwspoilers.cultures import CultureSpec
from mwspoilers.harness import (
    MethodTally,
    method_rows,
    run_corpus_audit,
    run_simulation,
    stability_rows,
    clone_rows,
    wilson_interval,
)
from mwspoilers.methods import TiePolicy

from conftest import vote_splitting_profile


# ---------------------------------------------------------------------------
# Wilson intervals


def test_wilson_reference_values():
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-3)
    assert hi == pytest.approx(0.5962, abs=1e-3)
    lo, hi = wilson_interval(0, 10)
    assert lo == 0.0
    assert hi == pytest.approx(0.2775, abs=1e-3)


def test_wilson_edge_cases():
    assert wilson_interval(0, 0) == (0.0, 1.0)
    lo, hi = wilson_interval(10, 10)
    assert hi == 1.0 and 0.6 < lo < 1.0
    lo, hi = wilson_interval(1, 1000)
    assert 0.0 <= lo < 0.001 < hi < 0.01


def test_tally_merge_is_fieldwise_addition():
    a = MethodTally(requested=5, used=4, spoiler=2)
    a.merge(MethodTally(requested=3, used=3, spoiler=1, multiple=1))
    assert (a.requested, a.used, a.spoiler, a.multiple) == (8, 7, 3, 1)


# ---------------------------------------------------------------------------
# run_simulation


def test_counts_are_consistent():
    spec = CultureSpec("ic", "complete", 4, 2, 101, seed=3)
    res = run_simulation(spec, ["sntv", "stv"], trials=300)
    for r in res.methods.values():
        t = r.tally
        assert t.requested == 300
        assert t.used + t.ties_discarded + t.errors == 300
        assert t.multiple <= t.spoiler <= t.used
        assert t.plurality_loser <= t.spoiler
        assert t.topk_loser <= t.spoiler
        assert 0.0 <= r.p_multiple <= r.p_spoiler <= 1.0


def test_single_trial_fractions_are_zero_or_one():
    spec = CultureSpec("iac", "complete", 4, 2, 101, seed=9)
    res = run_simulation(spec, ["sntv"], trials=1, tie=TiePolicy.LOWEST_INDEX)
    assert res.methods["sntv"].p_spoiler in (0.0, 1.0)


def test_workers_do_not_change_results():
    spec = CultureSpec("spatial1d", "partial", 4, 2, 301, seed=11)
    serial = run_simulation(spec, ["sntv", "bloc", "stv"], trials=200, workers=1)
    parallel = run_simulation(spec, ["sntv", "bloc", "stv"], trials=200, workers=2)
    for mid in serial.methods:
        assert serial.methods[mid].tally == parallel.methods[mid].tally


def test_lenient_policy_counts_flagged_ties():
    spec = CultureSpec("ic", "complete", 4, 2, 101, seed=5)
    res = run_simulation(spec, ["sntv"], trials=400, tie=TiePolicy.LOWEST_INDEX)
    t = res.methods["sntv"].tally
    assert t.used == 400
    assert t.ties_discarded == 0
    assert t.ties_flagged > 0  # n=101 makes exact ties common


def test_method_rows_shape():
    spec = CultureSpec("ic", "complete", 3, 1, 51, seed=1)
    res = run_simulation(spec, ["sntv"], trials=50)
    rows = method_rows(res.methods)
    assert rows[0]["method"] == "SNTV"
    assert set(rows[0]) >= {"spoiler", "multiple", "plurality_loser", "topk_loser"}


def test_full_method_slate_yields_one_row_per_method():
    from mwspoilers.blt_io import emit_results_csv
    from mwspoilers.harness import FRACTION_COLUMNS

    ten = ["stv", "srcv", "sntv", "bloc", "borda_om", "borda_pm",
           "cc_om", "cc_pm", "greedy_om", "greedy_pm"]
    spec = CultureSpec("ic", "complete", 4, 2, 101, seed=2)
    res = run_simulation(spec, ten, trials=20, tie=TiePolicy.LOWEST_INDEX)
    table = emit_results_csv(method_rows(res.methods), FRACTION_COLUMNS)
    lines = table.decode().splitlines()
    assert len(lines) == 11  # header + the ten rule rows
    assert [line.split(",")[0] for line in lines[1:]] == [
        "STV", "SRCV", "SNTV", "Bloc", "Borda (OM)", "Borda (PM)",
        "Cham-Cour (OM)", "Cham-Cour (PM)", "Greedy-CC (OM)", "Greedy-CC (PM)",
    ]


def test_zero_trials():
    spec = CultureSpec("ic", "complete", 3, 1, 51, seed=1)
    res = run_simulation(spec, ["sntv"], trials=0)
    assert res.methods["sntv"].p_spoiler == 0.0


# ---------------------------------------------------------------------------
# run_corpus_audit


def spoiled_profile():
    # Top-2 plurality committee is {A, W}; removing S promotes D past W and
    # removing D promotes S past W, so both losers are spoilers.
    return Profile.build(
        4,
        default_names(4),
        [((0, 1, 2, 3), 100), ((1, 0, 2, 3), 90), ((2, 3, 0, 1), 40), ((3, 2, 1, 0), 65)],
        2,
    )


def corpus():
    # One election with spoilers, one without, plus two that the
    # m > k+1 / k > 1 filter must drop.
    clean = Profile.build(
        4,
        default_names(4),
        [((0, 1, 2, 3), 100), ((1, 0, 2, 3), 90), ((2, 3, 1, 0), 10), ((3, 2, 1, 0), 5)],
        2,
    )
    small = Profile.build(3, default_names(3), [((0, 1, 2), 9)], 2)  # m == k+1
    single = vote_splitting_profile(1)  # k == 1
    return [
        ("spoiled", spoiled_profile()),
        ("clean", clean),
        ("small", small),
        ("single-seat", single),
    ]


def test_corpus_filtering_and_details():
    result = run_corpus_audit(corpus(), ["sntv"], tie=TiePolicy.ALPHABETICAL)
    assert result.elections_used == 2
    assert result.elections_skipped == 2
    assert {d["election"] for d in result.details} == {"spoiled", "clean"}
    tally = result.methods["sntv"].tally
    assert tally.requested == 2
    assert tally.spoiler == 1 and tally.multiple == 1
    spoiled_row = next(d for d in result.details if d["election"] == "spoiled")
    assert spoiled_row["num_spoilers"] == 2
    assert spoiled_row["spoilers"] == "C;D"


def test_corpus_k_override_filters_before_replacing():
    result = run_corpus_audit(corpus(), ["sntv"], k_override=3)
    # With k forced to 3, only m > 4 elections would survive: none here.
    assert result.elections_used == 0
    result = run_corpus_audit(corpus(), ["sntv"], k_override=2)
    # The k=1 election is upgraded to k=2 but fails m > k+1 (m=3); the two
    # m=4 elections survive.
    assert result.elections_used == 2
    assert all(d["k"] == 2 for d in result.details)


def test_corpus_stability_and_clone_tables():
    result = run_corpus_audit(corpus(), ["sntv", "stv"], tie=TiePolicy.ALPHABETICAL)
    srows = stability_rows(result)
    crows = clone_rows(result)
    assert {r["method"] for r in srows} == {"SNTV", "STV"}
    assert {r["method"] for r in crows} == {"SNTV", "STV"}
    sntv_stab = next(r for r in srows if r["method"] == "SNTV")
    assert sntv_stab["spoiler_elections"] >= 1


def test_corpus_empty_input():
    result = run_corpus_audit([], ["sntv"])
    assert result.elections_used == 0
    assert result.methods["sntv"].tally.requested == 0
    assert result.methods["sntv"].p_spoiler == 0.0


def test_corpus_round_trip_through_blt():
    p = spoiled_profile()
    blob = emit_blt(p, title="t")
    assert parse_blt(blob) == p
    result = run_corpus_audit([("x", parse_blt(blob))], ["sntv"])
    assert result.elections_used == 1
    assert result.methods["sntv"].tally.spoiler == 1
