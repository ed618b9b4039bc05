"""The check registry: suite wiring, report format, failure capture."""

import pytest

from todaq import verify


def test_every_suite_is_green():
    for suite in verify.SUITES:
        results = verify.run_suite(suite)
        assert results, suite
        bad = [r.render() for r in results if not r.ok]
        assert not bad, bad


def test_results_are_sorted_and_named():
    results = verify.run_suite("all")
    names = [r.name for r in results]
    assert names == sorted(names)
    assert len(names) == len(set(names))
    for required in ("A2.commutator_HI", "weyl.ordering_identity",
                     "hierarchy.rhs_match.m=3", "glN.jacobi.n=4",
                     "spectral.richardson"):
        assert required in names, required


def test_flagship_line_renders_exactly():
    results = verify.run_suite("algebra")
    lines = [r.render() for r in results]
    assert "A2.commutator_HI: PASS (exact zero)" in lines


def test_report_counts_passes():
    results = verify.run_suite("hierarchy")
    report = verify.render_report(results)
    assert report.splitlines()[-1] == f"{len(results)}/{len(results)} checks passed"
    # deterministic: identical text on a second run
    assert report == verify.render_report(verify.run_suite("hierarchy"))


def test_unknown_suite_rejected():
    with pytest.raises(KeyError):
        verify.run_suite("quantum")


def test_list_checks_partitions_the_registry():
    all_names = verify.list_checks()
    assert all_names == verify.list_checks("all")
    by_suite = [verify.list_checks(s) for s in verify.SUITES]
    assert sorted(n for names in by_suite for n in names) == all_names


def test_failing_and_crashing_checks_are_reported():
    # drop two throwaway checks into the registry, then restore it
    verify._REGISTRY["zz.temp_fail"] = ("algebra", lambda: (False, "boom"))

    def crash():
        raise RuntimeError("kaput")

    verify._REGISTRY["zz.temp_crash"] = ("algebra", crash)
    try:
        results = verify.run_suite("algebra")
        rendered = {r.name: r.render() for r in results}
        assert rendered["zz.temp_fail"] == "zz.temp_fail: FAIL (boom)"
        assert "FAIL (raised RuntimeError: kaput)" in rendered["zz.temp_crash"]
        report = verify.render_report(results)
        assert report.splitlines()[-1] == f"{len(results) - 2}/{len(results)} checks passed"
    finally:
        del verify._REGISTRY["zz.temp_fail"]
        del verify._REGISTRY["zz.temp_crash"]
    assert "zz.temp_fail" not in verify.list_checks()
