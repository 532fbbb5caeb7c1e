import pytest

from adaptcs.verify import SUITES, check_parseval, check_zero_fill_identity, run_suite


def test_parseval_suite():
    r = run_suite("parseval")["parseval"]
    assert r["passed"] and r["max_relative_error"] < 1e-10
    assert r["zero_fill_identity"]["passed"]


def test_small_checks():
    assert check_parseval(n_images=5, shape=(8, 8))["passed"]
    assert check_zero_fill_identity(n_pairs=5)["passed"]


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_all_suites_listed():
    assert SUITES == ("parseval", "prop1", "theorem_s1", "theorems12", "estimator")
