"""Tests for JSONPath queries over summaries and manifests."""

import pytest

from pde_dpc.runtime.query import compile_path, eval_path

SUMMARY = {
    "experiment": "heat",
    "columns": {
        "natural_fdm": {"mean": 2.0, "std": 0.5},
        "ctrl_fdm": {"mean": 0.1, "std": 0.02},
    },
    "ratios": {"ctrl_fdm_over_natural": 0.05},
    "samples": [{"index": 0, "status": "ok"}, {"index": 1, "status": "failed"}],
}


def test_eval_path_empty_path() -> None:
    """Test eval_path with an empty path returns the whole document."""
    assert eval_path(SUMMARY, "") is SUMMARY


def test_eval_path_nested_field() -> None:
    """Test eval_path with nested field access."""
    assert eval_path(SUMMARY, "$.ratios.ctrl_fdm_over_natural") == 0.05


def test_eval_path_without_dollar() -> None:
    """Test eval_path accepts paths without the $ prefix."""
    assert eval_path(SUMMARY, "experiment") == "heat"


def test_eval_path_wildcard_returns_list() -> None:
    """Test a wildcard over several objects returns every match."""
    assert sorted(eval_path(SUMMARY, "$.columns.*.mean")) == [0.1, 2.0]


def test_eval_path_filter() -> None:
    """Test extended filter expressions select matching records."""
    assert eval_path(SUMMARY, '$.samples[?status = "failed"].index') == 1


def test_eval_path_non_existent() -> None:
    """Test a missing path yields an empty list."""
    assert eval_path(SUMMARY, "$.ratios.transfer_gap") == []


def test_eval_path_invalid_syntax() -> None:
    """Test malformed JSONPath raises a ValueError naming the path."""
    with pytest.raises(ValueError, match=r"Invalid JSONPath '\$\.columns\['"):
        eval_path(SUMMARY, "$.columns[")


def test_compiled_paths_are_reused() -> None:
    """Test repeated queries share one parsed expression."""
    assert compile_path("$.ratios.ctrl_fdm_over_natural") is compile_path("$.ratios.ctrl_fdm_over_natural")
