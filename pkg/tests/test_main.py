"""Tests for the package entry point."""

import pytest
from pytest_mock import MockerFixture

import pde_dpc


def test_main_exits_with_cli_status(mocker: MockerFixture) -> None:
    """Test the console script forwards the CLI exit code."""
    mocker.patch("pde_dpc.cli.main", return_value=4)
    with pytest.raises(SystemExit) as exc:
        pde_dpc.main()
    assert exc.value.code == 4


def test_public_api() -> None:
    """Test the top-level exports resolve."""
    for name in pde_dpc.__all__:
        assert getattr(pde_dpc, name) is not None
