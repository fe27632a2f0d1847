"""Tests for rule discovery."""

from __future__ import annotations

import logging

import pytest

from cellscope.lint.rule_api import Category
from cellscope.lint.rule_loader import discover_rules
from cellscope.lint.rules import BUILTIN_RULES


@pytest.fixture(autouse=True)
def no_rule_env(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("CELLSCOPE_RULES_ENABLED", raising=False)


def test_all_builtin_rules_are_discovered() -> None:
    rules = discover_rules()

    assert len(rules) == len(BUILTIN_RULES) == 14
    assert {rule.category for rule in rules.values()} == set(Category)
    for rule_id, rule in rules.items():
        assert rule.rule_id == rule_id
        assert rule.description


def test_enabled_subset_keeps_catalog_order() -> None:
    rules = discover_rules(["F401", "E231", "NOEFFECT"])
    assert list(rules) == ["NOEFFECT", "E231", "F401"]


def test_unknown_rule_ids_are_reported(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.WARNING, logger="cellscope.lint.rule_loader"):
        rules = discover_rules(["F401", "X999"])

    assert list(rules) == ["F401"]
    assert "Unknown rule ids ignored: X999" in caplog.text


def test_environment_selects_rules(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("CELLSCOPE_RULES_ENABLED", "E0602, R504")
    assert set(discover_rules()) == {"E0602", "R504"}


def test_explicit_selection_beats_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("CELLSCOPE_RULES_ENABLED", "E0602")
    assert list(discover_rules(["C812"])) == ["C812"]


def test_empty_selection_disables_every_rule() -> None:
    assert discover_rules([]) == {}
