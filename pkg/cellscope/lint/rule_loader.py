from __future__ import annotations

import logging
import os
from collections.abc import Collection
from importlib.metadata import entry_points

from cellscope.lint.rule_api import LintRule
from cellscope.lint.rules import BUILTIN_RULES

logger = logging.getLogger("cellscope.lint.rule_loader")

_GROUP = "cellscope_rules"
_ENV_VAR = "CELLSCOPE_RULES_ENABLED"  # comma-list or unset (= all)


def _enabled_set(enabled: Collection[str] | None) -> set[str] | None:
    if enabled is not None:
        return set(enabled)
    raw = os.getenv(_ENV_VAR)
    if not raw:
        return None
    return {part.strip() for part in raw.split(",") if part.strip()}


def discover_rules(enabled: Collection[str] | None = None) -> dict[str, LintRule]:
    """Instantiate the built-in rules plus any installed through entry points.

    ``enabled`` restricts the result to those rule ids; when it is None the
    ``CELLSCOPE_RULES_ENABLED`` environment variable is consulted instead.
    """
    wanted = _enabled_set(enabled)
    found: dict[str, LintRule] = {}

    for rule_cls in BUILTIN_RULES:
        rule: LintRule = rule_cls()
        if wanted is None or rule.rule_id in wanted:
            found[rule.rule_id] = rule

    for ep in entry_points(group=_GROUP):
        try:
            plugin_cls: type[LintRule] | None = ep.load()
            if plugin_cls is None:
                logger.error("Rule class not defined for %s", ep.name)
                continue
            extra: LintRule = plugin_cls()
        except Exception:
            logger.exception("Failed to load rule %s", ep.name)
            continue
        if wanted is not None and extra.rule_id not in wanted:
            continue
        if extra.rule_id in found:
            logger.warning("Rule %s from %s shadows an existing rule", extra.rule_id, ep.name)
        found[extra.rule_id] = extra
        logger.info("Loaded rule plug-in: %s", extra.rule_id)

    if wanted is not None:
        missing = wanted - set(found)
        if missing:
            logger.warning("Unknown rule ids ignored: %s", ", ".join(sorted(missing)))
    return found
