import logging
from dataclasses import dataclass
from typing import Any

from ..dsl.models import AcceptanceRule
from .operators import OPERATORS
from .query import eval_path

logger = logging.getLogger(__name__)


@dataclass
class RuleOutcome:
    name: str
    ok: bool
    message: str


class Engine:
    """Evaluates acceptance rules against an evaluation summary document."""

    def eval_assert(self, rule: AcceptanceRule, document: dict[str, Any]) -> tuple[bool, str]:
        """
        Выполняет одно утверждение.
        Возвращает (ok, message)
        """
        if rule.all_:
            results = [self.eval_assert(r, document) for r in rule.all_]
            all_ok = all(ok for ok, _ in results)
            messages = [msg for ok, msg in results if not ok]
            return all_ok, "; ".join(messages) if messages else "All checks passed"

        if rule.any_:
            results = [self.eval_assert(r, document) for r in rule.any_]
            if any(ok for ok, _ in results):
                return True, "At least one check passed"
            messages = [msg for _, msg in results]
            return False, f"None passed: {'; '.join(messages)}"

        if rule.not_:
            ok, msg = self.eval_assert(rule.not_, document)
            return not ok, f"NOT failed: {msg}" if ok else "NOT passed"

        if not rule.path:
            return False, "No path specified"

        selection = eval_path(document, rule.path)

        op_func = OPERATORS.get(rule.op)
        if not op_func:
            return False, f"Unknown operator: {rule.op}"

        result = op_func(selection, {"expected": rule.expected})
        return result.ok, result.message or "OK"

    def check(self, rules: list[AcceptanceRule], document: dict[str, Any]) -> list[RuleOutcome]:
        """Evaluate every rule; outcomes keep the rule order."""
        outcomes = []
        for rule in rules:
            ok, message = self.eval_assert(rule, document)
            outcomes.append(RuleOutcome(name=rule.label, ok=ok, message=message))
            logger.info(
                f"Acceptance {rule.label}: {'PASS' if ok else 'FAIL'}",
                extra={"acceptance": {"rule": rule.label, "ok": ok, "message": message}},
            )
        return outcomes


def failed_rules(outcomes: list[RuleOutcome]) -> list[RuleOutcome]:
    return [o for o in outcomes if not o.ok]
