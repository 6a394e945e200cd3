"""Annotation budget arithmetic: human vs. LLM summaries under a fixed spend.

All money math is done in exact rationals so that, e.g., $2.50 at $0.01
per summary floors to exactly 250.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ._validation import check_choice, check_positive, check_probability
from .exceptions import BudgetTooSmall

METHODS = ("human", "gpt")

# Reported for context only; not modeled.
HUMAN_EDIT_TIME_SAVING = 0.70
REPORTED_GPT_COUNT_AT_2_50 = "around 6000"


def _exact(x) -> Fraction:
    # str() keeps the decimal the user typed: Fraction(0.01) would not be 1/100
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True)
class RateCard:
    human_rate: float = 0.01
    gpt_in_rate: float = 0.50  # $ per 1M input tokens
    gpt_out_rate: float = 1.50  # $ per 1M output tokens
    avg_in_tokens: float = 700
    avg_out_tokens: float = 20

    def __post_init__(self):
        check_positive(self.human_rate, "human_rate")
        check_positive(self.gpt_in_rate, "gpt_in_rate")
        check_positive(self.gpt_out_rate, "gpt_out_rate")
        check_positive(self.avg_in_tokens, "avg_in_tokens")
        # zero output tokens is allowed as a what-if
        check_positive(self.avg_out_tokens, "avg_out_tokens", strict=False)


def exact_cost_per_summary(method: str, r: RateCard = RateCard()) -> Fraction:
    check_choice(method, "method", METHODS)
    if method == "human":
        return _exact(r.human_rate)
    per_token = Fraction(1, 10**6)
    return (
        _exact(r.avg_in_tokens) * _exact(r.gpt_in_rate) * per_token
        + _exact(r.avg_out_tokens) * _exact(r.gpt_out_rate) * per_token
    )


def cost_per_summary(method: str, r: RateCard = RateCard()) -> float:
    """Dollars per summary; e.g. 0.00038 for GPT at the default rates."""
    return float(exact_cost_per_summary(method, r))


def summaries_for_budget(budget: float, method: str, r: RateCard = RateCard()) -> int:
    check_positive(budget, "budget", strict=False)
    return math.floor(_exact(budget) / exact_cost_per_summary(method, r))


@dataclass(frozen=True)
class TwoStepPlan:
    gpt_count: int
    human_count: int
    residual: float
    human_budget: float
    gpt_budget: float


def plan_two_step(budget: float, r: RateCard = RateCard(), human_share: float = 0.5) -> TwoStepPlan:
    """Split *budget* between LLM generation and human editing.

    *human_share* of the money buys human-edited summaries; the rest buys
    LLM summaries for the first fine-tuning stage.
    """
    check_positive(budget, "budget", strict=False)
    check_probability(human_share, "human_share")
    total = _exact(budget)
    human_cost = exact_cost_per_summary("human", r)
    gpt_cost = exact_cost_per_summary("gpt", r)
    if total < human_cost:
        raise BudgetTooSmall(f"${budget} does not cover one human summary at ${r.human_rate}")
    human_budget = total * _exact(human_share)
    gpt_budget = total - human_budget
    human_count = math.floor(human_budget / human_cost)
    gpt_count = math.floor(gpt_budget / gpt_cost)
    residual = total - human_count * human_cost - gpt_count * gpt_cost
    return TwoStepPlan(gpt_count, human_count, float(residual), float(human_budget), float(gpt_budget))


def render_budget(budget: float, r: RateCard = RateCard(), human_share: float = 0.5) -> str:
    lines = [
        f"budget: ${budget:g}",
        f"human: ${cost_per_summary('human', r):g}/summary -> {summaries_for_budget(budget, 'human', r)} summaries",
        f"gpt:   ${cost_per_summary('gpt', r):g}/summary -> {summaries_for_budget(budget, 'gpt', r)} summaries"
        f" (reported at $2.5: {REPORTED_GPT_COUNT_AT_2_50})",
    ]
    try:
        plan = plan_two_step(budget, r, human_share)
    except BudgetTooSmall as exc:
        lines.append(f"two-step: infeasible ({exc})")
    else:
        lines.append(
            f"two-step ({human_share:.0%} human): {plan.gpt_count} gpt -> {plan.human_count} human,"
            f" residual ${plan.residual:.6f}"
        )
    lines.append(f"human editing vs. writing from scratch: ~{HUMAN_EDIT_TIME_SAVING:.0%} faster (reported, not modeled)")
    return "\n".join(lines)
