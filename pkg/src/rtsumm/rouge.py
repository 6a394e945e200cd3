"""ROUGE-1, ROUGE-2 and ROUGE-L scoring.

Scores are F1 (beta = 1) over lowercased, punctuation-stripped tokens.
ROUGE-N uses clipped multiset overlap; ROUGE-L is summary-level LCS over
the full token sequence.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exceptions import EmptyCorpus


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Split *text* into lowercase tokens with Unicode punctuation removed.

    >>> tokenize("Bệnh nhân, bị SỐT.")
    ['bệnh', 'nhân', 'bị', 'sốt']
    """
    text = unicodedata.normalize("NFC", text).lower()
    text = "".join(" " if _is_punct(ch) else ch for ch in text)
    return text.split()


def token_count(text: str) -> int:
    return len(tokenize(text))


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> "RougeScore":
        if precision + recall > 0:
            f1 = 2 * precision * recall / (precision + recall)
        else:
            f1 = 0.0
        return cls(precision, recall, f1)

    @classmethod
    def zero(cls) -> "RougeScore":
        return cls(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class RougeReport:
    r1: RougeScore
    r2: RougeScore
    rl: RougeScore
    sample_count: int

    def as_percent(self) -> dict[str, float]:
        """F1 values scaled by 100, keyed like the usual result tables."""
        return {"R-1": 100 * self.r1.f1, "R-2": 100 * self.r2.f1, "R-L": 100 * self.rl.f1}


def _as_tokens(x) -> list[str]:
    return tokenize(x) if isinstance(x, str) else list(x)


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate, reference, n: int = 1) -> RougeScore:
    """ROUGE-N between two texts (or pre-tokenized sequences)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cand = ngrams(_as_tokens(candidate), n)
    ref = ngrams(_as_tokens(reference), n)
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    if cand_total == 0 or ref_total == 0:
        return RougeScore.zero()
    overlap = sum((cand & ref).values())
    return RougeScore.from_pr(overlap / cand_total, overlap / ref_total)


def lcs_length(a: Sequence, b: Sequence) -> int:
    if not a or not b:
        return 0
    # single-row DP over the shorter sequence
    if len(b) > len(a):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate, reference) -> RougeScore:
    cand = _as_tokens(candidate)
    ref = _as_tokens(reference)
    if not cand or not ref:
        return RougeScore.zero()
    lcs = lcs_length(cand, ref)
    return RougeScore.from_pr(lcs / len(cand), lcs / len(ref))


def _mean(scores: list[RougeScore]) -> RougeScore:
    k = len(scores)
    return RougeScore(
        sum(s.precision for s in scores) / k,
        sum(s.recall for s in scores) / k,
        sum(s.f1 for s in scores) / k,
    )


def corpus_rouge(pairs: Iterable[tuple[str, str]]) -> RougeReport:
    """Unweighted per-pair mean of ROUGE-1/2/L over (candidate, reference) pairs."""
    r1, r2, rl = [], [], []
    for cand, ref in pairs:
        ct, rt = tokenize(cand), tokenize(ref)
        r1.append(rouge_n(ct, rt, 1))
        r2.append(rouge_n(ct, rt, 2))
        rl.append(rouge_l(ct, rt))
    if not r1:
        raise EmptyCorpus("corpus_rouge needs at least one pair")
    return RougeReport(_mean(r1), _mean(r2), _mean(rl), len(r1))
