"""Score a summarizer against a corpus' reference summaries."""

from __future__ import annotations

from typing import Callable, Optional, Sequence, Union

from .backends import SummarizeTask
from .corpus import CorpusSample, load_corpus
from .exceptions import EmptyCorpus
from .rouge import RougeReport, corpus_rouge

SCOPE_FILTERS = ("local", "global", "all")


def _summarize_fn(summarizer) -> Callable[[SummarizeTask], str]:
    return getattr(summarizer, "summarize", summarizer)


def select(samples: Sequence[CorpusSample], scope: str = "all", split: Optional[str] = "test") -> list[CorpusSample]:
    if scope not in SCOPE_FILTERS:
        raise ValueError(f"scope must be one of {SCOPE_FILTERS}, got {scope!r}")
    return [
        s
        for s in samples
        if (split is None or s.split == split) and (scope == "all" or s.scope == scope)
    ]


def evaluate_samples(samples: Sequence[CorpusSample], summarizer, language: str = "vi") -> dict[str, RougeReport]:
    """ROUGE per scope present in *samples*, plus ``"all"`` when both scopes occur."""
    if not samples:
        raise EmptyCorpus("no samples to evaluate")
    summarize = _summarize_fn(summarizer)
    pairs: dict[str, list[tuple[str, str]]] = {}
    for s in samples:
        candidate = summarize(SummarizeTask(s.transcript, s.scope, language))
        pairs.setdefault(s.scope, []).append((candidate, s.summary))
    reports = {scope: corpus_rouge(p) for scope, p in sorted(pairs.items(), key=lambda kv: kv[0] != "local")}
    if len(reports) > 1:
        reports["all"] = corpus_rouge([pair for p in pairs.values() for pair in p])
    return reports


def render_report(reports: dict[str, RougeReport]) -> str:
    """Fixed-width R-1 / R-2 / R-L table, F1 scaled to percent."""
    lines = [f"{'scope':<8}{'n':>7}{'R-1':>8}{'R-2':>8}{'R-L':>8}"]
    for scope, rep in reports.items():
        pct = rep.as_percent()
        lines.append(f"{scope:<8}{rep.sample_count:>7}{pct['R-1']:>8.2f}{pct['R-2']:>8.2f}{pct['R-L']:>8.2f}")
    return "\n".join(lines)


def run_evaluate(
    corpus: Union[str, Sequence[CorpusSample]],
    summarizer,
    scope: str = "all",
    split: Optional[str] = "test",
    language: str = "vi",
) -> tuple[dict[str, RougeReport], str]:
    samples = load_corpus(corpus) if isinstance(corpus, str) or hasattr(corpus, "__fspath__") else list(corpus)
    chosen = select(samples, scope, split)
    if not chosen:
        raise EmptyCorpus(f"no {split or 'any'}-split samples with scope {scope!r}")
    reports = evaluate_samples(chosen, summarizer, language)
    return reports, render_report(reports)
