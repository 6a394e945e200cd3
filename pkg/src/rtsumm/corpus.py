"""JSON-lines corpus I/O, dataset statistics and annotation-rule checks."""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exceptions import EmptyTranscript, ParseError
from .rouge import tokenize

SPLITS = ("train", "dev", "test")
SCOPES = ("local", "global")
SOURCES = ("real", "sim", "syn")
FIELDS = ("id", "split", "scope", "source", "transcript", "summary")

DEFAULT_SHORT_THRESHOLD = 50
MAX_COMPRESSION = 0.20

# Table columns in the order the dataset is usually reported.
COLUMNS = (("local", "real"), ("global", "real"), ("local", "sim"), ("local", "syn"))


@dataclass(frozen=True)
class CorpusSample:
    id: str
    split: str
    scope: str
    source: str
    transcript: str
    summary: str

    def __post_init__(self):
        problems = sample_problems(asdict(self))
        if problems:
            raise ValueError("; ".join(problems))

    def to_dict(self) -> dict:
        return asdict(self)


def sample_problems(record: dict) -> list[str]:
    problems = []
    for key in FIELDS:
        if key not in record:
            problems.append(f"missing field {key!r}")
        elif not isinstance(record[key], str):
            problems.append(f"field {key!r} must be a string")
    extra = sorted(set(record) - set(FIELDS))
    if extra:
        problems.append(f"unknown fields {extra}")
    if problems:
        return problems
    for key, allowed in (("split", SPLITS), ("scope", SCOPES), ("source", SOURCES)):
        if record[key] not in allowed:
            problems.append(f"{key} {record[key]!r} not in {list(allowed)}")
    for key in ("id", "transcript", "summary"):
        if not record[key].strip():
            problems.append(f"{key} must be non-empty")
    return problems


def load_corpus(path) -> list[CorpusSample]:
    """Read one JSON object per line. Blank lines are skipped."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"corpus file not found: {path}")
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from None
            if not isinstance(record, dict):
                raise ParseError("record must be a JSON object", line=lineno)
            problems = sample_problems(record)
            if problems:
                raise ParseError("; ".join(problems), line=lineno)
            samples.append(CorpusSample(**record))
    return samples


def dumps_sample(sample: CorpusSample) -> str:
    # json escapes newlines and quotes, so each record stays on one line
    return json.dumps(sample.to_dict(), ensure_ascii=False)


def write_corpus(samples: Iterable[CorpusSample], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sample in samples:
            fh.write(dumps_sample(sample))
            fh.write("\n")


@dataclass
class CorpusStats:
    counts: Counter = field(default_factory=Counter)  # (split, scope, source) -> records
    summary_words: Counter = field(default_factory=Counter)  # (scope, source) -> tokens
    input_words: Counter = field(default_factory=Counter)

    def count(self, split=None, scope=None, source=None) -> int:
        return sum(
            n
            for (sp, sc, so), n in self.counts.items()
            if (split is None or sp == split) and (scope is None or sc == scope) and (source is None or so == source)
        )

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def total_summary_words(self) -> int:
        return sum(self.summary_words.values())

    @property
    def total_input_words(self) -> int:
        return sum(self.input_words.values())

    def avg_summary_length(self, scope=None, source=None) -> float:
        return self._avg(self.summary_words, scope, source)

    def avg_input_length(self, scope=None, source=None) -> float:
        return self._avg(self.input_words, scope, source)

    def _avg(self, words, scope, source):
        n = self.count(scope=scope, source=source)
        if n == 0:
            return 0.0
        total = sum(v for (sc, so), v in words.items() if (scope is None or sc == scope) and (source is None or so == source))
        return total / n

    def to_records(self) -> list[dict]:
        rows = []
        for split in SPLITS:
            for scope, source in COLUMNS:
                rows.append({"split": split, "scope": scope, "source": source, "count": self.count(split, scope, source)})
        for scope, source in COLUMNS:
            rows.append(
                {
                    "split": "all",
                    "scope": scope,
                    "source": source,
                    "count": self.count(scope=scope, source=source),
                    "summary_words": self.summary_words[(scope, source)],
                    "input_words": self.input_words[(scope, source)],
                    "avg_summary_length": round(self.avg_summary_length(scope, source), 2),
                    "avg_input_length": round(self.avg_input_length(scope, source), 2),
                }
            )
        return rows

    def render(self) -> str:
        header = ["", *(f"{source}/{scope}" for scope, source in COLUMNS), "all"]
        rows = [header]
        for split in SPLITS:
            cells = [self.count(split, sc, so) for sc, so in COLUMNS]
            rows.append([split.capitalize(), *map(str, cells), str(self.count(split))])
        rows.append(["Total", *(str(self.count(scope=sc, source=so)) for sc, so in COLUMNS), str(self.total)])
        rows.append(["#Summary words", *(str(self.summary_words[c]) for c in COLUMNS), str(self.total_summary_words)])
        rows.append(["#Input words", *(str(self.input_words[c]) for c in COLUMNS), str(self.total_input_words)])
        rows.append(["Avg summary length", *(f"{self.avg_summary_length(*c):.2f}" for c in COLUMNS), ""])
        rows.append(["Avg input length", *(f"{self.avg_input_length(*c):.2f}" for c in COLUMNS), ""])
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        return "\n".join("  ".join(cell.ljust(w) if i == 0 else cell.rjust(w) for i, (cell, w) in enumerate(zip(r, widths))) for r in rows)


def corpus_stats(samples: Iterable[CorpusSample]) -> CorpusStats:
    stats = CorpusStats()
    for s in samples:
        stats.counts[(s.split, s.scope, s.source)] += 1
        stats.summary_words[(s.scope, s.source)] += len(tokenize(s.summary))
        stats.input_words[(s.scope, s.source)] += len(tokenize(s.transcript))
    return stats


def compression_rate(transcript: str, summary: str) -> float:
    n = len(tokenize(transcript))
    if n == 0:
        raise EmptyTranscript("transcript has no tokens")
    return len(tokenize(summary)) / n


@dataclass(frozen=True)
class GuidelineReport:
    compression_ok: bool
    compression_rate: float
    exempt_short: bool
    findings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings


def validate_guideline(
    sample: CorpusSample,
    short_threshold: int = DEFAULT_SHORT_THRESHOLD,
    entities: Optional[Sequence[str]] = None,
    max_compression: float = MAX_COMPRESSION,
) -> GuidelineReport:
    """Check the automatable annotation rules for one sample.

    The length cap applies unless the transcript has fewer than
    *short_threshold* tokens. If *entities* is given, every entity that
    occurs in the transcript must also occur in the summary.
    """
    transcript_tokens = tokenize(sample.transcript)
    summary_tokens = tokenize(sample.summary)
    findings = []
    rate = len(summary_tokens) / len(transcript_tokens) if transcript_tokens else float("inf")
    exempt = len(transcript_tokens) < short_threshold
    # exact rational comparison: 20/100 must pass, 21/100 must not
    within = bool(transcript_tokens) and Fraction(len(summary_tokens), len(transcript_tokens)) <= Fraction(
        str(max_compression)
    )
    compression_ok = within or exempt
    if not compression_ok:
        findings.append(
            f"summary has {len(summary_tokens)} tokens, over {max_compression:.0%} of {len(transcript_tokens)}"
        )
    if not summary_tokens:
        findings.append("summary is empty")
    if entities:
        for entity in entities:
            ent = tokenize(entity)
            if ent and _contains(transcript_tokens, ent) and not _contains(summary_tokens, ent):
                findings.append(f"entity {entity!r} dropped from summary")
    return GuidelineReport(compression_ok, rate, exempt, tuple(findings))


def _contains(tokens: list[str], sub: list[str]) -> bool:
    k = len(sub)
    return any(tokens[i : i + k] == sub for i in range(len(tokens) - k + 1))
