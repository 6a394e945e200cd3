"""Spoken-style conversation simulation from clean text.

Words get random repetitions and filler insertions, then the text is cut
into utterance-sized pieces whose edges are trimmed the way ASR segments
start and stop mid-sentence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_positive, check_probability, check_rng, check_text_list
from .exceptions import EmptySource
from .rouge import tokenize
from .transcript import Conversation, Utterance

# Common Vietnamese hesitation words; override with SimConfig.fillers.
DEFAULT_FILLERS = ("à", "ừ", "ờ", "ừm", "thì", "là", "kiểu", "nói chung")

# ~110 words is the average simulated input length; utterances are far shorter.
DEFAULT_AVG_LENGTHS = (8, 10, 12, 15, 18, 20)

TRIM_STRATEGIES = ("back", "front", "both")


@dataclass(frozen=True)
class SimConfig:
    p_repeat: float = 0.01
    p_filler: float = 0.01
    fillers: tuple[str, ...] = DEFAULT_FILLERS
    avg_lengths: tuple[int, ...] = DEFAULT_AVG_LENGTHS
    overhang: float = 0.25
    words_per_second: float = 3.5
    seed: int | None = 0

    def __post_init__(self):
        check_probability(self.p_repeat, "p_repeat")
        check_probability(self.p_filler, "p_filler")
        object.__setattr__(self, "fillers", tuple(self.fillers))
        object.__setattr__(self, "avg_lengths", tuple(self.avg_lengths))
        if self.p_filler > 0 and not self.fillers:
            raise ValueError("fillers must be non-empty when p_filler > 0")
        if not self.avg_lengths:
            raise ValueError("avg_lengths must not be empty")
        for n in self.avg_lengths:
            check_positive(n, "avg_lengths entry", integer=True)
        check_positive(self.overhang, "overhang", strict=False)
        check_positive(self.words_per_second, "words_per_second")


def simulate_speaking_style(words: Sequence[str], cfg: SimConfig = SimConfig(), rng=None) -> list[str]:
    """Emit each word, then maybe a repeat of it, then maybe a filler.

    *rng* defaults to a generator seeded from ``cfg.seed``.
    """
    rng = check_rng(cfg.seed if rng is None else rng)
    out = []
    for word in words:
        out.append(word)
        if rng.random() < cfg.p_repeat:
            out.append(word)
        if rng.random() < cfg.p_filler:
            out.append(rng.choice(cfg.fillers))
    return out


def trim_utterance(words: Sequence[str], cfg: SimConfig = SimConfig(), rng=None) -> list[str]:
    """Cut *words* down to a length drawn from ``cfg.avg_lengths``.

    ``back`` keeps the head, ``front`` keeps the tail, ``both`` keeps a window
    whose start is uniform over all valid offsets.
    """
    rng = check_rng(cfg.seed if rng is None else rng)
    return _trim(words, rng.choice(cfg.avg_lengths), rng)[0]


def _trim(words, chosen_len, rng):
    # returns (trimmed words, start offset)
    words = list(words)
    if not words:
        raise ValueError("cannot trim an empty utterance")
    strategy = rng.choice(TRIM_STRATEGIES)
    if chosen_len >= len(words):
        return words, 0
    if strategy == "back":
        start = 0
    elif strategy == "front":
        start = len(words) - chosen_len
    else:
        start = rng.randint(0, len(words) - chosen_len)
    return words[start : start + chosen_len], start


def simulate_conversation(source_text: str, cfg: SimConfig = SimConfig(), conversation_id: str = "sim-0") -> Conversation:
    """Turn clean text into a timestamped spoken-style conversation.

    A cursor walks the source. At each step a block of ``L * (1 + overhang)``
    words is trimmed to ``L`` words, ``L`` drawn from ``cfg.avg_lengths``;
    the cursor then moves past the kept words, so anything trimmed from the
    tail is re-read by the next block while a trimmed head is lost, as with
    a clipped recording. Timestamps assume ``cfg.words_per_second``.
    """
    words = [w for w in source_text.split() if tokenize(w)]
    if not words:
        raise EmptySource("source text has no tokens")
    rng = check_rng(cfg.seed)

    utterances = []
    cursor = 0
    clock = 0.0
    while cursor < len(words):
        length = rng.choice(cfg.avg_lengths)
        block = words[cursor : cursor + length + math.floor(length * cfg.overhang)]
        kept, start = _trim(block, length, rng)
        cursor += start + len(kept)
        spoken = simulate_speaking_style(kept, cfg, rng)
        duration = round(len(spoken) / cfg.words_per_second, 6)
        utterances.append(
            Utterance(
                id=f"{conversation_id}-u{len(utterances)}",
                text=" ".join(spoken),
                t_start=round(clock, 6),
                t_end=round(clock + duration, 6),
                speaker=None,
            )
        )
        clock += duration
    return Conversation(conversation_id, tuple(utterances))


class SpeakingStyleSimulator(BaseEstimator, TransformerMixin):
    """Transformer mapping clean documents to simulated :class:`Conversation` objects.

    ``transform`` seeds document ``i`` with ``seed + i`` so results do not
    depend on batch composition order beyond the index.
    """

    def __init__(
        self,
        p_repeat=0.01,
        p_filler=0.01,
        fillers=DEFAULT_FILLERS,
        avg_lengths=DEFAULT_AVG_LENGTHS,
        overhang=0.25,
        words_per_second=3.5,
        seed=0,
    ):
        self.p_repeat = p_repeat
        self.p_filler = p_filler
        self.fillers = fillers
        self.avg_lengths = avg_lengths
        self.overhang = overhang
        self.words_per_second = words_per_second
        self.seed = seed

    def _config(self, seed) -> SimConfig:
        return SimConfig(
            p_repeat=self.p_repeat,
            p_filler=self.p_filler,
            fillers=tuple(self.fillers),
            avg_lengths=tuple(self.avg_lengths),
            overhang=self.overhang,
            words_per_second=self.words_per_second,
            seed=seed,
        )

    def fit(self, X=None, y=None):
        self.config_ = self._config(self.seed)
        return self

    def transform(self, X, ids=None):
        docs = check_text_list(X)
        base = 0 if self.seed is None else self.seed
        ids = ids or [f"sim-{i}" for i in range(len(docs))]
        out = []
        for i, doc in enumerate(docs):
            seed = None if self.seed is None else base + i
            out.append(simulate_conversation(doc, self._config(seed), ids[i]))
        return out

    def __sklearn_is_fitted__(self):
        return True
