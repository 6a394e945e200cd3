"""Real-time conversation summarization: windowed local summaries plus a
global summary per conversation, with ROUGE evaluation, spoken-style
simulation, corpus tooling and annotation budgeting."""

from .backends import (
    BackendConfig,
    ExtractiveSummarizer,
    RemoteSummarizer,
    SummarizeTask,
    build_prompt,
    extractive_summarize,
    summarize,
)
from .budget import RateCard, cost_per_summary, plan_two_step, summaries_for_budget
from .corpus import (
    CorpusSample,
    CorpusStats,
    GuidelineReport,
    compression_rate,
    corpus_stats,
    load_corpus,
    validate_guideline,
    write_corpus,
)
from .evaluate import run_evaluate
from .rouge import RougeReport, RougeScore, corpus_rouge, lcs_length, rouge_l, rouge_n, tokenize
from .service import ServeConfig, SummaryService, run_serve
from .session import FlushDecision, Session, SessionEngine, SummaryRequest, should_flush
from .simulator import SimConfig, SpeakingStyleSimulator, simulate_conversation, simulate_speaking_style, trim_utterance
from .transcript import (
    Conversation,
    Scope,
    SummaryUnit,
    Utterance,
    WindowPolicy,
    conversation_span,
    validate_conversation,
)
from .wire import WireEvent, emit_event, parse_event

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "ExtractiveSummarizer",
    "RemoteSummarizer",
    "SummarizeTask",
    "build_prompt",
    "extractive_summarize",
    "summarize",
    "RateCard",
    "cost_per_summary",
    "plan_two_step",
    "summaries_for_budget",
    "CorpusSample",
    "CorpusStats",
    "GuidelineReport",
    "compression_rate",
    "corpus_stats",
    "load_corpus",
    "validate_guideline",
    "write_corpus",
    "run_evaluate",
    "RougeReport",
    "RougeScore",
    "corpus_rouge",
    "lcs_length",
    "rouge_l",
    "rouge_n",
    "tokenize",
    "ServeConfig",
    "SummaryService",
    "run_serve",
    "FlushDecision",
    "Session",
    "SessionEngine",
    "SummaryRequest",
    "should_flush",
    "SimConfig",
    "SpeakingStyleSimulator",
    "simulate_conversation",
    "simulate_speaking_style",
    "trim_utterance",
    "Conversation",
    "Scope",
    "SummaryUnit",
    "Utterance",
    "WindowPolicy",
    "conversation_span",
    "validate_conversation",
    "WireEvent",
    "emit_event",
    "parse_event",
]
