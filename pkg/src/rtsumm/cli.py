"""Command-line entry point: ``rtsumm <subcommand>``.

Settings come from flags, then a JSON ``--config`` file, then defaults.
Config keys mirror the long flag names with dashes turned into underscores.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import budget as budget_mod
from .backends import BackendConfig, SummarizeTask, make_backend
from .corpus import DEFAULT_SHORT_THRESHOLD, CorpusSample, corpus_stats, dumps_sample, load_corpus, validate_guideline
from .evaluate import run_evaluate
from .exceptions import RtsummError
from .service import ServeConfig, run_serve
from .session import Session
from .simulator import SimConfig, simulate_conversation
from .transcript import WindowPolicy
from .wire import WireEvent, dump_inbound

logger = logging.getLogger("rtsumm")

DEFAULTS = {
    "n_max": 4,
    "t_max": 30.0,
    "backend": "extractive",
    "endpoint": None,
    "model": "gpt-3.5-turbo",
    "temperature": 0.7,
    "top_p": 0.9,
    "timeout": 30.0,
    "max_retries": 2,
    "example_pairs": [],
    "instruction": None,
    "seed": 0,
    "scope": "all",
    "split": "test",
    "short_threshold": DEFAULT_SHORT_THRESHOLD,
    "idle_timeout": 600.0,
    "backend_timeout": 60.0,
    "max_in_flight": 8,
    "language": "vi",
    "p_repeat": 0.01,
    "p_filler": 0.01,
    "fillers": None,
    "avg_lengths": None,
    "words_per_second": 3.5,
    "human_rate": 0.01,
    "gpt_in_rate": 0.50,
    "gpt_out_rate": 1.50,
    "avg_in_tokens": 700,
    "avg_out_tokens": 20,
}


def _settings(args) -> dict:
    merged = dict(DEFAULTS)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
        unknown = sorted(set(cfg) - set(DEFAULTS) - {"listen"})
        if unknown:
            raise SystemExit(f"unknown config keys: {', '.join(unknown)}")
        merged.update(cfg)
    for key, value in vars(args).items():
        if value is not None and (key in merged or key == "listen"):
            merged[key] = value
    return merged


def _backend_config(s: dict) -> BackendConfig:
    kwargs = dict(
        kind=s["backend"],
        endpoint=s["endpoint"],
        model=s["model"],
        temperature=s["temperature"],
        top_p=s["top_p"],
        timeout=s["timeout"],
        max_retries=s["max_retries"],
        example_pairs=tuple(tuple(p) for p in s["example_pairs"]),
    )
    if s["instruction"]:
        kwargs["instruction"] = s["instruction"]
    return BackendConfig(**kwargs)


def _policy(s: dict) -> WindowPolicy:
    return WindowPolicy(n_max=s["n_max"], t_max=s["t_max"])


def _sim_config(s: dict) -> SimConfig:
    kwargs = dict(p_repeat=s["p_repeat"], p_filler=s["p_filler"], words_per_second=s["words_per_second"], seed=s["seed"])
    if s["fillers"]:
        kwargs["fillers"] = tuple(s["fillers"])
    if s["avg_lengths"]:
        kwargs["avg_lengths"] = tuple(s["avg_lengths"])
    return SimConfig(**kwargs)


def _rate_card(s: dict) -> budget_mod.RateCard:
    return budget_mod.RateCard(
        human_rate=s["human_rate"],
        gpt_in_rate=s["gpt_in_rate"],
        gpt_out_rate=s["gpt_out_rate"],
        avg_in_tokens=s["avg_in_tokens"],
        avg_out_tokens=s["avg_out_tokens"],
    )


# -- subcommands -------------------------------------------------------------


def cmd_serve(args, s) -> int:
    config = ServeConfig(
        policy=_policy(s),
        backend=_backend_config(s),
        max_in_flight=s["max_in_flight"],
        backend_timeout=s["backend_timeout"],
        idle_timeout=s["idle_timeout"],
        language=s["language"],
    )
    if s.get("listen"):
        host, _, port = s["listen"].rpartition(":")
        config.host, config.port = host or "127.0.0.1", int(port)
    run_serve(config)
    return 0


def cmd_evaluate(args, s) -> int:
    backend = make_backend(_backend_config(s))
    reports, table = run_evaluate(args.corpus, backend, scope=s["scope"], split=s["split"], language=s["language"])
    print(table)
    if args.json:
        print(json.dumps({k: {**v.as_percent(), "n": v.sample_count} for k, v in reports.items()}))
    return 0


def _read_documents(paths, per_line: bool):
    for path in paths:
        text = Path(path).read_text(encoding="utf-8")
        if per_line:
            for i, line in enumerate(text.splitlines()):
                if line.strip():
                    yield f"{Path(path).stem}-{i}", line
        elif text.strip():
            yield Path(path).stem, text


def cmd_simulate(args, s) -> int:
    base = _sim_config(s)
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    backend = make_backend(_backend_config(s)) if args.format == "corpus" else None
    try:
        for n, (doc_id, text) in enumerate(_read_documents(args.sources, args.per_line)):
            cfg = dataclasses.replace(base, seed=None if base.seed is None else base.seed + n)
            conv = simulate_conversation(text, cfg, doc_id)
            if args.format == "events":
                for u in conv:
                    out.write(dump_inbound(WireEvent.from_utterance(doc_id, u)) + "\n")
                out.write(dump_inbound(WireEvent("end_of_conversation", doc_id)) + "\n")
                continue
            session = Session(doc_id, _policy(s))
            requests = [r for u in conv for r in session.ingest(u)] + session.end()
            for r in requests:
                if r.window_index is None and not args.with_global:
                    continue
                summary = backend.summarize(SummarizeTask(r.transcript, r.scope, s["language"]))
                sample_id = f"{doc_id}-w{r.window_index}" if r.window_index is not None else f"{doc_id}-global"
                out.write(dumps_sample(CorpusSample(sample_id, args.split, r.scope.value, "sim", r.transcript, summary)) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_stats(args, s) -> int:
    stats = corpus_stats(load_corpus(args.corpus))
    if args.json:
        for rec in stats.to_records():
            print(json.dumps(rec))
    else:
        print(stats.render())
    return 0


def cmd_budget(args, s) -> int:
    print(budget_mod.render_budget(args.budget, _rate_card(s), args.human_share))
    return 0


def cmd_validate(args, s) -> int:
    entities = None
    if args.entities:
        entities = [e.strip() for e in Path(args.entities).read_text(encoding="utf-8").splitlines() if e.strip()]
    failed = 0
    samples = load_corpus(args.corpus)
    for sample in samples:
        report = validate_guideline(sample, s["short_threshold"], entities)
        if not report.ok:
            failed += 1
            for finding in report.findings:
                print(f"{sample.id}\t{finding}")
    print(f"{len(samples) - failed}/{len(samples)} samples follow the guidelines", file=sys.stderr)
    return 1 if failed else 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with settings (flags override it)")
    common.add_argument("--n-max", type=int, help="utterances per local window (default 4)")
    common.add_argument("--t-max", type=float, help="max seconds per local window (default 30)")
    common.add_argument("--backend", choices=["extractive", "remote"])
    common.add_argument("--endpoint", help="chat-completion URL for the remote backend")
    common.add_argument("--seed", type=int)
    common.add_argument("--scope", choices=["local", "global", "all"])
    common.add_argument("--short-threshold", type=int, help="transcripts shorter than this skip the length cap")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="rtsumm", description="Real-time conversation summarization toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", parents=[common], help="stream NDJSON events on stdio or TCP")
    p.add_argument("--listen", help="HOST:PORT to accept TCP clients instead of stdio")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("evaluate", parents=[common], help="ROUGE of a backend on a corpus")
    p.add_argument("corpus")
    p.add_argument("--split", choices=["train", "dev", "test"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("simulate", parents=[common], help="spoken-style conversations from clean text")
    p.add_argument("sources", nargs="+")
    p.add_argument("--per-line", action="store_true", help="one document per line instead of per file")
    p.add_argument("--format", choices=["events", "corpus"], default="events")
    p.add_argument("--split", choices=["train", "dev", "test"], default="train")
    p.add_argument("--with-global", action="store_true", help="also label a global summary per conversation")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stats", parents=[common], help="dataset statistics table")
    p.add_argument("corpus")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("budget", parents=[common], help="annotation budget calculator")
    p.add_argument("--budget", type=float, default=2.5)
    p.add_argument("--human-share", type=float, default=0.5)
    for flag in ("human-rate", "gpt-in-rate", "gpt-out-rate", "avg-in-tokens", "avg-out-tokens"):
        p.add_argument(f"--{flag}", type=float)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("validate", parents=[common], help="check summaries against annotation rules")
    p.add_argument("corpus")
    p.add_argument("--entities", help="file with one entity per line")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args, _settings(args))
    except (RtsummError, ValueError, OSError) as exc:
        print(f"rtsumm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
