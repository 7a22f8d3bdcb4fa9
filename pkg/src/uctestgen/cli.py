"""Command-line entry point (``uctestgen``)."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import pipeline as pl
from .evaluation.similarity import DEFAULT_THRESHOLD, EndpointError, SimilarityConfig
from .gateway import LiveProvider, ProviderError, RecordingProvider, ReplayProvider, record_transcript
from .generation import GenerationConfig, GenerationExhausted, build_cfg_for_use_case, generate_cfg
from .model import CodecError, parse_paths_document, serialize_cfg_document, serialize_paths_document, serialize_test_cases_document
from .paths import PathBudgetExceeded, extract_paths
from .storage import DatasetFileError, LayoutError, export_dot, ingest_dataset, read_cfg, read_use_case, write_text
from .testcases import RenderConfig, RenderExhausted, SuiteError, render_test_suite, suite_to_markdown
from .validation import validate_cfg

log = logging.getLogger("uctestgen")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE, EXIT_PROVIDER = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def _provider(args):
    kind = args.provider
    if kind == "builder":
        return None
    if kind == "replay":
        if not args.transcript:
            raise UsageError("--provider replay needs --transcript")
        return ReplayProvider.from_file(args.transcript)
    live = LiveProvider()
    return RecordingProvider(live) if getattr(args, "record", None) else live


def _save_recording(provider, args) -> None:
    if isinstance(provider, RecordingProvider) and args.record:
        record_transcript(provider).save(args.record)


def _render_config(args) -> RenderConfig:
    if args.renderer == "llm" and args.provider == "builder":
        raise UsageError("--renderer llm needs an LLM provider (live or replay)")
    return RenderConfig(args.renderer, max_regeneration_attempts=args.max_retries or 3)


def _similarity(args) -> SimilarityConfig:
    return SimilarityConfig(args.similarity, args.threshold, args.embedding_endpoint)


def cmd_generate(args) -> int:
    uc = read_use_case(args.usecase)
    provider = _provider(args)
    if provider is None:
        cfg = build_cfg_for_use_case(uc)
        verdict = validate_cfg(cfg)
        if not verdict.valid:
            log.error("builder output invalid: %s", verdict.summary())
            return EXIT_FAILURE
    else:
        cfg, attempts = generate_cfg(uc, provider, GenerationConfig(args.max_retries or 5))
        log.info("valid CFG after %d attempt(s)", attempts)
        _save_recording(provider, args)
    _emit(serialize_cfg_document(cfg), args.out)
    return EXIT_OK


def cmd_paths(args) -> int:
    cfg = read_cfg(args.cfg)
    verdict = validate_cfg(cfg)
    if not verdict.valid:
        log.error("%s is not a valid CFG: %s", args.cfg, verdict.summary())
        return EXIT_FAILURE
    _emit(serialize_paths_document(extract_paths(cfg).translated), args.out)
    return EXIT_OK


def cmd_testcases(args) -> int:
    uc = read_use_case(args.usecase)
    paths = parse_paths_document(Path(args.paths).read_bytes())
    config = _render_config(args)
    provider = _provider(args)
    suite, _ = render_test_suite(uc, paths, provider, config)
    _save_recording(provider, args)
    _emit(serialize_test_cases_document(suite), args.out)
    if args.markdown:
        write_text(args.markdown, suite_to_markdown(uc, suite))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    if not args.out:
        raise UsageError("pipeline needs --out <directory>")
    render = _render_config(args)
    config = pl.PipelineConfig(GenerationConfig(args.max_retries or 5), render, args.provider == "builder")
    provider = _provider(args)
    target = Path(args.input)
    if target.is_dir():
        dataset = ingest_dataset(target)
        results, report = pl.run_dataset(dataset, provider, config, args.out, _similarity(args), args.report)
        for r in results:
            log.info("%s: %d paths, %d test cases", r.use_case.id, len(r.paths), len(r.suite))
        if report is not None:
            agg = report.aggregates
            log.info(
                "evaluated %d use cases: discrepancy %.2f%%, avg|delta| %.2f",
                agg["n_ucs"], agg["discrepancy_rate"], agg["avg_abs_delta"],
            )
    else:
        uc = read_use_case(target)
        result = pl.run_pipeline(uc, provider, config, args.out)
        name = provider.name if provider is not None else "builder"
        pl.write_manifest(pl.build_manifest(name, config, {uc.id: result.manifest_entry}), args.out)
    _save_recording(provider, args)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    dataset = ingest_dataset(args.dataset)
    generated = {}
    for uc in dataset.use_cases:
        path = Path(args.generated) / uc.id / pl.CFG_FILE
        if path.exists():
            generated[uc.id] = read_cfg(path)
        else:
            log.warning("no generated CFG for %s at %s", uc.id, path)
    report = pl.evaluate_runs(dataset, generated, _similarity(args))
    text = report.to_csv() if args.report == "csv" else report.to_json()
    _emit(text, args.out)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    _emit(export_dot(read_cfg(args.cfg)), args.out)
    return EXIT_OK


def cmd_ingest_check(args) -> int:
    dataset = ingest_dataset(args.dataset)
    print(f"dataset {dataset.name}: {len(dataset.use_cases)} use cases, {len(dataset.ground_truth)} ground-truth CFGs")
    for uid, warning in dataset.truth_warnings.items():
        print(f"  warning {uid}: {warning}")
    return EXIT_FAILURE if dataset.truth_warnings else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uctestgen", description="Use case -> CFG -> test paths -> test cases.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def provider_flags(p, renderer=False):
        p.add_argument("--provider", choices=["live", "replay", "builder"], default="live")
        p.add_argument("--transcript", help="recorded transcript for --provider replay")
        p.add_argument("--record", help="save a transcript of live calls to this file")
        p.add_argument("--max-retries", type=int, default=None, help="regeneration attempts")
        if renderer:
            p.add_argument("--renderer", choices=["llm", "template"], default="llm")

    def eval_flags(p):
        p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
        p.add_argument("--similarity", choices=["lexical", "embedding-endpoint"], default="lexical")
        p.add_argument("--embedding-endpoint", help="URL of a {texts} -> {vectors} service")
        p.add_argument("--report", choices=["json", "csv"], default="json")

    p = sub.add_parser("generate", help="use case -> cfg.json")
    p.add_argument("usecase")
    provider_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("paths", help="cfg.json -> paths.json")
    p.add_argument("cfg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("testcases", help="use case + paths.json -> testcases.json")
    p.add_argument("usecase")
    p.add_argument("paths")
    provider_flags(p, renderer=True)
    p.add_argument("--markdown", help="also write a Markdown rendering")
    p.add_argument("--out")
    p.set_defaults(func=cmd_testcases)

    p = sub.add_parser("pipeline", help="run all steps for a use case file or a dataset directory")
    p.add_argument("input")
    provider_flags(p, renderer=True)
    eval_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("evaluate", help="compare generated CFGs with ground truth")
    p.add_argument("--dataset", required=True)
    p.add_argument("--generated", required=True, help="directory holding <id>/cfg.json")
    eval_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export-dot", help="cfg.json -> Graphviz DOT")
    p.add_argument("cfg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("ingest-check", help="load a dataset and report problems")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_ingest_check)
    return parser


def _root_cause(exc: BaseException) -> BaseException:
    while isinstance(exc, (pl.PipelineError, SuiteError)):
        exc = exc.cause
    return exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except Exception as exc:
        cause = _root_cause(exc)
        if isinstance(cause, (ProviderError, EndpointError)):
            log.error("provider failure: %s", exc)
            return EXIT_PROVIDER
        failures = (
            pl.PipelineError, GenerationExhausted, RenderExhausted, SuiteError, CodecError,
            LayoutError, DatasetFileError, PathBudgetExceeded, ValueError, OSError,
        )
        if isinstance(exc, failures):
            log.error("%s", exc)
            return EXIT_FAILURE
        raise
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
