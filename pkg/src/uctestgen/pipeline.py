"""The three-step run: CFG generation, path extraction, test-case creation."""

from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .evaluation.report import EvalReport, evaluate_use_case
from .evaluation.similarity import SimilarityConfig
from .gateway import Provider
from .generation import GenerationConfig, build_cfg_for_use_case, generate_cfg
from .model import (
    Cfg,
    Dataset,
    TestCase,
    UseCase,
    serialize_cfg_document,
    serialize_paths_document,
    serialize_test_cases_document,
)
from .paths import PathSet, extract_paths
from .storage import write_text
from .testcases import RenderConfig, Renderer, render_test_suite, suite_to_markdown
from .validation import validate_cfg

log = logging.getLogger(__name__)

CFG_FILE = "cfg.json"
PATHS_FILE = "paths.json"
TESTCASES_FILE = "testcases.json"
MARKDOWN_FILE = "testcases.md"
REPORT_FILE = "report.json"
REPORT_CSV = "report.csv"
MANIFEST_FILE = "manifest.json"


class PipelineError(RuntimeError):
    def __init__(self, step: str, use_case_id: str, cause: Exception):
        super().__init__(f"{use_case_id} [{step}]: {type(cause).__name__}: {cause}")
        self.step = step
        self.use_case_id = use_case_id
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    generation: GenerationConfig = GenerationConfig()
    render: RenderConfig = RenderConfig()
    use_builder: bool = False

    def snapshot(self) -> dict:
        render = asdict(self.render)
        render["renderer"] = self.render.renderer.value
        return {"generation": asdict(self.generation), "render": render, "use_builder": self.use_builder}


@dataclass
class PipelineResult:
    use_case: UseCase
    cfg: Cfg
    paths: PathSet
    suite: list[TestCase]
    manifest_entry: dict = field(default_factory=dict)


def run_pipeline(
    use_case: UseCase,
    provider: Optional[Provider],
    config: PipelineConfig = PipelineConfig(),
    out_dir: str | os.PathLike | None = None,
) -> PipelineResult:
    """Run all three steps for one use case, writing artifacts under ``out_dir``.

    With ``use_builder`` and the template renderer no provider is needed.
    """
    try:
        if config.use_builder:
            cfg, attempts = build_cfg_for_use_case(use_case), 0
            verdict = validate_cfg(cfg)
            if not verdict.valid:
                raise ValueError(f"builder produced an invalid CFG: {verdict.summary()}")
        else:
            if provider is None:
                raise ValueError("CFG generation needs a provider")
            cfg, attempts = generate_cfg(use_case, provider, config.generation)
    except Exception as exc:
        raise PipelineError("step-1", use_case.id, exc) from exc

    try:
        path_set = extract_paths(cfg)
    except Exception as exc:
        raise PipelineError("step-2", use_case.id, exc) from exc

    try:
        suite, tc_attempts = render_test_suite(use_case, path_set.translated, provider, config.render)
    except Exception as exc:
        raise PipelineError("step-3", use_case.id, exc) from exc

    entry = {"cfg_attempts": attempts, "testcase_attempts": tc_attempts, "path_count": len(path_set)}
    if out_dir is not None:
        out = Path(out_dir)
        artifacts = {
            "cfg": write_text(out / CFG_FILE, serialize_cfg_document(cfg)),
            "paths": write_text(out / PATHS_FILE, serialize_paths_document(path_set.translated)),
            "testcases": write_text(out / TESTCASES_FILE, serialize_test_cases_document(suite)),
            "markdown": write_text(out / MARKDOWN_FILE, suite_to_markdown(use_case, suite)),
        }
        entry["artifacts"] = {k: str(v) for k, v in artifacts.items()}
    return PipelineResult(use_case, cfg, path_set, suite, entry)


def evaluate_runs(
    dataset: Dataset,
    generated: dict[str, Cfg],
    similarity: SimilarityConfig = SimilarityConfig(),
) -> EvalReport:
    """Compare generated CFGs with the dataset's ground truth, in dataset order."""
    rows = []
    for uc in dataset.use_cases:
        if uc.id in generated and uc.id in dataset.ground_truth:
            rows.append(evaluate_use_case(uc.id, generated[uc.id], dataset.ground_truth[uc.id], similarity))
    return EvalReport(rows)


def write_report(report: EvalReport, out_dir: str | os.PathLike, fmt: str = "json") -> Path:
    out = Path(out_dir)
    if fmt == "csv":
        return write_text(out / REPORT_CSV, report.to_csv())
    return write_text(out / REPORT_FILE, report.to_json())


def build_manifest(provider_name: str, config: PipelineConfig, entries: dict[str, dict], extra: dict | None = None) -> dict:
    for uid, entry in entries.items():
        for path in entry.get("artifacts", {}).values():
            if not Path(path).exists():
                raise FileNotFoundError(f"manifest for {uid} references missing artifact {path}")
    manifest = {
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "provider": provider_name,
        "config": config.snapshot(),
        "use_cases": entries,
    }
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(manifest: dict, out_dir: str | os.PathLike) -> Path:
    return write_text(Path(out_dir) / MANIFEST_FILE, json.dumps(manifest, indent=2) + "\n")


def run_dataset(
    dataset: Dataset,
    provider: Optional[Provider],
    config: PipelineConfig,
    out_dir: str | os.PathLike,
    similarity: SimilarityConfig = SimilarityConfig(),
    report_format: str = "json",
) -> tuple[list[PipelineResult], Optional[EvalReport]]:
    """Run every use case of ``dataset`` and, where ground truth exists, evaluate."""
    out = Path(out_dir)
    results = [run_pipeline(uc, provider, config, out / uc.id) for uc in dataset.use_cases]
    report = None
    extra = {"dataset": dataset.name}
    if dataset.ground_truth:
        report = evaluate_runs(dataset, {r.use_case.id: r.cfg for r in results}, similarity)
        extra["report"] = str(write_report(report, out, report_format))
        extra["similarity"] = {"provider": similarity.provider.value, "threshold": similarity.threshold}
    name = provider.name if provider is not None else "builder"
    write_manifest(build_manifest(name, config, {r.use_case.id: r.manifest_entry for r in results}, extra), out)
    return results, report


def offline_config(max_retries: int = 3) -> PipelineConfig:
    return PipelineConfig(
        render=RenderConfig(Renderer.TEMPLATE, max_regeneration_attempts=max_retries), use_builder=True
    )
