"""Dataset ingestion and human-readable exports."""

from __future__ import annotations

import logging
import os
from pathlib import Path

from .model import Cfg, CodecError, Dataset, UseCase, parse_cfg_document
from .validation import validate_cfg

log = logging.getLogger(__name__)

USECASE_DIR = "usecases"
TRUTH_DIR = "groundtruth"
USECASE_SUFFIX = ".txt"
TRUTH_SUFFIX = ".cfg.json"


class LayoutError(ValueError):
    pass


class DatasetFileError(ValueError):
    def __init__(self, path: Path, cause: Exception):
        super().__init__(f"{path}: {cause}")
        self.path = path
        self.cause = cause


def read_use_case(path: str | os.PathLike, use_case_id: str | None = None) -> UseCase:
    """Load a use-case text file; an optional first line ``Title: ...`` sets the title."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    title = None
    lines = text.split("\n")
    if lines and lines[0].lower().startswith("title:"):
        title = lines[0][len("title:"):].strip() or None
        text = "\n".join(lines[1:])
    uid = use_case_id or (path.name[: -len(USECASE_SUFFIX)] if path.name.endswith(USECASE_SUFFIX) else path.stem)
    try:
        return UseCase(uid, text.strip("\n"), title)
    except ValueError as exc:
        raise DatasetFileError(path, exc) from exc


def read_cfg(path: str | os.PathLike) -> Cfg:
    path = Path(path)
    try:
        return parse_cfg_document(path.read_bytes())
    except CodecError as exc:
        raise DatasetFileError(path, exc) from exc


def ingest_dataset(root: str | os.PathLike) -> Dataset:
    """Load ``<root>/usecases/<id>.txt`` and optional ``<root>/groundtruth/<id>.cfg.json``.

    Use cases come back in lexicographic filename order. Invalid ground-truth
    CFGs are kept and recorded in ``truth_warnings``.
    """
    root = Path(root)
    uc_dir = root / USECASE_DIR
    if not uc_dir.is_dir():
        raise LayoutError(f"{root}: missing '{USECASE_DIR}/' directory")
    files = sorted(p for p in uc_dir.iterdir() if p.is_file() and p.name.endswith(USECASE_SUFFIX))
    if not files:
        raise LayoutError(f"{uc_dir}: no '*{USECASE_SUFFIX}' use cases")
    use_cases = [read_use_case(p) for p in files]
    ids = {uc.id for uc in use_cases}

    truth: dict[str, Cfg] = {}
    warnings: dict[str, str] = {}
    truth_dir = root / TRUTH_DIR
    if truth_dir.is_dir():
        for path in sorted(truth_dir.iterdir()):
            if not path.name.endswith(TRUTH_SUFFIX):
                continue
            uid = path.name[: -len(TRUTH_SUFFIX)]
            if uid not in ids:
                raise LayoutError(f"{path}: ground truth for unknown use case {uid!r}")
            cfg = read_cfg(path)
            verdict = validate_cfg(cfg)
            if not verdict.valid:
                warnings[uid] = verdict.summary()
                log.warning("ground truth %s is not a valid CFG: %s", path, verdict.summary())
            truth[uid] = cfg
    return Dataset(root.resolve().name, use_cases, truth, warnings)


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def export_dot(cfg: Cfg, name: str = "cfg") -> str:
    lines = [f"digraph {_dot_quote(name)} {{", "  node [shape=box];"]
    for node in cfg.nodes:
        lines.append(f"  {_dot_quote(node.id)} [label={_dot_quote(node.statement)}];")
    for edge in cfg.edges:
        attrs = f" [label={_dot_quote(edge.condition)}]" if edge.condition is not None else ""
        lines.append(f"  {_dot_quote(edge.source)} -> {_dot_quote(edge.target)}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_text(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
