"""Generate abstract test cases from natural-language use cases via control-flow graphs."""

from .gateway import GenerationRequest, LiveProvider, RecordingProvider, ReplayProvider, Transcript, complete, record_transcript
from .generation import FlowStep, FlowSteps, GenerationConfig, assemble_cfg_prompt, build_cfg_from_steps, generate_cfg, parse_flow_steps
from .model import Cfg, Dataset, Edge, Node, TestCase, TestPath, TestStep, UseCase, parse_cfg_document, serialize_cfg_document
from .paths import PathSet, build_adjacency, enumerate_node_paths, extract_paths, translate_paths
from .pipeline import PipelineConfig, run_dataset, run_pipeline
from .storage import export_dot, ingest_dataset
from .testcases import RenderConfig, Renderer, assemble_testcase_prompt, create_test_case, render_test_suite
from .validation import Rule, ValidationVerdict, validate_cfg

__version__ = "0.1.0"
