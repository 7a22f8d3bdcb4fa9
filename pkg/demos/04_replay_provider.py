"""Drive the LLM path from a recorded transcript.

The transcript holds one invalid CFG (forcing a regeneration), a valid one,
and test-case replies including one malformed answer that gets retried.
Swapping ReplayProvider for LiveProvider() talks to a real endpoint configured
through TGEN_API_KEY, TGEN_API_BASE and TGEN_MODEL.

    python3 demos/04_replay_provider.py
"""

from pathlib import Path

from uctestgen.gateway import ReplayProvider
from uctestgen.storage import read_use_case
from uctestgen.pipeline import PipelineConfig, run_pipeline

data = Path(__file__).resolve().parent.parent / "tests" / "data"
provider = ReplayProvider.from_file(data / "diamond_transcript.json")
use_case = read_use_case(data / "diamond_usecase.txt")

result = run_pipeline(use_case, provider, PipelineConfig())
print("CFG attempts:", result.manifest_entry["cfg_attempts"])
print("test-case attempts per path:", result.manifest_entry["testcase_attempts"])
for case in result.suite:
    print(f"{case.id} {case.title}")
    for step in case.steps:
        print(f"    {step.action}  =>  {step.expected_result}")
