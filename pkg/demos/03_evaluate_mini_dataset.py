"""Run the offline pipeline over the bundled mini dataset and print the report.

Uses the deterministic builder, the template renderer and lexical similarity,
so it needs no network and no API key.

    python3 demos/03_evaluate_mini_dataset.py [out_dir]
"""

import sys
import tempfile
from pathlib import Path

from uctestgen import ingest_dataset
from uctestgen.pipeline import offline_config, run_dataset

root = Path(__file__).resolve().parent.parent / "datasets" / "mini"
out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="uctestgen-"))

dataset = ingest_dataset(root)
results, report = run_dataset(dataset, None, offline_config(), out)

for r in results:
    print(f"{r.use_case.label}: {len(r.paths)} paths, {len(r.suite)} test cases")
print()
print(report.to_csv())
agg = report.aggregates
print(f"discrepancy rate {agg['discrepancy_rate']:.2f}%  avg|delta| {agg['avg_abs_delta']:.2f}")
print("artifacts in", out)
