"""
Replaying a scenario trace
==========================

"""

import json
from collections import Counter
from pathlib import Path

from pisa_model import Pipeline, load_pipeline_spec_file
from pisa_model.trace import format_trace, read_trace

scenarios = Path(__file__).resolve().parents[1] / "scenarios"
spec = load_pipeline_spec_file(scenarios / "t5.json")
result = Pipeline(spec).run(read_trace(scenarios / "traces" / "t5.in.trace"))
print(json.dumps(result.stats, indent=2))

# PIFO ranks reorder packets; the arrival attribute shows how far
moved = Counter(r.arrival_seq - i for i, r in enumerate(result.outputs))
print("displacement histogram:", sorted(moved.items())[:10], "...")

expected = (scenarios / "traces" / "t5.expected.trace").read_text()
print("matches the committed expected trace:", format_trace(result.outputs) == expected)
