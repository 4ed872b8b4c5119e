"""
FPGA cost report and bus-width sweep
====================================

"""

import csv
import io
from pathlib import Path

from pisa_model import load_pipeline_spec_file, pipeline_report
from pisa_model.cost import render_text, sweep_csv

scenarios = Path(__file__).resolve().parents[1] / "scenarios"
spec = load_pipeline_spec_file(scenarios / "t4.json")
print(render_text(pipeline_report(spec)))

# throughput is width x frequency; frequency stays at 500 MHz up to 1280 bits and then falls
for row in csv.DictReader(io.StringIO(sweep_csv(spec.platform))):
    w = int(row["bus_width_bits"])
    if w % 256 == 0:
        print(f"{w:5d} bits  {float(row['frequency_hz']) / 1e6:7.2f} MHz  "
              f"{float(row['throughput_bps']) / 1e9:7.1f} Gb/s  ({row['frequency_source']})")
