"""Functional PISA switch pipeline model with an FPGA mapping cost estimator."""

from .actions import execute, ipv4_checksum
from .cost import CostReport, pipeline_report
from .deparser import deparse
from .packet import (InvalidFieldAccess, InvalidHeaderRef, NoTransition, Packet, PacketDrop,
                     ParsedPacket, Truncated)
from .parser import extract_key, parse
from .pipeline import Pipeline, RunResult
from .spec import (PipelineSpec, SpecError, dump_pipeline_spec, load_pipeline_spec,
                   load_pipeline_spec_file, validate_spec)

__version__ = "0.1.0"

__all__ = [
    "CostReport", "InvalidFieldAccess", "InvalidHeaderRef", "NoTransition", "Packet", "PacketDrop",
    "ParsedPacket", "Pipeline", "PipelineSpec", "RunResult", "SpecError", "Truncated", "deparse",
    "dump_pipeline_spec", "execute", "extract_key", "ipv4_checksum", "load_pipeline_spec",
    "load_pipeline_spec_file", "parse", "pipeline_report", "validate_spec",
]
