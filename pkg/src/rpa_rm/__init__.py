"""Recursive projection-aggregation decoding of Reed-Muller codes over BMS channels."""

__version__ = "0.1.0"

from .bounds import BoundInputs, BoundReport, bound_report, theorem_threshold, unrolled_bound
from .channels import Bec, BiAwgn, Bsc, Custom, DiscreteBms, combine_minus, parse_channel, quantize
from .decoder import DecoderConfig, fht_decode, rpa_decode, rpa_decode_batch
from .rm_code import RmCode, encode, new_rm_code
from .simulation import SimConfig, SimResult, run_trials

__all__ = [
    "Bec",
    "BiAwgn",
    "BoundInputs",
    "BoundReport",
    "Bsc",
    "Custom",
    "DecoderConfig",
    "DiscreteBms",
    "RmCode",
    "SimConfig",
    "SimResult",
    "bound_report",
    "combine_minus",
    "encode",
    "fht_decode",
    "new_rm_code",
    "parse_channel",
    "quantize",
    "rpa_decode",
    "rpa_decode_batch",
    "run_trials",
    "theorem_threshold",
    "unrolled_bound",
]
