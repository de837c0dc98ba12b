"""Desk-scale laboratory for speed priors on a fixed monotone machine."""

from .enumeration import (
    ComputationLedger,
    ComputationRecord,
    enumerate_up_to_phase,
    first_phase,
    incomputable_prefix_set,
    km_complexity,
    kt_complexity,
    records_to_jsonl,
    targeted_records,
)
from .measures import (
    DyadicInterval,
    MeasureSpec,
    decoder_km,
    decoder_mass,
    decoder_run,
    measure_eval,
    output_interval,
    parse_measure_spec,
)
from .predictor import (
    LossSpec,
    PredictionTrace,
    SplitMix64,
    adversarial_sequence,
    deviation_sum,
    predict_next,
    run_experiment,
    run_on_sequence,
)
from .priors import (
    PriorEstimate,
    PriorKind,
    alternate_form_sum,
    conditional,
    estimate_prior,
    s_fast_estimate,
    s_kt_estimate,
)
from .vm import ComputationResult, MachineState, Status, computes, step

__version__ = "0.1.0"

__all__ = [
    "ComputationLedger",
    "ComputationRecord",
    "ComputationResult",
    "DyadicInterval",
    "LossSpec",
    "MachineState",
    "MeasureSpec",
    "PredictionTrace",
    "PriorEstimate",
    "PriorKind",
    "SplitMix64",
    "Status",
    "adversarial_sequence",
    "alternate_form_sum",
    "computes",
    "conditional",
    "decoder_km",
    "decoder_mass",
    "decoder_run",
    "deviation_sum",
    "enumerate_up_to_phase",
    "estimate_prior",
    "first_phase",
    "incomputable_prefix_set",
    "km_complexity",
    "kt_complexity",
    "measure_eval",
    "output_interval",
    "parse_measure_spec",
    "predict_next",
    "records_to_jsonl",
    "run_experiment",
    "run_on_sequence",
    "s_fast_estimate",
    "s_kt_estimate",
    "step",
    "targeted_records",
    "__version__",
]
