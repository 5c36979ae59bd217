"""End-to-end simulation of a piezo-composite peristaltic micropump.

The package covers the chain from the actuator laminate to the wall
socket: classical-laminate-theory deflection of the piezo bender,
three-phase driving protocol and its sealing logic, a calibrated lumped
pump characteristic, and the sense-resistor power measurement pipeline.
"""

__version__ = "0.1.0"

from .drive import PhaseSchedule, PhaseState, phase_state, reverse, sample
from .errors import (
    CalibrationError,
    ConfigError,
    DataFormatError,
    NotCalibratedError,
    NumericalError,
    ProtocolViolationError,
    PumpsimError,
    ValidationError,
)
from .estimators import PiezoLoadModel, PumpFlowModel
from .laminate import (
    LaminateStack,
    PlateState,
    Ply,
    abd_matrix,
    actuation_deflection,
    cure_residual_state,
    default_stack,
    piezo_thermal_load,
    reduced_stiffness,
)
from .power import (
    LoadModel,
    PowerResult,
    Waveform,
    calibrate_load,
    current_from_sense,
    mean_power,
    synthesize_channel,
    total_power,
)
from .pump import (
    REFERENCE_ANCHORS,
    CalibrationSet,
    ChamberTrace,
    PumpParams,
    calibrate,
    flow_rate,
    max_backpressure,
    pq_curve,
    simulate_cycle,
    stroke_volume,
)

__all__ = [
    "__version__",
    "CalibrationError", "ConfigError", "DataFormatError", "NotCalibratedError",
    "NumericalError", "ProtocolViolationError", "PumpsimError", "ValidationError",
    "Ply", "LaminateStack", "PlateState", "reduced_stiffness", "abd_matrix",
    "piezo_thermal_load", "cure_residual_state", "actuation_deflection",
    "default_stack",
    "PhaseSchedule", "PhaseState", "sample", "reverse", "phase_state",
    "PumpParams", "CalibrationSet", "ChamberTrace", "REFERENCE_ANCHORS",
    "stroke_volume", "flow_rate", "max_backpressure", "pq_curve",
    "simulate_cycle", "calibrate",
    "Waveform", "PowerResult", "LoadModel", "current_from_sense", "mean_power",
    "total_power", "synthesize_channel", "calibrate_load",
    "PumpFlowModel", "PiezoLoadModel",
]
