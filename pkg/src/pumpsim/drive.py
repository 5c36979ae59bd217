"""Three-phase driving protocol for the three-actuator diaphragm.

The pump is driven by three waveforms of equal amplitude and frequency
whose phases are spaced 120 degrees apart. The phase order fixes the
travel direction of the peristaltic wave; swapping the outer two
offsets reverses the flow.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive, require
from .errors import ValidationError

N_ACTUATORS = 3

DEFAULT_OFFSETS = (0.0, -2.0 * np.pi / 3.0, -4.0 * np.pi / 3.0)

# Normalized height of the valve-seal contact point. A valve chamber is
# sealed while its actuator sits at or below this fraction of the
# half-stroke. +1/2 is the largest threshold for which two phases 240
# degrees apart can never both be open (equality exactly at their
# crossings), which is what makes "at least one valve is always sealed"
# provable for the default schedule.
SEAL_THRESHOLD = 0.5

SHAPES = ("sine", "square")


@dataclass(frozen=True)
class PhaseSchedule:
    """Amplitude, frequency, shape, and per-actuator phase offsets.

    Offsets are stored per actuator (rather than derived from a single
    spacing) so asymmetric experimental schedules can be represented;
    whether a schedule actually seals is checked by the cycle
    simulator, not at construction.
    """

    vpp: float
    frequency: float
    shape: str = "sine"
    offsets: tuple = DEFAULT_OFFSETS

    def __post_init__(self):
        check_nonnegative(self.vpp, "vpp")
        check_positive(self.frequency, "frequency")
        require(self.shape in SHAPES, f"shape must be one of {SHAPES}")
        offsets = tuple(float(o) for o in self.offsets)
        require(
            len(offsets) == N_ACTUATORS,
            f"exactly {N_ACTUATORS} phase offsets are required",
        )
        require(all(np.isfinite(o) for o in offsets), "offsets must be finite")
        object.__setattr__(self, "offsets", offsets)

    @property
    def period(self):
        return 1.0 / self.frequency


@dataclass(frozen=True)
class PhaseState:
    """Up/down flag per actuator at one instant (down = toward the
    chamber floor, taken as waveform sample <= 0)."""

    flags: tuple

    def __post_init__(self):
        require(len(self.flags) == N_ACTUATORS, "one flag per actuator")
        require(all(f in ("up", "down") for f in self.flags), "flags are up|down")

    @property
    def down(self):
        return tuple(f == "down" for f in self.flags)


def _check_actuator(actuator):
    if not isinstance(actuator, (int, np.integer)) or not 0 <= actuator < N_ACTUATORS:
        raise ValidationError(
            f"actuator index must be in [0, {N_ACTUATORS}), got {actuator!r}"
        )
    return int(actuator)


def sample(schedule, actuator, t):
    """Drive voltage of one actuator at time ``t`` (scalar or array).

    Sine shape returns (vpp/2) sin(2 pi f t + offset); square returns
    +-vpp/2 by the sign of the same phase (0 exactly at crossings).
    """
    k = _check_actuator(actuator)
    t = np.asarray(t, dtype=float)
    phase = 2.0 * np.pi * schedule.frequency * t + schedule.offsets[k]
    if schedule.shape == "sine":
        out = (schedule.vpp / 2.0) * np.sin(phase)
    else:
        out = (schedule.vpp / 2.0) * np.sign(np.sin(phase))
    return out if out.ndim else float(out)


def normalized_position(schedule, actuator, t):
    """Actuator position on the [-1, +1] scale (up positive).

    This is the waveform sample divided by the half-amplitude; a zero
    amplitude drive leaves every actuator parked at 0.
    """
    k = _check_actuator(actuator)
    t = np.asarray(t, dtype=float)
    if schedule.vpp == 0.0:
        out = np.zeros_like(t)
        return out if out.ndim else 0.0
    phase = 2.0 * np.pi * schedule.frequency * t + schedule.offsets[k]
    if schedule.shape == "sine":
        out = np.sin(phase)
    else:
        out = np.sign(np.sin(phase))
    return out if out.ndim else float(out)


def reverse(schedule):
    """Schedule with the outer two phase offsets swapped.

    Swapping actuators 0 and 2 reverses the travel direction of the
    peristaltic wave; applying reverse twice returns the original
    schedule.
    """
    o = schedule.offsets
    return PhaseSchedule(
        vpp=schedule.vpp,
        frequency=schedule.frequency,
        shape=schedule.shape,
        offsets=(o[2], o[1], o[0]),
    )


def phase_state(schedule, t):
    """Discrete up/down state of the three actuators at time ``t``."""
    flags = tuple(
        "down" if sample(schedule, k, float(t)) <= 0.0 else "up"
        for k in range(N_ACTUATORS)
    )
    return PhaseState(flags=flags)


def seal_margin(schedule, t, seal_threshold=SEAL_THRESHOLD):
    """Sealing slack of the valve pair at time ``t`` (scalar or array).

    Positive values mean at least one of the two valve actuators
    (indices 0 and 2) sits at or below the seal contact height:
    ``seal_threshold - min(position_0, position_2)``.
    """
    p0 = normalized_position(schedule, 0, t)
    p2 = normalized_position(schedule, 2, t)
    return seal_threshold - np.minimum(p0, p2)
