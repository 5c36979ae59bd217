"""Drive-power measurement pipeline.

Each actuator is driven through a 1 kOhm series sense resistor; the
resistor voltage recovers the branch current i(t) = v_e(t) / r_e, and
the mean consumption of one actuator over a driving period is the
trapezoidal average of v_l(t) * i(t). The pump total is the sum over
the three channels.

For synthetic studies the actuator is modeled as a lossy capacitor
(parallel conductance tan_delta * omega * C next to the capacitance C),
the minimal electrical model of a piezo load that can draw real power.
Ingested oscilloscope records need no load model at all.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, least_squares, minimize_scalar

from ._validation import check_nonnegative, check_positive, require
from .errors import CalibrationError, ValidationError

DEFAULT_SENSE_RESISTANCE = 1000.0
DEFAULT_C_EFF = 100e-9
N_CHANNELS = 3
MIN_SAMPLES_PER_PERIOD = 16


@dataclass(frozen=True)
class Waveform:
    """Uniformly sampled real-valued record.

    ``unit`` is 'V' or 'A'; ``t0`` is the time of the first sample.
    """

    sample_rate: float
    samples: np.ndarray
    unit: str = "V"
    t0: float = 0.0

    def __post_init__(self):
        check_positive(self.sample_rate, "sample_rate")
        require(self.unit in ("V", "A"), "unit must be 'V' or 'A'")
        require(np.isfinite(self.t0), "t0 must be finite")
        samples = np.asarray(self.samples, dtype=float)
        require(samples.ndim == 1, "samples must be one-dimensional")
        require(samples.size >= 2, "a waveform needs at least 2 samples")
        require(bool(np.all(np.isfinite(samples))), "samples must be finite")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self):
        return (self.samples.size - 1) / self.sample_rate


@dataclass(frozen=True)
class PowerResult:
    """Per-actuator mean powers (W), their sum, and the averaging window."""

    per_actuator: tuple
    total: float
    period_used: float

    def __post_init__(self):
        require(len(self.per_actuator) == N_CHANNELS, "three channels expected")
        check_positive(self.period_used, "period_used")


@dataclass(frozen=True)
class LoadModel:
    """Lossy-capacitor model of one actuator plus its sense resistor."""

    c_eff: float = DEFAULT_C_EFF
    tan_delta: float = 0.0
    r_e: float = DEFAULT_SENSE_RESISTANCE

    def __post_init__(self):
        check_positive(self.c_eff, "c_eff")
        check_nonnegative(self.tan_delta, "tan_delta")
        check_positive(self.r_e, "r_e")

    def branch_impedance(self, frequency):
        """Complex impedance of the lossy capacitor at ``frequency``."""
        omega = 2.0 * np.pi * frequency
        return 1.0 / (omega * self.c_eff * (self.tan_delta + 1.0j))


def current_from_sense(v_e, r_e):
    """Branch current recovered from the sense-resistor record."""
    check_positive(r_e, "r_e")
    require(v_e.unit == "V", "sense record must be in volts")
    return Waveform(
        sample_rate=v_e.sample_rate,
        samples=v_e.samples / r_e,
        unit="A",
        t0=v_e.t0,
    )


def _check_common_grid(a, b):
    require(a.sample_rate == b.sample_rate, "sample rates differ between records")
    require(a.samples.size == b.samples.size, "record lengths differ")
    require(a.t0 == b.t0, "record start times differ")


def mean_power(v_l, i, period):
    """Mean of v_l(t) * i(t) over one period window, by trapezoid.

    ``period`` must span an integer number of samples (to 1 ppm) and fit
    inside the records; integration runs over the first window.
    """
    _check_common_grid(v_l, i)
    require(v_l.unit == "V", "v_l must be in volts")
    require(i.unit == "A", "i must be in amperes")
    check_positive(period, "period")
    n_float = period * v_l.sample_rate
    n = int(round(n_float))
    if n < 1 or abs(n_float - n) > 1e-6 * n_float:
        raise ValidationError(
            f"period {period!r} s does not cover an integer number of samples "
            f"at {v_l.sample_rate!r} Hz"
        )
    if n + 1 > v_l.samples.size:
        raise ValidationError(
            f"period needs {n + 1} samples but the record holds {v_l.samples.size}"
        )
    p = v_l.samples[: n + 1] * i.samples[: n + 1]
    dt = 1.0 / v_l.sample_rate
    integral = (0.5 * (p[0] + p[-1]) + p[1:-1].sum()) * dt
    return integral / period


def total_power(pairs, r_e, period):
    """Mean power per channel from (v_l, v_e) pairs, summed over the
    three actuators in channel order."""
    pairs = list(pairs)
    if len(pairs) != N_CHANNELS:
        raise ValidationError(
            f"the pump has exactly {N_CHANNELS} actuator channels, got {len(pairs)}"
        )
    per = []
    for v_l, v_e in pairs:
        _check_common_grid(v_l, v_e)
        per.append(mean_power(v_l, current_from_sense(v_e, r_e), period))
    total = per[0] + per[1] + per[2]
    return PowerResult(per_actuator=tuple(per), total=total, period_used=period)


def synthesize_channel(model, vpp, f, phase=0.0,
                       samples_per_period=2000, n_periods=1):
    """Steady-state (v_l, v_e) records for one driven channel.

    The source (vpp/2) sin(2 pi f t + phase) feeds the sense resistor in
    series with the lossy capacitor; both records are sampled from the
    exact phasor solution, so v_l + v_e reconstructs the source to
    roundoff. Records span ``n_periods`` periods plus the closing
    sample.
    """
    require(
        isinstance(samples_per_period, (int, np.integer))
        and samples_per_period >= MIN_SAMPLES_PER_PERIOD,
        f"samples_per_period must be an integer >= {MIN_SAMPLES_PER_PERIOD}",
    )
    require(isinstance(n_periods, (int, np.integer)) and n_periods >= 1,
            "n_periods must be an integer >= 1")
    check_nonnegative(vpp, "vpp")
    check_positive(f, "f")
    require(np.isfinite(phase), "phase must be finite")

    z_cap = model.branch_impedance(f)
    z_total = model.r_e + z_cap
    # Phasor convention: x(t) = Im(X exp(j omega t)).
    v_source = (vpp / 2.0) * np.exp(1.0j * phase)
    current = v_source / z_total
    v_l_ph = current * z_cap
    v_e_ph = current * model.r_e

    n = int(samples_per_period) * int(n_periods)
    t = np.arange(n + 1) / (samples_per_period * f)
    rot = np.exp(1.0j * 2.0 * np.pi * f * t)
    sample_rate = samples_per_period * f
    v_l = Waveform(sample_rate=sample_rate, samples=np.imag(v_l_ph * rot), unit="V")
    v_e = Waveform(sample_rate=sample_rate, samples=np.imag(v_e_ph * rot), unit="V")
    return v_l, v_e


def channel_power_phasor(model, vpp, f):
    """Closed-form mean power absorbed by one lossy-capacitor branch."""
    check_nonnegative(vpp, "vpp")
    check_positive(f, "f")
    z_cap = model.branch_impedance(f)
    i_rms = (vpp / 2.0) / np.sqrt(2.0) / abs(model.r_e + z_cap)
    return i_rms ** 2 * z_cap.real


def synthesized_total_power(model, vpp, f, offsets=(0.0, -2.0 * np.pi / 3.0,
                                                    -4.0 * np.pi / 3.0),
                            samples_per_period=2000):
    """Three-channel synthetic pipeline: synthesize, recover currents,
    integrate, sum. The reference implementation of the measurement
    chain run on model data."""
    pairs = [
        synthesize_channel(model, vpp, f, phase=offsets[k],
                           samples_per_period=samples_per_period)
        for k in range(N_CHANNELS)
    ]
    return total_power(pairs, model.r_e, 1.0 / f)


def _solve_tan_delta(target_per_channel, c_eff, r_e, vpp, f):
    """tan_delta reproducing ``target_per_channel`` watts, or None."""
    if target_per_channel == 0.0:
        return 0.0

    def power_of(d):
        return channel_power_phasor(LoadModel(c_eff=c_eff, tan_delta=d, r_e=r_e),
                                    vpp, f)

    peak = minimize_scalar(lambda d: -power_of(d), bounds=(0.0, 1e4),
                           method="bounded")
    d_peak = float(peak.x)
    p_peak = -float(peak.fun)
    if target_per_channel > p_peak:
        return None
    # Take the small-loss branch; a piezo load sits well below the peak.
    return brentq(lambda d: power_of(d) - target_per_channel, 0.0, d_peak,
                  xtol=1e-15, rtol=8.9e-16)


def calibrate_load(anchors, c_eff=DEFAULT_C_EFF, r_e=DEFAULT_SENSE_RESISTANCE,
                   tolerance=1e-3):
    """Fit the lossy-capacitor model to measured total-power anchors.

    ``anchors`` is a sequence of ((vpp, f), watts) pairs, watts being
    the three-channel total. With a single anchor the capacitance stays
    at the ``c_eff`` prior and tan_delta is solved exactly; with more
    anchors both constants are fitted by least squares. Every anchor
    must be reproduced within ``tolerance`` relative or calibration
    fails with the residual list.
    """
    anchors = list(anchors or [])
    if not anchors:
        raise ValidationError("at least one power anchor is required")
    parsed = []
    for (vpp, f), watts in anchors:
        parsed.append((check_nonnegative(float(vpp), "anchor vpp"),
                       check_positive(float(f), "anchor frequency"),
                       check_nonnegative(float(watts), "anchor power")))

    if len(parsed) == 1:
        vpp, f, watts = parsed[0]
        d = _solve_tan_delta(watts / N_CHANNELS, c_eff, r_e, vpp, f)
        if d is None:
            best = LoadModel(c_eff=c_eff, tan_delta=1.0, r_e=r_e)
            raise CalibrationError(
                f"anchor power {watts:.6g} W is unreachable for any tan_delta "
                f"with c_eff = {c_eff:.4g} F",
                residuals={"anchor": (watts, N_CHANNELS * channel_power_phasor(
                    best, vpp, f))},
            )
        model = LoadModel(c_eff=c_eff, tan_delta=d, r_e=r_e)
    else:
        def residual(x):
            m = LoadModel(c_eff=abs(x[0]), tan_delta=abs(x[1]), r_e=r_e)
            return [
                N_CHANNELS * channel_power_phasor(m, vpp, f) - watts
                for vpp, f, watts in parsed
            ]

        fit = least_squares(residual, x0=[c_eff, 0.05], xtol=1e-15, ftol=1e-15)
        model = LoadModel(c_eff=abs(fit.x[0]), tan_delta=abs(fit.x[1]), r_e=r_e)

    residuals = {}
    for vpp, f, watts in parsed:
        achieved = N_CHANNELS * channel_power_phasor(model, vpp, f)
        scale = max(abs(watts), 1e-12)
        if abs(achieved - watts) > tolerance * scale:
            residuals[f"(vpp={vpp:g}, f={f:g})"] = (watts, achieved)
    if residuals:
        lines = "; ".join(
            f"{k}: target {t:.6g} W, model {a:.6g} W"
            for k, (t, a) in residuals.items()
        )
        raise CalibrationError(
            f"load calibration cannot reproduce the anchors: {lines}",
            residuals=residuals,
        )
    return model
