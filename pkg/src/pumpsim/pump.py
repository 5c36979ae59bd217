"""Lumped-parameter model of the three-chamber peristaltic pump.

Two complementary routes live here:

* a calibrated flow characteristic Q(vpp, f, dp) whose free constants
  are pinned to measured anchor points (max flow, max backpressure,
  dead-zone voltage, peak frequency), and
* a quasi-static cycle simulator that books chamber volumes over one
  driving period and enforces the valve-seal rule of the protocol.

The characteristic is
    Q = Qmax(vpp, f) * max(0, 1 - dp / Pmax(vpp))
    Qmax = K * max(0, vpp - v_threshold) * f * S(f)
    S(f) = 1 / (1 + (f / f_c) ** n_roll)
with a linear Pmax(vpp) sharing the same dead-zone voltage. The form is
the simplest one matching the device's qualitative behavior (dead zone,
rise-then-rapid-fall over frequency, straight load line); all of its
constants come from calibration, none from first principles.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive, require
from .drive import SEAL_THRESHOLD, normalized_position
from .errors import CalibrationError, ProtocolViolationError, ValidationError

DEFAULT_CHAMBER_AREA = 24e-6    # m^2 per actuator
DEFAULT_SHAPE_FACTOR = 2.0 / 3.0  # parabolic deflection profile average
DEFAULT_N_ROLL = 4.0


@dataclass(frozen=True)
class PumpParams:
    """Calibrated pump characteristic parameters (SI units)."""

    chamber_area: float = DEFAULT_CHAMBER_AREA
    shape_factor: float = DEFAULT_SHAPE_FACTOR
    v_threshold: float = 40.0       # dead-zone voltage, Vp-p
    q_cal: float = 1.5e-8           # flow at the anchor point, m^3/s
    p_max_cal: float = 1800.0       # max backpressure at anchor voltage, Pa
    f_c: float = 60.0 * 3.0 ** 0.25  # rolloff corner frequency, Hz
    n_roll: float = DEFAULT_N_ROLL
    v_anchor: float = 160.0         # anchor drive amplitude, Vp-p
    f_anchor: float = 60.0          # anchor drive frequency, Hz

    def __post_init__(self):
        check_positive(self.chamber_area, "chamber_area")
        check_positive(self.shape_factor, "shape_factor")
        check_positive(self.v_threshold, "v_threshold")
        check_positive(self.q_cal, "q_cal")
        check_positive(self.p_max_cal, "p_max_cal")
        check_positive(self.f_c, "f_c")
        check_positive(self.n_roll, "n_roll")
        check_positive(self.v_anchor, "v_anchor")
        check_positive(self.f_anchor, "f_anchor")
        require(
            self.v_threshold < self.v_anchor,
            "v_threshold must be below the anchor voltage",
        )


@dataclass(frozen=True)
class CalibrationSet:
    """Named anchor points tying the model to measured operating points.

    flow:          (vpp, f_hz, dp_pa, q_m3s) at zero backpressure
    backpressure:  (vpp, f_hz, p_pa) where the flow stalls
    dead_zone_vpp: largest drive producing negligible flow
    peak_frequency_hz: frequency of maximum flow
    extras:        additional (vpp, f_hz, dp_pa, q_m3s) check points
    """

    flow: tuple | None = None
    backpressure: tuple | None = None
    dead_zone_vpp: float | None = None
    peak_frequency_hz: float | None = None
    extras: tuple = ()


#: Stock anchor set: 900 ul/min at 160 Vp-p / 60 Hz / 0 Pa, 1.8 kPa
#: stall at the same drive, 40 Vp-p dead zone, 60 Hz peak.
REFERENCE_ANCHORS = CalibrationSet(
    flow=(160.0, 60.0, 0.0, 1.5e-8),
    backpressure=(160.0, 60.0, 1800.0),
    dead_zone_vpp=40.0,
    peak_frequency_hz=60.0,
)


def stroke_volume(params, deflection_pp):
    """Swept volume of one actuator over a full stroke."""
    check_nonnegative(deflection_pp, "deflection_pp")
    return params.shape_factor * params.chamber_area * deflection_pp


def _rolloff(params, f):
    return 1.0 / (1.0 + (f / params.f_c) ** params.n_roll)


def max_flow(params, vpp, f):
    """Zero-backpressure flow rate (m^3/s)."""
    check_nonnegative(vpp, "vpp")
    check_positive(f, "f")
    drive = max(0.0, vpp - params.v_threshold)
    drive_anchor = params.v_anchor - params.v_threshold
    shape = f * _rolloff(params, f)
    shape_anchor = params.f_anchor * _rolloff(params, params.f_anchor)
    return params.q_cal * (drive / drive_anchor) * (shape / shape_anchor)


def max_backpressure(params, vpp):
    """Backpressure at which the flow stalls (Pa); linear above the
    dead zone and clamped to zero below it."""
    check_nonnegative(vpp, "vpp")
    drive = max(0.0, vpp - params.v_threshold)
    return params.p_max_cal * drive / (params.v_anchor - params.v_threshold)


def flow_rate(params, vpp, f, dp):
    """Flow rate (m^3/s) at drive ``vpp`` (Vp-p), frequency ``f`` (Hz),
    against backpressure ``dp`` (Pa)."""
    if dp < 0.0:
        raise ValidationError(f"backpressure must be >= 0, got {dp!r}")
    qmax = max_flow(params, vpp, f)
    if qmax == 0.0:
        return 0.0
    pmax = max_backpressure(params, vpp)
    return qmax * max(0.0, 1.0 - dp / pmax)


def pq_curve(params, vpp, f, n_points):
    """Load line: ``n_points`` evenly spaced (dp, Q) pairs from
    (0, Qmax) down to (Pmax, 0)."""
    require(isinstance(n_points, (int, np.integer)) and n_points >= 2,
            "n_points must be an integer >= 2")
    pmax = max_backpressure(params, vpp)
    dps = np.linspace(0.0, pmax, int(n_points))
    return [(float(dp), flow_rate(params, vpp, f, float(dp))) for dp in dps]


def calibrate(anchors, chamber_area=DEFAULT_CHAMBER_AREA,
              shape_factor=DEFAULT_SHAPE_FACTOR, n_roll=DEFAULT_N_ROLL,
              tolerance=1e-3):
    """Fit PumpParams to an anchor set.

    The four named anchors pin the model exactly (closed form); any
    extra points are then audited against the fitted model and must
    reproduce within ``tolerance`` relative, otherwise the anchor set
    is over-determined and calibration fails with the residual list.
    """
    if anchors is None:
        raise ValidationError("anchor set is required for calibration")
    missing = [
        name for name in ("flow", "backpressure", "dead_zone_vpp", "peak_frequency_hz")
        if getattr(anchors, name) is None
    ]
    if missing:
        raise ValidationError(f"anchor set is missing: {', '.join(missing)}")

    v_th = check_positive(float(anchors.dead_zone_vpp), "dead_zone_vpp")
    f_peak = check_positive(float(anchors.peak_frequency_hz), "peak_frequency_hz")
    vpp_q, f_q, dp_q, q = (float(x) for x in anchors.flow)
    require(dp_q == 0.0, "the flow anchor must be taken at zero backpressure")
    check_positive(q, "flow anchor value")
    require(vpp_q > v_th, "flow anchor voltage must be above the dead zone")
    vpp_p, _, p = (float(x) for x in anchors.backpressure)
    check_positive(p, "backpressure anchor value")
    require(vpp_p > v_th, "backpressure anchor voltage must be above the dead zone")

    # Peak of f * S(f) sits at f_c * (n_roll - 1)^(-1/n_roll).
    f_c = f_peak * (n_roll - 1.0) ** (1.0 / n_roll)
    # The linear Pmax law referenced at the flow-anchor voltage.
    p_at_anchor = p * (vpp_q - v_th) / (vpp_p - v_th)
    params = PumpParams(
        chamber_area=chamber_area,
        shape_factor=shape_factor,
        v_threshold=v_th,
        q_cal=q,
        p_max_cal=p_at_anchor,
        f_c=f_c,
        n_roll=n_roll,
        v_anchor=vpp_q,
        f_anchor=f_q,
    )

    residuals = {}
    for i, (vpp_x, f_x, dp_x, q_x) in enumerate(anchors.extras):
        achieved = flow_rate(params, float(vpp_x), float(f_x), float(dp_x))
        scale = max(abs(float(q_x)), params.q_cal)
        if abs(achieved - float(q_x)) > tolerance * scale:
            residuals[f"extra[{i}] (vpp={vpp_x}, f={f_x}, dp={dp_x})"] = (
                float(q_x), achieved,
            )
    if residuals:
        lines = "; ".join(
            f"{k}: target {t:.6g}, model {a:.6g}" for k, (t, a) in residuals.items()
        )
        raise CalibrationError(
            f"anchor set is inconsistent with the model form: {lines}",
            residuals=residuals,
        )
    return params


@dataclass(frozen=True)
class ChamberTrace:
    """Volume bookkeeping of one simulated driving period.

    times is the step grid (s); volumes is a (3, len(times)) array of
    chamber volumes (m^3); inlet_volume / outlet_volume are the period
    tallies of liquid drawn from the inlet and delivered to the outlet;
    net_volume is their mean, the net displaced volume per cycle.
    """

    times: np.ndarray
    volumes: np.ndarray
    inlet_volume: float
    outlet_volume: float
    net_volume: float

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "volumes", np.asarray(self.volumes, dtype=float))
        require(self.volumes.shape == (3, self.times.size),
                "volumes must be 3 x len(times)")
        require(bool(np.all(self.volumes >= 0.0)), "chamber volumes must be >= 0")


def simulate_cycle(schedule, params, deflection_pp, steps=1000,
                   seal_threshold=SEAL_THRESHOLD):
    """Quasi-static volume bookkeeping over one driving period.

    Chamber k holds V_rest + (shape_factor * area * deflection_pp / 2)
    times the normalized actuator position, with V_rest chosen so a
    fully squeezed chamber reaches zero. The channel runs
    inlet - C0 - [valve A] - C1 - [valve B] - C2 - outlet, the valves
    being the seal ridges under the outer actuators: valve A (B) is open
    while actuator 0 (2) sits above ``seal_threshold``. Per step, the
    chambers connected to a port exchange their volume change with it;
    volume change of the middle chamber while both valves are closed is
    absorbed by diaphragm compliance and reaches neither port. The trace
    reports both port tallies and their mean as the net displaced
    volume.

    Raises ProtocolViolationError at the first instant both valves are
    open, which no schedule obeying the 120-degree protocol produces
    but user-supplied offsets can.
    """
    require(isinstance(steps, (int, np.integer)) and steps >= 6,
            "steps must be an integer >= 6")
    check_nonnegative(deflection_pp, "deflection_pp")

    period = schedule.period
    times = np.linspace(0.0, period, int(steps) + 1)
    mids = (times[:-1] + times[1:]) / 2.0

    pos = np.stack([normalized_position(schedule, k, times) for k in range(3)])
    pos_mid = np.stack([normalized_position(schedule, k, mids) for k in range(3)])

    # Violation = both valve actuators above the seal height. Checked on
    # the step grid and at midpoints so routing never sees an unsealed
    # pair that the grid missed.
    violations = []
    for t_arr, p_arr in ((times, pos), (mids, pos_mid)):
        unsealed = (p_arr[0] > seal_threshold) & (p_arr[2] > seal_threshold)
        if np.any(unsealed):
            violations.append(float(t_arr[np.argmax(unsealed)]))
    if violations:
        t_first = min(violations)
        raise ProtocolViolationError(
            f"both valve chambers are open at t = {t_first:.9g} s; "
            "the driving schedule does not maintain the seal invariant",
            time=t_first,
        )

    half_stroke = params.shape_factor * params.chamber_area * deflection_pp / 2.0
    volumes = half_stroke + half_stroke * pos

    dv = np.diff(volumes, axis=1)
    a_open = pos_mid[0] > seal_threshold
    b_open = pos_mid[2] > seal_threshold
    inlet = 0.0
    outlet = 0.0
    for i in range(dv.shape[1]):
        inlet += dv[0, i] + (dv[1, i] if a_open[i] else 0.0)
        outlet += -(dv[2, i] + (dv[1, i] if b_open[i] else 0.0))
    net = 0.5 * (inlet + outlet)
    return ChamberTrace(
        times=times,
        volumes=volumes,
        inlet_volume=inlet,
        outlet_volume=outlet,
        net_volume=net,
    )
