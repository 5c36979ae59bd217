"""Scikit-learn style estimators around the two calibratable models.

These wrap the anchor-point calibration in the fit/predict idiom so the
models compose with the ecosystem (get_params/set_params, clone,
pipelines, grid evaluation). The physics lives in the pump and power
modules; this layer only adapts shapes.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import power, pump
from .errors import ValidationError


def _check_xy(X, y, n_features, name):
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[1] != n_features:
        raise ValidationError(
            f"{name} expects {n_features} feature columns, got {X.shape[1]}"
        )
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != X.shape[0]:
        raise ValidationError("X and y have inconsistent lengths")
    return X, y


class PumpFlowModel(BaseEstimator, RegressorMixin):
    """Pump flow characteristic with the estimator API.

    fit(X, y) takes operating points X = [vpp, freq_hz, dp_pa] and
    measured flows y (m^3/s). The zero-backpressure row of largest flow
    becomes the flow anchor, a stalled row (y == 0 above the dead zone)
    becomes the backpressure anchor, and every remaining row is audited
    against the fitted closed form. predict(X) evaluates the calibrated
    characteristic row-wise.

    Parameters
    ----------
    chamber_area : float
        Membrane area per actuator (m^2).
    shape_factor : float
        Mean-to-peak deflection ratio of the diaphragm.
    v_threshold : float
        Dead-zone voltage (Vp-p); no flow at or below it.
    n_roll : float
        Order of the high-frequency rolloff.
    peak_frequency : float
        Frequency (Hz) at which the flow peaks.
    """

    def __init__(self, chamber_area=pump.DEFAULT_CHAMBER_AREA,
                 shape_factor=pump.DEFAULT_SHAPE_FACTOR, v_threshold=40.0,
                 n_roll=pump.DEFAULT_N_ROLL, peak_frequency=60.0):
        self.chamber_area = chamber_area
        self.shape_factor = shape_factor
        self.v_threshold = v_threshold
        self.n_roll = n_roll
        self.peak_frequency = peak_frequency

    def fit(self, X, y):
        X, y = _check_xy(X, y, 3, type(self).__name__)
        flow_anchor = None
        bp_anchor = None
        extras = []
        for (vpp, f, dp), q in zip(X, y):
            if dp == 0.0 and q > 0.0 and (flow_anchor is None or q > flow_anchor[3]):
                if flow_anchor is not None:
                    extras.append(flow_anchor)
                flow_anchor = (vpp, f, dp, q)
            elif q == 0.0 and dp > 0.0 and vpp > self.v_threshold and bp_anchor is None:
                bp_anchor = (vpp, f, dp)
            else:
                extras.append((vpp, f, dp, q))
        if flow_anchor is None or bp_anchor is None:
            raise ValidationError(
                "fit needs a zero-backpressure flow row and a stalled "
                "(zero-flow) row above the dead zone"
            )
        anchors = pump.CalibrationSet(
            flow=flow_anchor,
            backpressure=bp_anchor,
            dead_zone_vpp=self.v_threshold,
            peak_frequency_hz=self.peak_frequency,
            extras=tuple(extras),
        )
        self.params_ = pump.calibrate(
            anchors, chamber_area=self.chamber_area,
            shape_factor=self.shape_factor, n_roll=self.n_roll,
        )
        self.n_features_in_ = 3
        return self

    def predict(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != 3:
            raise ValidationError("predict expects columns [vpp, freq_hz, dp_pa]")
        return np.array([
            pump.flow_rate(self.params_, vpp, f, dp) for vpp, f, dp in X
        ])


class PiezoLoadModel(BaseEstimator, RegressorMixin):
    """Electrical load model with the estimator API.

    fit(X, y) takes drive points X = [vpp, freq_hz] and measured
    three-channel totals y (W), then fits the lossy-capacitor constants.
    predict(X) runs the full synthetic measurement pipeline (waveform
    synthesis, sense-resistor current recovery, trapezoidal averaging)
    at each drive point.

    Parameters
    ----------
    c_eff : float
        Effective capacitance prior per actuator (F); kept fixed when a
        single anchor leaves the fit under-determined.
    r_e : float
        Sense resistance (Ohm).
    samples_per_period : int
        Sampling density of the synthetic records.
    """

    def __init__(self, c_eff=power.DEFAULT_C_EFF,
                 r_e=power.DEFAULT_SENSE_RESISTANCE, samples_per_period=2000):
        self.c_eff = c_eff
        self.r_e = r_e
        self.samples_per_period = samples_per_period

    def fit(self, X, y):
        X, y = _check_xy(X, y, 2, type(self).__name__)
        anchors = [((vpp, f), watts) for (vpp, f), watts in zip(X, y)]
        self.load_ = power.calibrate_load(anchors, c_eff=self.c_eff, r_e=self.r_e)
        self.tan_delta_ = self.load_.tan_delta
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        check_is_fitted(self, "load_")
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != 2:
            raise ValidationError("predict expects columns [vpp, freq_hz]")
        return np.array([
            power.synthesized_total_power(
                self.load_, vpp, f, samples_per_period=self.samples_per_period
            ).total
            for vpp, f in X
        ])
