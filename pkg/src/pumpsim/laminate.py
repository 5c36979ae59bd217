"""Classical laminate theory for the piezo-composite bender.

Predicts curvature and simply-supported center deflection of a
glass-epoxy / PZT / carbon-epoxy laminate strip under cure cooldown and
applied voltage. The piezoelectric free strain ``d31 * V / t_pzt`` of the
powered ply is applied as an equivalent thermal expansion, so a single
thermal-load solver covers both load cases.

Conventions:

* Units are SI throughout (Pa, m, K, V). Angles are radians.
* Plies are listed bottom to top; z is measured from the laminate
  mid-plane, positive up.
* Strain vectors are (eps_x, eps_y, gamma_xy) with engineering shear;
  curvature vectors are (kappa_x, kappa_y, kappa_xy).
* The solver is plate-level CLT on a narrow strip (beam-level use);
  dynamic response and hysteresis are out of scope.
"""

from dataclasses import dataclass, field
from math import cos, sin

import numpy as np

from ._validation import check_index, check_nonnegative, check_positive, require
from .errors import NumericalError, ValidationError

# Amplitude cap equivalent to a 160 Vp-p drive; above it the ceramic
# risks depolarization (domain switching).
DEFAULT_ENVELOPE_VPP = 160.0

# Cooldown from a 177 degC cure to a 25 degC room.
DEFAULT_CURE_DELTA_T = -152.0


@dataclass(frozen=True)
class Ply:
    """One layer of the laminate.

    e1, e2, g12 are the in-plane elastic moduli (Pa), nu12 the major
    Poisson ratio, alpha1/alpha2 the CTEs (1/K), d31 the transverse
    piezoelectric strain coefficient (m/V; zero for passive plies),
    thickness in m and angle the lay-up angle in radians.
    """

    e1: float
    e2: float
    g12: float
    nu12: float
    alpha1: float
    alpha2: float
    thickness: float
    d31: float = 0.0
    angle: float = 0.0

    def __post_init__(self):
        check_positive(self.e1, "e1")
        check_positive(self.e2, "e2")
        check_positive(self.g12, "g12")
        check_positive(self.thickness, "thickness")
        for name in ("nu12", "alpha1", "alpha2", "d31", "angle"):
            require(np.isfinite(getattr(self, name)), f"{name} must be finite")
        if self.nu12 ** 2 >= self.e1 / self.e2:
            raise ValidationError(
                "reciprocal Poisson bound violated: nu12^2 must be < e1/e2 "
                f"(nu12={self.nu12}, e1/e2={self.e1 / self.e2:.4g})"
            )


@dataclass(frozen=True)
class LaminateStack:
    """Ordered ply stack (bottom to top) plus strip geometry.

    ``pzt_index`` locates the powered ply. When omitted it is derived
    from the single ply with nonzero d31; a stack with more than one
    powered ply is rejected, an all-passive stack is allowed.
    """

    plies: tuple
    span: float
    width: float
    pzt_index: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "plies", tuple(self.plies))
        require(len(self.plies) > 0, "ply list must not be empty")
        for ply in self.plies:
            require(isinstance(ply, Ply), "plies must be Ply instances")
        check_positive(self.span, "span")
        check_positive(self.width, "width")
        active = [i for i, p in enumerate(self.plies) if p.d31 != 0.0]
        require(len(active) <= 1, "at most one ply may have nonzero d31")
        if self.pzt_index is None:
            object.__setattr__(self, "pzt_index", active[0] if active else None)
        else:
            check_index(self.pzt_index, len(self.plies), "pzt_index")

    @property
    def thickness(self):
        return sum(p.thickness for p in self.plies)

    def z_interfaces(self):
        """Ply interface z-coordinates from the mid-plane, bottom to top."""
        z = [-self.thickness / 2.0]
        for ply in self.plies:
            z.append(z[-1] + ply.thickness)
        return np.array(z)


@dataclass(frozen=True)
class PlateState:
    """Mid-plane strain and curvature solution of the laminate."""

    eps0: np.ndarray
    kappa: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eps0", np.asarray(self.eps0, dtype=float))
        object.__setattr__(self, "kappa", np.asarray(self.kappa, dtype=float))
        require(self.eps0.shape == (3,), "eps0 must have 3 components")
        require(self.kappa.shape == (3,), "kappa must have 3 components")
        require(bool(np.all(np.isfinite(self.eps0))), "eps0 must be finite")
        require(bool(np.all(np.isfinite(self.kappa))), "kappa must be finite")


# Table of bulk material properties for the stock lay-up: piezoceramic
# wafer, carbon-epoxy prepreg, glass-epoxy prepreg.
MATERIALS = {
    "pzt3203hd": dict(
        e1=62e9, e2=62e9, g12=23.7e9, nu12=0.31,
        alpha1=3.5e-6, alpha2=3.5e-6, d31=-320e-12,
    ),
    "carbon_epoxy": dict(
        e1=231.2e9, e2=7.2e9, g12=4.3e9, nu12=0.29,
        alpha1=-1.58e-6, alpha2=32.2e-6,
    ),
    "glass_epoxy": dict(
        e1=21.7e9, e2=21.7e9, g12=3.99e9, nu12=0.13,
        alpha1=14.2e-6, alpha2=14.2e-6,
    ),
}

# Stock stack: glass 0.09 / PZT 0.10 / carbon 0.10 / glass 0.09 mm,
# 12 x 4 mm strip. Overridable via configuration; never used as a
# quantitative ground truth.
DEFAULT_STACK_LAYUP = (
    ("glass_epoxy", 0.09e-3),
    ("pzt3203hd", 0.10e-3),
    ("carbon_epoxy", 0.10e-3),
    ("glass_epoxy", 0.09e-3),
)
DEFAULT_SPAN = 12e-3
DEFAULT_WIDTH = 4e-3


def make_ply(material, thickness, angle=0.0):
    """Build a Ply from a named entry of MATERIALS."""
    if material not in MATERIALS:
        raise ValidationError(
            f"unknown material {material!r}; known: {sorted(MATERIALS)}"
        )
    return Ply(thickness=thickness, angle=angle, **MATERIALS[material])


def default_stack():
    """The stock actuator lay-up as a LaminateStack."""
    plies = tuple(make_ply(name, t) for name, t in DEFAULT_STACK_LAYUP)
    return LaminateStack(plies=plies, span=DEFAULT_SPAN, width=DEFAULT_WIDTH)


def reduced_stiffness(ply):
    """Plane-stress reduced stiffness matrix Q of a ply in its own axes."""
    nu21 = ply.nu12 * ply.e2 / ply.e1
    denom = 1.0 - ply.nu12 * nu21
    q11 = ply.e1 / denom
    q22 = ply.e2 / denom
    q12 = ply.nu12 * ply.e2 / denom
    return np.array([
        [q11, q12, 0.0],
        [q12, q22, 0.0],
        [0.0, 0.0, ply.g12],
    ])


def transformed_stiffness(ply):
    """Reduced stiffness rotated from ply axes to laminate x-y axes."""
    q = reduced_stiffness(ply)
    c, s = cos(ply.angle), sin(ply.angle)
    c2, s2 = c * c, s * s
    c4, s4, c2s2 = c2 * c2, s2 * s2, c2 * s2
    q11, q12, q22, q66 = q[0, 0], q[0, 1], q[1, 1], q[2, 2]
    qb11 = q11 * c4 + 2.0 * (q12 + 2.0 * q66) * c2s2 + q22 * s4
    qb22 = q11 * s4 + 2.0 * (q12 + 2.0 * q66) * c2s2 + q22 * c4
    qb12 = q12 * (c4 + s4) + (q11 + q22 - 4.0 * q66) * c2s2
    qb16 = (q11 - q12 - 2.0 * q66) * c2 * c * s + (q12 - q22 + 2.0 * q66) * c * s2 * s
    qb26 = (q11 - q12 - 2.0 * q66) * c * s2 * s + (q12 - q22 + 2.0 * q66) * c2 * c * s
    qb66 = (q11 + q22 - 2.0 * q12 - 2.0 * q66) * c2s2 + q66 * (c4 + s4)
    return np.array([
        [qb11, qb12, qb16],
        [qb12, qb22, qb26],
        [qb16, qb26, qb66],
    ])


def _transformed_expansion(ply, a1, a2):
    """Rotate an expansion pair (a1, a2) from ply axes to laminate axes.

    Returns (ax, ay, axy) with engineering shear.
    """
    c, s = cos(ply.angle), sin(ply.angle)
    ax = a1 * c * c + a2 * s * s
    ay = a1 * s * s + a2 * c * c
    axy = 2.0 * c * s * (a1 - a2)
    return np.array([ax, ay, axy])


def abd_matrix(stack):
    """Laminate stiffness blocks (A, B, D).

    A is Pa*m, B Pa*m^2, D Pa*m^3; A and D are positive definite for
    any valid ply set.
    """
    z = stack.z_interfaces()
    a = np.zeros((3, 3))
    b = np.zeros((3, 3))
    d = np.zeros((3, 3))
    for k, ply in enumerate(stack.plies):
        qbar = transformed_stiffness(ply)
        a += qbar * (z[k + 1] - z[k])
        b += qbar * (z[k + 1] ** 2 - z[k] ** 2) / 2.0
        d += qbar * (z[k + 1] ** 3 - z[k] ** 3) / 3.0
    return a, b, d


def thermal_resultants(stack, delta_t):
    """Force and moment resultants from a uniform temperature change."""
    z = stack.z_interfaces()
    n = np.zeros(3)
    m = np.zeros(3)
    for k, ply in enumerate(stack.plies):
        qbar = transformed_stiffness(ply)
        free = _transformed_expansion(ply, ply.alpha1, ply.alpha2) * delta_t
        load = qbar @ free
        n += load * (z[k + 1] - z[k])
        m += load * (z[k + 1] ** 2 - z[k] ** 2) / 2.0
    return n, m


def piezo_thermal_load(stack, voltage, envelope_vpp=DEFAULT_ENVELOPE_VPP,
                       enforce_envelope=True, beta=0.0):
    """Force and moment resultants from the powered ply at ``voltage``.

    The free strain d31 * V / t of the PZT ply enters exactly like a
    thermal expansion, so only that ply contributes. ``beta`` scales
    d31 by (1 + beta * |E|) to mimic the high-field response of the
    ceramic; beta = 0 keeps the linear model. Voltages outside the
    +-envelope_vpp/2 window are rejected unless the check is disabled,
    in which case a warning is emitted.
    """
    require(np.isfinite(voltage), "voltage must be finite")
    check_nonnegative(beta, "beta")
    if abs(voltage) > envelope_vpp / 2.0:
        msg = (
            f"|voltage| = {abs(voltage):.6g} V exceeds the operating envelope "
            f"of +-{envelope_vpp / 2.0:.6g} V ({envelope_vpp:.6g} Vp-p equivalent)"
        )
        if enforce_envelope:
            raise ValidationError(msg)
        import warnings

        warnings.warn(msg, stacklevel=2)
    n = np.zeros(3)
    m = np.zeros(3)
    if stack.pzt_index is None:
        return n, m
    k = check_index(stack.pzt_index, len(stack.plies), "pzt_index")
    ply = stack.plies[k]
    field = voltage / ply.thickness
    d31_eff = ply.d31 * (1.0 + beta * abs(field))
    lam = d31_eff * field
    z = stack.z_interfaces()
    qbar = transformed_stiffness(ply)
    load = qbar @ _transformed_expansion(ply, lam, lam)
    n = load * (z[k + 1] - z[k])
    m = load * (z[k + 1] ** 2 - z[k] ** 2) / 2.0
    return n, m


_COND_LIMIT = 1e12


def solve_plate(stack, resultants):
    """Solve [A B; B D] [eps0; kappa] = [N; M] for the plate state."""
    n, m = resultants
    a, b, d = abd_matrix(stack)
    abd = np.block([[a, b], [b, d]])
    cond = np.linalg.cond(abd)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise NumericalError(
            f"ABD system is ill-conditioned (condition number {cond:.3e})"
        )
    x = np.linalg.solve(abd, np.concatenate([n, m]))
    return PlateState(eps0=x[:3], kappa=x[3:])


def cure_residual_state(stack, delta_t=DEFAULT_CURE_DELTA_T):
    """Mid-plane state left by cooling the cured laminate by ``delta_t``."""
    require(np.isfinite(delta_t), "delta_t must be finite")
    return solve_plate(stack, thermal_resultants(stack, delta_t))


def actuation_state(stack, voltage, beta=0.0,
                    envelope_vpp=DEFAULT_ENVELOPE_VPP, enforce_envelope=True):
    """Plate state from the piezoelectric load alone."""
    loads = piezo_thermal_load(
        stack, voltage, envelope_vpp=envelope_vpp,
        enforce_envelope=enforce_envelope, beta=beta,
    )
    return solve_plate(stack, loads)


def actuation_deflection(stack, vpp, beta=0.0,
                         envelope_vpp=DEFAULT_ENVELOPE_VPP,
                         enforce_envelope=True):
    """Peak-to-peak center deflection of the simply supported strip.

    The drive swings between +vpp/2 and -vpp/2; for a uniform-curvature
    strip the center rise is kappa_x * span^2 / 8, so the peak-to-peak
    deflection is |kappa_x(+V) - kappa_x(-V)| * span^2 / 8. Zero when no
    ply is powered.
    """
    check_nonnegative(vpp, "vpp")
    if vpp == 0.0:
        return 0.0
    amplitude = vpp / 2.0
    k_plus = actuation_state(
        stack, +amplitude, beta=beta, envelope_vpp=envelope_vpp,
        enforce_envelope=enforce_envelope,
    ).kappa[0]
    k_minus = actuation_state(
        stack, -amplitude, beta=beta, envelope_vpp=envelope_vpp,
        enforce_envelope=enforce_envelope,
    ).kappa[0]
    return abs(k_plus - k_minus) * stack.span ** 2 / 8.0
