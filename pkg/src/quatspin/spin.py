"""Spin-1/2 evolution in magnetic fields.

Covers stepwise propagation through a periodic magnetic structure (PMS) of
alternating bars and films, fixed-step integration of the precession ODE

    ds/dt = -(coupling / 2) * (eta . B(t)) s,

the closed-form solution for a helical (rotating transverse + constant
axial) field, polarization readout, and the resonance probability curves.

Everything works in phase units: fields enter only through angular rates
(coupling * B), so all parameters are plain radians and radians/time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quaternion import (
    ETA_X,
    ETA_Y,
    ETA_Z,
    IDENTITY,
    UNIT_TOL_INPUT,
    NonUnitQuaternion,
    Quaternion,
    quat_mul,
    quat_to_rotation,
)


class IndexOutOfRange(IndexError):
    """Block index outside 0..n_blocks-1."""


class NonUnitPolarization(ValueError):
    """Polarization vector is not unit length within tolerance."""


class InvalidTimeSpan(ValueError):
    """Integration span is empty or reversed, or the step is non-positive."""


class StepTooLarge(ValueError):
    """Integration step would rotate the spin by more than 0.5 rad."""


class DegenerateParams(ValueError):
    """Resonance width and detuning both vanish."""


class ZeroField(ValueError):
    """Helical field has neither transverse nor axial component."""


class EmptyRange(ValueError):
    """Sweep grid has fewer than two points."""


def _unit_polarization(p0) -> np.ndarray:
    p = np.asarray(p0, dtype=float)
    if p.shape != (3,):
        raise NonUnitPolarization(f"polarization must be a 3-vector, got shape {p.shape}")
    n = float(np.linalg.norm(p))
    if abs(n - 1.0) > UNIT_TOL_INPUT:
        raise NonUnitPolarization(f"|P| = {n!r} is not 1 within {UNIT_TOL_INPUT}")
    return p


@dataclass(frozen=True)
class PmsConfig:
    """Periodic magnetic structure: n_blocks pairs of (bar, film).

    xi1, xi2 are the precession phases picked up in one bar and one film;
    theta is the in-plane angle of the bar fields.  The geometry is resonant
    when 2 * n_blocks * theta = 2 pi.
    """

    n_blocks: int
    xi1: float
    xi2: float
    theta: float

    def __post_init__(self):
        if self.n_blocks < 0:
            raise ValueError("n_blocks must be >= 0")
        for name in ("xi1", "xi2", "theta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def is_resonant(self, tol: float = 1e-9) -> bool:
        return abs(2.0 * self.n_blocks * self.theta - 2.0 * math.pi) < tol


@dataclass(frozen=True)
class HelicalParams:
    """Resonance parameters: width gamma_width, detuning delta_detune, drive omega_drive."""

    gamma_width: float
    delta_detune: float
    omega_drive: float

    def __post_init__(self):
        for name in ("gamma_width", "delta_detune", "omega_drive"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.gamma_width < 0.0:
            raise ValueError("gamma_width must be >= 0")
        if self.gamma_width == 0.0 and self.delta_detune == 0.0:
            raise DegenerateParams("gamma_width and delta_detune cannot both vanish")

    @property
    def rabi_rate(self) -> float:
        return math.hypot(self.gamma_width, self.delta_detune)


@dataclass(frozen=True)
class HelicalFieldSpec:
    """Physical helical field: transverse amplitude b, axial bz, drive omega, gyromagnetic ratio."""

    b_transverse: float
    bz_axial: float
    omega_drive: float
    gyromagnetic: float

    @property
    def omega_star(self) -> float:
        """Larmor rate gyromagnetic * sqrt(bz^2 + b^2)."""
        return self.gyromagnetic * math.hypot(self.bz_axial, self.b_transverse)

    @property
    def apex_angle(self) -> float:
        """Cone apex angle of the total field, arctan(b / bz)."""
        return math.atan2(self.b_transverse, self.bz_axial)


@dataclass(frozen=True)
class SpinTrajectory:
    """Time-stamped sequence of unit spin states, optionally with arrow pairs.

    states has shape (n, 4); polar, when present, has shape (n, 2, 3) holding
    (P_n, P_n_mid) where P_n_mid is the arrow tip after the next bar.
    """

    times: np.ndarray
    states: np.ndarray
    polar: np.ndarray | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        if times.ndim != 1 or states.shape != (times.size, 4):
            raise ValueError("times must be (n,), states (n, 4)")
        if times.size > 1 and not np.all(np.diff(times) > 0.0):
            raise ValueError("times must be strictly increasing")
        norms = np.einsum("ij,ij->i", states, states)
        if norms.size and np.max(np.abs(norms - 1.0)) > UNIT_TOL_INPUT:
            raise ValueError("every state must be unit norm within 1e-9")
        if self.polar is not None:
            polar = np.asarray(self.polar, dtype=float)
            object.__setattr__(self, "polar", polar)
            if polar.shape != (times.size, 2, 3):
                raise ValueError("polar must have shape (n, 2, 3)")

    def __len__(self) -> int:
        return int(self.times.size)

    def state(self, i: int) -> Quaternion:
        return Quaternion.from_array(self.states[i])

    def polarization(self, p0) -> np.ndarray:
        """Rotate p0 by every stored state; returns an (n, 3) array."""
        p = _unit_polarization(p0)
        return np.array([quat_to_rotation(self.state(i)) @ p for i in range(len(self))])


# ---------------------------------------------------------------------------
# periodic magnetic structure


def pms_block_generators(cfg: PmsConfig, block_index: int) -> tuple[Quaternion, Quaternion]:
    """Unit quaternions (u1, u2) for the bar and film of one block.

    u1 precesses by xi1 about the in-plane bar direction (cos theta,
    sin theta, 0); u2 by xi2 about the film direction y.  Every block is
    identical: the bar angle theta is a fixed property of the structure, and
    the resonance tunes xi1 against it (xi1 = 2 theta closes the ring).
    """
    n_slots = max(cfg.n_blocks, 1)
    if not 0 <= block_index < n_slots:
        raise IndexOutOfRange(f"block_index {block_index} not in [0, {n_slots})")
    h1, h2 = 0.5 * cfg.xi1, 0.5 * cfg.xi2
    s1 = math.sin(h1)
    u1 = Quaternion(math.cos(h1), s1 * math.cos(cfg.theta), s1 * math.sin(cfg.theta), 0.0)
    u2 = Quaternion(math.cos(h2), 0.0, math.sin(h2), 0.0)
    return u1, u2


def pms_propagate(cfg: PmsConfig, p0) -> SpinTrajectory:
    """Stepwise chain P_n = (R2 R1)^n P0 with mid arrows P_n_mid = R1 P_n.

    Emits n = 0..n_blocks, i.e. n_blocks + 1 entries.  The propagating
    quaternion is composed per block as u2 (x) u1 (x) q, which realizes the
    same chain through the rotation homomorphism.
    """
    p = _unit_polarization(p0)
    u1, u2 = pms_block_generators(cfg, 0)
    q = IDENTITY
    times = np.arange(cfg.n_blocks + 1, dtype=float)
    states = np.empty((cfg.n_blocks + 1, 4))
    polar = np.empty((cfg.n_blocks + 1, 2, 3))
    for n in range(cfg.n_blocks + 1):
        states[n] = q.as_array()
        polar[n, 0] = quat_to_rotation(q) @ p
        polar[n, 1] = quat_to_rotation(quat_mul(u1, q)) @ p
        if n < cfg.n_blocks:
            q = quat_mul(u2, quat_mul(u1, q))
    return SpinTrajectory(times=times, states=states, polar=polar)


# ---------------------------------------------------------------------------
# precession ODE


def eta_dot_field(field) -> np.ndarray:
    """Antisymmetric 4x4 matrix Bx*eta_x + By*eta_y + Bz*eta_z."""
    b = np.asarray(field, dtype=float)
    return b[0] * ETA_X + b[1] * ETA_Y + b[2] * ETA_Z


def spin_ode_rhs(field, s: Quaternion, coupling: float) -> Quaternion:
    """ds/dt = -(coupling/2) (eta . field) s.

    The generator is antisymmetric, so <s, ds/dt> = 0 and the norm is
    conserved exactly.  coupling is the gyromagnetic ratio (or any caller
    supplied rate constant); the factor 1/2 is the spinor half angle.
    """
    ds = -0.5 * coupling * (eta_dot_field(field) @ s.as_array())
    return Quaternion.from_array(ds)


def _rhs(field_fn, t: float, s: np.ndarray, coupling: float) -> np.ndarray:
    return -0.5 * coupling * (eta_dot_field(field_fn(t)) @ s)


def integrate_spin(field_fn, s0: Quaternion, t_span, dt: float, coupling: float = 1.0) -> SpinTrajectory:
    """Classical 4th-order fixed-step integration of the precession ODE.

    field_fn maps time to a field 3-vector.  Steps are dt except for a final
    shorter one landing exactly on t_span[1]; every stored state is
    renormalized, which only removes round-off because the generator is
    antisymmetric.

    Raises InvalidTimeSpan for an empty span or non-positive dt, and
    StepTooLarge if any step would rotate the spin by more than 0.5 rad.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not (dt > 0.0) or not (t1 > t0):
        raise InvalidTimeSpan(f"need t1 > t0 and dt > 0, got span ({t0}, {t1}), dt {dt}")
    if not s0.is_unit(UNIT_TOL_INPUT):
        raise NonUnitQuaternion(f"initial state norm^2 = {s0.norm_sq()!r} is not 1 within {UNIT_TOL_INPUT}")

    n_steps = max(1, math.ceil((t1 - t0) / dt - 1e-12))
    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, 4))
    s = s0.normalized().as_array()
    t = t0
    times[0] = t
    states[0] = s
    for i in range(n_steps):
        h = min(dt, t1 - t)
        rate = float(np.linalg.norm(np.asarray(field_fn(t), dtype=float))) * abs(coupling)
        if h * rate > 0.5:
            raise StepTooLarge(f"dt * |coupling * B| = {h * rate!r} exceeds 0.5 rad at t = {t!r}")
        k1 = _rhs(field_fn, t, s, coupling)
        k2 = _rhs(field_fn, t + 0.5 * h, s + 0.5 * h * k1, coupling)
        k3 = _rhs(field_fn, t + 0.5 * h, s + 0.5 * h * k2, coupling)
        k4 = _rhs(field_fn, t + h, s + h * k3, coupling)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s = s / np.linalg.norm(s)
        t = t0 + (i + 1) * dt if i + 1 < n_steps else t1
        times[i + 1] = t
        states[i + 1] = s
    return SpinTrajectory(times=times, states=states)


# ---------------------------------------------------------------------------
# helical field and its closed form


def helical_field(params: HelicalParams, gamma: float = 1.0):
    """Field function whose ODE solution is exactly analytic_helical(params).

    Returns t -> (-(G/gamma) cos(w t), -(G/gamma) sin(w t), (w - D)/gamma)
    with G = gamma_width, D = delta_detune, w = omega_drive.  The negative
    transverse amplitude fixes the phase so that the closed form holds with
    a positive width; shifting the transverse phase by pi only changes where
    the rotating component points at t = 0.
    """
    if gamma == 0.0:
        raise ZeroField("gamma must be nonzero")
    bt = -params.gamma_width / gamma
    bz = (params.omega_drive - params.delta_detune) / gamma
    w = params.omega_drive

    def field(t: float) -> np.ndarray:
        return np.array([bt * math.cos(w * t), bt * math.sin(w * t), bz])

    return field


def analytic_helical(params: HelicalParams, t: float) -> Quaternion:
    """Closed-form unit state of the helical-field precession ODE at time t.

    With G = gamma_width, D = delta_detune, W = sqrt(G^2 + D^2):

        sx = (G/W) sin(W t/2) cos(w t/2)
        sy = (G/W) sin(W t/2) sin(w t/2)
        sz = (D/W) sin(W t/2) cos(w t/2) - cos(W t/2) sin(w t/2)
        s0 = (D/W) sin(W t/2) sin(w t/2) + cos(W t/2) cos(w t/2)

    Unit norm for all t by construction.
    """
    w_rabi = params.rabi_rate
    if w_rabi == 0.0:
        raise DegenerateParams("gamma_width and delta_detune cannot both vanish")
    g = params.gamma_width / w_rabi
    d = params.delta_detune / w_rabi
    sr, cr = math.sin(0.5 * w_rabi * t), math.cos(0.5 * w_rabi * t)
    sw, cw = math.sin(0.5 * params.omega_drive * t), math.cos(0.5 * params.omega_drive * t)
    return Quaternion(
        d * sr * sw + cr * cw,
        g * sr * cw,
        g * sr * sw,
        d * sr * cw - cr * sw,
    )


def helical_params_from_field(spec: HelicalFieldSpec) -> HelicalParams:
    """(Gamma, Delta) of the resonance from a physical field specification.

    Gamma = Omega* sin(theta) = gyromagnetic * b, and
    Delta = omega - Omega* cos(theta) = omega - gyromagnetic * bz.
    """
    if spec.b_transverse == 0.0 and spec.bz_axial == 0.0:
        raise ZeroField("need bz != 0 or b != 0")
    omega_star = spec.omega_star
    theta = spec.apex_angle
    return HelicalParams(
        gamma_width=omega_star * math.sin(theta),
        delta_detune=spec.omega_drive - omega_star * math.cos(theta),
        omega_drive=spec.omega_drive,
    )


def polarization_evolution(params: HelicalParams, sign: int, p0, t: float) -> np.ndarray:
    """Polarization P(t) = R(q) P(0) for the helical closed form.

    sign selects the branch applied to the state before the rotation
    readout: +1 uses the state as is; -1 uses its conjugate (the reversed
    rotation).  At exact resonance the +1 branch traces the helical ring

        P(t) = (-sin(G t) sin(w t), sin(G t) cos(w t), cos(G t))

    from the pole, while the -1 branch collapses onto the plain circle
    (0, -sin(G t), cos(G t)).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    p = _unit_polarization(p0)
    q = analytic_helical(params, t)
    if sign < 0:
        q = q.conjugate()
    return quat_to_rotation(q) @ p


# ---------------------------------------------------------------------------
# resonance probabilities


def spin_flip_probability(t_pass: float, gamma_width: float, delta_detune: float) -> float:
    """Probability of the spin-down state after passage time t_pass.

    G^2/(G^2 + D^2) * sin^2((t/2) sqrt(G^2 + D^2)); the degenerate case
    G = D = 0 is the continuous limit 0 (no field, no flip).
    """
    if t_pass < 0.0:
        raise ValueError("t_pass must be >= 0")
    w_sq = gamma_width * gamma_width + delta_detune * delta_detune
    if w_sq == 0.0:
        return 0.0
    w = math.sqrt(w_sq)
    amp = gamma_width * gamma_width / w_sq
    return amp * math.sin(0.5 * t_pass * w) ** 2


def spin_up_probability(t_pass: float, gamma_width: float, delta_detune: float) -> float:
    """Complementary spin-up probability; flip + up = 1 identically."""
    if t_pass < 0.0:
        raise ValueError("t_pass must be >= 0")
    w_sq = gamma_width * gamma_width + delta_detune * delta_detune
    if w_sq == 0.0:
        return 1.0
    w = math.sqrt(w_sq)
    g_sq = gamma_width * gamma_width / w_sq
    d_sq = delta_detune * delta_detune / w_sq
    return g_sq * math.cos(0.5 * t_pass * w) ** 2 + d_sq


def resonance_curve(
    gamma_width: float,
    delta_min: float,
    delta_max: float,
    n_points: int,
    t_pass: float,
) -> np.ndarray:
    """Rows (delta, p_down, p_up) on a uniform detuning grid.

    The curve is even in delta; at t_pass = pi / gamma_width the peak value
    at delta = 0 is exactly 1.
    """
    if n_points < 2:
        raise EmptyRange("n_points must be >= 2")
    if not delta_max > delta_min:
        raise EmptyRange("need delta_max > delta_min")
    deltas = np.linspace(delta_min, delta_max, n_points)
    rows = np.empty((n_points, 3))
    for i, d in enumerate(deltas):
        rows[i, 0] = d
        rows[i, 1] = spin_flip_probability(t_pass, gamma_width, d)
        rows[i, 2] = spin_up_probability(t_pass, gamma_width, d)
    return rows
