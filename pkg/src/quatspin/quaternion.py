"""Quaternion algebra on the real 4x4 eta basis, with SU(2) and SO(3) views.

The multiplication convention is fixed by the basis relations

    eta_x eta_y = -eta_z   (and cyclic),    eta_k^2 = -eta_0,

which is the *opposite* handedness of the common Hamilton convention
(i j = +k).  Every map in this module (eta realization, SU(2) realization,
rotation matrix) is derived from that single convention; mixing in
Hamilton-convention formulas from elsewhere will silently flip signs.

A quaternion is stored as its coefficient 4-tuple (s0, sx, sy, sz); the
matrix realizations are derived views, never the source of truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Unit-norm tolerances: states built internally must satisfy the tight bound,
# user-supplied data is accepted up to the loose one.
UNIT_TOL_CONSTRUCT = 1e-12
UNIT_TOL_INPUT = 1e-9


class NonUnitAxis(ValueError):
    """Axis vector is not unit length within tolerance."""


class NonUnitQuaternion(ValueError):
    """Quaternion is not unit norm within tolerance."""


def _const(rows) -> np.ndarray:
    m = np.array(rows, dtype=float)
    m.flags.writeable = False
    return m


ETA_0 = _const([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
ETA_X = _const([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])
ETA_Y = _const([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]])
ETA_Z = _const([[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]])
ETA_BASIS = (ETA_0, ETA_X, ETA_Y, ETA_Z)

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.flags.writeable = False


@dataclass(frozen=True)
class Quaternion:
    """Real quaternion (s0, sx, sy, sz); doubles as a spin-1/2 state vector."""

    s0: float
    sx: float
    sy: float
    sz: float

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float)
        if a.shape != (4,):
            raise ValueError(f"expected 4 components, got shape {a.shape}")
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.s0, self.sx, self.sy, self.sz], dtype=float)

    def norm_sq(self) -> float:
        return self.s0 * self.s0 + self.sx * self.sx + self.sy * self.sy + self.sz * self.sz

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.s0, -self.sx, -self.sy, -self.sz)

    def normalized(self) -> "Quaternion":
        n = self.norm()
        if n == 0.0:
            raise NonUnitQuaternion("cannot normalize the zero quaternion")
        return Quaternion(self.s0 / n, self.sx / n, self.sy / n, self.sz / n)

    def is_unit(self, tol: float = UNIT_TOL_INPUT) -> bool:
        return abs(self.norm_sq() - 1.0) <= tol

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.s0, -self.sx, -self.sy, -self.sz)


IDENTITY = Quaternion(1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Spinor2:
    """Two complex spin amplitudes (up, down)."""

    up: complex
    down: complex

    def norm_sq(self) -> float:
        return abs(self.up) ** 2 + abs(self.down) ** 2


def quat_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Product a (x) b; identical to the matrix-vector action to_eta(a) @ b.

    Norm is multiplicative: |a (x) b| = |a| |b|.
    """
    return Quaternion(
        a.s0 * b.s0 - a.sx * b.sx - a.sy * b.sy - a.sz * b.sz,
        a.sx * b.s0 + a.s0 * b.sx + a.sz * b.sy - a.sy * b.sz,
        a.sy * b.s0 - a.sz * b.sx + a.s0 * b.sy + a.sx * b.sz,
        a.sz * b.s0 + a.sy * b.sx - a.sx * b.sy + a.s0 * b.sz,
    )


def to_eta(q: Quaternion) -> np.ndarray:
    """4x4 real realization s0*eta_0 + sx*eta_x + sy*eta_y + sz*eta_z.

    Ring homomorphism: to_eta(a (x) b) = to_eta(a) @ to_eta(b).  The first
    column of the result is the coefficient vector itself.
    """
    return q.s0 * ETA_0 + q.sx * ETA_X + q.sy * ETA_Y + q.sz * ETA_Z


def from_eta(m) -> Quaternion:
    """Read the unique coefficient quaternion back off an eta-span matrix."""
    m = np.asarray(m, dtype=float)
    return Quaternion(float(m[0, 0]), float(m[1, 0]), float(m[2, 0]), float(m[3, 0]))


def to_su2(q: Quaternion) -> np.ndarray:
    """2x2 complex realization s0*sigma_0 + i(sx*sigma_x + sy*sigma_y + sz*sigma_z).

    Group homomorphism onto SU(2) for unit quaternions; the double cover is
    visible as to_su2(rotation by 2 pi) = -identity.
    """
    return np.array(
        [
            [q.s0 + 1j * q.sz, q.sy + 1j * q.sx],
            [-q.sy + 1j * q.sx, q.s0 - 1j * q.sz],
        ],
        dtype=complex,
    )


def to_spinor(q: Quaternion) -> Spinor2:
    """Spinor view (up, down) = (s0 + i sz, i(sx + i sy)).

    |up|^2 = s0^2 + sz^2 and |down|^2 = sx^2 + sy^2, so the spinor norm
    equals the quaternion norm.  This is the first column of to_su2(q).
    """
    return Spinor2(complex(q.s0, q.sz), complex(-q.sy, q.sx))


def from_axis_angle(axis, xi: float) -> Quaternion:
    """Unit quaternion for precession angle xi about a unit axis.

    (cos(xi/2), axis * sin(xi/2)); the half angle makes a 2 pi turn land on
    -identity and a 4 pi turn on +identity.

    Raises NonUnitAxis if |axis| deviates from 1 by more than 1e-9.
    """
    b = np.asarray(axis, dtype=float)
    if b.shape != (3,):
        raise NonUnitAxis(f"axis must be a 3-vector, got shape {b.shape}")
    n = float(np.linalg.norm(b))
    if abs(n - 1.0) > UNIT_TOL_INPUT:
        raise NonUnitAxis(f"|axis| = {n!r} is not 1 within {UNIT_TOL_INPUT}")
    b = b / n
    half = 0.5 * xi
    s = math.sin(half)
    return Quaternion(math.cos(half), float(b[0]) * s, float(b[1]) * s, float(b[2]) * s)


def precession_angle(field, gamma: float, dtau: float) -> float:
    """Precession angle xi = -gamma * |field| * dtau accumulated over dtau >= 0."""
    if dtau < 0.0:
        raise ValueError("dtau must be non-negative")
    return -gamma * float(np.linalg.norm(np.asarray(field, dtype=float))) * dtau


def quat_to_rotation(q: Quaternion) -> np.ndarray:
    """SO(3) matrix acting on polarization vectors: R(q) P = vec(q (x) (0,P) (x) q*).

    Homomorphism R(a (x) b) = R(a) R(b); double cover R(q) = R(-q).  Note the
    antisymmetric part carries the sign opposite to the Hamilton-convention
    rotation matrix, matching the eta_x eta_y = -eta_z handedness.

    Raises NonUnitQuaternion if |q|^2 deviates from 1 by more than 1e-9.
    """
    if not q.is_unit(UNIT_TOL_INPUT):
        raise NonUnitQuaternion(f"|q|^2 = {q.norm_sq()!r} is not 1 within {UNIT_TOL_INPUT}")
    u0, ux, uy, uz = q.normalized().as_array()
    xx, yy, zz = ux * ux, uy * uy, uz * uz
    xy, yz, zx = ux * uy, uy * uz, uz * ux
    return np.array(
        [
            [1.0 - 2.0 * (yy + zz), 2.0 * (xy + u0 * uz), 2.0 * (zx - u0 * uy)],
            [2.0 * (xy - u0 * uz), 1.0 - 2.0 * (zz + xx), 2.0 * (yz + u0 * ux)],
            [2.0 * (zx + u0 * uy), 2.0 * (yz - u0 * ux), 1.0 - 2.0 * (xx + yy)],
        ]
    )
