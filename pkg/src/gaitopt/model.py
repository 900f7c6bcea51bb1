"""Single rigid body robot model and Newton-Euler dynamics.

The robot is one rigid body with mass-less legs.  Each leg applies a
contact force at its foot point.  Orientation uses ZYX Euler angles
stored as ``(yaw, pitch, roll)``; the angular velocity is expressed in
the body frame, everything else in the world frame.

Dynamics
--------
    f_total = sum_i f_i + m g
    tau_total = sum_i (p_i - p_b) x f_i          (world frame)
    p_ddot = f_total / m
    omega_dot = I^-1 (R^T tau_total - omega x I omega)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "LegSpec",
    "RobotModel",
    "BodyState",
    "SingularOrientationError",
    "rotation_from_euler",
    "euler_rate_matrix",
    "total_wrench",
    "accelerations",
    "load_robot",
    "builtin_robot",
    "BUILTIN_ROBOTS",
]

_GRAVITY_DEFAULT = (0.0, 0.0, -9.81)

# Pitch values closer than this to +/- pi/2 make the Euler-rate map singular.
_GIMBAL_MARGIN = 1e-6


class SingularOrientationError(ValueError):
    """Pitch within the gimbal-lock margin of +/- pi/2."""


def _as_vec3(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {np.shape(x)}")
    return v


@dataclass(frozen=True)
class LegSpec:
    """Geometry and force limit of one mass-less leg.

    Attributes
    ----------
    nominal_foot_body : (3,) array
        Nominal foot position in the body frame [m].
    kin_box_halfextents : (3,) array
        Half-extents of the reachable box around the nominal foot,
        body frame [m].
    f_normal_max : float
        Upper bound on the contact force along the terrain normal [N].
    """

    nominal_foot_body: np.ndarray
    kin_box_halfextents: np.ndarray
    f_normal_max: float

    def __post_init__(self):
        object.__setattr__(
            self, "nominal_foot_body", _as_vec3(self.nominal_foot_body, "nominal_foot_body")
        )
        he = _as_vec3(self.kin_box_halfextents, "kin_box_halfextents")
        if np.any(he <= 0):
            raise ValueError("kin_box_halfextents must be positive")
        object.__setattr__(self, "kin_box_halfextents", he)
        if self.f_normal_max <= 0:
            raise ValueError("f_normal_max must be positive")


@dataclass(frozen=True)
class RobotModel:
    """Single-rigid-body robot description.

    Attributes
    ----------
    name : str
    mass : float
        Body mass [kg].
    inertia : (3, 3) array
        Moment of inertia in the body frame [kg m^2]; symmetric
        positive-definite.
    legs : tuple of LegSpec
    gravity : (3,) array
        Gravity vector [m/s^2], default (0, 0, -9.81).
    """

    name: str
    mass: float
    inertia: np.ndarray
    legs: tuple
    gravity: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        inertia = np.asarray(self.inertia, dtype=float)
        if inertia.shape != (3, 3):
            raise ValueError("inertia must be a 3x3 matrix")
        if not np.allclose(inertia, inertia.T, atol=1e-12):
            raise ValueError("inertia must be symmetric")
        if np.any(np.linalg.eigvalsh(inertia) <= 0):
            raise ValueError("inertia must be positive-definite")
        object.__setattr__(self, "inertia", inertia)
        legs = tuple(self.legs)
        if len(legs) < 1:
            raise ValueError("robot needs at least one leg")
        object.__setattr__(self, "legs", legs)
        g = self.gravity if self.gravity is not None else _GRAVITY_DEFAULT
        object.__setattr__(self, "gravity", _as_vec3(g, "gravity"))

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    @property
    def inertia_inv(self) -> np.ndarray:
        return np.linalg.inv(self.inertia)

    @property
    def weight(self) -> float:
        """Magnitude of the gravity force on the body [N]."""
        return self.mass * float(np.linalg.norm(self.gravity))


@dataclass
class BodyState:
    """Body pose and twist: world-frame position/velocity, ZYX Euler
    angles ``(yaw, pitch, roll)``, body-frame angular velocity."""

    position: np.ndarray
    velocity: np.ndarray
    euler_zyx: np.ndarray
    angular_velocity_body: np.ndarray

    def __post_init__(self):
        self.position = _as_vec3(self.position, "position")
        self.velocity = _as_vec3(self.velocity, "velocity")
        self.euler_zyx = _as_vec3(self.euler_zyx, "euler_zyx")
        self.angular_velocity_body = _as_vec3(
            self.angular_velocity_body, "angular_velocity_body"
        )
        for v in (self.position, self.velocity, self.euler_zyx, self.angular_velocity_body):
            if not np.all(np.isfinite(v)):
                raise ValueError("BodyState entries must be finite")


# ---------------------------------------------------------------------------
# Rotations and Euler-rate kinematics (ZYX convention, angles = yaw/pitch/roll)
# ---------------------------------------------------------------------------


def rotation_from_euler(euler_zyx) -> np.ndarray:
    """World-from-body rotation ``R = Rz(yaw) Ry(pitch) Rx(roll)``."""
    return rotations_zyx(np.asarray(euler_zyx, dtype=float).reshape(1, 3))[0]


def euler_rate_matrix(euler_zyx) -> np.ndarray:
    """Map T with ``omega_body = T(angles) @ angles_dot``.

    Raises
    ------
    SingularOrientationError
        If pitch is within 1e-6 of +/- pi/2 (T is not invertible there).
    """
    e = np.asarray(euler_zyx, dtype=float).reshape(3)
    if abs(np.cos(e[1])) < _GIMBAL_MARGIN:
        raise SingularOrientationError(f"pitch {e[1]!r} is too close to +/- pi/2")
    return euler_rate_matrices(e.reshape(1, 3))[0]


def rotations_zyx(eulers: np.ndarray) -> np.ndarray:
    """Batched rotation matrices, ``eulers`` shaped (S, 3) -> (S, 3, 3)."""
    y, p, r = eulers[:, 0], eulers[:, 1], eulers[:, 2]
    cy, sy = np.cos(y), np.sin(y)
    cp, sp = np.cos(p), np.sin(p)
    cr, sr = np.cos(r), np.sin(r)
    R = np.empty((eulers.shape[0], 3, 3))
    R[:, 0, 0] = cy * cp
    R[:, 0, 1] = cy * sp * sr - sy * cr
    R[:, 0, 2] = cy * sp * cr + sy * sr
    R[:, 1, 0] = sy * cp
    R[:, 1, 1] = sy * sp * sr + cy * cr
    R[:, 1, 2] = sy * sp * cr - cy * sr
    R[:, 2, 0] = -sp
    R[:, 2, 1] = cp * sr
    R[:, 2, 2] = cp * cr
    return R


def rotation_partials_zyx(eulers: np.ndarray) -> np.ndarray:
    """Partial derivatives of the rotation matrix.

    Returns shape (3, S, 3, 3): leading axis is the angle (yaw, pitch,
    roll) the derivative is taken against.
    """
    S = eulers.shape[0]
    y, p, r = eulers[:, 0], eulers[:, 1], eulers[:, 2]
    cy, sy = np.cos(y), np.sin(y)
    cp, sp = np.cos(p), np.sin(p)
    cr, sr = np.cos(r), np.sin(r)
    out = np.zeros((3, S, 3, 3))
    # d/dyaw
    dy = out[0]
    dy[:, 0, 0] = -sy * cp
    dy[:, 0, 1] = -sy * sp * sr - cy * cr
    dy[:, 0, 2] = -sy * sp * cr + cy * sr
    dy[:, 1, 0] = cy * cp
    dy[:, 1, 1] = cy * sp * sr - sy * cr
    dy[:, 1, 2] = cy * sp * cr + sy * sr
    # d/dpitch
    dp = out[1]
    dp[:, 0, 0] = -cy * sp
    dp[:, 0, 1] = cy * cp * sr
    dp[:, 0, 2] = cy * cp * cr
    dp[:, 1, 0] = -sy * sp
    dp[:, 1, 1] = sy * cp * sr
    dp[:, 1, 2] = sy * cp * cr
    dp[:, 2, 0] = -cp
    dp[:, 2, 1] = -sp * sr
    dp[:, 2, 2] = -sp * cr
    # d/droll
    dr = out[2]
    dr[:, 0, 1] = cy * sp * cr + sy * sr
    dr[:, 0, 2] = -cy * sp * sr + sy * cr
    dr[:, 1, 1] = sy * sp * cr - cy * sr
    dr[:, 1, 2] = -sy * sp * sr - cy * cr
    dr[:, 2, 1] = cp * cr
    dr[:, 2, 2] = -cp * sr
    return out


def euler_rate_matrices(eulers: np.ndarray) -> np.ndarray:
    """Batched Euler-rate maps T, ``eulers`` shaped (S, 3) -> (S, 3, 3)."""
    S = eulers.shape[0]
    p, r = eulers[:, 1], eulers[:, 2]
    cp, sp = np.cos(p), np.sin(p)
    cr, sr = np.cos(r), np.sin(r)
    T = np.zeros((S, 3, 3))
    T[:, 0, 0] = -sp
    T[:, 0, 2] = 1.0
    T[:, 1, 0] = cp * sr
    T[:, 1, 1] = cr
    T[:, 2, 0] = cp * cr
    T[:, 2, 1] = -sr
    return T


def euler_rate_partials(eulers: np.ndarray) -> dict:
    """First and second partials of T against pitch ('p') and roll ('r').

    T does not depend on yaw.  Keys: 'p', 'r', 'pp', 'pr', 'rr'; each
    value is shaped (S, 3, 3).
    """
    S = eulers.shape[0]
    p, r = eulers[:, 1], eulers[:, 2]
    cp, sp = np.cos(p), np.sin(p)
    cr, sr = np.cos(r), np.sin(r)
    Tp = np.zeros((S, 3, 3))
    Tp[:, 0, 0] = -cp
    Tp[:, 1, 0] = -sp * sr
    Tp[:, 2, 0] = -sp * cr
    Tr = np.zeros((S, 3, 3))
    Tr[:, 1, 0] = cp * cr
    Tr[:, 1, 1] = -sr
    Tr[:, 2, 0] = -cp * sr
    Tr[:, 2, 1] = -cr
    Tpp = np.zeros((S, 3, 3))
    Tpp[:, 0, 0] = sp
    Tpp[:, 1, 0] = -cp * sr
    Tpp[:, 2, 0] = -cp * cr
    Tpr = np.zeros((S, 3, 3))
    Tpr[:, 1, 0] = -sp * cr
    Tpr[:, 2, 0] = sp * sr
    Trr = np.zeros((S, 3, 3))
    Trr[:, 1, 0] = -cp * sr
    Trr[:, 1, 1] = -cr
    Trr[:, 2, 0] = -cp * cr
    Trr[:, 2, 1] = sr
    return {"p": Tp, "r": Tr, "pp": Tpp, "pr": Tpr, "rr": Trr}


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix, batched: (..., 3) -> (..., 3, 3)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


# ---------------------------------------------------------------------------
# Newton-Euler dynamics
# ---------------------------------------------------------------------------


def total_wrench(model: RobotModel, body_pos, foot_positions, foot_forces):
    """Total force and torque on the body, world frame.

    ``f_total = sum_i f_i + m g`` and ``tau_total = sum_i (p_i - p_b) x f_i``.

    Raises
    ------
    ValueError
        If the number of foot positions or forces differs from the leg
        count.
    """
    p_b = _as_vec3(body_pos, "body_pos")
    feet = np.asarray(foot_positions, dtype=float)
    forces = np.asarray(foot_forces, dtype=float)
    if feet.shape != (model.n_legs, 3) or forces.shape != (model.n_legs, 3):
        raise ValueError(
            f"expected {model.n_legs} foot positions and forces, "
            f"got {feet.shape} and {forces.shape}"
        )
    f_total = forces.sum(axis=0) + model.mass * model.gravity
    tau_total = np.cross(feet - p_b, forces).sum(axis=0)
    return f_total, tau_total


def accelerations(model: RobotModel, state: BodyState, foot_positions, foot_forces):
    """Linear (world) and angular (body) acceleration from Newton-Euler."""
    f_total, tau_total = total_wrench(model, state.position, foot_positions, foot_forces)
    lin_acc = f_total / model.mass
    R = rotation_from_euler(state.euler_zyx)
    omega = state.angular_velocity_body
    I = model.inertia
    ang_acc = model.inertia_inv @ (R.T @ tau_total - np.cross(omega, I @ omega))
    return lin_acc, ang_acc


# ---------------------------------------------------------------------------
# Robot configuration files
# ---------------------------------------------------------------------------

BUILTIN_ROBOTS = ("quadruped", "biped", "hexapod")


def _robot_from_dict(data: dict) -> RobotModel:
    legs = tuple(
        LegSpec(
            nominal_foot_body=leg["nominal_foot_body"],
            kin_box_halfextents=leg["kin_box_halfextents"],
            f_normal_max=float(leg["f_normal_max"]),
        )
        for leg in data["legs"]
    )
    inertia = np.asarray(data["inertia"], dtype=float).reshape(3, 3)
    return RobotModel(
        name=data.get("name", "robot"),
        mass=float(data["mass"]),
        inertia=inertia,
        legs=legs,
        gravity=data.get("gravity", _GRAVITY_DEFAULT),
    )


def load_robot(path) -> RobotModel:
    """Load a robot from a JSON file (inertia given as 9 row-major numbers)."""
    with open(path) as fh:
        return _robot_from_dict(json.load(fh))


def builtin_robot(name: str) -> RobotModel:
    """One of the shipped robots: 'quadruped', 'biped' or 'hexapod'."""
    if name not in BUILTIN_ROBOTS:
        raise KeyError(f"unknown robot {name!r}, available: {BUILTIN_ROBOTS}")
    ref = resources.files("gaitopt") / "configs" / "robots" / f"{name}.json"
    return _robot_from_dict(json.loads(ref.read_text()))


def standing_height(model: RobotModel) -> float:
    """Body height with all feet at their nominal position on flat ground."""
    return -float(np.mean([leg.nominal_foot_body[2] for leg in model.legs]))
