"""Winding numbers and half-integer indices along sampled circles.

Line fields are handled through their doubled-angle vector: a direction with
angle t (mod pi) becomes (cos 2t, sin 2t), a genuine vector field whose winding
is twice the line-field index. Every index is therefore an integer winding of
*some* vector field, and only the final halving distinguishes the three cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DegenerateLoopError, NonConvergenceError

MIN_SAMPLES = 256
MAX_SAMPLES = 2**20
STEP_BOUND = np.pi / 2
DEGENERACY_RATIO = 1e-6
SNAP_TOL = 1e-3  # in turns, i.e. 1e-3 * 2 pi radians

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, order=True)
class HalfIndex:
    """An element of (1/2)Z, stored as its integer double."""

    twice_value: int

    @classmethod
    def from_value(cls, x) -> "HalfIndex":
        f = Fraction(x) * 2
        if f.denominator != 1:
            raise ValueError(f"{x} is not a half-integer")
        return cls(int(f))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __add__(self, other):
        return HalfIndex(self.twice_value + other.twice_value)

    def __sub__(self, other):
        return HalfIndex(self.twice_value - other.twice_value)

    def __neg__(self):
        return HalfIndex(-self.twice_value)

    def __rmul__(self, k: int):
        return HalfIndex(k * self.twice_value)

    def __float__(self):
        return self.twice_value / 2

    def __str__(self):
        if self.twice_value % 2 == 0:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


@dataclass(frozen=True)
class LoopSpec:
    center: tuple
    radius: float
    samples: int = MIN_SAMPLES
    orientation: int = 1  # +1 counterclockwise in (u, v), -1 reversed

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("loop radius must be positive")
        n = self.samples
        if n < MIN_SAMPLES or n & (n - 1):
            raise ValueError(f"loop samples must be a power of two >= {MIN_SAMPLES}, got {n}")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def points(self, n: int | None = None):
        n = self.samples if n is None else n
        t = 2 * np.pi * np.arange(n) / n
        u0, v0 = self.center
        return u0 + self.radius * np.cos(t), v0 + self.orientation * self.radius * np.sin(t)

    def reversed(self) -> "LoopSpec":
        return LoopSpec(self.center, self.radius, self.samples, -self.orientation)

    def with_samples(self, n: int) -> "LoopSpec":
        return LoopSpec(self.center, self.radius, n, self.orientation)

    def fits_in(self, domain) -> bool:
        u0, v0 = self.center
        return domain.distance_to_boundary(u0, v0) >= self.radius


@dataclass(frozen=True)
class AngleTrack:
    theta: np.ndarray  # unwrapped, length N + 1 (closing sample repeated)
    deltas: np.ndarray

    @property
    def valid(self) -> bool:
        return bool(np.all(np.abs(self.deltas) < STEP_BOUND))

    @property
    def largest_step(self) -> float:
        return float(np.max(np.abs(self.deltas)))

    @property
    def total(self) -> float:
        return float(np.sum(self.deltas))


def angle_track(vectors: np.ndarray) -> AngleTrack:
    """Unwrap the angles of a closed cyclic sequence of 2-vectors."""
    ang = np.arctan2(vectors[:, 1], vectors[:, 0])
    closed = np.append(ang, ang[0])
    deltas = np.diff(closed)
    deltas = (deltas + np.pi) % (2 * np.pi) - np.pi
    theta = closed[0] + np.concatenate([[0.0], np.cumsum(deltas)])
    return AngleTrack(theta, deltas)


def check_nondegenerate(vectors: np.ndarray) -> None:
    mag = np.hypot(vectors[:, 0], vectors[:, 1])
    top = mag.max()
    if not np.isfinite(top) or top == 0 or mag.min() < DEGENERACY_RATIO * top:
        raise DegenerateLoopError(
            "field (nearly) vanishes on the loop: min/max magnitude "
            f"{(mag.min() / top) if top else 0.0:.3g} < {DEGENERACY_RATIO:g}"
        )


def snapped_winding(track: AngleTrack) -> int:
    turns = track.total / (2 * np.pi)
    k = int(round(turns))
    if abs(turns - k) >= SNAP_TOL:
        raise NonConvergenceError(
            f"winding {turns:.6f} turns is not within {SNAP_TOL} of an integer",
            track.largest_step)
    return k


def _winding_at(field: Field, loop: LoopSpec, n: int):
    vec = np.asarray(field(*loop.points(n)), dtype=float)
    check_nondegenerate(vec)
    track = angle_track(vec)
    if not track.valid:
        return None, track
    return snapped_winding(track), track


def stable_winding(field: Field, loop: LoopSpec) -> tuple[int, int]:
    """Integer winding of a vector field, doubling N until two consecutive N agree.

    Returns (winding, N) where N is the smaller resolution of the agreeing pair.
    """
    n = loop.samples
    prev = None
    largest = 0.0
    while n <= MAX_SAMPLES:
        w, track = _winding_at(field, loop, n)
        if w is None:
            largest = max(largest, track.largest_step)
        if w is not None and prev is not None and prev[0] == w:
            return w, prev[1]
        prev = (w, n) if w is not None else None
        n *= 2
    raise NonConvergenceError(
        f"no stable winding up to N={MAX_SAMPLES} samples (largest step {largest:.3g} rad)",
        largest)


def doubled(directions: np.ndarray) -> np.ndarray:
    """Doubled-angle vectors of unoriented directions, keeping the input magnitude."""
    z = directions[..., 0] + 1j * directions[..., 1]
    mag = np.abs(z)
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(mag > 0, z * z / np.where(mag > 0, mag, 1.0), 0.0)
    return np.stack([w.real, w.imag], axis=-1)


def refine_until_stable(field: Field, loop: LoopSpec, kind: str = "vector") -> tuple[HalfIndex, int]:
    """Index of ``field`` along ``loop`` together with the resolution that confirmed it.

    kind: "vector" (field gives vectors), "line" (field gives unoriented
    directions), or "tensor" (field gives traceless components (a, b)).
    """
    if kind == "vector":
        w, n = stable_winding(field, loop)
        return HalfIndex(2 * w), n
    if kind == "line":
        w, n = stable_winding(lambda u, v: doubled(np.asarray(field(u, v), dtype=float)), loop)
        return HalfIndex(w), n
    if kind == "tensor":
        w, n = stable_winding(field, loop)
        return HalfIndex(w), n
    raise ValueError(f"unknown field kind {kind!r}")


def winding_of_vector_field(field: Field, loop: LoopSpec) -> HalfIndex:
    return refine_until_stable(field, loop, "vector")[0]


def index_of_line_field(field: Field, loop: LoopSpec) -> HalfIndex:
    """Index of a line field given by (u, v) -> direction vectors of shape (..., 2)."""
    return refine_until_stable(field, loop, "line")[0]


def index_of_line_field_angles(angle: Callable, loop: LoopSpec) -> HalfIndex:
    """Same as index_of_line_field for a field given by its direction angle (mod pi)."""
    def field(u, v):
        t = np.asarray(angle(u, v), dtype=float)
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    return index_of_line_field(field, loop)


def index_of_tensor(traceless_field: Field, loop: LoopSpec) -> HalfIndex:
    """Eigen-direction index of a symmetric tensor from its traceless part (a, b).

    The normalized (a, b) is the doubled-angle vector of the major eigen-direction,
    so its winding is already twice the index.
    """
    return refine_until_stable(traceless_field, loop, "tensor")[0]
