"""Frames, fundamental forms, shape operator and umbilic search.

All functions are vectorized over leading array axes: a Jet2 evaluated at an
array of parameter points yields frames and tensors of matching shape.

Sign convention: the normal is Xu x Xv normalized (upward on graphs) and
L = <Xuu, normal>, so the paraboloid z = (u^2 + v^2)/2 has both principal
curvatures +1 at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonIsolatedUmbilicError, RankDeficiencyError
from .surfexpr.surface import RANK_EPS, Jet2, SurfaceSpec, eval_jet2

UMBILIC_REL_EPS = 1e-9


def _dot(a, b):
    return np.sum(a * b, axis=-1)


@dataclass(frozen=True)
class FrameData:
    e1: np.ndarray
    e2: np.ndarray
    normal: np.ndarray
    # coordinate-to-frame map: frame components of Xu and Xv are P[..., :, 0], P[..., :, 1]
    P: np.ndarray

    def to_ambient(self, w) -> np.ndarray:
        """Ambient 3-vector of frame components ``w`` (shape (..., 2))."""
        return w[..., :1] * self.e1 + w[..., 1:] * self.e2

    def to_frame(self, x) -> np.ndarray:
        return np.stack([_dot(x, self.e1), _dot(x, self.e2)], axis=-1)

    def coords_to_frame(self, d) -> np.ndarray:
        """Map coordinate components (du, dv) to frame components."""
        return np.einsum("...ij,...j->...i", self.P, d)

    def frame_to_coords(self, w) -> np.ndarray:
        return np.linalg.solve(self.P, w[..., None])[..., 0]


@dataclass(frozen=True)
class FundamentalForms:
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N: np.ndarray

    @property
    def gauss_curvature(self):
        return (self.L * self.N - self.M**2) / (self.E * self.G - self.F**2)


@dataclass(frozen=True)
class TracelessComponents:
    a: np.ndarray
    b: np.ndarray

    @property
    def magnitude(self):
        return np.hypot(self.a, self.b)

    def vector(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.a, self.b), axis=-1)


@dataclass(frozen=True)
class ShapeTensor:
    s11: np.ndarray
    s12: np.ndarray
    s22: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        a, b, c = np.broadcast_arrays(self.s11, self.s12, self.s22)
        return np.stack([np.stack([a, b], -1), np.stack([b, c], -1)], -2)

    @property
    def mean_curvature(self):
        return 0.5 * (self.s11 + self.s22)

    @property
    def gauss_curvature(self):
        return self.s11 * self.s22 - self.s12**2

    @property
    def traceless(self) -> TracelessComponents:
        return TracelessComponents(0.5 * (self.s11 - self.s22), self.s12)

    @property
    def principal_curvatures(self):
        # H +- |X| avoids the cancellation in sqrt(H^2 - K) near umbilics
        H = self.mean_curvature
        r = self.traceless.magnitude
        return H + r, H - r

    def apply(self, w) -> np.ndarray:
        """Apply the tensor to frame components ``w`` (shape (..., 2))."""
        return np.stack([self.s11 * w[..., 0] + self.s12 * w[..., 1],
                         self.s12 * w[..., 0] + self.s22 * w[..., 1]], axis=-1)

    def major_direction(self) -> np.ndarray:
        """Unit eigenvector for the larger principal curvature (sign is arbitrary)."""
        t = self.traceless
        half = 0.5 * np.arctan2(t.b, t.a)
        return np.stack([np.cos(half), np.sin(half)], axis=-1)


def frame_at(jet: Jet2) -> FrameData:
    Xu, Xv = jet.Xu, jet.Xv
    nu = np.linalg.norm(Xu, axis=-1)
    cross = np.cross(Xu, Xv)
    area = np.linalg.norm(cross, axis=-1)
    if np.any(nu == 0) or np.any(area**2 <= RANK_EPS * (nu**2 * _dot(Xv, Xv))):
        raise RankDeficiencyError("tangent vectors are (nearly) dependent")
    e1 = Xu / nu[..., None]
    beta = _dot(Xv, e1)
    w = Xv - beta[..., None] * e1
    gamma = np.linalg.norm(w, axis=-1)
    e2 = w / gamma[..., None]
    normal = cross / area[..., None]
    zero = np.zeros_like(nu)
    P = np.stack([np.stack([nu, beta], -1), np.stack([zero, gamma], -1)], -2)
    return FrameData(e1, e2, normal, P)


def fundamental_forms(jet: Jet2, frame: FrameData | None = None) -> FundamentalForms:
    frame = frame if frame is not None else frame_at(jet)
    n = frame.normal
    return FundamentalForms(
        _dot(jet.Xu, jet.Xu), _dot(jet.Xu, jet.Xv), _dot(jet.Xv, jet.Xv),
        _dot(jet.Xuu, n), _dot(jet.Xuv, n), _dot(jet.Xvv, n),
    )


def shape_operator(jet: Jet2, frame: FrameData | None = None):
    """Return (FundamentalForms, ShapeTensor, TracelessComponents) at each jet point.

    The shape operator matrix in the orthonormal frame is P^-T II P^-1 where
    II = [[L, M], [M, N]] and P is upper triangular, so the inverse is explicit.
    """
    frame = frame if frame is not None else frame_at(jet)
    ff = fundamental_forms(jet, frame)
    p11, p12, p22 = frame.P[..., 0, 0], frame.P[..., 0, 1], frame.P[..., 1, 1]
    # Q = P^-1 = [[1/p11, -p12/(p11 p22)], [0, 1/p22]]
    q11, q12, q22 = 1.0 / p11, -p12 / (p11 * p22), 1.0 / p22
    L, M, N = ff.L, ff.M, ff.N
    s11 = q11 * q11 * L
    s12 = q11 * (q12 * L + q22 * M)
    s22 = q12 * q12 * L + 2 * q12 * q22 * M + q22 * q22 * N
    S = ShapeTensor(s11, s12, s22)
    return ff, S, S.traceless


def geometry(spec: SurfaceSpec, u, v):
    """Convenience bundle: (jet, frame, shape tensor) at points (u, v)."""
    jet = eval_jet2(spec, u, v)
    frame = frame_at(jet)
    _, S, _ = shape_operator(jet, frame)
    return jet, frame, S


def traceless_field(spec: SurfaceSpec):
    """(u, v) -> (a, b) array of shape (..., 2): the field driving the principal-direction index."""

    def field(u, v):
        _, _, S = geometry(spec, u, v)
        return S.traceless.vector()

    return field


def tensor_field(spec: SurfaceSpec):
    """(u, v) -> ShapeTensor."""

    def field(u, v):
        return geometry(spec, u, v)[2]

    return field


# --------------------------------------------------------------------------
# umbilic search


@dataclass(frozen=True)
class Umbilic:
    u: float
    v: float
    residual: float
    isolation_radius: float


def _xmag(spec, u, v):
    return geometry(spec, u, v)[2].traceless.magnitude


def umbilic_threshold(spec: SurfaceSpec, samples: int = 64) -> float:
    d = spec.domain
    uu, vv = np.meshgrid(np.linspace(d.u_min, d.u_max, samples),
                         np.linspace(d.v_min, d.v_max, samples))
    return UMBILIC_REL_EPS * (1.0 + float(np.max(_xmag(spec, uu, vv))))


def _refine(spec, u0, v0, half, eps, tol=1e-8, floor=1e-14, n=7):
    d = spec.domain
    u, v = u0, v0
    best = float(_xmag(spec, u, v))
    while True:
        us = np.clip(np.linspace(u - half, u + half, n), d.u_min, d.u_max)
        vs = np.clip(np.linspace(v - half, v + half, n), d.v_min, d.v_max)
        uu, vv = np.meshgrid(us, vs)
        m = _xmag(spec, uu, vv)
        k = np.unravel_index(np.argmin(m), m.shape)
        u, v, best = float(uu[k]), float(vv[k]), float(m[k])
        half *= 0.5
        # keep shrinking past the nominal accuracy until the residual drops below eps
        if half < tol and (best < eps or half < floor):
            return u, v, best


def isolation_radius(spec: SurfaceSpec, u0: float, v0: float, eps: float,
                     others=(), samples: int = 256, levels: int = 12) -> float:
    """Largest tested circle radius about (u0, v0) on which |X| stays clear of zero.

    Radii tried are r_max, r_max/2, ...; r_max is 90% of the distance to the
    domain edge, capped at half the distance to any other umbilic.
    """
    r = 0.9 * spec.domain.distance_to_boundary(u0, v0)
    for (u1, v1) in others:
        dist = float(np.hypot(u1 - u0, v1 - v0))
        if dist > 0:
            r = min(r, 0.5 * dist)
    t = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    for _ in range(levels):
        if r <= 0:
            break
        m = _xmag(spec, u0 + r * np.cos(t), v0 + r * np.sin(t))
        if m.min() > eps and m.min() >= 1e-6 * m.max():
            return float(r)
        r *= 0.5
    return 0.0


def umbilic_scan(spec: SurfaceSpec, grid: int = 32) -> list[Umbilic]:
    """Locate isolated umbilics: grid minima of |X|, refined by shrinking grids."""
    if grid < 16:
        raise ValueError("umbilic_scan needs a grid of at least 16x16")
    d = spec.domain
    eps = umbilic_threshold(spec)
    us = np.linspace(d.u_min, d.u_max, grid)
    vs = np.linspace(d.v_min, d.v_max, grid)
    uu, vv = np.meshgrid(us, vs)
    m = _xmag(spec, uu, vv)

    small = m < eps
    full_cell = small[:-1, :-1] & small[1:, :-1] & small[:-1, 1:] & small[1:, 1:]
    if np.any(full_cell):
        raise NonIsolatedUmbilicError(f"non-isolated umbilic locus on {spec.label}")

    padded = np.pad(m, 1, constant_values=np.inf)
    is_min = np.ones_like(m, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                nb = padded[1 + di:1 + di + grid, 1 + dj:1 + dj + grid]
                is_min &= m <= nb
    step = max(us[1] - us[0], vs[1] - vs[0])
    found = []
    for i, j in zip(*np.nonzero(is_min)):
        u, v, res = _refine(spec, uu[i, j], vv[i, j], step, eps)
        if res >= eps:
            continue
        if any(np.hypot(u - f[0], v - f[1]) < 1e-6 for f in found):
            continue
        found.append((u, v, res))
    found.sort()
    out = []
    for u, v, res in found:
        others = [(f[0], f[1]) for f in found if (f[0], f[1]) != (u, v)]
        out.append(Umbilic(u, v, res, isolation_radius(spec, u, v, eps, others)))
    return out
