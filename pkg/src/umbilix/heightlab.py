"""Height functions f(x) = <x, a> on a surface and the index identity

    2 j(A) = j(grad h) + j(grad f),    h = |grad f|^2 / 2.

Tangent vectors are returned as components in the orthonormal frame of
geomcore.frame_at. Along the way: the metric gradient check used for the
critical-point index bound, and a sampling probe showing that h has no
extremum at the umbilic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geomcore
from .errors import AdmissibilityError
from .fieldindex import HalfIndex, LoopSpec, index_of_tensor, winding_of_vector_field
from .surfexpr import SurfaceSpec, eval_dual, evaluate
from .surfexpr.expr import Expr, parse
from .tensorlab import RiemannianPatch


@dataclass(frozen=True)
class HeightData:
    direction: np.ndarray
    base_point: tuple

    @classmethod
    def create(cls, spec: SurfaceSpec, a, base_point=(0.0, 0.0)) -> "HeightData":
        a = np.asarray(a, dtype=float)
        a = a / np.linalg.norm(a)
        hd = cls(a, tuple(float(x) for x in base_point))
        hd.cosines(spec, *hd.base_point)
        return hd

    @classmethod
    def default(cls, spec: SurfaceSpec, base_point=(0.0, 0.0), tilt_deg: float = 30.0,
                azimuth_deg: float = 0.0) -> "HeightData":
        """normal(q) tilted by ``tilt_deg`` towards e1 rotated by ``azimuth_deg`` about the normal."""
        _, frame, _ = geomcore.geometry(spec, *base_point)
        az = np.radians(azimuth_deg)
        t = np.cos(az) * frame.e1 + np.sin(az) * frame.e2
        tilt = np.radians(tilt_deg)
        return cls.create(spec, np.cos(tilt) * frame.normal + np.sin(tilt) * t, base_point)

    def cosines(self, spec: SurfaceSpec, u, v, frame=None) -> np.ndarray:
        """c(p) = <a, normal(p)>, enforcing 0 < c < 1."""
        if frame is None:
            frame = geomcore.geometry(spec, u, v)[1]
        c = np.sum(frame.normal * self.direction, axis=-1)
        if np.any(c <= 0) or np.any(c >= 1):
            raise AdmissibilityError(
                "height direction is not admissible here (need 0 < <a, normal> < 1); "
                "shrink the loop or choose another direction")
        return c


def grad_f(spec: SurfaceSpec, hd: HeightData, u, v) -> np.ndarray:
    """Frame components of grad f = a - <a, normal> normal."""
    _, frame, _ = geomcore.geometry(spec, u, v)
    hd.cosines(spec, u, v, frame)
    return frame.to_frame(np.broadcast_to(hd.direction, frame.e1.shape))


def grad_h(spec: SurfaceSpec, hd: HeightData, u, v) -> np.ndarray:
    """Frame components of grad h = <a, normal> A grad f."""
    _, frame, S = geomcore.geometry(spec, u, v)
    c = hd.cosines(spec, u, v, frame)
    gf = frame.to_frame(np.broadcast_to(hd.direction, frame.e1.shape))
    return c[..., None] * S.apply(gf)


def height_h(spec: SurfaceSpec, hd: HeightData, u, v) -> np.ndarray:
    """h = |grad f|^2 / 2 = sin^2(angle(a, normal)) / 2."""
    gf = grad_f(spec, hd, u, v)
    return 0.5 * np.sum(gf * gf, axis=-1)


@dataclass(frozen=True)
class ThirdIndexReport:
    surface: str
    direction: tuple
    radius: float
    jA: HalfIndex
    j_grad_h: HalfIndex
    j_grad_f: HalfIndex

    @property
    def holds(self) -> bool:
        return 2 * self.jA == self.j_grad_h + self.j_grad_f

    @property
    def grad_f_vanishes(self) -> bool:
        return self.j_grad_f == HalfIndex(0)


def verify_third_index(spec: SurfaceSpec, hd: HeightData, loop: LoopSpec) -> ThirdIndexReport:
    jA = index_of_tensor(geomcore.traceless_field(spec), loop)
    jh = winding_of_vector_field(lambda u, v: grad_h(spec, hd, u, v), loop)
    jf = winding_of_vector_field(lambda u, v: grad_f(spec, hd, u, v), loop)
    return ThirdIndexReport(spec.label, tuple(float(x) for x in hd.direction), loop.radius,
                            jA, jh, jf)


# --------------------------------------------------------------------------
# gradient index bound on an abstract patch


def metric_gradient(g: Expr, patch: RiemannianPatch, u, v) -> np.ndarray:
    """Frame components of the metric gradient of g: P^-T dg."""
    d = eval_dual(g, u, v)
    P = patch.frame_map(u, v)
    dg = np.stack(np.broadcast_arrays(d.du, d.dv), axis=-1)
    return np.linalg.solve(np.swapaxes(P, -1, -2), dg[..., None])[..., 0]


@dataclass(frozen=True)
class Lemma3Report:
    label: str
    index: HalfIndex
    extremum_class: str  # "min", "max" or "neither"

    @property
    def consistent(self) -> bool:
        one = HalfIndex(2)
        is_ext = self.extremum_class in ("min", "max")
        return self.index <= one and ((self.index == one) == is_ext)


def classify_critical_point(g: Expr, p0, radii, samples: int = 512) -> str:
    g0 = float(evaluate(g, *p0))
    t = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    above = below = False
    for r in radii:
        vals = evaluate(g, p0[0] + r * np.cos(t), p0[1] + r * np.sin(t))
        above |= bool(np.any(vals > g0))
        below |= bool(np.any(vals < g0))
    if above and not below:
        return "min"
    if below and not above:
        return "max"
    return "neither"


def lemma3_check(g, p0, loop: LoopSpec, patch: RiemannianPatch | None = None,
                 label: str = "") -> Lemma3Report:
    """Index of the metric gradient of g at the isolated critical point p0.

    The critical point is classified by sampling g on circles of radius
    r, r/2 and r/4 (r the loop radius).
    """
    g = parse(g) if isinstance(g, str) else g
    patch = patch or RiemannianPatch.euclidean()
    idx = winding_of_vector_field(lambda u, v: metric_gradient(g, patch, u, v), loop)
    r = loop.radius
    cls = classify_critical_point(g, p0, (r, r / 2, r / 4))
    return Lemma3Report(label, idx, cls)


# --------------------------------------------------------------------------
# no-extremum probe


@dataclass(frozen=True)
class ProbeReport:
    surface: str
    radii: tuple
    passes: tuple  # per radius: True / False
    applicable: bool

    @property
    def all_pass(self) -> bool:
        return self.applicable and all(self.passes)


def extremum_probe(spec: SurfaceSpec, hd: HeightData, radii, samples: int = 1024,
                   tol: float = 1e-12) -> ProbeReport:
    """Check min < h(q) < max of h on circles around q, strictly beyond ``tol``.

    If h is constant on every circle (e.g. a plane), the probe is flagged as
    not applicable instead of failing.
    """
    q = hd.base_point
    hq = float(height_h(spec, hd, *q))
    t = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    passes = []
    flat = True
    for r in radii:
        h = height_h(spec, hd, q[0] + r * np.cos(t), q[1] + r * np.sin(t))
        flat &= bool(np.all(np.abs(h - hq) <= tol))
        passes.append(bool(h.min() < hq - tol and h.max() > hq + tol))
    return ProbeReport(spec.label, tuple(radii), tuple(passes), not flat)


__all__ = [
    "HeightData", "Lemma3Report", "ProbeReport", "ThirdIndexReport",
    "classify_critical_point", "extremum_probe", "grad_f", "grad_h", "height_h",
    "lemma3_check", "metric_gradient", "verify_third_index",
]
