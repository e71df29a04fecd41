"""Symmetric (1,1) tensors on Riemannian patches and the index formula

    2 j(A) = j(B xi) + j(xi),    B = A - (tr A / 2) I,

checked for arbitrary continuous test line fields xi.

Tensor components always live in an orthonormal frame. Patches supply the
coordinate-to-frame map P (upper triangular, P^T P = metric), which is how
coordinate-defined test fields are carried into that frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import geomcore
from .errors import DegenerateLoopError, PreconditionError, RankDeficiencyError
from .fieldindex import HalfIndex, LoopSpec, index_of_line_field, index_of_tensor
from .surfexpr import Domain, SurfaceSpec, evaluate, parse
from .surfexpr.expr import Expr


def _as_expr(e) -> Expr:
    return parse(e) if isinstance(e, str) else e


@dataclass(frozen=True)
class RiemannianPatch:
    g11: Expr
    g12: Expr
    g22: Expr
    domain: Domain = Domain(-1.0, 1.0, -1.0, 1.0)

    @classmethod
    def euclidean(cls, domain: Domain | None = None) -> "RiemannianPatch":
        return cls.from_sources("1", "0", "1", domain)

    @classmethod
    def from_sources(cls, g11, g12, g22, domain: Domain | None = None) -> "RiemannianPatch":
        return cls(_as_expr(g11), _as_expr(g12), _as_expr(g22),
                   domain or Domain(-1.0, 1.0, -1.0, 1.0))

    def metric(self, u, v):
        g11, g12, g22 = (evaluate(e, u, v) for e in (self.g11, self.g12, self.g22))
        if np.any(g11 <= 0) or np.any(g11 * g22 - g12**2 <= 0):
            raise RankDeficiencyError("metric is not positive definite at an evaluated point")
        return g11, g12, g22

    def frame_map(self, u, v) -> np.ndarray:
        """Upper-triangular P with P^T P = g (Gram-Schmidt on the coordinate frame)."""
        g11, g12, g22 = self.metric(u, v)
        p11 = np.sqrt(g11)
        p12 = g12 / p11
        p22 = np.sqrt((g11 * g22 - g12**2) / g11)
        zero = np.zeros_like(p11)
        return np.stack([np.stack([p11, p12], -1), np.stack([zero, p22], -1)], -2)


class SurfacePatch:
    """The induced metric of a surface, exposed through the same frame_map interface."""

    def __init__(self, spec: SurfaceSpec):
        self.spec = spec
        self.domain = spec.domain

    def frame_map(self, u, v) -> np.ndarray:
        return geomcore.geometry(self.spec, u, v)[1].P


@dataclass(frozen=True)
class SymTensorField:
    """Components (a11, a12, a22) of A in the patch's orthonormal frame."""

    components: Callable  # (u, v) -> (a11, a12, a22)
    patch: object
    singular_point: tuple = (0.0, 0.0)
    label: str = ""

    @classmethod
    def from_exprs(cls, patch, a11, a12, a22, singular_point=(0.0, 0.0), label=""):
        e11, e12, e22 = (_as_expr(e) for e in (a11, a12, a22))

        def components(u, v):
            return evaluate(e11, u, v), evaluate(e12, u, v), evaluate(e22, u, v)

        return cls(components, patch, tuple(singular_point), label)

    @classmethod
    def from_surface(cls, spec: SurfaceSpec, singular_point=(0.0, 0.0)):
        """The shape operator of ``spec``."""

        def components(u, v):
            S = geomcore.geometry(spec, u, v)[2]
            return S.s11, S.s12, S.s22

        return cls(components, SurfacePatch(spec), tuple(singular_point), spec.label)

    def scaled(self, c: float) -> "SymTensorField":
        comp = self.components
        return SymTensorField(lambda u, v: tuple(c * x for x in comp(u, v)),
                              self.patch, self.singular_point, f"{c}*{self.label}")

    def eigenvalues(self, u, v):
        a11, a12, a22 = self.components(u, v)
        h = 0.5 * (a11 + a22)
        r = np.hypot(0.5 * (a11 - a22), a12)
        return h + r, h - r


def traceless_part(A: SymTensorField) -> Callable:
    """(u, v) -> (a, b) with B = A - (tr A / 2) I = [[a, b], [b, -a]]."""

    def field(u, v):
        a11, a12, a22 = A.components(u, v)
        a11, a12, a22 = np.broadcast_arrays(a11, a12, a22)
        return np.stack([0.5 * (a11 - a22), a12], axis=-1)

    return field


def traceless_matrix(A: SymTensorField, u, v) -> np.ndarray:
    a, b = np.moveaxis(traceless_part(A)(u, v), -1, 0)
    return np.stack([np.stack([a, b], -1), np.stack([b, -a], -1)], -2)


# --------------------------------------------------------------------------
# test line fields, stored by their doubled-angle vector in the orthonormal frame


@dataclass(frozen=True)
class TestLineField:
    doubled: Callable  # (u, v) -> (..., 2) doubled-angle vectors in frame components
    label: str = ""

    __test__ = False  # not a pytest class

    def directions(self, u, v) -> np.ndarray:
        """One representative unit direction per point (its sign is not continuous)."""
        w = np.asarray(self.doubled(u, v))
        half = 0.5 * np.arctan2(w[..., 1], w[..., 0])
        return np.stack([np.cos(half), np.sin(half)], axis=-1)

    @classmethod
    def from_coordinate_directions(cls, patch, direction: Callable, label="") -> "TestLineField":
        """Line field given by (u, v) -> coordinate direction (du, dv), any sign."""

        def dbl(u, v):
            d = np.asarray(direction(u, v), dtype=float)
            w = np.einsum("...ij,...j->...i", patch.frame_map(u, v), d)
            z = w[..., 0] + 1j * w[..., 1]
            z = z * z / np.abs(z)
            return np.stack([z.real, z.imag], axis=-1)

        return cls(dbl, label)

    @classmethod
    def constant(cls, patch, angle: float = 0.0) -> "TestLineField":
        c, s = np.cos(angle), np.sin(angle)

        def direction(u, v):
            u = np.asarray(u, dtype=float)
            return np.stack(np.broadcast_arrays(c + 0 * u, s + 0 * u), axis=-1)

        return cls.from_coordinate_directions(patch, direction, f"constant({angle:g})")

    @classmethod
    def polar_power(cls, patch, m: int, center=(0.0, 0.0)) -> "TestLineField":
        """Doubled angle equals m times the polar angle about ``center``; index m/2.

        Odd m gives an unorientable line field.
        """
        u0, v0 = center

        def direction(u, v):
            phi = np.arctan2(np.asarray(v) - v0, np.asarray(u) - u0)
            return np.stack([np.cos(0.5 * m * phi), np.sin(0.5 * m * phi)], axis=-1)

        return cls.from_coordinate_directions(patch, direction, f"polar({m})")

    @classmethod
    def eigenfield(cls, A: SymTensorField) -> "TestLineField":
        """The major eigen-direction field D_lambda of A."""
        tl = traceless_part(A)
        return cls(tl, f"eigen[{A.label}]")

    @classmethod
    def from_exprs(cls, patch, du, dv) -> "TestLineField":
        eu, ev = _as_expr(du), _as_expr(dv)

        def direction(u, v):
            return np.stack([evaluate(eu, u, v), evaluate(ev, u, v)], axis=-1)

        return cls.from_coordinate_directions(patch, direction, "exprs")


def apply_to_linefield(B: Callable, xi: TestLineField) -> TestLineField:
    """The line field B xi, from the closed form angle(B xi) = 2 theta - phi.

    With 2 theta = arg(a + ib) and xi's doubled angle 2 phi, the doubled angle of
    B xi is 4 theta - 2 phi, i.e. the argument of (a + ib)^2 * conj(w_xi).
    """

    def dbl(u, v):
        ab = np.asarray(B(u, v))
        z = ab[..., 0] + 1j * ab[..., 1]
        if np.any(z == 0):
            raise DegenerateLoopError("traceless part vanishes at an evaluation point")
        w = np.asarray(xi.doubled(u, v))
        w = w[..., 0] + 1j * w[..., 1]
        r = (z / np.abs(z)) ** 2 * np.conj(w)
        return np.stack([r.real, r.imag], axis=-1)

    return TestLineField(dbl, f"B[{xi.label}]")


def matrix_applied_directions(M: Callable, xi: TestLineField) -> Callable:
    """(u, v) -> M(u, v) @ Z for a representative direction Z of xi.

    Only the direction mod pi of the result is meaningful.
    """

    def field(u, v):
        Z = xi.directions(u, v)
        return np.einsum("...ij,...j->...i", M(u, v), Z)

    return field


@dataclass(frozen=True)
class IndexFormulaReport:
    case_id: str
    jA: HalfIndex
    jBxi: HalfIndex
    jxi: HalfIndex
    jBxi_matrix: HalfIndex

    @property
    def holds(self) -> bool:
        return 2 * self.jA == self.jBxi + self.jxi and self.jBxi == self.jBxi_matrix


def verify_index_formula(A: SymTensorField, xi: TestLineField, loop: LoopSpec,
                         case_id: str = "") -> IndexFormulaReport:
    """Compute j(A), j(B xi), j(xi) and compare 2 j(A) with j(B xi) + j(xi) exactly.

    j(B xi) is computed twice: from the closed-form angle rule and from
    explicit matrix products, as an independent cross-check.
    """
    B = traceless_part(A)
    jA = index_of_tensor(B, loop)
    jxi = index_of_line_field(lambda u, v: xi.directions(u, v), loop)
    Bxi = apply_to_linefield(B, xi)
    jBxi = index_of_line_field(lambda u, v: Bxi.directions(u, v), loop)
    jBxi_m = index_of_line_field(
        matrix_applied_directions(lambda u, v: traceless_matrix(A, u, v), xi), loop)
    return IndexFormulaReport(case_id or f"{A.label}|{xi.label}|r={loop.radius:g}",
                              jA, jBxi, jxi, jBxi_m)


@dataclass(frozen=True)
class HomotopyReport:
    min_abs_entry: float
    t_values: tuple
    indices: tuple  # j((A - t/2 tr A I) eta) for each t
    j_A_eta: HalfIndex
    j_B_eta: HalfIndex

    @property
    def invertible(self) -> bool:
        return self.min_abs_entry > 0

    @property
    def holds(self) -> bool:
        return self.invertible and self.j_A_eta == self.j_B_eta and len(set(self.indices)) == 1


def homotopy_entries(lam, mu, t):
    """Diagonal entries of A - (t/2)(tr A) I in an eigenbasis."""
    return lam * (1 - t / 2) - mu * t / 2, mu * (1 - t / 2) - lam * t / 2


def homotopy_invertibility(A: SymTensorField, loop: LoopSpec, steps: int = 11,
                           eta: TestLineField | None = None) -> HomotopyReport:
    """Check A - (t/2)(tr A) I stays invertible on the loop for t in [0, 1].

    Requires lambda > 0 > mu at every loop sample. As a corollary the index of
    (A - t/2 tr A I) eta is computed for every t; it must not change.
    """
    u, v = loop.points()
    lam, mu = A.eigenvalues(u, v)
    if not (np.all(lam > 0) and np.all(mu < 0)):
        raise PreconditionError("homotopy check needs lambda > 0 > mu on the whole loop")
    ts = np.linspace(0.0, 1.0, steps)
    min_entry = np.inf
    for t in ts:
        d1, d2 = homotopy_entries(lam, mu, t)
        min_entry = min(min_entry, float(np.min(np.abs(d1))), float(np.min(np.abs(d2))))

    eta = eta if eta is not None else TestLineField.constant(A.patch)

    def deformed(t):
        def M(uu, vv):
            a11, a12, a22 = np.broadcast_arrays(*A.components(uu, vv))
            h = 0.5 * t * (a11 + a22)
            return np.stack([np.stack([a11 - h, a12], -1), np.stack([a12, a22 - h], -1)], -2)
        return M

    indices = tuple(index_of_line_field(matrix_applied_directions(deformed(t), eta), loop)
                    for t in ts)
    j_B_eta = index_of_line_field(
        lambda uu, vv: apply_to_linefield(traceless_part(A), eta).directions(uu, vv), loop)
    return HomotopyReport(min_entry, tuple(float(t) for t in ts), indices, indices[0], j_B_eta)
