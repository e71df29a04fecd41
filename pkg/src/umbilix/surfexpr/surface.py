"""Surface definitions, second-order jets, the built-in gallery and sphere inversion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DomainError, InputError, ParameterError, RankDeficiencyError
from . import expr as ex
from .dual import eval_dual
from .expr import Expr, Var, parse, to_source

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

KINDS = ("graph", "parametric", "builtin")
RANK_EPS = 1e-14


@dataclass(frozen=True)
class Domain:
    u_min: float
    u_max: float
    v_min: float
    v_max: float

    def __post_init__(self):
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise InputError(f"degenerate parameter domain {self}")

    def contains(self, u, v, tol=1e-12) -> np.ndarray:
        u = np.asarray(u)
        v = np.asarray(v)
        return ((u >= self.u_min - tol) & (u <= self.u_max + tol)
                & (v >= self.v_min - tol) & (v <= self.v_max + tol))

    def distance_to_boundary(self, u, v) -> float:
        return min(u - self.u_min, self.u_max - u, v - self.v_min, self.v_max - v)


@dataclass(frozen=True)
class SurfaceSpec:
    """A parametrized surface over a rectangle.

    ``exprs`` are the three coordinate functions. For graphs they are
    (u, v, f) and ``f`` is kept separately for reference. Built-in entries
    are ordinary graph/parametric specs that remember their gallery name.
    """

    kind: str
    exprs: tuple
    domain: Domain
    name: str = ""
    params: tuple = ()
    base_kind: str = "graph"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown surface kind {self.kind!r}")
        if len(self.exprs) != 3:
            raise InputError("a surface needs exactly three coordinate expressions")

    @property
    def graph_function(self) -> Expr | None:
        return self.exprs[2] if self.base_kind == "graph" else None

    @property
    def label(self) -> str:
        if self.name:
            if self.params:
                return f"{self.name}({','.join(_fmt_param(p) for p in self.params)})"
            return self.name
        return self.kind

    def sources(self) -> tuple[str, str, str]:
        return tuple(to_source(e) for e in self.exprs)

    def position(self, u, v) -> np.ndarray:
        """Plain float evaluation of the immersion, shape (..., 3)."""
        return np.stack([ex.evaluate(e, u, v) for e in self.exprs], axis=-1)


def _fmt_param(p) -> str:
    return str(int(p)) if float(p).is_integer() else repr(float(p))


def graph(f: Expr | str, domain: Domain, name: str = "", params=()) -> SurfaceSpec:
    if isinstance(f, str):
        f = parse(f)
    kind = "builtin" if name else "graph"
    return SurfaceSpec(kind, (Var("u"), Var("v"), f), domain, name, tuple(params), "graph")


def parametric(xyz, domain: Domain, name: str = "", params=()) -> SurfaceSpec:
    xyz = tuple(parse(e) if isinstance(e, str) else e for e in xyz)
    kind = "builtin" if name else "parametric"
    return SurfaceSpec(kind, xyz, domain, name, tuple(params), "parametric")


@dataclass(frozen=True)
class Jet2:
    """Position and first/second partials of an immersion; each array has shape (..., 3)."""

    X: np.ndarray
    Xu: np.ndarray
    Xv: np.ndarray
    Xuu: np.ndarray
    Xuv: np.ndarray
    Xvv: np.ndarray
    uv: tuple = field(default=(), repr=False)


def eval_jet2(spec: SurfaceSpec, u, v, check_domain=True, check_rank=True) -> Jet2:
    """Exact second-order jet of ``spec`` at parameter points (u, v)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if check_domain and not np.all(spec.domain.contains(u, v)):
        raise DomainError(f"evaluation point outside the domain of {spec.label}")
    cache: dict = {}
    duals = [eval_dual(e, u, v, cache) for e in spec.exprs]
    cols = {k: np.stack([getattr(d, k) for d in duals], axis=-1)
            for k in ("val", "du", "dv", "duu", "duv", "dvv")}
    jet = Jet2(cols["val"], cols["du"], cols["dv"], cols["duu"], cols["duv"], cols["dvv"], (u, v))
    if check_rank:
        E = np.sum(jet.Xu * jet.Xu, -1)
        F = np.sum(jet.Xu * jet.Xv, -1)
        G = np.sum(jet.Xv * jet.Xv, -1)
        if np.any(E * G - F * F <= RANK_EPS * np.maximum(E * G, 1e-300)):
            raise RankDeficiencyError(f"immersion {spec.label} is singular at an evaluated point")
    return jet


# --------------------------------------------------------------------------
# gallery

UNIT_SQUARE = Domain(-1.0, 1.0, -1.0, 1.0)
GALLERY = ("paraboloid", "saddle", "monkey_saddle", "re_zk", "sphere_patch", "plane", "catenoid")


def re_zk_source(k: int) -> str:
    """Re((u + i v)^k) expanded as a polynomial in u, v."""
    terms = []
    for j in range(0, k + 1, 2):
        coeff = math.comb(k, j) * (-1) ** (j // 2)
        parts = []
        if abs(coeff) != 1:
            parts.append(str(abs(coeff)))
        if k - j:
            parts.append("u" if k - j == 1 else f"u^{k - j}")
        if j:
            parts.append("v" if j == 1 else f"v^{j}")
        mono = "*".join(parts) or "1"
        sign = "-" if coeff < 0 else "+"
        terms.append((sign, mono))
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, mono in terms[1:]:
        out += f" {sign} {mono}"
    return out


def im_zk_source(k: int) -> str:
    """Im((u + i v)^k) expanded as a polynomial in u, v."""
    terms = []
    for j in range(1, k + 1, 2):
        coeff = math.comb(k, j) * (-1) ** ((j - 1) // 2)
        parts = []
        if abs(coeff) != 1:
            parts.append(str(abs(coeff)))
        if k - j:
            parts.append("u" if k - j == 1 else f"u^{k - j}")
        parts.append("v" if j == 1 else f"v^{j}")
        terms.append(("-" if coeff < 0 else "+", "*".join(parts)))
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, mono in terms[1:]:
        out += f" {sign} {mono}"
    return out


def builtin(name: str, params=()) -> SurfaceSpec:
    """Build a gallery surface by name."""
    params = tuple(float(p) for p in params)

    def nparams(lo, hi):
        if not lo <= len(params) <= hi:
            raise ParameterError(f"{name} takes {lo}..{hi} parameters, got {len(params)}")

    if name == "paraboloid":
        nparams(0, 0)
        return graph("(u^2 + v^2)/2", UNIT_SQUARE, name)
    if name == "saddle":
        nparams(0, 0)
        return graph("u^2 - v^2", UNIT_SQUARE, name)
    if name == "monkey_saddle":
        nparams(0, 0)
        return graph(re_zk_source(3), UNIT_SQUARE, name)
    if name == "re_zk":
        nparams(1, 1)
        k = params[0]
        if not float(k).is_integer() or k < 2:
            raise ParameterError(f"re_zk needs an integer k >= 2, got {_fmt_param(k)}")
        return graph(re_zk_source(int(k)), UNIT_SQUARE, name, (int(k),))
    if name == "sphere_patch":
        nparams(1, 1)
        rho = params[0]
        if rho <= 0:
            raise ParameterError(f"sphere_patch radius must be positive, got {rho}")
        r = repr(rho)
        half = rho / 2
        return graph(f"{r} - sqrt({r}^2 - u^2 - v^2)", Domain(-half, half, -half, half),
                     name, (rho,))
    if name == "plane":
        nparams(0, 2)
        su, sv = (list(params) + [0.0, 0.0])[:2]
        f = ex.add(ex.mul(ex.num(su), Var("u")), ex.mul(ex.num(sv), Var("v")))
        return graph(f, UNIT_SQUARE, name, params)
    if name == "catenoid":
        nparams(0, 1)
        c = params[0] if params else 1.0
        if c <= 0:
            raise ParameterError(f"catenoid scale must be positive, got {c}")
        cs = repr(c)
        ch = f"{cs}*(exp(v/{cs}) + exp(-v/{cs}))/2"
        return parametric((f"{ch}*cos(u)", f"{ch}*sin(u)", "v"),
                          Domain(-3.0, 3.0, -1.0, 1.0), name, params)
    raise ParameterError(f"unknown gallery surface {name!r}; choose from {', '.join(GALLERY)}")


# --------------------------------------------------------------------------
# sphere inversion


def _min_distance(spec, c, uu, vv, dist, rounds: int = 30) -> float:
    """Grid minimum of |X - c|, then refined on shrinking local grids."""
    d = spec.domain
    k = np.unravel_index(np.argmin(dist), dist.shape)
    u0, v0 = float(uu[k]), float(vv[k])
    hu = (d.u_max - d.u_min) / (uu.shape[1] - 1)
    hv = (d.v_max - d.v_min) / (uu.shape[0] - 1)
    best = float(dist[k])
    for _ in range(rounds):
        su = np.clip(np.linspace(u0 - hu, u0 + hu, 9), d.u_min, d.u_max)
        sv = np.clip(np.linspace(v0 - hv, v0 + hv, 9), d.v_min, d.v_max)
        gu, gv = np.meshgrid(su, sv)
        dd = np.linalg.norm(spec.position(gu, gv) - np.array(c), axis=-1)
        k = np.unravel_index(np.argmin(dd), dd.shape)
        u0, v0 = float(gu[k]), float(gv[k])
        best = min(best, float(dd[k]))
        hu, hv = hu / 4, hv / 4
    return best


def sphere_inversion(spec: SurfaceSpec, center, radius: float, check_samples: int = 64) -> SurfaceSpec:
    """Compose ``spec`` with p -> c + r^2 (p - c)/|p - c|^2 symbolically."""
    if radius <= 0:
        raise ParameterError("inversion radius must be positive")
    c = [float(x) for x in center]
    d = spec.domain
    uu, vv = np.meshgrid(np.linspace(d.u_min, d.u_max, check_samples),
                         np.linspace(d.v_min, d.v_max, check_samples))
    dist = np.linalg.norm(spec.position(uu, vv) - np.array(c), axis=-1)
    scale = max(1.0, float(np.max(dist)))
    if _min_distance(spec, c, uu, vv, dist) < 1e-3 * scale:
        raise DomainError("surface meets the inversion center within its domain")

    diff = [ex.sub(e, ex.num(ci)) for e, ci in zip(spec.exprs, c)]
    r2 = ex.add(*[ex.power(di, 2) for di in diff])
    k = ex.div(ex.num(radius * radius), r2)
    xyz = tuple(ex.add(ex.num(ci), ex.mul(k, di)) for ci, di in zip(c, diff))
    name = f"inv[{spec.label}]"
    return SurfaceSpec("parametric", xyz, spec.domain, name, (), "parametric")


# --------------------------------------------------------------------------
# surface definition files


def load_surface_file(path) -> SurfaceSpec:
    """Read a TOML surface definition with [surface] and [domain] sections."""
    try:
        data = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise InputError(f"cannot read surface file {path}: {exc}") from exc
    return surface_from_mapping(data)


def surface_from_mapping(data: dict) -> SurfaceSpec:
    surf = data.get("surface")
    if not isinstance(surf, dict):
        raise InputError("surface file needs a [surface] section")
    kind = surf.get("kind")
    if kind == "builtin":
        spec = builtin(surf.get("name", ""), surf.get("params", []))
        if "domain" in data:
            spec = _with_domain(spec, _read_domain(data["domain"]))
        return spec
    if "domain" not in data:
        raise InputError("surface file needs a [domain] section")
    dom = _read_domain(data["domain"])
    if kind == "graph":
        if "f" not in surf:
            raise InputError("graph surface needs f = \"<expr>\"")
        return graph(surf["f"], dom)
    if kind == "parametric":
        missing = [k for k in "xyz" if k not in surf]
        if missing:
            raise InputError(f"parametric surface missing {', '.join(missing)}")
        return parametric((surf["x"], surf["y"], surf["z"]), dom)
    raise InputError(f"unknown surface kind {kind!r}")


def _read_domain(d) -> Domain:
    try:
        (u0, u1), (v0, v1) = d["u"], d["v"]
        return Domain(float(u0), float(u1), float(v0), float(v1))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("domain needs u = [min, max] and v = [min, max]") from exc


def _with_domain(spec: SurfaceSpec, dom: Domain) -> SurfaceSpec:
    return SurfaceSpec(spec.kind, spec.exprs, dom, spec.name, spec.params, spec.base_kind)


def to_toml(spec: SurfaceSpec) -> str:
    d = spec.domain
    lines = ["[surface]"]
    if spec.base_kind == "graph":
        lines += ['kind = "graph"', f'f = "{to_source(spec.exprs[2])}"']
    else:
        lines.append('kind = "parametric"')
        lines += [f'{k} = "{to_source(e)}"' for k, e in zip("xyz", spec.exprs)]
    lines += ["", "[domain]", f"u = [{d.u_min!r}, {d.u_max!r}]", f"v = [{d.v_min!r}, {d.v_max!r}]"]
    return "\n".join(lines) + "\n"
