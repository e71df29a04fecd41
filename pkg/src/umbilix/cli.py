"""Command-line interface: ``umbilix {index,scan,verify,foliation}``.

Exit codes: 0 ok, 1 input error, 2 refinement did not converge,
3 degenerate loop / non-isolated umbilic / degenerate field, 4 an identity failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import geomcore, suites
from .errors import (
    AdmissibilityError,
    DegenerateLoopError,
    DomainError,
    InputError,
    NonConvergenceError,
    NonFiniteError,
    NonIsolatedUmbilicError,
    PreconditionError,
    RankDeficiencyError,
)
from .fieldindex import MIN_SAMPLES, LoopSpec, refine_until_stable
from .surfexpr import SurfaceSpec, builtin, load_surface_file

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGENT, EXIT_DEGENERATE, EXIT_IDENTITY = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    builtin: str | None = None
    params: list = field(default_factory=list)
    surface: str | None = None
    center: tuple = (0.0, 0.0)
    radius: float = 0.3
    samples: int = MIN_SAMPLES
    suite: str = "all"
    seed: int = 0
    grid: int = 64
    out: str | None = None
    timestamp: bool = True

    def __post_init__(self):
        if self.radius <= 0 or self.grid <= 0 or self.samples <= 0:
            raise InputError("numeric options must be positive")

    def load_surface(self) -> SurfaceSpec:
        if self.surface and self.builtin:
            raise InputError("give either --surface or --builtin, not both")
        if self.surface:
            return load_surface_file(self.surface)
        if self.builtin:
            return builtin(self.builtin, self.params)
        raise InputError("a surface is required (--builtin NAME or --surface FILE)")


# --------------------------------------------------------------------------
# CSV helpers


def _cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def csv_text(rows, columns, header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def _stamp(cfg: RunConfig, what: str) -> str | None:
    if not cfg.timestamp:
        return None
    now = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return f"umbilix {cfg.command} {what} generated {now}"


def _out_dir(cfg: RunConfig) -> Path | None:
    if cfg.out is None:
        return None
    p = Path(cfg.out)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {p}: {exc}") from exc
    return p


def _write(path: Path, text: str, append: bool = False):
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --------------------------------------------------------------------------
# commands

INDEX_COLUMNS = ["surface", "center_u", "center_v", "radius", "samples", "index", "index_num2"]


def cmd_index(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    spec = cfg.load_surface()
    loop = LoopSpec(tuple(cfg.center), cfg.radius, cfg.samples)
    if not loop.fits_in(spec.domain):
        raise InputError("loop leaves the surface domain")
    j, n = refine_until_stable(geomcore.traceless_field(spec), loop, "tensor")
    row = {"surface": spec.label, "center_u": float(cfg.center[0]),
           "center_v": float(cfg.center[1]), "radius": float(cfg.radius), "samples": n,
           "index": str(j), "index_num2": j.twice_value}
    out = _out_dir(cfg)
    if out is not None:
        path = out / "index.csv"
        if path.exists():
            _write(path, csv_text([row], INDEX_COLUMNS).split("\n", 1)[1], append=True)
        else:
            _write(path, csv_text([row], INDEX_COLUMNS, _stamp(cfg, spec.label)))
    stdout.write(csv_text([row], INDEX_COLUMNS))
    return EXIT_OK


SCAN_COLUMNS = ["u", "v", "residual", "isolation_radius", "index", "index_num2"]


def cmd_scan(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    spec = cfg.load_surface()
    found = geomcore.umbilic_scan(spec, max(cfg.grid, 16))
    rows = []
    for um in found:
        if um.isolation_radius <= 0:
            raise DegenerateLoopError(f"umbilic at ({um.u:g}, {um.v:g}) has no clean isolating circle")
        loop = LoopSpec((um.u, um.v), um.isolation_radius / 2)
        j, _ = refine_until_stable(geomcore.traceless_field(spec), loop, "tensor")
        rows.append({"u": um.u, "v": um.v, "residual": um.residual,
                     "isolation_radius": um.isolation_radius, "index": str(j),
                     "index_num2": j.twice_value})
    text = csv_text(rows, SCAN_COLUMNS)
    out = _out_dir(cfg)
    if out is not None:
        _write(out / "scan.csv", csv_text(rows, SCAN_COLUMNS, _stamp(cfg, spec.label)))
    stdout.write(text)
    return EXIT_OK


def suite_columns(rows) -> list:
    cols = ["case_id"]
    for r in rows:
        for k in r:
            if k not in cols and k != "holds":
                cols.append(k)
    return cols + ["holds"]


def cmd_verify(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout, stderr = stdout or sys.stdout, stderr or sys.stderr
    names = suites.SUITES if cfg.suite == "all" else (cfg.suite,)
    if any(n not in suites.RUNNERS for n in names):
        raise InputError(f"unknown suite {cfg.suite!r}; choose from {', '.join(suites.SUITES)}, all")
    out = _out_dir(cfg)
    summary = []
    failed = []
    for name in names:
        rows = suites.RUNNERS[name](cfg.seed)
        if out is not None:
            _write(out / f"verify_{name}.csv",
                   csv_text(rows, suite_columns(rows), _stamp(cfg, f"suite={name} seed={cfg.seed}")))
        bad = [r["case_id"] for r in rows if not r["holds"]]
        failed += bad
        summary.append({"suite": name, "cases": len(rows), "failures": len(bad)})
    if failed:
        for cid in failed:
            stderr.write(f"FAILED {cid}\n")
        return EXIT_IDENTITY
    stdout.write(csv_text(summary, ["suite", "cases", "failures"]))
    return EXIT_OK


FOLIATION_COLUMNS = ["u", "v", "dir_u", "dir_v", "family", "K", "H"]


def _coord_dirs(frame, w):
    d = frame.frame_to_coords(w)
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def _principal_coord_dirs(spec, u, v):
    _, frame, S = geomcore.geometry(spec, u, v)
    major = S.major_direction()
    minor = np.stack([-major[..., 1], major[..., 0]], axis=-1)
    return frame, S, _coord_dirs(frame, major), _coord_dirs(frame, minor)


def trace_streamlines(spec: SurfaceSpec, seeds_u, seeds_v, family: str, step: float,
                      n_steps: int, eps: float):
    """Fixed-step tracing of a principal line field in parameter space.

    The sign of each new direction is chosen to agree with the previous one,
    which is the doubled-angle continuity rule in direction form.
    """
    dom = spec.domain
    pick = 2 if family == "major" else 3
    lines = []
    for sign in (1.0, -1.0):
        pu, pv = np.array(seeds_u, float), np.array(seeds_v, float)
        prev = None
        active = np.ones(pu.shape, bool)
        path = [np.stack([pu, pv], -1)]
        for _ in range(n_steps):
            res = _principal_coord_dirs(spec, np.clip(pu, dom.u_min, dom.u_max),
                                        np.clip(pv, dom.v_min, dom.v_max))
            d = res[pick]
            mag = res[1].traceless.magnitude
            if prev is None:
                d = sign * d
            else:
                flip = np.sum(d * prev, -1) < 0
                d = np.where(flip[:, None], -d, d)
            active &= mag > eps
            nu, nv = pu + step * d[:, 0], pv + step * d[:, 1]
            active &= dom.contains(nu, nv, 0.0)
            pu, pv = np.where(active, nu, pu), np.where(active, nv, pv)
            prev = d
            path.append(np.stack([pu, pv], -1))
        lines.append(np.stack(path, 1))
    back, fwd = lines[1][:, ::-1], lines[0][:, 1:]
    return np.concatenate([back, fwd], axis=1)


def foliation_svg(spec: SurfaceSpec, polylines: dict, umbilics, comment: str | None,
                  size: int = 512) -> str:
    d = spec.domain
    sx = size / (d.u_max - d.u_min)
    sy = size / (d.v_max - d.v_min)

    def px(u, v):
        return (u - d.u_min) * sx, size - (v - d.v_min) * sy

    colors = {"major": "#1f4e9c", "minor": "#b8322a"}
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    if comment:
        out.append(f"<!-- {comment} -->")
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
               f'viewBox="0 0 {size} {size}">')
    out.append(f'<rect width="{size}" height="{size}" fill="white"/>')
    for fam, lines in polylines.items():
        out.append(f'<g fill="none" stroke="{colors[fam]}" stroke-width="0.8">')
        for line in lines:
            pts = []
            for u, v in line:
                x, y = px(u, v)
                pt = f"{x:.2f},{y:.2f}"
                if not pts or pts[-1] != pt:
                    pts.append(pt)
            if len(pts) > 1:
                out.append(f'<polyline points="{" ".join(pts)}"/>')
        out.append("</g>")
    for um in umbilics:
        x, y = px(um.u, um.v)
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_foliation(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if cfg.grid < 2:
        raise InputError("foliation grid must be at least 2x2")
    spec = cfg.load_surface()
    d = spec.domain
    n = cfg.grid
    uu, vv = np.meshgrid(np.linspace(d.u_min, d.u_max, n), np.linspace(d.v_min, d.v_max, n))
    u, v = uu.ravel(), vv.ravel()
    frame, S, major, minor = _principal_coord_dirs(spec, u, v)
    eps = geomcore.umbilic_threshold(spec)
    mag = S.traceless.magnitude
    if np.all(mag < eps):
        raise DegenerateLoopError(f"principal directions undefined on all of {spec.label} "
                                  "(traceless shape operator vanishes)")
    K, H = S.gauss_curvature, S.mean_curvature
    umb = mag < eps
    rows = []
    for fam, dirs in (("major", major), ("minor", minor)):
        for i in range(u.size):
            du, dv = (float("nan"), float("nan")) if umb[i] else dirs[i]
            rows.append({"u": u[i], "v": v[i], "dir_u": du, "dir_v": dv, "family": fam,
                         "K": K[i], "H": H[i]})

    seeds = max(4, n // 4)
    su, sv = np.meshgrid(np.linspace(d.u_min, d.u_max, seeds + 2)[1:-1],
                         np.linspace(d.v_min, d.v_max, seeds + 2)[1:-1])
    step = 0.25 * min(d.u_max - d.u_min, d.v_max - d.v_min) / seeds
    polylines = {fam: trace_streamlines(spec, su.ravel(), sv.ravel(), fam, step, 8, 1e3 * eps)
                 for fam in ("major", "minor")}
    try:
        umbilics = geomcore.umbilic_scan(spec)
    except NonIsolatedUmbilicError:
        umbilics = []

    out = _out_dir(cfg) or Path(".")
    _write(out / "foliation.csv", csv_text(rows, FOLIATION_COLUMNS, _stamp(cfg, spec.label)))
    _write(out / "foliation.svg", foliation_svg(spec, polylines, umbilics, _stamp(cfg, spec.label)))
    stdout.write(f"wrote {out / 'foliation.csv'} ({u.size} rows per family) and "
                 f"{out / 'foliation.svg'}\n")
    return EXIT_OK


COMMANDS = {"index": cmd_index, "scan": cmd_scan, "verify": cmd_verify, "foliation": cmd_foliation}


# --------------------------------------------------------------------------
# argument parsing


def _pair(text: str):
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected U,V, got {text!r}") from exc
    return a, b


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="umbilix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--builtin", metavar="NAME")
        p.add_argument("--param", action="append", type=float, default=[], metavar="P")
        p.add_argument("--surface", metavar="FILE")
        p.add_argument("--out", metavar="DIR")
        p.add_argument("--no-timestamp", action="store_true")

    p = sub.add_parser("index", help="principal-direction index around a loop")
    common(p)
    p.add_argument("--center", type=_pair, default=(0.0, 0.0), metavar="U,V")
    p.add_argument("--radius", type=float, default=0.3)
    p.add_argument("--samples", type=int, default=MIN_SAMPLES)

    p = sub.add_parser("scan", help="locate isolated umbilics")
    common(p)
    p.add_argument("--grid", type=int, default=32)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default="all", choices=list(suites.SUITES) + ["all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--no-timestamp", action="store_true")

    p = sub.add_parser("foliation", help="sample principal directions, write CSV and SVG")
    common(p)
    p.add_argument("--grid", type=int, default=64)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kw = {k: getattr(ns, k) for k in ("builtin", "surface", "center", "radius", "samples",
                                      "suite", "seed", "grid", "out") if hasattr(ns, k)}
    kw["params"] = getattr(ns, "param", [])
    return RunConfig(command=ns.command, timestamp=not ns.no_timestamp, **kw)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except Exception as exc:
        code = exit_code_for(exc)
        if code is None:
            raise
        sys.stderr.write(f"umbilix: error: {exc}\n")
        return code


def exit_code_for(exc: Exception) -> int | None:
    if isinstance(exc, NonConvergenceError):
        return EXIT_NONCONVERGENT
    if isinstance(exc, (DegenerateLoopError, NonIsolatedUmbilicError)):
        return EXIT_DEGENERATE
    if isinstance(exc, (InputError, DomainError, NonFiniteError, RankDeficiencyError,
                        AdmissibilityError, PreconditionError, ValueError)):
        return EXIT_INPUT
    return None


if __name__ == "__main__":
    sys.exit(main())
