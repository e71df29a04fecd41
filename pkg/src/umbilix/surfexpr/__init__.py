"""Surface expressions: parser, second-order AD, gallery and sphere inversion."""

from .dual import Dual2, eval_dual
from .expr import BinOp, Call, Expr, Neg, Num, Var, evaluate, parse, to_source
from .surface import (
    GALLERY,
    Domain,
    Jet2,
    SurfaceSpec,
    builtin,
    eval_jet2,
    graph,
    im_zk_source,
    load_surface_file,
    parametric,
    re_zk_source,
    sphere_inversion,
    surface_from_mapping,
    to_toml,
)

__all__ = [
    "BinOp", "Call", "Domain", "Dual2", "Expr", "GALLERY", "Jet2", "Neg", "Num",
    "SurfaceSpec", "Var", "builtin", "eval_dual", "eval_jet2", "evaluate", "graph",
    "im_zk_source", "load_surface_file", "parametric", "parse", "re_zk_source",
    "sphere_inversion", "surface_from_mapping", "to_source", "to_toml",
]
