"""Second-order forward-mode AD in two variables.

A Dual2 carries a value together with its gradient and Hessian with respect
to (u, v). Components are numpy arrays (or scalars), so one evaluation pass
handles a whole batch of parameter points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonFiniteError
from .expr import BinOp, Call, Expr, Neg, Num, Var, integer_exponent


@dataclass(frozen=True)
class Dual2:
    val: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    duu: np.ndarray
    duv: np.ndarray
    dvv: np.ndarray

    # only the upper triangle of the Hessian is stored, so it is symmetric by construction

    @classmethod
    def const(cls, c) -> "Dual2":
        z = 0.0
        return cls(np.float64(c), z, z, z, z, z)

    @classmethod
    def variables(cls, u, v) -> tuple["Dual2", "Dual2"]:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        z = np.zeros(np.broadcast(u, v).shape)
        one = np.ones_like(z)
        return cls(u + z, one, z, z, z, z), cls(v + z, z, one, z, z, z)

    @property
    def grad(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.du, self.dv), axis=-1)

    @property
    def hess(self) -> np.ndarray:
        a, b, c = np.broadcast_arrays(self.duu, self.duv, self.dvv)
        return np.stack([np.stack([a, b], -1), np.stack([b, c], -1)], -2)

    # chain rule for phi(self) given phi, phi', phi'' at self.val
    def _chain(self, f0, f1, f2) -> "Dual2":
        return Dual2(
            f0,
            f1 * self.du,
            f1 * self.dv,
            f2 * self.du * self.du + f1 * self.duu,
            f2 * self.du * self.dv + f1 * self.duv,
            f2 * self.dv * self.dv + f1 * self.dvv,
        )

    def __neg__(self):
        return Dual2(-self.val, -self.du, -self.dv, -self.duu, -self.duv, -self.dvv)

    def __add__(self, o):
        o = _lift(o)
        return Dual2(self.val + o.val, self.du + o.du, self.dv + o.dv,
                     self.duu + o.duu, self.duv + o.duv, self.dvv + o.dvv)

    __radd__ = __add__

    def __sub__(self, o):
        return self + (-_lift(o))

    def __rsub__(self, o):
        return _lift(o) - self

    def __mul__(self, o):
        o = _lift(o)
        a, b = self, o
        return Dual2(
            a.val * b.val,
            a.du * b.val + a.val * b.du,
            a.dv * b.val + a.val * b.dv,
            a.duu * b.val + 2 * a.du * b.du + a.val * b.duu,
            a.duv * b.val + a.du * b.dv + a.dv * b.du + a.val * b.duv,
            a.dvv * b.val + 2 * a.dv * b.dv + a.val * b.dvv,
        )

    __rmul__ = __mul__

    def reciprocal(self):
        x = self.val
        if np.any(x == 0):
            raise NonFiniteError("division by zero")
        return self._chain(1.0 / x, -1.0 / x**2, 2.0 / x**3)

    def __truediv__(self, o):
        return self * _lift(o).reciprocal()

    def __rtruediv__(self, o):
        return _lift(o) * self.reciprocal()

    def ipow(self, n: int) -> "Dual2":
        """Integer power by repeated squaring; exact for polynomials."""
        if n < 0:
            return self.ipow(-n).reciprocal()
        result = Dual2.const(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def sin(self):
        s, c = np.sin(self.val), np.cos(self.val)
        return self._chain(s, c, -s)

    def cos(self):
        s, c = np.sin(self.val), np.cos(self.val)
        return self._chain(c, -s, -c)

    def exp(self):
        e = np.exp(self.val)
        return self._chain(e, e, e)

    def log(self):
        x = self.val
        if np.any(x <= 0):
            raise NonFiniteError("log of a non-positive number")
        return self._chain(np.log(x), 1.0 / x, -1.0 / x**2)

    def sqrt(self):
        x = self.val
        if np.any(x <= 0):
            raise NonFiniteError("sqrt is not differentiable at non-positive arguments")
        r = np.sqrt(x)
        return self._chain(r, 0.5 / r, -0.25 / (r * x))


def _lift(x) -> Dual2:
    return x if isinstance(x, Dual2) else Dual2.const(x)


def atan2(y: Dual2, x: Dual2) -> Dual2:
    y, x = _lift(y), _lift(x)
    r2 = x.val**2 + y.val**2
    if np.any(r2 == 0):
        raise NonFiniteError("atan2(0, 0)")
    fy, fx = x.val / r2, -y.val / r2
    r4 = r2 * r2
    fyy = -2 * x.val * y.val / r4
    fxx = -fyy
    fxy = (y.val**2 - x.val**2) / r4
    return Dual2(
        np.arctan2(y.val, x.val),
        fy * y.du + fx * x.du,
        fy * y.dv + fx * x.dv,
        fyy * y.du * y.du + 2 * fxy * y.du * x.du + fxx * x.du * x.du + fy * y.duu + fx * x.duu,
        fyy * y.du * y.dv + fxy * (y.du * x.dv + x.du * y.dv) + fxx * x.du * x.dv
        + fy * y.duv + fx * x.duv,
        fyy * y.dv * y.dv + 2 * fxy * y.dv * x.dv + fxx * x.dv * x.dv + fy * y.dvv + fx * x.dvv,
    )


def eval_dual(node: Expr, u, v, cache=None) -> Dual2:
    """Evaluate ``node`` at the points (u, v) carrying exact second derivatives.

    ``cache`` may be shared between calls that use the same (u, v) so that
    common subtrees (e.g. the three coordinates of an inverted surface) are
    evaluated once.
    """
    du, dv = Dual2.variables(u, v)
    if cache is None:
        cache = {}

    def ev(n) -> Dual2:
        key = id(n)
        hit = cache.get(key)
        if hit is not None and hit[0] is n:
            return hit[1]
        if isinstance(n, Num):
            out = Dual2.const(n.value)
        elif isinstance(n, Var):
            out = du if n.name == "u" else dv
        elif isinstance(n, Neg):
            out = -ev(n.operand)
        elif isinstance(n, BinOp):
            a = ev(n.left)
            if n.op == "^":
                k = integer_exponent(n.right)
                if k is not None:
                    out = a.ipow(k)
                else:
                    if np.any(a.val <= 0):
                        raise NonFiniteError("non-integer power of a non-positive base")
                    out = (ev(n.right) * a.log()).exp()
            elif n.op == "+":
                out = a + ev(n.right)
            elif n.op == "-":
                out = a - ev(n.right)
            elif n.op == "*":
                out = a * ev(n.right)
            else:
                out = a / ev(n.right)
        elif isinstance(n, Call):
            args = [ev(x) for x in n.args]
            if n.func == "atan2":
                out = atan2(args[0], args[1])
            else:
                out = getattr(args[0], n.func)()
        else:
            raise TypeError(f"not an expression node: {n!r}")
        cache[key] = (n, out)
        return out

    with np.errstate(all="ignore"):
        out = ev(node)
    shape = np.broadcast(np.asarray(u), np.asarray(v)).shape
    fields = [np.broadcast_to(np.asarray(getattr(out, k), dtype=float), shape)
              for k in ("val", "du", "dv", "duu", "duv", "dvv")]
    for f in fields:
        if not np.all(np.isfinite(f)):
            raise NonFiniteError("non-finite value or derivative")
    return Dual2(*fields)
