"""Pointwise numerical checks shared by the unit tests and the acceptance gate.

Each function returns the worst error it saw so callers can both assert and
report it.
"""

import numpy as np

import oracles
from umbilix.geomcore import geometry
from umbilix.heightlab import grad_f, grad_h, height_h
from umbilix.surfexpr import eval_jet2

AD_SMALL = 1e-3  # below this magnitude, AD/FD entries are compared absolutely
AD_ABS = 1e-8


def sample_domain(spec, rng, n, margin=0.05):
    d = spec.domain
    mu = margin * (d.u_max - d.u_min)
    mv = margin * (d.v_max - d.v_min)
    return (rng.uniform(d.u_min + mu, d.u_max - mu, n),
            rng.uniform(d.v_min + mv, d.v_max - mv, n))


def ad_fd_error(spec, rng, n=100):
    """Worst relative AD-vs-FD error over all Jet2 entries.

    First partials come from Richardson differences of plain values, second
    partials from Richardson differences of the AD first partials. Entries
    smaller than AD_SMALL count as errors in units of AD_ABS relative to 1e-5,
    so the returned number is directly comparable to a 1e-5 bound.
    """
    u, v = sample_domain(spec, rng, n)
    j = eval_jet2(spec, u, v)
    X = lambda a, b: oracles.position(spec, a, b)
    fu, fv = oracles.fd_partials(X, u, v)
    ju = lambda a, b: eval_jet2(spec, a, b, check_domain=False).Xu
    jv = lambda a, b: eval_jet2(spec, a, b, check_domain=False).Xv
    fuu, fuv = oracles.fd_partials(ju, u, v)
    _, fvv = oracles.fd_partials(jv, u, v)
    worst = 0.0
    for ad, fd in [(j.Xu, fu), (j.Xv, fv), (j.Xuu, fuu), (j.Xuv, fuv), (j.Xvv, fvv)]:
        err = np.abs(ad - fd)
        small = np.abs(ad) < AD_SMALL
        rel = np.where(small, err / AD_ABS * 1e-5, err / np.where(small, 1.0, np.abs(ad)))
        worst = max(worst, float(np.max(rel)))
    return worst


def admissible_points(spec, hd, rng, n, r_min=0.2, r_max=0.8):
    """Points with r_min <= |p - q| <= r_max where hd is admissible with margin.

    The inner disk is excluded because FD cannot resolve the vanishing
    gradients next to the umbilic.
    """
    d = spec.domain
    q = np.array(hd.base_point)
    us, vs = [], []
    while len(us) < n:
        u = rng.uniform(d.u_min, d.u_max, 4 * n)
        v = rng.uniform(d.v_min, d.v_max, 4 * n)
        r = np.hypot(u - q[0], v - q[1])
        keep = (r >= r_min) & (r <= r_max)
        u, v = u[keep], v[keep]
        c = np.sum(geometry(spec, u, v)[1].normal * hd.direction, -1)
        ok = (c > 0.05) & (c < 0.999)
        us += list(u[ok])
        vs += list(v[ok])
    return np.array(us[:n]), np.array(vs[:n])


def raise_index(spec, u, v, du, dv):
    """Frame components of the metric gradient from coordinate partials."""
    P = geometry(spec, u, v)[1].P
    return np.linalg.solve(np.swapaxes(P, -1, -2), np.stack([du, dv], -1)[..., None])[..., 0]


def grad_f_error(spec, hd, u, v):
    f = lambda a, b: oracles.position(spec, a, b) @ hd.direction
    ref = raise_index(spec, u, v, *oracles.fd_partials(f, u, v))
    got = grad_f(spec, hd, u, v)
    return float(np.max(np.linalg.norm(got - ref, axis=-1) / np.linalg.norm(ref, axis=-1)))


def grad_h_error(spec, hd, u, v):
    """grad h = c A grad f against the FD gradient of h = |grad f|^2 / 2."""
    h = lambda a, b: height_h(spec, hd, a, b)
    ref = raise_index(spec, u, v, *oracles.fd_partials(h, u, v))
    got = grad_h(spec, hd, u, v)
    return float(np.max(np.linalg.norm(got - ref, axis=-1) / np.linalg.norm(ref, axis=-1)))


def hessian_error(spec, hd, u, v, rng):
    """<Hess f(w), w> from FD of the ambient gradient a - c n along the surface,
    against c * II(w, w) from the exact jet; error relative to c |A| |w|^2."""
    d = rng.normal(size=(u.size, 2))
    a = hd.direction

    def ambient_grad(s):
        n = geometry(spec, u + s * d[:, 0], v + s * d[:, 1])[1].normal
        return a - np.sum(n * a, -1)[:, None] * n

    dG = oracles.richardson(ambient_grad, 0.0, 1e-4)
    jet, frame, S = geometry(spec, u, v)
    lhs = np.sum(dG * (jet.Xu * d[:, :1] + jet.Xv * d[:, 1:]), -1)
    c = np.sum(frame.normal * a, -1)
    w = frame.coords_to_frame(d)
    rhs = c * np.sum(w * S.apply(w), -1)
    scale = c * np.linalg.norm(S.matrix, axis=(-2, -1)) * np.sum(w * w, -1)
    return float(np.max(np.abs(lhs - rhs) / scale))


def norm_identity_error(spec, hd, u, v):
    """max of | |grad f| - sin theta | and | |grad f| - sqrt(2h) |."""
    gf = np.linalg.norm(grad_f(spec, hd, u, v), axis=-1)
    c = hd.cosines(spec, u, v)
    e1 = np.abs(gf - np.sqrt(1 - c * c))
    e2 = np.abs(gf - np.sqrt(2 * height_h(spec, hd, u, v)))
    return float(max(e1.max(), e2.max()))
