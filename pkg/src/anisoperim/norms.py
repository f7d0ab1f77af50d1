"""Anisotropic gauges on R^2 and their polars.

A gauge H is a 1-homogeneous even convex function with alpha*|xi| <= H(xi)
<= beta*|xi| and a strongly convex square.  The polar gauge is

    Ho(v) = sup_{xi != 0}  (xi . v) / H(xi),

the support function of the unit H-ball.  Built-in kinds (Euclidean,
ellipse, p-norm with p >= 2) carry closed-form first and second
derivatives; custom gauges fall back to central finite differences with a
step proportional to |xi|, which respects the homogeneity of the
derivatives (grad is 0-homogeneous, the Hessian is (-1)-homogeneous).

All evaluators are vectorized: an input of shape (..., 2) yields values of
shape (...), gradients of shape (..., 2) and Hessians of shape (..., 2, 2).
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, InvalidInputError, SingularPointError

_ALPHA_BETA_DIRECTIONS = 2048
_FD_STEP = 1e-5
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _check_finite(xi):
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != 2:
        raise InvalidInputError(f"expected 2-vectors, got shape {xi.shape}")
    if not np.isfinite(xi).all():
        raise InvalidInputError("non-finite component in gauge input")
    return xi


def _check_nonzero(xi):
    xi = _check_finite(xi)
    norms = np.hypot(xi[..., 0], xi[..., 1])
    if np.any(norms == 0.0):
        raise SingularPointError("gauge derivative requested at the origin")
    return xi


def _power_gauge_eval(xi, p):
    return (np.abs(xi[..., 0]) ** p + np.abs(xi[..., 1]) ** p) ** (1.0 / p)


def _power_gauge_grad(xi, p):
    s = np.abs(xi[..., 0]) ** p + np.abs(xi[..., 1]) ** p
    m = np.abs(xi) ** (p - 1.0) * np.sign(xi)
    return s[..., None] ** (1.0 / p - 1.0) * m


def _power_gauge_hess(xi, p):
    # d2H/dxi_i dxi_j = (1-p) S^(1/p-2) m_i m_j + (p-1) S^(1/p-1) |xi_i|^(p-2) delta_ij
    s = np.abs(xi[..., 0]) ** p + np.abs(xi[..., 1]) ** p
    m = np.abs(xi) ** (p - 1.0) * np.sign(xi)
    out = (1.0 - p) * s[..., None, None] ** (1.0 / p - 2.0) * (
        m[..., :, None] * m[..., None, :]
    )
    diag = (p - 1.0) * s[..., None] ** (1.0 / p - 1.0) * np.abs(xi) ** (p - 2.0)
    out[..., 0, 0] += diag[..., 0]
    out[..., 1, 1] += diag[..., 1]
    return out


class Norm:
    """A 2-D anisotropic gauge with derivative access.

    Construct through the factory classmethods :meth:`euclidean`,
    :meth:`ellipse`, :meth:`pnorm` or :meth:`custom`.  ``alpha`` and
    ``beta`` are the gauge-equivalence constants, estimated at
    construction by extremizing H over unit directions.
    """

    def __init__(self, kind, params, evaluator, grad_fn=None, hess_fn=None):
        self.kind = kind
        self.params = dict(params)
        self._eval = evaluator
        self._grad = grad_fn
        self._hess = hess_fn
        theta = 2.0 * np.pi * (np.arange(_ALPHA_BETA_DIRECTIONS) + 0.5) / _ALPHA_BETA_DIRECTIONS
        values = self._eval(np.stack([np.cos(theta), np.sin(theta)], axis=-1))
        if not (np.isfinite(values).all() and (values > 0.0).all()):
            raise ConfigurationError("gauge is not positive on the unit circle")
        self.alpha = float(values.min())
        self.beta = float(values.max())

    @property
    def analytic(self) -> bool:
        """Whether first and second derivatives are closed-form."""
        return self._grad is not None and self._hess is not None

    @classmethod
    def euclidean(cls):
        def ev(xi):
            return np.hypot(xi[..., 0], xi[..., 1])

        def gr(xi):
            return xi / ev(xi)[..., None]

        def he(xi):
            n = ev(xi)
            d = xi / n[..., None]
            eye = np.eye(2)
            return (eye - d[..., :, None] * d[..., None, :]) / n[..., None, None]

        return cls("euclidean", {}, ev, gr, he)

    @classmethod
    def ellipse(cls, a, b):
        """H(x) = sqrt(x1^2/a^2 + x2^2/b^2); the unit ball is the (a, b) ellipse."""
        if not (np.isfinite(a) and np.isfinite(b) and a > 0 and b > 0):
            raise ConfigurationError("ellipse semi-axes must be positive reals")
        w = np.array([1.0 / a**2, 1.0 / b**2])

        def ev(xi):
            return np.sqrt(w[0] * xi[..., 0] ** 2 + w[1] * xi[..., 1] ** 2)

        def gr(xi):
            return w * xi / ev(xi)[..., None]

        def he(xi):
            g = gr(xi)
            return (np.diag(w) - g[..., :, None] * g[..., None, :]) / ev(xi)[..., None, None]

        return cls("ellipse", {"a": float(a), "b": float(b)}, ev, gr, he)

    @classmethod
    def pnorm(cls, p):
        """H(x) = (|x1|^p + |x2|^p)^(1/p).  Requires p >= 2 so H^2 is C^2 off 0."""
        if not (np.isfinite(p) and p >= 2.0):
            raise ConfigurationError(f"p-norm exponent must satisfy p >= 2, got {p}")
        return cls._power(p, kind="pnorm")

    @classmethod
    def _power(cls, p, kind="pnorm"):
        # Internal: also used with the dual exponent q = p/(p-1) < 2, whose
        # second derivatives exist only off the axes.
        return cls(
            kind,
            {"p": float(p)},
            lambda xi: _power_gauge_eval(xi, p),
            lambda xi: _power_gauge_grad(xi, p),
            lambda xi: _power_gauge_hess(xi, p),
        )

    @classmethod
    def custom(cls, evaluator, grad=None, hess=None, params=None):
        """Wrap a vectorized evaluator; missing derivatives use central differences."""
        return cls("custom", params or {}, evaluator, grad, hess)

    def eval(self, xi):
        xi = _check_finite(xi)
        return np.asarray(self._eval(xi), dtype=float)

    __call__ = eval

    def grad(self, xi):
        xi = _check_nonzero(xi)
        if self._grad is not None:
            return np.asarray(self._grad(xi), dtype=float)
        h = _FD_STEP * np.hypot(xi[..., 0], xi[..., 1])[..., None]
        e1 = np.stack([h[..., 0], np.zeros_like(h[..., 0])], axis=-1)
        e2 = np.stack([np.zeros_like(h[..., 0]), h[..., 0]], axis=-1)
        g1 = (self._eval(xi + e1) - self._eval(xi - e1)) / (2.0 * h[..., 0])
        g2 = (self._eval(xi + e2) - self._eval(xi - e2)) / (2.0 * h[..., 0])
        return np.stack([g1, g2], axis=-1)

    def hess(self, xi):
        xi = _check_nonzero(xi)
        if self._hess is not None:
            return np.asarray(self._hess(xi), dtype=float)
        h = _FD_STEP * np.hypot(xi[..., 0], xi[..., 1])
        z = np.zeros_like(h)
        e1 = np.stack([h, z], axis=-1)
        e2 = np.stack([z, h], axis=-1)
        f0 = self._eval(xi)
        d11 = (self._eval(xi + e1) - 2.0 * f0 + self._eval(xi - e1)) / h**2
        d22 = (self._eval(xi + e2) - 2.0 * f0 + self._eval(xi - e2)) / h**2
        d12 = (
            self._eval(xi + e1 + e2)
            - self._eval(xi + e1 - e2)
            - self._eval(xi - e1 + e2)
            + self._eval(xi - e1 - e2)
        ) / (4.0 * h**2)
        out = np.empty(xi.shape[:-1] + (2, 2))
        out[..., 0, 0] = d11
        out[..., 1, 1] = d22
        out[..., 0, 1] = d12
        out[..., 1, 0] = d12
        return out

    def f_hessian(self, xi):
        """Hessian of F = H^2/2:  F_ij = H_i H_j + H H_ij (0-homogeneous, SPD)."""
        xi = _check_nonzero(xi)
        g = self.grad(xi)
        hv = self.eval(xi)
        return g[..., :, None] * g[..., None, :] + hv[..., None, None] * self.hess(xi)


class PolarNorm:
    """The polar gauge Ho of a base gauge.

    mode "analytic" uses the closed form of the built-in kinds (the
    ellipse polar swaps semi-axes to (1/a, 1/b); the p-norm polar is the
    dual-exponent norm).  mode "numeric" evaluates sup_theta v.u(theta) /
    H(u(theta)) by a coarse angular scan followed by golden-section
    refinement of the bracketing interval down to width 1e-12.
    """

    def __init__(self, base: Norm, mode="analytic", angular_samples=720, refine_iters=90):
        if mode not in ("analytic", "numeric"):
            raise ConfigurationError(f"unknown polar mode {mode!r}")
        if mode == "numeric" and angular_samples < 8:
            raise ConfigurationError("numeric polar needs at least 8 angular samples")
        if mode == "analytic" and base.kind == "custom":
            raise ConfigurationError("custom gauges have no analytic polar; use mode='numeric'")
        self.base = base
        self.mode = mode
        self.angular_samples = int(angular_samples)
        self.refine_iters = int(refine_iters)
        self._rep = self._analytic_rep(base) if mode == "analytic" else None
        self._kappa_cache = {}

    @staticmethod
    def _analytic_rep(base: Norm) -> Norm:
        if base.kind == "euclidean":
            return Norm.euclidean()
        if base.kind == "ellipse":
            return Norm.ellipse(1.0 / base.params["a"], 1.0 / base.params["b"])
        if base.kind == "pnorm":
            p = base.params["p"]
            if p == 2.0:
                return Norm.euclidean()
            return Norm._power(p / (p - 1.0))
        raise ConfigurationError(f"no analytic polar for kind {base.kind!r}")

    def as_norm(self) -> Norm:
        """The polar expressed as a gauge of its own (with derivative access)."""
        if self._rep is not None:
            return self._rep
        return Norm.custom(self.eval, params={"polar_of": self.base.kind})

    def eval(self, v):
        v = _check_finite(v)
        if self._rep is not None:
            return self._rep.eval(v)
        return self._numeric_sup(v)

    __call__ = eval

    def grad(self, v):
        v = _check_nonzero(v)
        if self._rep is not None:
            return self._rep.grad(v)
        h = 1e-6 * np.hypot(v[..., 0], v[..., 1])
        z = np.zeros_like(h)
        e1 = np.stack([h, z], axis=-1)
        e2 = np.stack([z, h], axis=-1)
        g1 = (self._numeric_sup(v + e1) - self._numeric_sup(v - e1)) / (2.0 * h)
        g2 = (self._numeric_sup(v + e2) - self._numeric_sup(v - e2)) / (2.0 * h)
        return np.stack([g1, g2], axis=-1)

    def _objective(self, theta, v):
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return (u * v).sum(axis=-1) / self.base.eval(u)

    def _numeric_sup(self, v):
        v = np.asarray(v, dtype=float)
        shape = v.shape[:-1]
        flat = v.reshape(-1, 2)
        out = np.zeros(flat.shape[0])
        live = np.hypot(flat[:, 0], flat[:, 1]) > 0.0
        if live.any():
            vv = flat[live]
            m = self.angular_samples
            theta = 2.0 * np.pi * np.arange(m) / m
            vals = self._objective(theta[None, :], vv[:, None, :])
            best = np.argmax(vals, axis=1)
            step = 2.0 * np.pi / m
            lo = theta[best] - step
            hi = theta[best] + step
            c = hi - _GOLDEN * (hi - lo)
            d = lo + _GOLDEN * (hi - lo)
            fc = self._objective(c, vv)
            fd = self._objective(d, vv)
            for _ in range(self.refine_iters):
                if np.max(hi - lo) < 1e-12:
                    break
                take_c = fc > fd
                hi = np.where(take_c, d, hi)
                lo = np.where(take_c, lo, c)
                c = hi - _GOLDEN * (hi - lo)
                d = lo + _GOLDEN * (hi - lo)
                fc = self._objective(c, vv)
                fd = self._objective(d, vv)
            out[live] = np.maximum(fc, fd)
        return out.reshape(shape)


def identity_residuals(norm: Norm, polar: PolarNorm, samples: int, seed: int = 0) -> dict:
    """Max absolute residuals of the Euler/polar identities on random points.

    Keys: "euler_h"         H(xi) - H_xi(xi).xi
          "euler_polar"     Ho(xi) - Ho_xi(xi).xi
          "unit_h"          H(Ho_xi(xi)) - 1
          "unit_polar"      Ho(H_xi(xi)) - 1
          "inversion"       Ho(xi) * H_xi(Ho_xi(xi)) - xi   (componentwise)
    """
    if samples < 1:
        raise ConfigurationError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=samples)
    radius = 10.0 ** rng.uniform(-2.0, 2.0, size=samples)
    xi = radius[:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=-1)

    grad_h = norm.grad(xi)
    grad_p = polar.grad(xi)
    res_euler_h = np.abs(norm.eval(xi) - (grad_h * xi).sum(axis=-1))
    res_euler_p = np.abs(polar.eval(xi) - (grad_p * xi).sum(axis=-1))
    res_unit_h = np.abs(norm.eval(grad_p) - 1.0)
    res_unit_p = np.abs(polar.eval(grad_h) - 1.0)
    res_inv = np.abs(polar.eval(xi)[:, None] * norm.grad(grad_p) - xi)
    return {
        "euler_h": float(res_euler_h.max()),
        "euler_polar": float(res_euler_p.max()),
        "unit_h": float(res_unit_h.max()),
        "unit_polar": float(res_unit_p.max()),
        "inversion": float(res_inv.max()),
    }
