"""Generalized Airy functions Ai_{2n+1} by contour quadrature.

Ai_{2n+1}(x) = (1/2pi) int_gamma exp(i mu^(2n+1)/(2n+1) + i x mu) dmu, with
gamma running from infinity at angle pi/2 + pi n/(2n+1) through the vertex
i*h down and back out to infinity at angle pi/2 - pi n/(2n+1).  Both rays sit
in decay sectors of the phase, so the integrand dies super-exponentially and
composite Gauss-Legendre panels along the polyline converge fast.  The
contour is mirror-symmetric under mu -> -conj(mu), which makes the value real
for real x; the leftover imaginary part is a quadrature diagnostic.

Derivatives insert (i mu)^k under the integral.  Ai_{2n+1} solves
phi^(2n) = (-1)^(n+1) x phi, which :func:`ode_residual` checks directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss


class NonConvergence(RuntimeError):
    """Quadrature failed its convergence or symmetry gate."""


def default_vertex_height(n):
    # The rays only reach their decay-sector angles asymptotically; a tall
    # vertex makes the path cross growth sectors of exp(i mu^(2n+1)) once the
    # phase winds more than three times.  Keep the vertex low for n >= 2.
    return 1.0 if n == 1 else 0.2


@dataclass(frozen=True)
class Contour:
    """Polyline contour through i*vertex_height with the standard ray angles."""

    n: int
    vertex_height: float
    truncation_cap: float = 40.0

    @classmethod
    def for_index(cls, n, vertex_height=None):
        if n < 1:
            raise ValueError("contour index must be >= 1")
        if vertex_height is None:
            vertex_height = default_vertex_height(n)
        return cls(n=n, vertex_height=vertex_height)

    @property
    def phi_plus(self):
        return np.pi / 2 + np.pi * self.n / (2 * self.n + 1)

    @property
    def phi_minus(self):
        return np.pi / 2 - np.pi * self.n / (2 * self.n + 1)


@dataclass(frozen=True)
class QuadratureSpec:
    """Panelled Gauss-Legendre controls with a node-doubling convergence gate."""

    nodes_per_panel: int = 24
    panel_length: float = 1.0
    abs_tol: float = 1e-12
    max_refinements: int = 3
    realness_tol: float = 1e-10


DEFAULT_SPEC = QuadratureSpec()

_CACHE = {}
_CHUNK = 1024


def _truncation_radius(contour, k, x_min):
    """Ray length after which the integrand is < 1e-16 of its peak bound."""
    n, h = contour.n, contour.vertex_height
    neg = max(0.0, -float(x_min))
    # peak bound of |integrand| over the plane region the contour can reach
    peak_log = (2 * n / (2 * n + 1)) * neg ** ((2 * n + 1) / (2 * n)) if neg else 0.0
    need = peak_log + 41.0
    r = 2.0
    while r < contour.truncation_cap:
        decay = r ** (2 * n + 1) / (2 * n + 1) - neg * (r + h) - k * np.log(r + h + 1.0)
        if decay >= need:
            return r
        r += 0.5
    raise NonConvergence(
        f"truncation cap {contour.truncation_cap} too small for n={n}, x_min={x_min}"
    )


@lru_cache(maxsize=64)
def _panel_rule(nodes):
    return leggauss(nodes)


def _ray_nodes(contour, radius, nodes_per_panel, panel_length):
    """Quadrature nodes mu_j and complex weights for both rays combined."""
    gl_x, gl_w = _panel_rule(nodes_per_panel)
    n_panels = int(np.ceil(radius / panel_length))
    mus, weights = [], []
    h = contour.vertex_height
    for phi, sign in ((contour.phi_plus, -1.0), (contour.phi_minus, +1.0)):
        direction = np.exp(1j * phi)
        for p in range(n_panels):
            a = p * panel_length
            b = min((p + 1) * panel_length, radius)
            u = 0.5 * (b - a) * gl_x + 0.5 * (a + b)
            w = 0.5 * (b - a) * gl_w
            mus.append(1j * h + u * direction)
            weights.append(sign * direction * w)
    return np.concatenate(mus), np.concatenate(weights)


def _quadrature_pass(contour, k, xs, radius, nodes_per_panel, panel_length):
    n = contour.n
    mu, w = _ray_nodes(contour, radius, nodes_per_panel, panel_length)
    base = w * np.exp(1j * mu ** (2 * n + 1) / (2 * n + 1))
    if k:
        base = base * (1j * mu) ** k
    out = np.empty(len(xs), dtype=complex)
    for lo in range(0, len(xs), _CHUNK):
        chunk = xs[lo : lo + _CHUNK]
        out[lo : lo + _CHUNK] = np.exp(1j * np.outer(chunk, mu)) @ base
    return out / (2 * np.pi)


def _values(n, k, xs, spec, contour=None):
    """Converged complex contour integrals for an array of arguments."""
    if contour is None:
        contour = Contour.for_index(n)
    xs = np.asarray(xs, dtype=float)
    radius = _truncation_radius(contour, k, xs.min())
    panel_length = spec.panel_length
    for _ in range(spec.max_refinements + 1):
        coarse = _quadrature_pass(contour, k, xs, radius, spec.nodes_per_panel, panel_length)
        fine = _quadrature_pass(contour, k, xs, radius, 2 * spec.nodes_per_panel, panel_length)
        err = float(np.max(np.abs(fine - coarse)))
        if err <= spec.abs_tol:
            imag = float(np.max(np.abs(fine.imag)))
            if imag > spec.realness_tol:
                raise NonConvergence(
                    f"symmetry residue {imag:.3e} exceeds {spec.realness_tol}"
                )
            return fine.real, err
        panel_length /= 2.0
    raise NonConvergence(
        f"node doubling changed result by {err:.3e} after "
        f"{spec.max_refinements} panel refinements (n={n}, k={k})"
    )


def ai_many(n, k, xs, spec=None):
    """Vectorized Ai_{2n+1}^(k) over an array of real arguments (cached)."""
    if n < 1:
        raise ValueError("generalized Airy index must be >= 1")
    if k < 0:
        raise ValueError("derivative order must be >= 0")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if spec is not None and spec != DEFAULT_SPEC:
        return _values(n, k, xs, spec)[0]
    keys = [(n, k, round(float(x), 12)) for x in xs]
    missing = sorted({key[2] for key in keys if key not in _CACHE})
    if missing:
        vals, _ = _values(n, k, np.array(missing), DEFAULT_SPEC)
        for x, v in zip(missing, vals):
            _CACHE[(n, k, x)] = float(v)
    return np.array([_CACHE[key] for key in keys])


def ai(n, x, spec=None):
    """Generalized Airy function Ai_{2n+1} at a real argument."""
    return float(ai_many(n, 0, [x], spec)[0])


def ai_deriv(n, k, x, spec=None):
    """k-th derivative of Ai_{2n+1} (k = 0 reproduces ai)."""
    return float(ai_many(n, k, [x], spec)[0])


def ode_residual(n, x, spec=None):
    """|Ai^(2n)(x) - (-1)^(n+1) x Ai(x)|, the defining-equation residual."""
    lhs = ai_deriv(n, 2 * n, x, spec)
    rhs = (-1) ** (n + 1) * x * ai(n, x, spec)
    return abs(lhs - rhs)
