"""Fredholm determinants of the squared matrix Airy Hankel operators.

The operator acts on r-vector functions on the positive half line with the
matrix kernel (c_jk Ai_{2n+1}(x + y + s_j + s_k)).  The half line is truncated
to [0, T] (the kernel dies super-exponentially to the right) and discretized
on Gauss-Legendre nodes with square-root weight symmetrization, so the block
matrix H is the quadrature image of the operator and is Hermitian whenever C
is.  The determinant of interest is det(I - H^2): the squared operator's
kernel is the composition, and its Nystrom image is H @ H.

Along the diagonal flow every shift moves as s_j = sigma_j + t; F is then a
distribution function of t (joint gap probability), nondecreasing with values
in (0, 1] for admissible couplings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .airy import ai_many


class NotHermitian(ValueError):
    """Coupling matrix is not Hermitian."""


class SpectrumOutOfRange(ValueError):
    """Coupling spectrum leaves [-1, 1]; the determinant identity is not guaranteed."""


class TruncationInsufficient(RuntimeError):
    """Kernel magnitude at the truncation edge is above threshold."""


class NonPositiveDeterminant(RuntimeError):
    """Determinant lost positivity (outside the supported shift range)."""


class GridTooCoarse(ValueError):
    """Finite-difference stencil needs at least 5 uniformly spaced points."""


@dataclass(frozen=True)
class CouplingMatrix:
    """Hermitian coupling C with validated spectrum, plus base shifts sigma."""

    r: int
    c: np.ndarray
    sigma: np.ndarray

    def shifts(self, t):
        return self.sigma + t

    def to_json_obj(self):
        if np.iscomplexobj(self.c):
            c_out = [[[float(v.real), float(v.imag)] for v in row] for row in self.c]
        else:
            c_out = [[float(v) for v in row] for row in self.c]
        return {"r": self.r, "C": c_out, "sigma": [float(s) for s in self.sigma]}


def validate_coupling(c, sigma=None):
    """Accept a Hermitian C with eigenvalues in [-1, 1]; reject otherwise."""
    c = np.atleast_2d(np.asarray(c, dtype=complex))
    if c.shape[0] != c.shape[1]:
        raise NotHermitian(f"coupling must be square, got shape {c.shape}")
    r = c.shape[0]
    scale = max(1.0, float(np.max(np.abs(c))))
    if float(np.max(np.abs(c - c.conj().T))) > 1e-12 * scale:
        raise NotHermitian("coupling matrix is not Hermitian")
    eigs = np.linalg.eigvalsh(c)
    if eigs.min() < -1.0 - 1e-10 or eigs.max() > 1.0 + 1e-10:
        raise SpectrumOutOfRange(
            f"eigenvalues {eigs} leave [-1, 1]; existence is not guaranteed"
        )
    if sigma is None:
        sigma = np.zeros(r)
    sigma = np.asarray(sigma, dtype=float).reshape(-1)
    if sigma.shape != (r,):
        raise ValueError(f"sigma must have length {r}")
    if np.max(np.abs(c.imag)) == 0:
        c = c.real.astype(float)  # real-symmetric: keep H real, Hermiticity exact
    return CouplingMatrix(r=r, c=c, sigma=sigma)


def coupling_from_json_obj(obj):
    c = np.asarray(obj["C"], dtype=float)
    return validate_coupling(c, np.asarray(obj.get("sigma", [0.0] * c.shape[0])))


def default_truncation(n):
    return 14.0 if n == 1 else 10.0


@dataclass(frozen=True)
class DiscretizationSpec:
    """Truncation and quadrature controls for the Nystrom determinant."""

    truncation: float | None = None  # None: 14 for n = 1, 10 for n >= 2
    nodes: int = 100
    tail_threshold: float = 1e-5  # |Ai| at the truncation edge; squared kernel
    estimate_error: bool = True

    def resolve_truncation(self, n):
        return default_truncation(n) if self.truncation is None else self.truncation


DEFAULT_DISCRETIZATION = DiscretizationSpec()


@dataclass(frozen=True)
class HankelDiscretization:
    """Gauss-Legendre grid and the block Hankel matrix on it."""

    n: int
    t: float
    truncation: float
    nodes: np.ndarray
    weights: np.ndarray
    h: np.ndarray  # (r*m) x (r*m) block matrix


@lru_cache(maxsize=32)
def _grid(truncation, m):
    gl_x, gl_w = leggauss(m)
    x = 0.5 * truncation * (gl_x + 1.0)
    w = 0.5 * truncation * gl_w
    return x, w


def build_hankel(n, coupling, t, spec=None, nodes=None):
    """Assemble the symmetrized block Hankel matrix at flow offset t."""
    spec = spec or DEFAULT_DISCRETIZATION
    truncation = spec.resolve_truncation(n)
    m = nodes or spec.nodes
    x, w = _grid(truncation, m)
    shifts = coupling.shifts(t)
    r = coupling.r

    edge = truncation + 2.0 * float(shifts.min())
    if abs(float(ai_many(n, 0, [edge])[0])) > spec.tail_threshold:
        raise TruncationInsufficient(
            f"|Ai_{2*n+1}({edge:.3f})| above {spec.tail_threshold}; "
            f"increase truncation or move shifts right"
        )

    sums = x[:, None] + x[None, :]
    sqrt_w = np.sqrt(w)
    symm = sqrt_w[:, None] * sqrt_w[None, :]
    h = np.zeros((r * m, r * m), dtype=coupling.c.dtype)
    pair_shifts = {}
    for j in range(r):
        for k in range(r):
            if coupling.c[j, k] == 0:
                continue
            pair_shifts.setdefault(round(float(shifts[j] + shifts[k]), 12), []).append(
                (j, k)
            )
    for shift, pairs in pair_shifts.items():
        args = sums + shift
        flat = args.round(12).ravel()
        uniq, inverse = np.unique(flat, return_inverse=True)
        vals = ai_many(n, 0, uniq)
        kernel = vals[inverse].reshape(args.shape) * symm
        for j, k in pairs:
            h[j * m : (j + 1) * m, k * m : (k + 1) * m] = coupling.c[j, k] * kernel
    return HankelDiscretization(
        n=n, t=t, truncation=truncation, nodes=x, weights=w, h=h
    )


@dataclass(frozen=True)
class FredholmResult:
    """Determinant value with a node-doubling error estimate and echo."""

    n: int
    t: float
    value: float
    error_estimate: float | None
    truncation: float
    nodes: int


def _det_squared(h):
    m = h.shape[0]
    value = np.linalg.det(np.eye(m) - h @ h)
    if np.iscomplexobj(h):
        if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
            raise NonPositiveDeterminant(
                f"determinant has a large imaginary part {value.imag:.3e}"
            )
        value = value.real
    return float(value)


def fredholm_det(n, coupling, t, spec=None):
    """det(I - H^2) at flow offset t, with optional node-doubling estimate."""
    spec = spec or DEFAULT_DISCRETIZATION
    value = _det_squared(build_hankel(n, coupling, t, spec).h)
    error = None
    if spec.estimate_error:
        finer = _det_squared(build_hankel(n, coupling, t, spec, nodes=2 * spec.nodes).h)
        error = abs(finer - value)
        value = finer
    return FredholmResult(
        n=n,
        t=t,
        value=value,
        error_estimate=error,
        truncation=spec.resolve_truncation(n),
        nodes=spec.nodes,
    )


@dataclass(frozen=True)
class CurvePoint:
    t: float
    f: float
    ln_f: float
    error_estimate: float | None


def log_det_curve(n, coupling, t_grid, spec=None):
    """ln F along the diagonal flow; fails loudly if positivity is lost."""
    spec = spec or DEFAULT_DISCRETIZATION
    points = []
    for t in np.asarray(t_grid, dtype=float):
        result = fredholm_det(n, coupling, float(t), spec)
        if result.value <= 0.0:
            raise NonPositiveDeterminant(
                f"F({t}) = {result.value:.6e} <= 0; outside the supported range"
            )
        points.append(
            CurvePoint(
                t=float(t),
                f=result.value,
                ln_f=float(np.log(result.value)),
                error_estimate=result.error_estimate,
            )
        )
    return points


def second_log_derivative(curve, h):
    """5-point centered second derivative of ln F on the interior of the grid.

    Accepts the output of log_det_curve (or (t, ln F) pairs) on a uniform grid
    of spacing h; returns a list of (t, d2 ln F / dt2) for interior points.
    """
    if h <= 0:
        raise GridTooCoarse("grid spacing must be positive")
    ts, vals = [], []
    for point in curve:
        if isinstance(point, CurvePoint):
            ts.append(point.t)
            vals.append(point.ln_f)
        else:
            t, v = point
            ts.append(float(t))
            vals.append(float(v))
    if len(ts) < 5:
        raise GridTooCoarse("need at least 5 grid points for the 5-point stencil")
    spacing = np.diff(ts)
    if np.max(np.abs(spacing - h)) > 1e-9:
        raise GridTooCoarse("grid is not uniform with the stated spacing")
    vals = np.asarray(vals)
    out = []
    for i in range(2, len(ts) - 2):
        d2 = (
            -vals[i - 2] + 16 * vals[i - 1] - 30 * vals[i] + 16 * vals[i + 1] - vals[i + 2]
        ) / (12.0 * h * h)
        out.append((ts[i], float(d2)))
    return out
