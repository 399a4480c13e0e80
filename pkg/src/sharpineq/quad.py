"""Deterministic and Monte Carlo integration primitives.

Radial integrals on R^n, zonal integrals on spheres, singular two-point
integrals with exclusion-radius extrapolation, and a reproducible
counter-based Monte Carlo driver.  All deterministic rules are pure
functions of their inputs; Monte Carlo results depend only on
(seed, node_count).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .specfn import bessel_j, log_gamma, sphere_measure

__all__ = [
    "QuadratureRule",
    "RadialProfile",
    "ClosedForm",
    "GaussianForm",
    "BubbleForm",
    "BallIndicatorForm",
    "PowerForm",
    "LogWindowPowerForm",
    "MixtureForm",
    "gauss_legendre",
    "tanh_sinh",
    "monte_carlo_rule",
    "default_grid",
    "profile_from_form",
    "radial_integral",
    "zonal_integral",
    "mc_integrate",
    "singular_double_integral",
    "richardson",
    "wynn_epsilon",
    "jacobi_rule",
    "composite_nodes",
    "log_edges",
    "geometric_edges",
    "integrate_panels",
    "zonal_density_constant",
    "lp_norm",
    "TailDecayError",
    "SingularityError",
    "McVarianceError",
]


class TailDecayError(ValueError):
    """Profile tail does not decay enough for the requested integral."""


class SingularityError(ArithmeticError):
    """Endpoint singularity looks non-integrable (refinement diverges)."""


class McVarianceError(ArithmeticError):
    """Monte Carlo variance estimate blew up (mass on a singularity)."""


# ----------------------------------------------------------------------
# basic rules
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    kind: str  # gauss_legendre | tanh_sinh | monte_carlo
    node_count: int
    domain_map: str = "interval"  # interval | radial_log | sphere_polar
    seed: int = 0
    nodes: np.ndarray | None = field(default=None, repr=False, compare=False)
    weights: np.ndarray | None = field(default=None, repr=False, compare=False)


@lru_cache(maxsize=128)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gauss_legendre(n: int) -> QuadratureRule:
    """N-point Gauss-Legendre rule on (-1, 1); exact for degree <= 2N-1."""
    if n < 1:
        raise ValueError("need N >= 1")
    x, w = _leggauss(int(n))
    return QuadratureRule("gauss_legendre", int(n), "interval", 0, x, w)


def tanh_sinh(order: int, h: float | None = None) -> QuadratureRule:
    """Tanh-sinh (double exponential) rule on (-1, 1) with 2*order+1 nodes."""
    if order < 1:
        raise ValueError("need order >= 1")
    if h is None:
        h = 3.0 / order
    k = np.arange(-order, order + 1, dtype=float)
    t = k * h
    half_pi = 0.5 * math.pi
    x = np.tanh(half_pi * np.sinh(t))
    w = h * half_pi * np.cosh(t) / np.cosh(half_pi * np.sinh(t)) ** 2
    return QuadratureRule("tanh_sinh", x.size, "interval", 0, x, w)


def monte_carlo_rule(node_count: int, seed: int) -> QuadratureRule:
    return QuadratureRule("monte_carlo", int(node_count), "interval", int(seed))


# ----------------------------------------------------------------------
# composite-panel helpers (shared by every deterministic integral here)
# ----------------------------------------------------------------------


def composite_nodes(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on each panel [edges[i], edges[i+1]]."""
    x, w = _leggauss(order)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    xs = 0.5 * (a + b) + 0.5 * (b - a) * x[None, :]
    ws = 0.5 * (b - a) * np.broadcast_to(w, xs.shape)
    return xs.ravel(), ws.ravel()


def log_edges(lo: float, hi: float, per_decade: int) -> np.ndarray:
    ndec = math.log10(hi / lo)
    n = max(2, int(math.ceil(ndec * per_decade)))
    return np.exp(np.linspace(math.log(lo), math.log(hi), n + 1))


def geometric_edges(a: float, b: float, toward: float, n_panels: int, ratio: float = 2.0) -> np.ndarray:
    """Panel edges on [a, b] shrinking geometrically toward `toward` (a or b)."""
    widths = ratio ** np.arange(n_panels, dtype=float)
    widths = widths / widths.sum() * (b - a)
    edges = np.concatenate([[0.0], np.cumsum(widths)])
    edges[-1] = b - a
    if toward == a:
        return a + edges
    return b - edges[::-1]


def integrate_panels(f: Callable[[np.ndarray], np.ndarray], edges: np.ndarray, order: int = 12) -> float:
    xs, ws = composite_nodes(np.asarray(edges, dtype=float), order)
    return float(np.dot(ws, f(xs)))


def wynn_epsilon(partial_sums: Sequence[float]) -> float:
    """Wynn epsilon algorithm: accelerate a (possibly alternating) sequence."""
    s = list(map(float, partial_sums))
    n = len(s)
    if n == 1:
        return s[0]
    eps = [s, []]
    prev2 = [0.0] * (n + 1)
    prev1 = s
    best = s[-1]
    for k in range(1, n):
        cur = []
        for j in range(len(prev1) - 1):
            d = prev1[j + 1] - prev1[j]
            if d == 0.0:
                cur.append(prev2[j + 1])
                continue
            cur.append(prev2[j + 1] + 1.0 / d)
        if not cur:
            break
        if k % 2 == 0 and cur:
            best = cur[-1]
        prev2, prev1 = prev1, cur
    return best


@lru_cache(maxsize=256)
def jacobi_rule(n: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi nodes/weights for weight (1-x)^alpha (1+x)^beta on (-1,1).

    Golub-Welsch on the symmetric Jacobi recurrence matrix; weights sum to
    2^(alpha+beta+1) B(alpha+1, beta+1).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if alpha <= -1 or beta <= -1:
        raise ValueError("Jacobi weight exponents must be > -1")
    k = np.arange(n, dtype=float)
    ab = alpha + beta
    denom = (2 * k + ab) * (2 * k + ab + 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        a_diag = (beta**2 - alpha**2) / np.where(denom == 0, np.inf, denom)
    a_diag[0] = (beta - alpha) / (ab + 2)
    j = np.arange(1, n, dtype=float)
    num = 4 * j * (j + alpha) * (j + beta) * (j + ab)
    den = (2 * j + ab) ** 2 * (2 * j + ab + 1) * (2 * j + ab - 1)
    b_off = np.sqrt(num / den)
    mat = np.diag(a_diag) + np.diag(b_off, 1) + np.diag(b_off, -1)
    vals, vecs = np.linalg.eigh(mat)
    mu0 = math.exp(
        (ab + 1) * math.log(2.0)
        + log_gamma(alpha + 1)
        + log_gamma(beta + 1)
        - log_gamma(ab + 2)
    )
    w = mu0 * vecs[0, :] ** 2
    return vals, w


class CubicSpline1D:
    """Natural cubic spline through (x_i, y_i); vectorized evaluation.

    Queries outside [x_0, x_end] return 0 (profiles here decay to zero).
    """

    def __init__(self, x: np.ndarray, y: np.ndarray):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.size < 3 or np.any(np.diff(x) <= 0):
            raise ValueError("need >= 3 strictly increasing nodes")
        n = x.size
        h = np.diff(x)
        rhs = np.zeros(n)
        rhs[1:-1] = 6.0 * ((y[2:] - y[1:-1]) / h[1:] - (y[1:-1] - y[:-2]) / h[:-1])
        diag = np.ones(n)
        diag[1:-1] = 2.0 * (h[:-1] + h[1:])
        lower = np.zeros(n - 1)
        upper = np.zeros(n - 1)
        lower[:-1] = h[:-1]
        upper[1:] = h[1:]
        lower[-1] = 0.0
        upper[0] = 0.0
        # Thomas algorithm
        c = upper.copy()
        d = rhs.copy()
        b = diag.copy()
        for i in range(1, n):
            m = lower[i - 1] / b[i - 1]
            b[i] -= m * c[i - 1] if i - 1 < n - 1 else 0.0
            d[i] -= m * d[i - 1]
        m2 = np.zeros(n)
        m2[-1] = d[-1] / b[-1]
        for i in range(n - 2, -1, -1):
            m2[i] = (d[i] - (c[i] * m2[i + 1] if i < n - 1 else 0.0)) / b[i]
        self.x = x
        self.y = y
        self.h = h
        self.m2 = m2

    def __call__(self, xq):
        xq = np.asarray(xq, dtype=float)
        scalar = xq.ndim == 0
        xq = np.atleast_1d(xq)
        out = np.zeros_like(xq)
        inside = (xq >= self.x[0]) & (xq <= self.x[-1])
        q = xq[inside]
        idx = np.clip(np.searchsorted(self.x, q) - 1, 0, self.x.size - 2)
        x0 = self.x[idx]
        h = self.h[idx]
        t = q - x0
        m0 = self.m2[idx]
        m1 = self.m2[idx + 1]
        y0 = self.y[idx]
        y1 = self.y[idx + 1]
        val = (
            m0 * (h - t) ** 3 / (6 * h)
            + m1 * t**3 / (6 * h)
            + (y0 / h - m0 * h / 6) * (h - t)
            + (y1 / h - m1 * h / 6) * t
        )
        out[inside] = val
        return float(out[0]) if scalar else out


# ----------------------------------------------------------------------
# radial profiles
# ----------------------------------------------------------------------


class ClosedForm:
    """Base for closed-form radial profiles; subclasses are frozen dataclasses."""

    label = "custom"

    def __call__(self, r):  # pragma: no cover - abstract
        raise NotImplementedError

    def knots(self) -> tuple[float, ...]:
        """Radii of kinks/jumps that quadrature panels must not straddle."""
        return ()

    def derivative(self, r):
        """df/dr; central finite-difference fallback."""
        r = np.asarray(r, dtype=float)
        h = np.maximum(1e-7, 1e-7 * np.abs(r))
        lo = np.maximum(r - h, 0.0)
        return (self(r + h) - self(lo)) / (r + h - lo)

    def params(self) -> dict:
        return {}

    def descriptor(self) -> dict:
        d = {"form": self.label}
        d.update(self.params())
        return d


@dataclass(frozen=True)
class GaussianForm(ClosedForm):
    """exp(-pi (r/scale)^2)."""

    scale: float = 1.0
    label = "gaussian"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(-math.pi * (r / self.scale) ** 2)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return -2.0 * math.pi * r / self.scale**2 * self(r)

    def params(self):
        return {"scale": self.scale}


@dataclass(frozen=True)
class BubbleForm(ClosedForm):
    """(1 + (r/scale)^2)^(-n/p), the conformal extremal profile."""

    p: float
    n: int
    scale: float = 1.0
    label = "bubble"

    def exponent(self) -> float:
        return self.n / self.p

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return (1.0 + (r / self.scale) ** 2) ** (-self.exponent())

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        a = self.exponent()
        u = 1.0 + (r / self.scale) ** 2
        return -2.0 * a * r / self.scale**2 * u ** (-a - 1.0)

    def params(self):
        return {"p": self.p, "n": self.n, "scale": self.scale}


@dataclass(frozen=True)
class BallIndicatorForm(ClosedForm):
    radius: float = 1.0
    label = "ball_indicator"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.radius, 1.0, 0.0)

    def knots(self):
        return (self.radius,)

    def params(self):
        return {"radius": self.radius}


@dataclass(frozen=True)
class PowerForm(ClosedForm):
    """r^a (used for kernels and Mellin-type test profiles)."""

    a: float
    label = "power"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return r**self.a

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return self.a * r ** (self.a - 1.0)

    def params(self):
        return {"a": self.a}


@dataclass(frozen=True)
class LogWindowPowerForm(ClosedForm):
    """r^(-a) times a raised-cosine window in ln r.

    The window is 1 for |ln r| <= half_width - ramp, falls smoothly to 0 at
    |ln r| = half_width.  These are the near-extremal (inversion symmetric)
    profiles for the weighted inequalities whose constants are sharp but not
    attained.
    """

    a: float
    half_width: float
    ramp: float = 2.0
    label = "log_window_power"

    def window(self, r):
        t = np.abs(np.log(np.asarray(r, dtype=float)))
        w = np.ones_like(t)
        w[t > self.half_width] = 0.0
        edge = (t > self.half_width - self.ramp) & (t <= self.half_width)
        w[edge] = 0.5 * (1.0 + np.cos(math.pi * (t[edge] - (self.half_width - self.ramp)) / self.ramp))
        return w

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        pos = r > 0
        out[pos] = r[pos] ** (-self.a) * self.window(r[pos])
        return out

    def knots(self):
        hw, rp = self.half_width, self.ramp
        return tuple(math.exp(t) for t in (-hw, -(hw - rp), hw - rp, hw))

    def params(self):
        return {"a": self.a, "half_width": self.half_width, "ramp": self.ramp}


@dataclass(frozen=True)
class MixtureForm(ClosedForm):
    """Linear combination of closed forms (center-free radial mixture)."""

    coefficients: tuple[float, ...]
    components: tuple[ClosedForm, ...]
    label = "mixture"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, g in zip(self.coefficients, self.components):
            out += c * g(r)
        return out

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, g in zip(self.coefficients, self.components):
            out += c * g.derivative(r)
        return out

    def knots(self):
        out: list[float] = []
        for g in self.components:
            out.extend(g.knots())
        return tuple(sorted(set(out)))

    def params(self):
        return {
            "coefficients": list(self.coefficients),
            "components": [g.descriptor() for g in self.components],
        }


DEFAULT_GRID_POINTS = 2048
DEFAULT_GRID_RANGE = (1e-4, 1e4)


def default_grid(points: int = DEFAULT_GRID_POINTS, lo: float = DEFAULT_GRID_RANGE[0], hi: float = DEFAULT_GRID_RANGE[1]) -> np.ndarray:
    return np.exp(np.linspace(math.log(lo), math.log(hi), points))


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A radial function on R^n sampled on a log grid.

    `closed_form`, when present, is authoritative: operators evaluate it at
    their own quadrature nodes; the stored samples are a view for grid-level
    checks and custom-profile interop.
    """

    grid: np.ndarray
    values: np.ndarray
    dimension: int
    closed_form: ClosedForm | None = None

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.size < 2 or np.any(np.diff(g) <= 0) or g[0] <= 0:
            raise ValueError("grid must be strictly increasing with positive radii")
        if v.shape != g.shape or not np.all(np.isfinite(v)):
            raise ValueError("values must be finite and match the grid")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        if self.closed_form is not None:
            ref = np.asarray(self.closed_form(g), dtype=float)
            scale = max(1.0, float(np.max(np.abs(ref))))
            if np.max(np.abs(ref - v)) > 1e-12 * scale:
                raise ValueError("sampled values disagree with closed form")

    def evaluate(self, r):
        """Profile value at arbitrary radii (closed form, else log-linear interp)."""
        r = np.asarray(r, dtype=float)
        if self.closed_form is not None:
            return self.closed_form(r)
        rq = np.clip(r, self.grid[0], self.grid[-1])
        return np.interp(np.log(rq), np.log(self.grid), self.values)

    def descriptor(self) -> dict:
        base = {"dimension": self.dimension}
        if self.closed_form is not None:
            base.update(self.closed_form.descriptor())
        else:
            base["form"] = "custom"
        return base


def profile_from_form(form: ClosedForm, dimension: int, grid: np.ndarray | None = None) -> RadialProfile:
    g = default_grid() if grid is None else np.asarray(grid, dtype=float)
    return RadialProfile(g, np.asarray(form(g), dtype=float), dimension, form)


# ----------------------------------------------------------------------
# radial integral
# ----------------------------------------------------------------------


def _radial_edges(profile: RadialProfile, per_decade: int) -> np.ndarray:
    lo = min(profile.grid[0], 1e-12)
    hi = profile.grid[-1]
    return log_edges(lo, hi, per_decade)


def radial_integral(profile: RadialProfile, rule: QuadratureRule | None = None, weight_power: float = 0.0) -> float:
    """integral over R^n of f(|x|) |x|^weight_power dx.

    = sigma(S^{n-1}) * int_0^inf f(r) r^{n-1+weight_power} dr.
    Tail decay at the outer grid end is enforced; the small-r end only needs
    an integrable singularity.
    """
    n = profile.dimension
    pw = n - 1 + weight_power
    tail = abs(profile.values[-1]) * profile.grid[-1] ** pw
    peak = float(np.max(np.abs(profile.values * profile.grid**pw))) or 1.0
    if tail > 1e-12 * max(1.0, peak):
        raise TailDecayError(
            f"profile tail {tail:.3e} at r={profile.grid[-1]:g} too large for convergence"
        )
    per_decade = 12
    order = 12
    if rule is not None and rule.kind == "gauss_legendre":
        order = max(4, min(24, rule.node_count))
    if profile.closed_form is not None:
        f = profile.closed_form
        edges = _radial_edges(profile, per_decade)
        val = integrate_panels(lambda r: f(r) * r**pw, edges, order)
    else:
        r = profile.grid
        val = float(np.trapezoid(profile.values * r**pw * r, np.log(r)))
    sigma = sphere_measure(n - 1) if n >= 2 else 2.0
    return sigma * val


def lp_norm(profile: RadialProfile, p: float) -> float:
    """L^p(R^n) norm of |f|."""
    n = profile.dimension
    sigma = sphere_measure(n - 1) if n >= 2 else 2.0
    if profile.closed_form is not None:
        f = profile.closed_form
        edges = _radial_edges(profile, 12)
        val = integrate_panels(lambda r: np.abs(f(r)) ** p * r ** (n - 1), edges, 12)
    else:
        r = profile.grid
        val = float(np.trapezoid(np.abs(profile.values) ** p * r**n, np.log(r)))
    return (sigma * val) ** (1.0 / p)


# ----------------------------------------------------------------------
# zonal integral on S^d
# ----------------------------------------------------------------------


def zonal_density_constant(d: int) -> float:
    """rho_d(t) = c_d (1 - t^2)^{d/2 - 1} integrates to 1 on [-1, 1]."""
    return math.exp(log_gamma((d + 1) / 2.0) - 0.5 * math.log(math.pi) - log_gamma(d / 2.0))


def zonal_integral(
    g: Callable[[np.ndarray], np.ndarray],
    d: int,
    order: int = 12,
    panels_per_side: int = 24,
) -> float:
    """Normalized-measure zonal average int_{S^d} g(xi . eta) dxi.

    Reduces to c_d * int_{-1}^{1} g(t) (1-t^2)^{d/2-1} dt with panels refined
    geometrically toward both endpoints (handles integrable singular g).
    Raises SingularityError when endpoint refinement fails to settle.
    """
    if d < 1:
        raise ValueError("need sphere dimension d >= 1")
    c = zonal_density_constant(d)

    def f(t):
        return np.asarray(g(t), dtype=float) * (1.0 - t * t) ** (d / 2.0 - 1.0)

    def run(n_panels: int) -> float:
        left = geometric_edges(-1.0 + 1e-14, 0.0, -1.0 + 1e-14, n_panels, 2.0)
        right = geometric_edges(0.0, 1.0 - 1e-14, 1.0 - 1e-14, n_panels, 2.0)
        edges = np.concatenate([left, right[1:]])
        return integrate_panels(f, edges, order)

    v1 = run(panels_per_side)
    v2 = run(panels_per_side + 10)
    if not (math.isfinite(v1) and math.isfinite(v2)):
        raise SingularityError("zonal integrand non-integrable at an endpoint")
    if abs(v2 - v1) > 1e-6 * max(1.0, abs(v2)):
        v3 = run(panels_per_side + 22)
        if abs(v3 - v2) > 0.75 * abs(v2 - v1) and abs(v3 - v2) > 1e-6 * max(1.0, abs(v3)):
            raise SingularityError("zonal endpoint refinement diverges")
        return c * v3
    return c * v2


# ----------------------------------------------------------------------
# Monte Carlo
# ----------------------------------------------------------------------

_MC_BLOCK = 1 << 15


def _block_rng(seed: int, block: int) -> np.random.Generator:
    # counter-based substreams: block index placed high in the 256-bit
    # counter so that draws never overlap between blocks, independent of
    # how blocks are scheduled.
    return np.random.Generator(np.random.Philox(key=seed, counter=block << 128))


def _sample(sampler: str, rng: np.random.Generator, m: int, dims: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (points, density) for the named importance sampler."""
    if sampler == "gaussian_importance":
        x = rng.normal(scale=1.0 / math.sqrt(2.0 * math.pi), size=(m, dims))
        q = np.exp(-math.pi * np.sum(x * x, axis=1))
        return x, q
    if sampler == "bubble_importance":
        # multivariate t with 2 degrees of freedom (heavy algebraic tail)
        y = rng.normal(size=(m, dims))
        u = rng.chisquare(2.0, size=m)
        x = y * np.sqrt(2.0 / u)[:, None]
        logc = log_gamma((2.0 + dims) / 2.0) - log_gamma(1.0) - dims / 2.0 * math.log(2.0 * math.pi)
        q = np.exp(logc) * (1.0 + 0.5 * np.sum(x * x, axis=1)) ** (-(2.0 + dims) / 2.0)
        return x, q
    raise ValueError(f"unknown sampler {sampler!r}")


def mc_integrate(
    integrand: Callable[[np.ndarray], np.ndarray],
    dims: int,
    sampler: str,
    rule: QuadratureRule,
) -> tuple[float, float]:
    """Importance-sampled Monte Carlo integral over R^dims.

    `integrand` maps an (m, dims) array to m values.  Deterministic for a
    fixed (seed, node_count): samples are generated in fixed-size blocks,
    each from its own Philox counter substream.
    """
    if rule.kind != "monte_carlo":
        raise ValueError("mc_integrate needs a monte_carlo rule")
    total = int(rule.node_count)
    n_blocks = (total + _MC_BLOCK - 1) // _MC_BLOCK
    s = 0.0
    s2 = 0.0
    count = 0
    for b in range(n_blocks):
        m = min(_MC_BLOCK, total - b * _MC_BLOCK)
        rng = _block_rng(rule.seed, b)
        x, q = _sample(sampler, rng, m, dims)
        vals = np.asarray(integrand(x), dtype=float) / q
        if not np.all(np.isfinite(vals)):
            raise McVarianceError("integrand not finite a.e. under the sampler")
        s += float(np.sum(vals))
        s2 += float(np.sum(vals * vals))
        count += m
    mean = s / count
    var = max(0.0, s2 / count - mean * mean)
    stderr = math.sqrt(var / count)
    if not math.isfinite(stderr) or (stderr > 10.0 * abs(mean) + 1e3):
        raise McVarianceError("variance overflow: estimate dominated by singular mass")
    return mean, stderr


# ----------------------------------------------------------------------
# singular two-point integrals with exclusion extrapolation
# ----------------------------------------------------------------------


def richardson(values: Sequence[float], epsilons: Sequence[float], order: float, order2: float | None = None) -> tuple[float, float]:
    """Extrapolate eps -> 0 given values at decreasing epsilons.

    One known leading order; optional second-level elimination at `order2`
    when three values are supplied.  Returns (value, error_estimate).
    """
    v = list(map(float, values))
    e = list(map(float, epsilons))
    if len(v) == 1:
        return v[0], abs(v[0]) * 1e-3
    def lvl(vv, ee, p):
        out_v, out_e = [], []
        for i in range(len(vv) - 1):
            rho = (ee[i + 1] / ee[i]) ** p
            out_v.append((vv[i + 1] - rho * vv[i]) / (1.0 - rho))
            out_e.append(ee[i + 1])
        return out_v, out_e
    v1, e1 = lvl(v, e, order)
    if len(v1) >= 2 and order2 is not None:
        v2, _ = lvl(v1, e1, order2)
        return v2[-1], abs(v2[-1] - v1[-1])
    return v1[-1], abs(v1[-1] - v[-1])


def singular_double_integral(
    two_point: Callable[[np.ndarray, np.ndarray], np.ndarray],
    interval: tuple[float, float],
    exclusions: Sequence[float],
    leading_order: float,
    second_order: float | None = None,
    outer_panels: int = 48,
    order: int = 10,
) -> tuple[float, float]:
    """int int_{D x D, |x-y| > eps} F(x, y) dx dy, extrapolated to eps -> 0.

    F carries its own singular kernel factor.  The epsilon-excluded values
    are Richardson-extrapolated with the supplied leading order (e.g.
    2 - 2*alpha for squared difference quotients, n - gamma for potentials).
    Diverging successive estimates raise SingularityError.
    """
    a, b = interval
    eps_list = sorted(set(float(e) for e in exclusions), reverse=True)
    if not eps_list:
        raise ValueError("need at least one exclusion radius")

    outer_edges = np.linspace(a, b, outer_panels + 1)
    xs, wx = composite_nodes(outer_edges, order)

    def value_at(eps: float) -> float:
        total = 0.0
        for x, w in zip(xs, wx):
            pieces = []
            if x - eps > a:
                edges = geometric_edges(a, x - eps, x - eps, 18, 2.0)
                pieces.append(edges)
            if x + eps < b:
                edges = geometric_edges(x + eps, b, x + eps, 18, 2.0)
                pieces.append(edges)
            acc = 0.0
            for edges in pieces:
                ys, wy = composite_nodes(edges, order)
                acc += float(np.dot(wy, two_point(np.full_like(ys, x), ys)))
            total += w * acc
        return total

    vals = [value_at(e) for e in eps_list]
    if len(vals) >= 2:
        steps = [abs(vals[i + 1] - vals[i]) for i in range(len(vals) - 1)]
        if len(steps) >= 2 and steps[-1] > 4.0 * steps[-2] and steps[-1] > 1e-9:
            raise SingularityError("exclusion steps diverge: non-cancelling singularity")
    return richardson(vals, eps_list, leading_order, second_order)
