"""Weighted transfer (Ruelle) operators: leading eigendata, Gibbs measures, pressure.

The operator L phi(x) = sum over preimages y of psi(y) phi(y) is iterated two
ways: on a uniform grid through its Fourier-side form (multiply by psi, then
decimate the spectrum), which converges to the eigenfunction h, and on the
algebra of q-adic cylinders through the adjoint (a transition matrix on
cylinder masses), which converges to the eigenmeasure nu.  The invariant
measure has density h against nu, and log of the common eigenvalue is the
pressure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, SchemaError
from .torusfn import TorusFunction
from .transfer import ExpandingMap

DEFAULT_GIBBS_GRID = 8 * 3**7
DEFAULT_PRESSURE_GRID = 8 * 3**5

RHO_STALL_TOL = 1e-12
RESIDUAL_TOL = 1e-8
MAX_ITERATIONS = 100_000


class Potential:
    """Strictly positive weight function psi on the circle.

    Kinds:
      * ``poly``: psi is a real trigonometric polynomial (must be positive);
      * ``exp``:  psi = exp(t * g) for a real polynomial g (always positive);
      * ``grid``: sampled values only (used for normalized operators; no
        off-grid evaluation, so cylinder machinery is unavailable).
    """

    def __init__(self, kind: str, base=None, t: float = 1.0, grid_values=None):
        if kind not in ("poly", "exp", "grid"):
            raise SchemaError(f"unknown potential kind {kind!r}")
        self.kind = kind
        self.base = base
        self.t = float(t)
        self.grid_values = None if grid_values is None else np.asarray(grid_values, float)
        if kind in ("poly", "exp") and not base.is_real_valued:
            raise SchemaError("potential base must be real-valued")
        if kind == "poly":
            quick = base.samples(max(1024, 8 * (2 * base.max_freq + 1))).real
            if quick.min() <= 0:
                raise SchemaError("potential must be strictly positive on the grid")
        if kind == "grid" and self.grid_values.min() <= 0:
            raise SchemaError("potential must be strictly positive on the grid")

    @classmethod
    def constant(cls, c: float) -> "Potential":
        if c <= 0:
            raise SchemaError("constant potential must be positive")
        return cls("poly", TorusFunction.constant(float(c)))

    @classmethod
    def from_function(cls, tf: TorusFunction) -> "Potential":
        return cls("poly", tf)

    @classmethod
    def tilt(cls, g: TorusFunction, t: float) -> "Potential":
        """psi = exp(t * g)."""
        return cls("exp", g, t=t)

    def values(self, M: int) -> np.ndarray:
        if self.kind == "poly":
            return self.base.samples(M).real
        if self.kind == "exp":
            return np.exp(self.t * self.base.samples(M).real)
        if len(self.grid_values) != M:
            raise SchemaError(
                f"grid potential sampled at {len(self.grid_values)} points, requested {M}"
            )
        return self.grid_values

    def __call__(self, x):
        if self.kind == "poly":
            return np.real(self.base.evaluate(x))
        if self.kind == "exp":
            return np.exp(self.t * np.real(self.base.evaluate(x)))
        raise SchemaError("grid potentials cannot be evaluated off-grid")

    def __repr__(self) -> str:
        if self.kind == "exp":
            return f"Potential.tilt(t={self.t})"
        return f"Potential(kind={self.kind!r})"


@dataclass(frozen=True)
class RuelleOperator:
    map: ExpandingMap
    potential: Potential
    normalized: bool = False


def apply_grid(op: RuelleOperator, phi: np.ndarray, psi_vals: np.ndarray) -> np.ndarray:
    """One application of L on grid samples via spectral decimation.

    Multiplying by psi and summing over preimages sends the coefficient at
    frequency q*k to frequency k (times q); frequencies outside the resolved
    band are dropped, which is exact up to the spectral tail of psi*phi.
    """
    M = len(phi)
    q = op.map.q
    u = psi_vals * phi
    spec = np.fft.fft(u) / M
    K = (M // 2) // q
    ks = np.arange(-K, K + 1)
    new_spec = np.zeros(M, dtype=np.complex128)
    new_spec[np.mod(ks, M)] = q * spec[np.mod(q * ks, M)]
    return np.fft.ifft(new_spec) * M


def apply_pointwise(op: RuelleOperator, phi_fn, x):
    """L phi at arbitrary points by the preimage sum (phi_fn is a callable)."""
    pts = op.map.preimages(x)
    return np.sum(op.potential(pts) * phi_fn(pts), axis=-1)


def leading_eigendata(
    op: RuelleOperator,
    grid_size: int = DEFAULT_GIBBS_GRID,
    tol: float = RHO_STALL_TOL,
    max_iter: int = MAX_ITERATIONS,
):
    """Power iteration for the leading eigenvalue and positive eigenfunction.

    Iterates phi -> L phi normalized to unit mean until successive eigenvalue
    estimates stall below ``tol``; raises on cap with the last residuals.
    Returns (rho, h_grid, iterations, residual).
    """
    M = int(grid_size)
    psi = op.potential.values(M)
    if psi.min() <= 0:
        raise SchemaError("potential must be strictly positive on the grid")
    phi = np.ones(M)
    rho_prev = None
    rho = float("nan")
    resid = math.inf
    for it in range(1, max_iter + 1):
        nxt = apply_grid(op, phi, psi).real
        rho = float(np.mean(nxt))
        resid = float(np.max(np.abs(nxt - rho * phi)) / np.max(np.abs(phi)))
        phi = nxt / rho
        if rho_prev is not None and abs(rho - rho_prev) < tol and resid < 0.1 * RESIDUAL_TOL:
            break
        rho_prev = rho
    else:
        raise NumericalError(
            "power iteration did not stall within the cap",
            {"rho": rho, "residual": resid, "iterations": max_iter},
        )
    return rho, phi, it, resid


def _grid_residual(op, phi, psi, rho) -> float:
    err = apply_grid(op, phi, psi).real - rho * phi
    return float(np.max(np.abs(err)) / np.max(np.abs(phi)))


def ulam_adjoint(
    op: RuelleOperator,
    depth: int,
    tol: float = RHO_STALL_TOL,
    max_iter: int = MAX_ITERATIONS,
):
    """Adjoint iteration on q-adic cylinder masses at the given depth.

    The adjoint sends the mass vector nu to the vector of integrals of
    L(indicator of each cylinder); with midpoint evaluation of psi on child
    cylinders this is a sparse nonnegative matrix applied in O(q^depth * q).
    Returns (rho, nu, iterations, l1_residual).
    """
    q, m = op.map.q, int(depth)
    if m < 1:
        raise SchemaError("cylinder depth must be at least 1")
    n = q**m
    j = np.arange(n)
    first_digit = j // q ** (m - 1)
    rest = j % q ** (m - 1)
    children = q * rest[:, None] + np.arange(q)[None, :]
    y = ((children + 0.5) / n + first_digit[:, None]) / q
    w = op.potential(y)
    nu = np.full(n, 1.0 / n)
    rho_prev = None
    rho = float("nan")
    resid = math.inf
    for it in range(1, max_iter + 1):
        new = np.sum(w * nu[children], axis=1)
        rho = float(np.sum(new))
        resid = float(np.sum(np.abs(new - rho * nu)))
        nu = new / rho
        if rho_prev is not None and abs(rho - rho_prev) < tol and resid < 0.1 * RESIDUAL_TOL:
            break
        rho_prev = rho
    else:
        raise NumericalError(
            "cylinder adjoint iteration did not stall within the cap",
            {"rho": rho, "residual": resid, "iterations": max_iter},
        )
    return rho, nu, it, resid


def resample_grid(values: np.ndarray, new_size: int) -> np.ndarray:
    """Trigonometric resampling of grid samples onto a different uniform grid."""
    M = len(values)
    spec = np.fft.fft(values) / M
    K = min(M, new_size) // 2 - 1
    ks = np.arange(-K, K + 1)
    new_spec = np.zeros(new_size, dtype=np.complex128)
    new_spec[np.mod(ks, new_size)] = spec[np.mod(ks, M)]
    return np.fft.ifft(new_spec).real * new_size


def _values_at_centers(h_grid: np.ndarray, q: int, depth: int) -> np.ndarray:
    """Eigenfunction values at cylinder centers (j + 1/2) / q^depth."""
    n = q**depth
    fine = resample_grid(h_grid, 2 * n)
    return fine[1::2]


@dataclass
class GibbsSolution:
    """Discretized eigendata (rho, h, nu, mu) of a weighted transfer operator.

    ``h`` lives on a uniform grid of ``grid_size`` points; ``nu`` and ``mu``
    are mass vectors over the q^depth cylinders with ``mu`` proportional to
    nu weighted by h and normalized so <nu, h> = 1.  ``pressure`` is log rho.
    """

    operator: RuelleOperator
    rho: float
    rho_ulam: float
    h: np.ndarray
    nu: np.ndarray
    mu: np.ndarray
    mu_grid: np.ndarray
    pressure: float
    depth: int
    grid_size: int
    iterations: dict
    residuals: dict

    @property
    def q(self) -> int:
        return self.operator.map.q

    def h_at_centers(self) -> np.ndarray:
        return _values_at_centers(self.h, self.q, self.depth)

    def cylinder_masses(self, depth: int) -> np.ndarray:
        """nu masses aggregated to a coarser cylinder depth."""
        if depth > self.depth or depth < 1:
            raise SchemaError("requested depth not covered by the solution")
        return self.nu.reshape(self.q**depth, -1).sum(axis=1)

    def mu_masses(self, depth: int) -> np.ndarray:
        if depth > self.depth or depth < 1:
            raise SchemaError("requested depth not covered by the solution")
        return self.mu.reshape(self.q**depth, -1).sum(axis=1)


def solve(
    op: RuelleOperator,
    depth: int = 8,
    grid_size: int = DEFAULT_GIBBS_GRID,
    tol: float = RHO_STALL_TOL,
    max_iter: int = MAX_ITERATIONS,
) -> GibbsSolution:
    """Full eigendata: grid eigenfunction, cylinder eigenmeasure, Gibbs weights."""
    rho, h, it_h, resid_h = leading_eigendata(op, grid_size, tol, max_iter)
    rho_u, nu, it_nu, resid_nu = ulam_adjoint(op, depth, tol, max_iter)
    h_centers = _values_at_centers(h, op.map.q, depth)
    pairing = float(np.sum(nu * h_centers))
    if pairing <= 0:
        raise NumericalError("eigendata pairing is not positive", {"pairing": pairing})
    h = h / pairing
    h_centers = h_centers / pairing
    mu = nu * h_centers
    mu = mu / np.sum(mu)
    n = op.map.q**depth
    grid_x = np.arange(grid_size) / grid_size
    cyl_idx = np.minimum((grid_x * n).astype(np.int64), n - 1)
    mu_grid = h * (nu[cyl_idx] * n)
    return GibbsSolution(
        operator=op,
        rho=rho,
        rho_ulam=rho_u,
        h=h,
        nu=nu,
        mu=mu,
        mu_grid=mu_grid,
        pressure=math.log(rho),
        depth=depth,
        grid_size=grid_size,
        iterations={"grid": it_h, "ulam": it_nu},
        residuals={"grid": resid_h, "ulam": resid_nu},
    )


def normalized_operator(sol: GibbsSolution) -> tuple[RuelleOperator, float]:
    """The operator with potential psi h / (rho * h o T) and its grid max |L1 - 1|.

    The reweighted potential fixes the constant function; the returned check
    value certifies it on the solution grid.
    """
    op = sol.operator
    M = sol.grid_size
    psi = op.potential.values(M)
    h = sol.h
    h_T = h[np.mod(op.map.q * np.arange(M), M)]
    psi_norm = psi * h / (sol.rho * h_T)
    norm_op = RuelleOperator(op.map, Potential("grid", grid_values=psi_norm), normalized=True)
    ones = np.ones(M)
    check = float(np.max(np.abs(apply_grid(norm_op, ones, psi_norm).real - 1.0)))
    if check > 1e-8:
        raise NumericalError("normalized operator does not fix constants", {"check": check})
    return norm_op, check


@dataclass
class GibbsRatioReport:
    """Cylinder-mass to weight-product ratios across depths.

    ``ratio`` rows hold (depth, min, max); ``constant`` is the worst
    two-sided bound max(max, 1/min) over all depths; ``growth_per_depth`` is
    the geometric-mean growth of the spread per depth step.
    """

    rows: list
    constant: float
    growth_per_depth: float


def gibbs_property_check(
    sol: GibbsSolution, samples: int | None = None, seed=0
) -> GibbsRatioReport:
    """Compare nu(cylinder) with rho^-n * product of potential weights.

    For each depth n <= solution depth, evaluates
    nu(C_n(x)) / (rho^-n G_n(x_center)) with G_n the running product of the
    potential along the orbit of the cylinder center.  Returns min/max per
    depth and the worst two-sided constant.
    """
    op = sol.operator
    q, m = sol.q, sol.depth
    rng = np.random.default_rng(seed)
    rows = []
    spreads = []
    for n in range(1, m + 1):
        count = q**n
        masses = sol.cylinder_masses(n)
        idx = np.arange(count)
        if samples is not None and samples < count:
            idx = np.sort(rng.choice(count, size=samples, replace=False))
        centers = (idx + 0.5) / count
        g = np.ones(len(idx))
        x = centers.copy()
        for _ in range(n):
            g *= op.potential(x)
            x = np.mod(q * x, 1.0)
        ratio = masses[idx] * (sol.rho_ulam**n) / g
        lo, hi = float(np.min(ratio)), float(np.max(ratio))
        rows.append((n, lo, hi))
        spreads.append(hi / lo)
    constant = max(max(hi, 1.0 / lo) for _, lo, hi in rows)
    if m > 1:
        growth = (spreads[-1] / spreads[0]) ** (1.0 / (m - 1))
    else:
        growth = 1.0
    return GibbsRatioReport(rows, constant, float(growth))


@dataclass
class PressureCurve:
    """log of the leading eigenvalue of exp(t*g)-weighted operators on a t-grid.

    ``m`` holds the derivative estimates (tilted means) by second-order
    differences; ``convexity_cert`` is the smallest second difference.
    """

    ts: np.ndarray
    P: np.ndarray
    m: np.ndarray
    convexity_cert: float
    diagnostics: dict = field(default_factory=dict)


def pressure_curve(
    map_: ExpandingMap,
    g: TorusFunction,
    ts,
    grid_size: int = DEFAULT_PRESSURE_GRID,
    tol: float = RHO_STALL_TOL,
    tilt_floor: float = 0.05,
) -> PressureCurve:
    """Pressure P(t) = log rho(t) for potentials exp(t*g) on a parameter grid.

    Requires real-valued g with zero mean.  Derivatives come from central
    differences (second-order one-sided at the ends).  Diagnostics record the
    pressure at t = 0 against log q when the grid contains 0, the derivative
    there, and the smallest |m_t| over |t| >= ``tilt_floor`` (strict convexity
    makes the tilted mean nonzero away from 0).
    """
    if not g.is_real_valued:
        raise SchemaError("pressure curve requires a real-valued tilt direction")
    if g.coeff(0) != 0:
        raise SchemaError("pressure curve requires a mean-zero tilt direction")
    ts = np.asarray(list(ts), dtype=np.float64)
    if len(ts) < 3:
        raise SchemaError("need at least three parameter values")
    steps = np.diff(ts)
    if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > 1e-12:
        raise SchemaError("parameter grid must be uniform and increasing")
    dt = float(steps[0])
    P = np.empty(len(ts))
    for i, t in enumerate(ts):
        op = RuelleOperator(map_, Potential.tilt(g, float(t)))
        rho, _, _, _ = leading_eigendata(op, grid_size, tol)
        P[i] = math.log(rho)
    m = np.empty_like(P)
    m[1:-1] = (P[2:] - P[:-2]) / (2 * dt)
    m[0] = (-3 * P[0] + 4 * P[1] - P[2]) / (2 * dt)
    m[-1] = (3 * P[-1] - 4 * P[-2] + P[-3]) / (2 * dt)
    second = np.diff(P, 2) / dt**2
    diagnostics: dict = {"grid_size": grid_size, "dt": dt}
    zero_idx = np.nonzero(np.isclose(ts, 0.0, atol=1e-12))[0]
    if zero_idx.size:
        i0 = int(zero_idx[0])
        diagnostics["p_at_zero_error"] = abs(P[i0] - math.log(map_.q))
        diagnostics["m_at_zero"] = float(m[i0])
    away = np.abs(ts) >= tilt_floor
    if np.any(away):
        diagnostics["min_abs_m_away_from_zero"] = float(np.min(np.abs(m[away])))
    return PressureCurve(ts, P, m, float(np.min(second)) if len(second) else math.inf, diagnostics)


def pressure_derivative(
    map_: ExpandingMap,
    g: TorusFunction,
    t: float,
    dt: float = 0.01,
    grid_size: int = DEFAULT_PRESSURE_GRID,
) -> float:
    """Central-difference tilted mean m_t = P'(t) at a single parameter."""
    vals = []
    for tt in (t - dt, t + dt):
        op = RuelleOperator(map_, Potential.tilt(g, tt))
        rho, _, _, _ = leading_eigendata(op, grid_size)
        vals.append(math.log(rho))
    return (vals[1] - vals[0]) / (2 * dt)


def sample_mu_t(sol: GibbsSolution, count: int, seed) -> np.ndarray:
    """Draw points from the Gibbs measure: cylinder by mu-weight, then uniform.

    Deterministic for a fixed seed (single PCG64 stream, fixed call order).
    """
    if count <= 0:
        raise SchemaError("sample count must be positive")
    rng = np.random.default_rng(seed)
    n = sol.q**sol.depth
    idx = rng.choice(n, size=count, p=sol.mu)
    u = rng.random(count)
    return (idx + u) / n
