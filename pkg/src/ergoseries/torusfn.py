"""Functions on the circle T = R/Z held as finitely supported Fourier data.

A :class:`TorusFunction` stores a finite coefficient table ``{n: c_n}`` and
evaluates ``sum_n c_n exp(2*pi*i*n*x)`` exactly as that finite sum, so every
norm and every downstream operator test has an analytic reference value.
Uniform-grid samples are derived from the coefficients by spectrum placement
and an inverse FFT, which reproduces the trigonometric sum to rounding error
whenever the grid resolves the support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SchemaError

#: Default uniform grid: 8 * 3**7.  A power of the base-3 map times a binary
#: refinement, so grid points stay on the grid under x -> 3x and cylinder
#: midpoints up to depth 7 are grid points.
DEFAULT_GRID_SIZE = 8 * 3**7

_REAL_SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class NormBounds:
    """Norms of a trigonometric polynomial; the sup norm is an interval.

    ``sup_lower`` is the max of |f| over the evaluation grid (a certified
    lower bound); ``sup_upper`` adds a Bernstein-type slack and is capped by
    the Wiener norm, which dominates the sup norm unconditionally.
    """

    sup_lower: float
    sup_upper: float
    l2: float
    wiener: float


class TorusFunction:
    """Trigonometric polynomial ``f(x) = sum_n c_n exp(2 pi i n x)``.

    Immutable after construction; all operations return new instances.
    """

    __slots__ = ("_freqs", "_amps", "grid_size", "_samples_cache")

    def __init__(self, coeffs, grid_size: int = DEFAULT_GRID_SIZE):
        """Build from a mapping ``{frequency: amplitude}``.

        Zero amplitudes are dropped except the mean coefficient, which is
        always stored explicitly (possibly as 0).
        """
        if grid_size <= 0:
            raise SchemaError("grid_size must be a positive integer")
        items = {int(n): complex(c) for n, c in dict(coeffs).items()}
        items.setdefault(0, 0j)
        items = {n: c for n, c in items.items() if c != 0 or n == 0}
        freqs = np.array(sorted(items), dtype=np.int64)
        amps = np.array([items[n] for n in freqs], dtype=np.complex128)
        freqs.setflags(write=False)
        amps.setflags(write=False)
        self._freqs = freqs
        self._amps = amps
        self.grid_size = int(grid_size)
        self._samples_cache = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, grid_size: int = DEFAULT_GRID_SIZE) -> "TorusFunction":
        return cls({0: 0.0}, grid_size)

    @classmethod
    def constant(cls, c, grid_size: int = DEFAULT_GRID_SIZE) -> "TorusFunction":
        return cls({0: c}, grid_size)

    @classmethod
    def exponential(cls, n: int, amp=1.0, grid_size: int = DEFAULT_GRID_SIZE) -> "TorusFunction":
        """The character exp(2 pi i n x) scaled by ``amp``."""
        return cls({int(n): amp}, grid_size)

    @classmethod
    def cosine(cls, n: int, amp: float = 1.0, grid_size: int = DEFAULT_GRID_SIZE) -> "TorusFunction":
        """amp * cos(2 pi n x) as the pair of conjugate coefficients."""
        n = int(n)
        if n == 0:
            return cls({0: amp}, grid_size)
        return cls({n: amp / 2, -n: amp / 2}, grid_size)

    @classmethod
    def sine(cls, n: int, amp: float = 1.0, grid_size: int = DEFAULT_GRID_SIZE) -> "TorusFunction":
        """amp * sin(2 pi n x)."""
        n = int(n)
        if n == 0:
            return cls.zero(grid_size)
        return cls({n: amp / (2j), -n: -amp / (2j)}, grid_size)

    @classmethod
    def from_cosines(cls, table, grid_size: int = DEFAULT_GRID_SIZE) -> "TorusFunction":
        """Real function sum_k amp_k cos(2 pi k x) from ``{k: amp_k}``."""
        coeffs: dict[int, complex] = {0: 0j}
        for k, amp in table.items():
            k = int(k)
            if k == 0:
                coeffs[0] = coeffs.get(0, 0j) + amp
            else:
                coeffs[k] = coeffs.get(k, 0j) + amp / 2
                coeffs[-k] = coeffs.get(-k, 0j) + amp / 2
        return cls(coeffs, grid_size)

    # -- basic data ------------------------------------------------------------

    @property
    def freqs(self) -> np.ndarray:
        return self._freqs

    @property
    def amps(self) -> np.ndarray:
        return self._amps

    def coeff(self, n: int) -> complex:
        idx = np.searchsorted(self._freqs, int(n))
        if idx < len(self._freqs) and self._freqs[idx] == n:
            return complex(self._amps[idx])
        return 0j

    def coeffs_dict(self) -> dict[int, complex]:
        return {int(n): complex(c) for n, c in zip(self._freqs, self._amps)}

    @property
    def max_freq(self) -> int:
        return int(np.max(np.abs(self._freqs)))

    @property
    def is_zero(self) -> bool:
        return len(self._freqs) == 1 and self._amps[0] == 0

    @property
    def is_real_valued(self) -> bool:
        """True when the table satisfies c_{-n} = conj(c_n) to 1e-12."""
        scale = float(np.max(np.abs(self._amps))) or 1.0
        for n, c in zip(self._freqs, self._amps):
            mirror = self.coeff(-int(n))
            if abs(mirror - np.conj(c)) > _REAL_SYMMETRY_TOL * scale:
                return False
        return True

    # -- algebra ----------------------------------------------------------------

    def __add__(self, other: "TorusFunction") -> "TorusFunction":
        coeffs = self.coeffs_dict()
        for n, c in other.coeffs_dict().items():
            coeffs[n] = coeffs.get(n, 0j) + c
        return TorusFunction(coeffs, max(self.grid_size, other.grid_size))

    def __sub__(self, other: "TorusFunction") -> "TorusFunction":
        return self + other.scale(-1.0)

    def scale(self, factor) -> "TorusFunction":
        return TorusFunction(
            {int(n): factor * c for n, c in zip(self._freqs, self._amps)}, self.grid_size
        )

    def derivative(self) -> "TorusFunction":
        """Term-by-term derivative; the mean coefficient vanishes exactly."""
        return TorusFunction(
            {int(n): 2j * np.pi * n * c for n, c in zip(self._freqs, self._amps)},
            self.grid_size,
        )

    def with_grid_size(self, grid_size: int) -> "TorusFunction":
        return TorusFunction(self.coeffs_dict(), grid_size)

    # -- evaluation --------------------------------------------------------------

    def evaluate(self, x):
        """Exact finite sum sum_n c_n exp(2 pi i n x); accepts scalars or arrays."""
        x_arr = np.asarray(x, dtype=np.float64)
        phase = np.exp(2j * np.pi * np.multiply.outer(x_arr, self._freqs.astype(np.float64)))
        out = phase @ self._amps
        if np.isscalar(x) or x_arr.ndim == 0:
            return complex(out)
        return out

    def __call__(self, x):
        return self.evaluate(x)

    def samples(self, grid_size: int | None = None) -> np.ndarray:
        """Values at x_j = j/M via spectrum placement and inverse FFT.

        Requires M > 2*max_freq so that no two coefficients alias.
        """
        M = int(grid_size or self.grid_size)
        if M <= 2 * self.max_freq:
            raise SchemaError(
                f"grid of size {M} cannot resolve frequencies up to {self.max_freq}"
            )
        if grid_size is None and self._samples_cache is not None:
            return self._samples_cache
        spec = np.zeros(M, dtype=np.complex128)
        np.add.at(spec, np.mod(self._freqs, M), self._amps)
        vals = np.fft.ifft(spec) * M
        vals.setflags(write=False)
        if grid_size is None:
            self._samples_cache = vals
        return vals

    # -- norms and moduli ----------------------------------------------------------

    @property
    def wiener_norm(self) -> float:
        return float(np.sum(np.abs(self._amps)))

    @property
    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self._amps) ** 2)))

    def norms(self) -> NormBounds:
        """Exact Wiener and L2 norms plus a certified sup-norm interval.

        The sup is bracketed by the max over a grid at least 8x the Nyquist
        size and that max plus the slack 2*pi*max_freq*wiener/M; the Wiener
        norm caps the upper end since it dominates the sup norm.
        """
        wiener = self.wiener_norm
        l2 = self.l2_norm
        if self.is_zero:
            return NormBounds(0.0, 0.0, 0.0, 0.0)
        M = max(self.grid_size, 8 * (2 * self.max_freq + 1))
        lower = float(np.max(np.abs(self.samples(M))))
        slack = 2 * np.pi * self.max_freq * wiener / M
        upper = min(lower + slack, wiener)
        return NormBounds(lower, max(upper, lower), l2, wiener)

    # -- text import/export ----------------------------------------------------------

    def to_text(self, path) -> None:
        """Write the coefficient table as frequency-sorted lines ``n re im``."""
        lines = [
            f"{int(n)} {float(c.real)!r} {float(c.imag)!r}"
            for n, c in zip(self._freqs, self._amps)
        ]
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_text(cls, path, grid_size: int = DEFAULT_GRID_SIZE) -> "TorusFunction":
        coeffs: dict[int, complex] = {}
        with open(path, "r", encoding="ascii") as fh:
            for raw in fh:
                raw = raw.strip()
                if not raw or raw.startswith("#"):
                    continue
                parts = raw.split()
                if len(parts) != 3:
                    raise SchemaError(f"bad coefficient line: {raw!r}")
                n, re, im = int(parts[0]), float(parts[1]), float(parts[2])
                if n in coeffs:
                    raise SchemaError(f"duplicate frequency {n} in coefficient table")
                coeffs[n] = complex(re, im)
        return cls(coeffs, grid_size)

    def __repr__(self) -> str:
        support = len(self._freqs)
        return f"TorusFunction(support={support}, max_freq={self.max_freq})"


class ModulusOfContinuity:
    """A modulus omega(t): nondecreasing, omega(0) = 0, with its Dini integral.

    Kinds:
      * ``holder``:   omega(t) = c * t**delta
      * ``logpower``: omega(t) = c / |log t|**alpha for t <= 1/e, capped at c
        beyond (keeps omega bounded and nondecreasing)
      * ``empirical``: a sampled table of (t, omega(t)) pairs
    """

    def __init__(self, kind: str, *, delta=None, c=None, alpha=None, table=None):
        if kind not in ("holder", "logpower", "empirical"):
            raise SchemaError(f"unknown modulus kind {kind!r}")
        self.kind = kind
        self.delta = delta
        self.c = c
        self.alpha = alpha
        if table is not None:
            table = tuple((float(t), float(v)) for t, v in table)
            ts = [t for t, _ in table]
            vs = [v for _, v in table]
            if any(t <= 0 for t in ts) or sorted(ts) != ts:
                raise SchemaError("empirical modulus table must have increasing t > 0")
            if any(b < a - 1e-12 for a, b in zip(vs, vs[1:])):
                raise SchemaError("empirical modulus table must be nondecreasing")
            if any(v < -1e-15 for v in vs):
                raise SchemaError("modulus values must be nonnegative")
        self.table = table

    @classmethod
    def holder(cls, delta: float, c: float = 1.0) -> "ModulusOfContinuity":
        if not 0 < delta <= 1:
            raise SchemaError("Holder exponent must lie in (0, 1]")
        return cls("holder", delta=float(delta), c=float(c))

    @classmethod
    def log_power(cls, alpha: float, c: float = 1.0) -> "ModulusOfContinuity":
        if alpha <= 0:
            raise SchemaError("log-power exponent must be positive")
        return cls("logpower", alpha=float(alpha), c=float(c))

    @classmethod
    def empirical(cls, table) -> "ModulusOfContinuity":
        return cls("empirical", table=table)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "holder":
            out = self.c * np.power(np.clip(t, 0.0, None), self.delta)
        elif self.kind == "logpower":
            tc = np.clip(t, 0.0, None)
            inner = np.where((tc > 0) & (tc < math.exp(-1.0)), tc, math.exp(-1.0))
            out = np.where(
                tc >= math.exp(-1.0),
                self.c,
                np.where(tc > 0, self.c / np.abs(np.log(inner)) ** self.alpha, 0.0),
            )
        else:
            ts = np.array([p[0] for p in self.table])
            vs = np.array([p[1] for p in self.table])
            # right-continuous step function: value v_i on [t_i, t_{i+1})
            idx = np.searchsorted(ts, t, side="right")
            padded = np.concatenate([[0.0], vs])
            out = padded[np.clip(idx, 0, len(vs))]
        return float(out) if out.ndim == 0 else out

    @property
    def dini_integral(self) -> float:
        """Value of the integral of omega(t)/t over (0, 1]; +inf if divergent.

        Holder: closed form c/delta.  Log-power: finite iff alpha > 1, with
        the cap at t = 1/e contributing exactly c.  Empirical tables report
        the trapezoid value over the covered range (a finite lower proxy).
        """
        if self.kind == "holder":
            return self.c / self.delta
        if self.kind == "logpower":
            if self.alpha <= 1:
                return math.inf
            return self.c * (1.0 / (self.alpha - 1.0) + 1.0)
        ts = np.array([p[0] for p in self.table])
        vs = np.array([p[1] for p in self.table])
        if len(ts) < 2:
            return 0.0
        return float(np.trapezoid(vs / ts, ts))

    def validate_shape(self, t_grid=None) -> None:
        """Check nondecreasing, omega(0+) -> 0 (for analytic kinds), on samples."""
        if t_grid is None:
            t_grid = np.geomspace(1e-9, 0.5, 64)
        vals = self(np.asarray(t_grid))
        if np.any(np.diff(vals) < -1e-12):
            raise SchemaError("modulus is not nondecreasing on the sample grid")
        if self(0.0) != 0.0:
            raise SchemaError("modulus does not vanish at 0")

    def __repr__(self) -> str:
        if self.kind == "holder":
            return f"ModulusOfContinuity.holder(delta={self.delta}, c={self.c})"
        if self.kind == "logpower":
            return f"ModulusOfContinuity.log_power(alpha={self.alpha}, c={self.c})"
        return f"ModulusOfContinuity.empirical({len(self.table)} points)"


def empirical_modulus(f: TorusFunction, scales) -> ModulusOfContinuity:
    """Grid estimate of Omega_f(delta) = sup_{|x-y| <= delta} |f(x) - f(y)|.

    ``scales`` must be positive and decreasing; scales below two grid steps
    are rejected as unresolvable.  The returned table is nondecreasing in
    delta, and the doubling property Omega(2 delta) <= 2 Omega(delta) is
    asserted (with one-grid-step slack) whenever both points are tabulated.
    """
    scales = [float(s) for s in scales]
    if not scales or any(s <= 0 for s in scales):
        raise SchemaError("scales must be positive")
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise SchemaError("scales must be strictly decreasing")
    M = f.grid_size
    if min(scales) < 2.0 / M:
        raise SchemaError(
            f"scale {min(scales)} is below the grid resolution 2/{M}"
        )
    vals = f.samples()
    kmax = int(np.floor(max(scales) * M + 1e-9))
    kmax = min(kmax, M - 1)
    # per-shift maxima, then prefix-max to get Omega on each scale
    shift_max = np.empty(kmax + 1)
    shift_max[0] = 0.0
    for k in range(1, kmax + 1):
        shift_max[k] = float(np.max(np.abs(np.roll(vals, -k) - vals)))
    prefix = np.maximum.accumulate(shift_max)
    one_step = shift_max[1] if kmax >= 1 else 0.0

    table = []
    for s in sorted(scales):
        k = min(int(np.floor(s * M + 1e-9)), kmax)
        table.append((s, float(prefix[k])))
    omega = {s: v for s, v in table}
    for s, v in table:
        if 2 * s in omega:
            if omega[2 * s] > 2 * v + one_step + 1e-12:
                raise SchemaError(
                    f"doubling property violated at delta={s}: "
                    f"Omega(2d)={omega[2 * s]} > 2*Omega(d)={2 * v}"
                )
    return ModulusOfContinuity.empirical(table)
