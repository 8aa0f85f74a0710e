"""Synthetic curve panels: mean signals, stochastic paths, and noise.

Generates the panel Y_ij = f(t_j) + Z_i(t_j) + eps_ij for four process
families (Brownian bridge, Brownian motion, stationary AR(1), and its
cumulative-sum integration), with calibration of the noise level via the
process-to-noise variance ratio and of the signal amplitude via a target
signal-to-noise ratio.  Also computes theoretical coefficient variances
from a covariance kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid_basis import BasisMatrix, Grid

__all__ = [
    "SignalSpec",
    "ProcessSpec",
    "PanelConfig",
    "CurvePanel",
    "Calibration",
    "eval_signal",
    "covariance_kernel",
    "covariance_matrix",
    "simulate_process",
    "median_process_variance",
    "calibrate",
    "generate_panel",
    "sigma_k_theoretical",
]

SIGNAL_KINDS = ("signal1", "signal2", "custom")
PROCESS_KINDS = ("bb", "bm", "ar1", "arima11")


@dataclass(frozen=True)
class SignalSpec:
    """Mean-function family.

    signal1 is a pair of Gaussian bumps (amplitudes c1, c2), signal2 a
    pair of indicator plateaus (common amplitude c3), custom a fixed
    vector of grid values.
    """

    kind: str = "signal1"
    c1: float = 0.75
    c2: float = 1.93
    c3: float = 1.0
    custom_values: tuple | None = None

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal kind {self.kind!r}")
        for name in ("c1", "c2", "c3"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"signal amplitude {name} must be finite")
        if self.kind == "custom":
            if self.custom_values is None:
                raise ValueError("custom signal needs custom_values")
            object.__setattr__(self, "custom_values", tuple(float(v) for v in self.custom_values))


@dataclass(frozen=True)
class ProcessSpec:
    """Zero-mean process family; ar_phi/innovation_sd only drive ar1/arima11."""

    kind: str = "bb"
    ar_phi: float = 0.5
    innovation_sd: float = 1.0

    def __post_init__(self):
        if self.kind not in PROCESS_KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}")
        if not -1.0 < self.ar_phi < 1.0:
            raise ValueError(f"ar_phi must be in (-1,1), got {self.ar_phi}")
        if not self.innovation_sd > 0.0:
            raise ValueError("innovation_sd must be positive")


@dataclass(frozen=True, eq=False)
class PanelConfig:
    n: int
    grid: Grid
    signal: SignalSpec
    process: ProcessSpec
    noise_sd: float
    seed: int

    def __post_init__(self):
        # n >= 2 so the coefficient sample SD downstream is defined
        if self.n < 2:
            raise ValueError(f"panel needs n >= 2 curves, got {self.n}")
        if self.noise_sd < 0.0:
            raise ValueError("noise_sd must be nonnegative")


@dataclass(frozen=True, eq=False)
class CurvePanel:
    grid: Grid
    Y: np.ndarray
    true_mean: np.ndarray | None = None

    def __post_init__(self):
        Y = np.array(self.Y, dtype=float)
        if Y.ndim != 2 or Y.shape[1] != self.grid.m:
            raise ValueError(f"panel must be n x {self.grid.m}, got shape {Y.shape}")
        if not np.all(np.isfinite(Y)):
            raise ValueError("panel entries must be finite")
        Y.setflags(write=False)
        object.__setattr__(self, "Y", Y)
        if self.true_mean is not None:
            tm = np.array(self.true_mean, dtype=float)
            if tm.shape != (self.grid.m,):
                raise ValueError("true_mean length must equal m")
            tm.setflags(write=False)
            object.__setattr__(self, "true_mean", tm)

    @property
    def n(self) -> int:
        return self.Y.shape[0]


def eval_signal(spec: SignalSpec, grid: Grid) -> np.ndarray:
    t = grid.points
    if spec.kind == "signal1":
        return spec.c1 * np.exp(-64.0 * (t - 0.25) ** 2) + spec.c2 * np.exp(
            -256.0 * (t - 0.75) ** 2
        )
    if spec.kind == "signal2":
        first = ((t > 0.35) & (t < 0.375)).astype(float)
        second = ((t > 0.75) & (t < 0.875)).astype(float)
        return spec.c3 * first + spec.c3 * second
    values = np.asarray(spec.custom_values, dtype=float)
    if values.shape != (grid.m,):
        raise ValueError(f"custom signal length {values.shape} does not match m={grid.m}")
    return values.copy()


def _grid_index(grid: Grid, x: float) -> int:
    j = int(np.argmin(np.abs(grid.points - x)))
    if abs(grid.points[j] - x) > 1e-9:
        raise ValueError(f"point {x} is not on the grid")
    return j


def covariance_matrix(process: ProcessSpec, grid: Grid) -> np.ndarray:
    """Full kernel matrix Gamma(t_i, t_j) on the grid."""
    t = grid.points
    if process.kind == "bb":
        return np.minimum.outer(t, t) - np.outer(t, t)
    if process.kind == "bm":
        return np.minimum.outer(t, t)
    phi = process.ar_phi
    var = process.innovation_sd**2 / (1.0 - phi**2)
    idx = np.arange(grid.m)
    ar_cov = var * phi ** np.abs(np.subtract.outer(idx, idx))
    if process.kind == "ar1":
        return ar_cov
    # integrated AR(1): covariance of the running sums
    lower = np.tril(np.ones((grid.m, grid.m)))
    return lower @ ar_cov @ lower.T


def covariance_kernel(process: ProcessSpec, s: float, t: float, grid: Grid | None = None) -> float:
    """Gamma(s, t) for one pair of times.

    Brownian kernels are defined for any s, t in (0,1); the autoregressive
    kinds live on grid indices, so those require the grid and reject
    off-grid arguments.
    """
    if process.kind == "bb":
        return float(min(s, t) - s * t)
    if process.kind == "bm":
        return float(min(s, t))
    if grid is None:
        raise ValueError(f"{process.kind} kernel is defined on grid indices; pass the grid")
    cov = covariance_matrix(process, grid)
    return float(cov[_grid_index(grid, s), _grid_index(grid, t)])


def simulate_process(process: ProcessSpec, grid: Grid, rng: np.random.Generator) -> np.ndarray:
    """One zero-mean path Z(t_j) on the grid."""
    m, t = grid.m, grid.points
    if process.kind in ("bb", "bm"):
        # BM by summing independent increments; first gap runs from time 0
        gaps = np.diff(t, prepend=0.0)
        w = np.cumsum(rng.normal(0.0, np.sqrt(gaps)))
        if process.kind == "bm":
            return w
        w_end = w[-1] + rng.normal(0.0, np.sqrt(1.0 - t[-1]))
        return w - t * w_end
    phi = process.ar_phi
    z = np.empty(m)
    z[0] = rng.normal(0.0, process.innovation_sd / np.sqrt(1.0 - phi**2))
    eta = rng.normal(0.0, process.innovation_sd, m)
    for j in range(1, m):
        z[j] = phi * z[j - 1] + eta[j]
    if process.kind == "ar1":
        return z
    return np.cumsum(z)


def median_process_variance(process: ProcessSpec, grid: Grid) -> float:
    return float(np.median(np.diag(covariance_matrix(process, grid))))


@dataclass(frozen=True)
class Calibration:
    noise_sd: float
    signal: SignalSpec
    process: ProcessSpec


def _match_innovation(process: ProcessSpec, grid: Grid) -> ProcessSpec:
    """Set innovation_sd so the process variance matches its Brownian twin.

    ar1 matches the Brownian bridge's median pointwise variance (its
    stationary variance is constant); arima11 matches Brownian motion's.
    """
    if process.kind == "ar1":
        target = median_process_variance(ProcessSpec(kind="bb"), grid)
        sd = np.sqrt(target * (1.0 - process.ar_phi**2))
        return replace(process, innovation_sd=float(sd))
    if process.kind == "arima11":
        target = median_process_variance(ProcessSpec(kind="bm"), grid)
        unit = replace(process, innovation_sd=1.0)
        base_median = median_process_variance(unit, grid)
        return replace(process, innovation_sd=float(np.sqrt(target / base_median)))
    return process


def calibrate(
    process: ProcessSpec,
    grid: Grid,
    sigma_star: float,
    snr: float,
    signal: SignalSpec,
) -> Calibration:
    """Derive noise level and signal scale from (sigma*, SNR).

    sigma* = Var[Z]/sigma_eps^2 with Var[Z] the median pointwise process
    variance; SNR = Range[f]/sqrt(Var[Z] + sigma_eps^2).  Autoregressive
    processes first get their innovation matched to the paired Brownian
    variance, so calibrated scenarios differ only in dependence structure.
    """
    if sigma_star <= 0.0 or snr <= 0.0:
        raise ValueError("sigma_star and snr must be positive")
    process = _match_innovation(process, grid)
    var_z = median_process_variance(process, grid)
    noise_sd = float(np.sqrt(var_z / sigma_star))
    values = eval_signal(signal, grid)
    rng_f = float(np.max(values) - np.min(values))
    if rng_f == 0.0:
        raise ValueError("cannot calibrate a zero-range signal")
    factor = snr * np.sqrt(var_z + noise_sd**2) / rng_f
    if signal.kind == "signal1":
        scaled = replace(signal, c1=signal.c1 * factor, c2=signal.c2 * factor)
    elif signal.kind == "signal2":
        scaled = replace(signal, c3=signal.c3 * factor)
    else:
        scaled = replace(signal, custom_values=tuple(v * factor for v in values))
    return Calibration(noise_sd=noise_sd, signal=scaled, process=process)


def generate_panel(config: PanelConfig, zero_process: bool = False) -> CurvePanel:
    """n independent noisy curves; deterministic given the seed.

    Each curve draws from its own child stream of the panel seed, so the
    panel is reproducible independently of evaluation order.  zero_process
    is a test hook that replaces every path by zeros.
    """
    grid = config.grid
    f = eval_signal(config.signal, grid)
    children = np.random.SeedSequence(config.seed).spawn(config.n)
    Y = np.empty((config.n, grid.m))
    for i in range(config.n):
        rng = np.random.default_rng(children[i])
        path = np.zeros(grid.m) if zero_process else simulate_process(config.process, grid, rng)
        eps = rng.normal(0.0, config.noise_sd, grid.m) if config.noise_sd > 0.0 else 0.0
        Y[i] = f + path + eps
    return CurvePanel(grid=grid, Y=Y, true_mean=f)


def sigma_k_theoretical(process, basis: BasisMatrix) -> np.ndarray:
    """Coefficient variances sigma_k^2 = (1/m^2) sum_jj' Gamma phi_k phi_k.

    Accepts a ProcessSpec or a precomputed m x m kernel matrix (the latter
    covers kernels outside the process families, e.g. white noise).
    """
    if isinstance(process, ProcessSpec):
        kernel = covariance_matrix(process, basis.grid)
    else:
        kernel = np.asarray(process, dtype=float)
        if kernel.shape != (basis.m, basis.m):
            raise ValueError(f"kernel must be {basis.m}x{basis.m}, got {kernel.shape}")
    phi = basis.values
    out = np.einsum("jk,jl,lk->k", phi, kernel, phi) / basis.m**2
    if np.any(out < -1e-12):
        raise ValueError("kernel produced substantially negative coefficient variances")
    return np.maximum(out, 0.0)
