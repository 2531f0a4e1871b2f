"""Reproducible Gaussian sample-path and field generation.

Randomness: counter-based Philox streams keyed by (seed, replica, role), so
replicas are independent and the output is bit-identical for a given
(seed, grid, method, params) regardless of chunking or execution order.
Normal variates use the inverse-CDF transform of 53-bit uniforms (a fixed,
documented transform; no rejection sampling)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special as _sp

from .covariance import CovMatrix
from .spectral import SpectralDensity, eval_sd, physical_temporal_sd

__all__ = [
    "SamplePathSet",
    "standard_normals",
    "sample_cholesky",
    "sample_spectral_stationary",
    "sample_spectral_stat_increments",
    "sample_bm",
    "covariance_from_variogram",
]

ROLE_GAUSS = 1
ROLE_COS = 2
ROLE_SIN = 3


def _stream(seed: int, replica: int, role: int) -> np.random.Generator:
    bg = np.random.Philox(
        key=np.uint64(seed),
        counter=np.array([0, 0, replica, role], dtype=np.uint64),
    )
    return np.random.Generator(bg)


def standard_normals(seed: int, replica: int, role: int, size: int) -> np.ndarray:
    """N(0,1) draws from the (seed, replica, role) stream via inverse CDF of
    (k + 1/2) 2^-53 uniforms (strictly inside (0,1), so ndtri is finite)."""
    g = _stream(seed, replica, role)
    u = (g.integers(0, 1 << 53, size=size, dtype=np.uint64) + 0.5) * 2.0**-53
    return _sp.ndtri(u)


@dataclass
class SamplePathSet:
    """Replicated discretized paths/fields with provenance metadata."""

    grid: np.ndarray
    values: np.ndarray  # (replicas, grid)
    seed: int
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != self.grid.shape[0]:
            raise ValueError("values must be (replicas, len(grid))")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sample values must be finite")

    @property
    def replicas(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        d = np.diff(self.grid)
        if d.size == 0 or not np.allclose(d, d[0], rtol=1e-9, atol=0.0):
            raise ValueError("grid is not uniform")
        return float(d[0])


def sample_cholesky(m: CovMatrix, replicas: int, seed: int) -> SamplePathSet:
    """Exact Gaussian sampling: values = Z L^T for the lower Cholesky factor
    of the (jittered) covariance matrix."""
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    L = m.cholesky()
    n = L.shape[0]
    Z = np.empty((replicas, n))
    for r in range(replicas):
        Z[r] = standard_normals(seed, r, ROLE_GAUSS, n)
    return SamplePathSet(
        grid=m.points,
        values=Z @ L.T,
        seed=seed,
        method="cholesky",
        params={"jitter": m.jitter},
    )


def _log_bins(lo: float, hi: float, n: int):
    edges = np.geomspace(lo, hi, n + 1)
    centers = np.sqrt(edges[1:] * edges[:-1])
    widths = np.diff(edges)
    return centers, widths


def sample_spectral_stationary(
    sd: SpectralDensity, grid, replicas: int, seed: int, n_freq: int = 2**14
) -> SamplePathSet:
    """Harmonizable synthesis of a stationary field with spatial density S:

        U(x) = sum_k sqrt(2 S(xi_k) w_k) [cos(x xi_k) z_k + sin(x xi_k) z'_k]

    over a log-uniform frequency grid up to the Nyquist frequency, which must
    exceed the point where S has decayed below 1e-6 of its peak."""
    if sd.axis != "spatial" or sd.params.dim != 1:
        raise ValueError("stationary synthesis implemented for 1-d spatial densities")
    grid = np.asarray(grid, dtype=float)
    spacing = float(np.diff(grid)[0])
    if not np.allclose(np.diff(grid), spacing, rtol=1e-9, atol=0.0):
        raise ValueError("grid must be uniform")
    span = float(grid[-1] - grid[0])
    nyquist = np.pi / spacing

    scan = np.geomspace(1e-3 / span, nyquist * 8.0, 800)
    svals = eval_sd(sd, scan)
    peak = svals.max()
    above = scan[svals > 1e-6 * peak]
    cutoff = above[-1] if above.size else scan[0]
    if cutoff > nyquist:
        raise ValueError(
            "Nyquist frequency %.4g is below the 1e-6 spectral cutoff %.4g; "
            "refine the grid" % (nyquist, cutoff)
        )

    freqs, widths = _log_bins(2.0 * np.pi / (10.0 * span), nyquist, n_freq)
    amps = np.sqrt(2.0 * eval_sd(sd, freqs) * widths)
    values = _synthesize(grid, freqs, amps, replicas, seed, increments=False)
    return SamplePathSet(
        grid=grid, values=values, seed=seed, method="spectral",
        params={"n_freq": n_freq, "axis": "spatial"},
    )


def sample_spectral_stat_increments(
    sd: SpectralDensity, grid, replicas: int, seed: int, n_freq: int = 2**14
) -> SamplePathSet:
    """Harmonizable synthesis of the stationary-increment auxiliary process

        X(t) = sum_k sqrt(2 D(tau_k) w_k) [(cos(t tau_k) - 1) z_k
                                           + sin(t tau_k) z'_k],

    with D the physical temporal density (eval_sd / 2 pi); X(0) = 0 exactly.
    The log-uniform frequency grid spans [1/(10 span), 10/spacing]."""
    if sd.axis != "temporal":
        raise ValueError("stationary-increment synthesis requires a temporal density")
    grid = np.asarray(grid, dtype=float)
    span = float(grid.max() - grid.min())
    pos = np.diff(np.unique(grid))
    spacing = float(pos.min())
    tau_lo, tau_hi = 1.0 / (10.0 * span), 10.0 / spacing
    freqs, widths = _log_bins(tau_lo, tau_hi, n_freq)
    # factor 2: the synthesis runs over tau > 0, the density is two-sided
    amps = np.sqrt(2.0 * physical_temporal_sd(sd, freqs) * widths)
    # the tau < tau_lo mass contributes O((tau_lo * span)^2) to increments: dropped
    values = _synthesize(grid, freqs, amps, replicas, seed, increments=True)
    return SamplePathSet(
        grid=grid, values=values, seed=seed, method="spectral",
        params={"n_freq": n_freq, "axis": "temporal"},
    )


def _synthesize(grid, freqs, amps, replicas, seed, increments, chunk=2048):
    n, F = grid.size, freqs.size
    values = np.zeros((replicas, n))
    zc = np.empty((replicas, F))
    zs = np.empty((replicas, F))
    for r in range(replicas):
        zc[r] = standard_normals(seed, r, ROLE_COS, F)
        zs[r] = standard_normals(seed, r, ROLE_SIN, F)
    for k0 in range(0, F, chunk):
        k1 = min(k0 + chunk, F)
        phase = grid[:, None] * freqs[None, k0:k1]
        cosm = np.cos(phase)
        if increments:
            cosm -= 1.0
        sinm = np.sin(phase)
        a = amps[k0:k1]
        values += (zc[:, k0:k1] * a) @ cosm.T + (zs[:, k0:k1] * a) @ sinm.T
    return values


def sample_bm(grid, replicas: int, seed: int) -> SamplePathSet:
    """Standard Brownian motion on an increasing grid (grid[0] may be 0) by
    exact increment cumulation: the closed form of the Cholesky factor of
    the min(s,t) covariance on an ordered grid."""
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise ValueError("grid must be strictly increasing and nonnegative")
    inc_sd = np.sqrt(np.diff(np.concatenate([[0.0], grid])))
    n = grid.size
    values = np.empty((replicas, n))
    for r in range(replicas):
        z = standard_normals(seed, r, ROLE_GAUSS, n)
        values[r] = np.cumsum(inc_sd * z)
    if grid[0] == 0.0:
        values[:, 0] = 0.0
    return SamplePathSet(grid=grid, values=values, seed=seed, method="cholesky",
                         params={"model": "bm"})


def covariance_from_variogram(variogram_fn, grid) -> CovMatrix:
    """Covariance of a process with stationary increments and X(0) = 0:
    C(t, s) = (v(t) + v(s) - v(|t - s|)) / 2.

    ``variogram_fn`` maps an array of positive lags to variogram values;
    it is called once on the distinct positive lags of the grid."""
    g = np.asarray(grid, dtype=float)
    if np.any(g <= 0):
        raise ValueError("grid points must be positive (X(0)=0 is implicit)")
    diffs = np.abs(g[:, None] - g[None, :])
    scale = diffs.max()
    key = np.round(diffs / scale, 12)
    uniq, inverse = np.unique(key, return_inverse=True)
    lag_vals = np.zeros_like(uniq)
    pos = uniq > 0
    lag_vals[pos] = variogram_fn(uniq[pos] * scale)
    v_d = lag_vals[inverse].reshape(diffs.shape)
    v_t = np.asarray(variogram_fn(g))
    entries = 0.5 * (v_t[:, None] + v_t[None, :] - v_d)
    return CovMatrix.from_entries(g, entries)
