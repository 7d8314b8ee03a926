"""Second-order diagnostics: covariance and periodogram estimators, the
propagation-path predictor, flow calculus and a tiny-grid Cholesky oracle."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.fft
import scipy.linalg

from .errors import DegeneratePathError, GridRangeError, OracleError
from .flows import FlowField
from .gaussian import RngStream
from .grid import Grid2D, SpaceTimeField
from .spectra import Flat

MAX_ORACLE_POINTS = 4096
MAX_PATH_CONDITION = 1e8


def _stack(ensemble) -> np.ndarray:
    if isinstance(ensemble, np.ndarray):
        arr = ensemble
    else:
        fields = list(ensemble)
        if not fields:
            raise ValueError("empty ensemble")
        g = fields[0].grid
        if any(f.grid != g or f.frames.shape != fields[0].frames.shape for f in fields):
            raise ValueError("ensemble members must share grid and frame count")
        arr = np.stack([f.frames for f in fields])
    if arr.ndim != 4:
        raise ValueError("ensemble array must have shape (M, T+1, n1, n2)")
    return arr


@dataclass(frozen=True)
class CovEstimate:
    lags_h: list
    lags_tau: list
    values: np.ndarray
    std_errors: np.ndarray
    n_realizations: int

    def at(self, h, tau):
        i = self.lags_h.index(tuple(h))
        j = self.lags_tau.index(int(tau))
        return self.values[i, j], self.std_errors[i, j]

    def to_rows(self):
        for i, h in enumerate(self.lags_h):
            for j, tau in enumerate(self.lags_tau):
                yield {"h1": h[0], "h2": h[1], "tau": tau, "value": float(self.values[i, j]),
                       "std_error": float(self.std_errors[i, j])}


def _lag_slices(n, lag):
    if abs(lag) >= n:
        raise GridRangeError(f"lag {lag} does not fit a grid of {n} cells")
    return slice(max(0, -lag), n - max(0, lag)), slice(max(0, lag), n - max(0, -lag))


def cross_moments(ensemble, lags_h: Sequence, lags_tau: Sequence) -> np.ndarray:
    """Per-realization mean of ``Z(s, t) Z(s + h, t + tau)`` over valid pairs.

    Returns shape ``(M, len(lags_h), len(lags_tau))``.  The mean is taken as
    known zero; no wraparound pairs are used.
    """
    Z = _stack(ensemble)
    M, nt, n1, n2 = Z.shape
    out = np.empty((M, len(lags_h), len(lags_tau)))
    for j, tau in enumerate(lags_tau):
        tau = int(tau)
        if not 0 <= tau < nt:
            raise GridRangeError(f"time lag {tau} does not fit {nt} frames")
        for i, (h1, h2) in enumerate(lags_h):
            a1, b1 = _lag_slices(n1, int(h1))
            a2, b2 = _lag_slices(n2, int(h2))
            A = Z[:, : nt - tau, a1, a2]
            B = Z[:, tau:, b1, b2]
            out[:, i, j] = np.einsum("mtij,mtij->m", A, B) / A[0].size
    return out


def empirical_cov(ensemble, lags_h: Sequence, lags_tau: Sequence) -> CovEstimate:
    """Ensemble estimate of ``cov{Z(s, t), Z(s + h, t + tau)}``.

    Standard errors come from the spread across realizations.
    """
    lags_h = [(int(h[0]), int(h[1])) for h in lags_h]
    lags_tau = [int(t) for t in lags_tau]
    m = cross_moments(ensemble, lags_h, lags_tau)
    M = m.shape[0]
    if M < 2:
        raise ValueError("at least two realizations are required")
    return CovEstimate(lags_h, lags_tau, m.mean(0), m.std(0, ddof=1) / np.sqrt(M), M)


def lag_box(radius: int):
    """All integer lags with ``max(|h1|, |h2|) <= radius``."""
    r = range(-radius, radius + 1)
    return [(a, b) for a in r for b in r]


def spatial_covariance(cov, h1, h2) -> np.ndarray:
    """Covariance values of a spatial model at physical lags."""
    if isinstance(cov, Flat):
        return np.where((np.asarray(h1) == 0) & (np.asarray(h2) == 0), cov.level, 0.0)
    return np.asarray(cov(np.asarray(h1, float), np.asarray(h2, float)), dtype=float)


def frozen_covariance(cov, lags_h, lags_tau, v, dt: float = 1.0, spacing: float = 1.0) -> np.ndarray:
    """Theoretical ``c_XX(h - v tau)`` on an integer lag set."""
    H = np.asarray(lags_h, dtype=float) * spacing
    tau = np.asarray(lags_tau, dtype=float) * dt
    d1 = H[:, 0:1] - v[0] * tau[None, :]
    d2 = H[:, 1:2] - v[1] * tau[None, :]
    return spatial_covariance(cov, d1, d2)


def periodogram3(field: SpaceTimeField) -> np.ndarray:
    """``|DFT|^2 / n`` of the field arranged as ``(n1, n2, T + 1)``.

    Its expectation equals the discretized spectrum of spectrally synthesized
    fields, and its sum equals the field's sum of squares.
    """
    z = np.moveaxis(np.asarray(field.frames if isinstance(field, SpaceTimeField) else field), 0, 2)
    F = scipy.fft.fftn(z)
    return (F.real ** 2 + F.imag ** 2) / z.size


def averaged_periodogram(ensemble) -> np.ndarray:
    Z = _stack(ensemble)
    acc = np.zeros(Z.shape[2:] + Z.shape[1:2])
    for z in Z:
        acc += periodogram3(z)
    return acc / Z.shape[0]


def coarse_ratio(pbar: np.ndarray, target: np.ndarray, mask: np.ndarray, block=(4, 4, 4)):
    """Mean of ``pbar / target`` over the masked bins of each coarse block.

    Returns ``(ratios, counts)`` for the blocks holding at least one bin.
    """
    ratio = np.where(mask, pbar / np.where(mask, target, 1.0), 0.0)
    shape = tuple(s // b for s, b in zip(ratio.shape, block))
    if any(s * b != n for s, b, n in zip(shape, block, ratio.shape)):
        raise ValueError(f"block {block} does not tile {ratio.shape}")
    def blocks(a):
        return a.reshape(shape[0], block[0], shape[1], block[1], shape[2], block[2]).sum((1, 3, 5))
    num, cnt = blocks(ratio), blocks(mask.astype(float))
    keep = cnt > 0
    return num[keep] / cnt[keep], cnt[keep]


@dataclass(frozen=True)
class PathPrediction:
    base_point: tuple
    tau: float
    predicted_offset: np.ndarray


def propagation_path(flow: FlowField, s, t: float, tau: float) -> PathPrediction:
    """Spatial offset reached after ``tau`` along the linearized propagation path.

    Solves ``(I - D_s (t + tau)) h = (v + D_t (t + tau)) tau``.
    """
    ds, dtv = flow.jacobian(s, t)
    v = np.array([np.asarray(c, dtype=float).item() for c in flow.velocity(s[0], s[1], t)])
    A = np.eye(2) - ds * (t + tau)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > MAX_PATH_CONDITION:
        raise DegeneratePathError(f"I - D_s (t + tau) is singular at s={tuple(s)}, t={t}")
    h = np.linalg.solve(A, (v + dtv * (t + tau)) * tau)
    return PathPrediction((tuple(map(float, s)), float(t)), float(tau), h)


def flow_divergence_curl(flow: FlowField, s, t: float) -> tuple[float, float]:
    """Divergence and scalar curl ``dv2/ds1 - dv1/ds2`` at one point."""
    ds, _ = flow.jacobian(s, t)
    return float(ds[0, 0] + ds[1, 1]), float(ds[1, 0] - ds[0, 1])


def correlation_peak(ensemble, s_idx, t_idx: int, tau: int, radius: int):
    """Sub-cell location of the peak of ``corr{Z(s, t), Z(s + h, t + tau)}``.

    The integer argmax over ``|h|_inf <= radius`` is refined by a parabola
    through its neighbours on each axis.  Returns ``(offset, corr_surface)``
    with the offset in cells.
    """
    Z = _stack(ensemble)
    i, j = s_idx
    x = Z[:, t_idx, i, j]
    n1, n2 = Z.shape[2:]
    if i - radius < 0 or j - radius < 0 or i + radius >= n1 or j + radius >= n2:
        raise GridRangeError("search window leaves the grid")
    Y = Z[:, t_idx + tau, i - radius: i + radius + 1, j - radius: j + radius + 1]
    num = np.einsum("m,mab->ab", x, Y)
    den = np.sqrt((x ** 2).sum() * (Y ** 2).sum(0))
    corr = num / den
    a, b = np.unravel_index(np.argmax(corr), corr.shape)
    off = [float(a - radius), float(b - radius)]
    for ax, (p, q) in enumerate(((a, b), (b, a))):
        size = corr.shape[ax]
        if 0 < p < size - 1:
            if ax == 0:
                lo, mid, hi = corr[p - 1, q], corr[p, q], corr[p + 1, q]
            else:
                lo, mid, hi = corr[q, p - 1], corr[q, p], corr[q, p + 1]
            denom = lo - 2 * mid + hi
            if denom < 0:
                off[ax] += float(np.clip(0.5 * (lo - hi) / denom, -0.5, 0.5))
    return np.array(off), corr


def cholesky_oracle(cov_fn, grid: Grid2D, T: int, v, rng: RngStream, dt: float = 1.0) -> SpaceTimeField:
    """Exact draw from the frozen-field covariance ``c_XX(h - v tau)``.

    Builds the full space-time covariance matrix; limited to tiny grids.
    """
    n_pts = grid.size * (T + 1)
    if n_pts > MAX_ORACLE_POINTS:
        raise ValueError(f"oracle limited to {MAX_ORACLE_POINTS} points, got {n_pts}")
    s1, s2 = grid.coords()
    tt = np.repeat(np.arange(T + 1) * dt, grid.size)
    x1 = np.tile(s1.ravel(), T + 1) - v[0] * tt
    x2 = np.tile(s2.ravel(), T + 1) - v[1] * tt
    C = spatial_covariance(cov_fn, x1[:, None] - x1[None, :], x2[:, None] - x2[None, :])
    C = C + 1e-10 * np.diag(np.diag(C))
    try:
        L = scipy.linalg.cholesky(C, lower=True)
    except np.linalg.LinAlgError as err:
        raise OracleError(f"covariance matrix is not positive semidefinite: {err}") from err
    z = L @ rng.generator().standard_normal(n_pts)
    frames = z.reshape(T + 1, grid.n1, grid.n2)
    return SpaceTimeField(grid, frames, dt, {"generator": "cholesky_oracle"})
