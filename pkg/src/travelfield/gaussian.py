"""Gaussian field synthesis: 2-D circulant embedding and 3-D spectral synthesis."""
from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
import scipy.fft

from .errors import SymmetryError
from .grid import Grid2D, SpaceTimeField, SpatialField
from .spectra import (CompactCovariance, Flat, PowerLaw, discretize_spectrum,
                      spatial_spectrum_grid)

log = logging.getLogger(__name__)

CLIP_WARN_FRACTION = 0.05


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_id)``.

    Backed by the counter-based Philox generator; ``substream`` derives
    independent child streams without consuming draws from the parent.
    """

    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2 ** 64) or not (0 <= int(self.stream_id) < 2 ** 64):
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),) + self.path)
        return np.random.Generator(np.random.Philox(ss))

    def substream(self, tag: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, self.path + (int(tag),))


def gaussian_pair_stream(rng: RngStream, block: int = 4096) -> Iterator[float]:
    """Unbounded iterator of i.i.d. standard normal draws."""
    gen = rng.generator()
    while True:
        yield from gen.standard_normal(block).tolist()


def take_normals(rng: RngStream, n: int) -> np.ndarray:
    return np.fromiter(itertools.islice(gaussian_pair_stream(rng), n), dtype=float, count=n)


@dataclass(frozen=True)
class EmbeddingReport:
    embedding_size: tuple[int, int]
    min_eigenvalue: float
    clipped_mass_fraction: float
    exact: bool

    @property
    def warning(self) -> bool:
        return self.clipped_mass_fraction > CLIP_WARN_FRACTION

    def to_dict(self):
        return {"embedding_size": list(self.embedding_size), "min_eigenvalue": self.min_eigenvalue,
                "clipped_mass_fraction": self.clipped_mass_fraction, "exact": self.exact,
                "warning": self.warning}


def _torus_lags(m: int) -> np.ndarray:
    j = np.arange(m)
    return np.where(j <= m // 2, j, j - m).astype(float)


def embedding_eigenvalues(cov, grid: Grid2D, min_embedding: int | None = None):
    """Circulant eigenvalues for simulating ``cov`` on ``grid``.

    Spectral specs are evaluated directly on the doubled DFT grid; covariance
    functions are placed on a torus at least twice the grid (and twice the
    support ``h0`` for compact covariances) and transformed.
    """
    sp = grid.spacing
    if isinstance(cov, (Flat, PowerLaw)):
        m1, m2 = 2 * grid.n1, 2 * grid.n2
        if min_embedding:
            m1, m2 = max(m1, min_embedding), max(m2, min_embedding)
        lam = spatial_spectrum_grid(cov, m1, m2, sp)
        return lam, (m1, m2)
    if not callable(cov):
        raise TypeError(f"cannot embed covariance of type {type(cov).__name__}")
    need = [2 * (grid.n1 - 1), 2 * (grid.n2 - 1)]
    if isinstance(cov, CompactCovariance):
        need = [max(m, 2 * math.ceil(cov.h0 / sp) + 2) for m in need]
    if min_embedding:
        need = [max(m, min_embedding) for m in need]
    m1, m2 = (scipy.fft.next_fast_len(max(m, 2), real=True) for m in need)
    H1, H2 = np.meshgrid(_torus_lags(m1) * sp, _torus_lags(m2) * sp, indexing="ij")
    c = np.asarray(cov(H1, H2), dtype=float)
    if not np.all(np.isfinite(c)):
        raise ValueError("covariance function returned non-finite values")
    lam = scipy.fft.fft2(c).real
    return lam, (m1, m2)


def simulate_spatial_circulant(cov, grid: Grid2D, rng: RngStream,
                               min_embedding: int | None = None):
    """One zero-mean Gaussian realization on ``grid`` by circulant embedding.

    Parameters
    ----------
    cov : Flat, PowerLaw, CompactCovariance or callable
        Spectral spec, or covariance function of physical lags ``(h1, h2)``.
    grid : Grid2D
    rng : RngStream
    min_embedding : int, optional
        Lower bound on the torus size along each axis.

    Returns
    -------
    field : SpatialField
    report : EmbeddingReport
        Negative eigenvalues are clipped to zero; their share of the total
        absolute eigenvalue mass is reported.
    """
    lam, (m1, m2) = embedding_eigenvalues(cov, grid, min_embedding)
    lmax = float(lam.max())
    lmin = float(lam.min())
    tol = 1e-10 * max(lmax, 0.0)
    neg = lam < 0
    total = float(np.abs(lam).sum())
    clipped = max(0.0, float(-lam[neg].sum() / total)) if total > 0 else 0.0
    report = EmbeddingReport((m1, m2), lmin, clipped, lmin >= -tol)
    if report.warning:
        warnings.warn(f"circulant embedding clipped {clipped:.1%} of eigenvalue mass", stacklevel=2)
    lam = np.where(neg, 0.0, lam)
    w = rng.generator().standard_normal((m1, m2))
    root = np.sqrt(lam[:, : m2 // 2 + 1])
    y = scipy.fft.irfft2(root * scipy.fft.rfft2(w), s=(m1, m2))
    log.debug("circulant embedding %s -> %dx%d, min eig %.3g", grid.shape, m1, m2, lmin)
    return SpatialField(grid, y[: grid.n1, : grid.n2]), report


def simulate_spacetime_spectral(spec, dims, rng: RngStream, embed: bool = False,
                                check_real: bool = True, dt: float = 1.0) -> SpaceTimeField:
    """Approximate space-time Gaussian field by 3-D spectral synthesis.

    Real white noise ``W`` on the synthesis grid is filtered in the DFT domain
    by ``sqrt(S)``; since ``fftn(W)`` is Hermitian with unit expected power
    per bin (self-conjugate bins real), the output is real with covariance
    ``ifftn(S)`` and ``E|fftn(Z)|^2 / n = S``.  The result is periodic on the
    synthesis grid; ``embed=True`` synthesizes on the doubled grid and crops,
    as Davis-Harte style methods do.

    ``dims = (N1, N2, Tn)`` where ``Tn`` is the number of frames.
    """
    n1, n2, nt = (int(d) for d in dims)
    sdims = (2 * n1, 2 * n2, 2 * nt) if embed else (n1, n2, nt)
    S = discretize_spectrum(spec, sdims)
    w = rng.generator().standard_normal(sdims)
    if check_real:
        z = scipy.fft.ifftn(np.sqrt(S) * scipy.fft.fftn(w))
        scale = max(float(np.abs(z.real).max()), np.finfo(float).tiny)
        if float(np.abs(z.imag).max()) > 1e-10 * scale:
            raise SymmetryError("spectral synthesis produced a non-real field")
        z = z.real
    else:
        root = np.sqrt(S[:, :, : sdims[2] // 2 + 1])
        z = scipy.fft.irfftn(root * scipy.fft.rfftn(w), s=sdims)
    z = z[:n1, :n2, :nt]
    frames = np.moveaxis(z, 2, 0)
    return SpaceTimeField(Grid2D(n1, n2), np.ascontiguousarray(frames), dt,
                          {"generator": "spectral3d", "spectrum": spec.kind, "embed": embed})
