"""Eigenvalue spectra of correlation matrices and the figures of merit built on them.

SNR arguments (``rho``) are linear total transmit SNR; use :func:`db_to_linear`
for decibels.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.linalg.blas import zherk

from .channel import ChannelMatrix, CorrelationMatrix
from .errors import DegenerateSpectrumError, SolverError

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 1e-2
PSD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted in descending order, negative roundoff clamped to zero."""

    eigenvalues: np.ndarray
    dimension: int
    clamped: float = 0.0  # magnitude of the most negative raw eigenvalue

    def __len__(self):
        return self.eigenvalues.shape[0]

    @classmethod
    def from_values(cls, values):
        v = np.sort(np.asarray(values, dtype=float))[::-1]
        if v.size and v[-1] < 0:
            raise DegenerateSpectrumError("spectrum has negative values")
        v = np.ascontiguousarray(v)
        v.setflags(write=False)
        return cls(v, v.size)

    def scaled(self, c: float) -> "Spectrum":
        v = self.eigenvalues * float(c)
        v.setflags(write=False)
        return Spectrum(v, self.dimension, self.clamped * float(c))


@dataclass(frozen=True)
class SpectralSummary:
    spectrum: Spectrum
    edof: float
    dof: int
    threshold: float
    bandwidth: float
    snr: Optional[float] = None
    n_streams: Optional[int] = None
    normalization: str = "trace"
    capacity_exact: Optional[float] = None
    capacity_edof: Optional[float] = None


def _matrix(R):
    return R.entries if isinstance(R, CorrelationMatrix) else np.asarray(R)


def _values(spectrum):
    if isinstance(spectrum, Spectrum):
        return spectrum.eigenvalues
    return np.asarray(spectrum, dtype=float)


def hermitian_eigenvalues(R) -> Spectrum:
    A = _matrix(R)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SolverError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise SolverError("correlation matrix has non-finite entries")
    try:
        w = scipy.linalg.eigh(A, eigvals_only=True, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SolverError(f"Hermitian eigensolver failed for a {A.shape[0]}x{A.shape[0]} matrix: {exc}") from exc
    w = w[::-1].copy()
    top = w[0] if w.size else 0.0
    neg = -min(w[-1], 0.0) if w.size else 0.0
    if neg > PSD_TOL * max(abs(top), np.finfo(float).tiny):
        raise SolverError(
            f"matrix is not positive semi-definite: eigenvalue {-neg:.3g} against max {top:.3g}"
        )
    np.clip(w, 0.0, None, out=w)
    w.setflags(write=False)
    return Spectrum(w, A.shape[0], float(neg))


def spectrum_identity_errors(R, spectrum: Spectrum) -> tuple[float, float]:
    """Relative mismatch of ``sum(s)`` vs ``tr(R)`` and ``sum(s**2)`` vs ``||R||_F^2``."""
    A = _matrix(R)
    s = spectrum.eigenvalues
    tr = np.trace(A).real
    fro2 = np.sum(np.abs(A) ** 2)
    e1 = abs(s.sum() - tr) / abs(tr) if tr else abs(s.sum())
    e2 = abs(np.sum(s * s) - fro2) / fro2 if fro2 else np.sum(s * s)
    return float(e1), float(e2)


def edof(spectrum) -> float:
    """Effective degrees of freedom ``(sum s)^2 / sum s^2``."""
    s = _values(spectrum)
    sq = np.sum(s * s)
    if s.size == 0 or sq <= 0:
        raise DegenerateSpectrumError("EDOF is undefined for an all-zero spectrum")
    return float(np.sum(s) ** 2 / sq)


def edof_from_matrix(R) -> float:
    """``tr(R)^2 / ||R||_F^2`` without an eigendecomposition."""
    A = _matrix(R)
    fro2 = np.sum(np.abs(A) ** 2)
    if fro2 <= 0:
        raise DegenerateSpectrumError("EDOF is undefined for a zero matrix")
    return float(np.trace(A).real ** 2 / fro2)


def edof_from_channel(H) -> float:
    """EDOF straight from a channel matrix using a rank-k Hermitian update.

    Only the upper triangle of the Gram matrix is formed, which halves the
    cost of the product for the large sweeps.
    """
    A = H.entries if isinstance(H, ChannelMatrix) else np.asarray(H, dtype=complex)
    if A.shape[1] <= A.shape[0]:
        C = zherk(1.0, np.asfortranarray(A), trans=2, lower=0)
    else:
        C = zherk(1.0, np.asfortranarray(A), trans=0, lower=0)
    diag = np.diag(C).real
    upper = np.triu(C, 1)
    fro2 = np.sum(diag * diag) + 2.0 * np.sum(np.abs(upper) ** 2)
    if fro2 <= 0:
        raise DegenerateSpectrumError("EDOF is undefined for a zero channel")
    return float(diag.sum() ** 2 / fro2)


def dof(spectrum, threshold: float = DEFAULT_THRESHOLD) -> int:
    """Number of eigenvalues at or above ``threshold * max``."""
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold!r}")
    s = _values(spectrum)
    if s.size == 0:
        raise DegenerateSpectrumError("empty spectrum")
    top = s.max()
    if top <= 0:
        raise DegenerateSpectrumError("DOF is undefined for an all-zero spectrum")
    return int(np.count_nonzero(s >= threshold * top))


def capacity_exact(spectrum, rho: float, bandwidth: float = 1.0, n: Optional[int] = None,
                   threshold: float = DEFAULT_THRESHOLD) -> float:
    """Equal-power capacity ``B * sum_{i<=n} log2(1 + rho * s_i / n)``.

    ``n`` defaults to :func:`dof` at ``threshold``; the sum runs over the
    ``n`` largest eigenvalues (all of them if ``n`` exceeds the spectrum).
    """
    if rho < 0:
        raise ValueError(f"SNR must be non-negative, got {rho!r}")
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth!r}")
    s = np.sort(_values(spectrum))[::-1]
    if n is None:
        n = dof(s, threshold)
    if n < 1:
        raise ValueError(f"stream count must be >= 1, got {n!r}")
    return float(bandwidth * np.sum(np.log2(1.0 + rho * s[:n] / n)))


def capacity_ideal(n: int, rho: float, bandwidth: float = 1.0) -> float:
    if n < 1:
        raise ValueError(f"stream count must be >= 1, got {n!r}")
    return float(bandwidth * n * np.log2(1.0 + rho / n))


def capacity_edof(psi: float, rho: float, bandwidth: float = 1.0) -> float:
    """Capacity of ``psi`` equivalent independent SISO links."""
    if not psi >= 1.0 - 1e-12:
        raise ValueError(f"EDOF must be >= 1, got {psi!r}")
    psi = max(psi, 1.0)
    return float(bandwidth * psi * np.log2(1.0 + rho / psi))


def paraxial_dof(area_source: float, area_receiver: float, distance: float) -> float:
    """Solid-angle mode count ``A_S A_R / D^2`` (wavelength units)."""
    for name, v in (("source area", area_source), ("receiver area", area_receiver),
                    ("distance", distance)):
        if not np.isfinite(v) or v <= 0:
            raise ValueError(f"{name} must be positive, got {v!r}")
    return float(area_source * area_receiver / distance**2)


def normalize_spectrum(spectrum: Spectrum, n: int) -> Spectrum:
    """Rescale so the eigenvalues sum to ``n``.

    This gives the channel the total gain of ``n`` unit-gain parallel links,
    the reference against which the equivalent-SISO capacity is written.
    """
    total = float(np.sum(spectrum.eigenvalues))
    if total <= 0:
        raise DegenerateSpectrumError("cannot normalise an all-zero spectrum")
    return spectrum.scaled(n / total)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def summarize(R, rho: Optional[float] = None, bandwidth: float = 1.0,
              threshold: float = DEFAULT_THRESHOLD, n: Optional[int] = None,
              normalization: str = "trace") -> SpectralSummary:
    """Eigen-decompose ``R`` and collect EDOF, DOF and (if ``rho`` given) capacities.

    ``normalization="trace"`` rescales the spectrum to sum to the stream count
    before evaluating capacities; ``"none"`` uses raw eigenvalues.
    """
    if normalization not in ("trace", "none"):
        raise ValueError(f"unknown normalization {normalization!r}")
    spec = R if isinstance(R, Spectrum) else hermitian_eigenvalues(R)
    psi = edof(spec)
    k = dof(spec, threshold)
    if not (1.0 - 1e-12 <= psi and k <= len(spec)):
        raise DegenerateSpectrumError(f"inconsistent summary: edof={psi}, dof={k}, size={len(spec)}")
    if psi > k:
        log.warning("EDOF %.4g exceeds DOF %d at threshold %g", psi, k, threshold)
    streams = k if n is None else int(n)
    c_exact = c_edof = None
    if rho is not None:
        s = normalize_spectrum(spec, streams) if normalization == "trace" else spec
        c_exact = capacity_exact(s, rho, bandwidth, streams)
        c_edof = capacity_edof(psi, rho, bandwidth)
    return SpectralSummary(
        spectrum=spec, edof=psi, dof=k, threshold=threshold, bandwidth=bandwidth,
        snr=rho, n_streams=streams, normalization=normalization,
        capacity_exact=c_exact, capacity_edof=c_edof,
    )
