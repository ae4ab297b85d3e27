"""Free-space Green's functions between point pairs.

Time convention is ``exp(-j k0 R)`` for an outgoing wave.  Conjugating every
kernel (the opposite convention) leaves all correlation eigenvalues unchanged.

Lengths are in wavelengths, so ``K0 = 2*pi``.  Dyadic tensors are indexed
``[receiver polarization, source polarization]`` in (x, y, z) order.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import GeometryError, SingularityError

K0 = 2.0 * np.pi
SINGULARITY_FLOOR = 1e-9


class GreensKind(enum.Enum):
    SCALAR = "scalar"
    DYADIC_FULL = "dyadic"
    DYADIC_FARFIELD = "farfield"


def _separation(r, r_src, floor):
    d = np.asarray(r, dtype=float) - np.asarray(r_src, dtype=float)
    R = np.sqrt(np.sum(d * d, axis=-1))
    bad = R < floor
    if np.any(bad):
        raise SingularityError(
            f"{int(np.count_nonzero(bad))} point pair(s) closer than {floor:g} wavelengths"
        )
    return d, R


def scalar_kernel(d, R):
    return np.exp(-1j * K0 * R) / (4 * np.pi * R)


def dyadic_kernel(d, R):
    """Closed form of ``(I + grad grad / k0^2) g`` for separation vectors ``d``.

    Broadcasts over leading axes of ``d`` (shape ``(..., 3)``) and returns
    ``(..., 3, 3)``.
    """
    g = scalar_kernel(d, R)
    inv = 1.0 / (K0 * R)
    a = g * (1.0 - 1j * inv - inv * inv)
    b = g * (-1.0 + 3j * inv + 3.0 * inv * inv)
    u = d / R[..., None]
    out = b[..., None, None] * (u[..., :, None] * u[..., None, :])
    idx = np.arange(3)
    out[..., idx, idx] += a[..., None]
    return out


def farfield_kernel(d, R):
    """Transverse projector ``(I - u u^T) g`` with ``u`` the unit separation."""
    g = scalar_kernel(d, R)
    u = d / R[..., None]
    out = -g[..., None, None] * (u[..., :, None] * u[..., None, :])
    idx = np.arange(3)
    out[..., idx, idx] += g[..., None]
    return out


def scalar_green(r, r_src, floor=SINGULARITY_FLOOR) -> complex:
    """``exp(-j k0 R) / (4 pi R)`` between an observation and a source point."""
    d, R = _separation(r, r_src, floor)
    return complex(scalar_kernel(d, R))


def dyadic_green(r, r_src, floor=SINGULARITY_FLOOR) -> np.ndarray:
    d, R = _separation(r, r_src, floor)
    return dyadic_kernel(d, R)


def farfield_projector_green(r, r_src, floor=SINGULARITY_FLOOR) -> np.ndarray:
    d, R = _separation(r, r_src, floor)
    return farfield_kernel(d, R)


def field_boundaries(L: float) -> tuple[float, float]:
    """Near-field and far-field distances for an aperture of side ``L``.

    Returns ``(0.62 * sqrt(L**3), 2 * L**2)`` in wavelengths.
    """
    if not np.isfinite(L) or L <= 0:
        raise GeometryError(f"aperture side must be positive, got {L!r}")
    return 0.62 * np.sqrt(L**3), 2.0 * L**2


def pairwise_separation(rx_pos, src_pos, floor=SINGULARITY_FLOOR):
    """Separation vectors ``rx[m] - src[n]`` and distances, shape ``(M, N, 3)``."""
    d = rx_pos[:, None, :] - src_pos[None, :, :]
    return _separation(d, 0.0, floor)
