"""MIMO channel matrices built from Green's functions.

Rows and columns are stacked polarization-major: all x-polarized receivers
first, then y, then z (columns likewise for sources).  Within a polarization
block the element order of the geometry is kept.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ShapeError, SingularityError, SolverError
from .geometry import ArrayGeometry, min_cross_separation
from .green import (
    SINGULARITY_FLOOR,
    GreensKind,
    dyadic_kernel,
    farfield_kernel,
    pairwise_separation,
    scalar_kernel,
)

AXES = ("x", "y", "z")
LAYOUT = "polarization-major"
SYMMETRIZATION_TOL = 1e-12


def _canon_mask(mask):
    if isinstance(mask, str):
        mask = tuple(mask)
    mask = tuple(str(a).lower() for a in mask)
    bad = [a for a in mask if a not in AXES]
    if bad:
        raise ShapeError(f"unknown polarization axis {bad[0]!r}")
    if len(set(mask)) != len(mask):
        raise ShapeError(f"repeated axis in polarization mask {mask!r}")
    if not mask:
        raise ShapeError("polarization mask must not be empty")
    return tuple(a for a in AXES if a in mask)


@dataclass(frozen=True)
class PolarizationMode:
    source_mask: tuple = ("x", "y", "z")
    receiver_mask: tuple = ("x", "y", "z")
    kind: GreensKind = GreensKind.DYADIC_FULL

    def __post_init__(self):
        object.__setattr__(self, "source_mask", _canon_mask(self.source_mask))
        object.__setattr__(self, "receiver_mask", _canon_mask(self.receiver_mask))
        object.__setattr__(self, "kind", GreensKind(self.kind))
        if self.kind is GreensKind.SCALAR and (
            len(self.source_mask) != 1 or len(self.receiver_mask) != 1
        ):
            raise ShapeError("the scalar kernel needs single-axis masks")

    @classmethod
    def scalar(cls):
        # single co-polarized pair; the scalar kernel has no polarization content
        return cls(("x",), ("x",), GreensKind.SCALAR)

    @classmethod
    def full(cls):
        return cls()

    @classmethod
    def two_transverse(cls):
        return cls(("x", "y"), AXES, GreensKind.DYADIC_FULL)

    @classmethod
    def one_transverse(cls):
        return cls(("x",), AXES, GreensKind.DYADIC_FULL)

    @classmethod
    def farfield(cls):
        return cls(AXES, AXES, GreensKind.DYADIC_FARFIELD)

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "source": list(self.source_mask),
            "receiver": list(self.receiver_mask),
        }


NAMED_MODES = {
    "scalar": PolarizationMode.scalar,
    "full": PolarizationMode.full,
    "dyadic": PolarizationMode.full,
    "two-transverse": PolarizationMode.two_transverse,
    "one-transverse": PolarizationMode.one_transverse,
    "farfield": PolarizationMode.farfield,
}


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    entries: np.ndarray
    mode: PolarizationMode
    n_receivers: int
    n_sources: int
    receiver_label: str = ""
    source_label: str = ""
    layout: str = LAYOUT

    def __post_init__(self):
        H = np.asarray(self.entries, dtype=complex)
        expect = (
            len(self.mode.receiver_mask) * self.n_receivers,
            len(self.mode.source_mask) * self.n_sources,
        )
        if H.shape != expect:
            raise ShapeError(f"channel shape {H.shape} does not match mode/geometry {expect}")
        if not np.all(np.isfinite(H)):
            raise ShapeError("channel entries must be finite")
        H.setflags(write=False)
        object.__setattr__(self, "entries", H)

    @property
    def shape(self):
        return self.entries.shape

    def block(self, p, q) -> np.ndarray:
        """Sub-matrix coupling source polarization ``q`` to receiver polarization ``p``."""
        i = self.mode.receiver_mask.index(p)
        j = self.mode.source_mask.index(q)
        M, N = self.n_receivers, self.n_sources
        return self.entries[i * M:(i + 1) * M, j * N:(j + 1) * N]

    def conj(self) -> "ChannelMatrix":
        return ChannelMatrix(
            self.entries.conj(), self.mode, self.n_receivers, self.n_sources,
            self.receiver_label, self.source_label, self.layout,
        )


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    entries: np.ndarray
    side_used: str  # "HdaggerH" or "HHdagger"


_KERNELS = {
    GreensKind.DYADIC_FULL: dyadic_kernel,
    GreensKind.DYADIC_FARFIELD: farfield_kernel,
}


def assemble_channel(
    src: ArrayGeometry,
    rx: ArrayGeometry,
    mode: PolarizationMode,
    floor: float = SINGULARITY_FLOOR,
) -> ChannelMatrix:
    """Evaluate the selected kernel between every receiver and source element.

    Entry ``(p*M + m, q*N + n)`` holds component ``(p, q)`` of the kernel from
    source ``n`` to receiver ``m``.
    """
    sep = min_cross_separation(src, rx)
    if sep < floor:
        raise SingularityError(
            f"source and receiver arrays come within {sep:g} wavelengths (floor {floor:g})"
        )
    d, R = pairwise_separation(rx.positions, src.positions, floor)
    M, N = len(rx), len(src)
    if mode.kind is GreensKind.SCALAR:
        H = scalar_kernel(d, R)
    else:
        G = _KERNELS[mode.kind](d, R)  # (M, N, 3, 3)
        rp = [AXES.index(a) for a in mode.receiver_mask]
        sq = [AXES.index(a) for a in mode.source_mask]
        G = G[:, :, rp, :][:, :, :, sq]
        H = G.transpose(2, 0, 3, 1).reshape(len(rp) * M, len(sq) * N)
    return ChannelMatrix(H, mode, M, N, rx.label, src.label)


def apply_channel(H: ChannelMatrix, t) -> np.ndarray:
    """Received amplitudes ``f = H t``."""
    t = np.asarray(t, dtype=complex)
    if t.ndim != 1 or t.shape[0] != H.shape[1]:
        raise ShapeError(f"source vector length {t.shape} does not match {H.shape[1]} columns")
    return H.entries @ t


def correlation(H: ChannelMatrix) -> CorrelationMatrix:
    """Gram matrix on the smaller side of ``H`` (``H^dagger H`` on ties)."""
    A = H.entries
    if A.shape[1] <= A.shape[0]:
        R, side = A.conj().T @ A, "HdaggerH"
    else:
        R, side = A @ A.conj().T, "HHdagger"
    Rs = 0.5 * (R + R.conj().T)
    scale = np.linalg.norm(Rs)
    drift = np.linalg.norm(R - Rs)
    if scale > 0 and drift > SYMMETRIZATION_TOL * scale:
        raise SolverError(f"correlation product drifted from Hermitian by {drift / scale:.3g}")
    return CorrelationMatrix(Rs, side)


# -- matrix dump --------------------------------------------------------------

MAGIC = "EMDOF-CHANNEL 1"


def write_channel(H: ChannelMatrix, path) -> None:
    """Dump ``H`` as one JSON header line followed by little-endian complex128 data.

    The body is the matrix in row-major order, each entry as two IEEE-754
    doubles (real, imaginary).
    """
    header = {
        "magic": MAGIC,
        "shape": list(H.shape),
        "n_receivers": H.n_receivers,
        "n_sources": H.n_sources,
        "receiver_mask": list(H.mode.receiver_mask),
        "source_mask": list(H.mode.source_mask),
        "kind": H.mode.kind.value,
        "layout": H.layout,
        "units": "wavelength",
        "k0": "2*pi",
        "time_convention": "exp(-j k0 R)",
        "receiver_label": H.receiver_label,
        "source_label": H.source_label,
    }
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(np.ascontiguousarray(H.entries, dtype="<c16").tobytes())
    tmp.replace(path)


def read_channel(path) -> ChannelMatrix:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline())
        if header.get("magic") != MAGIC:
            raise ShapeError(f"{path}: not a channel dump")
        body = fh.read()
    rows, cols = header["shape"]
    H = np.frombuffer(body, dtype="<c16")
    if H.size != rows * cols:
        raise ShapeError(f"{path}: expected {rows * cols} entries, found {H.size}")
    mode = PolarizationMode(header["source_mask"], header["receiver_mask"], header["kind"])
    return ChannelMatrix(
        H.reshape(rows, cols).astype(complex), mode,
        header["n_receivers"], header["n_sources"],
        header["receiver_label"], header["source_label"], header["layout"],
    )
