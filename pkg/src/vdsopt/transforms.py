"""Matrix-free orthonormal transforms and cross-Gram utilities.

Every basis is represented by a pair of linear maps, ``analyze`` (apply the
conjugate-transpose of the basis matrix) and ``synthesize`` (apply the basis
matrix itself), both unitary on C^N.  The cross-Gram matrix of a sensing /
sparsity basis pair is never materialized: individual rows are produced on
demand and masked products are computed with two fast transforms.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

TRANSFORM_TAGS = ("dirac", "fourier", "hadamard", "haar", "daubechies4",
                  "modulated_fourier")

# Orthonormal 4-tap filter, sums to sqrt(2).
_DB4_LOWPASS = np.array([
    (1.0 + np.sqrt(3.0)) / (4.0 * np.sqrt(2.0)),
    (3.0 + np.sqrt(3.0)) / (4.0 * np.sqrt(2.0)),
    (3.0 - np.sqrt(3.0)) / (4.0 * np.sqrt(2.0)),
    (1.0 - np.sqrt(3.0)) / (4.0 * np.sqrt(2.0)),
])
_HAAR_LOWPASS = np.array([1.0, 1.0]) / np.sqrt(2.0)


class DimensionError(ValueError):
    """Vector length incompatible with the basis."""


@dataclass(frozen=True)
class BasisKind:
    """One orthonormal basis: a tag plus kind-specific parameters.

    ``levels`` applies to wavelet kinds only (None means full depth);
    ``modulation`` is the unit-magnitude pre-modulation sequence of the
    spread-spectrum kind.
    """

    tag: str
    levels: Optional[int] = None
    modulation: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.tag not in TRANSFORM_TAGS:
            raise ValueError(f"unknown basis tag {self.tag!r}")
        if self.tag == "modulated_fourier":
            if self.modulation is None:
                raise ValueError("modulated_fourier requires a modulation sequence")
            mags = np.abs(np.asarray(self.modulation))
            if not np.allclose(mags, 1.0, rtol=0, atol=1e-12):
                raise ValueError("modulation entries must have magnitude 1")

    def validate_n(self, n: int) -> None:
        if self.tag != "dirac" and (n <= 0 or n & (n - 1) != 0):
            raise DimensionError(f"{self.tag} requires power-of-two length, got {n}")
        if self.tag in ("haar", "daubechies4") and self.levels is not None:
            max_levels = int(np.log2(n))
            if not 1 <= self.levels <= max_levels:
                raise DimensionError(
                    f"levels={self.levels} outside [1, {max_levels}] for N={n}")
        if self.tag == "modulated_fourier" and len(self.modulation) != n:
            raise DimensionError("modulation length does not match N")


def dirac() -> BasisKind:
    return BasisKind("dirac")


def fourier() -> BasisKind:
    return BasisKind("fourier")


def hadamard() -> BasisKind:
    return BasisKind("hadamard")


def haar(levels: Optional[int] = None) -> BasisKind:
    return BasisKind("haar", levels=levels)


def daubechies4(levels: Optional[int] = None) -> BasisKind:
    return BasisKind("daubechies4", levels=levels)


def modulated_fourier(modulation: np.ndarray) -> BasisKind:
    return BasisKind("modulated_fourier", modulation=np.asarray(modulation))


@dataclass(frozen=True)
class BasisPair:
    """Sensing and sparsity bases sharing one dimension."""

    sensing: BasisKind
    sparsity: BasisKind
    n: int

    def __post_init__(self):
        self.sensing.validate_n(self.n)
        self.sparsity.validate_n(self.n)

    def describe(self) -> str:
        return f"{self.sensing.tag}/{self.sparsity.tag}(N={self.n})"


def _as_complex(x) -> np.ndarray:
    return np.asarray(x, dtype=np.complex128)


def _fwht(x: np.ndarray) -> np.ndarray:
    """Fast Walsh-Hadamard transform, Sylvester ordering, unnormalized."""
    y = x.copy()
    h = 1
    n = len(y)
    while h < n:
        y = y.reshape(-1, 2, h)
        top = y[:, 0, :] + y[:, 1, :]
        bot = y[:, 0, :] - y[:, 1, :]
        y = np.stack([top, bot], axis=1).reshape(n)
        h *= 2
    return y


def _wavelet_levels(basis: BasisKind, n: int) -> int:
    return basis.levels if basis.levels is not None else int(np.log2(n))


def _dwt_periodic(x: np.ndarray, lowpass: np.ndarray, levels: int) -> np.ndarray:
    """Periodized orthonormal DWT; output is [approx, detail_coarse..detail_fine]."""
    h = lowpass
    g = (h[::-1] * (-1.0) ** np.arange(len(h)))  # quadrature mirror highpass
    out = x.copy()
    length = len(x)
    for _ in range(levels):
        seg = out[:length]
        a = np.zeros(length // 2, dtype=seg.dtype)
        d = np.zeros(length // 2, dtype=seg.dtype)
        for k in range(len(h)):
            shifted = np.roll(seg, -k)[::2]
            a += h[k] * shifted
            d += g[k] * shifted
        out[:length // 2] = a
        out[length // 2:length] = d
        length //= 2
    return out


def _idwt_periodic(c: np.ndarray, lowpass: np.ndarray, levels: int) -> np.ndarray:
    h = lowpass
    g = (h[::-1] * (-1.0) ** np.arange(len(h)))
    out = c.copy()
    length = len(c) >> levels
    for _ in range(levels):
        a = out[:length]
        d = out[length:2 * length]
        up_a = np.zeros(2 * length, dtype=out.dtype)
        up_d = np.zeros(2 * length, dtype=out.dtype)
        up_a[::2] = a
        up_d[::2] = d
        rec = np.zeros(2 * length, dtype=out.dtype)
        for k in range(len(h)):
            rec += h[k] * np.roll(up_a, k) + g[k] * np.roll(up_d, k)
        out[:2 * length] = rec
        length *= 2
    return out


def analyze(basis: BasisKind, x) -> np.ndarray:
    """Apply the conjugate-transpose of the basis matrix (coefficients of x)."""
    x = _as_complex(x)
    n = len(x)
    basis.validate_n(n)
    if basis.tag == "dirac":
        return x.copy()
    if basis.tag == "fourier":
        return np.fft.fft(x, norm="ortho")
    if basis.tag == "modulated_fourier":
        return np.fft.fft(np.asarray(basis.modulation) * x, norm="ortho")
    if basis.tag == "hadamard":
        return _fwht(x) / np.sqrt(n)
    if basis.tag == "haar":
        return _dwt_periodic(x, _HAAR_LOWPASS, _wavelet_levels(basis, n))
    if basis.tag == "daubechies4":
        return _dwt_periodic(x, _DB4_LOWPASS, _wavelet_levels(basis, n))
    raise AssertionError(basis.tag)


def synthesize(basis: BasisKind, c) -> np.ndarray:
    """Apply the basis matrix; exact inverse (adjoint) of :func:`analyze`."""
    c = _as_complex(c)
    n = len(c)
    basis.validate_n(n)
    if basis.tag == "dirac":
        return c.copy()
    if basis.tag == "fourier":
        return np.fft.ifft(c, norm="ortho")
    if basis.tag == "modulated_fourier":
        return np.conj(np.asarray(basis.modulation)) * np.fft.ifft(c, norm="ortho")
    if basis.tag == "hadamard":
        return _fwht(c) / np.sqrt(n)
    if basis.tag == "haar":
        return _idwt_periodic(c, _HAAR_LOWPASS, _wavelet_levels(basis, n))
    if basis.tag == "daubechies4":
        return _idwt_periodic(c, _DB4_LOWPASS, _wavelet_levels(basis, n))
    raise AssertionError(basis.tag)


def gram_row(pair: BasisPair, i: int) -> np.ndarray:
    """Row i (0-based) of the cross-Gram matrix sensing^dagger @ sparsity."""
    if not 0 <= i < pair.n:
        raise IndexError(f"row index {i} out of range for N={pair.n}")
    e = np.zeros(pair.n, dtype=np.complex128)
    e[i] = 1.0
    phi_i = synthesize(pair.sensing, e)
    # row_i = phi_i^dagger Psi = conj(Psi^dagger phi_i)^T
    return np.conj(analyze(pair.sparsity, phi_i))


def dense_gram(pair: BasisPair) -> np.ndarray:
    """Full N x N cross-Gram matrix; intended for small-N checks only."""
    return np.stack([gram_row(pair, i) for i in range(pair.n)])


def _check_mask(mask: np.ndarray, n: int) -> np.ndarray:
    mask = np.asarray(mask, dtype=np.intp)
    if mask.size and (mask.min() < 0 or mask.max() >= n):
        raise IndexError("mask index out of range")
    if len(np.unique(mask)) != len(mask):
        raise ValueError("duplicate indices in mask")
    return mask


def apply_A_masked(pair: BasisPair, mask, alpha) -> np.ndarray:
    """y = (sensing^dagger sparsity) alpha restricted to the rows in mask."""
    alpha = _as_complex(alpha)
    if len(alpha) != pair.n:
        raise DimensionError("coefficient vector length does not match N")
    mask = _check_mask(mask, pair.n)
    full = analyze(pair.sensing, synthesize(pair.sparsity, alpha))
    return full[mask]


def apply_A_masked_adjoint(pair: BasisPair, mask, y) -> np.ndarray:
    """Adjoint of :func:`apply_A_masked`: scatter y into the mask rows."""
    y = _as_complex(y)
    mask = _check_mask(mask, pair.n)
    if len(y) != len(mask):
        raise DimensionError("measurement length does not match mask size")
    embedded = np.zeros(pair.n, dtype=np.complex128)
    embedded[mask] = y
    return analyze(pair.sparsity, synthesize(pair.sensing, embedded))
