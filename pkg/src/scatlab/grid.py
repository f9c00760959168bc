"""Discrete periodic sampling model: grids, signals, unitary Fourier
transforms, dyadic dilations and annulus projections.

All other modules build on the exact Parseval semantics provided here:
the torus (R/LZ)^d is sampled at n points per axis (n a power of two),
the DFT is taken in its unitary normalization, and dilations are pure
index remappings on the frequency lattice.  Convolution against a filter
is therefore exact spectral multiplication and every energy identity
holds to round-off.

The frequency lattice per axis is {k/L : k = -n/2, ..., n/2 - 1}.
Spectra are stored in numpy's standard FFT ordering; use
``Grid.freq_indices`` / ``Grid.freq_values`` to recover lattice
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    GridMismatch,
    InvalidShell,
    NonIntegerFactor,
    NyquistOverflow,
)

_FORMAT_VERSION = 1


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Sampling grid for the torus (R/LZ)^d.

    Parameters
    ----------
    d : int
        Dimension, 1 or 2.
    n : int
        Points per axis; a power of two, at least 8.
    L : float
        Spatial period per axis (positive).
    """

    d: int
    n: int
    L: float

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.d}")
        if not _is_power_of_two(self.n) or self.n < 8:
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not (self.L > 0):
            raise ValueError(f"period L must be positive, got {self.L}")

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def nyquist(self) -> float:
        """Largest representable frequency magnitude per axis, n/(2L)."""
        return self.n / (2.0 * self.L)

    def freq_indices(self) -> np.ndarray:
        """Integer frequency indices per axis in FFT ordering.

        Returns the array (0, 1, ..., n/2 - 1, -n/2, ..., -1).
        """
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    def freq_values(self) -> tuple:
        """Frequency coordinate arrays, one (broadcastable) array per axis.

        For d=1 returns a 1-tuple with shape (n,); for d=2 a 2-tuple of
        shapes (n, 1) and (1, n) so that expressions broadcast to (n, n).
        """
        k = self.freq_indices() / self.L
        if self.d == 1:
            return (k,)
        return (k.reshape(-1, 1), k.reshape(1, -1))

    def freq_norm(self) -> np.ndarray:
        """Euclidean norm of the frequency lattice points, FFT ordering."""
        axes = self.freq_values()
        if self.d == 1:
            return np.abs(axes[0])
        return np.sqrt(axes[0] ** 2 + axes[1] ** 2)

    def spatial_coordinates(self) -> tuple:
        """Sample coordinate arrays x_i = i*L/n per axis (broadcastable)."""
        x = np.arange(self.n) * (self.L / self.n)
        if self.d == 1:
            return (x,)
        return (x.reshape(-1, 1), x.reshape(1, -1))


class Signal:
    """Spatial-domain signal on a grid (complex samples, row-major)."""

    __slots__ = ("grid", "samples")

    def __init__(self, grid: Grid, samples: np.ndarray):
        samples = np.asarray(samples)
        if samples.shape != grid.shape:
            raise ValueError(
                f"sample shape {samples.shape} does not match grid shape {grid.shape}"
            )
        self.grid = grid
        self.samples = np.ascontiguousarray(samples, dtype=np.complex128)

    def norm(self) -> float:
        return float(np.linalg.norm(self.samples))

    def energy(self) -> float:
        """Squared l2 norm of the samples."""
        return float(np.sum(np.abs(self.samples) ** 2))

    def copy(self) -> "Signal":
        return Signal(self.grid, self.samples.copy())


class SpectralSignal:
    """Frequency-domain signal; coefficients in numpy FFT ordering."""

    __slots__ = ("grid", "coefficients")

    def __init__(self, grid: Grid, coefficients: np.ndarray):
        coefficients = np.asarray(coefficients)
        if coefficients.shape != grid.shape:
            raise ValueError(
                f"coefficient shape {coefficients.shape} does not match grid "
                f"shape {grid.shape}"
            )
        self.grid = grid
        self.coefficients = np.ascontiguousarray(coefficients, dtype=np.complex128)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def copy(self) -> "SpectralSignal":
        return SpectralSignal(self.grid, self.coefficients.copy())


def require_same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatch(f"grids differ: {a.grid} vs {b.grid}")


def forward_fourier(f: Signal) -> SpectralSignal:
    """Unitary DFT of a spatial signal.

    Uses the symmetric 1/sqrt(n^d) normalization, so
    sum |f_hat|^2 == sum |f|^2 exactly up to round-off.
    """
    return SpectralSignal(f.grid, np.fft.fftn(f.samples, norm="ortho"))


def inverse_fourier(F: SpectralSignal) -> Signal:
    """Unitary inverse DFT; exact inverse of :func:`forward_fourier`."""
    return Signal(F.grid, np.fft.ifftn(F.coefficients, norm="ortho"))


def modulus(f: Signal) -> Signal:
    """Pointwise absolute value; preserves the l2 norm."""
    return Signal(f.grid, np.abs(f.samples))


def _dyadic_factor(m: int, a: float):
    """Resolve a**m into ('expand', s) or ('contract', s) with integer s.

    Raises NonIntegerFactor when a**m is neither an integer nor the
    reciprocal of an integer.
    """
    value = float(a) ** m
    if value >= 1.0:
        s = int(round(value))
        if s >= 1 and abs(value - s) <= 1e-9 * s:
            return "expand", s
    else:
        inv = 1.0 / value
        s = int(round(inv))
        if s >= 1 and abs(inv - s) <= 1e-9 * s:
            return "contract", s
    raise NonIntegerFactor(f"a**m = {a}**{m} = {value} is not in Z or 1/Z")


def _axis_maps(n: int, mode: str, s: int):
    """Per-axis source positions, their validity mask and target positions."""
    k = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
    if mode == "expand":
        t = s * k
        valid = (t >= -n // 2) & (t <= n // 2 - 1)
        target = np.mod(t, n)
    else:
        valid = np.mod(k, s) == 0
        target = np.mod(k // s, n)
    return valid, target


def remap_spectrum(coefficients: np.ndarray, grid: Grid, m: int, a: float = 2.0) -> np.ndarray:
    """Spectral index remap xi -> a^m * xi on the lattice (support dilation).

    The remap is a permutation of the occupied lattice sites: a
    coefficient at integer index k moves to index a^m * k.  No amplitude
    factor is applied, so the counting-measure Parseval sum -- and with
    it the unitary-model l2 norm -- is preserved exactly.

    Raises
    ------
    NyquistOverflow
        If any nonzero coefficient has no lattice image (target outside
        [-n/2, n/2-1], or source index not divisible by the reciprocal
        factor).
    NonIntegerFactor
        If a**m is neither integer nor reciprocal-integer.
    """
    coefficients = np.asarray(coefficients)
    if coefficients.shape != grid.shape:
        raise ValueError("coefficient shape does not match grid")
    if m == 0:
        return coefficients.copy()
    mode, s = _dyadic_factor(m, a)
    if s == 1:
        return coefficients.copy()
    valid, target = _axis_maps(grid.n, mode, s)

    # round-trip FFT noise leaves ~1e-17-relative dust on empty bins; only
    # genuinely occupied coefficients count as stranded
    tol = 1e-12 * float(np.max(np.abs(coefficients)), )
    out = np.zeros_like(coefficients)
    if grid.d == 1:
        if np.any(np.abs(coefficients[~valid]) > tol):
            raise NyquistOverflow(
                f"nonzero coefficient has no lattice image under factor a^m = {a}**{m}"
            )
        out[target[valid]] = coefficients[valid]
    else:
        bad_rows = np.any(np.abs(coefficients[~valid, :]) > tol)
        bad_cols = np.any(np.abs(coefficients[:, ~valid]) > tol)
        if bad_rows or bad_cols:
            raise NyquistOverflow(
                f"nonzero coefficient has no lattice image under factor a^m = {a}**{m}"
            )
        out[np.ix_(target[valid], target[valid])] = coefficients[np.ix_(valid, valid)]
    return out


def dilate_spectral(F: SpectralSignal, m: int, a: float = 2.0) -> SpectralSignal:
    """Dilate a spectral signal by the factor a^m (support moves up for m>0)."""
    return SpectralSignal(F.grid, remap_spectrum(F.coefficients, F.grid, m, a))


def dilate_L2(f: Signal, m: int, a: float = 2.0) -> Signal:
    """Unitary (norm-preserving) dyadic dilation of a spatial signal.

    Implemented spectrally: the spectrum's support is remapped by
    xi -> a^m * xi.  On the unitary lattice the remap is a permutation,
    so ||D f||_2 = ||f||_2 exactly.
    """
    F = forward_fourier(f)
    return inverse_fourier(dilate_spectral(F, m, a))


def dilate_L1(f: Signal, m: int, a: float = 2.0) -> Signal:
    """Filter-normalized dyadic dilation: spectral values are permuted,
    never scaled (max |f_hat| is invariant).

    On the unitary lattice this coincides with :func:`dilate_L2`; the two
    entry points are kept separate because they express different
    continuum conventions (signal dilation vs. filter dilation).
    """
    return dilate_L2(f, m, a)


def project_annulus(f: Signal, r: float, R: float) -> Signal:
    """Orthogonal projection onto frequencies in the closed shell r <= |xi| <= R.

    Raises InvalidShell unless 0 < r < R.
    """
    if not (0 < r < R):
        raise InvalidShell(f"need 0 < r < R, got r={r}, R={R}")
    F = forward_fourier(f)
    norms = f.grid.freq_norm()
    mask = (norms >= r) & (norms <= R)
    return inverse_fourier(SpectralSignal(f.grid, F.coefficients * mask))


# ---------------------------------------------------------------------------
# Signal container files: UTF-8 key/value header, blank line, then
# little-endian float64 (re, im) pairs in row-major order.
# ---------------------------------------------------------------------------


def save_signal(path, obj) -> None:
    """Write a Signal or SpectralSignal to a container file."""
    if isinstance(obj, Signal):
        domain = "spatial"
        data = obj.samples
    elif isinstance(obj, SpectralSignal):
        domain = "spectral"
        data = obj.coefficients
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    grid = obj.grid
    header = (
        f"format_version {_FORMAT_VERSION}\n"
        f"d {grid.d}\n"
        f"n {grid.n}\n"
        f"L {grid.L!r}\n"
        f"domain {domain}\n"
        "\n"
    )
    flat = np.ravel(data)
    payload = np.empty(2 * flat.size, dtype="<f8")
    payload[0::2] = flat.real
    payload[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8"))
        fh.write(payload.tobytes())


def load_signal(path):
    """Read a container file; returns Signal or SpectralSignal per header."""
    with open(path, "rb") as fh:
        blob = fh.read()
    sep = blob.index(b"\n\n")
    header_text = blob[:sep].decode("utf-8")
    fields = {}
    for line in header_text.splitlines():
        key, _, value = line.partition(" ")
        fields[key] = value
    version = int(fields["format_version"])
    if version != _FORMAT_VERSION:
        raise ValueError(f"unsupported container version {version}")
    grid = Grid(d=int(fields["d"]), n=int(fields["n"]), L=float(fields["L"]))
    payload = np.frombuffer(blob[sep + 2 :], dtype="<f8")
    if payload.size != 2 * grid.size:
        raise ValueError("container payload size does not match grid")
    data = (payload[0::2] + 1j * payload[1::2]).reshape(grid.shape)
    if fields["domain"] == "spatial":
        return Signal(grid, data)
    if fields["domain"] == "spectral":
        return SpectralSignal(grid, data)
    raise ValueError(f"unknown domain {fields['domain']!r}")
