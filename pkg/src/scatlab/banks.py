"""Semi-discrete Parseval filter banks on the frequency lattice.

A bank is a low-pass spectrum chi together with an indexed family of
high-pass spectra psi, satisfying the squared partition
|chi|^2 + sum |psi|^2 = 1 on a declared covered band of the lattice.
Constructors attach the scale/cone geometry (shell radii r_j, overlap
kappa, gap ratio gamma, cone opening rho) that the decay certificates
consume, and the module computes the derived geometric constants:
the contraction factor alpha(gamma, rho), Chebyshev radii d_psi of the
spectral supports, and the per-filter shift vectors nu_psi.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    CoverageGap,
    DomainError,
    EmptySupport,
    MissingMetadata,
    NonUnitLP,
    NyquistOverflow,
)
from .grid import Grid, SpectralSignal, load_signal, save_signal
from .minidisk import smallest_enclosing_ball

#: magnitudes below this are snapped to exact zero in constructors so that
#: declared shell supports hold exactly (noted in exported manifests)
SUPPORT_SNAP = 1e-14


def _snap(spectrum: np.ndarray) -> np.ndarray:
    out = np.asarray(spectrum, dtype=np.float64).copy()
    out[np.abs(out) < SUPPORT_SNAP] = 0.0
    return out


@dataclass(frozen=True)
class ConeSpec:
    """Rotated cone H^rho: A^T xi componentwise >= 0 and within angular
    parameter rho of the diagonal direction nu*."""

    A: tuple  # row-major orthogonal matrix, as nested tuples for hashability
    rho: float

    def __post_init__(self):
        A = self.matrix
        if not np.allclose(A.T @ A, np.eye(A.shape[0]), atol=1e-12):
            raise ValueError("cone rotation must be orthogonal to 1e-12")
        if not (0.0 <= self.rho < 1.0):
            raise ValueError(f"cone opening rho must be in [0,1), got {self.rho}")

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.A, dtype=np.float64)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def nu_star(self) -> np.ndarray:
        d = self.d
        return np.full(d, 1.0 / math.sqrt(d))


def cone_membership(xi, cone: ConeSpec) -> bool:
    """True iff xi lies in the rotated cone (tolerance 1e-12)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    y = cone.matrix.T @ xi
    if np.any(y < -1e-12):
        return False
    return float(y @ cone.nu_star) >= (1.0 - cone.rho) * float(np.linalg.norm(xi)) - 1e-12


def max_distance_bound(t: float, rho: float) -> float:
    """Upper bound on ||x - t*nu*|| over unit vectors x in the cone H^rho."""
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    if not (0.0 <= rho < 1.0):
        raise DomainError(f"rho must be in [0,1), got {rho}")
    return math.sqrt(max(t * t - 2.0 * t * (1.0 - rho) + 1.0, 0.0))


def compute_alpha(gamma: float, rho: float) -> float:
    """Contraction factor alpha(gamma, rho) of the spectral-shift argument.

    Strictly decreasing in gamma and increasing in rho; always in (0, 1)
    on the admissible parameter region.
    """
    if not (0.0 < gamma < 1.0):
        raise DomainError(f"gamma must be in (0,1), got {gamma}")
    if not (0.0 <= rho < 1.0):
        raise DomainError(f"rho must be in [0,1), got {rho}")
    return math.sqrt(1.0 - 4.0 * gamma / (1.0 + gamma) ** 2 * (1.0 - rho) ** 2)


class Filter:
    """One high-pass filter: label, spectrum, and optional shell/cone data.

    The spectrum is a real nonnegative array over the full frequency
    lattice (FFT ordering); all constructors in this module produce real
    spectra.
    """

    __slots__ = ("label", "j", "g", "grid", "spectrum", "annulus", "cone", "_d_psi")

    def __init__(self, label, j, g, grid, spectrum, annulus=None, cone=None):
        self.label = label
        self.j = j
        self.g = g
        self.grid = grid
        self.spectrum = spectrum
        self.annulus = annulus
        self.cone = cone
        self._d_psi = None

    def support_points(self) -> np.ndarray:
        """(m, d) array of frequency coordinates with nonzero spectrum."""
        mask = self.spectrum != 0
        if not np.any(mask):
            raise EmptySupport(f"filter {self.label} has empty lattice support")
        axes = self.grid.freq_values()
        if self.grid.d == 1:
            return axes[0][mask].reshape(-1, 1)
        xx = np.broadcast_to(axes[0], self.spectrum.shape)
        yy = np.broadcast_to(axes[1], self.spectrum.shape)
        return np.column_stack([xx[mask], yy[mask]])

    @property
    def d_psi(self) -> float:
        if self._d_psi is None:
            self._d_psi = chebyshev_radius(self)
        return self._d_psi


def chebyshev_radius(filt: Filter) -> float:
    """Radius of the smallest ball enclosing the filter's lattice support."""
    _, radius = smallest_enclosing_ball(filt.support_points())
    return radius


def shift_vector(filt: Filter, bank: "FilterBank") -> np.ndarray:
    """Shift vector nu_psi = 2 r_j / (1 + gamma) * (1 - rho) * A_psi nu*.

    Every support frequency xi then satisfies
    ||xi - nu_psi|| <= alpha * ||xi|| with alpha = bank.alpha.
    """
    if filt.annulus is None or filt.cone is None:
        raise MissingMetadata(f"filter {filt.label} lacks annulus/cone metadata")
    r_j = filt.annulus[0]
    rho = filt.cone.rho
    scale = 2.0 * r_j / (1.0 + bank.gamma) * (1.0 - rho)
    return scale * (filt.cone.matrix @ filt.cone.nu_star)


@dataclass
class LPReport:
    max_deviation: float
    mean_deviation: float
    worst_frequency: tuple
    covered_fraction: float


class FilterBank:
    """Immutable container of (chi, psi family) plus geometry metadata.

    Parameters
    ----------
    grid : Grid
    chi : real ndarray over the lattice (low-pass spectrum)
    filters : list of Filter, any order (stored sorted by (j, g))
    scales : strictly increasing shell radii (r_j), one per scale index
    kappa : shell overlap (>= 2)
    rho : cone opening shared by the bank's filters
    covered_mask : boolean lattice mask on which the LP partition holds
    structure : dict with at least {"kind": "generic"|"ufc"|"wavelet"}
    lp_tolerance : declared bound for |LP-sum - 1| on the covered band
    """

    def __init__(self, grid, chi, filters, scales, kappa, rho, covered_mask,
                 structure=None, lp_tolerance=1e-10):
        self.grid = grid
        self.chi = _snap(chi)
        self.filters = sorted(filters, key=lambda f: (f.j, f.g))
        self.scales = [float(r) for r in scales]
        if any(b <= a for a, b in zip(self.scales, self.scales[1:])):
            raise ValueError("scales must be strictly increasing")
        self.kappa = int(kappa)
        if self.kappa < 2:
            raise ValueError("kappa must be >= 2")
        self.rho = float(rho)
        self.covered_mask = np.asarray(covered_mask, dtype=bool)
        self.structure = dict(structure or {"kind": "generic"})
        self.lp_tolerance = float(lp_tolerance)
        self._by_label = {f.label: f for f in self.filters}
        if len(self._by_label) != len(self.filters):
            raise ValueError("duplicate filter labels")
        self._stack = None
        self.lp_deviation = float(
            np.max(np.abs(self.lp_sum()[self.covered_mask] - 1.0))
        ) if np.any(self.covered_mask) else 0.0

    # -- basic accessors -------------------------------------------------

    @property
    def labels(self):
        return [f.label for f in self.filters]

    def filter_by_label(self, label) -> Filter:
        try:
            return self._by_label[label]
        except KeyError:
            raise_unknown(label)

    @property
    def r1(self) -> float:
        return self.scales[0]

    @property
    def gamma(self) -> float:
        """inf_j r_j / r_{j+kappa} over represented scales."""
        rs = self.scales
        if len(rs) <= self.kappa:
            # single shell group: fall back to the ratio across the span
            return rs[0] / rs[-1] if len(rs) > 1 else 0.5
        return min(rs[j] / rs[j + self.kappa] for j in range(len(rs) - self.kappa))

    @property
    def alpha(self) -> float:
        return compute_alpha(self.gamma, self.rho)

    def spec_stack(self) -> np.ndarray:
        """(num_filters, *grid.shape) float64 stack in label order (cached)."""
        if self._stack is None:
            self._stack = np.stack([f.spectrum for f in self.filters])
        return self._stack

    # -- verification ----------------------------------------------------

    def lp_sum(self) -> np.ndarray:
        total = self.chi**2
        for f in self.filters:
            total = total + f.spectrum**2
        return total

    def highpass_sq_sum(self) -> np.ndarray:
        total = np.zeros(self.grid.shape)
        for f in self.filters:
            total = total + f.spectrum**2
        return total

    def frequency_gap_ok(self) -> bool:
        """True iff sum |psi|^2 vanishes identically below r_1."""
        below = self.grid.freq_norm() < self.r1
        return not np.any(self.highpass_sq_sum()[below] != 0)


def raise_unknown(label):
    from .errors import UnknownLabel

    raise UnknownLabel(f"no filter labeled {label!r} in bank")


def verify_littlewood_paley(bank: FilterBank) -> LPReport:
    """Deviation of |chi|^2 + sum |psi|^2 from 1 over the covered band."""
    dev = np.abs(bank.lp_sum() - 1.0)
    masked = np.where(bank.covered_mask, dev, -np.inf)
    flat_idx = int(np.argmax(masked))
    idx = np.unravel_index(flat_idx, bank.grid.shape)
    axes = bank.grid.freq_values()
    if bank.grid.d == 1:
        worst = (float(axes[0][idx[0]]),)
    else:
        worst = (float(axes[0][idx[0], 0]), float(axes[1][0, idx[1]]))
    covered = dev[bank.covered_mask]
    return LPReport(
        max_deviation=float(covered.max()) if covered.size else 0.0,
        mean_deviation=float(covered.mean()) if covered.size else 0.0,
        worst_frequency=worst,
        covered_fraction=float(np.mean(bank.covered_mask)),
    )


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def _cone_1d(sign: int, rho: float = 0.0) -> ConeSpec:
    return ConeSpec(A=((float(sign),),), rho=rho)


def build_shannon_1d(grid: Grid, J_low: int, J_high: int) -> FilterBank:
    """Sharp dyadic band bank: chi = 1 on |xi| < 2^(J_low-1), and for each
    j = J_low..J_high two indicator filters of +-[2^(j-1), 2^j).

    The LP-sum is exactly 1 at every lattice point with |xi| < 2^J_high
    (the covered band); gamma = 1/4 for kappa = 2.
    """
    if grid.d != 1:
        raise ValueError("build_shannon_1d needs a 1D grid")
    if J_low > J_high:
        raise ValueError("J_low must not exceed J_high")
    if 2.0**J_high > grid.nyquist:
        raise NyquistOverflow(
            f"top band edge 2^{J_high} exceeds Nyquist {grid.nyquist}"
        )
    xi = grid.freq_values()[0]
    full = 2.0**J_high == grid.nyquist
    filters = []
    for j in range(J_low, J_high + 1):
        lo, hi = 2.0 ** (j - 1), 2.0**j
        pos = ((xi >= lo) & (xi < hi)).astype(np.float64)
        if full and j == J_high:
            # the -n/2 bin has |xi| = Nyquist = hi; fold it into the top
            # negative band so the partition covers the entire lattice
            neg = ((xi < 0) & (-xi >= lo) & (-xi <= hi)).astype(np.float64)
        else:
            neg = ((xi < 0) & (-xi >= lo) & (-xi < hi)).astype(np.float64)
        for g, spec, sign in ((0, pos, +1), (1, neg, -1)):
            filters.append(
                Filter(
                    label=f"j{j}.g{g}",
                    j=j,
                    g=g,
                    grid=grid,
                    spectrum=spec,
                    annulus=(lo, hi),
                    cone=_cone_1d(sign),
                )
            )
    chi = (np.abs(xi) < 2.0 ** (J_low - 1)).astype(np.float64)
    covered = (
        np.ones_like(xi, dtype=bool) if full else np.abs(xi) < 2.0**J_high
    )
    scales = [2.0 ** (j - 1) for j in range(J_low, J_high + 1)]
    return FilterBank(
        grid, chi, filters, scales, kappa=2, rho=0.0, covered_mask=covered,
        structure={"kind": "generic", "family": "shannon"}, lp_tolerance=0.0,
    )


def _smoothstep(t):
    """C^1 cubic transition s(t) = t^2 (3 - 2t) clamped to [0, 1]."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _meyer_sq_profile(u):
    """Squared mother spectrum on the half line; support [1/2, 2].

    Rises as s(2u-1) on [1/2, 1], falls as 1 - s(u-1) on [1, 2]; the
    dyadic translates u -> u/2^j then sum to exactly 1 for u > 1/2.
    """
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    rising = (u >= 0.5) & (u < 1.0)
    falling = (u >= 1.0) & (u <= 2.0)
    out[rising] = _smoothstep(2.0 * u[rising] - 1.0)
    out[falling] = 1.0 - _smoothstep(u[falling] - 1.0)
    return out


def build_meyer_1d(grid: Grid, J_low: int, J_high: int) -> FilterBank:
    """Smooth dyadic bank with C^1 spline transitions.

    Filter j has |psi_j(xi)|^2 = q(|xi| / 2^j) per side, where q is the
    squared mother profile with support [1/2, 2]; adjacent scales overlap
    and sum to 1 on the covered band |xi| <= 2^J_high.
    """
    if grid.d != 1:
        raise ValueError("build_meyer_1d needs a 1D grid")
    if J_low > J_high:
        raise ValueError("J_low must not exceed J_high")
    if 2.0 ** (J_high + 1) > grid.nyquist:
        raise NyquistOverflow(
            f"top filter support edge 2^{J_high + 1} exceeds Nyquist {grid.nyquist}"
        )
    xi = grid.freq_values()[0]
    absxi = np.abs(xi)
    filters = []
    for j in range(J_low, J_high + 1):
        sq = _meyer_sq_profile(absxi / 2.0**j)
        root = _snap(np.sqrt(sq))
        pos = np.where(xi > 0, root, 0.0)
        neg = np.where(xi < 0, root, 0.0)
        annulus = (2.0 ** (j - 1), 2.0 ** (j + 1))
        for g, spec, sign in ((0, pos, +1), (1, neg, -1)):
            filters.append(
                Filter(
                    label=f"j{j}.g{g}",
                    j=j,
                    g=g,
                    grid=grid,
                    spectrum=spec,
                    annulus=annulus,
                    cone=_cone_1d(sign),
                )
            )
    total = np.zeros(grid.shape)
    for f in filters:
        total += f.spectrum**2
    chi_sq = np.where(absxi <= 2.0**J_low, np.clip(1.0 - total, 0.0, None), 0.0)
    chi = _snap(np.sqrt(chi_sq))
    covered = absxi <= 2.0**J_high
    scales = [2.0 ** (j - 1) for j in range(J_low, J_high + 1)]
    return FilterBank(
        grid, chi, filters, scales, kappa=2, rho=0.0, covered_mask=covered,
        structure={"kind": "generic", "family": "meyer"}, lp_tolerance=1e-12,
    )


# -- 2D directional wavelet bank --------------------------------------------


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def directional_mother(a: float, n_rotations: int):
    """Default 2D mother spectrum evaluator for a directional bank.

    Radial part: squared partition of unity in log-a scale with support
    [1/a, a].  Angular part: cubic-transition partition of the circle of
    period 2*pi/n_rotations, support width 2*2*pi/n_rotations around the
    positive x-axis.  Returns a callable (xi_x, xi_y) -> values.
    """
    if n_rotations % 2 != 0:
        raise ValueError("n_rotations must be even (group must contain -I)")
    delta = 2.0 * math.pi / n_rotations
    log_a = math.log(a)

    def evaluate(xi_x, xi_y):
        xi_x = np.asarray(xi_x, dtype=np.float64)
        xi_y = np.asarray(xi_y, dtype=np.float64)
        r = np.sqrt(xi_x**2 + xi_y**2)
        sq_rad = np.zeros_like(r)
        positive = r > 0
        u = np.zeros_like(r)
        u[positive] = np.log(r[positive]) / log_a
        rising = positive & (u >= -1.0) & (u < 0.0)
        falling = positive & (u >= 0.0) & (u <= 1.0)
        sq_rad[rising] = _smoothstep(u[rising] + 1.0)
        sq_rad[falling] = 1.0 - _smoothstep(u[falling])

        theta = np.arctan2(xi_y, xi_x)
        sq_ang = np.zeros_like(theta)
        lo = (theta >= -delta) & (theta < 0.0)
        hi = (theta >= 0.0) & (theta <= delta)
        sq_ang[lo] = _smoothstep(theta[lo] / delta + 1.0)
        sq_ang[hi] = 1.0 - _smoothstep(theta[hi] / delta)
        return np.sqrt(sq_rad * sq_ang)

    return evaluate


def build_directional_2d(grid: Grid, a: float = 2.0, n_rotations: int = 8,
                         J: int = 0, mother=None) -> FilterBank:
    """Directional 2D bank psi_(j, i)(xi) = mother(a^-j R(-theta_i) xi).

    Scales a^j run from j = -J+1 up to the largest j with a^(j+1) under
    Nyquist; rotations theta_i = 2*pi*i/n_rotations (even count, so the
    group contains the rotation by pi).  ``mother`` is a callable
    (xi_x, xi_y) -> spectral values; the default is
    :func:`directional_mother`, whose squared rotates/dilates sum to 1.
    The low-pass is completed from the residual.
    """
    if grid.d != 2:
        raise ValueError("build_directional_2d needs a 2D grid")
    if n_rotations % 2 != 0:
        raise ValueError("n_rotations must be even (group must contain -I)")
    if mother is None:
        mother = directional_mother(a, n_rotations)
    j_min = -J + 1
    j_max = int(math.floor(math.log(grid.nyquist, a))) - 1
    if j_max < j_min:
        raise NyquistOverflow("no representable scale fits under Nyquist")
    xi_x0, xi_y0 = grid.freq_values()
    xi_x = np.broadcast_to(xi_x0, grid.shape)
    xi_y = np.broadcast_to(xi_y0, grid.shape)

    delta = 2.0 * math.pi / n_rotations
    rho = 1.0 - math.cos(delta)
    filters = []
    total = np.zeros(grid.shape)
    for j in range(j_min, j_max + 1):
        scale = a ** (-j)
        for i in range(n_rotations):
            theta = 2.0 * math.pi * i / n_rotations
            R_inv = _rotation(-theta)
            u = scale * (R_inv[0, 0] * xi_x + R_inv[0, 1] * xi_y)
            v = scale * (R_inv[1, 0] * xi_x + R_inv[1, 1] * xi_y)
            spec = _snap(mother(u, v))
            total += spec**2
            cone = None
            if delta <= math.pi / 4 + 1e-12:
                cone = ConeSpec(
                    A=tuple(map(tuple, _rotation(theta - math.pi / 4))), rho=rho
                )
            filters.append(
                Filter(
                    label=f"j{j}.g{i}",
                    j=j,
                    g=i,
                    grid=grid,
                    spectrum=spec,
                    annulus=(a ** (j - 1), a ** (j + 1)),
                    cone=cone,
                )
            )
    residual = 1.0 - total
    if float(residual.min()) < -1e-10:
        raise NonUnitLP(
            f"squared filter sum exceeds 1 by {-float(residual.min()):.3e}"
        )
    r = np.sqrt(xi_x**2 + xi_y**2)
    chi = _snap(np.where(r <= a**j_min, np.sqrt(np.clip(residual, 0.0, None)), 0.0))
    covered = r <= a**j_max
    scales = [a ** (j - 1) for j in range(j_min, j_max + 1)]
    return FilterBank(
        grid, chi, filters, scales, kappa=2, rho=rho, covered_mask=covered,
        structure={"kind": "wavelet", "a": a, "n_rotations": n_rotations, "J": J},
        lp_tolerance=1e-10,
    )


# -- UFC bank ----------------------------------------------------------------


def build_ufc_bank(grid: Grid, window: SpectralSignal, D_target: float,
                   r1: float = None) -> FilterBank:
    """Bank of lattice translates of a compactly supported window (1D).

    The window's squared profile is tiled (step = support width) over the
    frequencies above the gap radius ``r1`` on both signs of the axis; the
    squared sum must be 1 there (CoverageGap otherwise).  All filters
    share the window's Chebyshev radius, so D_Psi = d_window <= D_target.
    """
    if grid.d != 1:
        raise ValueError("build_ufc_bank needs a 1D grid")
    if window.grid != grid:
        raise ValueError("window must live on the target grid")
    profile = _snap(np.abs(window.coefficients))
    support = np.nonzero(profile)[0]
    if support.size == 0:
        raise EmptySupport("window has empty support")
    k_idx = grid.freq_indices()
    support_k = np.sort(k_idx[support])
    width = int(support_k[-1] - support_k[0] + 1)
    diameter = (width - 1) / grid.L
    if diameter > 2.0 * D_target + 1e-12:
        raise DomainError(
            f"window diameter {diameter} exceeds 2*D_target = {2 * D_target}"
        )
    # squared profile as a dense lane of length `width`
    lane = np.zeros(width)
    pos_of_k = {int(k): p for p, k in enumerate(k_idx)}
    for k in range(support_k[0], support_k[-1] + 1):
        lane[k - support_k[0]] = profile[pos_of_k[k]] ** 2

    if r1 is None:
        r1 = width / grid.L
    g0 = int(math.ceil(r1 * grid.L - 1e-9))  # first lattice index above the gap
    if g0 < 1:
        g0 = 1
    half = grid.n // 2
    filters = []
    scales = []
    j = 1
    start = g0
    while start + width - 1 <= half - 1:
        sq = np.zeros(grid.n)
        for off in range(width):
            sq[pos_of_k[start + off]] = lane[off]
        root = np.sqrt(sq)
        neg = np.zeros(grid.n)
        for off in range(width):
            neg[pos_of_k[-(start + off)]] = root[pos_of_k[start + off]]
        lo = start / grid.L
        hi = (start + width - 1) / grid.L
        for g, spec, sign in ((0, root, +1), (1, neg, -1)):
            filters.append(
                Filter(
                    label=f"j{j}.g{g}",
                    j=j,
                    g=g,
                    grid=grid,
                    spectrum=spec,
                    annulus=(lo, hi + 1e-12),
                    cone=_cone_1d(sign),
                )
            )
        scales.append(lo)
        start += width
        j += 1
    if not filters:
        raise CoverageGap("grid too small: no translate fits under Nyquist")
    xi = grid.freq_values()[0]
    chi = (np.abs(k_idx) < g0).astype(np.float64)
    covered = (np.abs(k_idx) < start) & (k_idx != -half)
    total = chi**2
    for f in filters:
        total = total + f.spectrum**2
    dev = np.max(np.abs(total[covered] - 1.0))
    if dev > 1e-10:
        raise CoverageGap(f"translated windows do not tile: deviation {dev:.3e}")
    d_window = filters[0].d_psi
    bank = FilterBank(
        grid, chi, filters, scales, kappa=2, rho=0.0, covered_mask=covered,
        structure={"kind": "ufc", "D_Psi": d_window}, lp_tolerance=0.0,
    )
    return bank


def indicator_window(grid: Grid, width: int, start: int = 1) -> SpectralSignal:
    """Indicator window of `width` lattice steps starting at index `start`."""
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    k_idx = grid.freq_indices()
    mask = (k_idx >= start) & (k_idx < start + width)
    coeffs[mask] = 1.0
    return SpectralSignal(grid, coeffs)


# ---------------------------------------------------------------------------
# Config / persistence
# ---------------------------------------------------------------------------


def build_bank_from_config(config: dict) -> FilterBank:
    """Construct a bank from a parsed config mapping (JSON or TOML source).

    Schema: {"constructor": name, "grid": {"d","n","L"}, ...constructor args}.
    """
    grid_cfg = config["grid"]
    grid = Grid(d=int(grid_cfg["d"]), n=int(grid_cfg["n"]), L=float(grid_cfg["L"]))
    name = config["constructor"]
    if name == "shannon_1d":
        return build_shannon_1d(grid, int(config["J_low"]), int(config["J_high"]))
    if name == "meyer_1d":
        return build_meyer_1d(grid, int(config["J_low"]), int(config["J_high"]))
    if name == "directional_2d":
        return build_directional_2d(
            grid,
            a=float(config.get("a", 2.0)),
            n_rotations=int(config.get("n_rotations", 8)),
            J=int(config.get("J", 0)),
        )
    if name == "ufc_1d":
        window = indicator_window(
            grid, int(config["window_width"]), int(config.get("window_start", 1))
        )
        return build_ufc_bank(
            grid,
            window,
            D_target=float(config["D_target"]),
            r1=config.get("r1"),
        )
    raise ValueError(f"unknown constructor {name!r}")


def load_bank_config(path) -> dict:
    """Read a bank config file (.json or .toml)."""
    if str(path).endswith(".toml"):
        import tomllib

        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def export_bank(bank: FilterBank, directory) -> None:
    """Persist a bank: per-filter spectral containers plus manifest.json."""
    os.makedirs(directory, exist_ok=True)
    save_signal(
        os.path.join(directory, "chi.sig"),
        SpectralSignal(bank.grid, bank.chi.astype(np.complex128)),
    )
    entries = []
    for f in bank.filters:
        fname = f"psi_{f.label}.sig"
        save_signal(
            os.path.join(directory, fname),
            SpectralSignal(bank.grid, f.spectrum.astype(np.complex128)),
        )
        entries.append(
            {
                "label": f.label,
                "j": f.j,
                "g": f.g,
                "file": fname,
                "annulus": list(f.annulus) if f.annulus else None,
                "cone": (
                    {"A": [list(row) for row in f.cone.A], "rho": f.cone.rho}
                    if f.cone
                    else None
                ),
                "d_psi": f.d_psi,
            }
        )
    manifest = {
        "grid": {"d": bank.grid.d, "n": bank.grid.n, "L": bank.grid.L},
        "scales": bank.scales,
        "kappa": bank.kappa,
        "gamma": bank.gamma,
        "rho": bank.rho,
        "alpha": bank.alpha,
        "structure": bank.structure,
        "lp_tolerance": bank.lp_tolerance,
        "lp_deviation": bank.lp_deviation,
        "support_snap": SUPPORT_SNAP,
        "covered_count": int(np.count_nonzero(bank.covered_mask)),
        "filters": entries,
    }
    with open(os.path.join(directory, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


def import_bank(directory) -> FilterBank:
    """Load a bank previously written by :func:`export_bank`."""
    with open(os.path.join(directory, "manifest.json"), "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    g = manifest["grid"]
    grid = Grid(d=int(g["d"]), n=int(g["n"]), L=float(g["L"]))
    chi_sig = load_signal(os.path.join(directory, "chi.sig"))
    filters = []
    for entry in manifest["filters"]:
        spec_sig = load_signal(os.path.join(directory, entry["file"]))
        cone = None
        if entry["cone"] is not None:
            cone = ConeSpec(
                A=tuple(map(tuple, entry["cone"]["A"])), rho=entry["cone"]["rho"]
            )
        filters.append(
            Filter(
                label=entry["label"],
                j=entry["j"],
                g=entry["g"],
                grid=grid,
                spectrum=np.real(spec_sig.coefficients),
                annulus=tuple(entry["annulus"]) if entry["annulus"] else None,
                cone=cone,
            )
        )
    chi = np.real(chi_sig.coefficients)
    # reconstruct the covered mask from the stored partition itself
    total = chi**2
    for f in filters:
        total = total + f.spectrum**2
    covered = np.abs(total - 1.0) <= max(manifest["lp_tolerance"], 1e-9)
    declared = manifest.get("covered_count")
    if declared is not None and int(np.count_nonzero(covered)) < int(declared):
        raise CoverageGap(
            "stored partition covers fewer frequencies than the manifest "
            f"declares ({int(np.count_nonzero(covered))} < {int(declared)}); "
            "the bank files are corrupted or inconsistent"
        )
    return FilterBank(
        grid,
        chi,
        filters,
        manifest["scales"],
        kappa=manifest["kappa"],
        rho=manifest["rho"],
        covered_mask=covered,
        structure=manifest["structure"],
        lp_tolerance=manifest["lp_tolerance"],
    )
