"""Construction of slow-energy-decay signals.

Given a prescribed nonincreasing null sequence E, the forge picks
telescoping coefficients a_k, searches for dilation exponents m_k whose
dilated copies of a seed band signal keep at least the target energy
fraction through k scattering layers, and assembles
f_E = sum_k a_k * D_{2^(m_k)} f0.  Because the dilated spectra occupy
pairwise disjoint shells (spacing at least the bank overlap kappa), the
layer energies are additive and W_N(f_E) inherits the prescribed decay
floor.  Every hypothesis that the argument needs is measured and stored
in a certificate that can be re-audited from the raw signals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .banks import FilterBank
from .errors import (
    DisjointnessViolation,
    GridExhausted,
    NotNonincreasing,
    NyquistOverflow,
    TargetUnreachable,
    UnknownLabel,
)
from .grid import Signal, dilate_L2, forward_fourier
from .engine import scatter, w_n


@dataclass
class DecaySequence:
    """Nonincreasing positive null sequence: finite prefix + tail rule.

    tail is one of ("geometric", ratio), ("power", exponent) or
    ("custom", callable N -> value).  Values are 1-indexed.
    """

    prefix: list
    tail: tuple

    def __post_init__(self):
        if not self.prefix:
            raise ValueError("prefix must be nonempty")
        if any(v <= 0 for v in self.prefix):
            raise ValueError("decay values must be positive")
        if any(b > a * (1 + 1e-15) for a, b in zip(self.prefix, self.prefix[1:])):
            raise NotNonincreasing("prefix is not nonincreasing")
        kind = self.tail[0]
        if kind == "geometric":
            if not (0 < self.tail[1] < 1):
                raise ValueError("geometric tail ratio must be in (0,1) (tail must vanish)")
        elif kind == "power":
            if not (self.tail[1] > 0):
                raise ValueError("power tail exponent must be positive (tail must vanish)")
        elif kind != "custom":
            raise ValueError(f"unknown tail rule {kind!r}")

    @classmethod
    def geometric(cls, ratio: float, E1: float = 1.0, K: int = 8) -> "DecaySequence":
        prefix = [E1 * ratio**k for k in range(K)]
        return cls(prefix=prefix, tail=("geometric", ratio))

    @classmethod
    def power(cls, p: float, E1: float = 1.0, K: int = 8) -> "DecaySequence":
        prefix = [E1 / (N**p) for N in range(1, K + 1)]
        return cls(prefix=prefix, tail=("power", p))

    def value(self, N: int) -> float:
        if N < 1:
            raise ValueError("decay sequence is 1-indexed")
        K = len(self.prefix)
        if N <= K:
            return self.prefix[N - 1]
        kind, param = self.tail[0], self.tail[1]
        if kind == "geometric":
            return self.prefix[-1] * param ** (N - K)
        if kind == "power":
            return self.prefix[-1] * (K / N) ** param
        return param(N)


def make_coefficients(E: DecaySequence, K: int) -> np.ndarray:
    """Telescoping coefficients a_k with sum_{k>=N} a_k^2 = E_N for N <= K.

    a_k = sqrt(E_k - E_{k+1}) for k < K; the final coefficient absorbs
    the whole remaining tail, a_K = sqrt(E_K), closing the telescope so
    the partial-sum identity is exact on the finite prefix.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    values = [E.value(k) for k in range(1, K + 2)]
    if any(b > a * (1 + 1e-15) for a, b in zip(values, values[1:])):
        raise NotNonincreasing("decay sequence is not nonincreasing over 1..K+1")
    a = np.empty(K)
    for k in range(1, K):
        a[k - 1] = math.sqrt(max(values[k - 1] - values[k], 0.0))
    a[K - 1] = math.sqrt(values[K - 1])
    return a


@dataclass
class ToleranceSchedule:
    """Per-step tolerances eta_k and the derived budgets
    epsilon_k = (k+1) eta_k + sum_{j>k} eta_j.

    The stored prefix covers k = 1..K; the infinite tail is bounded by
    the closed form of a geometric envelope eta_j <= c * 4^(-j)."""

    eta: list
    c: float  # geometric envelope scale for the unstored tail

    def tail_beyond(self, k: int) -> float:
        K = len(self.eta)
        stored = math.fsum(self.eta[j] for j in range(k, K))  # eta_{k+1}..eta_K
        # sum_{j>K} c * 4^{-j} = c * 4^{-K} / 3
        return stored + self.c * 4.0 ** (-K) / 3.0

    def epsilon(self, k: int) -> float:
        return (k + 1) * self.eta[k - 1] + self.tail_beyond(k)

    @classmethod
    def default(cls, a: np.ndarray, delta: float, c: float = 1e-4) -> "ToleranceSchedule":
        """Schedule eta_k = min(c 4^(-k), delta a_k^2 / (2 ||a||^2)): summable
        and compatible with the strengthened super-additivity conclusion."""
        norm_sq = float(np.sum(a**2))
        eta = [
            min(c * 4.0 ** (-(k + 1)), delta * float(a[k]) ** 2 / (2.0 * norm_sq))
            for k in range(len(a))
        ]
        return cls(eta=eta, c=c)


def inner_product(f: Signal, g: Signal) -> complex:
    return complex(np.vdot(g.samples, f.samples))


def separation_deficits(f: Signal, bank: FilterBank, block):
    """(out_mass, in_mass_fn) for a filter-label block.

    out_mass = energy of f seen by filters outside the block;
    in_mass_fn(g) = energy of g seen by filters inside the block.
    """
    block = set(block)
    unknown = block - set(bank.labels)
    if unknown:
        raise UnknownLabel(f"labels not in bank: {sorted(unknown)}")
    f_hat = forward_fourier(f).coefficients

    def mass(hat, labels):
        return math.fsum(
            float(np.sum(np.abs(hat * flt.spectrum) ** 2))
            for flt in bank.filters
            if flt.label in labels
        )

    outside = set(bank.labels) - block
    out_mass = mass(f_hat, outside)

    def in_mass_fn(g: Signal) -> float:
        return mass(forward_fourier(g).coefficients, block)

    return out_mass, in_mass_fn


def _support_block(f: Signal, bank: FilterBank):
    """Labels of all filters whose spectral support meets that of f."""
    f_hat = forward_fourier(f).coefficients
    # ignore FFT round-trip dust when reading off the occupied band
    occupied = np.abs(f_hat) > 1e-12 * float(np.max(np.abs(f_hat)))
    return [
        flt.label
        for flt in bank.filters
        if bool(np.any(occupied & (flt.spectrum != 0)))
    ]


@dataclass
class SelectionStep:
    k: int
    m: int
    w_k: float
    block: list
    out_mass: float
    max_inner_product: float
    max_cross_mass: float


def select_subsequence(f0: Signal, bank: FilterBank, delta_target: float,
                       eta: ToleranceSchedule, K: int, kappa_spacing: int = None):
    """Dilation exponents m_1 < ... < m_K with W_k(D_{2^(m_k)} f0) >= 4*delta_target
    and measured separation deficits below the tolerance schedule.

    Returns (exponents, steps) where steps records every measured
    hypothesis.  Raises GridExhausted when no candidate dilate fits the
    lattice, TargetUnreachable (with the achievable delta) when dilation
    headroom ends below the energy target.
    """
    if abs(f0.energy() - 1.0) > 1e-9:
        raise ValueError("seed signal must have unit energy")
    spacing = kappa_spacing if kappa_spacing is not None else bank.kappa
    exponents = []
    steps = []
    previous = []  # (m, dilated signal, block) per accepted k
    m = 0
    for k in range(1, K + 1):
        eta_k = eta.eta[k - 1] if k - 1 < len(eta.eta) else eta.c * 4.0 ** (-k)
        best_w = None
        found = False
        candidates = 0
        while True:
            try:
                f_m = dilate_L2(f0, m)
            except NyquistOverflow:
                break
            block = _support_block(f_m, bank)
            out_mass, in_mass_fn = separation_deficits(f_m, bank, block)
            max_ip = max(
                (abs(inner_product(f_m, prev_sig)) for _, prev_sig, _ in previous),
                default=0.0,
            )
            max_cross = max(
                (in_mass_fn(prev_sig) for _, prev_sig, _ in previous), default=0.0
            )
            separated = (
                out_mass <= eta_k and max_ip <= eta_k and max_cross <= eta_k
            )
            if separated:
                candidates += 1
                wk, _ = w_n(f_m, bank, k)
                best_w = wk if best_w is None else max(best_w, wk)
                if wk >= 4.0 * delta_target:
                    exponents.append(m)
                    steps.append(
                        SelectionStep(
                            k=k,
                            m=m,
                            w_k=wk,
                            block=block,
                            out_mass=out_mass,
                            max_inner_product=max_ip,
                            max_cross_mass=max_cross,
                        )
                    )
                    previous.append((m, f_m, set(block)))
                    m += spacing
                    found = True
                    break
            m += 1
        if not found:
            if candidates == 0:
                raise GridExhausted(
                    f"no dilate of the seed fits the lattice for step k={k}"
                )
            raise TargetUnreachable(
                f"W_{k} saturated at {best_w:.6f} < 4*delta_target = "
                f"{4 * delta_target}",
                achievable=best_w / 4.0,
            )
    return exponents, steps


@dataclass
class AdversarialCertificate:
    """Everything needed to audit the slow-decay construction."""

    K: int
    delta_target: float
    coefficients: list
    exponents: list
    eta: list
    epsilon: list
    E_values: list  # E_1..E_K
    w_k_seed: list  # measured W_k(f_{m_k}), k = 1..K
    w_matrix: list  # w_matrix[N-1][k-1] = measured W_N(f_{m_k})
    out_masses: list
    max_inner_products: list
    max_cross_masses: list
    w_fE: list  # measured W_N(f_E), N = 1..K
    lower_bounds: list  # 4*delta_target * E_N
    additivity_residuals: list  # |W_N(f_E) - sum_k a_k^2 W_N(f_{m_k})|
    norm_fE_sq: float
    C_F: float
    anchored: bool
    norm_anchor_sq: float = 0.0
    dist_to_anchor_sq: float = 0.0

    def hypotheses_hold(self, tol: float = 1e-9) -> bool:
        sep_ok = all(
            v <= e + tol
            for v, e in zip(self.out_masses, self.eta)
        ) and all(
            v <= e + tol for v, e in zip(self.max_inner_products, self.eta)
        )
        energy_ok = all(w >= 4.0 * self.delta_target - tol for w in self.w_k_seed)
        return sep_ok and energy_ok

    def conclusion_holds(self, tol: float = 1e-9) -> bool:
        return all(
            w >= b - tol for w, b in zip(self.w_fE, self.lower_bounds)
        )

    def norm_budget_holds(self, tol: float = 1e-9) -> bool:
        return self.norm_fE_sq <= 2.0 * self.C_F * (1.0 + self.E_values[0]) + tol

    def to_json_dict(self) -> dict:
        return {
            "K": self.K,
            "delta_target": self.delta_target,
            "coefficients": list(self.coefficients),
            "exponents": list(self.exponents),
            "eta": list(self.eta),
            "epsilon": list(self.epsilon),
            "E_values": list(self.E_values),
            "w_k_seed": list(self.w_k_seed),
            "w_matrix": [list(row) for row in self.w_matrix],
            "out_masses": list(self.out_masses),
            "max_inner_products": list(self.max_inner_products),
            "max_cross_masses": list(self.max_cross_masses),
            "w_fE": list(self.w_fE),
            "lower_bounds": list(self.lower_bounds),
            "additivity_residuals": list(self.additivity_residuals),
            "norm_fE_sq": self.norm_fE_sq,
            "C_F": self.C_F,
            "anchored": self.anchored,
            "norm_anchor_sq": self.norm_anchor_sq,
            "dist_to_anchor_sq": self.dist_to_anchor_sq,
            "hypotheses_hold": self.hypotheses_hold(),
            "conclusion_holds": self.conclusion_holds(),
            "norm_budget_holds": self.norm_budget_holds(),
        }


def build_slow_signal(f0: Signal, E: DecaySequence, bank: FilterBank,
                      delta_target: float = 0.125, K: int = 3,
                      g: Signal = None):
    """Assemble f_E = [g +] sum_k a_k D_{2^(m_k)} f0 with its certificate.

    When an anchor g is given, it enters with coefficient 1 and the
    certificate additionally records ||f_E - g||^2 against the budget
    2 C_F E_1 with C_F the largest summand energy.
    """
    a = make_coefficients(E, K)
    eta = ToleranceSchedule.default(a, delta_target)
    exponents, steps = select_subsequence(f0, bank, delta_target, eta, K)

    dilates = [dilate_L2(f0, m) for m in exponents]
    samples = np.zeros(f0.grid.shape, dtype=np.complex128)
    if g is not None:
        samples += g.samples
    for ak, fm in zip(a, dilates):
        samples += ak * fm.samples
    f_E = Signal(f0.grid, samples)

    w_matrix = []
    for N in range(1, K + 1):
        row = [w_n(fm, bank, N)[0] for fm in dilates]
        w_matrix.append(row)
    w_fE = [w_n(f_E, bank, N)[0] for N in range(1, K + 1)]
    additivity = [
        abs(
            w_fE[N - 1]
            - math.fsum(float(a[k]) ** 2 * w_matrix[N - 1][k] for k in range(K))
            - (w_n(g, bank, N)[0] if g is not None else 0.0)
        )
        for N in range(1, K + 1)
    ]

    E_values = [E.value(N) for N in range(1, K + 1)]
    summand_energies = [float(ak**2) * fm.energy() for ak, fm in zip(a, dilates)]
    C_F = max([fm.energy() for fm in dilates] + ([g.energy()] if g is not None else []))
    cert = AdversarialCertificate(
        K=K,
        delta_target=delta_target,
        coefficients=[float(x) for x in a],
        exponents=list(exponents),
        eta=list(eta.eta),
        epsilon=[eta.epsilon(k) for k in range(1, K + 1)],
        E_values=E_values,
        w_k_seed=[s.w_k for s in steps],
        w_matrix=w_matrix,
        out_masses=[s.out_mass for s in steps],
        max_inner_products=[s.max_inner_product for s in steps],
        max_cross_masses=[s.max_cross_mass for s in steps],
        w_fE=w_fE,
        lower_bounds=[4.0 * delta_target * e for e in E_values],
        additivity_residuals=additivity,
        norm_fE_sq=f_E.energy(),
        C_F=C_F,
        anchored=g is not None,
        norm_anchor_sq=g.energy() if g is not None else 0.0,
        dist_to_anchor_sq=(
            float(np.sum(np.abs(f_E.samples - g.samples) ** 2)) if g is not None else 0.0
        ),
    )
    return f_E, cert


@dataclass
class SuperadditivityReport:
    w_total: float
    lower_bound: float
    slack: float
    epsilons: list


def check_superadditivity(F, a, blocks, bank: FilterBank, N: int, n: int = 1,
                          tol: float = 1e-8) -> SuperadditivityReport:
    """Measure the approximate super-additivity inequality.

    F is a list of signals, a their coefficients, blocks the per-signal
    filter-label blocks (must be pairwise disjoint).  Deficits eta_k are
    measured from the signals; the report's slack is
    W_N(sum a_k F_k) - sum_{k>=n} (|a_k|^2/2 W_N(F_k) - 2||a||^2 eps_k),
    nonnegative up to round-off when the inequality holds.
    """
    K = len(F)
    a = np.asarray(a, dtype=np.float64)
    block_sets = [set(b) for b in blocks]
    for i in range(K):
        for j in range(i + 1, K):
            if block_sets[i] & block_sets[j]:
                raise DisjointnessViolation(
                    f"blocks {i} and {j} share labels {sorted(block_sets[i] & block_sets[j])}"
                )
    # measured per-step deficits
    etas = []
    for k in range(K):
        out_mass, in_mass_fn = separation_deficits(F[k], bank, block_sets[k])
        ip = max(
            (abs(inner_product(F[k], F[j])) for j in range(K) if j != k), default=0.0
        )
        cross = max((in_mass_fn(F[j]) for j in range(K) if j != k), default=0.0)
        etas.append(max(out_mass, ip, cross))
    norm_a_sq = float(np.sum(a**2))
    epsilons = [
        (k + 2) * etas[k] + math.fsum(etas[k + 1 :]) for k in range(K)
    ]  # (k+1) eta_k + tail with 1-based k

    samples = np.zeros(F[0].grid.shape, dtype=np.complex128)
    for ak, fk in zip(a, F):
        samples += ak * fk.samples
    total = Signal(F[0].grid, samples)
    w_total, _ = w_n(total, bank, N)
    terms = []
    for k in range(n - 1, K):
        wk, _ = w_n(F[k], bank, N)
        terms.append(0.5 * float(a[k]) ** 2 * wk - 2.0 * norm_a_sq * epsilons[k])
    lower = math.fsum(terms)
    return SuperadditivityReport(
        w_total=w_total,
        lower_bound=lower,
        slack=w_total - lower + tol,
        epsilons=epsilons,
    )
