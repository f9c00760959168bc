"""Closed-form upper bounds on the layer-energy remainder W_N.

The bound pipeline has three stages: a spectral kernel bound
sum |f_hat(xi)|^2 (1 - |theta_hat(C alpha^(N-1) xi)|^2), its weighted
relaxation B(N) = const * D_omega(f) * omega^(-2)(alpha^(-N)) for
dominated weights omega, and structure-specific specializations (uniform
frequency coverage banks, directional wavelet banks).  Each produced
certificate records every constant it used so the claimed bound can be
re-evaluated and compared against measured decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .banks import FilterBank, cone_membership
from .errors import (
    InvalidConstant,
    NotNondecreasing,
    NotUFC,
    SupportViolation,
    WeightNotStrong,
)
from .grid import Signal, forward_fourier


# ---------------------------------------------------------------------------
# Weights and their dominance classification
# ---------------------------------------------------------------------------


@dataclass
class Weight:
    """Nondecreasing weight omega(t) on (0, infinity) with dominance order k.

    The auxiliary function h(t) = t^k / omega(t)^2 drives the
    classification: ``strong`` when h is nondecreasing on all of (0, inf)
    (equivalently, for differentiable omega, k*omega(t) >= 2t*omega'(t)
    everywhere), ``weak(T)`` when h is only eventually nondecreasing.
    """

    name: str
    k: float
    evaluate: callable
    derivative: callable = None

    @classmethod
    def sobolev(cls, s: float) -> "Weight":
        return cls(
            name=f"sobolev({s})",
            k=2.0,
            evaluate=lambda t: (1.0 + np.asarray(t) ** 2) ** (s / 2.0),
            derivative=lambda t: s * np.asarray(t) * (1.0 + np.asarray(t) ** 2) ** (s / 2.0 - 1.0),
        )

    @classmethod
    def log_sobolev(cls, s: float) -> "Weight":
        return cls(
            name=f"log_sobolev({s})",
            k=2.0,
            evaluate=lambda t: np.log(math.e + np.asarray(t)) ** s,
            derivative=lambda t: s * np.log(math.e + np.asarray(t)) ** (s - 1.0)
            / (math.e + np.asarray(t)),
        )

    @classmethod
    def power(cls, p: float, k: float = 2.0) -> "Weight":
        if p < 0:
            raise ValueError("power weight needs p >= 0")
        return cls(
            name=f"power({p})",
            k=k,
            evaluate=lambda t: np.asarray(t, dtype=np.float64) ** p,
            derivative=lambda t: p * np.asarray(t, dtype=np.float64) ** (p - 1.0),
        )

    def __call__(self, t):
        return self.evaluate(t)


@dataclass
class WeightClassification:
    kind: str  # "strong" | "weak" | "unclassified"
    T: float = None  # certified onset for the weak case

    @property
    def strong(self) -> bool:
        return self.kind == "strong"


#: classification grid: 12 decades, margin factor absorbing grid sampling
_GRID_T = np.logspace(-6.0, 6.0, 1201)
_MARGIN = 1.01


def classify_weight(omega: Weight) -> WeightClassification:
    """Classify the dominance of a weight on a log grid over 12 decades.

    The pointwise criterion is k*omega(t) >= 2t*omega'(t), evaluated with
    a small tolerance factor so boundary cases (criterion holding with
    equality in the limit) classify as strong.  ``weak`` requires the
    criterion to hold from some grid point onward and the auxiliary
    h(t) = t^k/omega^2 to keep growing past that onset.
    """
    t = _GRID_T
    w = np.asarray(omega(t), dtype=np.float64)
    if np.any(w <= 0):
        raise NotNondecreasing("weight must be positive on the grid")
    if np.any(np.diff(w) < -1e-12 * np.abs(w[:-1])):
        raise NotNondecreasing("weight is not nondecreasing on the grid")
    if omega.derivative is not None:
        dw = np.asarray(omega.derivative(t), dtype=np.float64)
    else:
        # central difference in log space: omega'(t) = (1/t) d omega / d ln t
        logw_slope = np.gradient(w, np.log(t))
        dw = logw_slope / t
    holds = omega.k * w * _MARGIN >= 2.0 * t * dw
    if bool(np.all(holds)):
        return WeightClassification(kind="strong")
    failing = np.nonzero(~holds)[0]
    last_fail = failing[-1]
    if last_fail == len(t) - 1:
        return WeightClassification(kind="unclassified")
    T = float(t[last_fail + 1])
    # past the onset, h = t^k / omega^2 must keep growing (unboundedness)
    h = t ** omega.k / w**2
    tail = h[last_fail + 1 :]
    if tail[-1] <= h[last_fail + 1] * (1.0 + 1e-9):
        return WeightClassification(kind="unclassified")
    return WeightClassification(kind="weak", T=T)


# ---------------------------------------------------------------------------
# Output-window kernels
# ---------------------------------------------------------------------------


@dataclass
class ThetaKernel:
    """Radial spectral kernel theta_hat with 1 - |theta_hat(xi)|^2 <= C * |xi|^k.

    ``hat`` maps a nonnegative radius (array) to the spectral value;
    theta is nonnegative in space by construction of both built-ins.
    """

    name: str
    hat: callable
    k: float
    C: float
    compactly_supported: bool
    support_radius: float = math.inf

    @classmethod
    def gaussian(cls) -> "ThetaKernel":
        return cls(
            name="gaussian",
            hat=lambda r: np.exp(-math.pi * np.asarray(r, dtype=np.float64) ** 2),
            k=2.0,
            C=2.0 * math.pi,
            compactly_supported=False,
        )

    @classmethod
    def euclid_hat(cls, d: int) -> "ThetaKernel":
        power = d // 2 + 1
        return cls(
            name=f"euclid_hat({d})",
            hat=lambda r: np.clip(1.0 - np.asarray(r, dtype=np.float64), 0.0, None)
            ** power,
            k=1.0,
            C=2.0 * power,
            compactly_supported=True,
            support_radius=1.0,
        )


def validate_kernel_order(theta: ThetaKernel, radii) -> float:
    """Sampled max of (1 - |theta_hat(r)|^2) / r^k; must be <= theta.C."""
    r = np.asarray(radii, dtype=np.float64)
    r = r[r > 0]
    vals = (1.0 - np.abs(theta.hat(r)) ** 2) / r**theta.k
    return float(vals.max()) if vals.size else 0.0


def find_Ctilde(bank: FilterBank, theta: ThetaKernel, tol: float = 1e-12):
    """Smallest C with |theta_hat(C xi)| <= |chi_hat(xi)| on the lattice, or None.

    A kernel with full spectral support can never be dominated by a
    band-limited low-pass (positive value where chi vanishes), so that
    combination returns None immediately.  Otherwise the predicate is
    monotone in C (theta_hat is radially nonincreasing): doubling finds a
    bracket, bisection refines it.
    """
    chi = np.abs(bank.chi)
    radius = bank.grid.freq_norm()
    chi_zero = chi == 0
    if not theta.compactly_supported:
        if np.any(chi_zero):
            return None

    def dominated(C: float) -> bool:
        return bool(np.all(np.abs(theta.hat(C * radius)) <= chi + tol))

    C = 1e-6
    for _ in range(200):
        if dominated(C):
            break
        C *= 2.0
    else:
        return None
    if C == 1e-6:
        # already dominated at the smallest probe; no need to refine further
        return C
    lo, hi = C / 2.0, C
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if dominated(mid):
            hi = mid
        else:
            lo = mid
    if not dominated(hi):
        return None
    return hi


def kernel_bound(f: Signal, bank: FilterBank, theta: ThetaKernel, N: int,
                 C: float) -> float:
    """Spectral kernel bound sum |f_hat|^2 (1 - |theta_hat(C alpha^(N-1) xi)|^2).

    Nonincreasing in N, at most ||f||^2; the constant C must be either a
    dominating constant from find_Ctilde (valid for all N >= 1) or an
    existence constant (valid for N >= 2).
    """
    if C is None or not (C > 0):
        raise InvalidConstant(f"kernel constant must be positive, got {C!r}")
    if N < 1:
        raise InvalidConstant(f"bound layer index must be >= 1, got {N}")
    f_hat = forward_fourier(f).coefficients
    radius = bank.grid.freq_norm()
    scale = C * bank.alpha ** (N - 1)
    factor = 1.0 - np.abs(theta.hat(scale * radius)) ** 2
    return float(np.sum(np.abs(f_hat) ** 2 * factor))


# ---------------------------------------------------------------------------
# Weighted decomposition functionals
# ---------------------------------------------------------------------------


def weighted_decomp_norm(f: Signal, bank: FilterBank, omega: Weight) -> float:
    """Membership functional sum_psi omega^2(d_psi) * ||f * psi||^2."""
    f_hat = forward_fourier(f).coefficients
    terms = [
        float(omega(flt.d_psi)) ** 2
        * float(np.sum(np.abs(f_hat * flt.spectrum) ** 2))
        for flt in bank.filters
    ]
    return math.fsum(terms)


def sobolev_norms(f: Signal, s: float):
    """(H^s norm, logarithmic H^s norm) as discrete weighted spectral sums."""
    f_hat = forward_fourier(f).coefficients
    radius = f.grid.freq_norm()
    power = np.abs(f_hat) ** 2
    hs = math.sqrt(float(np.sum((1.0 + radius**2) ** s * power)))
    hs_log = math.sqrt(float(np.sum(np.log(math.e + radius) ** (2.0 * s) * power)))
    return hs, hs_log


@dataclass
class InclusionReport:
    lhs: float  # weighted decomposition functional
    rhs: float  # C * kappa * (weighted spectral norm)^2
    constant: float
    holds: bool


def check_inclusion(f: Signal, bank: FilterBank, omega: Weight,
                    tol: float = 1e-9) -> InclusionReport:
    """Weighted-spectral-space inclusion into the decomposition space.

    Asserts weighted_decomp_norm(f) <= C * kappa * sum omega^2(|xi|) |f_hat|^2
    with C = max(omega^2(r_last)/omega^2(r_1), gamma^(-k)).
    """
    lhs = weighted_decomp_norm(f, bank, omega)
    f_hat = forward_fourier(f).coefficients
    radius = bank.grid.freq_norm()
    w_sq = np.asarray(omega(np.maximum(radius, 1e-300)), dtype=np.float64) ** 2
    norm_sq = float(np.sum(w_sq * np.abs(f_hat) ** 2))
    r_first, r_last = bank.scales[0], bank.scales[-1]
    constant = max(
        float(omega(r_last)) ** 2 / float(omega(r_first)) ** 2,
        bank.gamma ** (-omega.k),
    )
    rhs = constant * bank.kappa * norm_sq
    return InclusionReport(lhs=lhs, rhs=rhs, constant=constant,
                           holds=lhs <= rhs + tol * max(rhs, 1.0))


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


@dataclass
class DecayCertificate:
    """A claimed upper bound N -> B(N) on the layer-energy remainder.

    ``explicit`` certificates are pointwise-valid from ``valid_from`` on;
    asymptotic ones record the decay rate with a representative
    multiplier and are flagged (``explicit=False``).
    """

    theorem: str
    alpha: float
    constants: dict
    explicit: bool
    valid_from: int
    rate: str
    _bound: callable = field(repr=False, default=None)

    def bound(self, N: int) -> float:
        if N < self.valid_from:
            raise InvalidConstant(
                f"certificate valid from N = {self.valid_from}, requested {N}"
            )
        return float(self._bound(N))

    def table(self, n_max: int):
        return [(N, self.bound(N)) for N in range(self.valid_from, n_max + 1)]

    def to_json_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "alpha": self.alpha,
            "constants": {k: v for k, v in self.constants.items()},
            "explicit": self.explicit,
            "valid_from": self.valid_from,
            "rate": self.rate,
        }


def rate_certificate_weighted(f: Signal, bank: FilterBank, omega: Weight,
                              theta: ThetaKernel) -> DecayCertificate:
    """Weighted decay certificate for a dominated weight.

    Explicit bound (strong weight + dominating constant):
    B(N) = max(1, C * Ctilde^k * alpha^(-k)) * D_omega(f) * omega^(-2)(alpha^(-N)).
    Otherwise an asymptotic certificate with the same shape, flagged with
    the downgrade reason.
    """
    classification = classify_weight(omega)
    ctilde = find_Ctilde(bank, theta)
    mass = weighted_decomp_norm(f, bank, omega)
    alpha = bank.alpha
    k = theta.k

    def shape(N):
        return mass / float(omega(alpha ** (-N))) ** 2

    constants = {
        "kernel": theta.name,
        "C_theta": theta.C,
        "k": k,
        "Ctilde": ctilde,
        "weight": omega.name,
        "classification": classification.kind,
        "onset_T": classification.T,
        "mass": mass,
    }
    if classification.strong and ctilde is not None:
        lead = max(1.0, theta.C * ctilde**k * alpha ** (-k))
        constants["lead"] = lead
        return DecayCertificate(
            theorem="weighted",
            alpha=alpha,
            constants=constants,
            explicit=True,
            valid_from=1,
            rate=f"omega^(-2)(alpha^(-N)), omega = {omega.name}",
            _bound=lambda N: lead * shape(N),
        )
    reasons = []
    if not classification.strong:
        reasons.append(WeightNotStrong(f"{omega.name} is {classification.kind}").args[0])
    if ctilde is None:
        reasons.append(f"no dominating constant for {theta.name} under this low-pass")
    constants["downgrade"] = "; ".join(reasons)
    return DecayCertificate(
        theorem="weighted",
        alpha=alpha,
        constants=constants,
        explicit=False,
        valid_from=2,
        rate=f"O(omega^(-2)(alpha^(-N))), omega = {omega.name}",
        _bound=shape,
    )


def rate_certificate_ufc(f: Signal, bank: FilterBank) -> DecayCertificate:
    """Certificate for uniform-frequency-coverage banks.

    Explicit for all N: B(N) = max(1, 2(floor(d/2)+1)/(alpha r_1)) * D_Psi
    * (||f||^2 - ||f*chi||^2) * alpha^N; asymptotically the decay is even
    O(alpha^(2N)).
    """
    if bank.structure.get("kind") != "ufc":
        raise NotUFC(f"bank structure is {bank.structure.get('kind')!r}, not 'ufc'")
    d = bank.grid.d
    d_psi_max = float(bank.structure["D_Psi"])
    alpha = bank.alpha
    r1 = bank.r1
    f_hat = forward_fourier(f).coefficients
    total = float(np.sum(np.abs(f_hat) ** 2))
    lowpass = float(np.sum(np.abs(f_hat * bank.chi) ** 2))
    highpass_mass = max(total - lowpass, 0.0)
    bernoulli = 2.0 * (d // 2 + 1)
    lead = max(1.0, bernoulli / (alpha * r1))
    constants = {
        "D_Psi": d_psi_max,
        "r_1": r1,
        "bernoulli": bernoulli,
        "lead": lead,
        "highpass_mass": highpass_mass,
        "asymptotic_rate": "alpha^(2N)",
    }
    return DecayCertificate(
        theorem="ufc",
        alpha=alpha,
        constants=constants,
        explicit=True,
        valid_from=1,
        rate="alpha^N (asymptotically alpha^(2N))",
        _bound=lambda N: lead * d_psi_max * highpass_mass * alpha**N,
    )


def _verify_wavelet_supports(bank: FilterBank, a: float) -> None:
    for flt in bank.filters:
        if flt.cone is None:
            continue
        points = flt.support_points()
        radii = np.linalg.norm(points, axis=1)
        lo = a ** (flt.j - 1)
        hi = a ** (flt.j + 1)
        if np.any(radii < lo - 1e-9) or np.any(radii > hi + 1e-9):
            raise SupportViolation(
                f"filter {flt.label} support leaves the shell [{lo}, {hi}]"
            )
        for point in points:
            if not cone_membership(point, flt.cone):
                raise SupportViolation(
                    f"filter {flt.label} support leaves its cone at {tuple(point)}"
                )


def rate_certificate_wavelet(f: Signal, bank: FilterBank, s: float,
                             kind: str = "sobolev") -> DecayCertificate:
    """Certificate for directional wavelet banks.

    alpha comes from gamma = a^(-kappa) and the bank's cone opening rho.
    With a dominating constant for the compactly supported kernel the
    bound is explicit: constant * ||f||_{H^s}^2 * alpha^(min(2s,1) N) for
    the polynomial weight family, and
    constant * ln^(-min(2s,1))(1/alpha) * ||f||^2_{H^s,log} * N^(-min(2s,1))
    for the logarithmic one.  Asymptotically the rates improve to
    alpha^(2 min(s,1) N) and ln^(-2s)(1/alpha) * N^(-2s).
    """
    if bank.structure.get("kind") != "wavelet":
        raise NotUFC(
            f"bank structure is {bank.structure.get('kind')!r}, not 'wavelet'"
        )
    if kind not in ("sobolev", "log_sobolev"):
        raise ValueError(f"kind must be sobolev or log_sobolev, got {kind!r}")
    a = float(bank.structure["a"])
    _verify_wavelet_supports(bank, a)
    gamma = a ** (-bank.kappa)
    alpha = math.sqrt(
        1.0 - 4.0 * gamma / (1.0 + gamma) ** 2 * (1.0 - bank.rho) ** 2
    )
    d = bank.grid.d
    theta = ThetaKernel.euclid_hat(d)
    ctilde = find_Ctilde(bank, theta)
    hs, hs_log = sobolev_norms(f, s)
    exponent = min(2.0 * s, 1.0)
    constants = {
        "a": a,
        "kappa": bank.kappa,
        "rho": bank.rho,
        "gamma": gamma,
        "s": s,
        "kind": kind,
        "Ctilde": ctilde,
        "exponent": exponent,
    }
    if ctilde is None:
        asym_rate = (
            f"alpha^({2.0 * min(s, 1.0)} N)"
            if kind == "sobolev"
            else f"ln^(-{2 * s})(1/alpha) * N^(-{2 * s})"
        )
        norm_sq = hs**2 if kind == "sobolev" else hs_log**2
        if kind == "sobolev":
            bound = lambda N, m=norm_sq: m * alpha ** (2.0 * min(s, 1.0) * N)
        else:
            bound = lambda N, m=norm_sq: (
                m * math.log(1.0 / alpha) ** (-2.0 * s) * N ** (-2.0 * s)
            )
        constants["downgrade"] = "no dominating constant for euclid_hat"
        return DecayCertificate(
            theorem="wavelet",
            alpha=alpha,
            constants=constants,
            explicit=False,
            valid_from=2,
            rate=asym_rate,
            _bound=bound,
        )
    lead = max(1.0, theta.C * ctilde / alpha)
    constants["lead"] = lead
    if kind == "sobolev":
        constants["norm_sq"] = hs**2
        constants["asymptotic_rate"] = f"alpha^({2.0 * min(s, 1.0)} N)"
        return DecayCertificate(
            theorem="wavelet",
            alpha=alpha,
            constants=constants,
            explicit=True,
            valid_from=1,
            rate=f"alpha^({exponent} N)",
            _bound=lambda N: lead * hs**2 * alpha ** (exponent * N),
        )
    log_factor = math.log(1.0 / alpha) ** (-exponent)
    constants["norm_sq"] = hs_log**2
    constants["asymptotic_rate"] = f"ln^(-{2 * s})(1/alpha) * N^(-{2 * s})"
    return DecayCertificate(
        theorem="wavelet",
        alpha=alpha,
        constants=constants,
        explicit=True,
        valid_from=1,
        rate=f"ln^(-{exponent})(1/alpha) * N^(-{exponent})",
        _bound=lambda N: lead * log_factor * hs_log**2 * N ** (-exponent),
    )
