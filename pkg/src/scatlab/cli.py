"""Command-line front end: bank construction/verification, scattering
runs, adversarial signal forging, and decay certification.

Every run resolves to a flat config mapping whose sha256 hash is stamped
into all emitted files; identical config + seed produce byte-identical
outputs.  CSV files start with versioned header comment lines.

Exit codes: 0 ok, 2 config/tolerance failure, 3 energy-identity residual
violation, 4 node budget exceeded, 5 adversarial target unreachable,
6 certificate dominance violated.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from .banks import (
    FilterBank,
    build_bank_from_config,
    export_bank,
    import_bank,
    load_bank_config,
    verify_littlewood_paley,
)
from .certificates import (
    ThetaKernel,
    Weight,
    classify_weight,
    find_Ctilde,
    kernel_bound,
    rate_certificate_ufc,
    rate_certificate_wavelet,
    rate_certificate_weighted,
    weighted_decomp_norm,
)
from .engine import energy_profile, scatter, w_n
from .errors import (
    DepthTooLarge,
    GridExhausted,
    ScatLabError,
    TargetUnreachable,
)
from .forge import DecaySequence, build_slow_signal
from .grid import Signal, inverse_fourier, load_signal, save_signal

CSV_SCHEMA_VERSION = 1

EXIT_CONFIG = 2
EXIT_RESIDUAL = 3
EXIT_BUDGET = 4
EXIT_UNREACHABLE = 5
EXIT_DOMINANCE = 6


def _config_hash(config: dict) -> str:
    payload = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(payload).hexdigest()


def _load_bank(path: str) -> FilterBank:
    """Bank source: a config file (.json/.toml) or an exported directory."""
    if os.path.isdir(path):
        return import_bank(path)
    return build_bank_from_config(load_bank_config(path))


# ---------------------------------------------------------------------------
# Signal sources
# ---------------------------------------------------------------------------


def generate_signal(bank: FilterBank, name: str, seed: int) -> Signal:
    """Seeded test-signal generators on the bank's grid (unit energy).

    gaussian-bump: spatial Gaussian with seeded center and width.
    band-indicator: flat-phase indicator of one seeded filter band.
    random-phase-band: seeded uniform phases across a covered band.
    """
    grid = bank.grid
    rng = np.random.default_rng(seed)
    if name == "gaussian-bump":
        coords = grid.spatial_coordinates()
        center = rng.uniform(0.0, grid.L, size=grid.d)
        width = rng.uniform(grid.L / 64.0, grid.L / 16.0)
        sq = np.zeros(grid.shape)
        for axis in range(grid.d):
            x = coords[axis]
            delta = np.abs(x - center[axis])
            delta = np.minimum(delta, grid.L - delta)  # periodic distance
            sq = sq + np.broadcast_to(delta, grid.shape) ** 2
        samples = np.exp(-sq / (2.0 * width**2)).astype(np.complex128)
    elif name in ("band-indicator", "random-phase-band"):
        flt = bank.filters[int(rng.integers(0, len(bank.filters)))]
        mask = flt.spectrum != 0
        coeffs = np.zeros(grid.shape, dtype=np.complex128)
        if name == "band-indicator":
            coeffs[mask] = 1.0
        else:
            phases = rng.uniform(0.0, 2.0 * math.pi, size=int(mask.sum()))
            coeffs[mask] = np.exp(1j * phases)
        samples = np.fft.ifftn(coeffs, norm="ortho")
    else:
        raise ValueError(f"unknown generator {name!r}")
    sig = Signal(grid, samples)
    norm = math.sqrt(sig.energy())
    if norm == 0:
        raise ValueError("generated signal is identically zero")
    return Signal(grid, sig.samples / norm)


def _resolve_signal(bank: FilterBank, args) -> Signal:
    if args.signal:
        sig = load_signal(args.signal)
        if not isinstance(sig, Signal):
            sig = inverse_fourier(sig)
        return sig
    return generate_signal(bank, args.generator, args.seed)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _csv_header(kind: str, config_hash: str, seed) -> list:
    lines = [
        f"# scatlab-csv v{CSV_SCHEMA_VERSION} {kind}",
        f"# config_hash={config_hash}",
    ]
    if seed is not None:
        lines.append(f"# seed={seed}")
    return lines


def _write_text(path: str, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_bank(args) -> int:
    if args.action == "build":
        config = load_bank_config(args.bank)
        bank = build_bank_from_config(config)
        chash = _config_hash({"command": "bank-build", "config": config})
        if args.out:
            export_bank(bank, args.out)
            _write_json(
                os.path.join(args.out, "run.json"),
                {"config_hash": chash, "command": "bank build"},
            )
        report = verify_littlewood_paley(bank)
        print(f"filters {len(bank.filters)}  scales {len(bank.scales)}")
        print(f"lp_deviation {report.max_deviation:.6e}")
        print(f"gamma {bank.gamma:.12g}  alpha {bank.alpha:.12g}")
        print(f"config_hash {chash}")
        return 0
    # verify
    bank = _load_bank(args.bank)
    report = verify_littlewood_paley(bank)
    gap_ok = bank.frequency_gap_ok()
    print(f"lp_deviation {report.max_deviation:.6e}")
    print(f"worst_frequency {report.worst_frequency}")
    print(f"gamma {bank.gamma:.12g}  alpha {bank.alpha:.12g}")
    print(f"frequency_gap_ok {gap_ok}")
    tolerance = max(bank.lp_tolerance, 1e-10)
    if report.max_deviation > tolerance or not gap_ok:
        print(f"FAIL: deviation exceeds tolerance {tolerance:.1e} or gap violated")
        return EXIT_CONFIG
    return 0


def cmd_scatter(args) -> int:
    bank = _load_bank(args.bank)
    f = _resolve_signal(bank, args)
    chash = _config_hash(
        {
            "command": "scatter",
            "bank": args.bank,
            "signal": args.signal,
            "generator": args.generator,
            "seed": args.seed,
            "depth": args.depth,
            "prune": args.prune,
        }
    )
    try:
        tree = scatter(f, bank, args.depth, prune_threshold=args.prune)
        profile = energy_profile(tree)
    except DepthTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET

    residual = profile.residuals[-1]
    tolerance = 1e-8 * profile.root_energy
    print(f"root_energy {profile.root_energy:.15g}")
    for n in range(len(profile.w)):
        print(
            f"layer {n}  W {profile.w[n]:.15g}  err {profile.w_error[n]:.3g}  "
            f"out {profile.cumulative_output[n]:.15g}"
        )
    print(f"residual {residual:.3e}")

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        rows = [
            {
                "layer": n,
                "W_n": profile.w[n],
                "W_n_error": profile.w_error[n],
                "cumulative_output": profile.cumulative_output[n],
                "mixed_partial": profile.mixed_partial[n],
            }
            for n in range(len(profile.w))
        ]
        if args.format == "csv":
            lines = _csv_header("energy-profile", chash, args.seed)
            lines.append("layer,W_n,W_n_error,cumulative_output,mixed_partial")
            for row in rows:
                lines.append(
                    f"{row['layer']},{row['W_n']!r},{row['W_n_error']!r},"
                    f"{row['cumulative_output']!r},{row['mixed_partial']!r}"
                )
            _write_text(os.path.join(args.out, "profile.csv"), lines)
        else:
            _write_json(
                os.path.join(args.out, "profile.json"),
                {
                    "config_hash": chash,
                    "seed": args.seed,
                    "root_energy": profile.root_energy,
                    "rows": rows,
                    "residual": residual,
                },
            )
        if args.top_k:
            nodes = [
                (node.energy, "/".join(node.path))
                for layer in tree.layers[1:]
                for node in layer
            ]
            nodes.sort(key=lambda item: (-item[0], item[1]))
            lines = _csv_header("top-paths", chash, args.seed)
            lines.append("path,energy")
            for energy, path in nodes[: args.top_k]:
                lines.append(f"{path},{energy!r}")
            _write_text(os.path.join(args.out, "paths.csv"), lines)

    if args.prune == 0.0 and residual > tolerance:
        print(f"FAIL: residual exceeds {tolerance:.1e}", file=sys.stderr)
        return EXIT_RESIDUAL
    if args.prune > 0.0 and residual > profile.w_error[-1] + tolerance:
        print("FAIL: residual exceeds the pruning ledger bound", file=sys.stderr)
        return EXIT_RESIDUAL
    return 0


def _parse_decay(text: str, K: int) -> DecaySequence:
    kind, _, value = text.partition(":")
    if kind == "geometric":
        return DecaySequence.geometric(float(value), K=max(K, 4))
    if kind == "power":
        return DecaySequence.power(float(value), K=max(K, 4))
    if kind == "file":
        with open(value, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        return DecaySequence(prefix=payload["prefix"], tail=tuple(payload["tail"]))
    raise ValueError(f"unknown decay spec {text!r}")


def cmd_adversarial(args) -> int:
    bank = _load_bank(args.bank)
    try:
        E = _parse_decay(args.decay, args.depth)
    except (ValueError, ScatLabError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    f0 = _resolve_signal(bank, args)
    chash = _config_hash(
        {
            "command": "adversarial",
            "bank": args.bank,
            "decay": args.decay,
            "depth": args.depth,
            "generator": args.generator,
            "seed": args.seed,
            "delta": args.delta,
        }
    )
    try:
        f_E, cert = build_slow_signal(
            f0, E, bank, delta_target=args.delta, K=args.depth
        )
    except (TargetUnreachable, GridExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, TargetUnreachable) and exc.achievable is not None:
            print(f"achievable delta: {exc.achievable:.6g}", file=sys.stderr)
        return EXIT_UNREACHABLE

    print(f"certified layers 1..{cert.K}")
    print("N  W_N(f_E)  lower_bound")
    for n in range(cert.K):
        print(f"{n + 1}  {cert.w_fE[n]:.9g}  {cert.lower_bounds[n]:.9g}")
    print(f"hypotheses_hold {cert.hypotheses_hold()}")
    print(f"conclusion_holds {cert.conclusion_holds()}")

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        save_signal(os.path.join(args.out, "f_E.sig"), f_E)
        payload = cert.to_json_dict()
        payload["config_hash"] = chash
        payload["seed"] = args.seed
        _write_json(os.path.join(args.out, "certificate.json"), payload)
    return 0


def _parse_weight(text: str) -> Weight:
    kind, _, value = text.partition(":")
    if kind == "sobolev":
        return Weight.sobolev(float(value))
    if kind == "log":
        return Weight.log_sobolev(float(value))
    if kind == "power":
        return Weight.power(float(value))
    raise ValueError(f"unknown weight spec {text!r}")


def cmd_certify(args) -> int:
    bank = _load_bank(args.bank)
    f = _resolve_signal(bank, args)
    chash = _config_hash(
        {
            "command": "certify",
            "bank": args.bank,
            "signal": args.signal,
            "generator": args.generator,
            "seed": args.seed,
            "certificate": args.certificate,
            "weight": args.weight,
            "depth": args.depth,
        }
    )
    d = bank.grid.d
    theta = ThetaKernel.euclid_hat(d)
    if args.certificate == "kernel":
        ctilde = find_Ctilde(bank, theta)
        if ctilde is None:
            print("config error: no dominating constant for this bank", file=sys.stderr)
            return EXIT_CONFIG
        cert_payload = {
            "theorem": "kernel",
            "Ctilde": ctilde,
            "alpha": bank.alpha,
            "explicit": True,
            "valid_from": 1,
        }
        bounds = {
            N: kernel_bound(f, bank, theta, N, ctilde)
            for N in range(1, args.depth + 1)
        }
        explicit = True
        valid_from = 1
    else:
        if args.certificate == "weighted":
            omega = _parse_weight(args.weight)
            cert = rate_certificate_weighted(f, bank, omega, theta)
            classification = classify_weight(omega)
            print(
                f"weight {omega.name}: {classification.kind}"
                + (f" (T = {classification.T:.6g})" if classification.T else "")
            )
            print(f"membership norm {weighted_decomp_norm(f, bank, omega):.6g}")
        elif args.certificate == "ufc":
            cert = rate_certificate_ufc(f, bank)
        elif args.certificate == "wavelet":
            kind, _, value = args.weight.partition(":")
            s = float(value)
            cert = rate_certificate_wavelet(
                f, bank, s, kind="log_sobolev" if kind == "log" else "sobolev"
            )
        else:
            raise ValueError(f"unknown certificate {args.certificate!r}")
        cert_payload = cert.to_json_dict()
        explicit = cert.explicit
        valid_from = cert.valid_from
        bounds = {
            N: cert.bound(N)
            for N in range(max(1, valid_from), args.depth + 1)
        }
        print(f"rate {cert.rate}  explicit {cert.explicit}")

    rows = []
    violated = False
    energy = f.energy()
    for N, bound in sorted(bounds.items()):
        measured, _ = w_n(f, bank, N)
        slack = bound - measured
        rows.append({"N": N, "measured": measured, "bound": bound, "slack": slack})
        print(f"N {N}  measured {measured:.9g}  bound {bound:.9g}  slack {slack:.3g}")
        if explicit and slack < -1e-8 * energy:
            violated = True

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        cert_payload["config_hash"] = chash
        cert_payload["seed"] = args.seed
        _write_json(os.path.join(args.out, "certificate.json"), cert_payload)
        lines = _csv_header("certify", chash, args.seed)
        lines.append("N,measured_W_N,bound,slack")
        for row in rows:
            lines.append(
                f"{row['N']},{row['measured']!r},{row['bound']!r},{row['slack']!r}"
            )
        _write_text(os.path.join(args.out, "comparison.csv"), lines)

    if violated:
        print("FAIL: measured decay exceeds the certified bound", file=sys.stderr)
        return EXIT_DOMINANCE
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_signal_args(parser):
    parser.add_argument("--signal", help="signal container file")
    parser.add_argument(
        "--generator",
        default="band-indicator",
        choices=["gaussian-bump", "band-indicator", "random-phase-band"],
        help="seeded generator used when --signal is absent",
    )
    parser.add_argument("--seed", type=int, default=0, help="64-bit generator seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scatlab",
        description="windowed scattering transforms: banks, propagation, "
        "adversarial decay, certificates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bank = sub.add_parser("bank", help="build or verify a filter bank")
    p_bank.add_argument("action", choices=["build", "verify"])
    p_bank.add_argument("--bank", required=True,
                        help="config file (build) or config/exported dir (verify)")
    p_bank.add_argument("--out", help="directory to persist the built bank")
    p_bank.set_defaults(func=cmd_bank)

    p_scatter = sub.add_parser("scatter", help="run a scattering cascade")
    p_scatter.add_argument("--bank", required=True)
    _add_signal_args(p_scatter)
    p_scatter.add_argument("--depth", type=int, default=3)
    p_scatter.add_argument("--prune", type=float, default=0.0)
    p_scatter.add_argument("--out", help="output directory")
    p_scatter.add_argument("--format", choices=["csv", "json"], default="csv")
    p_scatter.add_argument("--top-k", type=int, default=0,
                           help="also dump the k highest-energy paths")
    p_scatter.set_defaults(func=cmd_scatter)

    p_adv = sub.add_parser("adversarial", help="forge a slow-decay signal")
    p_adv.add_argument("--bank", required=True)
    _add_signal_args(p_adv)
    p_adv.add_argument("--decay", required=True,
                       help="geometric:r | power:p | file:path")
    p_adv.add_argument("--depth", type=int, default=3, help="certified layers K")
    p_adv.add_argument("--delta", type=float, default=0.125)
    p_adv.add_argument("--out", help="output directory")
    p_adv.set_defaults(func=cmd_adversarial)

    p_cert = sub.add_parser("certify", help="emit a decay certificate")
    p_cert.add_argument("--bank", required=True)
    _add_signal_args(p_cert)
    p_cert.add_argument("--certificate", required=True,
                        choices=["kernel", "weighted", "ufc", "wavelet"])
    p_cert.add_argument("--weight", default="sobolev:0.5",
                        help="sobolev:s | log:s | power:p")
    p_cert.add_argument("--depth", type=int, default=4,
                        help="largest layer index to compare")
    p_cert.add_argument("--out", help="output directory")
    p_cert.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DepthTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (TargetUnreachable, GridExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    except (ValueError, ScatLabError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
