"""Closed-form upper bounds on the layer-energy remainder W_N.

Three certificate routes, each checked against the measured cascade:
a spectral kernel bound (any bank with a dominated low-pass), an
explicit geometric bound for window-tiling banks, and a weighted
membership bound driven by a Sobolev-type weight.

Run:  python3 demos/decay_certificates.py
"""

import numpy as np

import scatlab as sl


def band_noise(grid, lo, hi, seed):
    rng = np.random.default_rng(seed)
    kk = grid.freq_indices()
    mask = (kk >= lo) & (kk < hi)
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    coeffs[mask] = rng.normal(size=int(mask.sum())) \
        + 1j * rng.normal(size=int(mask.sum()))
    coeffs /= np.linalg.norm(coeffs)
    return sl.inverse_fourier(sl.SpectralSignal(grid, coeffs))


def compare(tag, f, bank, bound_fn, n_max=4, start=1):
    # prune with a ledger: [w, w + err] brackets the exact remainder, so
    # "bound - (w + err)" is a rigorous slack even on large cascades
    print(f"--- {tag} ---")
    print(" N   measured W_N <=   bound         slack")
    for N in range(start, n_max + 1):
        w, err = sl.w_n(f, bank, N, prune_threshold=1e-12)
        bound = bound_fn(N)
        print(f"{N:>2}   {w + err:.6e}   {bound:.6e}   {bound - w - err:+.2e}")
    print()


def main():
    grid = sl.Grid(d=1, n=4096, L=1.0)
    shannon = sl.build_shannon_1d(grid, 1, 11)
    f = band_noise(grid, 4, 1024, seed=0)

    # spectral kernel route: 1 - |theta_hat(C alpha^(N-1) xi)|^2 weights
    theta = sl.ThetaKernel.euclid_hat(1)
    ctilde = sl.find_Ctilde(shannon, theta)
    print(f"dominating constant Ctilde = {ctilde:.9f} (1/r_1 = "
          f"{1.0 / shannon.r1:g})\n")
    compare("kernel bound (shannon)", f, shannon,
            lambda N: sl.kernel_bound(f, shannon, theta, N, ctilde))

    # uniform-support route: explicit geometric certificate.  Translates
    # of one window give a dense bank, so keep this cascade on a smaller
    # grid where the depth-4 tree stays modest.
    small = sl.Grid(d=1, n=1024, L=1.0)
    ufc = sl.build_ufc_bank(small, sl.indicator_window(small, 16),
                            D_target=8.0)
    g = band_noise(small, 4, 256, seed=0)
    cert = sl.rate_certificate_ufc(g, ufc)
    print(f"ufc certificate: rate {cert.rate}, explicit {cert.explicit}")
    compare("ufc explicit bound", g, ufc, cert.bound)

    # weighted route: classification decides explicit vs asymptotic
    for omega in (sl.Weight.sobolev(0.5), sl.Weight.log_sobolev(4.0)):
        klass = sl.classify_weight(omega)
        onset = f" (onset T = {klass.T:g})" if klass.T else ""
        print(f"weight {omega.name}: {klass.kind}{onset}")
        cert = sl.rate_certificate_weighted(f, shannon, omega, theta)
        print(f"  -> certificate explicit = {cert.explicit}, "
              f"rate {cert.rate}")
    print()

    wcert = sl.rate_certificate_weighted(f, shannon, sl.Weight.sobolev(0.5),
                                         theta)
    compare("weighted explicit bound (sobolev 0.5)", f, shannon, wcert.bound,
            start=wcert.valid_from)


if __name__ == "__main__":
    main()
