"""Build the three 1D bank families and report their partition quality.

Run:  python3 demos/build_and_verify_bank.py
"""

import numpy as np

import scatlab as sl


def describe(name, bank):
    report = sl.verify_littlewood_paley(bank)
    print(f"--- {name} ---")
    print(f"filters            : {len(bank.filters)}")
    print(f"scales             : {bank.scales[0]:g} .. {bank.scales[-1]:g}")
    print(f"lp deviation       : {report.max_deviation:.3e}")
    print(f"covered fraction   : {report.covered_fraction:.4f}")
    print(f"gap radius r_1     : {bank.r1:g}")
    print(f"gap ratio gamma    : {bank.gamma:g}")
    print(f"contraction alpha  : {bank.alpha:.6f}")
    print(f"frequency gap ok   : {bank.frequency_gap_ok()}")
    print()


def main():
    grid = sl.Grid(d=1, n=4096, L=1.0)

    # Shannon: sharp dyadic shells; when the top scale hits Nyquist the
    # partition is exact on every lattice frequency.
    describe("shannon", sl.build_shannon_1d(grid, 1, 11))

    # Meyer: smooth overlapping shells, exact to round-off on its band.
    describe("meyer", sl.build_meyer_1d(grid, 1, 9))

    # Uniform-support tiling: translates of one compactly supported
    # window; all filters share the same Chebyshev radius.
    window = sl.indicator_window(grid, 32)
    ufc = sl.build_ufc_bank(grid, window, D_target=16.0)
    describe("window tiling (ufc)", ufc)
    print(f"shared support radius D_Psi = {ufc.structure['D_Psi']:g}")

    # every filter's spectral support sits inside a ball of that radius
    radii = [f.d_psi for f in ufc.filters]
    print(f"measured per-filter radii: min {min(radii):g}, max {max(radii):g}")


if __name__ == "__main__":
    main()
