"""Scatter a signal and watch the layer energies drain into outputs.

The cascade alternates band-pass filtering with a pointwise modulus;
each layer emits a low-pass output and passes the remainder W_n deeper.
For a full-coverage bank the emitted outputs plus the remainder equal
the input energy exactly, at every depth.

Run:  python3 demos/energy_decay_profile.py
"""

import numpy as np

import scatlab as sl


def main():
    grid = sl.Grid(d=1, n=4096, L=1.0)
    bank = sl.build_shannon_1d(grid, 1, 11)

    rng = np.random.default_rng(0)
    samples = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    samples /= np.linalg.norm(samples)
    f = sl.Signal(grid, samples.astype(np.complex128))

    tree = sl.scatter(f, bank, 3)
    profile = sl.energy_profile(tree)

    print("layer   W_n (remainder)   cumulative output   identity residual")
    for n in range(len(profile.w)):
        print(f"{n:>5}   {profile.w[n]:.12f}   {profile.cumulative_output[n]:.12f}"
              f"   {profile.residuals[n]:.2e}")
    print()
    print(f"nodes per layer : {[len(layer) for layer in tree.layers]}")
    print(f"mixed norm sum  : {sl.mixed_scattering_norm(profile, 3):.6f}")

    # pruning trades a ledgered energy bound for a smaller tree
    for tau in (0.0, 1e-8, 1e-4):
        pruned = sl.scatter(f, bank, 3, prune_threshold=tau)
        w3 = pruned.layer_energy(3)
        err = pruned.prune_bound(3)
        size = sum(len(layer) for layer in pruned.layers)
        print(f"tau = {tau:g}: W_3 in [{w3:.10f}, {w3 + err:.10f}], "
              f"{size} nodes")


if __name__ == "__main__":
    main()
