"""Slow-decay forging: decay laws, subsequence selection, certificates."""

import math

import numpy as np
import numpy.testing as npt
import pytest

import scatlab as sl
from conftest import band_signal


@pytest.fixture(scope="module")
def forge_grid():
    return sl.Grid(d=1, n=4096, L=1.0)


@pytest.fixture(scope="module")
def forge_bank(forge_grid):
    return sl.build_shannon_1d(forge_grid, 1, 11)


@pytest.fixture(scope="module")
def seed_signal(forge_grid):
    # flat-phase signal over one full dyadic shell: high layer energies
    # survive several cascade layers
    return band_signal(forge_grid, 32, 64)


class TestDecaySequence:
    def test_geometric_values(self):
        E = sl.DecaySequence.geometric(0.5)
        npt.assert_allclose([E.value(N) for N in (1, 2, 3, 4)],
                            [1.0, 0.5, 0.25, 0.125])

    def test_power_values(self):
        E = sl.DecaySequence.power(1.0)
        npt.assert_allclose([E.value(N) for N in (1, 2, 4)],
                            [1.0, 0.5, 0.25])

    def test_rejects_increasing(self):
        with pytest.raises(sl.NotNonincreasing):
            sl.DecaySequence(prefix=[1.0, 2.0], tail=("geometric", 0.5))

    def test_rejects_growing_tail(self):
        with pytest.raises(sl.NotNonincreasing):
            sl.DecaySequence.geometric(1.5)


class TestCoefficients:
    def test_telescoping_closure(self):
        E = sl.DecaySequence.geometric(0.5)
        for K in (2, 3, 5):
            a = sl.make_coefficients(E, K)
            # partial sums reproduce the decay values exactly
            for N in range(1, K + 1):
                npt.assert_allclose(math.fsum(float(x) ** 2 for x in a[N - 1:]),
                                    E.value(N), rtol=1e-14)

    def test_total_energy_is_E1(self):
        E = sl.DecaySequence.power(2.0)
        a = sl.make_coefficients(E, 4)
        npt.assert_allclose(float(np.sum(a**2)), E.value(1), rtol=1e-14)


class TestToleranceSchedule:
    def test_default_caps(self):
        a = sl.make_coefficients(sl.DecaySequence.geometric(0.5), 3)
        delta = 0.125
        sched = sl.ToleranceSchedule.default(a, delta)
        norm_sq = float(np.sum(a**2))
        for k, eta in enumerate(sched.eta, start=1):
            assert eta <= 1e-4 * 4.0 ** (-k) + 1e-18
            assert eta <= delta * float(a[k - 1]) ** 2 / (2 * norm_sq) + 1e-18

    def test_epsilon_closed_form(self):
        a = sl.make_coefficients(sl.DecaySequence.geometric(0.5), 3)
        sched = sl.ToleranceSchedule.default(a, 0.125)
        for k in range(1, 4):
            expect = (k + 1) * sched.eta[k - 1] + sched.tail_beyond(k)
            npt.assert_allclose(sched.epsilon(k), expect, rtol=1e-14)


class TestSeparationDeficits:
    def test_block_captures_band(self, forge_bank, seed_signal):
        # the seed lives on shell [32, 64): block {j6.*} sees everything
        block = [lab for lab in forge_bank.labels if lab.startswith("j6.")]
        out_mass, in_mass = sl.separation_deficits(seed_signal, forge_bank,
                                                   block)
        assert out_mass <= 1e-12
        npt.assert_allclose(in_mass(seed_signal), 1.0, atol=1e-10)

    def test_unknown_label(self, forge_bank, seed_signal):
        with pytest.raises(sl.UnknownLabel):
            sl.separation_deficits(seed_signal, forge_bank, ["j99.g7"])


class TestSelectSubsequence:
    def test_accepts_feasible_target(self, forge_bank, seed_signal):
        a = sl.make_coefficients(sl.DecaySequence.geometric(0.5), 2)
        eta = sl.ToleranceSchedule.default(a, 0.125)
        exponents, steps = sl.select_subsequence(seed_signal, forge_bank,
                                                 0.125, eta, 2)
        assert len(exponents) == 2
        assert exponents[0] < exponents[1]
        assert exponents[1] - exponents[0] >= forge_bank.kappa
        for step in steps:
            assert step.w_k >= 4 * 0.125
            assert step.out_mass <= eta.eta[step.k - 1] + 1e-9

    def test_unreachable_target_reports_achievable(self, forge_bank,
                                                   seed_signal):
        a = sl.make_coefficients(sl.DecaySequence.geometric(0.5), 3)
        eta = sl.ToleranceSchedule.default(a, 0.2499)
        with pytest.raises((sl.TargetUnreachable, sl.GridExhausted)) as info:
            sl.select_subsequence(seed_signal, forge_bank, 0.2499, eta, 3)
        if isinstance(info.value, sl.TargetUnreachable):
            assert info.value.achievable is not None
            assert info.value.achievable < 0.2499

    def test_grid_exhausted_for_large_K(self, forge_bank, seed_signal):
        a = sl.make_coefficients(sl.DecaySequence.geometric(0.5), 8)
        eta = sl.ToleranceSchedule.default(a, 0.125)
        with pytest.raises((sl.GridExhausted, sl.TargetUnreachable)):
            sl.select_subsequence(seed_signal, forge_bank, 0.125, eta, 8)

    def test_requires_unit_energy(self, forge_bank, forge_grid, seed_signal):
        double = sl.Signal(forge_grid, 2.0 * seed_signal.samples)
        a = sl.make_coefficients(sl.DecaySequence.geometric(0.5), 2)
        eta = sl.ToleranceSchedule.default(a, 0.125)
        with pytest.raises(ValueError):
            sl.select_subsequence(double, forge_bank, 0.125, eta, 2)


@pytest.fixture(scope="module")
def built(forge_bank, seed_signal):
    E = sl.DecaySequence.geometric(0.5)
    return sl.build_slow_signal(seed_signal, E, forge_bank, K=2)


class TestBuildSlowSignal:

    def test_certificate_audits_pass(self, built):
        _, cert = built
        assert cert.hypotheses_hold()
        assert cert.conclusion_holds()
        assert cert.norm_budget_holds()

    def test_layer_energies_dominate_targets(self, built):
        _, cert = built
        for w, lb in zip(cert.w_fE, cert.lower_bounds):
            assert w >= lb - 1e-10

    def test_norm_is_E1(self, built):
        f_E, cert = built
        npt.assert_allclose(cert.norm_fE_sq, f_E.energy(), rtol=1e-12)
        npt.assert_allclose(f_E.energy(), 1.0, atol=1e-10)

    def test_additivity_exact_for_disjoint_shells(self, built):
        _, cert = built
        assert max(cert.additivity_residuals) <= 1e-10

    def test_json_round_trip(self, built):
        import json

        _, cert = built
        payload = json.dumps(cert.to_json_dict())
        back = json.loads(payload)
        assert back["K"] == cert.K
        npt.assert_allclose(back["w_fE"], cert.w_fE)


class TestSuperadditivity:
    def test_exact_two_signal_case(self, forge_grid, forge_bank):
        f1 = band_signal(forge_grid, 64, 128)
        f2 = band_signal(forge_grid, 512, 1024)
        blocks = [[lab for lab in forge_bank.labels if lab.startswith("j7.")],
                  [lab for lab in forge_bank.labels if lab.startswith("j10.")]]
        a = [math.sqrt(0.5), math.sqrt(0.5)]
        report = sl.check_superadditivity([f1, f2], a, blocks, forge_bank, 2)
        assert report.w_total >= report.lower_bound - 1e-10
        assert report.slack >= -1e-10

    def test_overlapping_blocks_rejected(self, forge_grid, forge_bank):
        f1 = band_signal(forge_grid, 64, 128)
        f2 = band_signal(forge_grid, 512, 1024)
        blocks = [["j7.g0"], ["j7.g0", "j10.g0"]]
        with pytest.raises(sl.DisjointnessViolation):
            sl.check_superadditivity([f1, f2], [1.0, 1.0], blocks,
                                     forge_bank, 2)
