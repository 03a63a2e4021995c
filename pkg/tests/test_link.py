import math

import numpy as np
import pytest

from rrmsim import (
    ChannelConfig,
    Direction,
    LinkScenario,
    PathSet,
    PulseSpec,
    RecordingConfig,
    build_toeplitz,
    equivalent_taps,
    make_weights,
    mutual_information,
    outage_probability,
    record_hologram,
    rhs_weights,
    rrc_impulse,
)
from rrmsim.channel import Path
from rrmsim.link import (
    LinkChannel,
    alpha_taps,
    alpha_taps_split,
    normalize_channel,
    raised_cosine,
    trial_mi_curves,
)

from conftest import make_five_paths, make_geometry, make_reference


class TestRrcImpulse:
    def test_unit_energy(self):
        q = rrc_impulse(PulseSpec(rolloff=0.25, span_symbols=10, samples_per_symbol=8))
        assert abs(float(np.sum(q**2)) - 1.0) < 1e-9

    def test_composite_nyquist_property(self):
        pulse = PulseSpec(rolloff=0.25, span_symbols=10, samples_per_symbol=8)
        q = rrc_impulse(pulse)
        w = np.convolve(q, q)
        center = (w.size - 1) // 2
        sps = pulse.samples_per_symbol
        assert abs(w[center] - 1.0) < 1e-3
        for k in range(1, 2 * pulse.span_symbols + 1):
            assert abs(w[center + k * sps]) < 1e-3
            assert abs(w[center - k * sps]) < 1e-3

    def test_zero_rolloff_composite_is_sinc_shaped(self):
        # qualitative limiting case: the slow 1/t tail makes the ISI taper
        # bite harder here, so compare shape, not exact samples
        pulse = PulseSpec(rolloff=0.0, span_symbols=10, samples_per_symbol=8)
        q = rrc_impulse(pulse)
        w = np.convolve(q, q)
        center = (w.size - 1) // 2
        sps = pulse.samples_per_symbol
        idx = np.arange(-4 * sps, 4 * sps + 1)
        t = idx / sps
        samples = w[center + idx]
        assert np.allclose(samples, np.sinc(t), atol=0.05)
        similarity = np.dot(samples, np.sinc(t)) / (
            np.linalg.norm(samples) * np.linalg.norm(np.sinc(t))
        )
        assert similarity > 0.995

    def test_rolloff_validation(self):
        with pytest.raises(ValueError):
            PulseSpec(rolloff=1.5)
        with pytest.raises(ValueError):
            PulseSpec(span_symbols=2)


class TestRaisedCosine:
    def test_nyquist_zeros_exact(self):
        t = np.arange(-20, 21, dtype=float)
        w = raised_cosine(t, 0.25)
        assert w[20] == pytest.approx(1.0)
        nonzero = np.delete(w, 20)
        assert np.max(np.abs(nonzero)) < 1e-15

    def test_singularity_value(self):
        a = 0.25
        w = raised_cosine(np.array([1.0 / (2 * a)]), a)
        assert w[0] == pytest.approx((math.pi / 4) * np.sinc(1.0 / (2 * a)))

    def test_zero_rolloff_is_sinc(self):
        t = np.linspace(-3, 3, 25)
        assert np.allclose(raised_cosine(t, 0.0), np.sinc(t), atol=1e-15)


class TestEquivalentTaps:
    def test_beamforming_gain_over_random_weights(self):
        # perfect-CSI weights for a single zero-delay path concentrate h[0]
        rng = np.random.default_rng(20)
        geom = make_geometry(8, 8)
        ref = make_reference(geom)
        d = Direction.from_degrees(30.0, 60.0)
        paths = PathSet((Path(1.0 + 0j, 0.0, d),))
        pulse = PulseSpec()
        focused = equivalent_taps(geom, ref, rhs_weights(geom, ref, [(d, 1.0 + 0j)]), paths, pulse)
        h0_focused = abs(focused.taps[0])
        for _ in range(20):
            w = rng.uniform(0.0, 1.0, size=geom.shape)
            random_chan = equivalent_taps(
                geom, ref, _as_weights(w), paths, pulse
            )
            assert h0_focused > abs(random_chan.taps[0])

    def test_zero_gain_path_contributes_nothing(self):
        geom = make_geometry(6, 6)
        ref = make_reference(geom)
        paths = PathSet(
            (
                Path(1.0 + 0j, 0.0, Direction.from_degrees(20, 30)),
                Path(0.0 + 0j, 3e-9, Direction.from_degrees(40, 200)),
            )
        )
        holo = record_hologram(geom, ref, paths, RecordingConfig(1.0, 0.0, 1, 1, 0))
        weights = make_weights(holo, "min")
        alpha = alpha_taps(geom, ref, weights, paths)
        assert alpha[1] == 0j

    def test_all_zero_weights_rejected(self):
        geom = make_geometry(4, 4)
        ref = make_reference(geom)
        paths = make_five_paths()
        zero = _as_weights(np.zeros(geom.shape))
        with pytest.raises(ValueError):
            equivalent_taps(geom, ref, zero, paths, PulseSpec())

    def test_radiated_power_scale(self):
        geom = make_geometry(8, 8)
        ref = make_reference(geom)
        paths = make_five_paths()
        holo = record_hologram(geom, ref, paths, RecordingConfig(1.0, 0.0, 1, 1, 0))
        weights = make_weights(holo, "mean")
        a1 = alpha_taps(geom, ref, weights, paths, tx_power=1.0)
        a4 = alpha_taps(geom, ref, weights, paths, tx_power=4.0)
        assert np.allclose(a4, 2.0 * a1, rtol=1e-12)

    def test_split_matches_direct_sum(self):
        rng = np.random.default_rng(21)
        for trial in range(10):
            geom = make_geometry(int(rng.integers(3, 9)), int(rng.integers(3, 9)))
            ref = make_reference(
                geom, amplitude=rng.uniform(0.5, 2.5), phase=rng.uniform(0, 2 * math.pi)
            )
            n = int(rng.integers(1, 6))
            paths = PathSet(
                tuple(
                    Path(
                        complex(rng.normal(), rng.normal()),
                        rng.uniform(0.0, 2e-8),
                        Direction(rng.uniform(0, math.pi / 2), rng.uniform(0, 2 * math.pi)),
                    )
                    for _ in range(n)
                )
            )
            cfg = RecordingConfig(rng.uniform(0.5, 1.5), 0.0, 1, 1, 0)
            holo = record_hologram(geom, ref, paths, cfg)
            strategy = "min" if trial % 2 else "none"
            weights = make_weights(holo, strategy)
            direct = alpha_taps(geom, ref, weights, paths)
            dominant, residual = alpha_taps_split(geom, ref, weights, paths, cfg)
            err = np.abs(direct - (dominant + residual)) / np.maximum(np.abs(direct), 1e-30)
            assert float(np.max(err)) < 1e-9

    def test_split_requires_clean_context(self):
        geom = make_geometry(6, 6)
        ref = make_reference(geom)
        paths = make_five_paths()
        noisy = RecordingConfig(1.0, 0.1, 2, 1, 0)
        holo = record_hologram(geom, ref, paths, noisy)
        weights = make_weights(holo, "min")
        with pytest.raises(ValueError):
            alpha_taps_split(geom, ref, weights, paths, noisy)

    def test_link_channel_split_stored_when_available(self):
        geom = make_geometry(6, 6)
        ref = make_reference(geom)
        paths = make_five_paths()
        cfg = RecordingConfig(1.0, 0.0, 1, 1, 0)
        holo = record_hologram(geom, ref, paths, cfg)
        weights = make_weights(holo, "min")
        chan = equivalent_taps(geom, ref, weights, paths, PulseSpec(), recording=cfg)
        assert any(abs(b) > 0 for _a, b in chan.alpha_pairs)
        direct = alpha_taps(geom, ref, weights, paths)
        assert np.allclose(chan.alpha(), direct, rtol=1e-9)

    def test_fractional_delay_taps_follow_pulse(self):
        geom = make_geometry(8, 8)
        ref = make_reference(geom)
        tau = 3.7e-9
        d = Direction.from_degrees(25, 50)
        paths = PathSet((Path(1.0 + 0j, tau, d),))
        pulse = PulseSpec()
        chan = equivalent_taps(geom, ref, rhs_weights(geom, ref, [(d, 1.0 + 0j)]), paths, pulse)
        alpha = alpha_taps(geom, ref, rhs_weights(geom, ref, [(d, 1.0 + 0j)]), paths)[0]
        frac = tau / pulse.symbol_period
        for lag in (-1, 0, 1, 2):
            expected = alpha * raised_cosine(np.array([lag - frac]), pulse.rolloff)[0]
            assert chan.taps[lag] == pytest.approx(expected, rel=1e-12)


def _as_weights(values):
    from rrmsim.holography import WeightMatrix

    scaled = values / np.max(values) if np.max(values) > 0 else values
    return WeightMatrix(scaled, 0.0, 1.0, "none")


class TestToeplitz:
    def test_single_tap_identity(self):
        H = build_toeplitz({0: 2.5 + 1j}, 4)
        assert np.array_equal(H, (2.5 + 1j) * np.eye(4))

    def test_two_taps_lower_bidiagonal(self):
        H = build_toeplitz({0: 1.0 + 0j, 1: 0.5 + 0j}, 3)
        expected = np.array(
            [[1.0, 0.0, 0.0], [0.5, 1.0, 0.0], [0.0, 0.5, 1.0]], dtype=complex
        )
        assert np.array_equal(H, expected)

    def test_constant_diagonals_random(self):
        rng = np.random.default_rng(22)
        taps = {int(l): complex(rng.normal(), rng.normal()) for l in range(-5, 9)}
        H = build_toeplitz(taps, 64)
        for i in range(1, 64):
            assert np.array_equal(H[i, 1:], H[i - 1, :-1])

    def test_with_block_sets_identity_noise_filter(self):
        chan = LinkChannel({0: 1.0 + 0j}, ((1.0 + 0j, 0j),)).with_block(8)
        assert chan.K == 8
        assert np.array_equal(chan.F, np.eye(8, dtype=complex))
        assert np.array_equal(chan.H, np.eye(8, dtype=complex))


class TestMutualInformation:
    def test_zero_snr_is_zero(self):
        rng = np.random.default_rng(23)
        H = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        assert mutual_information(H, 0.0) == 0.0

    def test_identity_channel(self):
        for k in (1, 4, 16):
            H = np.eye(k, dtype=complex)
            assert mutual_information(H, 3.0) == pytest.approx(math.log2(4.0), rel=1e-12)

    def test_eig_and_logdet_agree(self):
        rng = np.random.default_rng(24)
        for _ in range(20):
            H = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
            gamma = rng.uniform(0.01, 50.0)
            a = mutual_information(H, gamma, method="eig")
            b = mutual_information(H, gamma, method="logdet")
            assert a == pytest.approx(b, rel=1e-9)

    def test_monotone_in_snr(self):
        rng = np.random.default_rng(25)
        H = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
        gammas = np.logspace(-2, 3, 30)
        values = [mutual_information(H, g) for g in gammas]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_unit_modulus_invariance(self):
        rng = np.random.default_rng(26)
        H = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
        base = mutual_information(H, 5.0)
        for psi in (0.1, 2.0, 5.5):
            assert mutual_information(np.exp(1j * psi) * H, 5.0) == pytest.approx(
                base, abs=1e-9
            )

    def test_normalize_channel_trace(self):
        rng = np.random.default_rng(27)
        H = normalize_channel(rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16)))
        assert np.real(np.trace(H @ H.conj().T)) / 16 == pytest.approx(1.0, rel=1e-12)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            mutual_information(np.ones((2, 3)), 1.0)
        with pytest.raises(ValueError):
            mutual_information(np.eye(2), -1.0)
        with pytest.raises(ValueError):
            mutual_information(np.full((2, 2), np.nan), 1.0)


class TestLinkResult:
    def test_invariants(self):
        from rrmsim import LinkResult

        ok = LinkResult(10.0, 3.5, 0.25, "demo")
        assert ok.mutual_information_bits == 3.5
        with pytest.raises(ValueError):
            LinkResult(10.0, -0.1)
        with pytest.raises(ValueError):
            LinkResult(10.0, 1.0, outage_probability=1.5)


def small_scenario(system="rrm", **overrides):
    geom = make_geometry(8, 8)
    base = dict(
        geom=geom,
        ref=make_reference(geom),
        pulse=PulseSpec(),
        channel=ChannelConfig("rician_random", L=4),
        system=system,
        normalization="absolute",
        K=32,
    )
    base.update(overrides)
    return LinkScenario(**base)


class TestOutage:
    def test_zero_threshold_never_out(self):
        out = outage_probability(small_scenario(), 0.0, 10.0, trials=20, seed=5)
        assert out.probability == 0.0

    def test_zero_snr_always_out(self):
        out = outage_probability(small_scenario(), 2.0, -math.inf, trials=20, seed=5)
        assert out.probability == 1.0

    def test_reproducible_and_bounded(self):
        a = outage_probability(small_scenario(), 2.0, 5.0, trials=40, seed=9)
        b = outage_probability(small_scenario(), 2.0, 5.0, trials=40, seed=9)
        assert a == b
        assert 0.0 <= a.probability <= 1.0
        assert a.ci_half_width >= 0.0

    def test_paired_trials_monotone_in_snr(self):
        curves = trial_mi_curves(small_scenario(), [0.0, 6.0, 12.0], trials=50, seed=31)
        outs = [float(np.mean(curves[:, s] < 2.0)) for s in range(3)]
        assert outs[0] >= outs[1] >= outs[2]

    def test_systems_share_path_draws(self):
        # same seed, different system: identical path realizations by design
        rrm = trial_mi_curves(small_scenario("rrm"), [10.0], trials=5, seed=77)
        rhs = trial_mi_curves(small_scenario("rhs"), [10.0], trials=5, seed=77)
        assert rrm.shape == rhs.shape
        assert np.all(rrm > 0) and np.all(rhs > 0)

    def test_scenario_validation(self):
        with pytest.raises(ValueError):
            small_scenario(system="mimo")
        with pytest.raises(ValueError):
            small_scenario(normalization="weird")
        with pytest.raises(ValueError):
            outage_probability(small_scenario(), -1.0, 5.0, trials=5, seed=1)
