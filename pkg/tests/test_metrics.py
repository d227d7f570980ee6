"""Log-spectral distance, SNR and consistency residual."""

import math

import numpy as np
import pytest

from bwx import (
    BandLayout,
    ComplexSpectrogram,
    EvalReport,
    MagnitudeSpectrogram,
    StftConfig,
    Waveform,
    consistency_residual,
    evaluate,
    lsd,
    snr,
    stft,
)
from bwx.errors import DomainError, ShapeError
from bwx.metrics import LSD_POWER_FLOOR

CFG = StftConfig()


def scalar_lsd(truth, estimate, lo, hi):
    """Brute-force restatement of the metric with explicit loops."""
    n_frames = truth.shape[0]
    total = 0.0
    for l in range(n_frames):
        inner = 0.0
        for f in range(lo, hi):
            lp_t = 10.0 * math.log10(truth[l, f] ** 2 + LSD_POWER_FLOOR)
            lp_e = 10.0 * math.log10(estimate[l, f] ** 2 + LSD_POWER_FLOOR)
            inner += (lp_t - lp_e) ** 2
        total += math.sqrt(inner / (hi - lo))
    return total / n_frames


def _mag(data):
    return MagnitudeSpectrogram(data, CFG, 44100)


class TestLsd:
    def test_identity_is_exactly_zero(self):
        rng = np.random.default_rng(0)
        m = _mag(rng.random((7, CFG.n_bins)))
        assert lsd(m, m, (0, CFG.n_bins)) == 0.0

    def test_single_perturbation_closed_form(self):
        # One bin's power 10x the other's in exactly one frame.
        n_frames, bins = 25, (0, 186)
        width = bins[1] - bins[0]
        truth = np.ones((n_frames, CFG.n_bins))
        estimate = np.ones((n_frames, CFG.n_bins))
        truth[3, 50] = math.sqrt(10.0)
        value = lsd(_mag(truth), _mag(estimate), bins)
        closed_form = (10.0 / math.sqrt(width)) / n_frames
        assert abs(value - closed_form) < 1e-9

    def test_matches_scalar_brute_force(self):
        rng = np.random.default_rng(5)
        truth = rng.random((4, 64))
        estimate = rng.random((4, 64))
        small = StftConfig(frame_len=126, hop=32)
        t = MagnitudeSpectrogram(truth, small, 44100)
        e = MagnitudeSpectrogram(estimate, small, 44100)
        assert lsd(t, e, (8, 40)) == pytest.approx(
            scalar_lsd(truth, estimate, 8, 40), rel=1e-12
        )

    def test_symmetry(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            a = _mag(rng.random((3, CFG.n_bins)))
            b = _mag(rng.random((3, CFG.n_bins)))
            assert lsd(a, b, (0, 372)) == lsd(b, a, (0, 372))

    def test_partition_consistency(self):
        # Full-range per-frame sums equal the width-weighted combination of
        # disjoint sub-band sums.
        rng = np.random.default_rng(9)
        truth = rng.random((6, CFG.n_bins))
        estimate = rng.random((6, CFG.n_bins))
        t, e = _mag(truth), _mag(estimate)
        split = 400
        full = lsd(t, e, (0, CFG.n_bins))

        def frame_inner(lo, hi):
            d = (
                10 * np.log10(truth[:, lo:hi] ** 2 + LSD_POWER_FLOOR)
                - 10 * np.log10(estimate[:, lo:hi] ** 2 + LSD_POWER_FLOOR)
            )
            return np.sum(d * d, axis=1)

        combined = np.mean(
            np.sqrt((frame_inner(0, split) + frame_inner(split, CFG.n_bins)) / CFG.n_bins)
        )
        assert full == pytest.approx(combined, rel=1e-12)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            lsd(_mag(np.ones((3, CFG.n_bins))), _mag(np.ones((4, CFG.n_bins))), (0, 10))

    def test_empty_range_rejected(self):
        m = _mag(np.ones((3, CFG.n_bins)))
        with pytest.raises(DomainError):
            lsd(m, m, (10, 10))


class TestSnr:
    def test_identical_signals_hit_cap(self):
        x = Waveform(np.sin(np.linspace(0, 20, 4000)), 44100)
        assert snr(x, x) == pytest.approx(120.0, abs=1e-9)

    def test_zero_estimate_is_zero_db(self):
        x = Waveform(np.sin(np.linspace(0, 20, 4000)), 44100)
        zero = Waveform(np.zeros(4000), 44100)
        assert snr(x, zero) == pytest.approx(0.0, abs=1e-12)

    def test_half_amplitude_closed_form(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(5000)
        truth = Waveform(x, 44100)
        half = Waveform(0.5 * x, 44100)
        assert snr(truth, half) == pytest.approx(10 * math.log10(4), abs=1e-12)
        assert snr(truth, half) == pytest.approx(6.02, abs=0.01)

    def test_joint_scaling_invariance(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(3000)
        e = x + 0.1 * rng.standard_normal(3000)
        base = snr(Waveform(x, 44100), Waveform(e, 44100))
        scaled = snr(Waveform(4.0 * x, 44100), Waveform(4.0 * e, 44100))
        assert scaled == pytest.approx(base, rel=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            snr(Waveform(np.ones(10), 44100), Waveform(np.ones(11), 44100))

    def test_zero_truth_rejected(self):
        with pytest.raises(DomainError):
            snr(Waveform(np.zeros(10), 44100), Waveform(np.ones(10), 44100))


class TestConsistencyResidual:
    def test_stft_output_is_consistent(self, short_music):
        X = stft(short_music, CFG)
        assert consistency_residual(X) < 1e-6

    def test_zero_spectrogram(self):
        X = ComplexSpectrogram(np.zeros((8, CFG.n_bins)), CFG, 44100)
        assert consistency_residual(X) == 0.0

    def test_scrambled_phases_are_inconsistent(self, short_music):
        rng = np.random.default_rng(11)
        X = stft(short_music, CFG)
        scrambled = np.abs(X.data) * np.exp(2j * np.pi * rng.random(X.data.shape))
        residual = consistency_residual(ComplexSpectrogram(scrambled, CFG, 44100))
        assert residual > 1e-2

    def test_flip_spectrogram_less_consistent_than_gla_output(self, short_music):
        from bwx import BandLayout, GlaConfig, flip_phase, gla_reconstruct, phase_of
        from bwx.dsp import PhaseSpectrogram

        layout = BandLayout(186, 372, CFG.n_bins)
        X = stft(short_music, CFG)
        magnitude = MagnitudeSpectrogram(np.abs(X.data), CFG, X.sample_rate)
        lfc_phase = PhaseSpectrogram(
            phase_of(X).data[:, :186], CFG, X.sample_rate
        )
        flip = flip_phase(lfc_phase, layout)
        flipped = X.data.copy()
        flipped[:, 186:372] = magnitude.data[:, 186:372] * np.exp(1j * flip.data)
        flip_residual = consistency_residual(
            ComplexSpectrogram(flipped, CFG, X.sample_rate)
        )

        lfc = ComplexSpectrogram(X.data[:, :186], CFG, X.sample_rate)
        gla_out, _ = gla_reconstruct(
            magnitude, lfc, GlaConfig(layout=layout, iterations=20, record_trace=False)
        )
        assert consistency_residual(gla_out) < flip_residual


class TestEvalReport:
    def test_csv_row_format(self):
        layout = BandLayout(186, 372, CFG.n_bins)
        report = EvalReport(1.23456, 0.98765, 42.0, 17, layout)
        row = report.csv_row("a.wav", "gla")
        assert row == "a.wav,gla,1.2346,0.9877,42.0000,17"

    def test_negative_lsd_rejected(self):
        layout = BandLayout(186, 372, CFG.n_bins)
        with pytest.raises(DomainError):
            EvalReport(-1.0, 0.0, 0.0, 1, layout)

    def test_evaluate_identical_waveforms(self, short_music):
        layout = BandLayout(186, 372, CFG.n_bins)
        report = evaluate(short_music, short_music, layout, CFG)
        assert report.lsd_hf == 0.0
        assert report.lsd_full == 0.0
        assert report.snr == pytest.approx(120.0, abs=1e-9)
        assert report.frames_compared == CFG.frame_count(len(short_music.samples))
