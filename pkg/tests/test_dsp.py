import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from astskin import dsp
from astskin.dsp import SpectralFeatures, ToneSpec, Waveform
from astskin.errors import EmptyToneList, FrameTooLong, FrameTooShort, MalformedWav, NyquistViolation
from astskin.wavfile import decode, encode, wav_read, wav_write

from oracles import direct_dft


def tone(freq, amp, rate=44100, n=4410):
    t = np.arange(n)
    return Waveform(rate, amp * np.sin(2 * np.pi * freq * t / rate))


class TestSynth:
    def test_reference_signal_scaled_by_amplitude_sum(self):
        w = dsp.synth_reference(dsp.reference_tones(), 44100, 1.0)
        assert len(w) == 44100
        assert w.scale == pytest.approx(1 / 2.4)
        assert np.max(np.abs(w.samples)) <= 1.0
        n = np.arange(44100)
        expected = sum(0.6 * np.sin(2 * np.pi * f * n / 44100) for f in (300, 500, 700, 900)) / 2.4
        np.testing.assert_allclose(w.samples, expected, atol=1e-12)

    def test_zero_amplitude_is_silence(self):
        w = dsp.synth_reference([ToneSpec(300, 0.0)], 44100, 0.5)
        assert not np.any(w.samples)
        assert w.scale == 1.0

    def test_single_tone_sine_identity(self):
        w = dsp.synth_reference([ToneSpec(300, 0.6)], 44100, 0.1)
        assert w.samples[0] == 0.0
        quarter = 44100 / 300 / 4  # 36.75 samples; nearest integer sample
        assert w.samples[int(quarter)] == pytest.approx(0.6, abs=2e-3)
        # 441 Hz hits its quarter period on an exact sample
        w2 = dsp.synth_reference([ToneSpec(441, 0.6)], 44100, 0.1)
        assert w2.samples[25] == pytest.approx(0.6, abs=1e-12)

    def test_errors(self):
        with pytest.raises(EmptyToneList):
            dsp.synth_reference([], 44100, 1.0)
        with pytest.raises(NyquistViolation):
            dsp.synth_reference([ToneSpec(22050, 0.5)], 44100, 1.0)


class TestFrame:
    @pytest.mark.parametrize(
        "n, frame_len, hop, expected",
        [(4410, 4410, 4410, 1), (44100, 4410, 4410, 10), (44100, 4410, 2205, 19)],
    )
    def test_counts(self, n, frame_len, hop, expected):
        w = Waveform(44100, np.arange(n, dtype=float))
        frames = dsp.frame(w, frame_len, hop)
        assert len(frames) == expected == (n - frame_len) // hop + 1
        assert all(len(f) == frame_len for f in frames)
        assert frames[-1].samples[0] == (expected - 1) * hop

    def test_too_long(self):
        with pytest.raises(FrameTooLong):
            dsp.frame(Waveform(44100, np.zeros(100)), 101, 1)


class TestDftAmplitudes:
    @pytest.mark.parametrize("freq", [300, 500, 700, 900])
    def test_on_bin_single_tone(self, freq):
        feats = dsp.dft_amplitudes(tone(freq, 0.6)).as_array()
        idx = (300, 500, 700, 900).index(freq)
        assert feats[idx] == pytest.approx(0.6, abs=1e-9)
        assert np.all(np.delete(feats, idx) <= 1e-9)

    def test_zero_frame(self):
        assert dsp.dft_amplitudes(Waveform(44100, np.zeros(4410))).as_array().tolist() == [0.0] * 4

    def test_reference_frame_equal_amplitudes_match_oracle(self):
        w = dsp.synth_reference(dsp.reference_tones(), 44100, 0.1)
        feats = dsp.dft_amplitudes(w).as_array()
        oracle = [2 / 4410 * abs(direct_dft(w.samples, k)) for k in (30, 50, 70, 90)]
        np.testing.assert_allclose(feats, oracle, rtol=1e-9)
        np.testing.assert_allclose(feats, 0.6 / 2.4, rtol=1e-9)

    def test_matches_direct_summation_on_random_frames(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            x = rng.uniform(-1, 1, 4410)
            bins = dsp.dft_bins(Waveform(44100, x))
            oracle = np.array([direct_dft(x, k) for k in (30, 50, 70, 90)])
            assert np.max(np.abs(bins - oracle)) <= 1e-9 * np.max(np.abs(oracle))

    def test_nearest_bin_off_grid(self):
        # 304 Hz with 10 Hz bins still reads bin 30
        assert dsp.nearest_bins(4410, 44100, [304, 296, 306]).tolist() == [30, 30, 31]

    def test_hann_window_keeps_on_bin_amplitude(self):
        feats = dsp.dft_amplitudes(tone(500, 0.4), window="hann")
        assert feats.a500 == pytest.approx(0.4, abs=1e-9)

    def test_errors(self):
        with pytest.raises(FrameTooShort):
            dsp.dft_amplitudes(Waveform(44100, np.zeros(1)))
        with pytest.raises(NyquistViolation):
            dsp.dft_amplitudes(Waveform(1000, np.zeros(100)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 600), st.integers(0, 2**32 - 1))
    def test_parseval(self, n, seed):
        x = np.random.default_rng(seed).normal(size=n)
        amps = dsp.amplitude_spectrum(Waveform(44100, x))
        lhs = np.sum(amps**2) * n / 4
        assert lhs == pytest.approx(np.sum(x**2), rel=1e-6)

    @settings(max_examples=30, deadline=None)
    @given(
        st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**32 - 1)
    )
    def test_linearity(self, a, b, seed):
        rng = np.random.default_rng(seed)
        x, y = rng.normal(size=(2, 4410))
        lhs = dsp.dft_bins(Waveform(44100, a * x + b * y))
        rhs = a * dsp.dft_bins(Waveform(44100, x)) + b * dsp.dft_bins(Waveform(44100, y))
        scale = max(1.0, np.max(np.abs(rhs)))
        assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale


class TestSpectralFeatures:
    def test_rejects_negative_and_nan(self):
        with pytest.raises(ValueError):
            SpectralFeatures(0.1, -0.1, 0.1, 0.1)
        with pytest.raises(ValueError):
            SpectralFeatures(0.1, float("nan"), 0.1, 0.1)


class TestWav:
    def test_silence_round_trip(self, tmp_path):
        path = tmp_path / "s.wav"
        wav_write(Waveform(44100, np.zeros(44100)), path)
        w = wav_read(path)
        assert w.sample_rate_hz == 44100
        assert len(w) == 44100 and not np.any(w.samples)

    def test_reference_round_trip_within_quantization(self, tmp_path):
        ref = dsp.synth_reference(dsp.reference_tones(), 44100, 1.0)
        path = tmp_path / "ref.wav"
        wav_write(ref, path)
        back = wav_read(path)
        assert np.max(np.abs(back.samples - ref.samples)) <= 1 / 32767

    def test_header_layout(self):
        data = encode(Waveform(44100, np.array([0.0, 1.0, -1.0, 0.5])))
        assert data[0:4] == b"RIFF"
        assert struct.unpack_from("<I", data, 4)[0] == len(data) - 8
        assert data[8:16] == b"WAVEfmt "
        assert struct.unpack_from("<IHHIIHH", data, 16) == (16, 1, 1, 44100, 88200, 2, 16)
        assert data[36:40] == b"data"
        assert struct.unpack_from("<I", data, 40)[0] == 8
        assert struct.unpack_from("<4h", data, 44) == (0, 32767, -32767, 16384)

    def test_clipping(self):
        data = encode(Waveform(8000, np.array([2.0, -2.0])))
        assert struct.unpack_from("<2h", data, 44) == (32767, -32768)

    def test_skips_unknown_chunks(self):
        data = encode(Waveform(8000, np.array([0.25, -0.25])))
        extra = b"LIST" + struct.pack("<I", 3) + b"abc\x00"
        patched = data[:36] + extra + data[36:]
        patched = patched[:4] + struct.pack("<I", len(patched) - 8) + patched[8:]
        w = decode(patched)
        np.testing.assert_allclose(w.samples, [8192 / 32767, -8192 / 32767])

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: b"RIFX" + d[4:],
            lambda d: d[:20] + struct.pack("<H", 3) + d[22:],  # float format code
            lambda d: d[:22] + struct.pack("<H", 2) + d[24:],  # stereo
            lambda d: d[:36],  # no data chunk
            lambda d: d[:-1],  # truncated data
        ],
    )
    def test_malformed(self, mutate):
        data = encode(Waveform(8000, np.zeros(4)))
        with pytest.raises(MalformedWav):
            decode(mutate(data))
