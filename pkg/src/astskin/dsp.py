"""Reference-tone synthesis, framing and per-tone amplitude extraction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyToneList, FrameTooLong, FrameTooShort, NyquistViolation

DEFAULT_RATE_HZ = 44100
DEFAULT_FRAME_LEN = 4410
REFERENCE_FREQS_HZ = (300.0, 500.0, 700.0, 900.0)
REFERENCE_AMPLITUDE = 0.6


@dataclass(frozen=True)
class Waveform:
    sample_rate_hz: int
    samples: np.ndarray
    # 1.0 unless synth_reference had to rescale to avoid clipping
    scale: float = 1.0

    def __post_init__(self):
        if int(self.sample_rate_hz) <= 0:
            raise ValueError("sample_rate_hz must be positive")
        arr = np.asarray(self.samples, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz


@dataclass(frozen=True)
class ToneSpec:
    frequency_hz: float
    amplitude: float

    def __post_init__(self):
        if not self.frequency_hz > 0:
            raise ValueError("frequency_hz must be positive")
        if not 0.0 <= self.amplitude <= 1.0:
            raise ValueError("amplitude must lie in [0, 1]")


@dataclass(frozen=True)
class SpectralFeatures:
    a300: float
    a500: float
    a700: float
    a900: float

    def __post_init__(self):
        for name in ("a300", "a500", "a700", "a900"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_sequence(cls, values) -> "SpectralFeatures":
        values = [float(v) for v in values]
        if len(values) != 4:
            raise ValueError(f"expected 4 amplitudes, got {len(values)}")
        return cls(*values)

    def as_array(self) -> np.ndarray:
        return np.array([self.a300, self.a500, self.a700, self.a900])


def reference_tones() -> list[ToneSpec]:
    return [ToneSpec(f, REFERENCE_AMPLITUDE) for f in REFERENCE_FREQS_HZ]


def _check_nyquist(freqs, sample_rate_hz) -> None:
    nyquist = sample_rate_hz / 2.0
    for f in freqs:
        if not f < nyquist:
            raise NyquistViolation(
                f"{f} Hz is not below the Nyquist frequency {nyquist} Hz"
            )


def synth_reference(
    tones: list[ToneSpec],
    sample_rate_hz: int = DEFAULT_RATE_HZ,
    duration_s: float = 1.0,
) -> Waveform:
    """Render a sum of zero-phase sines.

    When the tone amplitudes sum to more than 1 the whole waveform is scaled
    by ``1 / sum`` so no sample can clip; the factor is kept on
    ``Waveform.scale``.  The four-tone reference (4 x 0.6) is scaled by 1/2.4.
    """
    if not tones:
        raise EmptyToneList("at least one tone is required")
    if not duration_s > 0:
        raise ValueError("duration_s must be positive")
    _check_nyquist([t.frequency_hz for t in tones], sample_rate_hz)

    n_samples = int(round(duration_s * sample_rate_hz))
    n = np.arange(n_samples, dtype=np.float64)
    out = np.zeros(n_samples)
    for tone in tones:
        out += tone.amplitude * np.sin(2.0 * np.pi * tone.frequency_hz * n / sample_rate_hz)

    total = sum(t.amplitude for t in tones)
    scale = 1.0 / total if total > 1.0 else 1.0
    if scale != 1.0:
        out *= scale
    return Waveform(sample_rate_hz, out, scale)


def frame(w: Waveform, frame_len: int, hop: int) -> list[Waveform]:
    if frame_len <= 0 or hop <= 0:
        raise ValueError("frame_len and hop must be positive")
    if frame_len > len(w):
        raise FrameTooLong(f"frame_len {frame_len} exceeds waveform length {len(w)}")
    count = (len(w) - frame_len) // hop + 1
    return [
        Waveform(w.sample_rate_hz, w.samples[i * hop : i * hop + frame_len])
        for i in range(count)
    ]


def _window(n: int, window: str | None) -> np.ndarray | None:
    if window in (None, "rect", "rectangular"):
        return None
    if window == "hann":
        # periodic Hann keeps bin-centred tones on a single main lobe
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)
    raise ValueError(f"unknown window {window!r}")


def nearest_bins(n: int, sample_rate_hz: int, freqs) -> np.ndarray:
    return np.array([int(round(f * n / sample_rate_hz)) for f in freqs], dtype=np.int64)


def dft_bins(
    frame: Waveform, target_freqs_hz=REFERENCE_FREQS_HZ, window: str | None = None
) -> np.ndarray:
    """Complex DFT coefficients at the bins nearest each target frequency."""
    n = len(frame)
    if n < 2:
        raise FrameTooShort(f"frame has {n} samples, need at least 2")
    _check_nyquist(target_freqs_hz, frame.sample_rate_hz)
    x = frame.samples
    win = _window(n, window)
    if win is not None:
        x = x * win
    spectrum = np.fft.rfft(x)
    return spectrum[nearest_bins(n, frame.sample_rate_hz, target_freqs_hz)]


def _amplitude_gain(n: int, window: str | None) -> float:
    win = _window(n, window)
    return 2.0 / (n if win is None else float(win.sum()))


def dft_amplitudes(
    frame: Waveform, target_freqs_hz=REFERENCE_FREQS_HZ, window: str | None = None
) -> SpectralFeatures:
    """Single-sided amplitudes ``(2/N)|X_k|`` at the four reference tones.

    With a window the gain is ``2 / sum(w)`` so a bin-centred tone of
    amplitude A still reads A.
    """
    if len(target_freqs_hz) != 4:
        raise ValueError("exactly four target frequencies are required")
    bins = dft_bins(frame, target_freqs_hz, window)
    amps = _amplitude_gain(len(frame), window) * np.abs(bins)
    return SpectralFeatures.from_sequence(amps)


def amplitude_spectrum(frame: Waveform) -> np.ndarray:
    """``(2/N)|X_k|`` for every bin ``k = 0 .. N-1`` (rectangular window)."""
    n = len(frame)
    if n < 2:
        raise FrameTooShort(f"frame has {n} samples, need at least 2")
    return (2.0 / n) * np.abs(np.fft.fft(frame.samples))


def featurize(
    w: Waveform,
    frame_len: int = DEFAULT_FRAME_LEN,
    hop: int = DEFAULT_FRAME_LEN,
    window: str | None = None,
) -> list[SpectralFeatures]:
    return [dft_amplitudes(f, REFERENCE_FREQS_HZ, window) for f in frame(w, frame_len, hop)]
