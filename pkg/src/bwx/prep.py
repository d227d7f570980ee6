"""Low-pass dataset preparation for the 2x bandwidth-extension task.

Brickwall mode zeroes spectrogram bins at and above the cutoff and
resynthesises, matching the band-split semantics of the pipeline exactly.
FirSinc mode applies a windowed-sinc FIR forward and backward (zero net group
delay), modelling a realistic acquisition chain. Both keep the original
sample rate and length.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.signal

from .dsp import StftConfig, Waveform, bin_index, istft_array, stft_array
from .errors import DomainError, ShapeError
from .wavio import SampleDepth, wav_read, wav_write


class LowpassMode(enum.Enum):
    BRICKWALL = "brickwall"
    FIR_SINC = "fir"


@dataclass(frozen=True)
class LowpassSpec:
    mode: LowpassMode = LowpassMode.BRICKWALL
    cutoff_hz: float = 4000.0
    taps: int = 511
    fir_window: str = "hamming"

    def __post_init__(self) -> None:
        if self.cutoff_hz <= 0:
            raise DomainError(f"cutoff must be positive, got {self.cutoff_hz}")
        if self.taps < 11 or self.taps % 2 == 0:
            raise DomainError(f"taps must be odd and >= 11, got {self.taps}")


def design_fir(spec: LowpassSpec, sample_rate: int) -> np.ndarray:
    """Windowed-sinc low-pass taps with unity DC gain."""
    if spec.cutoff_hz >= sample_rate / 2:
        raise DomainError(
            f"cutoff {spec.cutoff_hz} Hz is not below Nyquist ({sample_rate / 2} Hz)"
        )
    return scipy.signal.firwin(
        spec.taps, spec.cutoff_hz, window=spec.fir_window, fs=sample_rate
    )


def _lowpass_brickwall(x: np.ndarray, sample_rate: int, cutoff_hz: float, cfg: StftConfig) -> np.ndarray:
    n = len(x)
    # Pad so every sample falls inside some frame, then trim back after OLA.
    if n < cfg.frame_len:
        padded_len = cfg.frame_len
    else:
        n_frames = -(-(n - cfg.frame_len) // cfg.hop) + 1
        padded_len = cfg.output_length(n_frames)
    padded = np.zeros(padded_len)
    padded[:n] = x

    cutoff_bin = bin_index(cutoff_hz, sample_rate, cfg.frame_len)
    X = stft_array(padded, cfg)
    X[:, cutoff_bin:] = 0.0
    return istft_array(X, cfg)[:n]


def _lowpass_fir(x: np.ndarray, sample_rate: int, spec: LowpassSpec) -> np.ndarray:
    taps = design_fir(spec, sample_rate)
    padlen = min(3 * spec.taps, len(x) - 1)
    return scipy.signal.filtfilt(taps, [1.0], x, padlen=padlen)


def lowpass(x: Waveform, spec: LowpassSpec, cfg: StftConfig = StftConfig()) -> Waveform:
    """Band-limit a waveform below the cutoff; output length equals input length."""
    nyquist = x.sample_rate / 2
    if spec.cutoff_hz >= nyquist:
        raise DomainError(f"cutoff {spec.cutoff_hz} Hz is not below Nyquist ({nyquist} Hz)")
    if spec.mode is LowpassMode.BRICKWALL:
        out = _lowpass_brickwall(x.samples, x.sample_rate, spec.cutoff_hz, cfg)
    else:
        out = _lowpass_fir(x.samples, x.sample_rate, spec)
    return Waveform(out, x.sample_rate)


def make_pair(hr_path, out_lr_path, spec: LowpassSpec = LowpassSpec(), cfg: StftConfig = StftConfig()) -> None:
    """Write the low-passed companion of a high-resolution file.

    Channels are processed independently; the output keeps the input's sample
    rate and length and is stored as float32.
    """
    channels, _depth = wav_read(hr_path)
    filtered = [lowpass(ch, spec, cfg) for ch in channels]
    for ch in filtered:
        if len(ch.samples) != len(channels[0].samples):
            raise ShapeError("lowpass changed the sample count")
    wav_write(out_lr_path, filtered, SampleDepth.FLOAT32)
