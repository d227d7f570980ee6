"""Time-frequency analysis/synthesis, band indexing and the consistency projection.

Conventions used throughout the package:

* Frames start at sample 0 with no center padding; a signal of N samples
  yields L = 1 + floor((N - frame_len) / hop) frames.
* Spectrograms are one-sided, shape (L, F) with F = frame_len // 2 + 1.
* Synthesis is weighted overlap-add with the analysis window applied a
  second time and the result divided by the overlapped squared-window sum
  (floored at 1e-12 to keep edge samples finite).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import DomainError, LengthError, ShapeError

WINDOW_SUM_FLOOR = 1e-12


def hann_window(frame_len: int) -> np.ndarray:
    """Periodic Hann window of the given even length."""
    n = np.arange(frame_len)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / frame_len)


def wrap_phase(theta: np.ndarray) -> np.ndarray:
    """Wrap angles into (-pi, pi]; -pi maps to +pi."""
    return np.pi - np.mod(np.pi - np.asarray(theta, dtype=np.float64), 2.0 * np.pi)


def bin_index(freq_hz: float, sample_rate: int, frame_len: int) -> int:
    """Map a frequency in Hz to the nearest one-sided spectrogram bin.

    Rounds half up and clamps to [0, frame_len // 2 + 1]. Frequencies outside
    [0, Nyquist] are rejected.
    """
    nyquist = sample_rate / 2.0
    if not 0.0 <= freq_hz <= nyquist:
        raise DomainError(
            f"frequency {freq_hz} Hz outside [0, {nyquist}] for sample rate {sample_rate}"
        )
    k = int(np.floor(freq_hz * frame_len / sample_rate + 0.5))
    return min(max(k, 0), frame_len // 2 + 1)


@dataclass(frozen=True)
class StftConfig:
    """Analysis/synthesis contract: frame length, hop and window type."""

    frame_len: int = 2048
    hop: int = 256
    window: str = "hann"

    def __post_init__(self) -> None:
        if self.frame_len <= 0 or self.frame_len % 2 != 0:
            raise DomainError(f"frame_len must be positive and even, got {self.frame_len}")
        if not 0 < self.hop <= self.frame_len:
            raise DomainError(f"hop must satisfy 0 < hop <= frame_len, got {self.hop}")
        if self.window != "hann":
            raise DomainError(f"unsupported window {self.window!r}, only 'hann'")

    @property
    def n_bins(self) -> int:
        return self.frame_len // 2 + 1

    def window_values(self) -> np.ndarray:
        return hann_window(self.frame_len)

    def frame_count(self, n_samples: int) -> int:
        if n_samples < self.frame_len:
            raise LengthError(
                f"signal of {n_samples} samples shorter than one frame ({self.frame_len})"
            )
        return 1 + (n_samples - self.frame_len) // self.hop

    def output_length(self, n_frames: int) -> int:
        return (n_frames - 1) * self.hop + self.frame_len


@dataclass
class Waveform:
    """Mono sample sequence plus its sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ShapeError(f"waveform samples must be 1-D, got shape {self.samples.shape}")
        if self.sample_rate <= 0:
            raise DomainError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(self.samples)):
            raise DomainError("waveform contains non-finite samples")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class BandLayout:
    """Bin boundaries splitting a spectrogram into LFC, HFC and residual bands.

    LFC covers [0, k_lo), HFC covers [k_lo, k_hi), the residual band covers
    [k_hi, n_bins).
    """

    k_lo: int
    k_hi: int
    n_bins: int

    def __post_init__(self) -> None:
        if not 0 < self.k_lo < self.k_hi <= self.n_bins:
            raise DomainError(
                f"band layout requires 0 < k_lo < k_hi <= n_bins, "
                f"got ({self.k_lo}, {self.k_hi}, {self.n_bins})"
            )

    @property
    def lfc_width(self) -> int:
        return self.k_lo

    @property
    def hfc_width(self) -> int:
        return self.k_hi - self.k_lo

    @property
    def residual_width(self) -> int:
        return self.n_bins - self.k_hi

    @classmethod
    def from_frequencies(
        cls, lo_hz: float, hi_hz: float, sample_rate: int, cfg: StftConfig
    ) -> "BandLayout":
        return cls(
            k_lo=bin_index(lo_hz, sample_rate, cfg.frame_len),
            k_hi=bin_index(hi_hz, sample_rate, cfg.frame_len),
            n_bins=cfg.n_bins,
        )


def _validate_spectrogram_data(data: np.ndarray, config: StftConfig, full_width: bool) -> None:
    if data.ndim != 2:
        raise ShapeError(f"spectrogram data must be 2-D (frames x bins), got {data.shape}")
    if full_width and data.shape[1] != config.n_bins:
        raise ShapeError(
            f"expected {config.n_bins} bins for frame_len {config.frame_len}, "
            f"got {data.shape[1]}"
        )
    if not np.all(np.isfinite(data)):
        raise DomainError("spectrogram contains non-finite entries")


@dataclass
class ComplexSpectrogram:
    """Complex STFT values, shape (frames, bins). May be a band slice."""

    data: np.ndarray
    config: StftConfig
    sample_rate: int

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.complex128)
        _validate_spectrogram_data(self.data, self.config, full_width=False)

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def n_bins(self) -> int:
        return self.data.shape[1]


@dataclass
class MagnitudeSpectrogram:
    """Non-negative magnitudes, shape (frames, bins). May be a band slice."""

    data: np.ndarray
    config: StftConfig
    sample_rate: int

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        _validate_spectrogram_data(self.data, self.config, full_width=False)
        if np.any(self.data < 0):
            raise DomainError("magnitude spectrogram contains negative entries")

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def n_bins(self) -> int:
        return self.data.shape[1]


@dataclass
class PhaseSpectrogram:
    """Phase angles in (-pi, pi], shape (frames, bins). May be a band slice."""

    data: np.ndarray
    config: StftConfig
    sample_rate: int

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        _validate_spectrogram_data(self.data, self.config, full_width=False)
        if np.any(self.data <= -np.pi) or np.any(self.data > np.pi):
            raise DomainError("phase entries must lie in (-pi, pi]")

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def n_bins(self) -> int:
        return self.data.shape[1]


# ---------------------------------------------------------------------------
# Array-level core. The public operations below wrap these in the typed
# containers; iterative callers (Griffin-Lim) use them directly.
# ---------------------------------------------------------------------------


def stft_array(x: np.ndarray, cfg: StftConfig) -> np.ndarray:
    """STFT of a 1-D float array, returning (frames, bins) complex128."""
    x = np.asarray(x, dtype=np.float64)
    n_frames = cfg.frame_count(len(x))
    frames = np.lib.stride_tricks.sliding_window_view(x, cfg.frame_len)[:: cfg.hop]
    frames = frames[:n_frames] * cfg.window_values()
    return scipy.fft.rfft(frames, axis=1, workers=-1)


def istft_array(X: np.ndarray, cfg: StftConfig) -> np.ndarray:
    """Weighted overlap-add inverse of `stft_array`; output has
    (L - 1) * hop + frame_len samples."""
    X = np.asarray(X, dtype=np.complex128)
    n_frames = X.shape[0]
    frame_len, hop = cfg.frame_len, cfg.hop
    window = cfg.window_values()
    frames = scipy.fft.irfft(X, n=frame_len, axis=1, workers=-1) * window

    n_out = cfg.output_length(n_frames)
    if frame_len % hop == 0:
        # Hop divides the frame: overlap-add as shifted hop-sized blocks.
        n_seg = frame_len // hop
        blocks = frames.reshape(n_frames, n_seg, hop)
        acc = np.zeros((n_frames - 1 + n_seg, hop))
        for j in range(n_seg):
            acc[j : j + n_frames] += blocks[:, j, :]
        out = acc.reshape(-1)
        wblocks = (window * window).reshape(n_seg, hop)
        wline = np.zeros((n_frames - 1 + n_seg, hop))
        for j in range(n_seg):
            wline[j : j + n_frames] += wblocks[j]
        wsum = wline.reshape(-1)
    else:
        out = np.zeros(n_out)
        wsum = np.zeros(n_out)
        wsq = window * window
        for i in range(n_frames):
            start = i * hop
            out[start : start + frame_len] += frames[i]
            wsum[start : start + frame_len] += wsq
    return out / np.maximum(wsum, WINDOW_SUM_FLOOR)


def interior_slice(n_samples: int, cfg: StftConfig) -> slice:
    """Index range where every sample is covered by a full set of overlapping
    frames, i.e. where the round trip is exact."""
    margin = cfg.frame_len - cfg.hop
    return slice(margin, n_samples - margin)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def stft(x: Waveform, cfg: StftConfig) -> ComplexSpectrogram:
    """Forward STFT of a waveform."""
    return ComplexSpectrogram(stft_array(x.samples, cfg), cfg, x.sample_rate)


def istft(X: ComplexSpectrogram) -> Waveform:
    """Inverse STFT by weighted overlap-add synthesis."""
    if X.n_bins != X.config.n_bins:
        raise ShapeError(
            f"spectrogram has {X.n_bins} bins, config demands {X.config.n_bins}"
        )
    return Waveform(istft_array(X.data, X.config), X.sample_rate)


def consistency_project(X: ComplexSpectrogram) -> ComplexSpectrogram:
    """Project onto the set of consistent spectrograms: stft(istft(X)).

    Fixed point (up to rounding) exactly when X is the STFT of some signal.
    """
    if X.n_bins != X.config.n_bins:
        raise ShapeError(
            f"spectrogram has {X.n_bins} bins, config demands {X.config.n_bins}"
        )
    projected = consistency_project_array(X.data, X.config)
    return ComplexSpectrogram(projected, X.config, X.sample_rate)


def consistency_project_array(X: np.ndarray, cfg: StftConfig) -> np.ndarray:
    projected = stft_array(istft_array(X, cfg), cfg)
    n_frames = X.shape[0]
    if projected.shape[0] > n_frames:
        projected = projected[:n_frames]
    elif projected.shape[0] < n_frames:
        pad = np.zeros((n_frames - projected.shape[0], X.shape[1]), dtype=np.complex128)
        projected = np.vstack([projected, pad])
    return projected


def band_split(
    X: ComplexSpectrogram, layout: BandLayout
) -> tuple[ComplexSpectrogram, ComplexSpectrogram, ComplexSpectrogram]:
    """Split a full spectrogram into (LFC, HFC, residual) bin-range copies."""
    if X.n_bins != layout.n_bins:
        raise ShapeError(
            f"spectrogram has {X.n_bins} bins but layout expects {layout.n_bins}"
        )
    parts = (
        X.data[:, : layout.k_lo].copy(),
        X.data[:, layout.k_lo : layout.k_hi].copy(),
        X.data[:, layout.k_hi :].copy(),
    )
    return tuple(ComplexSpectrogram(p, X.config, X.sample_rate) for p in parts)


def band_concat(
    lfc: ComplexSpectrogram,
    hfc: ComplexSpectrogram,
    residual: ComplexSpectrogram,
    layout: BandLayout,
) -> ComplexSpectrogram:
    """Exact inverse of `band_split`: reassemble a full spectrogram."""
    widths = (lfc.n_bins, hfc.n_bins, residual.n_bins)
    expected = (layout.lfc_width, layout.hfc_width, layout.residual_width)
    if widths != expected:
        raise ShapeError(f"band widths {widths} do not match layout widths {expected}")
    frames = {lfc.n_frames, hfc.n_frames, residual.n_frames}
    if len(frames) != 1:
        raise ShapeError(f"band frame counts differ: {sorted(frames)}")
    data = np.hstack([lfc.data, hfc.data, residual.data])
    return ComplexSpectrogram(data, lfc.config, lfc.sample_rate)


def magnitude_of(X: ComplexSpectrogram) -> MagnitudeSpectrogram:
    return MagnitudeSpectrogram(np.abs(X.data), X.config, X.sample_rate)


def phase_of(X: ComplexSpectrogram) -> PhaseSpectrogram:
    return PhaseSpectrogram(wrap_phase(np.angle(X.data)), X.config, X.sample_rate)
