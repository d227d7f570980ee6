"""Minimal RIFF/WAVE reader and writer.

Reads PCM 16-bit, PCM 24-bit and IEEE float 32-bit files; integer samples are
normalised to [-1, 1) by dividing by 2^(depth-1). Writes PCM 16-bit (clamped,
rounded half away from zero) or float 32-bit with a canonical 44-byte header.
Unknown chunks are skipped on read.
"""

from __future__ import annotations

import enum
import struct

import numpy as np

from .dsp import Waveform
from .errors import (
    DomainError,
    MalformedHeaderError,
    ShapeError,
    TruncatedDataError,
    UnsupportedCodecError,
)

_FORMAT_PCM = 1
_FORMAT_IEEE_FLOAT = 3
_FORMAT_EXTENSIBLE = 0xFFFE


class SampleDepth(enum.Enum):
    PCM16 = "pcm16"
    FLOAT32 = "float32"


def wav_read(path) -> tuple[list[Waveform], int]:
    """Read a WAV file, returning one Waveform per channel and the bit depth.

    The bit depth is 16, 24 or 32 (32 meaning IEEE float).
    """
    with open(path, "rb") as fh:
        raw = fh.read()

    if len(raw) < 12:
        raise MalformedHeaderError(f"{path}: file too small to hold a RIFF header")
    if raw[0:4] != b"RIFF":
        raise MalformedHeaderError(f"{path}: missing RIFF tag")
    if raw[8:12] != b"WAVE":
        raise MalformedHeaderError(f"{path}: missing WAVE tag")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body_start = pos + 8
        if chunk_id == b"fmt ":
            if chunk_size < 16 or body_start + chunk_size > len(raw):
                raise MalformedHeaderError(f"{path}: fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", raw, body_start)
            if fmt[0] == _FORMAT_EXTENSIBLE and chunk_size >= 40:
                # Resolve WAVE_FORMAT_EXTENSIBLE via the SubFormat GUID prefix.
                (sub_tag,) = struct.unpack_from("<H", raw, body_start + 24)
                fmt = (sub_tag,) + fmt[1:]
        elif chunk_id == b"data":
            declared = chunk_size
            available = len(raw) - body_start
            if declared > available:
                raise TruncatedDataError(
                    f"{path}: data chunk declares {declared} bytes, only {available} present"
                )
            data = raw[body_start : body_start + declared]
        pos = body_start + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise MalformedHeaderError(f"{path}: no fmt chunk")
    if data is None:
        raise MalformedHeaderError(f"{path}: no data chunk")

    tag, n_channels, sample_rate, _byte_rate, block_align, bits = fmt
    if n_channels < 1:
        raise MalformedHeaderError(f"{path}: channel count {n_channels} invalid")

    if tag == _FORMAT_PCM and bits == 16:
        samples = np.frombuffer(data[: len(data) - len(data) % 2], dtype="<i2")
        values = samples.astype(np.float64) / 32768.0
        depth = 16
    elif tag == _FORMAT_PCM and bits == 24:
        usable = len(data) - len(data) % 3
        b = np.frombuffer(data[:usable], dtype=np.uint8).reshape(-1, 3).astype(np.int64)
        ints = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        ints = np.where(ints & 0x800000, ints - (1 << 24), ints)
        values = ints.astype(np.float64) / float(1 << 23)
        depth = 24
    elif tag == _FORMAT_IEEE_FLOAT and bits == 32:
        samples = np.frombuffer(data[: len(data) - len(data) % 4], dtype="<f4")
        values = samples.astype(np.float64)
        depth = 32
    else:
        raise UnsupportedCodecError(
            f"{path}: format tag {tag} with {bits} bits is not supported "
            "(PCM16, PCM24 or float32 only)"
        )

    frames = len(values) // n_channels
    values = values[: frames * n_channels].reshape(frames, n_channels)
    channels = [Waveform(values[:, c].copy(), sample_rate) for c in range(n_channels)]
    return channels, depth


def _quantize_pcm16(samples: np.ndarray) -> np.ndarray:
    clamped = np.clip(samples, -1.0, 1.0)
    scaled = clamped * 32768.0
    rounded = np.trunc(scaled + np.copysign(0.5, scaled))
    return np.clip(rounded, -32768, 32767).astype("<i2")


def wav_write(path, x, depth: SampleDepth = SampleDepth.FLOAT32) -> None:
    """Write one Waveform (or a list of equal-length channels) as WAV.

    PCM16 output clamps to [-1, 1] and rounds half away from zero; float32
    output preserves values bit-exactly.
    """
    channels = [x] if isinstance(x, Waveform) else list(x)
    if not channels:
        raise ShapeError("need at least one channel to write")
    n = len(channels[0].samples)
    rate = channels[0].sample_rate
    for ch in channels[1:]:
        if len(ch.samples) != n or ch.sample_rate != rate:
            raise ShapeError("all channels must share length and sample rate")

    interleaved = np.column_stack([ch.samples for ch in channels]).reshape(-1)
    if depth is SampleDepth.PCM16:
        payload = _quantize_pcm16(interleaved).tobytes()
        tag, bits = _FORMAT_PCM, 16
    elif depth is SampleDepth.FLOAT32:
        payload = interleaved.astype("<f4").tobytes()
        tag, bits = _FORMAT_IEEE_FLOAT, 32
    else:
        raise DomainError(f"unsupported write depth {depth}")

    n_channels = len(channels)
    block_align = n_channels * bits // 8
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        tag,
        n_channels,
        rate,
        rate * block_align,
        block_align,
        bits,
        b"data",
        len(payload),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
