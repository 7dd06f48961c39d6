"""Minimal 16-bit PCM mono WAV reader/writer.

Layout written (all little-endian)::

    0  'RIFF'   4  riff size (file size - 8)   8  'WAVE'
    12 'fmt '   16 16 (chunk size)   20 format 1   22 channels 1
    24 sample rate   28 byte rate   32 block align 2   34 bits 16
    36 'data'   40 data size   44 samples...
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .dsp import Waveform
from .errors import MalformedWav

PCM_FULL_SCALE = 32767


def _quantize(samples: np.ndarray) -> np.ndarray:
    q = np.round(np.asarray(samples, dtype=np.float64) * PCM_FULL_SCALE)
    return np.clip(q, -32768, 32767).astype("<i2")


def encode(w: Waveform) -> bytes:
    pcm = _quantize(w.samples).tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(pcm),
        b"WAVE",
        b"fmt ",
        16,
        1,
        1,
        w.sample_rate_hz,
        w.sample_rate_hz * 2,
        2,
        16,
        b"data",
        len(pcm),
    )
    return header + pcm


def wav_write(w: Waveform, path) -> None:
    data = encode(w)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def decode(data: bytes) -> Waveform:
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWav("missing RIFF/WAVE signature")
    fmt = None
    pcm = None
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise MalformedWav(f"chunk {cid!r} truncated")
        if cid == b"fmt ":
            if size < 16:
                raise MalformedWav("fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data":
            pcm = body
        # chunks are word aligned
        pos += 8 + size + (size & 1)
    if fmt is None:
        raise MalformedWav("no fmt chunk")
    if pcm is None:
        raise MalformedWav("no data chunk")
    code, channels, rate, _, _, bits = fmt
    if code != 1 or channels != 1 or bits != 16:
        raise MalformedWav(
            f"unsupported format: code={code} channels={channels} bits={bits}"
        )
    if rate <= 0:
        raise MalformedWav("sample rate must be positive")
    if len(pcm) % 2:
        raise MalformedWav("odd data chunk length for 16-bit samples")
    samples = np.frombuffer(pcm, dtype="<i2").astype(np.float64) / PCM_FULL_SCALE
    return Waveform(rate, samples)


def wav_read(path) -> Waveform:
    with open(path, "rb") as fh:
        return decode(fh.read())
