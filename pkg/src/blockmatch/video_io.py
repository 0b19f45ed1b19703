"""Luma-only video loading and synthetic test sequences.

Frames hold the Y plane of 8-bit 4:2:0 video as a ``(height, width)`` uint8
array. Chroma is read past and discarded.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter


class VideoFormatError(ValueError):
    """Raised for malformed or unsupported video input."""


@dataclass(frozen=True)
class Frame:
    luma: np.ndarray
    index: int = 0

    def __post_init__(self):
        luma = np.asarray(self.luma)
        if luma.ndim != 2:
            raise ValueError(f"luma must be 2-D, got shape {luma.shape}")
        if luma.dtype != np.uint8:
            if luma.size and (luma.min() < 0 or luma.max() > 255):
                raise ValueError("luma intensities must lie in [0, 255]")
            luma = luma.astype(np.uint8)
        if self.index < 0:
            raise ValueError("frame index must be >= 0")
        luma = luma.copy() if luma.flags.writeable else luma
        luma.flags.writeable = False
        object.__setattr__(self, "luma", luma)

    @property
    def width(self) -> int:
        return self.luma.shape[1]

    @property
    def height(self) -> int:
        return self.luma.shape[0]


@dataclass(frozen=True)
class Sequence:
    frames: tuple
    width: int
    height: int
    name: str = "sequence"

    def __post_init__(self):
        frames = tuple(self.frames)
        for i, f in enumerate(frames):
            if (f.width, f.height) != (self.width, self.height):
                raise ValueError(
                    f"frame {i} is {f.width}x{f.height}, "
                    f"sequence is {self.width}x{self.height}"
                )
            if f.index != i:
                raise ValueError(f"frame at position {i} carries index {f.index}")
        object.__setattr__(self, "frames", frames)

    def __len__(self):
        return len(self.frames)

    def __getitem__(self, i):
        return self.frames[i]

    def __iter__(self):
        return iter(self.frames)

    def __repr__(self):
        return f"Sequence({self.name!r}, {self.width}x{self.height}, {len(self.frames)} frames)"

    @classmethod
    def from_arrays(cls, arrays, name="sequence"):
        frames = tuple(Frame(np.asarray(a), i) for i, a in enumerate(arrays))
        if frames:
            h, w = frames[0].luma.shape
        else:
            h = w = 0
        return cls(frames, w, h, name)


def _frame_bytes(width: int, height: int) -> int:
    return width * height * 3 // 2


def load_yuv420(path, width: int, height: int, max_frames: int | None = None, name=None) -> Sequence:
    """Read the luma planes of a headerless planar YUV 4:2:0 file.

    A trailing partial frame is dropped with a warning.
    """
    if width <= 0 or height <= 0 or width % 2 or height % 2:
        raise VideoFormatError(f"4:2:0 dimensions must be positive and even, got {width}x{height}")
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    fsize = _frame_bytes(width, height)
    luma_size = width * height
    total = os.path.getsize(path)
    available = total // fsize
    if total % fsize:
        warnings.warn(
            f"{path}: {total % fsize} trailing bytes do not form a whole frame; ignored",
            stacklevel=2,
        )
    count = available if max_frames is None else min(max_frames, available)

    frames = []
    if count > 0:
        with open(path, "rb") as fh:
            for i in range(count):
                buf = fh.read(fsize)
                y = np.frombuffer(buf, dtype=np.uint8, count=luma_size).reshape(height, width)
                frames.append(Frame(y, i))
    return Sequence(tuple(frames), width, height, name or path.stem)


def save_yuv420(seq: Sequence, path) -> None:
    """Write luma planes as planar 4:2:0 with mid-gray (128) chroma."""
    if seq.width % 2 or seq.height % 2:
        raise VideoFormatError("4:2:0 output needs even dimensions")
    chroma = np.full(seq.width * seq.height // 2, 128, dtype=np.uint8).tobytes()
    with open(path, "wb") as fh:
        for f in seq:
            fh.write(f.luma.tobytes())
            fh.write(chroma)


_Y4M_420 = {"420", "420jpeg", "420paldv", "420mpeg2"}


def load_y4m(path, max_frames: int | None = None, name=None) -> Sequence:
    path = Path(path)
    with open(path, "rb") as fh:
        data = fh.read()

    nl = data.find(b"\n")
    if not data.startswith(b"YUV4MPEG2") or nl < 0:
        raise VideoFormatError(f"{path}: missing YUV4MPEG2 signature")
    params = data[:nl].decode("ascii", errors="replace").split()[1:]
    width = height = None
    colorspace = "420"
    for p in params:
        tag, val = p[0], p[1:]
        if tag == "W":
            width = int(val)
        elif tag == "H":
            height = int(val)
        elif tag == "C":
            colorspace = val
    if width is None or height is None:
        raise VideoFormatError(f"{path}: header lacks W/H")
    if colorspace not in _Y4M_420:
        raise VideoFormatError(f"{path}: unsupported colorspace C{colorspace}")

    fsize = _frame_bytes(width, height)
    pos = nl + 1
    frames = []
    while pos < len(data) and (max_frames is None or len(frames) < max_frames):
        end = data.find(b"\n", pos)
        if end < 0 or not data[pos:end].startswith(b"FRAME"):
            raise VideoFormatError(f"{path}: malformed FRAME header at byte {pos}")
        start = end + 1
        if start + fsize > len(data):
            warnings.warn(f"{path}: truncated final frame ignored", stacklevel=2)
            break
        y = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=start)
        frames.append(Frame(y.reshape(height, width), len(frames)))
        pos = start + fsize
    return Sequence(tuple(frames), width, height, name or path.stem)


def save_y4m(seq: Sequence, path, fps="25:1") -> None:
    chroma = np.full(seq.width * seq.height // 2, 128, dtype=np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(f"YUV4MPEG2 W{seq.width} H{seq.height} F{fps} Ip A1:1 C420\n".encode())
        for f in seq:
            fh.write(b"FRAME\n")
            fh.write(f.luma.tobytes())
            fh.write(chroma)


SYNTH_PATTERNS = ("translate", "random-texture-translate", "static")


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic sequence with known global motion.

    ``true_mv`` follows the motion-vector convention used by the estimators:
    a block at ``p`` in frame ``f+1`` is found at ``p + true_mv`` in frame
    ``f``. Keep ``|true_mv|`` within the search range you intend to use.
    """

    pattern: str = "translate"
    true_mv: tuple = (0, 0)
    width: int = 64
    height: int = 64
    frame_count: int = 5
    seed: int = 0
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.pattern not in SYNTH_PATTERNS:
            raise ValueError(f"unknown synth pattern {self.pattern!r}; choose from {SYNTH_PATTERNS}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("synth dimensions must be positive")
        if self.frame_count < 1:
            raise ValueError("frame_count must be >= 1")
        object.__setattr__(self, "true_mv", (int(self.true_mv[0]), int(self.true_mv[1])))


def _texture(rng, h, w, smooth):
    noise = rng.integers(0, 256, size=(h, w)).astype(np.float64)
    if not smooth:
        return noise.astype(np.uint8)
    tex = gaussian_filter(noise, sigma=1.5, mode="reflect")
    lo, hi = tex.min(), tex.max()
    tex = (tex - lo) * (255.0 / max(hi - lo, 1e-9))
    return np.rint(tex).astype(np.uint8)


def synth(spec: SynthSpec) -> Sequence:
    """Generate a sequence by panning a window over a seeded random canvas.

    Frame ``f`` is the canvas crop at offset ``f * true_mv``, so for every
    pixel whose source is inside frame ``f``,
    ``frame[f+1][y, x] == frame[f][y + mvy, x + mvx]``; the remaining
    border strip is fresh texture from the same canvas.
    """
    rng = np.random.default_rng(spec.seed)
    mvx, mvy = spec.true_mv if spec.pattern != "static" else (0, 0)
    span = spec.frame_count - 1
    cw = spec.width + abs(mvx) * span
    ch = spec.height + abs(mvy) * span
    canvas = _texture(rng, ch, cw, smooth=spec.pattern != "random-texture-translate")
    # crop origin for frame 0 so every later crop stays on the canvas
    ox = abs(mvx) * span if mvx < 0 else 0
    oy = abs(mvy) * span if mvy < 0 else 0

    frames = []
    for f in range(spec.frame_count):
        x, y = ox + f * mvx, oy + f * mvy
        frames.append(Frame(canvas[y : y + spec.height, x : x + spec.width], f))
    name = spec.name or f"synth-{spec.pattern}-{mvx},{mvy}-s{spec.seed}"
    return Sequence(tuple(frames), spec.width, spec.height, name)
