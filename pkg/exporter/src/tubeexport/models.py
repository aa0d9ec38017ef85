"""Model adapters.

The detector and classifier interfaces mirror what a pre-trained network
adapter must provide; the shipped implementations are deterministic
palette-based stand-ins that operate on the synthetic sources, so the whole
export path can run and be verified without model weights.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


class ModelLoadError(RuntimeError):
    """The model artifact is missing or malformed."""


def load_palette(path) -> dict:
    """class name -> RGB triple; the model artifact of the palette backends."""
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ModelLoadError(f"palette {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"palette {path}: invalid JSON ({exc})") from None
    palette = {}
    for name, rgb in doc.items():
        if not isinstance(rgb, list) or len(rgb) != 3:
            raise ModelLoadError(f"palette {path}: {name!r} must map to [r, g, b]")
        palette[name] = tuple(int(v) for v in rgb)
    if not palette:
        raise ModelLoadError(f"palette {path}: empty")
    return palette


def resize_nearest(frame: np.ndarray, size: int) -> np.ndarray:
    """Nearest-neighbor resize to size x size (the classifier input grid)."""
    h, w = frame.shape[:2]
    rows = (np.arange(size) * h // size).clip(0, h - 1)
    cols = (np.arange(size) * w // size).clip(0, w - 1)
    return frame[rows][:, cols]


class PaletteDetector:
    """Exact-color detector: one box per palette class present in a frame.

    The confidence is the fill fraction of the matching pixels' bounding
    box, so a clean rectangle scores 1.0 and scattered noise scores low.
    """

    def __init__(self, palette: dict):
        self.palette = palette

    def detect(self, frame: np.ndarray) -> list:
        out = []
        for name in sorted(self.palette):
            color = np.array(self.palette[name], dtype=np.uint8)
            mask = np.all(frame == color, axis=2)
            count = int(mask.sum())
            if count == 0:
                continue
            ys, xs = np.nonzero(mask)
            x1, x2 = int(xs.min()), int(xs.max()) + 1
            y1, y2 = int(ys.min()), int(ys.max()) + 1
            score = count / ((x2 - x1) * (y2 - y1))
            out.append((name, min(1.0, score), [float(x1), float(y1), float(x2), float(y2)]))
        return out


class PaletteClassifier:
    """Softmax over class pixel fractions; a stand-in for a whole-image net."""

    def __init__(self, palette: dict, classes):
        self.classes = list(classes)
        missing = [c for c in self.classes if c not in palette]
        if missing:
            raise ModelLoadError(f"palette lacks colors for classes: {missing}")
        self.colors = np.array([palette[c] for c in self.classes], dtype=np.uint8)

    def scores(self, frame: np.ndarray) -> np.ndarray:
        n_pixels = frame.shape[0] * frame.shape[1]
        fractions = np.array(
            [
                np.all(frame == color, axis=2).sum() / n_pixels
                for color in self.colors
            ],
            dtype=np.float64,
        )
        logits = 10.0 * fractions
        logits -= logits.max()
        exp = np.exp(logits)
        return exp / exp.sum()
