"""Video sources: synthetic scene renderings and .npy frame directories.

Real deployments plug in a decoder behind the same three attributes
(``video_id``, ``duration``, ``get_frame``); the shipped sources cover
deterministic desk-scale runs without a video stack.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


class VideoDecodeError(RuntimeError):
    """The source cannot produce frames."""


class SyntheticVideo:
    """Scene description rendered on demand: colored rectangles on black.

    Items move linearly (``dx``/``dy`` pixels per second) and may carry a
    visibility window (``from``/``until`` seconds). Colors come from the
    palette, keyed by the item's class.
    """

    def __init__(self, record: dict, palette: dict):
        self.video_id = record["video_id"]
        self.duration = float(record.get("duration", 1.0))
        self.width = int(record.get("width", 160))
        self.height = int(record.get("height", 120))
        self.keyframes = record.get("keyframes")
        self.broken = bool(record.get("broken", False))
        self.items = record.get("items", [])
        self.palette = palette
        for item in self.items:
            if item["class"] not in palette:
                raise VideoDecodeError(
                    f"video {self.video_id!r}: no palette color for {item['class']!r}"
                )

    def get_frame(self, t: float) -> np.ndarray:
        if self.broken:
            raise VideoDecodeError(f"video {self.video_id!r} cannot be decoded")
        frame = np.zeros((self.height, self.width, 3), dtype=np.uint8)
        for item in self.items:
            if t < item.get("from", 0.0) or t >= item.get("until", math.inf):
                continue
            x = item["x"] + item.get("dx", 0.0) * t
            y = item["y"] + item.get("dy", 0.0) * t
            x1 = max(0, int(round(x)))
            y1 = max(0, int(round(y)))
            x2 = min(self.width, int(round(x + item["w"])))
            y2 = min(self.height, int(round(y + item["h"])))
            if x2 > x1 and y2 > y1:
                frame[y1:y2, x1:x2] = self.palette[item["class"]]
        return frame


class NpyDirVideo:
    """Frames stored as frame_<k>.npy next to a meta.json holding the fps."""

    def __init__(self, video_id: str, directory, fps: float):
        self.video_id = video_id
        self.directory = Path(directory)
        self.fps = float(fps)
        self.keyframes = None
        self._paths = sorted(self.directory.glob("frame_*.npy"))
        if not self._paths:
            raise VideoDecodeError(f"no frame_*.npy files in {directory}")
        self.duration = len(self._paths) / self.fps

    def get_frame(self, t: float) -> np.ndarray:
        index = min(int(t * self.fps), len(self._paths) - 1)
        frame = np.load(self._paths[index])
        if frame.ndim != 3 or frame.shape[2] != 3:
            raise VideoDecodeError(f"{self._paths[index]} is not an HxWx3 array")
        return frame


def load_manifest(path, palette: dict) -> list:
    """Sources for every video record of a manifest file."""
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise VideoDecodeError(f"manifest {path} not found") from None
    except json.JSONDecodeError as exc:
        raise VideoDecodeError(f"manifest {path}: invalid JSON ({exc})") from None
    records = doc.get("videos")
    if not isinstance(records, list) or not records:
        raise VideoDecodeError(f"manifest {path}: missing videos list")
    sources = []
    base = Path(path).resolve().parent
    for record in records:
        if "frames_dir" in record:
            sources.append(
                NpyDirVideo(
                    record["video_id"], base / record["frames_dir"], record.get("fps", 25.0)
                )
            )
        else:
            sources.append(SyntheticVideo(record, palette))
    return sources
