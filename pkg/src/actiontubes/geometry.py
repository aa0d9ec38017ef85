"""Shared geometric and vocabulary types plus box operations.

Everything here is immutable after construction and safe to share across
threads. Coordinates are floating-point pixels in the image frame, origin
top-left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .backend import kernels


class GeometryError(ValueError):
    """Invalid box or vocabulary construction."""


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box with x1 <= x2 and y1 <= y2."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        for v in (self.x1, self.y1, self.x2, self.y2):
            if not math.isfinite(v):
                raise GeometryError(f"non-finite box coordinate: {self}")
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise GeometryError(f"box corners out of order: {self}")

    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)

    def shifted(self, dx: float, dy: float) -> "BoundingBox":
        return BoundingBox(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)


@dataclass(frozen=True)
class Detection:
    """One scored class box in one frame."""

    class_id: int
    score: float
    box: BoundingBox

    def __post_init__(self):
        if not math.isfinite(self.score) or not 0.0 <= self.score <= 1.0:
            raise GeometryError(f"detection score outside [0, 1]: {self.score}")
        if self.class_id < 0:
            raise GeometryError(f"negative class id: {self.class_id}")


@dataclass(frozen=True)
class FrameDetections:
    """Person and object detections of a single sampled frame."""

    frame_index: int
    persons: tuple[Detection, ...]
    objects: tuple[Detection, ...]

    def __post_init__(self):
        if self.frame_index < 0:
            raise GeometryError(f"negative frame index: {self.frame_index}")


@dataclass(frozen=True)
class VideoDetections:
    """All sampled frames of one video, sorted by frame index."""

    video_id: str
    frames: tuple[FrameDetections, ...]
    sampled_fps: float = 0.0

    def __post_init__(self):
        indices = [f.frame_index for f in self.frames]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise GeometryError(
                f"frame indices not strictly increasing in video {self.video_id!r}"
            )


VOCABULARY_KINDS = ("local-object", "global-object", "action")

PERSON = "person"


@dataclass(frozen=True)
class Vocabulary:
    """Ordered list of canonical terms; the index is the id."""

    kind: str
    names: tuple[str, ...]
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in VOCABULARY_KINDS:
            raise GeometryError(f"unknown vocabulary kind: {self.kind!r}")
        if len(set(self.names)) != len(self.names):
            raise GeometryError(f"duplicate names in {self.kind} vocabulary")
        if self.kind == "local-object" and PERSON not in self.names:
            raise GeometryError("local-object vocabulary must contain 'person'")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    def __len__(self) -> int:
        return len(self.names)

    def id_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise GeometryError(f"{name!r} not in {self.kind} vocabulary") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @property
    def person_id(self) -> int:
        return self.id_of(PERSON)


@dataclass(frozen=True)
class GroundTruthTube:
    """Reference box chain for one action instance in one video."""

    video_id: str
    action_id: int
    boxes: dict  # frame_index -> BoundingBox

    def __post_init__(self):
        if not self.boxes:
            raise GeometryError(f"empty ground-truth tube in video {self.video_id!r}")


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; degenerate zero-area pairs give 0."""
    return kernels.iou(a.as_tuple(), b.as_tuple())


def edge_gap(a: BoundingBox, b: BoundingBox) -> float:
    """Chebyshev rectangle gap in pixels; 0 when the boxes overlap or touch."""
    return kernels.edge_gap(a.as_tuple(), b.as_tuple())
