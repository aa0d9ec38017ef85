"""Linking scored boxes into spatio-temporal action tubes.

A dynamic program over per-frame candidate lists finds the admissible path
with the highest total link score; repeated extraction with box removal
yields up to T tubes per video. Tie-breaking is fully deterministic so the
output is reproducible across runs and thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .boxscore import ScoredBox
from .geometry import BoundingBox


class LinkingError(ValueError):
    """No linkable boxes or inconsistent link arguments."""


@dataclass(frozen=True)
class LinkerConfig:
    min_link_iou: float = 0.1
    min_link_score: float = 1.0
    tubes_per_video: int = 3

    def __post_init__(self):
        if not 0.0 <= self.min_link_iou <= 1.0:
            raise LinkingError(f"min_link_iou outside [0, 1]: {self.min_link_iou}")
        if self.tubes_per_video < 1:
            raise LinkingError(f"tubes_per_video must be >= 1: {self.tubes_per_video}")


@dataclass(frozen=True)
class ActionTube:
    """A per-frame box chain with scores over consecutive sampled frames."""

    video_id: str
    elements: tuple  # of (frame_index, BoundingBox, box_score)
    tube_score: float
    action_id: int | None = None

    def __post_init__(self):
        if not self.elements:
            raise LinkingError(f"empty tube in video {self.video_id!r}")
        indices = [e[0] for e in self.elements]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise LinkingError(f"tube frame indices not increasing: {indices}")
        if abs(self.tube_score - _mean_score(self.elements)) > 1e-9:
            raise LinkingError("tube_score does not equal the mean box score")

    @classmethod
    def build(cls, video_id, elements, action_id=None) -> "ActionTube":
        elements = tuple(elements)
        if not elements:
            raise LinkingError(f"empty tube in video {video_id!r}")
        return cls(
            video_id=video_id,
            elements=elements,
            tube_score=_mean_score(elements),
            action_id=action_id,
        )

    def boxes_by_frame(self) -> dict:
        return {e[0]: e[1] for e in self.elements}


def _mean_score(elements) -> float:
    return math.fsum(e[2] for e in elements) / len(elements)


def tube_score(t: ActionTube) -> float:
    """Arithmetic mean of the tube's box scores."""
    if not t.elements:
        raise LinkingError("cannot score an empty tube")
    return _mean_score(t.elements)


def link_score(b1: ScoredBox, b2: ScoredBox) -> float:
    """Sum of both box scores plus their spatial overlap.

    The boxes must come from consecutive sampled frames (index difference
    exactly one in the sample-ordinal convention).
    """
    if b2.frame_index - b1.frame_index != 1:
        raise LinkingError(
            f"boxes from frames {b1.frame_index} and {b2.frame_index} are not consecutive"
        )
    return b1.score + b2.score + kernels.iou(b1.box.as_tuple(), b2.box.as_tuple())


@dataclass(frozen=True)
class _Path:
    """DP state: one candidate path ending at a known box."""

    total: float
    length: int
    start: int
    boxes: tuple  # box index per frame, start..end
    single_score: float  # box score, meaningful for length-1 paths only


def _better(a: _Path, b: _Path) -> bool:
    """Deterministic path preference.

    Higher total link score first, then longer, then (for two single-box
    paths) the higher-scoring box, then the earlier start frame, then the
    lexicographically smaller index sequence.
    """
    if a.total != b.total:
        return a.total > b.total
    if a.length != b.length:
        return a.length > b.length
    if a.length == 1 and a.single_score != b.single_score:
        return a.single_score > b.single_score
    if a.start != b.start:
        return a.start < b.start
    return a.boxes < b.boxes


def _best_state(frames, config: LinkerConfig) -> _Path | None:
    """Best admissible path over per-frame ScoredBox lists (None if no boxes)."""
    best: _Path | None = None
    prev_states: list = []
    prev_frame: list = []
    prev_boxes = None
    for t, frame in enumerate(frames):
        cur_states = []
        cur_boxes = (
            np.array([b.box.as_tuple() for b in frame], dtype=np.float64).reshape(
                len(frame), 4
            )
            if frame
            else None
        )
        overlaps = (
            kernels.pairwise_iou(prev_boxes, cur_boxes)
            if prev_boxes is not None and cur_boxes is not None and len(frame)
            else None
        )
        for i, box in enumerate(frame):
            state = _Path(
                total=0.0, length=1, start=t, boxes=(i,), single_score=box.score
            )
            if overlaps is not None:
                for j, prev in enumerate(prev_frame):
                    ov = overlaps[j, i]
                    if ov <= config.min_link_iou:
                        continue
                    if prev.score + box.score < config.min_link_score:
                        continue
                    base = prev_states[j]
                    cand = _Path(
                        total=base.total + prev.score + box.score + ov,
                        length=base.length + 1,
                        start=base.start,
                        boxes=base.boxes + (i,),
                        single_score=float("nan"),
                    )
                    if _better(cand, state):
                        state = cand
            cur_states.append(state)
            if best is None or _better(state, best):
                best = state
        prev_states = cur_states
        prev_frame = frame
        prev_boxes = cur_boxes
    return best


def best_path(frames, config: LinkerConfig, video_id: str = "", action_id=None) -> ActionTube:
    """The maximum-total-link-score admissible path as a tube.

    A single best-scoring box is a valid length-1 result when no admissible
    transition exists anywhere.
    """
    state = _best_state(frames, config)
    if state is None:
        raise LinkingError("no boxes to link")
    elements = []
    for offset, box_idx in enumerate(state.boxes):
        sb = frames[state.start + offset][box_idx]
        elements.append((sb.frame_index, sb.box, sb.score))
    return ActionTube.build(video_id, elements, action_id=action_id)


def extract_tubes(frames, config: LinkerConfig, video_id: str = "", action_id=None):
    """Repeatedly extract the best path, removing its boxes, up to T tubes."""
    remaining = [list(frame) for frame in frames]
    tubes = []
    while len(tubes) < config.tubes_per_video:
        state = _best_state(remaining, config)
        if state is None:
            break
        elements = []
        for offset, box_idx in enumerate(state.boxes):
            sb = remaining[state.start + offset][box_idx]
            elements.append((sb.frame_index, sb.box, sb.score))
        for offset, box_idx in enumerate(state.boxes):
            del remaining[state.start + offset][box_idx]
        tubes.append(ActionTube.build(video_id, elements, action_id=action_id))
    return tubes
