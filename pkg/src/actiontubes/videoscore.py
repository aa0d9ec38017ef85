"""Whole-video object scoring, fusion with tube scores, and classification."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linking import ActionTube
from .semantic import ActionObjectWeights


class VideoScoreError(ValueError):
    """Invalid score vector or fusion configuration."""


@dataclass(frozen=True, eq=False)
class GlobalObjectScores:
    """Per-video probability vector over the global-object vocabulary."""

    video_id: str
    probabilities: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=np.float64)
        object.__setattr__(self, "probabilities", probs)
        if probs.ndim != 1:
            raise VideoScoreError(f"score vector for {self.video_id!r} is not 1-D")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise VideoScoreError(
                f"negative or non-finite global score in {self.video_id!r}"
            )
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-3:
            raise VideoScoreError(
                f"global scores for {self.video_id!r} sum to {total}, expected 1"
            )


@dataclass(frozen=True)
class FusionConfig:
    use_local: bool = True
    use_global: bool = True
    global_k: int = 100

    def __post_init__(self):
        if not (self.use_local or self.use_global):
            raise VideoScoreError("at least one of use_local/use_global must be set")
        if self.global_k < 1:
            raise VideoScoreError(f"global_k must be >= 1: {self.global_k}")


def video_score(v: GlobalObjectScores, action_id: int, weights: ActionObjectWeights) -> float:
    """Weighted sum of the video's probabilities over the action's top-k objects."""
    try:
        ranked = weights.per_action[action_id]
    except KeyError:
        raise VideoScoreError(f"no object weights for action id {action_id}") from None
    n = v.probabilities.shape[0]
    total = 0.0
    for object_id, weight in ranked:
        if object_id >= n:
            raise VideoScoreError(
                f"object id {object_id} outside the {n}-entry score vector "
                f"of video {v.video_id!r}"
            )
        total += weight * float(v.probabilities[object_id])
    return total


def fuse_tube(t: ActionTube, v_score: float) -> float:
    """Tube score plus the corresponding video's global score."""
    if not math.isfinite(v_score):
        raise VideoScoreError(f"non-finite video score: {v_score}")
    return t.tube_score + v_score


def classify(tubes_per_action, video_scores_per_action, actions) -> int:
    """Action with the highest fused score for one video.

    The fused score per action is the best tube score (0 when the action has
    no tubes) plus the action's video score. Exact ties resolve to the lowest
    action id.
    """
    actions = list(actions)
    if not actions:
        raise VideoScoreError("classification needs at least one action")
    best_action = None
    best_score = None
    for action_id in sorted(actions):
        tubes = tubes_per_action.get(action_id, [])
        tube_term = max((t.tube_score for t in tubes), default=0.0)
        fused = tube_term + video_scores_per_action.get(action_id, 0.0)
        if best_score is None or fused > best_score:
            best_action = action_id
            best_score = fused
    return best_action
