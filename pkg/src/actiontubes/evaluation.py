"""Localization and classification metrics.

Spatio-temporal IoU, ranked-list matching with the one-detection-per-instance
claim rule, average precision (non-interpolated sum of precisions), ROC-style
AUC with FPR normalized by total false positives, frame-level AP, accuracy,
and seeded random-subset evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .geometry import GroundTruthTube
from .linking import ActionTube


class EvaluationError(ValueError):
    """Metric arguments are inconsistent or empty."""


@dataclass(frozen=True)
class EvalConfig:
    overlap_thresholds: tuple = (0.1, 0.2, 0.3, 0.4, 0.5)
    subset_runs: int = 5
    rng_seed: int = 0

    def __post_init__(self):
        if not self.overlap_thresholds:
            raise EvaluationError("at least one overlap threshold required")
        if any(not 0.0 < t <= 1.0 for t in self.overlap_thresholds):
            raise EvaluationError(
                f"thresholds must lie in (0, 1]: {self.overlap_thresholds}"
            )
        if self.subset_runs < 1:
            raise EvaluationError(f"subset_runs must be >= 1: {self.subset_runs}")


@dataclass(frozen=True)
class RankedEntry:
    tube: ActionTube
    score: float
    video_id: str


@dataclass(frozen=True)
class RankedDetectionList:
    """Per-action ranked tubes: score descending, ties by video then input order."""

    per_action: dict  # action id -> tuple[RankedEntry, ...]

    @classmethod
    def from_unsorted(cls, per_action) -> "RankedDetectionList":
        ranked = {}
        for action_id, entries in per_action.items():
            entries = [
                e if isinstance(e, RankedEntry) else RankedEntry(e[0], e[1], e[0].video_id)
                for e in entries
            ]
            ranked[action_id] = tuple(
                sorted(entries, key=lambda e: (-e.score, e.video_id))
            )
        return cls(per_action=ranked)


def _st_iou_maps(a_boxes: dict, b_boxes: dict) -> float:
    frames = set(a_boxes) | set(b_boxes)
    if not frames:
        return 0.0
    total = 0.0
    for f in frames:
        if f in a_boxes and f in b_boxes:
            total += kernels.iou(a_boxes[f].as_tuple(), b_boxes[f].as_tuple())
    return total / len(frames)


def st_iou(a: ActionTube, b: GroundTruthTube) -> float:
    """Mean per-frame IoU over the union of both tubes' frame spans.

    Frames where either tube is absent contribute 0.
    """
    if a.video_id != b.video_id:
        raise EvaluationError(
            f"tubes from different videos: {a.video_id!r} vs {b.video_id!r}"
        )
    return _st_iou_maps(a.boxes_by_frame(), b.boxes)


def match_tubes(ranked, gts, tau: float):
    """TP/FP labels for a ranked tube list against one action's ground truth.

    A tube is a true positive when its video contains the action, its best
    spatio-temporal overlap with a not-yet-claimed instance reaches ``tau``,
    and that instance is then claimed. Everything else is a false positive.
    """
    if not 0.0 < tau <= 1.0:
        raise EvaluationError(f"threshold outside (0, 1]: {tau}")
    by_video: dict = {}
    for gt in gts:
        by_video.setdefault(gt.video_id, []).append(gt)
    claimed: set = set()
    labels = []
    for entry in ranked:
        candidates = by_video.get(entry.video_id, [])
        if not candidates:
            labels.append(False)
            continue
        best_overlap = -1.0
        best_gt = None
        for gt in candidates:
            if id(gt) in claimed:
                continue
            ov = st_iou(entry.tube, gt)
            if ov > best_overlap:
                best_overlap = ov
                best_gt = gt
        if best_gt is not None and best_overlap >= tau:
            claimed.add(id(best_gt))
            labels.append(True)
        else:
            labels.append(False)
    return labels


def average_precision(labels, num_gt: int) -> float:
    """Non-interpolated AP: sum of precisions at true-positive ranks over num_gt."""
    if num_gt < 1:
        raise EvaluationError("average precision needs at least one ground truth")
    tp = 0
    total = 0.0
    for k, is_tp in enumerate(labels, start=1):
        if is_tp:
            tp += 1
            total += tp / k
    return total / num_gt


def auc(labels, num_gt: int) -> float:
    """Area under TPR vs FPR over the ranked list, trapezoidal.

    FPR is normalized by the total false-positive count; a ranking without
    false positives scores its final TPR (the curve is a horizontal strip).
    """
    if num_gt < 1:
        raise EvaluationError("AUC needs at least one ground truth")
    total_fp = sum(1 for x in labels if not x)
    tp = 0
    if total_fp == 0:
        return sum(1 for x in labels if x) / num_gt
    area = 0.0
    tpr = 0.0
    for is_tp in labels:
        if is_tp:
            tp += 1
            tpr = tp / num_gt
        else:
            area += tpr / total_fp
    return area


def mean_ap(per_action_ap) -> float:
    """Unweighted mean over actions; actions without ground truth are absent."""
    values = list(per_action_ap.values() if isinstance(per_action_ap, dict) else per_action_ap)
    if not values:
        raise EvaluationError("no actions with ground truth to average")
    return float(sum(values) / len(values))


def frame_ap(predictions, gt_boxes, tau: float = 0.5) -> float:
    """AP of frame-level box predictions for one action.

    ``predictions`` are (video_id, frame_index, box, score) records;
    ``gt_boxes`` maps (video_id, frame_index) to the frame's instance boxes.
    The claim rule applies per ground-truth box with plain spatial IoU.
    """
    if not 0.0 < tau <= 1.0:
        raise EvaluationError(f"threshold outside (0, 1]: {tau}")
    num_gt = sum(len(v) for v in gt_boxes.values())
    if num_gt < 1:
        raise EvaluationError("frame AP needs at least one ground-truth box")
    order = sorted(
        range(len(predictions)),
        key=lambda i: (-predictions[i][3], predictions[i][0], predictions[i][1], i),
    )
    claimed: set = set()
    labels = []
    for i in order:
        video_id, frame_index, box, _score = predictions[i]
        best = -1.0
        best_key = None
        for j, gt in enumerate(gt_boxes.get((video_id, frame_index), [])):
            key = (video_id, frame_index, j)
            if key in claimed:
                continue
            ov = kernels.iou(box.as_tuple(), gt.as_tuple())
            if ov > best:
                best = ov
                best_key = key
        if best_key is not None and best >= tau:
            claimed.add(best_key)
            labels.append(True)
        else:
            labels.append(False)
    return average_precision(labels, num_gt)


def accuracy(predictions: dict, labels: dict) -> float:
    """Fraction of videos whose predicted action matches the label exactly."""
    if set(predictions) != set(labels):
        raise EvaluationError("prediction and label video sets differ")
    if not labels:
        raise EvaluationError("no videos to evaluate")
    hits = sum(1 for v, a in labels.items() if predictions[v] == a)
    return hits / len(labels)


def subset_eval(labels: dict, scores: dict, actions, n: int, runs: int, seed: int):
    """Mean and population std of accuracy over seeded random action subsets.

    Each run samples ``n`` actions without replacement, restricts the videos
    to those labeled inside the sample, and classifies by arg-max of the
    fused scores over the sampled actions (ties to the lowest action id).
    Seeding is per run, so results do not depend on scheduling.
    """
    actions = sorted(actions)
    if n > len(actions):
        raise EvaluationError(f"subset size {n} exceeds {len(actions)} actions")
    if n < 1 or runs < 1:
        raise EvaluationError("subset size and run count must be >= 1")
    accuracies = []
    for run in range(runs):
        rng = np.random.default_rng([int(seed), run])
        subset = sorted(int(a) for a in rng.choice(actions, size=n, replace=False))
        videos = [v for v in sorted(labels) if labels[v] in subset]
        if not videos:
            raise EvaluationError(
                f"run {run}: no videos labeled with the sampled actions {subset}"
            )
        hits = 0
        for v in videos:
            per_action = scores.get(v, {})
            best_action = None
            best = -math.inf
            for a in subset:
                s = per_action.get(a, 0.0)
                if s > best:
                    best = s
                    best_action = a
            if best_action == labels[v]:
                hits += 1
        accuracies.append(hits / len(videos))
    mean = float(np.mean(accuracies))
    std = float(np.std(accuracies))
    return mean, std
