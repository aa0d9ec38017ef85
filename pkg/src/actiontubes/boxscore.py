"""Per-frame person-box scoring for actions and retrieval queries.

Single-box operations are the reference semantics; the *_frame variants
push whole frames through the kernel backend and must produce identical
floats (the batched loops mirror the scalar accumulation order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .geometry import BoundingBox, Detection, FrameDetections, edge_gap
from .spatial import MissingPriorError, SpatialDistribution, SpatialPriorTable


class ScoringError(ValueError):
    """Box cannot be scored under the given configuration."""


@dataclass(frozen=True)
class ScorerConfig:
    """Knobs of the combined box score."""

    neighborhood_px: float = 25.0
    local_k: int = 5
    use_spatial_relations: bool = True
    spatial_fallback: float = 1.0

    def __post_init__(self):
        if self.neighborhood_px < 0:
            raise ScoringError(f"negative neighborhood radius: {self.neighborhood_px}")
        if self.local_k < 0:
            raise ScoringError(f"negative local_k: {self.local_k}")
        if not 0.0 <= self.spatial_fallback <= 1.0:
            raise ScoringError(f"spatial_fallback outside [0, 1]: {self.spatial_fallback}")


@dataclass(frozen=True)
class ScoredBox:
    """A person candidate with its combined action (or query) score."""

    frame_index: int
    person_detection: Detection
    score: float

    @property
    def box(self) -> BoundingBox:
        return self.person_detection.box


@dataclass(frozen=True)
class RetrievalQuery:
    """User-specified object, preposition distribution, and optional size ratio."""

    object_id: int
    relation: SpatialDistribution
    size_ratio: float | None = None

    def __post_init__(self):
        if self.size_ratio is not None and (
            not math.isfinite(self.size_ratio) or self.size_ratio < 0
        ):
            raise ScoringError(f"size ratio must be >= 0, got {self.size_ratio}")


def neighborhood(
    frame: FrameDetections, b: BoundingBox, object_id: int, radius: float
) -> list[Detection]:
    """Detections of the object whose edge gap to ``b`` is at most ``radius``."""
    if radius < 0:
        raise ScoringError(f"negative neighborhood radius: {radius}")
    return [
        d
        for d in frame.objects
        if d.class_id == object_id and edge_gap(b, d.box) <= radius
    ]


def _check_person_box(box: BoundingBox):
    if box.area() <= 0.0:
        raise ScoringError(f"person box {box} has no area")


def score_box(
    b: Detection,
    frame: FrameDetections,
    selected_objects,
    prior_table: SpatialPriorTable | None,
    config: ScorerConfig,
) -> ScoredBox:
    """Combined score of one person candidate.

    ``selected_objects`` is the action's top-k local set as (object id,
    similarity) pairs. Each object contributes similarity * max over its
    neighborhood detections of detection score * spatial match; objects with
    an empty neighborhood contribute 0, and objects missing from the prior
    table fall back to ``config.spatial_fallback`` as their match.
    """
    _check_person_box(b.box)
    total = b.score
    for object_id, psi in selected_objects:
        best = 0.0
        for det in neighborhood(frame, b.box, object_id, config.neighborhood_px):
            if not config.use_spatial_relations:
                phi = 1.0
            else:
                try:
                    prior = prior_table[object_id] if prior_table is not None else None
                except MissingPriorError:
                    prior = None
                if prior is None:
                    phi = config.spatial_fallback
                else:
                    d1 = kernels.quantize_relation(b.box.as_tuple(), det.box.as_tuple())
                    phi = 1.0 - kernels.jsd2(d1, prior.as_array())
            v = det.score * phi
            if v > best:
                best = v
        total += psi * best
    return ScoredBox(frame_index=frame.frame_index, person_detection=b, score=total)


def score_box_query(
    b: Detection,
    frame: FrameDetections,
    query: RetrievalQuery,
    config: ScorerConfig,
) -> ScoredBox:
    """Retrieval score of one person candidate against a user query."""
    if b.box.area() <= 0.0:
        if query.size_ratio is not None:
            raise ScoringError(
                f"person box {b.box} has no area; the size ratio is undefined"
            )
        _check_person_box(b.box)
    parea = b.box.area()
    best = 0.0
    rel = query.relation.as_array()
    for det in neighborhood(frame, b.box, query.object_id, config.neighborhood_px):
        d1 = kernels.quantize_relation(b.box.as_tuple(), det.box.as_tuple())
        v = det.score * (1.0 - kernels.jsd2(d1, rel))
        if query.size_ratio is not None:
            ratio = det.box.area() / parea
            v *= max(0.0, 1.0 - abs(ratio - query.size_ratio))
        if v > best:
            best = v
    return ScoredBox(
        frame_index=frame.frame_index, person_detection=b, score=b.score + best
    )


def _frame_arrays(frame: FrameDetections, class_to_slot):
    """Person and filtered-detection arrays for the batched kernels."""
    n_persons = len(frame.persons)
    pboxes = np.empty((n_persons, 4), dtype=np.float64)
    pscores = np.empty(n_persons, dtype=np.float64)
    for i, det in enumerate(frame.persons):
        pboxes[i] = det.box.as_tuple()
        pscores[i] = det.score
    kept = [d for d in frame.objects if d.class_id in class_to_slot]
    dboxes = np.empty((len(kept), 4), dtype=np.float64)
    dscores = np.empty(len(kept), dtype=np.float64)
    dslots = np.empty(len(kept), dtype=np.int64)
    for i, det in enumerate(kept):
        dboxes[i] = det.box.as_tuple()
        dscores[i] = det.score
        dslots[i] = class_to_slot[det.class_id]
    return pboxes, pscores, dboxes, dscores, dslots


def score_frame(
    frame: FrameDetections,
    selected_objects,
    prior_table: SpatialPriorTable | None,
    config: ScorerConfig,
) -> list[ScoredBox]:
    """Score every person in a frame; equal to mapping score_box over persons."""
    for det in frame.persons:
        _check_person_box(det.box)
    class_to_slot = {obj_id: k for k, (obj_id, _) in enumerate(selected_objects)}
    pboxes, pscores, dboxes, dscores, dslots = _frame_arrays(frame, class_to_slot)
    n_slots = len(selected_objects)
    psi = np.array([s for _, s in selected_objects], dtype=np.float64)
    prior = np.zeros((n_slots, 9), dtype=np.float64)
    has_prior = np.zeros(n_slots, dtype=np.uint8)
    if prior_table is not None:
        for k, (obj_id, _) in enumerate(selected_objects):
            if obj_id in prior_table:
                prior[k] = prior_table[obj_id].as_array()
                has_prior[k] = 1
    scores = kernels.score_frame(
        pboxes,
        pscores,
        dboxes,
        dscores,
        dslots,
        psi,
        prior,
        has_prior,
        float(config.neighborhood_px),
        bool(config.use_spatial_relations),
        float(config.spatial_fallback),
    )
    return [
        ScoredBox(frame_index=frame.frame_index, person_detection=det, score=float(s))
        for det, s in zip(frame.persons, scores)
    ]


def score_frame_query(
    frame: FrameDetections, query: RetrievalQuery, config: ScorerConfig
) -> list[ScoredBox]:
    """Query-score every person in a frame; equal to mapping score_box_query."""
    for det in frame.persons:
        _check_person_box(det.box)
    kept = [d for d in frame.objects if d.class_id == query.object_id]
    pboxes = np.array([d.box.as_tuple() for d in frame.persons], dtype=np.float64).reshape(
        len(frame.persons), 4
    )
    pscores = np.array([d.score for d in frame.persons], dtype=np.float64)
    dboxes = np.array([d.box.as_tuple() for d in kept], dtype=np.float64).reshape(
        len(kept), 4
    )
    dscores = np.array([d.score for d in kept], dtype=np.float64)
    size = float("nan") if query.size_ratio is None else float(query.size_ratio)
    scores = kernels.score_frame_query(
        pboxes,
        pscores,
        dboxes,
        dscores,
        query.relation.as_array(),
        size,
        float(config.neighborhood_px),
    )
    return [
        ScoredBox(frame_index=frame.frame_index, person_detection=det, score=float(s))
        for det, s in zip(frame.persons, scores)
    ]
