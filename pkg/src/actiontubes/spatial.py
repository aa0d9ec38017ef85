"""Spatial preposition priors.

Builds per-object distributions over a 9-cell preposition grid from an
annotation corpus and scores how well an observed person/object box pair
matches the prior (or a user-specified) distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .geometry import BoundingBox

PREPOSITIONS = (
    "above-left",
    "above",
    "above-right",
    "left",
    "on",
    "right",
    "below-left",
    "below",
    "below-right",
)

_SUM_TOL = 1e-6


class SpatialPriorError(ValueError):
    """Invalid distribution or grid construction."""


class MissingPriorError(KeyError):
    """No gathered distribution for the requested object."""


@dataclass(frozen=True)
class SpatialDistribution:
    """Nonnegative weights over the 9 prepositions, summing to 1."""

    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) != len(PREPOSITIONS):
            raise SpatialPriorError(f"expected 9 weights, got {len(self.weights)}")
        if any(not math.isfinite(w) or w < 0.0 for w in self.weights):
            raise SpatialPriorError(f"negative or non-finite weight in {self.weights}")
        if abs(sum(self.weights) - 1.0) > _SUM_TOL:
            raise SpatialPriorError(f"weights sum to {sum(self.weights)}, not 1")

    @classmethod
    def from_array(cls, arr) -> "SpatialDistribution":
        return cls(tuple(float(v) for v in arr))

    @classmethod
    def one_hot(cls, preposition: str) -> "SpatialDistribution":
        try:
            i = PREPOSITIONS.index(preposition)
        except ValueError:
            raise SpatialPriorError(f"unknown preposition {preposition!r}") from None
        return cls(tuple(1.0 if j == i else 0.0 for j in range(9)))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)

    def __getitem__(self, preposition: str) -> float:
        return self.weights[PREPOSITIONS.index(preposition)]


@dataclass(frozen=True)
class AnnotationImage:
    """Person and object box annotations of one corpus image."""

    image_id: str
    person_boxes: tuple[BoundingBox, ...]
    object_boxes: tuple[tuple[int, BoundingBox], ...]  # (local-object id, box)


@dataclass(frozen=True)
class SpatialPriorTable:
    """Gathered person-relative distribution per local object."""

    entries: dict  # object id -> SpatialDistribution
    pair_counts: dict  # object id -> aggregated pair count

    def __post_init__(self):
        for obj_id, count in self.pair_counts.items():
            if count < 1:
                raise SpatialPriorError(f"pair count {count} for object {obj_id}")

    def __contains__(self, object_id: int) -> bool:
        return object_id in self.entries

    def __getitem__(self, object_id: int) -> SpatialDistribution:
        try:
            return self.entries[object_id]
        except KeyError:
            raise MissingPriorError(object_id) from None


def quantize_relation(person: BoundingBox, obj: BoundingBox) -> SpatialDistribution:
    """Distribute the object box's area over the 3x3 grid anchored on the person box.

    The grid's center cell is exactly the person box; outer cells are
    unbounded. Each cell receives the fraction of the object box's area that
    falls inside it. A zero-area object box becomes a one-hot on the cell
    containing its center.
    """
    if person.area() <= 0.0:
        raise SpatialPriorError(
            f"degenerate person box {person} cannot anchor the preposition grid"
        )
    arr = kernels.quantize_relation(person.as_tuple(), obj.as_tuple())
    return SpatialDistribution.from_array(arr)


def jsd2(p: SpatialDistribution, q: SpatialDistribution) -> float:
    """Base-2 Jensen-Shannon divergence between two grid distributions, in [0, 1]."""
    return kernels.jsd2(p.as_array(), q.as_array())


def spatial_match(
    person_box: BoundingBox,
    object_box: BoundingBox,
    object_id: int,
    table: SpatialPriorTable,
) -> float:
    """1 minus the divergence between the observed relation and the object's prior."""
    prior = table[object_id]
    return 1.0 - jsd2(quantize_relation(person_box, object_box), prior)


def query_match(
    person_box: BoundingBox, object_box: BoundingBox, r: SpatialDistribution
) -> float:
    """1 minus the divergence between the observed relation and a requested one."""
    return 1.0 - jsd2(quantize_relation(person_box, object_box), r)


def build_prior_table(corpus) -> SpatialPriorTable:
    """Aggregate person-object pair relations over an annotation corpus.

    Every (person box, object box) pair co-occurring in the same image
    contributes one quantized distribution; the table entry is the arithmetic
    mean of an object's pair distributions, renormalized. Accumulation uses
    exact summation so the result is independent of corpus order. Objects
    with no co-occurring person are absent from the table.
    """
    per_object: dict[int, list] = {}
    for image in corpus:
        if not image.person_boxes:
            continue
        for obj_id, obj_box in image.object_boxes:
            for person_box in image.person_boxes:
                d = quantize_relation(person_box, obj_box)
                per_object.setdefault(obj_id, []).append(d.weights)
    entries = {}
    counts = {}
    for obj_id, dists in per_object.items():
        total = [math.fsum(d[i] for d in dists) for i in range(9)]
        norm = math.fsum(total)
        entries[obj_id] = SpatialDistribution(tuple(v / norm for v in total))
        counts[obj_id] = len(dists)
    return SpatialPriorTable(entries=entries, pair_counts=counts)
