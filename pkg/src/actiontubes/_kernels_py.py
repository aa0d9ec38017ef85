"""Pure NumPy/Python kernel backend.

Twin of the compiled ``_kernels`` extension: same functions, same argument
conventions, same accumulation order, so either backend can serve the rest
of the package. Boxes are ``[x1, y1, x2, y2]`` float arrays; distributions
are length-9 float arrays over the preposition grid.
"""

from __future__ import annotations

import math

import numpy as np

NAME = "python"


def iou(a, b) -> float:
    """Intersection over union of two boxes; 0.0 for degenerate pairs."""
    ix = min(a[2], b[2]) - max(a[0], b[0])
    iy = min(a[3], b[3]) - max(a[1], b[1])
    inter = max(0.0, ix) * max(0.0, iy)
    area_a = max(0.0, a[2] - a[0]) * max(0.0, a[3] - a[1])
    area_b = max(0.0, b[2] - b[0]) * max(0.0, b[3] - b[1])
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def edge_gap(a, b) -> float:
    """Chebyshev rectangle gap: max over axes of the inter-box distance.

    Per axis the gap is max(0, larger_min - smaller_max); overlapping or
    touching boxes give 0.
    """
    gx = max(0.0, max(a[0], b[0]) - min(a[2], b[2]))
    gy = max(0.0, max(a[1], b[1]) - min(a[3], b[3]))
    return max(gx, gy)


def _interval_split(lo: float, hi: float, cut1: float, cut2: float):
    """Overlap lengths of [lo, hi] with (-inf, cut1], [cut1, cut2], [cut2, inf)."""
    left = max(0.0, min(hi, cut1) - lo)
    mid = max(0.0, min(hi, cut2) - max(lo, cut1))
    right = max(0.0, hi - max(lo, cut2))
    return left, mid, right


def quantize_relation(person, obj) -> np.ndarray:
    """Distribute the object box's area over the 3x3 grid anchored on the person box.

    Cell order is row-major top to bottom: above-left, above, above-right,
    left, on, right, below-left, below, below-right. A zero-area object box
    degenerates to a one-hot on the cell containing its center.
    """
    px1, py1, px2, py2 = person[0], person[1], person[2], person[3]
    ox1, oy1, ox2, oy2 = obj[0], obj[1], obj[2], obj[3]
    out = np.zeros(9, dtype=np.float64)
    area = (ox2 - ox1) * (oy2 - oy1)
    if area <= 0.0:
        cx = 0.5 * (ox1 + ox2)
        cy = 0.5 * (oy1 + oy2)
        col = 0 if cx < px1 else (1 if cx <= px2 else 2)
        row = 0 if cy < py1 else (1 if cy <= py2 else 2)
        out[row * 3 + col] = 1.0
        return out
    wl, wm, wr = _interval_split(ox1, ox2, px1, px2)
    ht, hm, hb = _interval_split(oy1, oy2, py1, py2)
    widths = (wl, wm, wr)
    heights = (ht, hm, hb)
    for r in range(3):
        for c in range(3):
            out[r * 3 + c] = heights[r] * widths[c] / area
    return out


def jsd2(p, q) -> float:
    """Jensen-Shannon divergence with base-2 logs, clamped into [0, 1].

    0 * log 0 terms contribute 0; no smoothing is applied.
    """
    kl_p = 0.0
    kl_q = 0.0
    for i in range(len(p)):
        m = 0.5 * (p[i] + q[i])
        if p[i] > 0.0:
            kl_p += p[i] * math.log2(p[i] / m)
        if q[i] > 0.0:
            kl_q += q[i] * math.log2(q[i] / m)
    v = 0.5 * kl_p + 0.5 * kl_q
    return min(1.0, max(0.0, v))


def pairwise_iou(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """IoU matrix between box arrays of shape (N, 4) and (M, 4)."""
    n, m = a.shape[0], b.shape[0]
    out = np.empty((n, m), dtype=np.float64)
    for i in range(n):
        for j in range(m):
            out[i, j] = iou(a[i], b[j])
    return out


def score_frame(
    person_boxes: np.ndarray,
    person_scores: np.ndarray,
    det_boxes: np.ndarray,
    det_scores: np.ndarray,
    det_slot: np.ndarray,
    psi: np.ndarray,
    prior: np.ndarray,
    has_prior: np.ndarray,
    radius: float,
    use_spatial: bool,
    fallback_phi: float,
) -> np.ndarray:
    """Combined action score for every person box in one frame.

    score[p] = person_scores[p] + sum_k psi[k] * best_k, where best_k is the
    max over detections of slot k within ``radius`` (edge gap) of person p of
    det_score * phi, and phi is the spatial-relation match against prior[k]
    (``fallback_phi`` when has_prior[k] is 0, 1.0 when use_spatial is off).
    An empty neighborhood contributes 0 for that slot.
    """
    n_persons = person_boxes.shape[0]
    n_dets = det_boxes.shape[0]
    n_slots = psi.shape[0]
    out = np.empty(n_persons, dtype=np.float64)
    for p in range(n_persons):
        pbox = person_boxes[p]
        total = float(person_scores[p])
        for k in range(n_slots):
            best = 0.0
            for d in range(n_dets):
                if det_slot[d] != k:
                    continue
                if edge_gap(pbox, det_boxes[d]) > radius:
                    continue
                if not use_spatial:
                    phi = 1.0
                elif has_prior[k]:
                    d1 = quantize_relation(pbox, det_boxes[d])
                    phi = 1.0 - jsd2(d1, prior[k])
                else:
                    phi = fallback_phi
                v = det_scores[d] * phi
                if v > best:
                    best = v
            total += psi[k] * best
        out[p] = total
    return out


def score_frame_query(
    person_boxes: np.ndarray,
    person_scores: np.ndarray,
    det_boxes: np.ndarray,
    det_scores: np.ndarray,
    relation: np.ndarray,
    size_ratio: float,
    radius: float,
) -> np.ndarray:
    """Retrieval score for every person box in one frame.

    Detections are pre-filtered to the queried object class. ``size_ratio``
    is the requested object/person area ratio, or NaN when no size was
    specified; the size term is max(0, 1 - |ratio - size_ratio|).
    """
    n_persons = person_boxes.shape[0]
    n_dets = det_boxes.shape[0]
    has_size = not math.isnan(size_ratio)
    out = np.empty(n_persons, dtype=np.float64)
    for p in range(n_persons):
        pbox = person_boxes[p]
        parea = (pbox[2] - pbox[0]) * (pbox[3] - pbox[1])
        best = 0.0
        for d in range(n_dets):
            if edge_gap(pbox, det_boxes[d]) > radius:
                continue
            d1 = quantize_relation(pbox, det_boxes[d])
            v = det_scores[d] * (1.0 - jsd2(d1, relation))
            if has_size:
                dbox = det_boxes[d]
                ratio = (dbox[2] - dbox[0]) * (dbox[3] - dbox[1]) / parea
                v *= max(0.0, 1.0 - abs(ratio - size_ratio))
            if v > best:
                best = v
        out[p] = float(person_scores[p]) + best
    return out
