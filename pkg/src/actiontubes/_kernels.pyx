# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Mirrors ``_kernels_py`` function for function; the scoring loops and the
pairwise IoU matrix dominate per-video runtime, everything else in the
package is orchestration.
"""

from libc.math cimport fabs, isnan, log2

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


cdef inline double _iou4(double ax1, double ay1, double ax2, double ay2,
                         double bx1, double by1, double bx2, double by2) nogil:
    cdef double ix = (ax2 if ax2 < bx2 else bx2) - (ax1 if ax1 > bx1 else bx1)
    cdef double iy = (ay2 if ay2 < by2 else by2) - (ay1 if ay1 > by1 else by1)
    cdef double inter = (ix if ix > 0.0 else 0.0) * (iy if iy > 0.0 else 0.0)
    cdef double wa = ax2 - ax1
    cdef double ha = ay2 - ay1
    cdef double wb = bx2 - bx1
    cdef double hb = by2 - by1
    cdef double area_a = (wa if wa > 0.0 else 0.0) * (ha if ha > 0.0 else 0.0)
    cdef double area_b = (wb if wb > 0.0 else 0.0) * (hb if hb > 0.0 else 0.0)
    cdef double union_ = area_a + area_b - inter
    if union_ <= 0.0:
        return 0.0
    return inter / union_


cdef inline double _edge_gap4(double ax1, double ay1, double ax2, double ay2,
                              double bx1, double by1, double bx2, double by2) nogil:
    cdef double gx = (ax1 if ax1 > bx1 else bx1) - (ax2 if ax2 < bx2 else bx2)
    cdef double gy = (ay1 if ay1 > by1 else by1) - (ay2 if ay2 < by2 else by2)
    if gx < 0.0:
        gx = 0.0
    if gy < 0.0:
        gy = 0.0
    return gx if gx > gy else gy


cdef void _quantize9(double px1, double py1, double px2, double py2,
                     double ox1, double oy1, double ox2, double oy2,
                     double* out) nogil:
    cdef double area = (ox2 - ox1) * (oy2 - oy1)
    cdef double cx, cy
    cdef double wl, wm, wr, ht, hm, hb, t
    cdef int col, row, r, c
    cdef double[3] widths
    cdef double[3] heights
    for r in range(9):
        out[r] = 0.0
    if area <= 0.0:
        cx = 0.5 * (ox1 + ox2)
        cy = 0.5 * (oy1 + oy2)
        col = 0 if cx < px1 else (1 if cx <= px2 else 2)
        row = 0 if cy < py1 else (1 if cy <= py2 else 2)
        out[row * 3 + col] = 1.0
        return
    t = ox2 if ox2 < px1 else px1
    wl = t - ox1
    if wl < 0.0:
        wl = 0.0
    t = (ox2 if ox2 < px2 else px2) - (ox1 if ox1 > px1 else px1)
    wm = t if t > 0.0 else 0.0
    t = ox2 - (ox1 if ox1 > px2 else px2)
    wr = t if t > 0.0 else 0.0
    t = oy2 if oy2 < py1 else py1
    ht = t - oy1
    if ht < 0.0:
        ht = 0.0
    t = (oy2 if oy2 < py2 else py2) - (oy1 if oy1 > py1 else py1)
    hm = t if t > 0.0 else 0.0
    t = oy2 - (oy1 if oy1 > py2 else py2)
    hb = t if t > 0.0 else 0.0
    widths[0] = wl
    widths[1] = wm
    widths[2] = wr
    heights[0] = ht
    heights[1] = hm
    heights[2] = hb
    for r in range(3):
        for c in range(3):
            out[r * 3 + c] = heights[r] * widths[c] / area


cdef inline double _jsd2_9(const double* p, const double* q, int n) nogil:
    cdef double kl_p = 0.0
    cdef double kl_q = 0.0
    cdef double m, v
    cdef int i
    for i in range(n):
        m = 0.5 * (p[i] + q[i])
        if p[i] > 0.0:
            kl_p += p[i] * log2(p[i] / m)
        if q[i] > 0.0:
            kl_q += q[i] * log2(q[i] / m)
    v = 0.5 * kl_p + 0.5 * kl_q
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


def iou(a, b):
    """Intersection over union of two boxes; 0.0 for degenerate pairs."""
    return _iou4(a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3])


def edge_gap(a, b):
    """Chebyshev rectangle gap between two boxes (0 when they overlap)."""
    return _edge_gap4(a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3])


def quantize_relation(person, obj):
    """Area distribution of the object box over the person-anchored 3x3 grid."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(9, dtype=np.float64)
    _quantize9(person[0], person[1], person[2], person[3],
               obj[0], obj[1], obj[2], obj[3], <double*> out.data)
    return out


def jsd2(p, q):
    """Base-2 Jensen-Shannon divergence, clamped into [0, 1]."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pa = np.ascontiguousarray(p, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] qa = np.ascontiguousarray(q, dtype=np.float64)
    if pa.shape[0] != qa.shape[0]:
        raise ValueError("distributions differ in length")
    return _jsd2_9(<const double*> pa.data, <const double*> qa.data, <int> pa.shape[0])


def pairwise_iou(a, b):
    """IoU matrix between box arrays of shape (N, 4) and (M, 4)."""
    cdef double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0], m = bv.shape[0], i, j
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    with nogil:
        for i in range(n):
            for j in range(m):
                out[i, j] = _iou4(av[i, 0], av[i, 1], av[i, 2], av[i, 3],
                                  bv[j, 0], bv[j, 1], bv[j, 2], bv[j, 3])
    return out_arr


def score_frame(person_boxes, person_scores, det_boxes, det_scores, det_slot,
                psi, prior, has_prior, double radius, bint use_spatial,
                double fallback_phi):
    """Combined action score for every person box in one frame.

    Same contract as the pure backend: person score plus, per selected-object
    slot, psi * max over in-radius detections of det_score * phi.
    """
    cdef double[:, ::1] pb = np.ascontiguousarray(person_boxes, dtype=np.float64)
    cdef double[::1] ps = np.ascontiguousarray(person_scores, dtype=np.float64)
    cdef double[:, ::1] db = np.ascontiguousarray(det_boxes, dtype=np.float64)
    cdef double[::1] ds = np.ascontiguousarray(det_scores, dtype=np.float64)
    cdef long[::1] slot = np.ascontiguousarray(det_slot, dtype=np.int64)
    cdef double[::1] psiv = np.ascontiguousarray(psi, dtype=np.float64)
    cdef double[:, ::1] pr = np.ascontiguousarray(prior, dtype=np.float64)
    cdef cnp.uint8_t[::1] hp = np.ascontiguousarray(has_prior, dtype=np.uint8)
    cdef Py_ssize_t n_persons = pb.shape[0]
    cdef Py_ssize_t n_dets = db.shape[0]
    cdef Py_ssize_t n_slots = psiv.shape[0]
    cdef Py_ssize_t p, k, d
    cdef double total, best, phi, v
    cdef double[9] d1
    out_arr = np.empty(n_persons, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for p in range(n_persons):
            total = ps[p]
            for k in range(n_slots):
                best = 0.0
                for d in range(n_dets):
                    if slot[d] != k:
                        continue
                    if _edge_gap4(pb[p, 0], pb[p, 1], pb[p, 2], pb[p, 3],
                                  db[d, 0], db[d, 1], db[d, 2], db[d, 3]) > radius:
                        continue
                    if not use_spatial:
                        phi = 1.0
                    elif hp[k]:
                        _quantize9(pb[p, 0], pb[p, 1], pb[p, 2], pb[p, 3],
                                   db[d, 0], db[d, 1], db[d, 2], db[d, 3], d1)
                        phi = 1.0 - _jsd2_9(d1, &pr[k, 0], 9)
                    else:
                        phi = fallback_phi
                    v = ds[d] * phi
                    if v > best:
                        best = v
                total += psiv[k] * best
            out[p] = total
    return out_arr


def score_frame_query(person_boxes, person_scores, det_boxes, det_scores,
                      relation, double size_ratio, double radius):
    """Retrieval score for every person box; detections pre-filtered to the query class."""
    cdef double[:, ::1] pb = np.ascontiguousarray(person_boxes, dtype=np.float64)
    cdef double[::1] ps = np.ascontiguousarray(person_scores, dtype=np.float64)
    cdef double[:, ::1] db = np.ascontiguousarray(det_boxes, dtype=np.float64)
    cdef double[::1] ds = np.ascontiguousarray(det_scores, dtype=np.float64)
    cdef double[::1] rel = np.ascontiguousarray(relation, dtype=np.float64)
    cdef bint has_size = not isnan(size_ratio)
    cdef Py_ssize_t n_persons = pb.shape[0]
    cdef Py_ssize_t n_dets = db.shape[0]
    cdef Py_ssize_t p, d
    cdef double parea, best, v, ratio
    cdef double[9] d1
    out_arr = np.empty(n_persons, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for p in range(n_persons):
            parea = (pb[p, 2] - pb[p, 0]) * (pb[p, 3] - pb[p, 1])
            best = 0.0
            for d in range(n_dets):
                if _edge_gap4(pb[p, 0], pb[p, 1], pb[p, 2], pb[p, 3],
                              db[d, 0], db[d, 1], db[d, 2], db[d, 3]) > radius:
                    continue
                _quantize9(pb[p, 0], pb[p, 1], pb[p, 2], pb[p, 3],
                           db[d, 0], db[d, 1], db[d, 2], db[d, 3], d1)
                v = ds[d] * (1.0 - _jsd2_9(d1, &rel[0], 9))
                if has_size:
                    ratio = (db[d, 2] - db[d, 0]) * (db[d, 3] - db[d, 1]) / parea
                    v *= max(0.0, 1.0 - fabs(ratio - size_ratio))
                if v > best:
                    best = v
            out[p] = ps[p] + best
    return out_arr
