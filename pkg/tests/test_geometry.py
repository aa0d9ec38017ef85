import numpy as np
import pytest

from actiontubes.geometry import (
    BoundingBox,
    Detection,
    GeometryError,
    GroundTruthTube,
    VideoDetections,
    FrameDetections,
    Vocabulary,
    edge_gap,
    iou,
)


def random_box(rng, span=100.0):
    x = np.sort(rng.uniform(0, span, 2))
    y = np.sort(rng.uniform(0, span, 2))
    return BoundingBox(x[0], y[0], x[1], y[1])


class TestIou:
    def test_identity(self):
        b = BoundingBox(3, 4, 10, 20)
        assert iou(b, b) == 1.0

    def test_disjoint(self):
        assert iou(BoundingBox(0, 0, 1, 1), BoundingBox(5, 5, 6, 6)) == 0.0

    def test_direct_geometry(self):
        # inter 2, union 6
        assert iou(BoundingBox(0, 0, 2, 2), BoundingBox(1, 0, 3, 2)) == pytest.approx(1 / 3)

    def test_degenerate_pair_is_zero(self):
        line = BoundingBox(1, 1, 1, 5)
        assert iou(line, line) == 0.0

    def test_symmetry_and_bounds_fuzz(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            a, b = random_box(rng), random_box(rng)
            v = iou(a, b)
            assert v == iou(b, a)
            assert 0.0 <= v <= 1.0


class TestEdgeGap:
    def test_overlapping_boxes(self):
        assert edge_gap(BoundingBox(0, 0, 5, 5), BoundingBox(3, 3, 8, 8)) == 0.0

    def test_axis_gap(self):
        assert edge_gap(BoundingBox(0, 0, 1, 1), BoundingBox(11, 0, 12, 1)) == 10.0

    def test_hand_evaluated_two_axis_gap(self):
        # gap_x 4, gap_y 6 -> Chebyshev 6
        assert edge_gap(BoundingBox(0, 0, 1, 1), BoundingBox(5, 7, 6, 8)) == 6.0

    def test_symmetry_and_translation_invariance_fuzz(self):
        rng = np.random.default_rng(8)
        for _ in range(1000):
            a, b = random_box(rng), random_box(rng)
            g = edge_gap(a, b)
            assert g == edge_gap(b, a)
            dx, dy = rng.uniform(-50, 50, 2)
            assert abs(edge_gap(a.shifted(dx, dy), b.shifted(dx, dy)) - g) < 1e-9
            assert g >= 0.0


class TestTypes:
    def test_box_corner_order_enforced(self):
        with pytest.raises(GeometryError):
            BoundingBox(5, 0, 1, 1)

    def test_detection_score_range(self):
        with pytest.raises(GeometryError):
            Detection(class_id=0, score=1.2, box=BoundingBox(0, 0, 1, 1))

    def test_video_frames_strictly_increasing(self):
        f0 = FrameDetections(frame_index=0, persons=(), objects=())
        with pytest.raises(GeometryError):
            VideoDetections(video_id="v", frames=(f0, f0))

    def test_vocabulary_needs_person_for_local(self):
        with pytest.raises(GeometryError):
            Vocabulary(kind="local-object", names=("car", "dog"))
        vocab = Vocabulary(kind="local-object", names=("person", "car"))
        assert vocab.person_id == 0
        assert vocab.id_of("car") == 1
        assert "dog" not in vocab

    def test_vocabulary_rejects_duplicates(self):
        with pytest.raises(GeometryError):
            Vocabulary(kind="action", names=("run", "run"))

    def test_ground_truth_needs_a_frame(self):
        with pytest.raises(GeometryError):
            GroundTruthTube(video_id="v", action_id=0, boxes={})
