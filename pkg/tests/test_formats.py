import json

import pytest

from actiontubes import formats
from actiontubes.formats import (
    DataError,
    DimensionMismatchError,
    NonFiniteNumberError,
    SchemaError,
    UnknownNameError,
    ValueRangeError,
)
from actiontubes.geometry import BoundingBox, Vocabulary
from actiontubes.linking import ActionTube
from actiontubes.semantic import ActionObjectWeights
from actiontubes.spatial import SpatialDistribution, SpatialPriorTable

LOCAL = Vocabulary(kind="local-object", names=("person", "ball"))
ACTIONS = Vocabulary(kind="action", names=("juggling", "surfing"))


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def detections_doc(**kw):
    doc = {
        "video_id": "v1",
        "sampled_fps": 2.0,
        "frames": [
            {
                "frame_index": 0,
                "detections": [
                    {"class": "person", "score": 0.9, "box": [0, 0, 10, 20]},
                    {"class": "ball", "score": 0.5, "box": [2, 2, 4, 4]},
                ],
            }
        ],
    }
    doc.update(kw)
    return doc


class TestDetections:
    def test_persons_split_from_objects(self, tmp_path):
        path = write(tmp_path, "v.json", detections_doc())
        video = formats.load_video_detections(path, LOCAL)
        assert len(video.frames[0].persons) == 1
        assert len(video.frames[0].objects) == 1
        assert video.frames[0].persons[0].class_id == LOCAL.person_id

    def test_empty_frames_is_valid(self, tmp_path):
        path = write(tmp_path, "v.json", detections_doc(frames=[]))
        video = formats.load_video_detections(path, LOCAL)
        assert video.frames == ()

    def test_score_out_of_range(self, tmp_path):
        doc = detections_doc()
        doc["frames"][0]["detections"][0]["score"] = 1.2
        path = write(tmp_path, "v.json", doc)
        with pytest.raises(ValueRangeError):
            formats.load_video_detections(path, LOCAL)

    def test_unknown_class_named(self, tmp_path):
        doc = detections_doc()
        doc["frames"][0]["detections"][1]["class"] = "unicorn"
        path = write(tmp_path, "v.json", doc)
        with pytest.raises(UnknownNameError, match="unicorn"):
            formats.load_video_detections(path, LOCAL)

    def test_non_finite_rejected(self, tmp_path):
        doc = detections_doc()
        doc["frames"][0]["detections"][0]["box"] = [0, 0, 1e400, 10]
        text = json.dumps(doc).replace("Infinity", "Infinity")
        path = tmp_path / "v.json"
        path.write_text(text)
        with pytest.raises((NonFiniteNumberError, SchemaError)):
            formats.load_video_detections(path, LOCAL)

    def test_zero_area_person_rejected(self, tmp_path):
        doc = detections_doc()
        doc["frames"][0]["detections"][0]["box"] = [0, 0, 0, 20]
        path = write(tmp_path, "v.json", doc)
        with pytest.raises(ValueRangeError):
            formats.load_video_detections(path, LOCAL)

    def test_decreasing_frames_rejected(self, tmp_path):
        doc = detections_doc()
        doc["frames"] = [
            {"frame_index": 1, "detections": []},
            {"frame_index": 0, "detections": []},
        ]
        path = write(tmp_path, "v.json", doc)
        with pytest.raises(SchemaError):
            formats.load_video_detections(path, LOCAL)

    def test_error_carries_location(self, tmp_path):
        doc = detections_doc()
        doc["frames"][0]["detections"][1]["score"] = 7
        path = write(tmp_path, "v.json", doc)
        with pytest.raises(ValueRangeError) as err:
            formats.load_video_detections(path, LOCAL)
        assert "frames[0].detections[1]" in str(err.value)


class TestEmbeddingsFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "en.vec"
        path.write_text("2 3\nball 1 0 0\njuggling 0 1 0\n")
        table = formats.load_embeddings(path, "english")
        assert table.dim == 3
        assert list(table.vectors["ball"]) == [1.0, 0.0, 0.0]

    def test_dimension_mismatch_names_term(self, tmp_path):
        path = tmp_path / "en.vec"
        path.write_text("1 3\nball 1 0\n")
        with pytest.raises(DimensionMismatchError, match="ball"):
            formats.load_embeddings(path, "english")

    def test_count_mismatch(self, tmp_path):
        path = tmp_path / "en.vec"
        path.write_text("3 2\nball 1 0\n")
        with pytest.raises(SchemaError):
            formats.load_embeddings(path, "english")


class TestLexiconDepths:
    def test_lexicon_round_trip(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("english\tdutch\nball\tbal\n")
        lex = formats.load_lexicon(path)
        assert lex.translate("dutch", "ball") == "bal"
        assert lex.translate("english", "ball") == "ball"

    def test_needs_review_column_ignored(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("english\tdutch\tneeds_review\nball\tbal\tyes\n")
        lex = formats.load_lexicon(path)
        assert lex.languages() == ("english", "dutch")

    def test_short_row_rejected(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("english\tdutch\nball\n")
        with pytest.raises(DimensionMismatchError):
            formats.load_lexicon(path)

    def test_duplicate_language_rejected(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("english\tenglish\nball\tball\n")
        with pytest.raises(SchemaError):
            formats.load_lexicon(path)

    def test_depths(self, tmp_path):
        vocab = Vocabulary(kind="global-object", names=("ball", "net"))
        path = tmp_path / "d.tsv"
        path.write_text("ball\t7\nnet\t25\nignored\t3\n")
        table = formats.load_depth_table(path, vocab)
        assert table.depth_of(0) == 7
        assert table.depth_of(1) == 18  # clipped


class TestPriorTableRoundTrip:
    def test_round_trip_equality(self, tmp_path):
        table = SpatialPriorTable(
            entries={1: SpatialDistribution.one_hot("above")}, pair_counts={1: 4}
        )
        path = tmp_path / "priors.json"
        formats.save_prior_table(path, table, LOCAL)
        loaded = formats.load_prior_table(path, LOCAL)
        assert loaded.entries == table.entries
        assert loaded.pair_counts == table.pair_counts

    def test_bad_sum_rejected(self, tmp_path):
        path = write(tmp_path, "p.json", {"ball": {"weights": [0.5] * 9, "pairs": 1}})
        with pytest.raises(ValueRangeError):
            formats.load_prior_table(path, LOCAL)

    def test_wrong_cardinality_rejected(self, tmp_path):
        path = write(tmp_path, "p.json", {"ball": {"weights": [1.0], "pairs": 1}})
        with pytest.raises(DimensionMismatchError):
            formats.load_prior_table(path, LOCAL)


class TestGlobalScoresGroundTruth:
    VOCAB = Vocabulary(kind="global-object", names=("ball", "net"))

    def test_scores_round_trip(self, tmp_path):
        path = write(tmp_path, "g.json", {"v1": [0.25, 0.75]})
        scores = formats.load_global_scores(path, self.VOCAB)
        assert scores["v1"].probabilities.tolist() == [0.25, 0.75]

    def test_wrong_length_rejected(self, tmp_path):
        path = write(tmp_path, "g.json", {"v1": [1.0]})
        with pytest.raises(DimensionMismatchError):
            formats.load_global_scores(path, self.VOCAB)

    def test_bad_sum_rejected(self, tmp_path):
        path = write(tmp_path, "g.json", {"v1": [0.9, 0.9]})
        with pytest.raises(ValueRangeError):
            formats.load_global_scores(path, self.VOCAB)

    def test_ground_truth_round_trip(self, tmp_path):
        path = write(
            tmp_path,
            "gt.json",
            [{"video_id": "v1", "action": "juggling", "boxes": {"3": [0, 0, 5, 5]}}],
        )
        tubes = formats.load_ground_truth(path, ACTIONS)
        assert tubes[0].action_id == 0
        assert tubes[0].boxes[3] == BoundingBox(0, 0, 5, 5)

    def test_unknown_action_rejected(self, tmp_path):
        path = write(
            tmp_path,
            "gt.json",
            [{"video_id": "v1", "action": "flying", "boxes": {"0": [0, 0, 1, 1]}}],
        )
        with pytest.raises(UnknownNameError, match="flying"):
            formats.load_ground_truth(path, ACTIONS)


class TestArtifactRoundTrips:
    def test_tubes_round_trip(self, tmp_path):
        tube = ActionTube.build(
            "v1",
            [(0, BoundingBox(0, 0, 5, 5), 1.25), (1, BoundingBox(1, 0, 6, 5), 1.5)],
            action_id=0,
        )
        path = tmp_path / "tubes.json"
        formats.save_tubes(path, {0: [(tube, 2.0)], 1: []}, ACTIONS)
        loaded = formats.load_tubes(path, ACTIONS)
        got_tube, fused = loaded[0][0]
        assert got_tube == tube
        assert fused == 2.0
        assert loaded[1] == []

    def test_weights_round_trip(self, tmp_path):
        vocab = Vocabulary(kind="global-object", names=("ball", "net"))
        w = ActionObjectWeights(per_action={0: [(1, 0.75), (0, 0.5)], 1: [(0, 1.0)]}, k=2)
        path = tmp_path / "w.json"
        formats.save_weights(path, w, ACTIONS, vocab)
        loaded = formats.load_weights(path, ACTIONS, vocab)
        assert loaded.per_action == w.per_action
        assert loaded.k == 2

    def test_predictions_round_trip(self, tmp_path):
        path = tmp_path / "p.json"
        formats.save_predictions(
            path, {"v1": 0, "v2": 1}, {"v1": {0: 0.5, 1: 0.25}, "v2": {0: 0.0, 1: 1.0}}, ACTIONS
        )
        preds, scores = formats.load_predictions(path, ACTIONS)
        assert preds == {"v1": 0, "v2": 1}
        assert scores["v1"] == {0: 0.5, 1: 0.25}


class TestConfig:
    def minimal(self, tmp_path):
        (tmp_path / "dets").mkdir(exist_ok=True)
        (tmp_path / "dets" / "v.json").write_text(json.dumps(detections_doc()))
        (tmp_path / "local.txt").write_text("person\nball\n")
        (tmp_path / "actions.txt").write_text("juggling\n")
        (tmp_path / "en.vec").write_text("2 2\nball 1 0\njuggling 0 1\n")
        return {
            "paths": {
                "detections_dir": "dets",
                "embeddings": {"english": "en.vec"},
                "local_vocabulary": "local.txt",
                "actions": "actions.txt",
            },
            "languages": ["english"],
            "use_multilingual": False,
        }

    def test_defaults_and_relative_paths(self, tmp_path):
        path = write(tmp_path, "config.json", self.minimal(tmp_path))
        config = formats.load_config(path)
        assert config.scorer.neighborhood_px == 25.0
        assert config.scorer.local_k == 5
        assert config.linker.min_link_iou == 0.1
        assert config.linker.min_link_score == 1.0
        assert config.linker.tubes_per_video == 3
        assert config.fusion.global_k == 100
        assert config.eval.overlap_thresholds == (0.1, 0.2, 0.3, 0.4, 0.5)
        assert config.naming.alpha == 2.0
        assert config.paths.detections_dir == (tmp_path / "dets").resolve()

    def test_bad_section_located(self, tmp_path):
        doc = self.minimal(tmp_path)
        doc["scorer"] = {"local_k": -3}
        path = write(tmp_path, "config.json", doc)
        with pytest.raises(SchemaError):
            formats.load_config(path)

    def test_missing_file_reported(self, tmp_path):
        with pytest.raises(DataError):
            formats.load_config(tmp_path / "absent.json")
