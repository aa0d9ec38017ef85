"""End-to-end flows over the generated corpus, via the CLI entry point."""

import json

import pytest

from actiontubes import formats, pipeline
from actiontubes.cli import main
from actiontubes.evaluation import st_iou
from actiontubes.videoscore import video_score


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def localized(fixture_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("artifacts")
    config = fixture_dir / "config.json"
    assert run("localize", "--config", config, "--out", out / "tubes.json") == 0
    assert run("classify", "--config", config, "--out", out / "predictions.json") == 0
    return out


class TestStagedEqualsEndToEnd:
    def test_bitwise_equality(self, fixture_dir, localized, tmp_path):
        config = fixture_dir / "config.json"
        assert run("score-boxes", "--config", config, "--out", tmp_path / "scored") == 0
        assert (
            run(
                "link-tubes",
                "--config", config,
                "--scored", tmp_path / "scored",
                "--out", tmp_path / "tubes_staged.json",
            )
            == 0
        )
        staged = (tmp_path / "tubes_staged.json").read_bytes()
        direct = (localized / "tubes.json").read_bytes()
        assert staged == direct

    def test_worker_count_independence(self, fixture_dir, localized, tmp_path):
        config = fixture_dir / "config.json"
        assert (
            run("localize", "--config", config, "--out", tmp_path / "t4.json",
                "--workers", 4)
            == 0
        )
        assert (tmp_path / "t4.json").read_bytes() == (localized / "tubes.json").read_bytes()


class TestLocalization:
    def test_every_top_tube_overlaps_its_ground_truth(self, fixture_dir, localized):
        config = formats.load_config(fixture_dir / "config.json")
        assets = pipeline.load_assets(config, need_ground_truth=True)
        per_action = formats.load_tubes(localized / "tubes.json", assets.action_vocab)
        gt_by = {}
        for gt in assets.ground_truth:
            gt_by[(gt.video_id, gt.action_id)] = gt
        for action_id, entries in per_action.items():
            top_tube, _ = entries[0]
            gt = gt_by[(top_tube.video_id, action_id)]
            assert st_iou(top_tube, gt) >= 0.5

    def test_evaluation_report(self, fixture_dir, localized, tmp_path):
        config = fixture_dir / "config.json"
        report_path = tmp_path / "loc.json"
        assert (
            run("evaluate-localization", "--config", config,
                "--tubes", localized / "tubes.json", "--out", report_path)
            == 0
        )
        report = json.loads(report_path.read_text())
        assert report["map"]["0.5"] == pytest.approx(1.0)
        assert report["auc"]["0.5"] == pytest.approx(1.0)

    def test_frame_level_report(self, fixture_dir, localized, tmp_path):
        config = fixture_dir / "config.json"
        report_path = tmp_path / "frames.json"
        assert (
            run("evaluate-localization", "--config", config,
                "--tubes", localized / "tubes.json", "--out", report_path,
                "--frame-level")
            == 0
        )
        report = json.loads(report_path.read_text())
        assert report["frame_map"] == pytest.approx(1.0)


class TestClassification:
    def test_full_configuration_is_perfect(self, fixture_dir, localized, tmp_path):
        config = fixture_dir / "config.json"
        report_path = tmp_path / "cls.json"
        assert (
            run("evaluate-classification", "--config", config,
                "--predictions", localized / "predictions.json",
                "--out", report_path, "--subset-size", 4)
            == 0
        )
        report = json.loads(report_path.read_text())
        assert report["accuracy"] == pytest.approx(1.0)
        assert report["subset"]["std_accuracy"] == 0.0

    def test_person_only_classifies_at_chance(self, fixture_dir, tmp_path):
        config = fixture_dir / "config.json"
        preds = tmp_path / "person_only.json"
        assert (
            run("classify", "--config", config, "--out", preds,
                "--local-k", 0, "--no-global")
            == 0
        )
        report_path = tmp_path / "person_only_report.json"
        assert (
            run("evaluate-classification", "--config", config,
                "--predictions", preds, "--out", report_path)
            == 0
        )
        assert json.loads(report_path.read_text())["accuracy"] == pytest.approx(0.25)

    def test_global_only_equals_pure_semantic_classifier(self, fixture_dir, tmp_path):
        config_path = fixture_dir / "config.json"
        preds = tmp_path / "global_only.json"
        assert run("classify", "--config", config_path, "--out", preds, "--no-local") == 0
        config = formats.load_config(config_path)
        assets = pipeline.load_assets(config)
        weights = pipeline.global_weights(assets)
        actions = range(len(assets.action_vocab))
        loaded, _ = formats.load_predictions(preds, assets.action_vocab)
        for video_id, prediction in loaded.items():
            scores = {
                a: video_score(assets.global_scores[video_id], a, weights)
                for a in actions
            }
            want = min(a for a in actions if scores[a] == max(scores.values()))
            assert prediction == want

    def test_objects_without_spatial_relations_runs(self, fixture_dir, tmp_path):
        config = fixture_dir / "config.json"
        preds = tmp_path / "no_spatial.json"
        assert (
            run("classify", "--config", config, "--out", preds,
                "--no-spatial-relations", "--no-global")
            == 0
        )
        report_path = tmp_path / "no_spatial_report.json"
        assert (
            run("evaluate-classification", "--config", config,
                "--predictions", preds, "--out", report_path)
            == 0
        )
        assert json.loads(report_path.read_text())["accuracy"] == pytest.approx(1.0)


class TestRetrieval:
    def test_above_query_ranks_above_actor_first(self, fixture_dir, tmp_path):
        config = fixture_dir / "config.json"
        out = tmp_path / "retr.json"
        assert (
            run("retrieve", "--config", config, "--object", "ball",
                "--relation", "above", "--detections", fixture_dir / "retrieval",
                "--out", out)
            == 0
        )
        doc = json.loads(out.read_text())
        assert doc["tubes"][0]["tube_score"] == pytest.approx(1.7)
        assert doc["tubes"][1]["tube_score"] == pytest.approx(0.9)
        assert doc["tubes"][0]["elements"][0]["box"][0] == pytest.approx(30.0)

    def test_custom_relation_weights(self, fixture_dir, tmp_path):
        config = fixture_dir / "config.json"
        out = tmp_path / "retr2.json"
        assert (
            run("retrieve", "--config", config, "--object", "ball",
                "--relation", "0,1,0,0,0,0,0,0,0",
                "--detections", fixture_dir / "retrieval", "--out", out)
            == 0
        )
        doc = json.loads(out.read_text())
        assert doc["tubes"][0]["tube_score"] == pytest.approx(1.7)


class TestExitCodes:
    def test_usage_error_is_one(self, fixture_dir, tmp_path):
        assert main(["localize", "--config"]) == 1
        assert main(["retrieve", "--config", str(fixture_dir / "config.json"),
                     "--object", "ball", "--relation", "sideways",
                     "--out", str(tmp_path / "o.json")]) == 1

    def test_data_error_is_two(self, tmp_path):
        missing = tmp_path / "missing.json"
        assert main(["localize", "--config", str(missing), "--out", str(tmp_path / "o")]) == 2

    def test_global_only_localization_is_gated(self, fixture_dir, tmp_path):
        config = fixture_dir / "config.json"
        rc = main([
            "localize", "--config", str(config),
            "--out", str(tmp_path / "t.json"), "--no-local",
        ])
        assert rc == 2

    def test_missing_priors_names_producer(self, fixture_dir, tmp_path):
        doc = json.loads((fixture_dir / "config.json").read_text())
        doc["paths"]["spatial_priors"] = "nowhere.json"
        bad = tmp_path / "config.json"
        bad.write_text(json.dumps({**doc, "paths": {**doc["paths"]}}))
        # paths in the rewritten config resolve against tmp_path; point back
        for key, value in doc["paths"].items():
            if key not in ("spatial_priors",) and isinstance(value, str):
                doc["paths"][key] = str(fixture_dir / value)
        if isinstance(doc["paths"].get("embeddings"), dict):
            doc["paths"]["embeddings"] = {
                k: str(fixture_dir / v) for k, v in doc["paths"]["embeddings"].items()
            }
        bad.write_text(json.dumps(doc))
        rc = main(["localize", "--config", str(bad), "--out", str(tmp_path / "t.json")])
        assert rc == 2


class TestRankObjects:
    def test_global_weights_artifact(self, fixture_dir, tmp_path):
        config_path = fixture_dir / "config.json"
        out = tmp_path / "weights.json"
        assert run("rank-objects", "--config", config_path, "--out", out) == 0
        config = formats.load_config(config_path)
        assets = pipeline.load_assets(config, need_priors=False)
        weights = formats.load_weights(out, assets.action_vocab, assets.global_vocab)
        # juggling's top object is ball; each owned object leads its action
        for action_id, name in enumerate(assets.action_vocab.names):
            top_obj, top_w = weights.per_action[action_id][0]
            assert assets.global_vocab.names[top_obj] == {
                "surfing": "surfboard",
                "archery": "bow",
                "fencing": "sword",
                "juggling": "ball",
            }[name]
            assert top_w == pytest.approx(1.5)  # similarity 1 x Beta(0.5|2,2)

    def test_local_plain_ranking(self, fixture_dir, tmp_path):
        out = tmp_path / "local.json"
        assert (
            run("rank-objects", "--config", fixture_dir / "config.json",
                "--vocabulary", "local", "--out", out, "--k", 2)
            == 0
        )
        doc = json.loads(out.read_text())
        assert doc["k"] == 2
        assert doc["actions"]["juggling"][0][0] == "ball"
        assert doc["actions"]["juggling"][0][1] == pytest.approx(1.0)
