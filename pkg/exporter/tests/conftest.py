import json

import pytest

PALETTE = {
    "person": [200, 30, 30],
    "ball": [30, 200, 30],
    "cup": [30, 30, 200],
}


@pytest.fixture()
def palette_path(tmp_path):
    path = tmp_path / "palette.json"
    path.write_text(json.dumps(PALETTE))
    return path


@pytest.fixture()
def vocab_files(tmp_path):
    local = tmp_path / "local_objects.txt"
    local.write_text("person\nball\ncup\n")
    global_ = tmp_path / "global_objects.txt"
    global_.write_text("ball\ncup\n")
    actions = tmp_path / "actions.txt"
    actions.write_text("juggling\n")
    return {"local": local, "global": global_, "actions": actions}


def video_record(video_id="v0", duration=10.0, **kw):
    record = {
        "video_id": video_id,
        "duration": duration,
        "width": 160,
        "height": 120,
        "items": [
            {"class": "person", "x": 40, "y": 30, "w": 20, "h": 40, "dx": 1.0},
            {"class": "ball", "x": 45, "y": 10, "w": 10, "h": 10, "dx": 1.0},
        ],
    }
    record.update(kw)
    return record


@pytest.fixture()
def manifest_path(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"videos": [video_record()]}))
    return path
