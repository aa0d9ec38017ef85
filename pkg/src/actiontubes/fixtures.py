"""Synthetic planted-detection corpus for end-to-end checks.

Builds a small world where the numbers are analytic: each action owns one
object, embeddings are orthonormal so similarities are exactly 0 or 1, the
owned object always sits in the action's characteristic preposition cell,
and the annotation corpus makes every prior table entry a one-hot. Person
boxes alone carry no action signal, so person-only configurations classify
at chance, while the full configuration is forced to 100% accuracy with
perfectly overlapping top tubes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .formats import atomic_write_json, atomic_write_text

ACTIONS = ("surfing", "archery", "fencing", "juggling")
OBJECTS = ("surfboard", "bow", "sword", "ball")
RELATIONS = ("below", "left", "right", "above")  # per object, relative to the actor
NOISE_OBJECT = "crowd"

DUTCH = {
    "person": "persoon",
    "surfboard": "surfplank",
    "bow": "boog",
    "sword": "zwaard",
    "ball": "bal",
    "crowd": "menigte",
    "surfing": "surfen",
    "archery": "boogschieten",
    "fencing": "schermen",
    "juggling": "jongleren",
}

ACTOR_SCORE = 0.9
DISTRACTOR_SCORE = 0.85
OBJECT_SCORE = 0.8
DRIFT_PER_FRAME = 0.4

_DIM = 8
_BASIS = {
    "surfboard": 0,
    "surfing": 0,
    "bow": 1,
    "archery": 1,
    "sword": 2,
    "fencing": 2,
    "ball": 3,
    "juggling": 3,
    "crowd": 5,
    "person": 6,
}


def _vector(term: str) -> list:
    v = [0.0] * _DIM
    v[_BASIS[term]] = 1.0
    return v


def _relation_box(relation: str, x: float, y: float):
    """A 10x10 object box strictly inside one grid cell of the actor at (x, y).

    The actor box is [x, y, x+20, y+40]; offsets keep the edge gap under the
    default 25-pixel neighborhood.
    """
    if relation == "above":
        return [x + 5, y - 12, x + 15, y - 2]
    if relation == "below":
        return [x + 5, y + 42, x + 15, y + 52]
    if relation == "left":
        return [x - 14, y + 10, x - 4, y + 20]
    if relation == "right":
        return [x + 24, y + 10, x + 34, y + 20]
    raise ValueError(f"unknown relation {relation!r}")


def _write_embeddings(path: Path, language: str):
    terms = ["person", NOISE_OBJECT, *OBJECTS, *ACTIONS]
    lines = [f"{len(terms)} {_DIM}"]
    for term in terms:
        token = term if language == "english" else DUTCH[term]
        lines.append(token + " " + " ".join(str(v) for v in _vector(term)))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _write_lexicon(path: Path):
    rows = ["english\tdutch"]
    for term in ("person", NOISE_OBJECT, *OBJECTS, *ACTIONS):
        rows.append(f"{term}\t{DUTCH[term]}")
    atomic_write_text(path, "\n".join(rows) + "\n")


def _detections_doc(video_id, n_frames, x0, y0, true_object):
    relation = RELATIONS[OBJECTS.index(true_object)]
    frames = []
    for t in range(n_frames):
        x = x0 + DRIFT_PER_FRAME * t
        detections = [
            {"class": "person", "score": ACTOR_SCORE, "box": [x, y0, x + 20, y0 + 40]},
            {"class": "person", "score": DISTRACTOR_SCORE, "box": [300.0, y0, 320.0, y0 + 40]},
            {"class": true_object, "score": OBJECT_SCORE, "box": _relation_box(relation, x, y0)},
        ]
        frames.append({"frame_index": t, "detections": detections})
    return {"video_id": video_id, "sampled_fps": 2.0, "frames": frames}


def _retrieval_doc(n_frames=12):
    frames = []
    for t in range(n_frames):
        detections = [
            {"class": "person", "score": ACTOR_SCORE, "box": [30.0, 40.0, 50.0, 80.0]},
            {"class": "person", "score": ACTOR_SCORE, "box": [200.0, 40.0, 220.0, 80.0]},
            {"class": "ball", "score": OBJECT_SCORE, "box": _relation_box("above", 30.0, 40.0)},
            {"class": "ball", "score": OBJECT_SCORE, "box": _relation_box("below", 200.0, 40.0)},
        ]
        frames.append({"frame_index": t, "detections": detections})
    return {"video_id": "retrieval_demo", "sampled_fps": 2.0, "frames": frames}


def generate_fixtures(out_dir, seed: int = 0, n_videos: int = 20, n_frames: int = 50,
                      n_actions: int = 4) -> Path:
    """Write the fixture corpus; returns the path of the emitted config file."""
    if not 1 <= n_actions <= len(ACTIONS):
        raise ValueError(f"n_actions must be within [1, {len(ACTIONS)}]")
    if n_videos < n_actions or n_frames < 2:
        raise ValueError("need at least one video per action and two frames")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    actions = ACTIONS[:n_actions]
    objects = OBJECTS[:n_actions]

    atomic_write_text(out / "local_objects.txt", "\n".join(("person", *OBJECTS)) + "\n")
    atomic_write_text(out / "global_objects.txt", "\n".join((*OBJECTS, NOISE_OBJECT)) + "\n")
    atomic_write_text(out / "actions.txt", "\n".join(actions) + "\n")
    _write_embeddings(out / "embeddings" / "english.vec", "english")
    _write_embeddings(out / "embeddings" / "dutch.vec", "dutch")
    _write_lexicon(out / "lexicon.tsv")
    atomic_write_text(
        out / "depths.tsv",
        "".join(f"{name}\t10\n" for name in (*OBJECTS, NOISE_OBJECT)),
    )

    # annotation corpus: every object strictly inside its characteristic cell
    images = []
    for obj, relation in zip(OBJECTS, RELATIONS):
        for i in range(10):
            px = float(np.round(rng.uniform(20, 60), 3))
            py = float(np.round(rng.uniform(30, 70), 3))
            images.append(
                {
                    "image_id": f"{obj}_{i}",
                    "persons": [[px, py, px + 20, py + 40]],
                    "objects": [[obj, _relation_box(relation, px, py)]],
                }
            )
    atomic_write_json(out / "annotations.json", images)

    # planted videos: round-robin true actions, analytic global scores
    ground_truth = []
    global_scores = {}
    (out / "detections").mkdir(exist_ok=True)
    for v in range(n_videos):
        action_idx = v % n_actions
        video_id = f"video_{actions[action_idx]}_{v:02d}"
        x0 = float(np.round(rng.uniform(20, 40), 3))
        y0 = float(np.round(rng.uniform(30, 40), 3))
        doc = _detections_doc(video_id, n_frames, x0, y0, objects[action_idx])
        atomic_write_json(out / "detections" / f"{video_id}.json", doc)
        boxes = {}
        for t in range(n_frames):
            x = x0 + DRIFT_PER_FRAME * t
            boxes[str(t)] = [x, y0, x + 20, y0 + 40]
        ground_truth.append(
            {"video_id": video_id, "action": actions[action_idx], "boxes": boxes}
        )
        probs = [0.09] * len(OBJECTS) + [1.0 - 0.7 - 0.09 * (len(OBJECTS) - 1)]
        probs[action_idx] = 0.7
        global_scores[video_id] = probs
    atomic_write_json(out / "ground_truth.json", ground_truth)
    atomic_write_json(out / "global_scores.json", global_scores)

    (out / "retrieval").mkdir(exist_ok=True)
    atomic_write_json(out / "retrieval" / "retrieval_demo.json", _retrieval_doc())

    config = {
        "paths": {
            "detections_dir": "detections",
            "embeddings": {
                "english": "embeddings/english.vec",
                "dutch": "embeddings/dutch.vec",
            },
            "lexicon": "lexicon.tsv",
            "depth_table": "depths.tsv",
            "spatial_priors": "spatial_priors.json",
            "annotations": "annotations.json",
            "global_scores": "global_scores.json",
            "local_vocabulary": "local_objects.txt",
            "global_vocabulary": "global_objects.txt",
            "actions": "actions.txt",
            "ground_truth": "ground_truth.json",
        },
        "scorer": {"local_k": 1},
        "fusion": {"global_k": len(OBJECTS) + 1},
        "languages": ["english", "dutch"],
        "use_multilingual": True,
        "use_naming": True,
        "discrimination": "off",
        "seed": seed,
    }
    config_path = out / "config.json"
    atomic_write_json(config_path, config)
    return config_path
