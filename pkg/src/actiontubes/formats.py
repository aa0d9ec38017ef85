"""File formats, validation, and the pipeline configuration.

Every loader validates eagerly and raises a located error: schema shape,
unknown class names, dimension mismatches, non-finite numbers, and range
violations are distinct exception types, each carrying a ``location``
string (file plus element path or line number). All writes are atomic
(write to a temp file in the target directory, then rename).
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .boxscore import ScorerConfig
from .evaluation import EvalConfig
from .geometry import (
    BoundingBox,
    Detection,
    FrameDetections,
    GroundTruthTube,
    VideoDetections,
    Vocabulary,
)
from .linking import ActionTube, LinkerConfig
from .semantic import (
    EmbeddingTable,
    MultilingualLexicon,
    NamingPriorConfig,
    ObjectDepthTable,
)
from .spatial import AnnotationImage, SpatialDistribution, SpatialPriorTable
from .videoscore import FusionConfig, GlobalObjectScores


class DataError(ValueError):
    """Base for all located input-file errors."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class SchemaError(DataError):
    """Document shape does not match the expected schema."""


class UnknownNameError(DataError):
    """A class, action, or language name is not in its vocabulary."""


class DimensionMismatchError(DataError):
    """A vector or box has the wrong number of components."""


class NonFiniteNumberError(DataError):
    """A NaN or infinity where a finite number is required."""


class ValueRangeError(DataError):
    """A number outside its documented range."""


def atomic_write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _read_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise DataError("file not found", str(path)) from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", str(path)) from None


def _number(value, loc: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {type(value).__name__}", loc)
    v = float(value)
    if not math.isfinite(v):
        raise NonFiniteNumberError(f"non-finite value {value}", loc)
    return v


def _box(value, loc: str) -> BoundingBox:
    if not isinstance(value, list) or len(value) != 4:
        raise DimensionMismatchError("box must be a list of 4 numbers", loc)
    x1, y1, x2, y2 = (_number(v, loc) for v in value)
    if x1 > x2 or y1 > y2:
        raise ValueRangeError(f"box corners out of order: {value}", loc)
    return BoundingBox(x1, y1, x2, y2)


# ---------------------------------------------------------------------------
# vocabularies, detections, annotations


def load_vocabulary(path, kind: str) -> Vocabulary:
    try:
        lines = Path(path).read_text().splitlines()
    except FileNotFoundError:
        raise DataError("file not found", str(path)) from None
    names = tuple(line.strip() for line in lines if line.strip())
    if not names:
        raise SchemaError("empty vocabulary", str(path))
    try:
        return Vocabulary(kind=kind, names=names)
    except ValueError as exc:
        raise SchemaError(str(exc), str(path)) from None


def load_video_detections(path, local_vocab: Vocabulary) -> VideoDetections:
    """One detections document: persons split from objects at load time."""
    doc = _read_json(path)
    loc = str(path)
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", loc)
    video_id = doc.get("video_id")
    if not isinstance(video_id, str) or not video_id:
        raise SchemaError("missing or empty video_id", loc)
    fps = _number(doc.get("sampled_fps", 0.0), f"{loc}:sampled_fps")
    frames_doc = doc.get("frames")
    if not isinstance(frames_doc, list):
        raise SchemaError("frames must be a list", loc)
    person_id = local_vocab.person_id
    frames = []
    for fi, frame_doc in enumerate(frames_doc):
        floc = f"{loc}:frames[{fi}]"
        if not isinstance(frame_doc, dict):
            raise SchemaError("frame must be an object", floc)
        frame_index = frame_doc.get("frame_index")
        if not isinstance(frame_index, int) or isinstance(frame_index, bool) or frame_index < 0:
            raise SchemaError(f"bad frame_index {frame_index!r}", floc)
        persons, objects = [], []
        for di, det_doc in enumerate(frame_doc.get("detections", [])):
            dloc = f"{floc}.detections[{di}]"
            if not isinstance(det_doc, dict):
                raise SchemaError("detection must be an object", dloc)
            name = det_doc.get("class")
            if name not in local_vocab:
                raise UnknownNameError(f"unknown class {name!r}", dloc)
            score = _number(det_doc.get("score"), f"{dloc}.score")
            if not 0.0 <= score <= 1.0:
                raise ValueRangeError(f"score {score} outside [0, 1]", dloc)
            box = _box(det_doc.get("box"), f"{dloc}.box")
            class_id = local_vocab.id_of(name)
            det = Detection(class_id=class_id, score=score, box=box)
            if class_id == person_id:
                if box.area() <= 0.0:
                    raise ValueRangeError("person box has zero area", dloc)
                persons.append(det)
            else:
                objects.append(det)
        frames.append(
            FrameDetections(
                frame_index=frame_index, persons=tuple(persons), objects=tuple(objects)
            )
        )
    try:
        return VideoDetections(video_id=video_id, frames=tuple(frames), sampled_fps=fps)
    except ValueError as exc:
        raise SchemaError(str(exc), loc) from None


def load_detections_dir(directory, local_vocab: Vocabulary) -> dict:
    """All *.json detection documents of a directory, keyed by video id."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError("not a directory", str(directory))
    videos = {}
    for path in sorted(directory.glob("*.json")):
        video = load_video_detections(path, local_vocab)
        if video.video_id in videos:
            raise SchemaError(f"duplicate video_id {video.video_id!r}", str(path))
        videos[video.video_id] = video
    if not videos:
        raise DataError("no detection documents found", str(directory))
    return videos


def load_annotations(path, local_vocab: Vocabulary) -> list:
    """Annotation corpus for prior building: person and object boxes per image."""
    doc = _read_json(path)
    loc = str(path)
    if not isinstance(doc, list):
        raise SchemaError("top level must be a list of images", loc)
    images = []
    for ii, img in enumerate(doc):
        iloc = f"{loc}:images[{ii}]"
        if not isinstance(img, dict):
            raise SchemaError("image must be an object", iloc)
        persons = tuple(
            _box(b, f"{iloc}.persons[{i}]") for i, b in enumerate(img.get("persons", []))
        )
        objects = []
        for oi, rec in enumerate(img.get("objects", [])):
            oloc = f"{iloc}.objects[{oi}]"
            if not isinstance(rec, list) or len(rec) != 2:
                raise SchemaError("object record must be [name, box]", oloc)
            name, box = rec
            if name not in local_vocab:
                raise UnknownNameError(f"unknown class {name!r}", oloc)
            objects.append((local_vocab.id_of(name), _box(box, f"{oloc}.box")))
        images.append(
            AnnotationImage(
                image_id=str(img.get("image_id", ii)),
                person_boxes=persons,
                object_boxes=tuple(objects),
            )
        )
    return images


# ---------------------------------------------------------------------------
# embeddings, lexicon, depths


def load_embeddings(path, language: str) -> EmbeddingTable:
    """Vector text format: header "<count> <dim>", then "token v1 .. vdim"."""
    loc = str(path)
    try:
        f = open(path)
    except FileNotFoundError:
        raise DataError("file not found", loc) from None
    with f:
        header = f.readline().split()
        if len(header) != 2:
            raise SchemaError("header must be '<count> <dim>'", f"{loc}:1")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise SchemaError(f"bad header {header}", f"{loc}:1") from None
        vectors = {}
        for lineno, line in enumerate(f, start=2):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                continue
            term = parts[0]
            if len(parts) - 1 != dim:
                raise DimensionMismatchError(
                    f"term {term!r} has {len(parts) - 1} components, expected {dim}",
                    f"{loc}:{lineno}",
                )
            try:
                vec = np.array([float(v) for v in parts[1:]], dtype=np.float64)
            except ValueError:
                raise SchemaError(f"non-numeric component for {term!r}", f"{loc}:{lineno}") from None
            if not np.all(np.isfinite(vec)):
                raise NonFiniteNumberError(f"non-finite vector for {term!r}", f"{loc}:{lineno}")
            if term in vectors:
                raise SchemaError(f"duplicate term {term!r}", f"{loc}:{lineno}")
            vectors[term] = vec
    if count != len(vectors):
        raise SchemaError(f"header claims {count} terms, file has {len(vectors)}", loc)
    try:
        return EmbeddingTable(language=language, dim=dim, vectors=vectors)
    except ValueError as exc:
        raise SchemaError(str(exc), loc) from None


LEXICON_REVIEW_COLUMN = "needs_review"


def load_lexicon(path) -> MultilingualLexicon:
    """TSV whose header row holds language tags; one canonical term per row.

    The first column is the canonical term (its tag is normally english). A
    trailing needs_review column (exporter output) is accepted and ignored.
    """
    loc = str(path)
    try:
        lines = Path(path).read_text().splitlines()
    except FileNotFoundError:
        raise DataError("file not found", loc) from None
    if not lines:
        raise SchemaError("empty lexicon", loc)
    languages = lines[0].split("\t")
    if languages and languages[-1] == LEXICON_REVIEW_COLUMN:
        languages = languages[:-1]
    if not languages or any(not lang for lang in languages):
        raise SchemaError("header must hold language tags", f"{loc}:1")
    if len(set(languages)) != len(languages):
        raise SchemaError("duplicate language tags", f"{loc}:1")
    table: dict = {lang: {} for lang in languages}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) < len(languages):
            raise DimensionMismatchError(
                f"row has {len(cells)} cells, expected at least {len(languages)}",
                f"{loc}:{lineno}",
            )
        term = cells[0]
        for lang, cell in zip(languages, cells):
            if not cell:
                raise SchemaError(f"empty {lang} translation for {term!r}", f"{loc}:{lineno}")
            table[lang][term] = cell
    return MultilingualLexicon(translations=table)


def load_depth_table(path, global_vocab: Vocabulary) -> ObjectDepthTable:
    """TSV rows "term<TAB>depth"; terms outside the vocabulary are ignored."""
    loc = str(path)
    try:
        lines = Path(path).read_text().splitlines()
    except FileNotFoundError:
        raise DataError("file not found", loc) from None
    depths = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) != 2:
            raise SchemaError("row must be 'term<TAB>depth'", f"{loc}:{lineno}")
        term, depth_str = cells
        try:
            depth = int(depth_str)
        except ValueError:
            raise SchemaError(f"non-integer depth {depth_str!r}", f"{loc}:{lineno}") from None
        if term in global_vocab:
            depths[global_vocab.id_of(term)] = depth
    return ObjectDepthTable(depths=depths)


# ---------------------------------------------------------------------------
# spatial prior table


def save_prior_table(path, table: SpatialPriorTable, local_vocab: Vocabulary):
    doc = {
        local_vocab.names[obj_id]: {
            "weights": list(dist.weights),
            "pairs": table.pair_counts[obj_id],
        }
        for obj_id, dist in table.entries.items()
    }
    atomic_write_json(path, doc)


def load_prior_table(path, local_vocab: Vocabulary) -> SpatialPriorTable:
    doc = _read_json(path)
    loc = str(path)
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", loc)
    entries, counts = {}, {}
    for name, rec in doc.items():
        eloc = f"{loc}:{name}"
        if name not in local_vocab:
            raise UnknownNameError(f"unknown object {name!r}", eloc)
        if not isinstance(rec, dict):
            raise SchemaError("entry must be an object", eloc)
        weights = rec.get("weights")
        if not isinstance(weights, list) or len(weights) != 9:
            raise DimensionMismatchError("weights must hold 9 numbers", eloc)
        values = [_number(w, eloc) for w in weights]
        if any(w < 0 for w in values):
            raise ValueRangeError("negative preposition weight", eloc)
        if abs(sum(values) - 1.0) > 1e-6:
            raise ValueRangeError(f"weights sum to {sum(values)}", eloc)
        pairs = rec.get("pairs")
        if not isinstance(pairs, int) or pairs < 1:
            raise ValueRangeError(f"pairs must be a positive integer, got {pairs!r}", eloc)
        entries[local_vocab.id_of(name)] = SpatialDistribution(tuple(values))
        counts[local_vocab.id_of(name)] = pairs
    return SpatialPriorTable(entries=entries, pair_counts=counts)


# ---------------------------------------------------------------------------
# global scores, ground truth


def load_global_scores(path, global_vocab: Vocabulary) -> dict:
    doc = _read_json(path)
    loc = str(path)
    if not isinstance(doc, dict):
        raise SchemaError("top level must map video_id to a score list", loc)
    scores = {}
    for video_id, values in doc.items():
        vloc = f"{loc}:{video_id}"
        if not isinstance(values, list):
            raise SchemaError("scores must be a list", vloc)
        if len(values) != len(global_vocab):
            raise DimensionMismatchError(
                f"{len(values)} scores for a {len(global_vocab)}-term vocabulary", vloc
            )
        vec = np.array([_number(v, vloc) for v in values], dtype=np.float64)
        if np.any(vec < 0):
            raise ValueRangeError("negative probability", vloc)
        if abs(float(vec.sum()) - 1.0) > 1e-3:
            raise ValueRangeError(f"probabilities sum to {float(vec.sum())}", vloc)
        scores[video_id] = GlobalObjectScores(video_id=video_id, probabilities=vec)
    return scores


def load_ground_truth(path, action_vocab: Vocabulary) -> list:
    doc = _read_json(path)
    loc = str(path)
    if not isinstance(doc, list):
        raise SchemaError("top level must be a list of tubes", loc)
    tubes = []
    for ti, rec in enumerate(doc):
        tloc = f"{loc}:tubes[{ti}]"
        if not isinstance(rec, dict):
            raise SchemaError("tube must be an object", tloc)
        video_id = rec.get("video_id")
        if not isinstance(video_id, str) or not video_id:
            raise SchemaError("missing video_id", tloc)
        action = rec.get("action")
        if action not in action_vocab:
            raise UnknownNameError(f"unknown action {action!r}", tloc)
        boxes_doc = rec.get("boxes")
        if not isinstance(boxes_doc, dict) or not boxes_doc:
            raise SchemaError("boxes must be a non-empty object", tloc)
        boxes = {}
        for key, value in boxes_doc.items():
            try:
                frame_index = int(key)
            except ValueError:
                raise SchemaError(f"non-integer frame index {key!r}", tloc) from None
            boxes[frame_index] = _box(value, f"{tloc}.boxes[{key}]")
        tubes.append(
            GroundTruthTube(
                video_id=video_id, action_id=action_vocab.id_of(action), boxes=boxes
            )
        )
    return tubes


# ---------------------------------------------------------------------------
# pipeline artifacts: scored boxes, tubes, weights, reports


def save_scored_boxes(path, video: VideoDetections, per_action_scores, action_vocab):
    """Scored-box dump for one video: shared person boxes plus per-action scores."""
    doc = {
        "video_id": video.video_id,
        "frames": [
            {
                "frame_index": f.frame_index,
                "persons": [list(d.box.as_tuple()) for d in f.persons],
                "person_scores": [d.score for d in f.persons],
            }
            for f in video.frames
        ],
        "scores": {
            action_vocab.names[action_id]: [
                [sb.score for sb in frame_boxes] for frame_boxes in frames
            ]
            for action_id, frames in per_action_scores.items()
        },
    }
    atomic_write_json(path, doc)


def load_scored_boxes(path, action_vocab, person_id: int = 0):
    """Reload a scored-box dump into per-action ScoredBox frame lists."""
    from .boxscore import ScoredBox

    doc = _read_json(path)
    loc = str(path)
    video_id = doc.get("video_id")
    if not isinstance(video_id, str):
        raise SchemaError("missing video_id", loc)
    frames_doc = doc.get("frames")
    scores_doc = doc.get("scores")
    if not isinstance(frames_doc, list) or not isinstance(scores_doc, dict):
        raise SchemaError("expected frames list and scores object", loc)
    persons_per_frame = []
    for fi, frame_doc in enumerate(frames_doc):
        floc = f"{loc}:frames[{fi}]"
        frame_index = frame_doc.get("frame_index")
        boxes = [_box(b, floc) for b in frame_doc.get("persons", [])]
        pscores = [_number(s, floc) for s in frame_doc.get("person_scores", [])]
        if len(boxes) != len(pscores):
            raise DimensionMismatchError("persons and person_scores differ in length", floc)
        persons_per_frame.append((frame_index, boxes, pscores))
    per_action = {}
    for action, frames_scores in scores_doc.items():
        if action not in action_vocab:
            raise UnknownNameError(f"unknown action {action!r}", loc)
        if len(frames_scores) != len(persons_per_frame):
            raise DimensionMismatchError("score frames do not match person frames", loc)
        scored_frames = []
        for (frame_index, boxes, pscores), frame_scores in zip(
            persons_per_frame, frames_scores
        ):
            if len(frame_scores) != len(boxes):
                raise DimensionMismatchError(
                    f"frame {frame_index}: {len(frame_scores)} scores for {len(boxes)} boxes",
                    loc,
                )
            scored_frames.append(
                [
                    ScoredBox(
                        frame_index=frame_index,
                        person_detection=Detection(class_id=person_id, score=ps, box=b),
                        score=_number(s, loc),
                    )
                    for b, ps, s in zip(boxes, pscores, frame_scores)
                ]
            )
        per_action[action_vocab.id_of(action)] = scored_frames
    return video_id, per_action


def _tube_doc(tube: ActionTube, fused_score: float) -> dict:
    return {
        "video_id": tube.video_id,
        "fused_score": fused_score,
        "tube_score": tube.tube_score,
        "elements": [
            {"frame_index": f, "box": list(box.as_tuple()), "score": s}
            for f, box, s in tube.elements
        ],
    }


def save_tubes(path, per_action_ranked, action_vocab):
    """Ranked localization tubes: action name -> descending (tube, fused score)."""
    doc = {
        "task": "localization",
        "actions": {
            action_vocab.names[action_id]: [_tube_doc(t, s) for t, s in entries]
            for action_id, entries in per_action_ranked.items()
        },
    }
    atomic_write_json(path, doc)


def _parse_tube(rec, video_loc, action_id=None) -> tuple:
    elements = []
    for ei, el in enumerate(rec.get("elements", [])):
        eloc = f"{video_loc}.elements[{ei}]"
        frame_index = el.get("frame_index")
        if not isinstance(frame_index, int):
            raise SchemaError("missing frame_index", eloc)
        elements.append((frame_index, _box(el.get("box"), eloc), _number(el.get("score"), eloc)))
    video_id = rec.get("video_id")
    if not isinstance(video_id, str):
        raise SchemaError("missing video_id", video_loc)
    try:
        tube = ActionTube.build(video_id, elements, action_id=action_id)
    except ValueError as exc:
        raise SchemaError(str(exc), video_loc) from None
    if abs(tube.tube_score - _number(rec.get("tube_score"), video_loc)) > 1e-9:
        raise ValueRangeError("tube_score does not match its elements", video_loc)
    return tube, _number(rec.get("fused_score"), video_loc)


def load_tubes(path, action_vocab):
    doc = _read_json(path)
    loc = str(path)
    if doc.get("task") != "localization":
        raise SchemaError("not a localization tube document", loc)
    per_action = {}
    for action, tubes_doc in doc.get("actions", {}).items():
        if action not in action_vocab:
            raise UnknownNameError(f"unknown action {action!r}", loc)
        action_id = action_vocab.id_of(action)
        entries = []
        for ti, rec in enumerate(tubes_doc):
            entries.append(_parse_tube(rec, f"{loc}:{action}[{ti}]", action_id))
        per_action[action_id] = entries
    return per_action


def save_retrieval(path, ranked, query_doc):
    doc = {
        "task": "retrieval",
        "query": query_doc,
        "tubes": [_tube_doc(t, s) for t, s in ranked],
    }
    atomic_write_json(path, doc)


def save_weights(path, weights, action_vocab, object_vocab):
    doc = {
        "k": weights.k,
        "actions": {
            action_vocab.names[a]: [[object_vocab.names[o], w] for o, w in ranked]
            for a, ranked in weights.per_action.items()
        },
    }
    atomic_write_json(path, doc)


def load_weights(path, action_vocab, object_vocab):
    from .semantic import ActionObjectWeights

    doc = _read_json(path)
    loc = str(path)
    k = doc.get("k")
    if not isinstance(k, int) or k < 1:
        raise SchemaError(f"bad k {k!r}", loc)
    per_action = {}
    for action, ranked in doc.get("actions", {}).items():
        if action not in action_vocab:
            raise UnknownNameError(f"unknown action {action!r}", loc)
        rows = []
        for rec in ranked:
            if not isinstance(rec, list) or len(rec) != 2:
                raise SchemaError("weight row must be [object, weight]", f"{loc}:{action}")
            name, w = rec
            if name not in object_vocab:
                raise UnknownNameError(f"unknown object {name!r}", f"{loc}:{action}")
            rows.append((object_vocab.id_of(name), _number(w, f"{loc}:{action}")))
        per_action[action_vocab.id_of(action)] = rows
    return ActionObjectWeights(per_action=per_action, k=k)


def save_predictions(path, predictions, fused_scores, action_vocab):
    doc = {
        "task": "classification",
        "predictions": {v: action_vocab.names[a] for v, a in predictions.items()},
        "scores": {
            v: {action_vocab.names[a]: s for a, s in per_action.items()}
            for v, per_action in fused_scores.items()
        },
    }
    atomic_write_json(path, doc)


def load_predictions(path, action_vocab):
    doc = _read_json(path)
    loc = str(path)
    if doc.get("task") != "classification":
        raise SchemaError("not a classification document", loc)
    predictions = {}
    for video_id, action in doc.get("predictions", {}).items():
        if action not in action_vocab:
            raise UnknownNameError(f"unknown action {action!r}", f"{loc}:{video_id}")
        predictions[video_id] = action_vocab.id_of(action)
    scores = {}
    for video_id, per_action in doc.get("scores", {}).items():
        scores[video_id] = {
            action_vocab.id_of(a): _number(s, f"{loc}:{video_id}")
            for a, s in per_action.items()
        }
    return predictions, scores


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class PipelinePaths:
    detections_dir: Path
    embeddings: dict  # language -> Path
    lexicon: Path | None
    depth_table: Path | None
    spatial_priors: Path | None
    annotations: Path | None
    global_scores: Path | None
    local_vocabulary: Path
    global_vocabulary: Path | None
    actions: Path
    ground_truth: Path | None


@dataclass(frozen=True)
class PipelineConfig:
    paths: PipelinePaths
    scorer: ScorerConfig = ScorerConfig()
    linker: LinkerConfig = LinkerConfig()
    fusion: FusionConfig = FusionConfig()
    eval: EvalConfig = EvalConfig()
    naming: NamingPriorConfig = NamingPriorConfig()
    languages: tuple = ("english", "dutch")
    use_multilingual: bool = True
    use_naming: bool = True
    discrimination: str = "off"
    local_weighting: str = "plain"
    seed: int = 0

    def __post_init__(self):
        if not self.languages:
            raise SchemaError("languages must be non-empty")
        if self.discrimination not in ("off", "action", "object"):
            raise SchemaError(f"unknown discrimination mode {self.discrimination!r}")
        if self.local_weighting not in ("plain", "combined"):
            raise SchemaError(f"unknown local_weighting {self.local_weighting!r}")


def _path_or_none(base: Path, doc: dict, key: str):
    value = doc.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise SchemaError(f"path {key} must be a string", str(base))
    return (base / value).resolve() if not os.path.isabs(value) else Path(value)


def load_config(path, overrides: dict | None = None) -> PipelineConfig:
    """Read the pipeline configuration; relative paths resolve against the file."""
    doc = _read_json(path)
    loc = str(path)
    if not isinstance(doc, dict):
        raise SchemaError("config must be an object", loc)
    if overrides:
        doc = {**doc, **{k: v for k, v in overrides.items() if v is not None}}
    base = Path(path).resolve().parent
    paths_doc = doc.get("paths")
    if not isinstance(paths_doc, dict):
        raise SchemaError("missing paths object", loc)
    embeddings_doc = paths_doc.get("embeddings")
    if not isinstance(embeddings_doc, dict) or not embeddings_doc:
        raise SchemaError("paths.embeddings must map language to file", loc)
    embeddings = {}
    for lang, p in embeddings_doc.items():
        embeddings[lang] = (base / p).resolve() if not os.path.isabs(p) else Path(p)
    required = {}
    for key in ("detections_dir", "local_vocabulary", "actions"):
        p = _path_or_none(base, paths_doc, key)
        if p is None:
            raise SchemaError(f"missing required path {key}", loc)
        required[key] = p
    paths = PipelinePaths(
        detections_dir=required["detections_dir"],
        embeddings=embeddings,
        lexicon=_path_or_none(base, paths_doc, "lexicon"),
        depth_table=_path_or_none(base, paths_doc, "depth_table"),
        spatial_priors=_path_or_none(base, paths_doc, "spatial_priors"),
        annotations=_path_or_none(base, paths_doc, "annotations"),
        global_scores=_path_or_none(base, paths_doc, "global_scores"),
        local_vocabulary=required["local_vocabulary"],
        global_vocabulary=_path_or_none(base, paths_doc, "global_vocabulary"),
        actions=required["actions"],
        ground_truth=_path_or_none(base, paths_doc, "ground_truth"),
    )

    def section(name, cls, **renames):
        sec = doc.get(name, {})
        if not isinstance(sec, dict):
            raise SchemaError(f"{name} must be an object", loc)
        kwargs = {renames.get(k, k): v for k, v in sec.items()}
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise SchemaError(f"bad {name} section: {exc}", loc) from None
        except ValueError as exc:
            raise SchemaError(f"bad {name} section: {exc}", loc) from None

    eval_sec = doc.get("eval", {})
    if "overlap_thresholds" in eval_sec:
        eval_sec = {**eval_sec, "overlap_thresholds": tuple(eval_sec["overlap_thresholds"])}
    try:
        eval_cfg = EvalConfig(**eval_sec)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad eval section: {exc}", loc) from None
    try:
        return PipelineConfig(
            paths=paths,
            scorer=section("scorer", ScorerConfig),
            linker=section("linker", LinkerConfig),
            fusion=section("fusion", FusionConfig),
            eval=eval_cfg,
            naming=section("naming", NamingPriorConfig),
            languages=tuple(doc.get("languages", ("english", "dutch"))),
            use_multilingual=bool(doc.get("use_multilingual", True)),
            use_naming=bool(doc.get("use_naming", True)),
            discrimination=doc.get("discrimination", "off"),
            local_weighting=doc.get("local_weighting", "plain"),
            seed=int(doc.get("seed", 0)),
        )
    except ValueError as exc:
        raise SchemaError(str(exc), loc) from None
