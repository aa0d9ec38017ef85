"""Export jobs: detections, global scores, embedding subsets, lexicon.

Everything written here conforms to the actiontubes interchange schemas and
is produced atomically with sorted keys, so identical inputs give identical
bytes.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .models import resize_nearest
from .sampling import sample_frames
from .video import VideoDecodeError


@dataclass(frozen=True)
class ExportJob:
    """Sampling and filtering knobs shared by the export passes."""

    out_dir: Path
    rate: float = 2.0
    input_size: int = 224
    score_threshold: float = 0.05
    keyframe_mode: bool = False

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError(f"sampling rate must be positive: {self.rate}")
        if self.input_size < 1:
            raise ValueError(f"input size must be positive: {self.input_size}")


def _atomic_write_text(path, text: str):
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


def _atomic_write_json(path, obj):
    _atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_vocabulary(path) -> list:
    names = [line.strip() for line in Path(path).read_text().splitlines() if line.strip()]
    if not names:
        raise ValueError(f"empty vocabulary file {path}")
    return names


def export_detections(job: ExportJob, sources, detector, vocabulary) -> dict:
    """One detections JSON per decodable video; skipped videos are reported."""
    vocab = set(vocabulary)
    out_dir = Path(job.out_dir) / "detections"
    exported, skipped = [], []
    for source in sources:
        try:
            samples = sample_frames(source, job.rate, job.keyframe_mode)
        except (VideoDecodeError, ValueError) as exc:
            skipped.append({"video_id": source.video_id, "reason": str(exc)})
            continue
        frames = []
        for ordinal, _t, frame in samples:
            detections = [
                {"class": name, "score": score, "box": box}
                for name, score, box in detector.detect(frame)
                if name in vocab and score >= job.score_threshold
            ]
            frames.append({"frame_index": ordinal, "detections": detections})
        doc = {
            "video_id": source.video_id,
            "sampled_fps": job.rate,
            "frames": frames,
        }
        _atomic_write_json(out_dir / f"{source.video_id}.json", doc)
        exported.append(source.video_id)
    return {"exported": sorted(exported), "skipped": skipped}


def export_global_scores(job: ExportJob, sources, classifier) -> dict:
    """Per-video mean of per-frame class scores at the classifier input size."""
    scores = {}
    skipped = []
    for source in sources:
        try:
            samples = sample_frames(source, job.rate, job.keyframe_mode)
        except (VideoDecodeError, ValueError) as exc:
            skipped.append({"video_id": source.video_id, "reason": str(exc)})
            continue
        per_frame = [
            classifier.scores(resize_nearest(frame, job.input_size))
            for _ordinal, _t, frame in samples
        ]
        scores[source.video_id] = [float(v) for v in np.mean(per_frame, axis=0)]
    _atomic_write_json(Path(job.out_dir) / "global_scores.json", scores)
    return {"exported": sorted(scores), "skipped": skipped}


# ---------------------------------------------------------------------------
# embeddings and lexicon


def _read_vectors(path) -> tuple:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"empty vector file {path}")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"{path}: header must be '<count> <dim>'")
    dim = int(header[1])
    vectors = {}
    for line in lines[1:]:
        parts = line.split(" ")
        if len(parts) == dim + 1:
            vectors[parts[0]] = parts[1:]
    return dim, vectors


def _tokens(phrase: str) -> list:
    return phrase.replace("_", " ").split()


def export_embeddings(
    vector_paths: dict,
    translations: dict,
    terms,
    out_dir,
    canonical_language: str = "english",
) -> dict:
    """Subset vector files per language plus the reviewable lexicon TSV.

    ``translations`` maps language -> term -> {"text": phrase, "machine":
    bool}; the canonical language translates to itself. Terms whose tokens
    are out of vocabulary in every language land in the rejects report.
    Machine translations get needs_review=yes in the lexicon.
    """
    out_dir = Path(out_dir)
    languages = [canonical_language] + sorted(
        lang for lang in translations if lang != canonical_language
    )
    tables = {}
    for lang in languages:
        if lang not in vector_paths:
            raise ValueError(f"no vector file given for language {lang!r}")
        tables[lang] = _read_vectors(vector_paths[lang])

    terms = list(dict.fromkeys(terms))
    lexicon_rows = []
    kept_tokens = {lang: {} for lang in languages}
    rejects = []
    for term in terms:
        covered = False
        row = []
        needs_review = False
        for lang in languages:
            if lang == canonical_language:
                entry = {"text": term, "machine": False}
            else:
                entry = translations.get(lang, {}).get(term)
                if entry is None:
                    entry = {"text": term, "machine": True}  # reviewer must fix
            if entry["machine"]:
                needs_review = True
            row.append(entry["text"])
            dim, vectors = tables[lang]
            for token in _tokens(entry["text"]):
                hit = token if token in vectors else token.lower()
                if hit in vectors:
                    kept_tokens[lang][hit] = vectors[hit]
                    covered = True
        row.append("yes" if needs_review else "no")
        lexicon_rows.append(row)
        if not covered:
            rejects.append(term)

    for lang in languages:
        dim, _ = tables[lang]
        kept = kept_tokens[lang]
        lines = [f"{len(kept)} {dim}"]
        for token in sorted(kept):
            lines.append(token + " " + " ".join(kept[token]))
        _atomic_write_text(out_dir / f"{lang}.vec", "\n".join(lines) + "\n")

    header = "\t".join(languages + ["needs_review"])
    body = "\n".join("\t".join(row) for row in lexicon_rows)
    _atomic_write_text(out_dir / "lexicon.tsv", header + "\n" + body + "\n")
    report = {"languages": languages, "terms": len(terms), "rejects": sorted(rejects)}
    _atomic_write_json(out_dir / "embedding_report.json", report)
    return report
