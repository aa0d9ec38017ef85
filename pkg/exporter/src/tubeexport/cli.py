"""Command-line mirrors of the export jobs.

Exit codes: 0 success, 1 usage error, 2 data or model error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .export import (
    ExportJob,
    export_detections,
    export_embeddings,
    export_global_scores,
    read_vocabulary,
)
from .models import ModelLoadError, PaletteClassifier, PaletteDetector, load_palette
from .video import VideoDecodeError, load_manifest


@click.group()
def cli():
    """Export videos and model outputs into the actiontubes file formats."""


def _job(out, rate, size, threshold, keyframes) -> ExportJob:
    return ExportJob(
        out_dir=Path(out),
        rate=rate,
        input_size=size,
        score_threshold=threshold,
        keyframe_mode=keyframes,
    )


@cli.command("export-detections")
@click.option("--manifest", required=True, type=click.Path())
@click.option("--palette", "palette_path", required=True, type=click.Path(),
              help="Detector model artifact.")
@click.option("--vocabulary", required=True, type=click.Path(),
              help="Local-object vocabulary file (one term per line).")
@click.option("--out", required=True, type=click.Path())
@click.option("--rate", default=2.0, show_default=True, help="Frames per second.")
@click.option("--threshold", default=0.05, show_default=True,
              help="Minimum detection confidence kept.")
@click.option("--keyframes", is_flag=True, help="Sample annotated keyframes instead.")
def export_detections_cmd(manifest, palette_path, vocabulary, out, rate, threshold, keyframes):
    """Run the detector over sampled frames; one JSON per video."""
    palette = load_palette(palette_path)
    sources = load_manifest(manifest, palette)
    vocab = read_vocabulary(vocabulary)
    job = _job(out, rate, 224, threshold, keyframes)
    report = export_detections(job, sources, PaletteDetector(palette), vocab)
    _write_report(Path(out) / "detections_report.json", report)
    click.echo(
        f"exported {len(report['exported'])} videos, skipped {len(report['skipped'])}"
    )


@cli.command("export-global-scores")
@click.option("--manifest", required=True, type=click.Path())
@click.option("--palette", "palette_path", required=True, type=click.Path(),
              help="Classifier model artifact.")
@click.option("--vocabulary", required=True, type=click.Path(),
              help="Global-object vocabulary file.")
@click.option("--out", required=True, type=click.Path())
@click.option("--rate", default=2.0, show_default=True)
@click.option("--size", default=224, show_default=True, help="Classifier input size.")
@click.option("--keyframes", is_flag=True)
def export_global_scores_cmd(manifest, palette_path, vocabulary, out, rate, size, keyframes):
    """Average per-frame class scores into one vector per video."""
    palette = load_palette(palette_path)
    sources = load_manifest(manifest, palette)
    classes = read_vocabulary(vocabulary)
    job = _job(out, rate, size, 0.0, keyframes)
    report = export_global_scores(job, sources, PaletteClassifier(palette, classes))
    _write_report(Path(out) / "global_scores_report.json", report)
    click.echo(
        f"exported {len(report['exported'])} videos, skipped {len(report['skipped'])}"
    )


@cli.command("export-embeddings")
@click.option("--vectors", "vectors", multiple=True, required=True,
              help="language=path to a full vector file; repeatable.")
@click.option("--translations", type=click.Path(), default=None,
              help="JSON: language -> term -> {text, machine}.")
@click.option("--vocabulary", "vocabularies", multiple=True, required=True,
              type=click.Path(), help="Vocabulary file; repeatable.")
@click.option("--actions", type=click.Path(), required=True)
@click.option("--out", required=True, type=click.Path())
def export_embeddings_cmd(vectors, translations, vocabularies, actions, out):
    """Subset vector files to the needed terms and write the lexicon TSV."""
    vector_paths = {}
    for spec in vectors:
        if "=" not in spec:
            raise click.UsageError(f"--vectors expects language=path, got {spec!r}")
        lang, path = spec.split("=", 1)
        vector_paths[lang] = Path(path)
    translation_doc = {}
    if translations:
        translation_doc = json.loads(Path(translations).read_text())
    terms = []
    for path in (*vocabularies, actions):
        terms.extend(read_vocabulary(path))
    report = export_embeddings(vector_paths, translation_doc, terms, out)
    click.echo(
        f"{report['terms']} terms over {len(report['languages'])} languages, "
        f"{len(report['rejects'])} rejects"
    )


def _write_report(path, report):
    from .export import _atomic_write_json

    _atomic_write_json(path, report)


def main(argv=None) -> int:
    try:
        cli(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (ModelLoadError, VideoDecodeError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
