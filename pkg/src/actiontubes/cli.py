"""Command-line surface.

Exit codes: 0 success, 1 usage error, 2 data error (bad or missing input
files, schema violations, configuration gates).
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import click

from . import formats, pipeline
from .boxscore import RetrievalQuery
from .fixtures import generate_fixtures
from .linking import extract_tubes
from .semantic import build_action_object_weights
from .spatial import PREPOSITIONS, SpatialDistribution, build_prior_table


@click.group()
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.pass_context
def cli(ctx, seed):
    """Zero-shot action classification, localization, and tube retrieval."""
    ctx.obj = {"seed": seed}


def _load_config(path, seed=None):
    config = formats.load_config(path)
    if seed is not None:
        config = replace(config, seed=seed, eval=replace(config.eval, rng_seed=seed))
    return config


def _ablation_options(fn):
    """Config-overriding flags shared by the scoring commands."""
    fn = click.option(
        "--local-k", type=int, default=None,
        help="Override scorer.local_k (0 disables object evidence).",
    )(fn)
    fn = click.option(
        "--spatial-relations/--no-spatial-relations", "spatial_relations",
        default=None, help="Override scorer.use_spatial_relations.",
    )(fn)
    fn = click.option(
        "--use-global/--no-global", "use_global", default=None,
        help="Override fusion.use_global.",
    )(fn)
    fn = click.option(
        "--use-local/--no-local", "use_local", default=None,
        help="Override fusion.use_local.",
    )(fn)
    return fn


def _apply_ablation(config, local_k, spatial_relations, use_global, use_local):
    scorer = config.scorer
    if local_k is not None:
        scorer = replace(scorer, local_k=local_k)
    if spatial_relations is not None:
        scorer = replace(scorer, use_spatial_relations=spatial_relations)
    fusion = config.fusion
    if use_global is not None:
        fusion = replace(fusion, use_global=use_global)
    if use_local is not None:
        fusion = replace(fusion, use_local=use_local)
    return replace(config, scorer=scorer, fusion=fusion)


@cli.command("gen-fixtures")
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
@click.option("--videos", default=20, show_default=True)
@click.option("--frames", default=50, show_default=True)
@click.option("--actions", default=4, show_default=True)
@click.pass_context
def gen_fixtures(ctx, out, videos, frames, actions):
    """Write a synthetic planted corpus plus a ready-to-run config."""
    seed = ctx.obj.get("seed") or 0
    config_path = generate_fixtures(
        out, seed=seed, n_videos=videos, n_frames=frames, n_actions=actions
    )
    click.echo(f"fixture corpus written; config at {config_path}")


@cli.command("build-spatial-priors")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--annotations", type=click.Path(), default=None)
@click.option("--out", type=click.Path(), default=None)
def build_spatial_priors(config_path, annotations, out):
    """Aggregate person-object relations from an annotation corpus."""
    config = _load_config(config_path)
    annotations = Path(annotations) if annotations else config.paths.annotations
    if annotations is None:
        raise formats.DataError("no annotation corpus configured or given")
    out = Path(out) if out else config.paths.spatial_priors
    if out is None:
        raise formats.DataError("no output path configured or given")
    local_vocab = formats.load_vocabulary(config.paths.local_vocabulary, "local-object")
    corpus = formats.load_annotations(annotations, local_vocab)
    table = build_prior_table(corpus)
    if not table.entries:
        click.echo("warning: corpus has no person-object co-occurrences", err=True)
    formats.save_prior_table(out, table, local_vocab)
    click.echo(f"{len(table.entries)} object priors written to {out}")


@cli.command("rank-objects")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--vocabulary", type=click.Choice(["local", "global"]), default="global",
              show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--k", type=int, default=None, help="Override the configured k.")
@click.pass_context
def rank_objects(ctx, config_path, vocabulary, out, k):
    """Export the per-action ranked object weights."""
    config = _load_config(config_path, ctx.obj.get("seed"))
    assets = pipeline.load_assets(
        config, need_global=(vocabulary == "global"), need_priors=False
    )
    if vocabulary == "global":
        if k is not None:
            assets.config = replace(config, fusion=replace(config.fusion, global_k=k))
        weights = pipeline.global_weights(assets)
        vocab = assets.global_vocab
    else:
        kk = k if k is not None else max(1, config.scorer.local_k)
        ctx_w = pipeline._weight_context(assets, assets.local_vocab)
        if config.local_weighting == "combined":
            weights = build_action_object_weights(
                assets.action_vocab, assets.local_vocab, ctx_w, kk
            )
        else:
            from .semantic import ActionObjectWeights, select_top_k

            weights = ActionObjectWeights(
                per_action={
                    a: select_top_k(name, assets.local_vocab, assets.provider, kk)
                    for a, name in enumerate(assets.action_vocab.names)
                },
                k=kk,
            )
        vocab = assets.local_vocab
    formats.save_weights(out, weights, assets.action_vocab, vocab)
    click.echo(f"object weights written to {out}")


@cli.command("score-boxes")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
@click.option("--workers", default=1, show_default=True)
@click.pass_context
def score_boxes(ctx, config_path, out, workers):
    """Score every person box per frame and action; one dump per video."""
    config = _load_config(config_path, ctx.obj.get("seed"))
    assets = pipeline.load_assets(config, need_global=False)
    scored_all, _ = pipeline.score_and_link_all(assets, workers=workers)
    out = Path(out)
    for video_id in sorted(scored_all):
        formats.save_scored_boxes(
            out / f"{video_id}.json",
            assets.videos[video_id],
            scored_all[video_id],
            assets.action_vocab,
        )
    click.echo(f"scored boxes for {len(scored_all)} videos written to {out}")


@cli.command("link-tubes")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--scored", required=True, type=click.Path(), help="score-boxes output dir.")
@click.option("--out", required=True, type=click.Path())
@click.pass_context
def link_tubes(ctx, config_path, scored, out):
    """Link scored-box dumps into ranked, fused tubes."""
    config = _load_config(config_path, ctx.obj.get("seed"))
    assets = pipeline.load_assets(config, need_priors=False)
    scored_dir = Path(scored)
    if not scored_dir.is_dir():
        raise formats.DataError(
            f"{scored_dir} is not a directory; run the score-boxes subcommand first"
        )
    person_id = assets.local_vocab.person_id
    tubes_all = {}
    for path in sorted(scored_dir.glob("*.json")):
        video_id, per_action = formats.load_scored_boxes(
            path, assets.action_vocab, person_id
        )
        tubes_all[video_id] = {
            action_id: extract_tubes(
                frames, config.linker, video_id=video_id, action_id=action_id
            )
            for action_id, frames in per_action.items()
        }
    if not tubes_all:
        raise formats.DataError(f"no scored-box dumps in {scored_dir}")
    ranked = pipeline.rank_localizations(assets, tubes_all)
    formats.save_tubes(out, ranked, assets.action_vocab)
    click.echo(f"tubes for {len(tubes_all)} videos written to {out}")


@cli.command("localize")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--workers", default=1, show_default=True)
@_ablation_options
@click.pass_context
def localize(ctx, config_path, out, workers, local_k, spatial_relations, use_global, use_local):
    """End-to-end: score, link, fuse, and rank tubes per action."""
    config = _load_config(config_path, ctx.obj.get("seed"))
    config = _apply_ablation(config, local_k, spatial_relations, use_global, use_local)
    assets = pipeline.load_assets(config)
    ranked = pipeline.localize(assets, workers=workers)
    formats.save_tubes(out, ranked, assets.action_vocab)
    n = sum(len(v) for v in ranked.values())
    click.echo(f"{n} ranked tubes written to {out}")


@cli.command("classify")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--workers", default=1, show_default=True)
@_ablation_options
@click.pass_context
def classify_cmd(ctx, config_path, out, workers, local_k, spatial_relations, use_global, use_local):
    """Predict one action per video from the fused scores."""
    config = _load_config(config_path, ctx.obj.get("seed"))
    config = _apply_ablation(config, local_k, spatial_relations, use_global, use_local)
    assets = pipeline.load_assets(config)
    predictions, fused = pipeline.classify_videos(assets, workers=workers)
    formats.save_predictions(out, predictions, fused, assets.action_vocab)
    click.echo(f"predictions for {len(predictions)} videos written to {out}")


def _parse_relation(spec: str) -> SpatialDistribution:
    if spec in PREPOSITIONS:
        return SpatialDistribution.one_hot(spec)
    parts = spec.split(",")
    if len(parts) != 9:
        raise click.UsageError(
            f"--relation must be one of {', '.join(PREPOSITIONS)} or 9 comma-separated weights"
        )
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise click.UsageError(f"non-numeric relation weights: {spec}") from None
    try:
        return SpatialDistribution(tuple(values))
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


@cli.command("retrieve")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--object", "object_name", required=True)
@click.option("--relation", required=True, help="Preposition name or 9 weights.")
@click.option("--size", type=float, default=None, help="Requested object/person area ratio.")
@click.option("--detections", type=click.Path(), default=None,
              help="Override the configured detections directory.")
@click.option("--out", required=True, type=click.Path())
@click.option("--workers", default=1, show_default=True)
@click.pass_context
def retrieve(ctx, config_path, object_name, relation, size, detections, out, workers):
    """Rank tubes against a user query of object, preposition, and size."""
    config = _load_config(config_path, ctx.obj.get("seed"))
    assets = pipeline.load_assets(
        config, need_global=False, need_priors=False, detections_dir=detections
    )
    if object_name not in assets.local_vocab:
        raise formats.UnknownNameError(
            f"unknown object {object_name!r} in the local vocabulary"
        )
    query = RetrievalQuery(
        object_id=assets.local_vocab.id_of(object_name),
        relation=_parse_relation(relation),
        size_ratio=size,
    )
    ranked = pipeline.retrieve(assets, query, workers=workers)
    formats.save_retrieval(
        out,
        ranked,
        {
            "object": object_name,
            "relation": list(query.relation.weights),
            "size_ratio": size,
        },
    )
    click.echo(f"{len(ranked)} tubes written to {out}")


@cli.command("evaluate-localization")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--tubes", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--frame-level", is_flag=True, help="Frame AP instead of tube metrics.")
@click.pass_context
def evaluate_localization(ctx, config_path, tubes, out, frame_level):
    """Score ranked tubes against the ground truth."""
    config = _load_config(config_path, ctx.obj.get("seed"))
    assets = pipeline.load_assets(
        config, need_global=False, need_priors=False, need_ground_truth=True
    )
    per_action = formats.load_tubes(tubes, assets.action_vocab)
    if frame_level:
        report = pipeline.evaluate_frames(assets, per_action)
    else:
        report = pipeline.evaluate_localization(assets, per_action)
    formats.atomic_write_json(out, report)
    if frame_level:
        click.echo(f"frame mAP {report['frame_map']:.4f}; report at {out}")
    else:
        key = str(config.eval.overlap_thresholds[-1])
        click.echo(
            f"mAP@{key} {report['map'][key]:.4f}, AUC@{key} {report['auc'][key]:.4f}; "
            f"report at {out}"
        )


@cli.command("evaluate-classification")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--predictions", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--subset-size", type=int, default=None,
              help="Also run the seeded random-subset protocol at this size.")
@click.pass_context
def evaluate_classification(ctx, config_path, predictions, out, subset_size):
    """Accuracy of a predictions file against the ground truth."""
    config = _load_config(config_path, ctx.obj.get("seed"))
    assets = pipeline.load_assets(
        config, need_global=False, need_priors=False, need_ground_truth=True
    )
    preds, scores = formats.load_predictions(predictions, assets.action_vocab)
    report = pipeline.evaluate_classification(assets, preds, scores, subset_size)
    formats.atomic_write_json(out, report)
    click.echo(f"accuracy {report['accuracy']:.4f}; report at {out}")


def main(argv=None) -> int:
    try:
        cli(args=argv, standalone_mode=False, obj={})
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (ValueError, KeyError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
