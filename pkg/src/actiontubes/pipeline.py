"""Pipeline assembly and orchestration.

Wires the loaders, scorers, linker, fusion, and metrics into the staged and
end-to-end flows behind the command-line surface. Per-video work can run on
a thread pool; results are assembled in sorted video order so the output is
identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import formats
from .boxscore import RetrievalQuery, score_frame, score_frame_query
from .evaluation import (
    RankedEntry,
    accuracy,
    auc,
    average_precision,
    frame_ap,
    match_tubes,
    subset_eval,
)
from .formats import DataError, PipelineConfig
from .linking import extract_tubes
from .semantic import (
    SimilarityProvider,
    WeightContext,
    build_action_object_weights,
    select_top_k,
)
from .videoscore import classify, video_score


class ConfigGateError(DataError):
    """The requested stage is disabled or missing a prerequisite artifact."""


@dataclass
class Assets:
    """Everything a pipeline run needs, loaded and validated once."""

    config: PipelineConfig
    local_vocab: object
    action_vocab: object
    videos: dict
    provider: SimilarityProvider
    tables: dict
    lexicon: object | None = None
    global_vocab: object | None = None
    global_scores: dict | None = None
    depth_table: object | None = None
    prior_table: object | None = None
    ground_truth: list | None = None
    _local_selection: dict | None = field(default=None, repr=False)
    _global_weights: object | None = field(default=None, repr=False)
    _video_scores: dict | None = field(default=None, repr=False)


def _check_lexicon_coverage(lexicon, languages, terms):
    for lang in languages:
        for term in terms:
            lexicon.translate(lang, term)  # raises TranslationError when absent


def load_assets(
    config: PipelineConfig,
    need_global: bool | None = None,
    need_priors: bool | None = None,
    need_ground_truth: bool = False,
    detections_dir=None,
) -> Assets:
    """Load and validate every input the configuration references."""
    paths = config.paths
    local_vocab = formats.load_vocabulary(paths.local_vocabulary, "local-object")
    action_vocab = formats.load_vocabulary(paths.actions, "action")
    videos = formats.load_detections_dir(detections_dir or paths.detections_dir, local_vocab)

    tables = {}
    for lang in config.languages:
        if lang not in paths.embeddings:
            raise ConfigGateError(
                f"language {lang!r} has no embeddings file in paths.embeddings"
            )
        tables[lang] = formats.load_embeddings(paths.embeddings[lang], lang)
    lexicon = formats.load_lexicon(paths.lexicon) if paths.lexicon else None
    multilingual = config.use_multilingual and len(config.languages) > 1
    if multilingual and lexicon is None:
        raise ConfigGateError("use_multilingual requires a lexicon path")
    provider = SimilarityProvider(
        tables, config.languages, lexicon, multilingual=multilingual
    )
    if lexicon is not None:
        langs = config.languages if multilingual else config.languages[:1]
        terms = set(local_vocab.names) | set(action_vocab.names)
        if paths.global_vocabulary:
            terms |= set(
                formats.load_vocabulary(paths.global_vocabulary, "global-object").names
            )
        _check_lexicon_coverage(lexicon, langs, sorted(terms))

    assets = Assets(
        config=config,
        local_vocab=local_vocab,
        action_vocab=action_vocab,
        videos=videos,
        provider=provider,
        tables=tables,
        lexicon=lexicon,
    )

    if need_global is None:
        need_global = config.fusion.use_global
    if need_global:
        if not paths.global_vocabulary or not paths.global_scores:
            raise ConfigGateError(
                "global scoring requires paths.global_vocabulary and paths.global_scores"
            )
        assets.global_vocab = formats.load_vocabulary(
            paths.global_vocabulary, "global-object"
        )
        assets.global_scores = formats.load_global_scores(
            paths.global_scores, assets.global_vocab
        )
        if config.use_naming:
            if not paths.depth_table:
                raise ConfigGateError("the naming prior requires paths.depth_table")
            assets.depth_table = formats.load_depth_table(
                paths.depth_table, assets.global_vocab
            )

    if need_priors is None:
        need_priors = config.fusion.use_local and config.scorer.use_spatial_relations
    if need_priors:
        if paths.spatial_priors and paths.spatial_priors.is_file():
            assets.prior_table = formats.load_prior_table(
                paths.spatial_priors, local_vocab
            )
        else:
            raise ConfigGateError(
                f"spatial prior table {paths.spatial_priors} is missing; "
                "run the build-spatial-priors subcommand first"
            )

    if need_ground_truth:
        if not paths.ground_truth:
            raise ConfigGateError("evaluation requires paths.ground_truth")
        assets.ground_truth = formats.load_ground_truth(paths.ground_truth, action_vocab)
    return assets


# ---------------------------------------------------------------------------
# object selection and weights


def local_selection(assets: Assets) -> dict:
    """Per action: the top-k local objects with their similarity values."""
    if assets._local_selection is not None:
        return assets._local_selection
    config = assets.config
    k = config.scorer.local_k
    selection: dict = {}
    if k == 0:
        selection = {a: [] for a in range(len(assets.action_vocab))}
    else:
        if config.local_weighting == "combined":
            ctx = _weight_context(assets, assets.local_vocab)
            weigher = lambda obj, act: _combined(ctx, obj, act)
        else:
            weigher = assets.provider
        for action_id, action in enumerate(assets.action_vocab.names):
            selection[action_id] = select_top_k(action, assets.local_vocab, weigher, k)
    assets._local_selection = selection
    return selection


def _combined(ctx, obj, act):
    from .semantic import combined_object_weight

    return combined_object_weight(obj, act, ctx)


def _weight_context(assets: Assets, object_vocab) -> WeightContext:
    config = assets.config
    depth_of = None
    naming = None
    if config.use_naming and assets.depth_table is not None:
        table = assets.depth_table
        vocab = object_vocab
        naming = config.naming
        depth_of = lambda term: table.depth_of(vocab.id_of(term))
    return WeightContext(
        psi=assets.provider,
        all_actions=tuple(assets.action_vocab.names),
        all_objects=tuple(object_vocab.names),
        discrimination=config.discrimination,
        naming=naming,
        depth_of=depth_of,
    )


def global_weights(assets: Assets):
    """Combined per-action weights over the global vocabulary, truncated to k."""
    if assets._global_weights is not None:
        return assets._global_weights
    if assets.global_vocab is None:
        raise ConfigGateError("global weights need the global vocabulary loaded")
    k = min(assets.config.fusion.global_k, len(assets.global_vocab))
    ctx = _weight_context(assets, assets.global_vocab)
    weights = build_action_object_weights(
        assets.action_vocab, assets.global_vocab, ctx, k
    )
    assets._global_weights = weights
    return weights


def video_global_scores(assets: Assets) -> dict:
    """video id -> action id -> whole-video score (all zero when global is off)."""
    if assets._video_scores is not None:
        return assets._video_scores
    actions = range(len(assets.action_vocab))
    if not assets.config.fusion.use_global:
        scores = {v: {a: 0.0 for a in actions} for v in assets.videos}
    else:
        weights = global_weights(assets)
        scores = {}
        for video_id in assets.videos:
            gs = assets.global_scores.get(video_id) if assets.global_scores else None
            if gs is None:
                raise ConfigGateError(
                    f"no global scores for video {video_id!r} in paths.global_scores"
                )
            scores[video_id] = {a: video_score(gs, a, weights) for a in actions}
    assets._video_scores = scores
    return scores


# ---------------------------------------------------------------------------
# scoring and linking


def score_video(assets: Assets, video_id: str) -> dict:
    """action id -> per-frame ScoredBox lists for one video."""
    video = assets.videos[video_id]
    selection = local_selection(assets)
    out = {}
    for action_id in range(len(assets.action_vocab)):
        out[action_id] = [
            score_frame(
                frame, selection[action_id], assets.prior_table, assets.config.scorer
            )
            for frame in video.frames
        ]
    return out


def link_video(assets: Assets, scored: dict, video_id: str) -> dict:
    """action id -> extracted tubes for one video's scored frames."""
    return {
        action_id: extract_tubes(
            frames, assets.config.linker, video_id=video_id, action_id=action_id
        )
        for action_id, frames in scored.items()
    }


def _score_and_link(assets: Assets, video_id: str):
    scored = score_video(assets, video_id)
    return video_id, scored, link_video(assets, scored, video_id)


def score_and_link_all(assets: Assets, workers: int = 1) -> tuple:
    """Scored frames and tubes for every video, deterministic in video order."""
    if not assets.config.fusion.use_local:
        raise ConfigGateError(
            "tube extraction requires local priors (fusion.use_local)"
        )
    video_ids = sorted(assets.videos)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda v: _score_and_link(assets, v), video_ids))
    else:
        results = [_score_and_link(assets, v) for v in video_ids]
    results.sort(key=lambda r: r[0])
    scored_all = {v: scored for v, scored, _ in results}
    tubes_all = {v: tubes for v, _, tubes in results}
    return scored_all, tubes_all


def rank_localizations(assets: Assets, tubes_all: dict) -> dict:
    """action id -> ranked [(tube, fused score)] across all videos."""
    vscores = video_global_scores(assets)
    per_action = {}
    for action_id in range(len(assets.action_vocab)):
        entries = []
        for video_id in sorted(tubes_all):
            for tube in tubes_all[video_id].get(action_id, []):
                fused = tube.tube_score + vscores[video_id][action_id]
                entries.append((tube, fused))
        entries.sort(key=lambda e: (-e[1], e[0].video_id))
        per_action[action_id] = entries
    return per_action


def localize(assets: Assets, workers: int = 1) -> dict:
    _, tubes_all = score_and_link_all(assets, workers=workers)
    return rank_localizations(assets, tubes_all)


def classify_videos(assets: Assets, workers: int = 1) -> tuple:
    """Predictions and fused per-action scores for every video."""
    actions = list(range(len(assets.action_vocab)))
    vscores = video_global_scores(assets)
    if assets.config.fusion.use_local:
        _, tubes_all = score_and_link_all(assets, workers=workers)
    else:
        tubes_all = {v: {} for v in assets.videos}
    predictions, fused = {}, {}
    for video_id in sorted(assets.videos):
        tubes = tubes_all.get(video_id, {})
        predictions[video_id] = classify(tubes, vscores[video_id], actions)
        fused[video_id] = {
            a: max((t.tube_score for t in tubes.get(a, [])), default=0.0)
            + vscores[video_id][a]
            for a in actions
        }
    return predictions, fused


def retrieve(assets: Assets, query: RetrievalQuery, workers: int = 1) -> list:
    """Ranked [(tube, tube score)] for a user query across all videos."""
    def one(video_id):
        video = assets.videos[video_id]
        frames = [
            score_frame_query(frame, query, assets.config.scorer)
            for frame in video.frames
        ]
        return video_id, extract_tubes(frames, assets.config.linker, video_id=video_id)

    video_ids = sorted(assets.videos)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, video_ids))
    else:
        results = [one(v) for v in video_ids]
    results.sort(key=lambda r: r[0])
    entries = []
    for video_id, tubes in results:
        for tube in tubes:
            entries.append((tube, tube.tube_score))
    entries.sort(key=lambda e: (-e[1], e[0].video_id))
    return entries


# ---------------------------------------------------------------------------
# evaluation


def _gt_by_action(ground_truth) -> dict:
    by_action: dict = {}
    for gt in ground_truth:
        by_action.setdefault(gt.action_id, []).append(gt)
    return by_action


def evaluate_localization(assets: Assets, per_action_ranked: dict) -> dict:
    """AP/AUC per action and threshold plus their unweighted means."""
    if assets.ground_truth is None:
        raise ConfigGateError("localization evaluation requires ground truth")
    gt_by_action = _gt_by_action(assets.ground_truth)
    thresholds = assets.config.eval.overlap_thresholds
    names = assets.action_vocab.names
    per_action: dict = {}
    skipped = []
    map_per_tau: dict = {}
    auc_per_tau: dict = {}
    for action_id in range(len(names)):
        gts = gt_by_action.get(action_id, [])
        if not gts:
            skipped.append(names[action_id])
            continue
        ranked = [
            RankedEntry(tube, score, tube.video_id)
            for tube, score in per_action_ranked.get(action_id, [])
        ]
        per_action[names[action_id]] = {"ap": {}, "auc": {}, "num_gt": len(gts)}
        for tau in thresholds:
            labels = match_tubes(ranked, gts, tau)
            per_action[names[action_id]]["ap"][str(tau)] = average_precision(
                labels, len(gts)
            )
            per_action[names[action_id]]["auc"][str(tau)] = auc(labels, len(gts))
    if not per_action:
        raise ConfigGateError("no action has ground-truth tubes")
    for tau in thresholds:
        key = str(tau)
        map_per_tau[key] = sum(v["ap"][key] for v in per_action.values()) / len(per_action)
        auc_per_tau[key] = sum(v["auc"][key] for v in per_action.values()) / len(per_action)
    return {
        "task": "localization",
        "thresholds": list(thresholds),
        "per_action": per_action,
        "map": map_per_tau,
        "auc": auc_per_tau,
        "skipped_actions": skipped,
    }


def evaluate_frames(assets: Assets, per_action_ranked: dict, tau: float = 0.5) -> dict:
    """Frame-level AP: every tube element becomes a box prediction."""
    if assets.ground_truth is None:
        raise ConfigGateError("frame evaluation requires ground truth")
    gt_by_action = _gt_by_action(assets.ground_truth)
    names = assets.action_vocab.names
    per_action: dict = {}
    for action_id in range(len(names)):
        gts = gt_by_action.get(action_id, [])
        if not gts:
            continue
        gt_boxes: dict = {}
        for gt in gts:
            for frame_index, box in gt.boxes.items():
                gt_boxes.setdefault((gt.video_id, frame_index), []).append(box)
        preds = []
        for tube, score in per_action_ranked.get(action_id, []):
            for frame_index, box, _ in tube.elements:
                preds.append((tube.video_id, frame_index, box, score))
        per_action[names[action_id]] = frame_ap(preds, gt_boxes, tau)
    if not per_action:
        raise ConfigGateError("no action has ground-truth boxes")
    return {
        "task": "localization-frames",
        "threshold": tau,
        "per_action_ap": per_action,
        "frame_map": sum(per_action.values()) / len(per_action),
    }


def ground_truth_labels(assets: Assets) -> dict:
    """video id -> action id; errors on multi-action videos."""
    if assets.ground_truth is None:
        raise ConfigGateError("classification evaluation requires ground truth")
    labels: dict = {}
    for gt in assets.ground_truth:
        prev = labels.get(gt.video_id)
        if prev is not None and prev != gt.action_id:
            raise ConfigGateError(
                f"video {gt.video_id!r} has ground truth for multiple actions; "
                "classification needs single-label videos"
            )
        labels[gt.video_id] = gt.action_id
    return labels


def evaluate_classification(
    assets: Assets, predictions: dict, fused_scores: dict, subset_size: int | None = None
) -> dict:
    labels = ground_truth_labels(assets)
    missing = sorted(set(labels) - set(predictions))
    if missing:
        raise ConfigGateError(f"no predictions for labeled videos: {missing}")
    restricted = {v: predictions[v] for v in labels}
    acc = accuracy(restricted, labels)
    names = assets.action_vocab.names
    per_action: dict = {}
    for video_id, action_id in labels.items():
        bucket = per_action.setdefault(names[action_id], [0, 0])
        bucket[1] += 1
        if restricted[video_id] == action_id:
            bucket[0] += 1
    report = {
        "task": "classification",
        "num_videos": len(labels),
        "accuracy": acc,
        "per_action_accuracy": {
            name: hits / total for name, (hits, total) in sorted(per_action.items())
        },
    }
    if subset_size is not None:
        cfg = assets.config.eval
        scores = {v: fused_scores[v] for v in labels}
        mean, std = subset_eval(
            labels,
            scores,
            range(len(names)),
            n=subset_size,
            runs=cfg.subset_runs,
            seed=cfg.rng_seed,
        )
        report["subset"] = {
            "n": subset_size,
            "runs": cfg.subset_runs,
            "seed": cfg.rng_seed,
            "mean_accuracy": mean,
            "std_accuracy": std,
        }
    return report
