"""Zero-shot action classification, spatio-temporal localization, and tube
retrieval driven by object priors: per-frame detections, spatial preposition
statistics, word embeddings, and whole-video object scores, with no action
training videos anywhere."""

from .backend import BACKEND_NAME
from .boxscore import (
    RetrievalQuery,
    ScoredBox,
    ScorerConfig,
    neighborhood,
    score_box,
    score_box_query,
    score_frame,
    score_frame_query,
)
from .evaluation import (
    EvalConfig,
    RankedDetectionList,
    RankedEntry,
    accuracy,
    auc,
    average_precision,
    frame_ap,
    match_tubes,
    mean_ap,
    st_iou,
    subset_eval,
)
from .geometry import (
    BoundingBox,
    Detection,
    FrameDetections,
    GroundTruthTube,
    VideoDetections,
    Vocabulary,
    edge_gap,
    iou,
)
from .linking import (
    ActionTube,
    LinkerConfig,
    best_path,
    extract_tubes,
    link_score,
    tube_score,
)
from .semantic import (
    ActionObjectWeights,
    EmbeddingTable,
    MultilingualLexicon,
    NamingPriorConfig,
    ObjectDepthTable,
    SimilarityProvider,
    WeightContext,
    action_discrimination,
    build_action_object_weights,
    combined_object_weight,
    cosine_sim,
    embed,
    multilingual_similarity,
    naming_weight,
    object_discrimination,
    pair_similarity,
    select_top_k,
)
from .spatial import (
    PREPOSITIONS,
    AnnotationImage,
    SpatialDistribution,
    SpatialPriorTable,
    build_prior_table,
    jsd2,
    quantize_relation,
    query_match,
    spatial_match,
)
from .videoscore import (
    FusionConfig,
    GlobalObjectScores,
    classify,
    fuse_tube,
    video_score,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
