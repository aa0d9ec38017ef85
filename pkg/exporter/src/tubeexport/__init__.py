"""Bridge from videos and pre-trained models to the actiontubes file formats."""

from .export import (
    ExportJob,
    export_detections,
    export_embeddings,
    export_global_scores,
)
from .models import (
    ModelLoadError,
    PaletteClassifier,
    PaletteDetector,
    load_palette,
    resize_nearest,
)
from .sampling import sample_frames, sample_times
from .video import NpyDirVideo, SyntheticVideo, VideoDecodeError, load_manifest

__version__ = "0.1.0"
