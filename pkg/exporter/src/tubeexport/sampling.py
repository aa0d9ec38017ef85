"""Frame sampling at a fixed rate, with an annotated-keyframe mode."""

from __future__ import annotations

import math


def sample_times(duration: float, rate: float) -> list:
    """Sample instants k/rate inside [0, duration); always at least one.

    A 10-second video at 2 frames per second yields 20 samples; a clip
    shorter than one period still yields its first frame.
    """
    if rate <= 0:
        raise ValueError(f"sampling rate must be positive, got {rate}")
    if duration <= 0:
        raise ValueError(f"duration must be positive, got {duration}")
    n = max(1, math.ceil(duration * rate - 1e-9))
    return [k / rate for k in range(n)]


def sample_frames(source, rate: float, keyframe_mode: bool = False) -> list:
    """(ordinal, time, frame) triples for one video source.

    With ``keyframe_mode`` the source's annotated keyframes replace the
    fixed-rate grid; the frame index is the sample ordinal either way.
    """
    if keyframe_mode:
        times = list(getattr(source, "keyframes", None) or ())
        if not times:
            raise ValueError(f"video {source.video_id!r} has no annotated keyframes")
    else:
        times = sample_times(source.duration, rate)
    return [(ordinal, t, source.get_frame(t)) for ordinal, t in enumerate(times)]
