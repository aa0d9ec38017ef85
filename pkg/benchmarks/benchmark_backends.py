"""Compare the compiled kernel core against the pure NumPy fallback.

Times the two hot paths (frame scoring and pairwise IoU) on a synthetic
workload sized like a real video batch. Run from the repository root:

    python3 benchmarks/benchmark_backends.py [--frames 400] [--persons 8]
"""

import argparse
import time

import numpy as np

from actiontubes import _kernels_py


def make_workload(rng, frames, persons, detections, slots):
    def boxes(n):
        out = np.empty((n, 4))
        out[:, 0] = rng.uniform(0, 600, n)
        out[:, 1] = rng.uniform(0, 400, n)
        out[:, 2] = out[:, 0] + rng.uniform(10, 200, n)
        out[:, 3] = out[:, 1] + rng.uniform(10, 200, n)
        return out

    return [
        dict(
            person_boxes=boxes(persons),
            person_scores=rng.uniform(0, 1, persons),
            det_boxes=boxes(detections),
            det_scores=rng.uniform(0, 1, detections),
            det_slot=rng.integers(0, slots, detections),
            psi=rng.uniform(0, 1, slots),
            prior=rng.dirichlet(np.ones(9), slots),
            has_prior=np.ones(slots, dtype=np.uint8),
        )
        for _ in range(frames)
    ]


def time_score(backend, workload, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for frame in workload:
            backend.score_frame(
                frame["person_boxes"],
                frame["person_scores"],
                frame["det_boxes"],
                frame["det_scores"],
                frame["det_slot"],
                frame["psi"],
                frame["prior"],
                frame["has_prior"],
                25.0,
                True,
                1.0,
            )
        best = min(best, time.perf_counter() - start)
    return best


def time_pairwise(backend, rng, n, repeats):
    a = np.sort(rng.uniform(0, 500, (n, 2, 2)), axis=2).reshape(n, 4)[:, [0, 2, 1, 3]]
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        backend.pairwise_iou(a, a)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=200)
    parser.add_argument("--persons", type=int, default=8)
    parser.add_argument("--detections", type=int, default=120)
    parser.add_argument("--slots", type=int, default=5)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    try:
        from actiontubes import _kernels as compiled
    except ImportError:
        compiled = None

    rng = np.random.default_rng(0)
    workload = make_workload(rng, args.frames, args.persons, args.detections, args.slots)

    rows = []
    py_score = time_score(_kernels_py, workload, args.repeats)
    py_pair = time_pairwise(_kernels_py, rng, 400, args.repeats)
    rows.append(("python", py_score, py_pair))
    if compiled is not None:
        c_score = time_score(compiled, workload, args.repeats)
        c_pair = time_pairwise(compiled, rng, 400, args.repeats)
        rows.append(("compiled", c_score, c_pair))

    print(
        f"workload: {args.frames} frames x {args.persons} persons x "
        f"{args.detections} detections x {args.slots} objects"
    )
    print(f"{'backend':<10} {'score_frame':>14} {'pairwise_iou':>14}")
    for name, score, pair in rows:
        print(f"{name:<10} {score:>12.4f}s {pair:>12.4f}s")
    if compiled is not None:
        print(
            f"speedup: score_frame x{py_score / c_score:.1f}, "
            f"pairwise_iou x{py_pair / c_pair:.1f}"
        )
    else:
        print("compiled backend not built; run `python3 setup.py build_ext --inplace`")


if __name__ == "__main__":
    main()
