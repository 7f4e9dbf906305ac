"""HTTP review service: one dataset, one reviewer, one shared engine.

The service wraps the same pipeline the CLI uses (`pipeline.run_strategy`
and friends), so score and selection responses carry exactly the data a
CLI run with the same configuration writes to disk. It serves frames and
thumbnails for a gallery, accepts the reviewer's reference-frame choice,
runs selection on demand, stores hand-placed prompt overrides, and
exports the merged prompt document.

State is a single in-process session. Mutating requests (reference
change, selection, annotation) serialize through one lock and publish
fully built objects, so concurrent reads never see a half-updated state.
Handlers are plain sync functions: the ASGI server runs them on worker
threads, which keeps /api/status responsive while a long selection run
holds the writer lock.
"""

from __future__ import annotations

import argparse
import io
import threading
from functools import partial
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image

from .dataset import Dataset, DatasetError, SelectionManifest, ingest
from .features import FeatureParams
from .pipeline import run_strategy
from .prompts import PROMPT_STRATEGIES, PromptError, derive_prompts
from .raster import RasterError, load_image, load_mask
from .selection import (
    SELECTION_STRATEGIES,
    FrameSource,
    SelectionError,
    WeightConfig,
    extract_feature_table,
    score_frames,
)

THUMBNAIL_MAX_SIDE = 256


class ReviewSession:
    """All mutable state of one review service instance."""

    def __init__(
        self,
        dataset: Optional[Dataset],
        params: FeatureParams,
        weights: WeightConfig,
        normalize: bool = False,
        jobs: int = 1,
    ):
        self.dataset = dataset
        self.params = params
        self.weights = weights
        self.normalize = normalize
        self.jobs = jobs
        self.reference_id: Optional[str] = None
        self.scores_payload: Optional[dict] = None
        self.selection_key: Optional[tuple] = None
        self.selection_payload: Optional[dict] = None
        self.selection_manifest: Optional[SelectionManifest] = None
        self.annotations: dict[str, dict] = {}
        self.state = "idle"
        self.progress_done = 0
        self.progress_total = 0
        self.write_lock = threading.Lock()
        self._cache_lock = threading.Lock()
        self._png_cache: dict[tuple[str, bool], bytes] = {}
        self._dims: dict[str, tuple[int, int]] = {}
        if dataset is not None:
            for frame in dataset.frames:
                with Image.open(frame.image_path) as im:
                    self._dims[frame.frame_id] = im.size  # (width, height)

    # -- helpers ---------------------------------------------------------

    def require_dataset(self) -> Dataset:
        if self.dataset is None:
            raise HTTPException(status_code=503, detail="no dataset loaded")
        return self.dataset

    def require_frame(self, frame_id: str) -> None:
        if frame_id not in self._dims:
            raise HTTPException(status_code=404, detail=f"unknown frame {frame_id!r}")

    def sources(self, count_progress: bool = False) -> list[FrameSource]:
        dataset = self.require_dataset()

        def load_counted(path: str) -> np.ndarray:
            arr = load_image(Path(path))
            with self._cache_lock:
                self.progress_done += 1
            return arr

        if count_progress:
            self.progress_done = 0
            self.progress_total = len(dataset.frames)
            return [(f.frame_id, partial(load_counted, f.image_path)) for f in dataset.frames]
        return [
            (f.frame_id, partial(load_image, Path(f.image_path))) for f in dataset.frames
        ]

    def png_bytes(self, frame_id: str, thumbnail: bool) -> bytes:
        key = (frame_id, thumbnail)
        with self._cache_lock:
            if key in self._png_cache:
                return self._png_cache[key]
        dataset = self.require_dataset()
        record = next(f for f in dataset.frames if f.frame_id == frame_id)
        arr = load_image(Path(record.image_path))
        image = Image.fromarray(arr)
        if thumbnail:
            w, h = image.size
            side = max(w, h)
            if side > THUMBNAIL_MAX_SIDE:
                scale = THUMBNAIL_MAX_SIDE / side
                image = image.resize(
                    (max(1, round(w * scale)), max(1, round(h * scale))),
                    Image.NEAREST,
                )
        buf = io.BytesIO()
        image.save(buf, format="PNG")
        data = buf.getvalue()
        with self._cache_lock:
            self._png_cache[key] = data
        return data

    def compute_scores(self, reference_id: str) -> dict:
        """Feature extraction + scoring for a reference; returns the
        /api/scores payload."""
        self.state = "scoring"
        try:
            ids, features = extract_feature_table(
                self.sources(count_progress=True), reference_id, self.params, self.jobs
            )
            score_set = score_frames(ids, features, self.weights, reference_id, self.normalize)
        finally:
            self.state = "idle"
        w = self.weights
        return {
            "reference_id": reference_id,
            "normalize_features": self.normalize,
            "weights": {
                "alpha": w.alpha,
                "beta": w.beta,
                "gamma": w.gamma,
                "delta": w.delta,
                "epsilon": w.eps_weight,
            },
            "frames": [
                {
                    "id": fid,
                    "B": fv.brightness,
                    "C": fv.contrast,
                    "E": fv.edge_density,
                    "H": fv.color_similarity,
                    "S": fv.shape_similarity,
                    "F": score,
                }
                for fid, fv, score in zip(ids, features, score_set.scores)
            ],
        }


def create_app(
    dataset_dir: Path | str | None = None,
    mask_dir: Path | str | None = None,
    params: FeatureParams = FeatureParams(),
    weights: WeightConfig = WeightConfig(),
    normalize: bool = False,
    jobs: int = 1,
    ui_dir: Path | str | None = None,
) -> FastAPI:
    """Build the service app; without a dataset every API call answers 503."""
    dataset = ingest(dataset_dir, mask_dir) if dataset_dir is not None else None
    session = ReviewSession(dataset, params, weights, normalize, jobs)
    app = FastAPI(title="frameselect review service")
    app.state.session = session

    @app.get("/api/frames")
    def list_frames() -> dict:
        ds = session.require_dataset()
        return {
            "frames": [
                {
                    "id": f.frame_id,
                    "width": session._dims[f.frame_id][0],
                    "height": session._dims[f.frame_id][1],
                    "has_mask": f.mask_path is not None,
                    "thumbnail_url": f"/api/frames/{f.frame_id}/thumbnail",
                    "image_url": f"/api/frames/{f.frame_id}/image",
                }
                for f in ds.frames
            ]
        }

    @app.get("/api/frames/{frame_id}/thumbnail")
    def thumbnail(frame_id: str) -> Response:
        session.require_dataset()
        session.require_frame(frame_id)
        return Response(content=session.png_bytes(frame_id, True), media_type="image/png")

    @app.get("/api/frames/{frame_id}/image")
    def full_image(frame_id: str) -> Response:
        session.require_dataset()
        session.require_frame(frame_id)
        return Response(content=session.png_bytes(frame_id, False), media_type="image/png")

    @app.post("/api/reference")
    def set_reference(payload: dict = Body(...)) -> dict:
        session.require_dataset()
        frame_id = payload.get("frame_id")
        if not isinstance(frame_id, str):
            raise HTTPException(status_code=400, detail="frame_id must be a string")
        session.require_frame(frame_id)
        with session.write_lock:
            scores = session.compute_scores(frame_id)
            session.reference_id = frame_id
            session.scores_payload = scores
            session.selection_key = None
            session.selection_payload = None
            session.selection_manifest = None
        return scores

    @app.get("/api/scores")
    def get_scores() -> dict:
        session.require_dataset()
        if session.scores_payload is None:
            raise HTTPException(status_code=409, detail="no reference frame set")
        return session.scores_payload

    @app.post("/api/select")
    def select(payload: dict = Body(...)) -> dict:
        ds = session.require_dataset()
        if session.reference_id is None:
            raise HTTPException(status_code=409, detail="no reference frame set")
        k = payload.get("k", 5)
        seed = payload.get("seed", 2024)
        strategy = payload.get("strategy", "afse")
        if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= len(ds.frames):
            raise HTTPException(
                status_code=400, detail=f"k must be an integer in [1, {len(ds.frames)}]"
            )
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise HTTPException(status_code=400, detail="seed must be an integer")
        if strategy not in SELECTION_STRATEGIES:
            raise HTTPException(status_code=400, detail=f"unknown strategy {strategy!r}")
        weights = session.weights
        if "weights" in payload:
            raw = payload["weights"]
            if not isinstance(raw, (list, tuple)) or len(raw) != 5:
                raise HTTPException(status_code=400, detail="weights must be 5 numbers")
            try:
                weights = WeightConfig(*(float(v) for v in raw))
            except (TypeError, ValueError) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
        key = (session.reference_id, weights, session.params, k, seed, strategy, session.normalize)
        with session.write_lock:
            if session.selection_key == key and session.selection_payload is not None:
                return session.selection_payload
            session.state = "selecting"
            try:
                manifest = run_strategy(
                    session.sources(count_progress=True),
                    session.reference_id,
                    session.params,
                    weights,
                    k=k,
                    seed=seed,
                    strategy=strategy,
                    normalize=session.normalize,
                    jobs=session.jobs,
                )
            except (SelectionError, RasterError, DatasetError) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            finally:
                session.state = "idle"
            result = manifest.to_payload()
            session.selection_key = key
            session.selection_payload = result
            session.selection_manifest = manifest
        return result

    @app.post("/api/prompts")
    def put_prompts(payload: dict = Body(...)) -> dict:
        session.require_dataset()
        frame_id = payload.get("frame_id")
        if not isinstance(frame_id, str):
            raise HTTPException(status_code=400, detail="frame_id must be a string")
        session.require_frame(frame_id)
        width, height = session._dims[frame_id]
        points = payload.get("points") or []
        bbox = payload.get("bbox")
        if not isinstance(points, list):
            raise HTTPException(status_code=400, detail="points must be a list")
        clean_points = []
        for p in points:
            try:
                x, y, label = int(p["x"]), int(p["y"]), int(p["label"])
            except (KeyError, TypeError, ValueError) as exc:
                raise HTTPException(
                    status_code=400, detail="each point needs integer x, y, label"
                ) from exc
            if label not in (0, 1):
                raise HTTPException(status_code=400, detail="label must be 0 or 1")
            if not (0 <= x < width and 0 <= y < height):
                raise HTTPException(
                    status_code=400, detail=f"point ({x}, {y}) outside {width}x{height}"
                )
            clean_points.append({"x": x, "y": y, "label": label})
        clean_bbox = None
        if bbox is not None:
            if not isinstance(bbox, (list, tuple)) or len(bbox) != 4:
                raise HTTPException(status_code=400, detail="bbox must be 4 integers")
            try:
                xmin, ymin, xmax, ymax = (int(v) for v in bbox)
            except (TypeError, ValueError) as exc:
                raise HTTPException(status_code=400, detail="bbox must be 4 integers") from exc
            if not (0 <= xmin <= xmax < width and 0 <= ymin <= ymax < height):
                raise HTTPException(
                    status_code=400, detail=f"bbox {bbox} outside {width}x{height}"
                )
            clean_bbox = [xmin, ymin, xmax, ymax]
        if not clean_points and clean_bbox is None:
            raise HTTPException(status_code=400, detail="need points or a bbox")
        entry = {"frame_id": frame_id, "points": clean_points, "bbox": clean_bbox}
        with session.write_lock:
            session.annotations[frame_id] = entry
        return entry

    @app.get("/api/export")
    def export(strategy: str = "StandardPos", seed: int = 2024) -> JSONResponse:
        ds = session.require_dataset()
        if strategy not in PROMPT_STRATEGIES:
            raise HTTPException(status_code=400, detail=f"unknown strategy {strategy!r}")
        manifest = session.selection_manifest
        if manifest is None and not session.annotations:
            raise HTTPException(
                status_code=409, detail="run a selection or add annotations first"
            )
        masks = {f.frame_id: f.mask_path for f in ds.frames}
        prompts = []
        covered = set()
        reps = manifest.representatives if manifest is not None else ()
        for fid in reps:
            covered.add(fid)
            if fid in session.annotations:
                prompts.append(session.annotations[fid])
                continue
            mask_path = masks.get(fid)
            if mask_path is None:
                continue
            try:
                spec = derive_prompts(load_mask(Path(mask_path)), strategy, seed, frame_id=fid)
            except (RasterError, PromptError):
                continue
            prompts.append(spec.to_payload())
        for fid in sorted(session.annotations):
            if fid not in covered:
                prompts.append(session.annotations[fid])
        doc = {"version": 1, "strategy": strategy, "seed": seed, "prompts": prompts}
        return JSONResponse(content=doc)

    @app.get("/api/status")
    def status() -> dict:
        return {
            "state": session.state,
            "dataset_loaded": session.dataset is not None,
            "frame_count": len(session.dataset.frames) if session.dataset else 0,
            "reference_id": session.reference_id,
            "progress": {
                "done": session.progress_done,
                "total": session.progress_total,
            },
            "has_selection": session.selection_payload is not None,
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="frameselect-review", description="Serve the frame review API and UI."
    )
    parser.add_argument("--dataset", required=True, help="directory of frames")
    parser.add_argument("--masks", default=None, help="directory of masks")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--jobs", type=int, default=1, help="parallel scoring workers")
    parser.add_argument("--ui", default=None, help="directory of the built UI bundle")
    args = parser.parse_args(argv)

    import uvicorn

    app = create_app(args.dataset, args.masks, jobs=args.jobs, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
