"""HTTP+JSON API for listening-test campaigns (FastAPI).

Endpoints follow the campaign workflow: create/open a campaign, hand each
evaluator their assignment, serve clip audio (with byte-range support),
collect ratings into the append-only log, and export results.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse, Response
from pydantic import BaseModel

from ..errors import ServiceError
from .store import CampaignConfig, CampaignStore, _campaign_to_dict

_STATUS_BY_CODE = {
    "unknown_campaign": 404,
    "unknown_clip": 404,
    "not_found": 404,
    "not_assigned": 403,
    "bad_score": 400,
    "bad_category": 400,
    "bad_status": 400,
    "bad_config": 400,
    "insufficient_clips": 400,
    "duplicate": 409,
    "duplicate_campaign": 409,
    "closed": 409,
    "revisions_disabled": 403,
}


class RatingIn(BaseModel):
    campaign_id: str
    evaluator_id: str
    clip_id: str
    category: str
    score: int


def _range_response(path: Path, range_header: str | None, media_type: str) -> Response:
    size = path.stat().st_size
    if not range_header or not range_header.startswith("bytes="):
        return FileResponse(path, media_type=media_type, headers={"Accept-Ranges": "bytes"})
    spec = range_header[len("bytes=") :].split(",")[0].strip()
    start_s, _, end_s = spec.partition("-")
    try:
        if start_s:
            start = int(start_s)
            end = int(end_s) if end_s else size - 1
        else:  # suffix range: last N bytes
            start = max(0, size - int(end_s))
            end = size - 1
    except ValueError:
        return Response(status_code=416)
    if start >= size or end < start:
        return Response(status_code=416, headers={"Content-Range": f"bytes */{size}"})
    end = min(end, size - 1)
    with open(path, "rb") as f:
        f.seek(start)
        body = f.read(end - start + 1)
    return Response(
        content=body,
        status_code=206,
        media_type=media_type,
        headers={
            "Content-Range": f"bytes {start}-{end}/{size}",
            "Accept-Ranges": "bytes",
            "Content-Length": str(len(body)),
        },
    )


def create_app(store: CampaignStore, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="listening-test service")

    @app.exception_handler(ServiceError)
    async def _service_error(_req: Request, exc: ServiceError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content={"error": exc.code, "detail": exc.message})

    @app.post("/campaigns")
    def create_campaign(config: dict):
        campaign = store.create_campaign(CampaignConfig.from_dict(config))
        return _campaign_to_dict(campaign)

    @app.post("/campaigns/{campaign_id}/open")
    def open_campaign(campaign_id: str):
        return {"id": campaign_id, "status": store.set_status(campaign_id, "open").status}

    @app.post("/campaigns/{campaign_id}/close")
    def close_campaign(campaign_id: str):
        return {"id": campaign_id, "status": store.set_status(campaign_id, "closed").status}

    @app.get("/campaigns/{campaign_id}/assignment")
    def assignment(campaign_id: str, evaluator: str = Query(...)):
        return store.assignment(campaign_id, evaluator)

    @app.get("/campaigns/{campaign_id}/progress")
    def progress(campaign_id: str):
        return store.progress(campaign_id)

    @app.get("/campaigns/{campaign_id}/results")
    def results(campaign_id: str):
        return store.results(campaign_id)

    @app.get("/campaigns/{campaign_id}/export.csv")
    def export_csv(campaign_id: str):
        return PlainTextResponse(store.export_csv(campaign_id), media_type="text/csv")

    @app.get("/campaigns/{campaign_id}/results.csv")
    def results_csv(campaign_id: str):
        return PlainTextResponse(store.results_csv(campaign_id), media_type="text/csv")

    @app.get("/campaigns/{campaign_id}/rubric")
    def rubric(campaign_id: str):
        from ..rubric import rubric_to_payload

        return {"rubric": rubric_to_payload(store.get_campaign(campaign_id).rubric)}

    @app.get("/clips/{clip_id}/audio")
    def clip_audio(clip_id: str, request: Request, campaign: str | None = None):
        _, clip = store.find_clip(clip_id, campaign)
        path = Path(clip.audio_path)
        if not path.is_file():
            raise ServiceError("not_found", f"audio file missing for clip {clip_id}")
        return _range_response(path, request.headers.get("range"), "audio/wav")

    @app.post("/ratings")
    def submit_rating(body: RatingIn):
        return store.submit_rating(
            body.campaign_id, body.evaluator_id, body.clip_id, body.category, body.score
        )

    @app.post("/ratings/revision")
    def revise_rating(body: RatingIn):
        return store.revise_rating(
            body.campaign_id, body.evaluator_id, body.clip_id, body.category, body.score
        )

    if ui_dir is not None:
        ui_path = Path(ui_dir)

        @app.get("/")
        def index():
            return FileResponse(ui_path / "index.html", media_type="text/html")

        @app.get("/ui/{asset:path}")
        def ui_asset(asset: str):
            target = (ui_path / asset).resolve()
            if not str(target).startswith(str(ui_path.resolve())) or not target.is_file():
                raise ServiceError("not_found", f"no asset {asset}")
            media = "text/javascript" if target.suffix == ".js" else None
            return FileResponse(target, media_type=media)

    return app


def load_service_config(path: str | Path) -> dict:
    cfg = json.loads(Path(path).read_text("utf-8"))
    cfg.setdefault("host", "127.0.0.1")
    cfg.setdefault("port", 8750)
    cfg.setdefault("data_dir", "eval-data")
    cfg.setdefault("ui_dir", None)
    cfg.setdefault("campaigns", [])
    return cfg


def serve(config_path: str | Path) -> None:
    """Start the service from a config file; creates configured campaigns."""
    import uvicorn

    cfg = load_service_config(config_path)
    store = CampaignStore(cfg["data_dir"])
    for raw in cfg["campaigns"]:
        campaign_cfg = CampaignConfig.from_dict(raw)
        if campaign_cfg.id not in store._campaigns:
            store.create_campaign(campaign_cfg)
            if raw.get("open_on_start", True):
                store.set_status(campaign_cfg.id, "open")
    app = create_app(store, ui_dir=cfg["ui_dir"])
    uvicorn.run(app, host=cfg["host"], port=cfg["port"], log_level="warning")
