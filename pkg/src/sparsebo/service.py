"""HTTP ask/tell API over campaigns, backed by on-disk persistence.

Every mutating call holds a per-campaign lock (exactly one writer), and
state is saved after each change so a restart preserves pending
suggestions.  Surrogate fits that exceed a small latency budget are
moved to a worker thread; the ask endpoint then answers 202 with a poll
token instead of blocking the caller.
"""

from __future__ import annotations

import os
import threading
import uuid
from concurrent.futures import Future, ThreadPoolExecutor

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .engine import (
    Campaign,
    NoPendingSuggestion,
    PendingSuggestionExists,
    STRATEGIES,
)
from .gp import NumericalFailure

ASYNC_FIT_SECONDS = 2.0


class ApiError(Exception):
    def __init__(self, code: str, message: str, campaign_id: str | None = None):
        assert code in ("NotFound", "Conflict", "Invalid", "ModelFailure")
        self.code = code
        self.message = message
        self.campaign_id = campaign_id

    @property
    def status(self) -> int:
        return {"NotFound": 404, "Conflict": 409, "Invalid": 422, "ModelFailure": 500}[
            self.code
        ]

    def body(self) -> dict:
        return {"code": self.code, "message": self.message, "campaign": self.campaign_id}


class CreateCampaign(BaseModel):
    # "model_config" is reserved by pydantic, hence the aliased field name
    model_config = {"populate_by_name": True}

    bounds: list[list[float]]
    sense: str = "max"
    strategy: str = "StandardBO"
    seed: int = 0
    config: dict = Field(default_factory=dict, alias="model_config")


class TellBody(BaseModel):
    x: list[float]
    y: float
    gradient: list[float] | None = None
    noise_var: float | None = None
    out_of_band: bool = False


class CampaignStore:
    """Loads/saves campaigns and serializes writers per campaign."""

    def __init__(self, state_dir: str):
        self.state_dir = state_dir
        os.makedirs(state_dir, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._meta = threading.Lock()

    def _path(self, cid: str) -> str:
        if not cid.replace("-", "").isalnum():
            raise ApiError("Invalid", f"malformed campaign id {cid!r}", cid)
        return os.path.join(self.state_dir, f"{cid}.json")

    def lock(self, cid: str) -> threading.Lock:
        with self._meta:
            return self._locks.setdefault(cid, threading.Lock())

    def load(self, cid: str) -> Campaign:
        path = self._path(cid)
        if not os.path.exists(path):
            raise ApiError("NotFound", f"no campaign {cid}", cid)
        return Campaign.load(path)

    def save(self, campaign: Campaign):
        campaign.save(self._path(campaign.id))

    def delete(self, cid: str):
        path = self._path(cid)
        if not os.path.exists(path):
            raise ApiError("NotFound", f"no campaign {cid}", cid)
        os.remove(path)


def _summary(c: Campaign) -> dict:
    inc = c.incumbent
    return {
        "id": c.id,
        "bounds": [[float(lo), float(hi)] for lo, hi in c.bounds],
        "sense": c.sense,
        "strategy": c.strategy,
        "model_config": c.model_config,
        "seed": c.seed,
        "n_observations": len(c.observations),
        "pending": list(map(float, c.pending)) if c.pending is not None else None,
        "incumbent": (
            {"x": list(map(float, inc[0])), "y": inc[1]} if inc is not None else None
        ),
        "last_ask_fallback": c.last_ask_fallback,
    }


def create_app(state_dir: str = "./campaigns") -> FastAPI:
    app = FastAPI(title="sparsebo campaign service")
    store = CampaignStore(state_dir)
    executor = ThreadPoolExecutor(max_workers=2)
    pending_fits: dict[str, Future] = {}

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.post("/campaigns", status_code=201)
    def create(body: CreateCampaign):
        if body.strategy not in STRATEGIES and body.strategy.lower() not in (
            "standard", "botd", "bodmm", "bosgpd", "ssgp", "rssgp",
        ):
            raise ApiError("Invalid", f"unknown strategy {body.strategy!r}")
        try:
            c = Campaign.new(
                bounds=body.bounds,
                sense=body.sense,
                strategy=body.strategy,
                seed=body.seed,
                model_config=body.config,
            )
        except ValueError as e:
            raise ApiError("Invalid", str(e))
        store.save(c)
        return _summary(c)

    @app.get("/campaigns/{cid}")
    def get_campaign(cid: str):
        return _summary(store.load(cid))

    def _run_ask(cid: str) -> dict:
        with store.lock(cid):
            c = store.load(cid)
            try:
                x = c.ask()
            except PendingSuggestionExists as e:
                raise ApiError("Conflict", str(e), cid)
            except NumericalFailure as e:
                raise ApiError("ModelFailure", str(e), cid)
            store.save(c)
            return {
                "x": list(map(float, x)),
                "fallback": c.last_ask_fallback,
                "campaign": cid,
            }

    @app.post("/campaigns/{cid}/ask")
    def ask(cid: str):
        c = store.load(cid)
        if c.pending is not None:
            raise ApiError("Conflict", "a suggestion is already pending", cid)
        # fits on small campaigns are fast; push big ones to a worker
        heavy = len(c.observations) > 60 or c.strategy == "RSSGP-BO"
        if not heavy:
            return _run_ask(cid)
        token = uuid.uuid4().hex[:12]
        pending_fits[token] = executor.submit(_run_ask, cid)
        return JSONResponse(
            status_code=202, content={"poll": f"/polls/{token}", "campaign": cid}
        )

    @app.get("/polls/{token}")
    def poll(token: str):
        fut = pending_fits.get(token)
        if fut is None:
            raise ApiError("NotFound", f"no such poll token {token}")
        if not fut.done():
            return JSONResponse(status_code=202, content={"status": "running"})
        pending_fits.pop(token, None)
        exc = fut.exception()
        if exc is not None:
            if isinstance(exc, ApiError):
                raise exc
            raise ApiError("ModelFailure", str(exc))
        return fut.result()

    @app.post("/campaigns/{cid}/tell")
    def tell(cid: str, body: TellBody):
        with store.lock(cid):
            c = store.load(cid)
            try:
                c.tell(
                    body.x, body.y,
                    gradient=body.gradient,
                    noise_var=body.noise_var,
                    out_of_band=body.out_of_band,
                )
            except NoPendingSuggestion as e:
                raise ApiError("Conflict", str(e), cid)
            except ValueError as e:
                raise ApiError("Invalid", str(e), cid)
            store.save(c)
            return _summary(c)

    @app.get("/campaigns/{cid}/trace")
    def trace(cid: str):
        c = store.load(cid)
        return {
            "campaign": cid,
            "sense": c.sense,
            "rows": [
                {"iter": i, "y": y, "incumbent": best} for i, y, best in c.trace()
            ],
        }

    @app.get("/campaigns/{cid}/posterior")
    def posterior(cid: str, axis: int = 0, grid: int = 101):
        c = store.load(cid)
        if not c.observations:
            raise ApiError("Conflict", "no observations to condition on", cid)
        try:
            g, mean, lo, hi = c.posterior_slice(axis, grid)
        except ValueError as e:
            raise ApiError("Invalid", str(e), cid)
        except NumericalFailure as e:
            raise ApiError("ModelFailure", str(e), cid)
        return {
            "campaign": cid,
            "axis": axis,
            "grid": g.tolist(),
            "mean": mean.tolist(),
            "lower": lo.tolist(),
            "upper": hi.tolist(),
            "observations": [
                {"x": list(map(float, o.x)), "y": o.y} for o in c.observations
            ],
        }

    @app.get("/campaigns/{cid}/acquisition")
    def acquisition(cid: str, axis: int = 0, grid: int = 101):
        c = store.load(cid)
        if not c.observations:
            raise ApiError("Conflict", "no observations to condition on", cid)
        try:
            g, a = c.acquisition_slice(axis, grid)
        except ValueError as e:
            raise ApiError("Invalid", str(e), cid)
        except NumericalFailure as e:
            raise ApiError("ModelFailure", str(e), cid)
        return {"campaign": cid, "axis": axis, "grid": g.tolist(), "values": a.tolist()}

    @app.delete("/campaigns/{cid}", status_code=204)
    def delete(cid: str):
        with store.lock(cid):
            store.delete(cid)

    app.state.store = store
    return app
