"""FastAPI app exposing train/evaluate/rollout/plot over HTTP.

Training is long-running, so POST /train only starts a background job and
returns its id; GET /train/{job_id} reports progress. The other operations
run synchronously. Core errors map to 422 (bad configuration or input) or
400 (unusable files/paths); unknown job ids are 404.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import ConfigError, InputError, TrisumoError
from ..harness.config import parse_config
from ..harness.evaluation import evaluate_checkpoint, rollout_checkpoint
from ..harness.plotting import plot_metrics
from .jobs import JobRegistry
from .schemas import (
    EvaluateRequest,
    EvaluateResponse,
    HealthResponse,
    JobInfo,
    PlotRequest,
    PlotResponse,
    RolloutRequest,
    RolloutResponse,
    TrainRequest,
    TrainStarted,
)


def create_app() -> FastAPI:
    app = FastAPI(title="trisumo", version=__version__)
    jobs = JobRegistry()

    @app.exception_handler(TrisumoError)
    def _core_error(request: Request, exc: TrisumoError) -> JSONResponse:
        status = 422 if isinstance(exc, (ConfigError, InputError)) else 400
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.exception_handler(OSError)
    def _os_error(request: Request, exc: OSError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/train", response_model=TrainStarted, status_code=202)
    def start_train(req: TrainRequest) -> TrainStarted:
        cfg = parse_config(req.config.to_plain())
        if cfg.output_dir is None:
            raise ConfigError("config.output_dir is required for service training")
        job = jobs.start(cfg)
        return TrainStarted(job_id=job.job_id)

    @app.get("/train/{job_id}", response_model=JobInfo)
    def train_status(job_id: str) -> JSONResponse | JobInfo:
        snap = jobs.snapshot(job_id)
        if snap is None:
            return JSONResponse(
                status_code=404, content={"detail": f"unknown job {job_id!r}"}
            )
        return JobInfo(**snap)

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate(req: EvaluateRequest) -> EvaluateResponse:
        if req.episodes <= 0:
            raise InputError("episodes must be > 0")
        report = evaluate_checkpoint(req.checkpoint, req.episodes, req.seed)
        return EvaluateResponse(
            win_rate=report.win_rate,
            lose_rate=report.lose_rate,
            draw_rate=report.draw_rate,
            mean_steps_to_win=report.mean_steps_to_win,
        )

    @app.post("/rollout", response_model=RolloutResponse)
    def rollout(req: RolloutRequest) -> RolloutResponse:
        result = rollout_checkpoint(req.checkpoint, req.seed, req.out)
        return RolloutResponse(
            out_path=result.out_path, steps=result.steps, outcome=result.outcome.value
        )

    @app.post("/plot", response_model=PlotResponse)
    def plot(req: PlotRequest) -> PlotResponse:
        plot_metrics(req.metrics, req.out)
        return PlotResponse(out_path=req.out)

    return app
