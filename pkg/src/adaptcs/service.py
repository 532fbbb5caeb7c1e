"""HTTP front end for a trained pair bank.

Run with ``uvicorn adaptcs.service:app`` and ``ADAPTCS_BANK=<bank dir>``, or
build an app directly with ``create_app(bank_dir)``.  Training and batch
evaluation stay on the command line; the service only answers per-scan
requests.
"""

from __future__ import annotations

import math
import os
import warnings
from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .io import format_mask
from .masks import budget_for, equispaced_mask, lowfreq_mask, random_mask, vd_mask
from .pipeline import PairBank, infer_adaptive
from .transforms import ImaginaryResidualWarning
from .uncertainty import DegenerateUncertaintyError
from .verify import SUITES, run_suite


class Health(BaseModel):
    status: str
    version: str
    bank_loaded: bool
    J: int | None = None
    shape: tuple[int, int] | None = None


class InferRequest(BaseModel):
    real: list[list[float]]
    imag: list[list[float]]
    seed: int = Field(0, ge=0)


class InferResponse(BaseModel):
    chosen: int
    theta: dict
    image: list[list[float]]


class MaskRequest(BaseModel):
    kind: Literal["random", "vd", "equispaced", "lowfreq"]
    layout: Literal["point2d", "line1d"] = "point2d"
    shape: tuple[int, int]
    accel: float = Field(4.0, ge=1)
    lf_extent: int = Field(8, ge=0)
    a_f: float = Field(1.5, gt=0)
    seed: int = Field(0, ge=0)


class MaskResponse(BaseModel):
    budget: int
    acceleration: float
    text: str


class VerifyRequest(BaseModel):
    suite: Literal[SUITES + ("all",)] = "all"  # type: ignore[valid-type]


class VerifyResponse(BaseModel):
    passed: bool
    report: dict


def _finite(obj):
    """Replace infinities so the report is valid JSON."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def create_app(bank_dir=None) -> FastAPI:
    app = FastAPI(title="adaptcs", version=__version__)
    bank = PairBank.load(bank_dir) if bank_dir else None

    @app.get("/health", response_model=Health)
    def health() -> Health:
        if bank is None:
            return Health(status="ok", version=__version__, bank_loaded=False)
        return Health(status="ok", version=__version__, bank_loaded=True, J=bank.J, shape=bank.m0.shape)

    @app.post("/infer", response_model=InferResponse)
    def infer(req: InferRequest) -> InferResponse:
        if bank is None:
            raise HTTPException(503, "no pair bank loaded")
        k = np.asarray(req.real, dtype=np.float64) + 1j * np.asarray(req.imag, dtype=np.float64)
        if k.shape != bank.m0.shape:
            raise HTTPException(422, f"k-space shape {k.shape} does not match bank shape {bank.m0.shape}")
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ImaginaryResidualWarning)
                res = infer_adaptive(k, bank, req.seed)
        except DegenerateUncertaintyError as exc:
            raise HTTPException(422, str(exc)) from exc
        return InferResponse(chosen=res.chosen, theta=bank.thetas[res.chosen].to_dict(), image=res.image.tolist())

    @app.post("/masks", response_model=MaskResponse)
    def masks(req: MaskRequest) -> MaskResponse:
        try:
            m0 = lowfreq_mask(req.shape, req.layout, req.lf_extent)
            if req.kind == "lowfreq":
                m = m0
            else:
                budget = budget_for(req.shape, req.accel, req.layout)
                if req.kind == "random":
                    m = random_mask(req.shape, req.layout, m0, budget, req.seed)
                elif req.kind == "vd":
                    m = vd_mask(req.shape, req.layout, m0, budget, req.a_f, req.seed)
                else:
                    m = equispaced_mask(req.shape, m0, budget)
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc
        return MaskResponse(budget=m.budget, acceleration=m.acceleration, text=format_mask(m))

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        report = run_suite(req.suite)
        return VerifyResponse(passed=all(r["passed"] for r in report.values()), report=_finite(report))

    return app


app = create_app(os.environ.get("ADAPTCS_BANK"))
