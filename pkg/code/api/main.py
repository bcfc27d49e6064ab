import logging
from typing import Any, Dict, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, field_validator

from code.splitspan.config import Config, INPUT_KINDS
from code.splitspan.errors import SplitSpanError
from code.splitspan.orchestrator import Orchestrator, PipelineResult

logger = logging.getLogger(__name__)

app = FastAPI(title="split-span API", version="1.0.0")

# Configuration constants
MAX_INPUT_SIZE = 256 * 1024  # 256KB


class InputRequest(BaseModel):
    text: str
    kind: Optional[str] = None

    @field_validator('text')
    @classmethod
    def validate_text(cls, v):
        if len(v) > MAX_INPUT_SIZE:
            raise ValueError(f"Input size exceeds maximum allowed size of {MAX_INPUT_SIZE} bytes")
        if not v.strip():
            raise ValueError("Input cannot be empty")
        return v

    @field_validator('kind')
    @classmethod
    def validate_kind(cls, v):
        if v is not None and v not in INPUT_KINDS:
            raise ValueError(f"kind must be one of {INPUT_KINDS}")
        return v


class VerifyRequest(InputRequest):
    oracle_cap: Optional[int] = None


orchestrator = Orchestrator()


def _run(name: str, request: InputRequest, runner) -> Dict[str, Any]:
    try:
        logger.info(f"Running {name} on {len(request.text)} bytes of input")
        parsed = orchestrator.load(text=request.text, kind=request.kind)
        result: PipelineResult = runner(parsed)
        return {"ok": result.ok, "summary": result.summary, "result": result.data}
    except SplitSpanError as e:
        logger.warning(f"Invalid input for {name}: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Unexpected error in {name}: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail=f"An internal error occurred during {name}")


@app.get("/")
def read_root():
    return {"status": "split-span API is running", "version": "1.0.0"}


@app.post("/check")
def check(request: InputRequest):
    return _run("check", request, orchestrator.check)


@app.post("/decompose")
def decompose(request: InputRequest):
    return _run("decompose", request, orchestrator.decompose)


@app.post("/buneman")
def buneman(request: InputRequest):
    return _run("buneman", request, orchestrator.buneman)


@app.post("/tightspan")
def tightspan(request: InputRequest):
    return _run("tightspan", request, orchestrator.tightspan)


@app.post("/verify")
def verify(request: VerifyRequest):
    runner = orchestrator.verify
    if request.oracle_cap is not None:
        try:
            runner = Orchestrator(Config(oracle_cap=request.oracle_cap)).verify
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e))
    return _run("verify", request, runner)
