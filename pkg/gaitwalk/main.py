"""
FastAPI identification service over an enrolled model directory.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

from fastapi import Depends, FastAPI, File, HTTPException, Query, UploadFile

from .audio.io import load_mono
from .core.config import Settings, get_settings
from .core.errors import (
    AllPathsInvalid,
    AudioError,
    FeatureError,
    GaitwalkError,
    ModelStoreError,
    NoValidPath,
)
from .core.logging import setup_logging
from .hmm.model import DecodeGrammar
from .recognizer import SubjectModelSet, identify

settings = get_settings()
setup_logging(settings)
logger = logging.getLogger(__name__)

app = FastAPI(
    title=settings.app_name,
    version=settings.app_version,
    description="Closed-set identification of walking persons from audio",
    docs_url="/docs",
    redoc_url="/redoc",
)

_loaded: Dict[Path, SubjectModelSet] = {}


def get_model_set(settings: Settings = Depends(get_settings)) -> Optional[SubjectModelSet]:
    """Model set from settings.model_dir, read once per directory."""
    if settings.model_dir is None:
        return None
    directory = Path(settings.model_dir)
    if directory not in _loaded:
        _loaded[directory] = SubjectModelSet.load(directory)
        logger.info(f"Loaded {len(_loaded[directory].models)} subject models from {directory}")
    return _loaded[directory]


def require_model_set(
    model_set: Optional[SubjectModelSet] = Depends(get_model_set),
) -> SubjectModelSet:
    if model_set is None:
        raise HTTPException(status_code=503, detail="No model directory configured (GAITWALK_MODEL_DIR)")
    return model_set


@app.get("/")
async def root() -> Dict[str, Any]:
    return {
        "message": f"Welcome to {settings.app_name}!",
        "version": settings.app_version,
        "status": "healthy",
        "docs": "/docs",
    }


@app.get("/health")
async def health_check(settings: Settings = Depends(get_settings)) -> Dict[str, Any]:
    """Service health plus whether a model set is available."""
    try:
        model_set = get_model_set(settings)
    except ModelStoreError as e:
        logger.error(f"Model directory unreadable: {e}")
        model_set = None
    return {
        "application": "healthy",
        "models_loaded": model_set is not None,
        "subjects": len(model_set.models) if model_set is not None else 0,
    }


@app.get("/subjects")
async def list_subjects(model_set: SubjectModelSet = Depends(require_model_set)) -> Dict[str, Any]:
    first = next(iter(model_set.models.values()), None)
    return {
        "subjects": model_set.subject_ids,
        "states": first.num_states if first is not None else model_set.hmm_config.num_states,
        "dim": first.dim if first is not None else None,
        "cyclic": model_set.hmm_config.cyclic,
    }


@app.post("/identify")
async def identify_recording(
    recording: UploadFile = File(..., description="PCM WAV recording"),
    grammar: DecodeGrammar = Query(DecodeGrammar.MULTI_STEP),
    top: Optional[int] = Query(None, ge=1, description="Number of ranked subjects to return"),
    model_set: SubjectModelSet = Depends(require_model_set),
) -> Dict[str, Any]:
    """Rank every enrolled subject for one uploaded recording."""
    raw = await recording.read()
    try:
        result = identify(model_set, load_mono(raw), grammar)
    except (AllPathsInvalid, NoValidPath) as e:
        raise HTTPException(status_code=422, detail=str(e))
    except (AudioError, FeatureError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except GaitwalkError as e:
        logger.error(f"Identification failed for {recording.filename}: {e}")
        raise HTTPException(status_code=500, detail=f"Internal server error: {e}")

    ranked = result.ranked[:top] if top is not None else result.ranked
    logger.info(f"Identified {recording.filename} as {result.predicted}")
    return {
        "predicted": result.predicted,
        "ranked": [
            {"subject_id": sid, "log_likelihood": score if score != float("-inf") else None}
            for sid, score in ranked
        ],
        "step_count": result.decode.step_count,
        "step_boundaries_seconds": result.step_boundary_seconds,
    }
