from pathlib import Path
from typing import Any, Dict

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from src.config import settings
from src.config.pipeline_config import PipelineConfig, load_pipeline_config
from src.services.pipeline_service import run_pipeline

router = APIRouter()


class PipelineRunRequest(BaseModel):
    config_path: str = Field(..., min_length=1)
    overrides: Dict[str, Any] = Field(default_factory=dict)


def _inside_root(path: Path, root: Path) -> bool:
    try:
        path.resolve().relative_to(root)
    except ValueError:
        return False
    return True


def _check_paths(config: PipelineConfig, root: Path) -> None:
    paths = {"output_dir": config.run_dir, **config.input_paths()}
    outside = sorted(name for name, path in paths.items() if not _inside_root(path, root))
    if outside:
        raise HTTPException(status_code=403, detail=f"Paths outside the API root: {', '.join(outside)}")


@router.post("/run", response_model=Dict)
async def run(request: PipelineRunRequest):
    """
    Run the full pipeline for a config file and return the run manifest.

    The config file, every input it names and the run directory must lie
    under API_ROOT_DIR; relative config paths are taken from there.
    """
    root = Path(settings.API_ROOT_DIR).resolve()
    config_path = root / request.config_path
    if not _inside_root(config_path, root):
        raise HTTPException(status_code=403, detail="config_path is outside the API root")

    config = load_pipeline_config(config_path, request.overrides)
    _check_paths(config, root)
    bundle = run_pipeline(config)
    return {
        "message": "Pipeline completed successfully",
        "run_dir": str(bundle.run_dir),
        "summary": bundle.translation.texts,
        "frame_count": bundle.animation.frame_count,
        "manifest": bundle.manifest,
    }
