import json
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from pydantic import ValidationError

from ..core.exceptions import IngestError, InvalidInputError
from ..core.logging import get_logger
from ..models.documents import ModelDocument
from ..models.schemas import IdentificationResult
from .io import PathLike, atomic_write_text

logger = get_logger(__name__)


def save_model(
    result: IdentificationResult,
    path: PathLike,
    mean: Optional[np.ndarray] = None,
    frame_shape: Optional[Tuple[int, int]] = None,
) -> ModelDocument:
    """Write model.json; floats use the shortest round-trip decimal form"""
    document = ModelDocument.from_result(result, mean=mean, frame_shape=frame_shape)
    atomic_write_text(path, json.dumps(document.to_payload(), indent=2) + "\n")
    logger.info("model_saved", path=str(path), n=document.n, s=document.s, m=document.m)
    return document


def load_model(path: PathLike) -> ModelDocument:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise IngestError(f"cannot read model {path}: {e}")
    try:
        return ModelDocument.from_payload(payload)
    except ValidationError as e:
        raise InvalidInputError(f"malformed model document {path}: {e.errors()[0]['msg']}")
