"""
File formats: CSV (one sample per row, optional header) and directories of
8-bit binary PGM (P5) frames, flattened row-major and scaled by v/255.
All writers go through a temp file in the target directory and an atomic rename.
"""

import os
import tempfile
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import pandas as pd

from ..core.exceptions import DimensionMismatchError, IngestError
from ..core.logging import get_logger
from ..models.schemas import OutputSequence

logger = get_logger(__name__)

PathLike = Union[str, Path]


def atomic_write_bytes(path: PathLike, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise


def atomic_write_text(path: PathLike, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


# CSV
def _is_label(cell) -> bool:
    if not isinstance(cell, str) or not cell.strip():
        return False
    try:
        float(cell)
    except ValueError:
        return True
    return False


def read_csv(path: PathLike) -> np.ndarray:
    path = Path(path)
    try:
        raw = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise IngestError(f"cannot read CSV {path}: {e}")

    # Header is optional: only a first row with no empty or numeric cell is one
    if raw.iloc[0].map(_is_label).all():
        raw = raw.iloc[1:]

    values = raw.apply(pd.to_numeric, errors="coerce")
    if values.isna().to_numpy().any():
        bad_row = int(np.where(values.isna().to_numpy().any(axis=1))[0][0]) + 1
        raise IngestError(f"{path}: row {bad_row} has missing or non-numeric values (inconsistent row lengths?)")
    # float() per cell keeps the shortest round-trip decimal form bit-exact
    return raw.apply(lambda column: column.str.strip()).astype(float).to_numpy()


def write_csv(seq: OutputSequence, path: PathLike, header: bool = True) -> None:
    frame = pd.DataFrame(seq.samples, columns=[f"y{j}" for j in range(seq.m)])
    atomic_write_text(path, frame.to_csv(index=False, header=header, lineterminator="\n"))


# PGM
def _pgm_tokens(data: bytes, count: int) -> Tuple[List[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping # comments"""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pgm(path: PathLike) -> np.ndarray:
    """8-bit binary PGM as a (height, width) array in [0, 1]"""
    path = Path(path)
    try:
        data = path.read_bytes()
        (magic, width, height, maxval), offset = _pgm_tokens(data, 4)
        width, height, maxval = int(width), int(height), int(maxval)
    except (OSError, ValueError) as e:
        raise IngestError(f"cannot read PGM {path}: {e}")
    if magic != b"P5":
        raise IngestError(f"{path} is not a binary PGM (P5) file")
    if not 0 < maxval <= 255:
        raise IngestError(f"{path}: only 8-bit PGM is supported (maxval {maxval})")
    raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=offset) if len(data) >= offset + width * height else None
    if raster is None:
        raise IngestError(f"{path}: raster shorter than {width}x{height}")
    return raster.reshape(height, width).astype(float) / 255.0


def write_pgm(frame: np.ndarray, path: PathLike) -> None:
    """Quantize a [0, 1] frame to 8 bits (values outside are clipped)"""
    height, width = frame.shape
    raster = np.clip(np.rint(np.asarray(frame) * 255.0), 0, 255).astype(np.uint8)
    atomic_write_bytes(path, f"P5\n{width} {height}\n255\n".encode("ascii") + raster.tobytes())


def write_frames(seq: OutputSequence, directory: PathLike) -> List[Path]:
    if seq.frame_shape is None:
        raise IngestError("sequence has no frame shape; cannot write frames")
    directory = Path(directory)
    digits = max(4, len(str(seq.n_samples)))
    paths = []
    for k, sample in enumerate(seq.samples):
        path = directory / f"frame_{k:0{digits}d}.pgm"
        write_pgm(sample.reshape(seq.frame_shape), path)
        paths.append(path)
    return paths


def read_frames(directory: PathLike) -> Tuple[np.ndarray, Tuple[int, int]]:
    directory = Path(directory)
    if not directory.is_dir():
        raise IngestError(f"{directory} is not a directory of PGM frames")
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() == ".pgm")
    if not files:
        raise IngestError(f"no .pgm files found in {directory}")

    frames = []
    shape = None
    for path in files:
        frame = read_pgm(path)
        if shape is None:
            shape = frame.shape
        elif frame.shape != shape:
            raise DimensionMismatchError(f"{path.name} is {frame.shape[1]}x{frame.shape[0]}, expected {shape[1]}x{shape[0]}")
        frames.append(frame.reshape(-1))
    return np.vstack(frames), shape


def ingest(path: PathLike, format: str = "csv", dt: float = None) -> OutputSequence:
    """Load an output sequence from a CSV file or a directory of PGM frames"""
    if format == "csv":
        samples = read_csv(path)
        frame_shape = None
    elif format == "frames":
        samples, frame_shape = read_frames(path)
    else:
        raise IngestError(f"unknown input format {format!r}; expected csv or frames")

    if samples.shape[0] < 2:
        raise IngestError(f"{path}: need at least 2 samples, got {samples.shape[0]}")
    logger.info("ingested", path=str(path), format=format, samples=samples.shape[0], m=samples.shape[1])
    return OutputSequence(samples=samples, dt=dt, frame_shape=frame_shape)
