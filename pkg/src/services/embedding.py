from typing import Tuple

import numpy as np

from ..core.exceptions import InsufficientDataError, InvalidInputError
from ..core.logging import get_logger
from ..models.schemas import HankelPair, OutputSequence

logger = get_logger(__name__)


def stacked_window(seq: OutputSequence, k: int, s: int) -> np.ndarray:
    """Window [y_k; y_{k+1}; ...; y_{k+s-1}] (k is a 0-based sample index)"""
    if s < 1:
        raise InvalidInputError(f"delay order s must be >= 1, got {s}")
    if k < 0 or k + s > seq.n_samples:
        raise InvalidInputError(f"window at index {k} with delay {s} is out of range for {seq.n_samples} samples")
    return seq.samples[k:k + s].reshape(-1).copy()


def hankel_embed(seq: OutputSequence, s: int) -> HankelPair:
    """Block-Hankel embedding with overlapping past/future splits"""
    if s < 1:
        raise InvalidInputError(f"delay order s must be >= 1, got {s}")
    n_samples, m = seq.samples.shape
    if n_samples < s + 1:
        raise InsufficientDataError(f"Hankel embedding with delay {s} needs s+1 samples", required=s + 1, available=n_samples)

    ell = n_samples - s
    # windows[c] = samples[c:c+s] flattened block-wise; materialized, not a view
    windows = np.lib.stride_tricks.sliding_window_view(seq.samples, s, axis=0)  # (ell+1, m, s)
    y_full = np.ascontiguousarray(windows.transpose(0, 2, 1).reshape(ell + 1, m * s).T)

    logger.debug("hankel_embedded", m=m, s=s, ell=ell)
    return HankelPair(
        y_full=y_full,
        y_past=y_full[:, :ell].copy(),
        y_future=y_full[:, 1:].copy(),
        s=s,
        m=m,
        ell=ell,
    )


def unembed(h: HankelPair) -> np.ndarray:
    """Recover the N x m sample array from the first block row plus the last column"""
    head = h.y_full[:h.m, :].T
    tail = h.y_full[h.m:, -1].reshape(h.s - 1, h.m)
    return np.vstack([head, tail])


def center(seq: OutputSequence) -> Tuple[OutputSequence, np.ndarray]:
    """Subtract the temporal mean; returns the centered sequence and the mean"""
    mean = seq.samples.mean(axis=0)
    centered = OutputSequence(samples=seq.samples - mean, dt=seq.dt, frame_shape=seq.frame_shape)
    return centered, mean
