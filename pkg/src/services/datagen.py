"""
Seeded synthetic data: observable LTI systems with prescribed spectra, their
trajectories, random regression instances, and a video-like surrogate whose
frames are an exactly linear function of a hidden 3-state system.
"""

from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..core.config import settings
from ..core.exceptions import InvalidInputError, ObservabilityError
from ..core.logging import get_logger
from ..models.schemas import HankelPair, OutputSequence, StateSpaceModel
from .baselines import truncated_dmd
from .lowrank import optimal_objective
from .sysid import observability_matrix

logger = get_logger(__name__)


def _spectrum_blocks(spectrum: Sequence[complex], n: int) -> np.ndarray:
    values = [complex(v) for v in spectrum]
    if len(values) != n:
        raise InvalidInputError(f"spectrum has {len(values)} eigenvalues, expected n = {n}")

    blocks = []
    upper = sorted((v for v in values if v.imag > 0), key=lambda v: (v.real, v.imag))
    lower = sorted((v.conjugate() for v in values if v.imag < 0), key=lambda v: (v.real, v.imag))
    if len(upper) != len(lower) or any(not np.isclose(a, b) for a, b in zip(upper, lower)):
        raise InvalidInputError("spectrum must be closed under complex conjugation")
    for v in values:
        if v.imag == 0:
            blocks.append(np.array([[v.real]]))
    for v in upper:
        blocks.append(np.array([[v.real, -v.imag], [v.imag, v.real]]))
    return scipy.linalg.block_diag(*blocks)


def _well_conditioned(rng: np.random.Generator, n: int) -> np.ndarray:
    """T = Q1 diag(d) Q2 with d in [1, 10], so cond(T) <= 10"""
    q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
    q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
    d = rng.uniform(1.0, 10.0, size=n)
    return (q1 * d) @ q2


def random_observable_system(
    n: int,
    m: int,
    spectrum: Sequence[complex],
    seed: int,
    s: Optional[int] = None,
) -> StateSpaceModel:
    """A = T blockdiag(spectrum) T^-1, C random with Gamma_s of full column rank"""
    if n < 1 or m < 1:
        raise InvalidInputError(f"need n >= 1 and m >= 1, got n = {n}, m = {m}")
    s = n if s is None else s
    if m * s < n:
        raise ObservabilityError(f"m*s = {m * s} < n = {n}: Gamma_{s} cannot have full column rank")

    rng = np.random.default_rng(seed)
    block = _spectrum_blocks(spectrum, n)
    t = _well_conditioned(rng, n)
    if np.linalg.cond(t) >= settings.SYSTEM_CONDITION_LIMIT:
        raise InvalidInputError("failed to draw a well-conditioned similarity transform")
    a = t @ block @ np.linalg.inv(t)

    for attempt in range(settings.SYSTEM_SAMPLING_ATTEMPTS):
        c = rng.standard_normal((m, n))
        model = StateSpaceModel(a=a, c=c, s=s, m=m)
        if np.linalg.matrix_rank(observability_matrix(model, s)) == n:
            logger.debug("observable_system_drawn", n=n, m=m, s=s, attempts=attempt + 1)
            return model
    raise ObservabilityError(f"no observable (A, C) with index <= {s} after {settings.SYSTEM_SAMPLING_ATTEMPTS} attempts")


def simulate(
    model: StateSpaceModel,
    x0: Sequence[float],
    steps: int,
    noise_std: float = 0.0,
    seed: int = 0,
    dt: Optional[float] = None,
) -> OutputSequence:
    """x_{k+1} = A x_k + w_k, y_k = C x_k + v_k with i.i.d. Gaussian noise"""
    if steps < 1:
        raise InvalidInputError(f"steps must be >= 1, got {steps}")
    if noise_std < 0:
        raise InvalidInputError("noise_std must be nonnegative")
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.shape[0] != model.n:
        raise InvalidInputError(f"initial state has length {x.shape[0]}, expected {model.n}")

    rng = np.random.default_rng(seed)
    outputs = np.empty((steps, model.m))
    for k in range(steps):
        outputs[k] = model.c @ x
        if noise_std:
            outputs[k] += noise_std * rng.standard_normal(model.m)
        x = model.a @ x
        if noise_std:
            x = x + noise_std * rng.standard_normal(model.n)
    return OutputSequence(samples=outputs, dt=dt)


def _growth_rate(speed: float) -> float:
    return float(np.exp(0.05 * speed))


def lc_surrogate(
    width: int = 34,
    height: int = 31,
    frames: int = 71,
    speed: float = 1.0,
    seed: int = 0,
    dt: float = 1.0 / 30.0,
) -> OutputSequence:
    """Frames of a field brightening from the boundary inward.

    Hidden state: one real growth mode rho = exp(0.05 speed) and one decaying
    oscillatory pair 0.97 e^{±i 2pi/24}. Each frame is C x_k exactly, so the
    data are rank-3 linear in the hidden state.
    """
    if width < 2 or height < 2 or frames < 2:
        raise InvalidInputError("surrogate needs width, height >= 2 and at least 2 frames")
    if speed <= 0:
        raise InvalidInputError("speed must be positive")
    rng = np.random.default_rng(seed)

    rows, cols = np.meshgrid(np.linspace(0.0, 1.0, height), np.linspace(0.0, 1.0, width), indexing="ij")
    # Distance to the nearest boundary, 0 on the edge and 0.5 at the centre
    depth = np.minimum.reduce([rows, 1.0 - rows, cols, 1.0 - cols])
    front = np.exp(-6.0 * depth)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    ring_cos = np.cos(12.0 * np.pi * depth + phase) * front
    ring_sin = np.sin(12.0 * np.pi * depth + phase) * front
    c = np.column_stack([front.ravel(), 0.3 * ring_cos.ravel(), 0.3 * ring_sin.ravel()])

    rho = _growth_rate(speed)
    theta = 2.0 * np.pi / 24.0
    radius = 0.97
    a = np.array([
        [rho, 0.0, 0.0],
        [0.0, radius * np.cos(theta), -radius * np.sin(theta)],
        [0.0, radius * np.sin(theta), radius * np.cos(theta)],
    ])
    # Start dark: the growth mode reaches unit brightness at the last frame
    scale = rho ** -(frames - 1)
    x0 = np.array([scale, scale, scale])

    model = StateSpaceModel(a=a, c=c, s=1, m=width * height)
    seq = simulate(model, x0, frames)
    return OutputSequence(samples=seq.samples, dt=dt, frame_shape=(height, width))


def random_regression_instance(ms: int, ell: int, seed: int, row_rank: Optional[int] = None) -> HankelPair:
    """Seeded Gaussian (Y_p, Y_f); Y_p of the given row rank when requested"""
    rng = np.random.default_rng(seed)
    if row_rank is None:
        y_past = rng.standard_normal((ms, ell))
    else:
        if not 0 < row_rank <= min(ms, ell):
            raise InvalidInputError(f"row rank {row_rank} must lie in [1, min(ms, ell)] = [1, {min(ms, ell)}]")
        y_past = rng.standard_normal((ms, row_rank)) @ rng.standard_normal((row_rank, ell))
    y_future = rng.standard_normal((ms, ell))
    return HankelPair.from_blocks(y_past, y_future)


def misaligned_instance(ms: int = 6, ell: int = 12, n: int = 2, seed: int = 0, trials: int = 32) -> Tuple[HankelPair, float]:
    """Instance where the dominant directions of Y_p carry no future signal.

    Y_p = U diag(sigma) V^T with a steep spectrum and Y_f driven only by the
    weakest directions; among `trials` seeded candidates the one with the
    largest truncated-DMD suboptimality gap is returned with that gap.
    """
    if n >= min(ms, ell):
        raise InvalidInputError("n must be smaller than min(ms, ell) for a truncation gap to exist")
    rng = np.random.default_rng(seed)
    best_pair, best_gap = None, -np.inf
    k = min(ms, ell)
    for _ in range(trials):
        u, _ = np.linalg.qr(rng.standard_normal((ms, ms)))
        v, _ = np.linalg.qr(rng.standard_normal((ell, ell)))
        sigma = np.geomspace(100.0, 1.0, k)
        y_past = (u[:, :k] * sigma) @ v[:, :k].T
        weights = np.zeros(k)
        weights[-n:] = rng.uniform(1.0, 5.0, size=n)
        mixing = rng.standard_normal((ms, k)) * weights
        y_future = mixing @ v[:, :k].T
        pair = HankelPair.from_blocks(y_past, y_future)
        gap = truncated_dmd(pair, n).objective - optimal_objective(pair, n)
        if gap > best_gap:
            best_pair, best_gap = pair, gap
    logger.info("misaligned_instance_found", ms=ms, ell=ell, n=n, gap=best_gap)
    return best_pair, float(best_gap)
