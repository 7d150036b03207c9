"""
Artifacts of an identification run: mode images, temporal trends and the
human/JSON report.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..core.logging import get_logger
from ..models.schemas import ModeSet
from .io import PathLike, atomic_write_bytes, atomic_write_text

logger = get_logger(__name__)


def mode_to_rgb(values: np.ndarray, scale: float) -> np.ndarray:
    """Positive entries white, negative entries red, intensity |v| / scale"""
    intensity = np.zeros_like(values) if scale == 0 else np.clip(np.abs(values) / scale, 0.0, 1.0)
    level = np.rint(intensity * 255.0).astype(np.uint8)
    rgb = np.zeros(values.shape + (3,), dtype=np.uint8)
    rgb[..., 0] = level
    positive = values >= 0
    rgb[..., 1] = np.where(positive, level, 0)
    rgb[..., 2] = np.where(positive, level, 0)
    return rgb


def encode_ppm(rgb: np.ndarray) -> bytes:
    height, width, _ = rgb.shape
    return f"P6\n{width} {height}\n255\n".encode("ascii") + np.ascontiguousarray(rgb).tobytes()


def write_mode_images(modes: ModeSet, frame_shape: Optional[Tuple[int, int]], directory: PathLike) -> List[Path]:
    """One real/imaginary PPM pair per spatial mode, both scaled by max |psi_k|.

    Without a frame shape each mode is drawn as a 1-pixel-high strip.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    frame_shape = frame_shape or (1, modes.spatial.shape[0])
    paths = []
    for k, column in enumerate(modes.spatial.T, start=1):
        scale = float(np.max(np.abs(column))) if column.size else 0.0
        for part, values in (("re", column.real), ("im", column.imag)):
            path = directory / f"mode_{k:02d}_{part}.ppm"
            atomic_write_bytes(path, encode_ppm(mode_to_rgb(values.reshape(frame_shape), scale)))
            paths.append(path)
    logger.info("mode_images_written", directory=str(directory), modes=modes.spatial.shape[1])
    return paths


def trend_table(modes: ModeSet, n_samples: int) -> pd.DataFrame:
    """Long-format lambda_k^(t/dt) sampled at the observed times t = i dt"""
    times = np.arange(n_samples) * modes.dt
    values = modes.trend(times)
    rows = len(modes.temporal)
    return pd.DataFrame({
        "mode": np.repeat(np.arange(1, rows + 1), n_samples),
        "modulus": np.repeat(np.abs(modes.temporal), n_samples),
        "argument": np.repeat(np.angle(modes.temporal), n_samples),
        "time": np.tile(times, rows),
        "trend_re": values.real.reshape(-1),
        "trend_im": values.imag.reshape(-1),
    })


def write_trends(modes: ModeSet, n_samples: int, path: PathLike) -> pd.DataFrame:
    table = trend_table(modes, n_samples)
    atomic_write_text(path, table.to_csv(index=False, lineterminator="\n"))
    return table


def plot_trends(table: pd.DataFrame, path: PathLike) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 4), constrained_layout=True)
    for mode, group in table.groupby("mode"):
        modulus = group["modulus"].iloc[0]
        (line,) = ax.plot(group["time"], group["trend_re"], label=f"mode {mode} (|λ| = {modulus:.4f})")
        ax.plot(group["time"], group["trend_im"], linestyle="--", color=line.get_color())
    ax.set_xlabel("time")
    ax.set_ylabel("λ^(t/dt)  (solid Re, dashed Im)")
    ax.legend(frameon=False, fontsize="small")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def format_report(report: Dict[str, Any], fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)

    lines = [
        f"order n (requested / effective): {report['requested_n']} / {report['n']}",
        f"delay s: {report['s']}    outputs m: {report['m']}    samples N: {report['samples']}    columns ell: {report['ell']}    dt: {report['dt']:g}",
        f"residual (Frobenius): {report['residual_frobenius']:.6e}",
        f"relative residual:    {report['relative_residual']:.6e}",
        f"unique minimizer: {'yes' if report['unique'] else 'no'}",
        f"eigenvalues: {report['census']['real']} real, {report['census']['pairs']} conjugate pair(s)",
    ]
    for k, value in enumerate(report["eigenvalues"], start=1):
        lines.append(f"  {k:2d}: {value['re']:+.6f} {value['im']:+.6f}i   |λ| = {value['modulus']:.6f}")
    baseline: Optional[Dict[str, Any]] = report.get("baseline")
    if baseline:
        lines.append(
            f"baseline {baseline['name']}: objective {baseline['objective']:.6e} "
            f"(SID-DMD {report['residual_frobenius']:.6e}, excess {baseline['excess']:.6e})"
        )
    for step in report.get("steps", []):
        lines.append(f"step {step['stage']}.{step['action']}: {step['detail']}")
    for warning in report.get("warnings", []):
        lines.append(f"warning: {warning}")
    return "\n".join(lines)
