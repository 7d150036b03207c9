import functools
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
import numpy as np

from ..core.config import settings
from ..core.exceptions import InvalidInputError, SidDmdError
from ..core.logging import configure_logging, get_logger
from ..models.schemas import IdentificationResult, OutputSequence
from ..pipeline.orchestrator import IdentificationOrchestrator
from ..services.baselines import truncated_dmd, upc_identify
from ..services.datagen import lc_surrogate, random_observable_system, simulate
from ..services.embedding import center, stacked_window
from ..services.sysid import predict as predict_outputs
from .io import atomic_write_text, ingest, write_csv, write_frames
from .model_io import load_model, save_model
from .render import format_report, plot_trends, write_mode_images, write_trends

logger = get_logger(__name__)


def handle_errors(func):
    """Report failures as one JSON line on stderr and exit 1"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SidDmdError as e:
            click.echo(json.dumps(e.to_dict()), err=True)
            raise SystemExit(1)
        except (click.exceptions.Exit, click.ClickException, SystemExit):
            raise
        except Exception as e:
            logger.exception("unexpected_error")
            click.echo(json.dumps({"error": "internal", "detail": str(e)}), err=True)
            raise SystemExit(1)

    return wrapper


def parse_frame_shape(ctx, param, value: Optional[str]) -> Optional[Tuple[int, int]]:
    if value is None:
        return None
    try:
        height, width = (int(part) for part in value.lower().split("x"))
    except ValueError:
        raise click.BadParameter("expected HxW, e.g. 31x34")
    if height < 1 or width < 1:
        raise click.BadParameter("frame dimensions must be positive")
    return height, width


def parse_spectrum(ctx, param, value: Optional[str]):
    if value is None:
        return None
    try:
        return [complex(token.strip().replace(" ", "")) for token in value.split(",") if token.strip()]
    except ValueError:
        raise click.BadParameter("expected comma-separated eigenvalues, e.g. 0.9,0.5+0.3j,0.5-0.3j")


input_format = click.option("--format", "fmt", type=click.Choice(["csv", "frames"]), default="csv", show_default=True, help="Input file format.")


@click.group()
@click.version_option(settings.VERSION, prog_name="siddmd")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False), default=None, help="Override LOG_LEVEL.")
@click.option("--log-format", type=click.Choice(["console", "json"]), default=None, help="Override LOG_FORMAT.")
def cli(log_level, log_format):
    """SID-DMD: identify linear dynamics and spatiotemporal modes from output data."""
    configure_logging(log_level, log_format)


def build_report(result: IdentificationResult, seq: OutputSequence, dt: float) -> Dict[str, Any]:
    lowrank, mode_set = result.lowrank, result.modes
    return {
        "m": seq.m,
        "n": result.model.n,
        "requested_n": lowrank.requested_n,
        "s": lowrank.s,
        "ell": result.hankel.ell,
        "samples": seq.n_samples,
        "dt": dt,
        "residual_frobenius": lowrank.residual_frobenius,
        "relative_residual": lowrank.relative_residual,
        "unique": result.unique,
        "census": mode_set.census(),
        "eigenvalues": [
            {"re": float(v.real), "im": float(v.imag), "modulus": float(abs(v)), "argument": float(np.angle(v))}
            for v in mode_set.temporal
        ],
        "steps": [step.model_dump() for step in result.steps],
        "warnings": list(result.warnings),
    }


def compare_baseline(name: str, result: IdentificationResult) -> Dict[str, Any]:
    n = result.lowrank.requested_n
    if name == "upc":
        objective = upc_identify(result.hankel, n).objective
    else:
        objective = truncated_dmd(result.hankel, n).objective
    return {
        "name": name,
        "objective": objective,
        "siddmd_objective": result.lowrank.residual_frobenius,
        "excess": objective - result.lowrank.residual_frobenius,
    }


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True, help="CSV file or directory of PGM frames.")
@input_format
@click.option("--order", type=click.IntRange(min=1), required=True, help="Model order n.")
@click.option("--delay", type=click.IntRange(min=1), required=True, help="Delay-embedding order s.")
@click.option("--dt", type=click.FloatRange(min=0, min_open=True), default=settings.DEFAULT_DT, show_default=True, help="Sampling interval in seconds.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=settings.DEFAULT_OUTPUT_DIR, show_default=True, help="Output directory.")
@click.option("--baseline", type=click.Choice(["upc", "tdmd", "none"]), default="none", show_default=True, help="Reference method to compare objectives against.")
@click.option("--report", "report_format", type=click.Choice(["json", "text"]), default="text", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized diagnostics.")
@click.option("--extraction", type=click.Choice(["factor", "shift"]), default="factor", show_default=True, help="How A is extracted from the factored map.")
@click.option("--center", "center_data", is_flag=True, help="Subtract the temporal mean before identification.")
@click.option("--frame-shape", callback=parse_frame_shape, help="Image shape HxW for CSV inputs.")
@click.option("--plot", is_flag=True, help="Also write trends.png.")
@handle_errors
def identify(input_path, fmt, order, delay, dt, out_dir, baseline, report_format, seed, extraction, center_data, frame_shape, plot):
    """Identify (A, C) and modes from an output sequence."""
    seq = ingest(input_path, fmt, dt=dt)
    if frame_shape is not None:
        seq = OutputSequence(samples=seq.samples, dt=dt, frame_shape=frame_shape)
    mean = None
    if center_data:
        seq, mean = center(seq)

    logger.info("identify_started", input=str(input_path), n=order, s=delay, dt=dt, seed=seed)
    result = IdentificationOrchestrator().run(seq, n=order, s=delay, dt=dt, method=extraction)

    out = Path(out_dir)
    save_model(result, out / "model.json", mean=mean, frame_shape=seq.frame_shape)
    write_mode_images(result.modes, seq.frame_shape, out / "modes")
    table = write_trends(result.modes, seq.n_samples, out / "trends.csv")
    if plot:
        plot_trends(table, out / "trends.png")

    report = build_report(result, seq, dt)
    report["seed"] = seed
    if baseline != "none":
        report["baseline"] = compare_baseline(baseline, result)
    text = format_report(report, report_format)
    atomic_write_text(out / ("report.json" if report_format == "json" else "report.txt"), text + "\n")
    click.echo(text)


@cli.group()
def generate():
    """Write synthetic output sequences."""


@generate.command()
@click.option("--out", "out_path", type=click.Path(), required=True, help="CSV file, or directory for --format frames.")
@input_format
@click.option("--width", type=click.IntRange(min=2), default=34, show_default=True)
@click.option("--height", type=click.IntRange(min=2), default=31, show_default=True)
@click.option("--frames", type=click.IntRange(min=2), default=71, show_default=True)
@click.option("--speed", type=click.FloatRange(min=0, min_open=True), default=1.0, show_default=True, help="Scales the growth rate of the front.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--dt", type=click.FloatRange(min=0, min_open=True), default=1.0 / 30.0, show_default=True)
@handle_errors
def surrogate(out_path, fmt, width, height, frames, speed, seed, dt):
    """Video-like surrogate driven by a hidden 3-state linear system."""
    seq = lc_surrogate(width=width, height=height, frames=frames, speed=speed, seed=seed, dt=dt)
    if fmt == "frames":
        write_frames(seq, out_path)
    else:
        write_csv(seq, out_path)
    click.echo(json.dumps({"out": str(out_path), "samples": seq.n_samples, "m": seq.m, "frame_shape": list(seq.frame_shape)}))


@generate.command()
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--order", type=click.IntRange(min=1), required=True, help="State dimension n.")
@click.option("--outputs", type=click.IntRange(min=1), default=1, show_default=True, help="Output dimension m.")
@click.option("--steps", type=click.IntRange(min=2), default=100, show_default=True)
@click.option("--spectrum", callback=parse_spectrum, help="Comma-separated eigenvalues closed under conjugation.")
@click.option("--noise", type=click.FloatRange(min=0), default=0.0, show_default=True, help="Process and measurement noise std.")
@click.option("--seed", type=int, default=0, show_default=True)
@handle_errors
def system(out_path, order, outputs, steps, spectrum, noise, seed):
    """Trajectory of a random observable system with a prescribed spectrum."""
    if spectrum is None:
        spectrum = list(np.linspace(0.95, 0.5, order))
    model = random_observable_system(order, outputs, spectrum, seed=seed)
    x0 = np.random.default_rng(seed).standard_normal(order)
    seq = simulate(model, x0, steps, noise_std=noise, seed=seed)
    write_csv(seq, out_path)
    click.echo(json.dumps({"out": str(out_path), "samples": seq.n_samples, "m": seq.m, "n": order}))


@cli.command()
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@input_format
@click.option("--horizon", type=click.IntRange(min=1), required=True, help="Number of samples to forecast past the data.")
@click.option("--method", type=click.Choice(["state-space", "extended-ar"]), default="state-space", show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="CSV file for the forecast (stdout if omitted).")
@handle_errors
def predict(model_path, input_path, fmt, horizon, method, out_path):
    """Forecast the samples that follow the last observed window."""
    document = load_model(model_path)
    seq = ingest(input_path, fmt, dt=document.dt)
    if seq.m != document.m:
        raise InvalidInputError(f"input has {seq.m} outputs, model expects {document.m}")

    samples = seq.samples
    if document.mean is not None:
        samples = samples - np.asarray(document.mean)
    window_seq = OutputSequence(samples=samples)
    start = seq.n_samples - document.s
    window = stacked_window(window_seq, start, document.s)

    # The window ends at the last sample, so the first s-1 predicted outputs are already observed
    prediction = predict_outputs(document.to_model(), document.to_lowrank(), window, horizon + document.s - 1, method)
    outputs = prediction.outputs[document.s - 1:]
    if document.mean is not None:
        outputs = outputs + np.asarray(document.mean)

    forecast = OutputSequence(samples=outputs, dt=document.dt)
    if out_path:
        write_csv(forecast, out_path)
    else:
        for row in outputs:
            click.echo(",".join(repr(float(v)) for v in row))
