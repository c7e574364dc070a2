import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import typer
from pydantic import ValidationError

# Local imports
from core.engine import RegistrationEngine
from core.errors import ArtifactIOError, ConfigError, PBGAError
from core.schemas import RunConfig
from parsers import load_config
from utils.logging_setup import setup_logging

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_RUNTIME = 4

logger = logging.getLogger(__name__)


app = typer.Typer(
    help=(
        "PBGA - FFD image registration with a probabilistic bitwise genetic algorithm. "
        "Defaults: 3 pyramid levels, 3x3 base lattice, 5 bits per parameter, 3 px radius; "
        "the GA constants (w_max=0.5, s_bit=2.0, s_fit=0.3, e=1.0, p_min=0.1, g_size=200, "
        "population=50) are implementation defaults."
    ),
    add_completion=False,
    no_args_is_help=True,
)

# Shared options
ConfigOpt = typer.Option(None, "--config", help="key = value configuration file")
SeedOpt = typer.Option(None, "--seed", help="Master seed (overrides the config file)")
ThreadsOpt = typer.Option(None, "--threads", help="Worker threads for objective evaluation")
SetOpt = typer.Option(None, "--set", help="Config override, e.g. --set g_size=50 (repeatable)")
VerboseOpt = typer.Option(False, "--verbose", "-v", help="Debug logging")


def progress(msg: str, color: str = typer.colors.WHITE) -> None:
    typer.secho(msg, fg=color)


def _fail(message: str, code: int) -> None:
    typer.secho(f"❌ {message}", fg=typer.colors.RED, err=True)
    raise typer.Exit(code=code)


def _execute(action: Callable[[], Dict[str, Any]]) -> Dict[str, Any]:
    """Runs an engine action and maps failures onto exit codes."""
    try:
        return action()
    except (ConfigError, ValidationError) as e:
        _fail(f"Configuration error: {e}", EXIT_CONFIG)
    except ArtifactIOError as e:
        _fail(f"I/O error: {e}", EXIT_IO)
    except OSError as e:
        _fail(f"I/O error: {e}", EXIT_IO)
    except PBGAError as e:
        _fail(f"Run failed: {e}", EXIT_RUNTIME)
    except Exception as e:
        logger.exception("Unexpected failure")
        _fail(f"Run failed: {type(e).__name__}: {e}", EXIT_RUNTIME)


def _engine(
    config: Optional[Path],
    overrides: Optional[List[str]],
    verbose: bool,
    **flags: Any,
) -> RegistrationEngine:
    setup_logging(verbose=verbose)
    cfg: RunConfig = _execute(lambda: load_config(config, overrides or (), **flags))
    return RegistrationEngine(cfg, on_progress=progress, log_to_file=True, verbose=verbose)


@app.command(name="estimate")
def run_estimate(
    source: Path = typer.Argument(..., help="Source (moving) image, PNG or PGM"),
    target: Path = typer.Argument(..., help="Target (fixed) image, PNG or PGM"),
    out: Path = typer.Option(Path("pbga_out"), "--out", help="Output directory"),
    strategy: str = typer.Option("pbo", "--strategy", help="Variation strategy: pbo or baseline"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    threads: Optional[int] = ThreadsOpt,
    overrides: Optional[List[str]] = SetOpt,
    verbose: bool = VerboseOpt,
) -> None:
    """[🧬 ESTIMATE] Coarse-to-fine lattice estimation from source to target."""
    engine = _engine(config, overrides, verbose, seed=seed, threads=threads)
    stats = _execute(lambda: engine.estimate(source, target, out, strategy=strategy))
    typer.secho(
        f"\n✅ Estimation complete: elite SAD {stats['elite_sad']:.4f}, "
        f"max node norm {stats['max_node_norm']:.3f}px",
        fg=typer.colors.GREEN,
    )


@app.command(name="warp")
def run_warp(
    source: Path = typer.Argument(..., help="Image to warp"),
    lattice: Path = typer.Argument(..., help="Lattice JSON file"),
    out: Path = typer.Option(Path("warped.png"), "--out", help="Output image (.png or .pgm)"),
    verbose: bool = VerboseOpt,
) -> None:
    """[🌀 WARP] Applies a lattice file to an image."""
    setup_logging(verbose=verbose)
    engine = RegistrationEngine(on_progress=progress, verbose=verbose)
    _execute(lambda: engine.warp(source, lattice, out))
    typer.secho("\n✅ Warp complete.", fg=typer.colors.GREEN)


@app.command(name="synth")
def run_synth(
    image: Optional[Path] = typer.Argument(None, help="Source image (procedural texture if omitted)"),
    out: Path = typer.Option(Path("pbga_synth"), "--out", help="Output directory"),
    case_id: int = typer.Option(0, "--case", help="Case index mixed into the seed"),
    gt_k: Optional[int] = typer.Option(None, "--gt-k", help="Ground-truth lattice columns"),
    gt_l: Optional[int] = typer.Option(None, "--gt-l", help="Ground-truth lattice rows"),
    gt_radius: Optional[float] = typer.Option(None, "--gt-radius", help="Ground-truth displacement radius (px)"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    overrides: Optional[List[str]] = SetOpt,
    verbose: bool = VerboseOpt,
) -> None:
    """[🎲 SYNTH] Generates a random ground-truth deformation and its target image."""
    engine = _engine(config, overrides, verbose, seed=seed, gt_k=gt_k, gt_l=gt_l, gt_radius=gt_radius)
    _execute(lambda: engine.synth(out, image_path=image, case_id=case_id))
    typer.secho("\n✅ Synthetic case written.", fg=typer.colors.GREEN)


@app.command(name="bench")
def run_bench(
    out: Path = typer.Option(Path("pbga_bench"), "--out", help="Report directory"),
    image: Optional[Path] = typer.Option(None, "--image", help="Use this image instead of procedural textures"),
    n_cases: Optional[int] = typer.Option(None, "--cases", help="Number of synthetic cases"),
    config: Optional[Path] = ConfigOpt,
    seed: Optional[int] = SeedOpt,
    threads: Optional[int] = ThreadsOpt,
    overrides: Optional[List[str]] = SetOpt,
    verbose: bool = VerboseOpt,
) -> None:
    """[📊 BENCH] PBO vs. crossover+mutation on synthetic deformations."""
    engine = _engine(config, overrides, verbose, seed=seed, threads=threads, n_cases=n_cases)
    stats = _execute(lambda: engine.bench(out, image_path=image))
    if stats.get("success"):
        typer.secho(f"\n✅ Benchmark complete: {stats['completed']} case(s).", fg=typer.colors.GREEN)
    else:
        failed = ", ".join(str(f["case_id"]) for f in stats.get("failures", []))
        typer.secho(f"\n⚠️ Benchmark finished with failed case(s): {failed}", fg=typer.colors.YELLOW)
        raise typer.Exit(code=EXIT_RUNTIME)


if __name__ == "__main__":
    app()
