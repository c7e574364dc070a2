from pathlib import Path
from typing import Any, Callable, Dict, Optional
import json
import logging

from core.bench import build_case, run_benchmark
from core.errors import ArtifactIOError, ConfigError, ImageDimensionError
from core.fitness import GrayImage, warp
from core.ga.strategies import StrategyFactory
from core.pyramid import run_coarse_to_fine
from core.recorder import LevelRecorder
from core.schemas import RunConfig
from parsers import image_parser, lattice_parser, table_parser
from utils.logging_setup import setup_logging

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[str, str], None]


class RegistrationEngine:
    """
    Orchestrates the estimate / warp / synth / bench workflows on files.

    Inputs are always loaded and validated before the output directory is
    touched, so a failing command leaves no partial outputs behind.
    """

    def __init__(
        self,
        config: Optional[RunConfig] = None,
        on_progress: Optional[ProgressCallback] = None,
        log_to_file: bool = False,
        verbose: bool = False,
    ):
        self.config = config or RunConfig()
        self.on_progress = on_progress
        self.log_to_file = log_to_file
        self.verbose = verbose


    def _log(self, msg: str, style: str = "white") -> None:
        logger.info(msg)
        if self.on_progress:
            self.on_progress(msg, style)


    def _ensure_dir(self, out_dir: Path) -> Path:
        out_dir = Path(out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ArtifactIOError(f"Cannot create output directory {out_dir}: {e}") from e
        if self.log_to_file:
            setup_logging(out_dir, verbose=self.verbose)
        return out_dir


    def _write_json(self, payload: Dict[str, Any], path: Path) -> Path:
        try:
            with open(path, "w", encoding="utf-8") as f:
                json.dump(payload, f, indent=2, default=str)
        except OSError as e:
            raise ArtifactIOError(f"Cannot write {path}: {e}") from e
        return path


    def estimate(self, source_path: Path, target_path: Path, out_dir: Path, strategy: str = "pbo") -> Dict[str, Any]:
        """
        Coarse-to-fine estimation of the lattice that warps `source` onto `target`.

        Writes lattice.json, warped.png, run_summary.json and per-level logs
        under `out_dir`.
        """
        if strategy not in StrategyFactory.get_supported_strategies():
            raise ConfigError(
                f"Unknown strategy '{strategy}'. Supported: {', '.join(StrategyFactory.get_supported_strategies())}"
            )
        source = image_parser().read(source_path)
        target = image_parser().read(target_path)
        if (source.w, source.h) != (target.w, target.h):
            raise ImageDimensionError(
                f"Source is {source.w}x{source.h} but target is {target.w}x{target.h}"
            )
        cfg = self.config
        schedule = cfg.schedule(source.w, source.h)
        ga = cfg.to_ga_config()

        out_dir = self._ensure_dir(out_dir)
        recorder = LevelRecorder(out_dir / "levels", label=f"estimate:{strategy}")
        self._log(f"Estimating {source.w}x{source.h} deformation over {len(schedule.levels)} levels", "cyan")
        result = run_coarse_to_fine(
            source,
            target,
            schedule,
            ga,
            seed=cfg.seed,
            strategy=strategy,
            threads=cfg.threads,
            recorder=recorder,
            on_progress=self.on_progress,
        )

        lattice_path = lattice_parser().write(result.lattice, out_dir / "lattice.json")
        warped_path = image_parser().write(warp(source, result.lattice), out_dir / "warped.png")
        summary = recorder.get_summary()
        summary["config"] = cfg.model_dump()
        self._write_json(summary, out_dir / "run_summary.json")
        self._log(f"Final elite SAD {result.elite_sad:.4f}; lattice written to {lattice_path}", "green")
        return {
            "success": True,
            "lattice": str(lattice_path),
            "warped": str(warped_path),
            "elite_sad": result.elite_sad,
            "max_node_norm": result.lattice.max_norm(),
        }


    def warp(self, source_path: Path, lattice_path: Path, out_path: Path) -> Dict[str, Any]:
        """Apply a lattice file to an image."""
        source = image_parser().read(source_path)
        lattice = lattice_parser().read(lattice_path)
        warped = warp(source, lattice)
        written = image_parser().write(warped, out_path)
        self._log(f"Warped image written to {written}", "green")
        return {"success": True, "warped": str(written)}


    def synth(self, out_dir: Path, image_path: Optional[Path] = None, case_id: int = 0) -> Dict[str, Any]:
        """
        One synthetic case: target image, ground-truth lattice and landmarks.

        Without `image_path` the source is a procedural texture, also written out.
        """
        source: Optional[GrayImage] = image_parser().read(image_path) if image_path else None
        case = build_case(self.config, case_id, source)

        out_dir = self._ensure_dir(out_dir)
        paths = {
            "target": image_parser().write(case.target, out_dir / "target.png"),
            "gt_lattice": lattice_parser().write(case.gt_lattice, out_dir / "gt_lattice.json"),
            "landmarks": table_parser().write_landmarks(case.landmarks, out_dir / "landmarks.csv"),
        }
        if source is None:
            paths["source"] = image_parser().write(case.source, out_dir / "source.png")
        self._log(
            f"Synthetic case {case_id}: gt lattice {case.gt_lattice.spec.k}x{case.gt_lattice.spec.l}, "
            f"max node norm {case.gt_lattice.max_norm():.2f}px",
            "green",
        )
        return {"success": True, **{k: str(v) for k, v in paths.items()}}


    def bench(self, out_dir: Path, image_path: Optional[Path] = None) -> Dict[str, Any]:
        """Full synthetic benchmark; report files land in `out_dir`."""
        source: Optional[GrayImage] = image_parser().read(image_path) if image_path else None
        out_dir = self._ensure_dir(out_dir)
        report = run_benchmark(self.config, out_dir=out_dir, source=source, on_progress=self.on_progress)
        summary = report.summary()
        pbo = summary["rmse_pbo"]["mean"]
        if pbo is not None:
            self._log(
                f"Mean RMSE pbo {pbo:.3f}px, baseline {summary['rmse_baseline']['mean']:.3f}px, "
                f"identity {summary['rmse_identity']['mean']:.3f}px "
                f"({summary['diversity_wins']}/{summary['completed']} diversity wins)",
                "cyan",
            )
        return {"success": not report.failures, **summary}
