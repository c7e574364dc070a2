"""
Synthetic benchmark: PBO vs. the crossover + mutation baseline, both inside
the same coarse-to-fine harness, scored by landmark RMSE.
"""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from core.bench.metrics import landmark_rmse
from core.bench.synth import SyntheticCase, generate_case, procedural_texture
from core.errors import ArtifactIOError
from core.ffd import ControlLattice
from core.fitness import GrayImage
from core.ga.rng import Purpose, derive_seed
from core.pyramid import CoarseToFineResult, run_coarse_to_fine
from core.recorder import LevelRecorder
from core.schemas import RunConfig
from parsers import table_parser
from utils.visualizer import OverlayRenderer

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ("case_id", "status", "rmse_pbo", "rmse_baseline", "rmse_identity")
TIMING_COLUMNS = ("case_id", "runtime_pbo_s", "runtime_baseline_s")
DIVERSITY_COLUMNS = ("generation", "pbo_diversity", "baseline_diversity")


@dataclass
class CaseResult:
    case_id: int
    status: str = "ok"
    rmse_pbo: Optional[float] = None
    rmse_baseline: Optional[float] = None
    rmse_identity: Optional[float] = None
    runtime_pbo_s: float = 0.0
    runtime_baseline_s: float = 0.0
    pbo_diversity: List[float] = field(default_factory=list)
    baseline_diversity: List[float] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def midpoint_diversity(self) -> Optional[tuple]:
        """(pbo, baseline) diversity at the middle generation of the finest level."""
        n = min(len(self.pbo_diversity), len(self.baseline_diversity))
        if n == 0:
            return None
        mid = n // 2
        return self.pbo_diversity[mid], self.baseline_diversity[mid]

    def diversity_rows(self) -> List[Dict[str, Any]]:
        n = max(len(self.pbo_diversity), len(self.baseline_diversity))
        rows = []
        for g in range(n):
            rows.append({
                "generation": g,
                "pbo_diversity": self.pbo_diversity[g] if g < len(self.pbo_diversity) else None,
                "baseline_diversity": self.baseline_diversity[g] if g < len(self.baseline_diversity) else None,
            })
        return rows


def _stats(values: List[float]) -> Dict[str, Optional[float]]:
    if not values:
        return {"mean": None, "std": None}
    arr = np.asarray(values, dtype=np.float64)
    return {"mean": float(arr.mean()), "std": float(arr.std())}


@dataclass
class BenchReport:
    cases: List[CaseResult] = field(default_factory=list)

    @property
    def completed(self) -> List[CaseResult]:
        return [c for c in self.cases if c.ok]

    @property
    def failures(self) -> List[CaseResult]:
        return [c for c in self.cases if not c.ok]

    def rmse_stats(self, column: str) -> Dict[str, Optional[float]]:
        return _stats([getattr(c, column) for c in self.completed])

    def diversity_wins(self) -> int:
        """Cases where PBO keeps more Hamming diversity than the baseline at the finest-level midpoint."""
        wins = 0
        for case in self.completed:
            mid = case.midpoint_diversity()
            if mid is not None and mid[0] > mid[1]:
                wins += 1
        return wins

    def summary(self) -> Dict[str, Any]:
        return {
            "n_cases": len(self.cases),
            "completed": len(self.completed),
            "failures": [{"case_id": c.case_id, "error": c.error} for c in self.failures],
            "rmse_pbo": self.rmse_stats("rmse_pbo"),
            "rmse_baseline": self.rmse_stats("rmse_baseline"),
            "rmse_identity": self.rmse_stats("rmse_identity"),
            "diversity_wins": self.diversity_wins(),
        }

    def write(self, out_dir: Path) -> None:
        """report.csv, timings.csv, summary.json and diversity_<case>.csv."""
        out_dir = Path(out_dir)
        parser = table_parser()
        parser.write(
            {"fieldnames": REPORT_COLUMNS, "rows": [
                {k: getattr(c, k) for k in REPORT_COLUMNS} for c in self.cases
            ]},
            out_dir / "report.csv",
        )
        parser.write(
            {"fieldnames": TIMING_COLUMNS, "rows": [
                {"case_id": c.case_id,
                 "runtime_pbo_s": round(c.runtime_pbo_s, 3),
                 "runtime_baseline_s": round(c.runtime_baseline_s, 3)}
                for c in self.cases
            ]},
            out_dir / "timings.csv",
        )
        for case in self.completed:
            parser.write(
                {"fieldnames": DIVERSITY_COLUMNS, "rows": case.diversity_rows()},
                out_dir / f"diversity_{case.case_id}.csv",
            )
        try:
            with open(out_dir / "summary.json", "w", encoding="utf-8") as f:
                json.dump(self.summary(), f, indent=2, sort_keys=True)
                f.write("\n")
        except OSError as e:
            raise ArtifactIOError(f"Cannot write benchmark summary: {e}") from e


# --- Case execution ---


def _finest_diversity(result: CoarseToFineResult) -> List[float]:
    return [r.mean_hamming for r in result.levels[-1].log]


def _run_strategy(
    case: SyntheticCase,
    cfg: RunConfig,
    strategy: str,
    out_dir: Optional[Path],
    threads: int,
) -> tuple:
    recorder = LevelRecorder(out_dir / f"case_{case.case_id}" / strategy, label=strategy) if out_dir else None
    started = time.perf_counter()
    result = run_coarse_to_fine(
        case.source,
        case.target,
        cfg.schedule(case.source.w, case.source.h),
        cfg.to_ga_config(),
        # both strategies start from the same initial populations
        seed=derive_seed(cfg.seed, case.case_id),
        strategy=strategy,
        threads=threads,
        recorder=recorder,
    )
    return result, time.perf_counter() - started


def run_case(
    case: SyntheticCase,
    cfg: RunConfig,
    out_dir: Optional[Path] = None,
    threads: int = 1,
    overlay: Optional[OverlayRenderer] = None,
) -> CaseResult:
    pbo, pbo_s = _run_strategy(case, cfg, "pbo", out_dir, threads)
    base, base_s = _run_strategy(case, cfg, "baseline", out_dir, threads)
    identity = ControlLattice.zeros(case.gt_lattice.spec)

    if overlay is not None and out_dir is not None:
        overlay.render(case.target, case.landmarks, pbo.lattice, case.gt_lattice, out_dir / f"overlay_{case.case_id}.png")

    return CaseResult(
        case_id=case.case_id,
        rmse_pbo=landmark_rmse(pbo.lattice, case.gt_lattice, case.landmarks),
        rmse_baseline=landmark_rmse(base.lattice, case.gt_lattice, case.landmarks),
        rmse_identity=landmark_rmse(identity, case.gt_lattice, case.landmarks),
        runtime_pbo_s=pbo_s,
        runtime_baseline_s=base_s,
        pbo_diversity=_finest_diversity(pbo),
        baseline_diversity=_finest_diversity(base),
    )


def build_case(cfg: RunConfig, case_id: int, source: Optional[GrayImage] = None) -> SyntheticCase:
    image = source
    if image is None:
        image = procedural_texture(derive_seed(cfg.seed, case_id, Purpose.TEXTURE), cfg.image_size, cfg.n_blobs)
    return generate_case(
        derive_seed(cfg.seed, case_id, Purpose.CASE),
        image,
        gt_k=cfg.gt_k,
        gt_l=cfg.gt_l,
        gt_radius=cfg.gt_radius,
        case_id=case_id,
    )


def run_benchmark(
    cfg: RunConfig,
    out_dir: Optional[Path] = None,
    n_cases: Optional[int] = None,
    source: Optional[GrayImage] = None,
    on_progress: Optional[Callable[[str, str], None]] = None,
) -> BenchReport:
    """
    Run `n_cases` synthetic cases (cfg.n_cases by default).

    A failing case is recorded with its error and the remaining cases still
    run. When `out_dir` is given, the report files, per-level logs and
    overlays are written there.
    """
    def log(msg: str, style: str = "white") -> None:
        logger.info(msg)
        if on_progress:
            on_progress(msg, style)

    total = cfg.n_cases if n_cases is None else n_cases
    overlay = OverlayRenderer() if out_dir is not None else None
    report = BenchReport()

    for case_id in range(total):
        log(f"Case {case_id + 1}/{total}", "magenta")
        try:
            case = build_case(cfg, case_id, source)
            result = run_case(case, cfg, out_dir, threads=cfg.threads, overlay=overlay)
            log(
                f"Case {case_id}: RMSE pbo {result.rmse_pbo:.3f}px, baseline {result.rmse_baseline:.3f}px, "
                f"identity {result.rmse_identity:.3f}px",
                "green",
            )
        except Exception as e:
            logger.exception(f"Case {case_id} failed")
            log(f"Case {case_id} failed: {e}", "red")
            result = CaseResult(case_id=case_id, status="failed", error=str(e))
        report.cases.append(result)

    if out_dir is not None:
        report.write(out_dir)
    return report
