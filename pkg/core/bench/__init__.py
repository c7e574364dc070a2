from core.ga import baseline_ga

from .metrics import hamming_diversity, landmark_rmse
from .oracle import OracleResult, TranslationProblem, exhaustive_oracle
from .runner import BenchReport, CaseResult, build_case, run_benchmark, run_case
from .synth import SyntheticCase, generate_case, landmark_grid, procedural_texture

__all__ = [
    "SyntheticCase",
    "generate_case",
    "procedural_texture",
    "landmark_grid",
    "landmark_rmse",
    "hamming_diversity",
    "baseline_ga",
    "exhaustive_oracle",
    "OracleResult",
    "TranslationProblem",
    "run_benchmark",
    "run_case",
    "build_case",
    "BenchReport",
    "CaseResult",
]
