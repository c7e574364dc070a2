from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.genome import EncodingSpec
from core.ga import AnnealParams, BaselineParams, GAConfig, PBOParams
from core.pyramid import PyramidSchedule


class RunConfig(BaseModel):
    """
    Every knob of an estimate / synth / bench run.

    Defaults follow the published experiment where it states them (3 levels,
    3x3 base lattice, 5 bits, 3 px radius); the GA constants are
    implementation defaults.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    # Pyramid
    levels: int = Field(default=3, ge=1, description="Pyramid depth")
    base_k: int = Field(default=3, ge=2, description="Coarsest lattice columns")
    base_l: int = Field(default=3, ge=2, description="Coarsest lattice rows")

    # Encoding
    bits_per_param: int = Field(default=5, ge=1, le=30, description="Bits per displacement scalar")
    radius: float = Field(default=3.0, gt=0.0, description="Residual half-range in level pixels")

    # PBO + annealing selection
    w_max: float = Field(default=0.5, ge=0.0, le=1.0)
    s_bit: float = Field(default=2.0, gt=0.0)
    s_fit: float = Field(default=0.3, gt=0.0)
    e: float = Field(default=1.0, gt=0.0)
    p_min: float = Field(default=0.1, ge=0.0, lt=1.0)
    g_size: int = Field(default=200, ge=1, description="Generations per pyramid level")
    population: int = Field(default=50, ge=2)

    # Baseline GA
    crossover_rate: float = Field(default=0.9, ge=0.0, le=1.0)
    mutation_rate: Optional[float] = Field(default=None, ge=0.0, le=1.0, description="None means 1/L")

    # Synthetic cases
    gt_k: int = Field(default=5, ge=2)
    gt_l: int = Field(default=5, ge=2)
    gt_radius: float = Field(default=8.0, ge=0.0)
    n_cases: int = Field(default=10, ge=0)
    image_size: int = Field(default=128, ge=4)
    n_blobs: int = Field(default=24, ge=1)

    seed: int = Field(default=0, ge=0)
    threads: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_image_depth(self) -> "RunConfig":
        if self.image_size < (1 << (self.levels - 1)):
            raise ValueError(f"image_size {self.image_size} is too small for {self.levels} pyramid levels")
        return self

    def encoding(self) -> EncodingSpec:
        return EncodingSpec(bits_per_param=self.bits_per_param, radius=self.radius)

    def to_ga_config(self) -> GAConfig:
        return GAConfig(
            pbo=PBOParams(w_max=self.w_max, s_bit=self.s_bit, s_fit=self.s_fit),
            anneal=AnnealParams(e=self.e, p_min=self.p_min, g_size=self.g_size),
            baseline=BaselineParams(
                crossover_rate=self.crossover_rate,
                mutation_rate=self.mutation_rate,
                g_size=self.g_size,
            ),
            encoding=self.encoding(),
            population=self.population,
        )

    def schedule(self, image_w: int, image_h: int) -> PyramidSchedule:
        return PyramidSchedule.build(
            image_w,
            image_h,
            levels=self.levels,
            base_k=self.base_k,
            base_l=self.base_l,
            generations=self.g_size,
            population=self.population,
        )
