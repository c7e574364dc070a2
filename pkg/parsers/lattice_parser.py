"""
Lattice JSON:

    {
      "spec": {"w": 128, "h": 128, "k": 3, "l": 3},
      "displacements": [
        [dx, dy],
        ...
      ]
    }

Displacements are listed row-major starting at node (-1, -1). One pair per
line and repr-formatted floats make write -> read -> write byte-identical.
"""
import json
from pathlib import Path
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core.errors import LatticeError, LatticeFileError
from core.ffd import ControlLattice, LatticeSpec
from .base import ArtifactParser


class LatticeSpecDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    w: int = Field(ge=1)
    h: int = Field(ge=1)
    k: int = Field(ge=2)
    l: int = Field(ge=2)


class LatticeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: LatticeSpecDocument
    displacements: List[Tuple[float, float]]

    def to_lattice(self) -> ControlLattice:
        spec = LatticeSpec(image_w=self.spec.w, image_h=self.spec.h, k=self.spec.k, l=self.spec.l)
        if len(self.displacements) != spec.n_nodes:
            raise LatticeFileError(
                f"Expected {spec.n_nodes} displacement pairs for a {spec.k}x{spec.l} lattice, "
                f"got {len(self.displacements)}",
                field="displacements",
            )
        vectors = np.array(self.displacements, dtype=np.float64).reshape(-1, 2)
        if not np.all(np.isfinite(vectors)):
            raise LatticeFileError("Displacements must be finite", field="displacements")
        return ControlLattice.from_vectors(spec, vectors)

    @classmethod
    def from_lattice(cls, lat: ControlLattice) -> "LatticeDocument":
        s = lat.spec
        return cls(
            spec=LatticeSpecDocument(w=s.image_w, h=s.image_h, k=s.k, l=s.l),
            displacements=[(float(dx), float(dy)) for dx, dy in lat.vectors()],
        )


def _validation_field(err: ValidationError) -> str:
    first = err.errors()[0]
    return ".".join(str(part) for part in first.get("loc", ()))


class LatticeParser(ArtifactParser):
    EXTENSIONS = (".json",)

    def loads(self, text: str) -> ControlLattice:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise LatticeFileError(f"Invalid lattice JSON: {e.msg}", line=e.lineno, column=e.colno) from e
        try:
            doc = LatticeDocument.model_validate(raw)
        except ValidationError as e:
            msg = e.errors()[0].get("msg", "invalid value")
            raise LatticeFileError(f"Invalid lattice document: {msg}", field=_validation_field(e)) from e
        try:
            return doc.to_lattice()
        except LatticeError as e:
            raise LatticeFileError(str(e), field="displacements") from e

    def dumps(self, lat: ControlLattice) -> str:
        doc = LatticeDocument.from_lattice(lat)
        try:
            spec = json.dumps(doc.spec.model_dump(), allow_nan=False)
            pairs = [json.dumps([dx, dy], allow_nan=False) for dx, dy in doc.displacements]
        except ValueError as e:
            raise LatticeFileError(f"Lattice is not serializable: {e}", field="displacements") from e
        body = ",\n".join(f"    {p}" for p in pairs)
        return f'{{\n  "spec": {spec},\n  "displacements": [\n{body}\n  ]\n}}\n'

    def read(self, file_path: Path) -> ControlLattice:
        return self.loads(self._read_text_safely(file_path))

    def write(self, obj: ControlLattice, file_path: Path) -> Path:
        return self._write_text(self.dumps(obj), file_path)
