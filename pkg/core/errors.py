from __future__ import annotations

from typing import Optional


class PBGAError(RuntimeError):
    """Base exception for every failure raised by the registration library."""
    pass


class EncodingError(PBGAError):
    """Genome length or bit-group layout does not match the encoding."""
    pass


class LatticeError(PBGAError):
    """Control lattice shape or spec mismatch."""
    pass


class DomainError(PBGAError):
    """A sample point lies outside the half-open image domain."""
    pass


class ImageDimensionError(PBGAError):
    """Two rasters (or a raster and a lattice) disagree on their dimensions."""
    pass


class ObjectiveError(PBGAError):
    """The objective returned a non-finite value."""
    pass


class PyramidError(PBGAError):
    """The image is too small for the requested pyramid depth, or levels disagree."""
    pass


class OracleError(PBGAError):
    """Exhaustive enumeration requested for a genome that is too long."""
    pass


class ConfigError(PBGAError):
    """Invalid configuration value or unknown configuration key."""
    pass


class ArtifactIOError(PBGAError):
    """An image, table or config file could not be read or written."""
    pass


class LatticeFileError(ArtifactIOError):
    """Malformed lattice JSON, with the position of the offending token or field."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        field: Optional[str] = None,
    ) -> None:
        self.line = line
        self.column = column
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if field:
            where.append(f"field '{field}'")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
