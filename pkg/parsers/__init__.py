from .config_parser import ConfigParser, load_config
from .image_parser import ImageParser
from .lattice_parser import LatticeParser
from .table_parser import TableParser

# 1. Singleton Instances
_IMAGE_PARSER = ImageParser()
_LATTICE_PARSER = LatticeParser()
_TABLE_PARSER = TableParser()
_CONFIG_PARSER = ConfigParser()

# 2. Extension -> Parser Mapping
_PARSERS_MAP = {
    ext: parser
    for parser in (_IMAGE_PARSER, _LATTICE_PARSER, _TABLE_PARSER, _CONFIG_PARSER)
    for ext in parser.EXTENSIONS
}


def get_parser(extension: str):
    """
    Factory method: Returns the appropriate parser for the given extension.
    """
    return _PARSERS_MAP.get(extension.lower())


def image_parser() -> ImageParser:
    return _IMAGE_PARSER


def lattice_parser() -> LatticeParser:
    return _LATTICE_PARSER


def table_parser() -> TableParser:
    return _TABLE_PARSER
