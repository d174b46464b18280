"""Case-file schema, loading, canonical serialisation and bundled scenarios."""
from .loader import (case_from_document, document_from_case, load_case, load_case_file,
                     parse_text, serialize, validate_document)
from .scenarios import (IMPEDANCES, LINE_DATA, MIXES, ScenarioId, all_ids, builtin,
                        bundled_text)
from .schema import CASE_SCHEMA, SCHEMA_VERSION


def load_builtin(sid):
    """Validated :class:`NetworkCase` for a bundled scenario."""
    return case_from_document(builtin(sid))


def resolve(spec):
    """Case from a file path or a scenario id such as ``base/gfl-gfm``."""
    import os
    if os.path.exists(spec):
        return load_case_file(spec)
    return load_builtin(ScenarioId.parse(spec))


__all__ = [
    "CASE_SCHEMA", "IMPEDANCES", "LINE_DATA", "MIXES", "SCHEMA_VERSION", "ScenarioId",
    "all_ids", "builtin", "bundled_text", "case_from_document", "document_from_case",
    "load_builtin", "load_case", "load_case_file", "parse_text", "resolve", "serialize",
    "validate_document",
]
