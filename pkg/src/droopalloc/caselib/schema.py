"""JSON Schema for case documents."""

SCHEMA_VERSION = 1

_num = {"type": "number"}
_matrix = {"type": "array", "items": {"type": "array", "items": _num, "minItems": 1}, "minItems": 1}

CASE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "buses", "lines", "devices"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "buses": {
            "type": "object",
            "additionalProperties": False,
            "required": ["count", "slack"],
            "properties": {
                "count": {"type": "integer", "minimum": 1},
                "slack": {"type": "integer", "minimum": 1},
            },
        },
        "slack": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"v_D": _num, "v_Q": _num},
        },
        "omega_dq": {"const": 1.0},
        "lines": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["from", "to", "conductance", "susceptance"],
                "properties": {
                    "from": {"type": "integer", "minimum": 1},
                    "to": {"type": "integer", "minimum": 1},
                    "conductance": _num,
                    "susceptance": _num,
                },
            },
        },
        "devices": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["bus", "kind"],
                "properties": {
                    "bus": {"type": "integer", "minimum": 1},
                    "kind": {"enum": ["unified", "gfl", "gfm"]},
                    "p_star": _num,
                    "q_star": _num,
                    "params": {"type": "object", "additionalProperties": _num},
                },
            },
        },
        "optimization": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "bounds": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["lower", "upper"],
                    "properties": {
                        "lower": {"type": "array", "items": _num},
                        "upper": {"type": "array", "items": _num},
                    },
                },
                "epsilon": {"type": "number", "exclusiveMinimum": 0},
                "starts": {"type": "integer", "minimum": 1},
                "max_outer": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "weights": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"Q": _matrix, "S": _matrix},
                },
            },
        },
        "simulation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "horizon": {"type": "number", "exclusiveMinimum": 0},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "h_min": {"type": "number", "exclusiveMinimum": 0},
                "h_max": {"type": "number", "exclusiveMinimum": 0},
                "disturbance": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "bus": {"type": "integer", "minimum": 1},
                        "param": {"type": "string"},
                        "delta": _num,
                        "time": {"type": "number", "minimum": 0},
                    },
                },
            },
        },
    },
}
