"""JSON Schemas (draft 2020-12) for the documents written by the CLI.

The package does not depend on a validator; these are plain dictionaries
that any JSON Schema implementation can consume.
"""

from __future__ import annotations

_NUMBER = {"type": "number"}
_NULLABLE_NUMBER = {"type": ["number", "null"]}
_SEED = {
    "type": "object",
    "required": ["master_seed", "stream_id"],
    "properties": {"master_seed": {"type": "integer", "minimum": 0}, "stream_id": {"type": "integer", "minimum": 0}},
}
_CONFIG = {"type": "object"}

TEST_RESULT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "TestResult",
    "type": "object",
    "required": ["statistic", "p_value", "tail", "method", "alpha", "reject", "z_score", "metadata", "config"],
    "properties": {
        "statistic": _NUMBER,
        "p_value": {"type": "number", "minimum": 0, "maximum": 1},
        "tail": {"enum": ["upper", "lower", "two_sided"]},
        "method": {"enum": ["asymptotic", "monte_carlo"]},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "reject": {"type": "boolean"},
        "z_score": _NULLABLE_NUMBER,
        "metadata": {
            "type": "object",
            "required": ["m", "n", "scheme", "kernel", "observations_read", "internal_n", "seed"],
            "properties": {
                "observations_read": {"type": "integer", "minimum": 1},
                "internal_n": {"type": "integer", "minimum": 2},
            },
        },
        "config": _CONFIG,
    },
}

CRITICAL_TABLE = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "CriticalTable",
    "type": "object",
    "required": ["quantiles", "reps", "n", "m", "scheme", "kernel", "seed", "config"],
    "properties": {
        "quantiles": {"type": "object", "additionalProperties": _NUMBER, "minProperties": 1},
        "reps": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 2},
        "m": {"type": "integer", "minimum": 1},
        "scheme": {"enum": ["overlapping", "disjoint"]},
        "kernel": {"type": "string"},
        "seed": _SEED,
        "config": _CONFIG,
    },
}

KERNEL_MOMENTS = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "KernelMoments",
    "type": "object",
    "required": ["kernel", "m", "theta", "A", "B", "sigma2", "source", "std_errors", "config"],
    "properties": {
        "kernel": {"type": "string"},
        "m": {"type": "integer", "minimum": 1},
        "theta": _NUMBER,
        "A": _NUMBER,
        "B": _NUMBER,
        "sigma2": _NUMBER,
        "source": {"enum": ["analytic", "monte_carlo"]},
        "reps": {"type": ["integer", "null"]},
        "std_errors": {"type": ["object", "null"], "additionalProperties": _NUMBER},
        "config": _CONFIG,
    },
}

EFFICACY_REPORT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "EfficacyReport",
    "type": "object",
    "required": ["kernel", "m", "alternative", "e2", "mu_h", "sigma2", "source", "heuristic", "are_vs", "config"],
    "properties": {
        "kernel": {"type": "string"},
        "m": {"type": "integer", "minimum": 1},
        "alternative": {"type": "string"},
        "e2": {"type": "number", "minimum": 0},
        "e2_std_error": _NULLABLE_NUMBER,
        "mu_h": _NUMBER,
        "sigma2": _NUMBER,
        "source": {"enum": ["analytic", "monte_carlo"]},
        "heuristic": {"type": "boolean"},
        "are_vs": {"type": "object", "additionalProperties": _NUMBER},
        "efficacy_ratio_vs": {"type": "object", "additionalProperties": _NUMBER},
        "config": _CONFIG,
    },
}

_POWER_ROW = {
    "type": "object",
    "required": [
        "alternative", "a", "b", "n", "m", "scheme", "r", "power", "std_error",
        "tail", "critical_method", "seed", "spacings", "small_n",
    ],
    "properties": {
        "power": {"type": "number", "minimum": 0, "maximum": 1},
        "std_error": {"type": "number", "minimum": 0},
        "a": _NULLABLE_NUMBER,
        "b": _NULLABLE_NUMBER,
        "scheme": {"enum": ["overlapping", "disjoint"]},
        "small_n": {"type": "boolean"},
    },
}

POWER_DOCUMENT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "PowerStudy",
    "type": "object",
    "required": ["config", "metadata", "tables"],
    "properties": {
        "config": {"type": "object", "required": ["n", "alpha", "reps", "critical_reps", "seed", "tail"]},
        "metadata": {"type": "object", "required": ["n_convention", "tail", "critical_method"]},
        "tables": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["alternative", "rows"],
                "properties": {"rows": {"type": "array", "items": _POWER_ROW}},
            },
        },
    },
}

SCHEMAS = {
    "test": TEST_RESULT,
    "critical": CRITICAL_TABLE,
    "moments": KERNEL_MOMENTS,
    "efficacy": EFFICACY_REPORT,
    "power": POWER_DOCUMENT,
    "tables": POWER_DOCUMENT,
}
