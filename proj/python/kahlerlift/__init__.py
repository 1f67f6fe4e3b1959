"""Numerical checks of natural diagonal Kahler-Einstein structures on T*M."""

import json

from ._core import (
    Chart,
    ConfigError,
    DiagnosticError,
    Family,
    Geometry,
    InadmissiblePointError,
    RejectedInput,
    SingularParameterError,
    check_admissibility,
    coefficients,
    run_suite,
    scan_hsc,
    suite_checks,
)

__all__ = [
    "Chart",
    "ConfigError",
    "DiagnosticError",
    "Family",
    "Geometry",
    "InadmissiblePointError",
    "RejectedInput",
    "SingularParameterError",
    "check_admissibility",
    "coefficients",
    "run_suite",
    "scan_hsc",
    "suite_checks",
    "verify",
]


def verify(config_text, overrides=None):
    """Run the suite and return the parsed JSON report.

    `overrides` maps dotted keys ("chart.n", "family.B", ...) to values.
    """
    settings = {k: str(v) for k, v in (overrides or {}).items()}
    return json.loads(run_suite(config_text, settings, "json"))
