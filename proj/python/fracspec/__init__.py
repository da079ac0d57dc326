"""Spectral approximation of fractional integral operators."""

import json as _json

from ._fracspec import (
    FracspecError,
    JobError,
    build_operator,
    presets,
    select_omega,
    solve_eigen,
    tcp_coefficients,
    tcp_evaluate,
)
from ._fracspec import run_job as _run_job

__all__ = [
    "FracspecError",
    "JobError",
    "build_operator",
    "presets",
    "run",
    "select_omega",
    "solve_eigen",
    "tcp_coefficients",
    "tcp_evaluate",
]


def run(command, job=None, preset=None, out="fracspec-out", threads=1):
    """Run `command` ("solve", "eig" or "pseudospectra") on a job dict or a preset name."""
    if (job is None) == (preset is None):
        raise ValueError("give exactly one of job or preset")
    text = "" if job is None else _json.dumps(job)
    return _run_job(command, text, preset or "", str(out), threads)
