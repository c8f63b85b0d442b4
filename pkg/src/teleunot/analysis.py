"""Counting statistics and reporting for delay-scan coincidence data.

Ratio estimates carry Poisson uncertainties propagated from independent
errors on the numerator and on the baseline mean; fidelity errors follow
from the exact derivative dF/dR = 1/(2 (R + 1)^2).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from typing import Sequence

from .photonics import (
    CoincidenceTally,
    DelayScanConfig,
    baseline_position_threshold,
    fidelity_from_r,
)

__all__ = [
    "CSV_COLUMNS",
    "ScanMetadata",
    "ScanSummary",
    "ScanReport",
    "estimate_r",
    "attach_ratio_estimates",
    "flatness_chi2",
    "build_report",
    "export_report",
    "load_report",
]

CSV_COLUMNS = ("z_um", "c_clone", "c_anti", "r", "r_sigma", "f", "f_sigma")


def _fidelity_sigma(r: float, r_sigma: float) -> float:
    return r_sigma / (2.0 * (r + 1.0) ** 2)


def estimate_r(
    tallies: Sequence[CoincidenceTally], baseline_z_um: float
) -> list[tuple[float, float]]:
    """Per-position amplification ratio R with its Poisson uncertainty.

    The baseline is the mean clone count over positions with |z| beyond
    ``baseline_z_um`` (the interference-free part of the scan); each R is
    the ratio of the local clone count to that mean.
    """
    baseline_counts = [t.c_clone for t in tallies if abs(t.z) > baseline_z_um]
    if not baseline_counts:
        raise ValueError(
            f"no scan points with |z| > {baseline_z_um:.6g} um to define the baseline; "
            "widen the scan"
        )
    baseline_mean = sum(baseline_counts) / len(baseline_counts)
    if baseline_mean <= 0:
        raise ValueError("baseline clone rate is zero; increase trials_per_z")
    baseline_sigma = math.sqrt(sum(baseline_counts)) / len(baseline_counts)

    estimates = []
    for tally in tallies:
        count = tally.c_clone
        r = count / baseline_mean
        sigma = math.sqrt(
            count / baseline_mean**2 + (count * baseline_sigma / baseline_mean**2) ** 2
        )
        estimates.append((r, sigma))
    return estimates


def attach_ratio_estimates(
    tallies: Sequence[CoincidenceTally], baseline_z_um: float
) -> list[CoincidenceTally]:
    """Return tallies with r/f estimates and uncertainties filled in."""
    attached = []
    for tally, (r, r_sigma) in zip(tallies, estimate_r(tallies, baseline_z_um)):
        # r = 0 only for an empty numerator; use the limiting fidelity there.
        f = fidelity_from_r(r) if r > 0 else 0.5
        attached.append(
            replace(
                tally,
                r_ratio=r,
                r_sigma=r_sigma,
                f_estimate=f,
                f_sigma=_fidelity_sigma(r, r_sigma),
            )
        )
    return attached


def flatness_chi2(counts: Sequence[int]) -> float:
    """Chi-square per degree of freedom of a constant fit with Poisson weights."""
    if len(counts) < 3:
        raise ValueError(f"constant fit needs at least 3 points, got {len(counts)}")
    weights = [1.0 / max(c, 1) for c in counts]
    mean = sum(w * c for w, c in zip(weights, counts)) / sum(weights)
    chi2 = sum(w * (c - mean) ** 2 for w, c in zip(weights, counts))
    return chi2 / (len(counts) - 1)


@dataclass(frozen=True)
class ScanMetadata:
    """Run parameters embedded in every report; excludes anything that can
    vary between identical runs (thread counts, timestamps)."""

    seed: int
    trials_per_z: int
    input_phi: tuple[tuple[float, float], tuple[float, float]]
    ancilla_model: str
    tau_coh: float
    wavelength: float
    v_max: float

    @staticmethod
    def from_config(cfg: DelayScanConfig) -> "ScanMetadata":
        phi = cfg.input_phi
        return ScanMetadata(
            seed=cfg.seed,
            trials_per_z=cfg.trials_per_z,
            input_phi=(
                (phi.alpha.real, phi.alpha.imag),
                (phi.beta.real, phi.beta.imag),
            ),
            ancilla_model=cfg.ancilla_model,
            tau_coh=cfg.tau_coh,
            wavelength=cfg.wavelength,
            v_max=cfg.v_max,
        )


@dataclass(frozen=True)
class ScanSummary:
    peak_z: float
    peak_r: float
    peak_r_sigma: float
    peak_f: float
    peak_f_sigma: float
    baseline_clone_mean: float
    baseline_anti_mean: float
    anti_flatness_chi2_dof: float


@dataclass(frozen=True)
class ScanReport:
    metadata: ScanMetadata
    rows: tuple[CoincidenceTally, ...]
    summary: ScanSummary | None


def build_report(tallies: Sequence[CoincidenceTally], cfg: DelayScanConfig) -> ScanReport:
    """Assemble the per-row table plus peak/baseline/flatness summary."""
    rows = tuple(tallies)
    if not rows:
        raise ValueError("cannot build a report from an empty scan")
    if any(row.r_ratio is None for row in rows):
        rows = tuple(attach_ratio_estimates(rows, baseline_position_threshold(cfg.tau_coh)))

    peak = min(rows, key=lambda row: abs(row.z))
    threshold = baseline_position_threshold(cfg.tau_coh)
    baseline_rows = [row for row in rows if abs(row.z) > threshold]
    summary = ScanSummary(
        peak_z=peak.z,
        peak_r=peak.r_ratio,
        peak_r_sigma=peak.r_sigma,
        peak_f=peak.f_estimate,
        peak_f_sigma=peak.f_sigma,
        baseline_clone_mean=sum(r.c_clone for r in baseline_rows) / len(baseline_rows),
        baseline_anti_mean=sum(r.c_anti for r in baseline_rows) / len(baseline_rows),
        anti_flatness_chi2_dof=flatness_chi2([row.c_anti for row in rows]),
    )
    return ScanReport(metadata=ScanMetadata.from_config(cfg), rows=rows, summary=summary)


def export_report(report: ScanReport, format: str, path: str) -> None:
    """Write a report as CSV (metadata in header comments) or JSON."""
    if format == "csv":
        text = _to_csv(report)
    elif format == "json":
        text = json.dumps(_to_json_dict(report), indent=2) + "\n"
    else:
        raise ValueError(f"unknown report format {format!r} (expected 'csv' or 'json')")
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def _format_value(value: float | int | None) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def _to_csv(report: ScanReport) -> str:
    lines = []
    for key, value in asdict(report.metadata).items():
        rendered = json.dumps(value) if key == "input_phi" else value
        lines.append(f"# {key} = {rendered}")
    lines.append(",".join(CSV_COLUMNS))
    for row in report.rows:
        lines.append(
            ",".join(
                _format_value(v)
                for v in (
                    row.z,
                    row.c_clone,
                    row.c_anti,
                    row.r_ratio,
                    row.r_sigma,
                    row.f_estimate,
                    row.f_sigma,
                )
            )
        )
    return "\n".join(lines) + "\n"


def _to_json_dict(report: ScanReport) -> dict:
    return {
        "metadata": asdict(report.metadata),
        "rows": [asdict(row) for row in report.rows],
        "summary": None if report.summary is None else asdict(report.summary),
    }


def load_report(path: str) -> ScanReport:
    """Read back a JSON report written by :func:`export_report`."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise OSError(f"cannot read report from {path}: {exc}") from exc
    meta = payload["metadata"]
    meta["input_phi"] = tuple(tuple(component) for component in meta["input_phi"])
    summary = payload["summary"]
    return ScanReport(
        metadata=ScanMetadata(**meta),
        rows=tuple(CoincidenceTally(**row) for row in payload["rows"]),
        summary=None if summary is None else ScanSummary(**summary),
    )
