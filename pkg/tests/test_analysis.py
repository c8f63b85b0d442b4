"""Tests for ratio estimation, flatness statistics, and report I/O."""

import json
import math

import numpy as np
import pytest

from teleunot.analysis import (
    CSV_COLUMNS,
    ScanMetadata,
    ScanReport,
    attach_ratio_estimates,
    build_report,
    estimate_r,
    export_report,
    flatness_chi2,
    load_report,
)
from teleunot.core import Qubit
from teleunot.photonics import (
    CoincidenceTally,
    DelayScanConfig,
    default_z_values,
    run_scan,
)


def tally(z, c_clone, c_anti=0, n=1_000_000):
    return CoincidenceTally(z=z, n_trials=n, c_clone=c_clone, c_anti=c_anti)


def scan_config(**overrides):
    defaults = dict(
        z_values=default_z_values(points=9),
        trials_per_z=20_000,
        input_phi=Qubit.from_label("H"),
        seed=11,
    )
    defaults.update(overrides)
    return DelayScanConfig(**defaults)


class TestEstimateR:
    def test_peak_over_baseline(self):
        tallies = [tally(0.0, 2000), tally(300.0, 1000), tally(-300.0, 1000)]
        estimates = estimate_r(tallies, baseline_z_um=150.0)
        assert estimates[0][0] == pytest.approx(2.0, abs=1e-12)

    def test_switched_off_machine(self):
        tallies = [tally(0.0, 1000), tally(300.0, 1000), tally(-300.0, 1000)]
        attached = attach_ratio_estimates(tallies, baseline_z_um=150.0)
        assert attached[0].r_ratio == pytest.approx(1.0, abs=1e-12)
        assert attached[0].f_estimate == pytest.approx(0.75, abs=1e-12)

    def test_partial_enhancement(self):
        tallies = [tally(0.0, 1940), tally(300.0, 1000), tally(-300.0, 1000)]
        attached = attach_ratio_estimates(tallies, baseline_z_um=150.0)
        assert attached[0].r_ratio == pytest.approx(1.94, abs=1e-12)
        assert attached[0].f_estimate == pytest.approx(4.88 / 5.88, abs=1e-12)

    def test_sigma_from_independent_poisson_errors(self):
        tallies = [tally(0.0, 2000), tally(300.0, 1000), tally(-300.0, 900)]
        (r, sigma), *_ = estimate_r(tallies, baseline_z_um=150.0)
        mean = 950.0
        sigma_mean = math.sqrt(1900.0) / 2.0
        expected = math.sqrt(2000.0 / mean**2 + (2000.0 * sigma_mean / mean**2) ** 2)
        assert sigma == pytest.approx(expected, rel=1e-12)

    def test_fidelity_error_uses_exact_derivative(self):
        tallies = [tally(0.0, 2000), tally(300.0, 1000), tally(-300.0, 1000)]
        row = attach_ratio_estimates(tallies, baseline_z_um=150.0)[0]
        assert row.f_sigma == pytest.approx(
            row.r_sigma / (2.0 * (row.r_ratio + 1.0) ** 2), abs=1e-12
        )

    def test_empty_baseline_rejected(self):
        with pytest.raises(ValueError, match="widen the scan"):
            estimate_r([tally(0.0, 100)], baseline_z_um=10.0)

    def test_sigma_shrinks_as_inverse_sqrt_trials(self):
        base = scan_config(trials_per_z=25_000)
        doubled = scan_config(trials_per_z=50_000)
        sigma = min(run_scan(base), key=lambda t: abs(t.z)).r_sigma
        sigma_doubled = min(run_scan(doubled), key=lambda t: abs(t.z)).r_sigma
        ratio = sigma_doubled / sigma
        assert abs(ratio - 1.0 / math.sqrt(2.0)) < 0.2 / math.sqrt(2.0)


class TestFlatness:
    def test_identical_counts_give_zero(self):
        assert flatness_chi2([500] * 10) == pytest.approx(0.0, abs=1e-12)

    def test_null_model_averages_to_one(self):
        rng = np.random.default_rng(61)
        values = [flatness_chi2(rng.poisson(100_000, size=20)) for _ in range(50)]
        assert 0.85 < float(np.mean(values)) < 1.15
        assert all(v < 2.5 for v in values)

    def test_enhanced_series_is_not_flat(self):
        counts = [1000] * 10 + [2000] + [1000] * 10
        assert flatness_chi2(counts) > 10.0

    def test_needs_three_points(self):
        with pytest.raises(ValueError, match="at least 3"):
            flatness_chi2([5, 5])

    def test_pipeline_anticlone_series_is_flat(self):
        cfg = scan_config(trials_per_z=100_000, z_values=default_z_values(points=21))
        chi2 = flatness_chi2([t.c_anti for t in run_scan(cfg)])
        assert chi2 < 2.0


class TestReports:
    def test_summary_fields(self):
        cfg = scan_config()
        report = build_report(run_scan(cfg), cfg)
        assert len(report.rows) == len(cfg.z_values)
        assert report.summary.peak_z == pytest.approx(0.0, abs=1e-9)
        assert report.summary.peak_r > 1.5
        assert report.summary.baseline_anti_mean > 0
        assert report.metadata.seed == cfg.seed

    def test_csv_schema(self, tmp_path):
        cfg = scan_config()
        report = build_report(run_scan(cfg), cfg)
        path = tmp_path / "scan.csv"
        export_report(report, "csv", str(path))
        lines = path.read_text().splitlines()
        comments = [l for l in lines if l.startswith("#")]
        data = [l for l in lines if not l.startswith("#")]
        assert data[0] == ",".join(CSV_COLUMNS)
        assert len(data) == 1 + len(cfg.z_values)
        joined = "\n".join(comments)
        for key in ("seed", "trials_per_z", "input_phi", "ancilla_model", "tau_coh"):
            assert key in joined

    def test_empty_report_is_header_only(self, tmp_path):
        cfg = scan_config()
        empty = ScanReport(metadata=ScanMetadata.from_config(cfg), rows=(), summary=None)
        path = tmp_path / "empty.csv"
        export_report(empty, "csv", str(path))
        data = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert data == [",".join(CSV_COLUMNS)]

    def test_json_round_trip_identity(self, tmp_path):
        cfg = scan_config()
        report = build_report(run_scan(cfg), cfg)
        path = tmp_path / "scan.json"
        export_report(report, "json", str(path))
        assert load_report(str(path)) == report

    def test_json_layout(self, tmp_path):
        cfg = scan_config()
        report = build_report(run_scan(cfg), cfg)
        path = tmp_path / "scan.json"
        export_report(report, "json", str(path))
        payload = json.loads(path.read_text())
        assert set(payload) == {"metadata", "rows", "summary"}
        assert set(payload["rows"][0]) == {
            "z", "n_trials", "c_clone", "c_anti",
            "r_ratio", "r_sigma", "f_estimate", "f_sigma",
        }

    def test_unknown_format_rejected(self, tmp_path):
        cfg = scan_config()
        report = build_report(run_scan(cfg), cfg)
        with pytest.raises(ValueError, match="unknown report format"):
            export_report(report, "xml", str(tmp_path / "x"))

    def test_write_failure_carries_path(self, tmp_path):
        cfg = scan_config()
        report = build_report(run_scan(cfg), cfg)
        missing = tmp_path / "nope" / "scan.csv"
        with pytest.raises(OSError, match="nope"):
            export_report(report, "csv", str(missing))

    def test_build_report_rejects_empty_scan(self):
        with pytest.raises(ValueError, match="empty scan"):
            build_report([], scan_config())
