# tests/test_workflows/test_report.py
# Tests for comparison reports and the CSV and YAML writers

import math

import pytest
import yaml

from infoflow.network.flow import feasible_rates, max_flow
from infoflow.network.graph import RateAssignment
from infoflow.utils.validation import OutputError, ReportConsistencyError
from infoflow.workflows.report import ComparisonReport, ReportRow, format_value, write_csv, write_yaml


@pytest.fixture
def report(diamond) -> ComparisonReport:
    return ComparisonReport(
        task="solve",
        network=diamond,
        label_column="instance",
        metric_columns=["score"],
        labels=["a", "b"],
        extra_columns=["converged"],
    )


def make_row(method, label, rates, relaxed=1.0, integral=1.0, **metrics):
    return ReportRow(method, label, rates, relaxed, integral, {"score": 0.5, "converged": True, **metrics})


class TestFormatValue:
    @pytest.mark.parametrize(
        "value, text",
        [
            (True, "true"),
            (False, "false"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (math.nan, "nan"),
            (7, "7"),
            ({0: 2, 1: 3}, "0=2;1=3"),
            ("x", "x"),
        ],
    )
    def test_rendering(self, value, text):
        assert format_value(value) == text


class TestWriteYaml:
    def test_plain_mapping(self, tmp_path):
        path = write_yaml(tmp_path / "sub" / "out.yml", {"converged": True, "sensors": [{"sensor": 0, "real_rate": 2.5}]})
        with open(path, encoding="utf-8") as f:
            assert yaml.safe_load(f) == {"converged": True, "sensors": [{"sensor": 0, "real_rate": 2.5}]}

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "file.txt"
        blocker.write_text("", encoding="utf-8")
        with pytest.raises(OutputError):
            write_yaml(blocker / "out.yml", {})


class TestWriteCsv:
    def test_header_and_rows(self, tmp_path):
        path = write_csv(tmp_path / "sub" / "out.csv", ["n", "f"], [{"n": 1, "f": 0.0}, {"n": 2, "f": 0.25}])
        assert path.read_text(encoding="utf-8") == "n,f\n1,0\n2,0.25\n"

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "file.txt"
        blocker.write_text("", encoding="utf-8")
        with pytest.raises(OutputError):
            write_csv(blocker / "out.csv", ["n"], [])


class TestComparisonReport:
    def test_columns(self, report):
        assert report.columns == [
            "method", "instance", "total_bits", "score",
            "objective_relaxed", "objective_integral", "converged", "sensor_rates",
        ]

    def test_rows_ordered_by_method_then_label(self, report, diamond):
        flow = max_flow(diamond)
        for method in ("proposed", "max_flow"):
            for label in ("b", "a"):
                report.add_row(make_row(method, label, flow))
        assert [(r.method, r.label) for r in report.rows] == [
            ("max_flow", "a"), ("max_flow", "b"), ("proposed", "a"), ("proposed", "b"),
        ]

    def test_unknown_method_or_label(self, report, diamond):
        flow = max_flow(diamond)
        with pytest.raises(ValueError):
            report.add_row(make_row("random", "a", flow))
        with pytest.raises(ValueError):
            report.add_row(make_row("max_flow", "z", flow))

    def test_records(self, report, diamond):
        report.add_row(make_row("max_flow", "a", max_flow(diamond)))
        record = report.to_records()[0]
        assert record["total_bits"] == 5
        assert record["sensor_rates"] == {0: 4, 1: 1}
        assert record["instance"] == "a"
        assert record["score"] == 0.5

    def test_write(self, report, diamond, tmp_path):
        report.add_row(make_row("max_flow", "a", max_flow(diamond)))
        report.add_row(make_row("proposed", "a", feasible_rates(diamond, {0: 2, 1: 3}).witness, relaxed=2.0))
        text = report.write(tmp_path / "report.csv").read_text(encoding="utf-8")
        lines = text.splitlines()
        assert lines[0] == "method,instance,total_bits,score,objective_relaxed,objective_integral,converged,sensor_rates"
        assert lines[1] == "max_flow,a,5,0.5,1,1,true,0=4;1=1"
        assert lines[2] == "proposed,a,5,0.5,2,1,true,0=2;1=3"

    def test_infeasible_rates_block_emission(self, report, diamond, tmp_path):
        bad = RateAssignment.from_edge_rates(diamond, {(0, 3): 3, (0, 2): 0})
        report.add_row(make_row("max_flow", "a", bad))
        with pytest.raises(ReportConsistencyError):
            report.write(tmp_path / "report.csv")
        assert not (tmp_path / "report.csv").exists()

    def test_fractional_rates_block_emission(self, report, diamond):
        half = feasible_rates(diamond, {0: 0.5}).witness
        report.add_row(make_row("max_flow", "a", half))
        assert any("not integral" in v for v in report.check())

    def test_relaxed_dominance(self, report, diamond):
        flow = max_flow(diamond)
        report.add_row(make_row("max_flow", "a", flow, relaxed=2.0, integral=2.0))
        report.add_row(make_row("proposed", "a", flow, relaxed=1.0, integral=1.0))
        assert any("relaxed objective" in v for v in report.check())

    def test_shortfall_within_solver_tolerance_passes(self, diamond):
        report = ComparisonReport(
            task="solve",
            network=diamond,
            label_column="instance",
            metric_columns=["score"],
            labels=["a"],
            extra_columns=["converged"],
            dominance_tol=1e-6,
        )
        flow = max_flow(diamond)
        report.add_row(make_row("max_flow", "a", flow, relaxed=2.0, integral=2.0))
        report.add_row(make_row("proposed", "a", flow, relaxed=2.0 - 5e-7, integral=2.0 - 5e-7))
        assert report.check() == []

    def test_default_tolerance_flags_same_shortfall(self, report, diamond):
        flow = max_flow(diamond)
        report.add_row(make_row("max_flow", "a", flow, relaxed=2.0, integral=2.0))
        report.add_row(make_row("proposed", "a", flow, relaxed=2.0 - 5e-7, integral=2.0))
        assert any("relaxed objective" in v for v in report.check())

    def test_integral_drop_only_warns(self, report, diamond):
        flow = max_flow(diamond)
        report.add_row(make_row("max_flow", "a", flow, relaxed=2.0, integral=2.0))
        report.add_row(make_row("proposed", "a", flow, relaxed=3.0, integral=1.5))
        assert report.check() == []
