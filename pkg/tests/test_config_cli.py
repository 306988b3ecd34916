"""Config parsing, canonicalization, demos, suite runs, and the CLI."""

import json

import pytest

from hybridgibbs.cli import main
from hybridgibbs.config import canonicalize, parse_config_text, serialize
from hybridgibbs.demos import demo_config, list_demos
from hybridgibbs.errors import ParseError, SchemaError
from hybridgibbs.suite import run_suite

MINIMAL = {"model": {"kind": "explicit", "sizes": [2, 2], "weights": [0.1, 0.2, 0.3, 0.4]}}


class TestConfig:
    def test_minimal_defaults(self):
        cfg = canonicalize(MINIMAL)
        assert cfg.data["selection_probs"] is None
        assert cfg.data["approximator"]["default"] == {"rule": "exact"}
        assert cfg.t_values == [2, 4]
        assert cfg.tol == 1e-9
        assert cfg.data["suite"] == "all"

    def test_weights_length_mismatch_names_expected(self):
        bad = {"model": {"kind": "explicit", "sizes": [2, 2], "weights": [0.5, 0.5]}}
        with pytest.raises(SchemaError, match="expected 4 weights"):
            canonicalize(bad)

    def test_slice_levels_detected(self):
        cfg = canonicalize(
            {
                "model": {
                    "kind": "slice",
                    "density": [2.0, 1.0],
                    "level_kernels": [
                        {"rule": "lazy", "epsilon": 0.5},
                        {"rule": "lazy", "epsilon": 0.9},
                    ],
                }
            }
        )
        model = cfg.build_slice_model()
        assert model.nlevels == 2

    def test_slice_level_count_mismatch(self):
        with pytest.raises(SchemaError, match="level kernels"):
            canonicalize(
                {
                    "model": {
                        "kind": "slice",
                        "density": [2.0, 1.0],
                        "level_kernels": [{"rule": "exact"}],
                    }
                }
            )

    def test_parse_error_reports_line(self):
        with pytest.raises(ParseError, match="line"):
            parse_config_text("{\n  broken\n}")

    def test_schema_error_rejects_unknown_key(self):
        with pytest.raises(SchemaError):
            canonicalize({"model": {"kind": "explicit"}, "bogus": 1})

    def test_roundtrip_fixed_point(self):
        cfg = canonicalize(MINIMAL)
        again = parse_config_text(serialize(cfg))
        assert again.data == cfg.data
        assert again.fingerprint == cfg.fingerprint

    def test_selection_length_checked(self):
        bad = dict(MINIMAL, selection_probs=[0.5, 0.25, 0.25])
        with pytest.raises(SchemaError, match="selection_probs"):
            canonicalize(bad)

    def test_override_coordinate_range(self):
        bad = dict(
            MINIMAL,
            approximator={"default": {"rule": "exact"}, "overrides": {"5": {"rule": "exact"}}},
        )
        with pytest.raises(SchemaError, match="out of range"):
            canonicalize(bad)

    def test_explicit_rule_tables_roundtrip(self):
        cfg = canonicalize(
            dict(
                MINIMAL,
                approximator={
                    "default": {
                        "rule": "explicit",
                        "tables": {
                            "0;0": [[0.5, 0.5], [0.5, 0.5]],
                            "0;1": [[0.5, 0.5], [0.5, 0.5]],
                            "1;0": [[0.5, 0.5], [0.5, 0.5]],
                            "1;1": [[0.5, 0.5], [0.5, 0.5]],
                        },
                    },
                    "overrides": {},
                },
            )
        )
        spec = cfg.approximator_spec()
        assert (0, (1,)) in spec.default.tables


class TestDemos:
    def test_at_least_five(self):
        assert len(list_demos()) >= 5

    def test_all_configs_validate(self):
        for name in list_demos():
            cfg = canonicalize(demo_config(name))
            assert cfg.fingerprint

    def test_spike_slab_is_300_states(self):
        cfg = canonicalize(demo_config("spike-slab-toy"))
        assert cfg.build_joint().n == 300

    @pytest.mark.parametrize("name", ["two-coin", "three-coin-block", "two-point-slice", "spike-slab-toy", "random"])
    def test_demo_suites_pass(self, name):
        report = run_suite(canonicalize(demo_config(name)))
        assert report.exit_status() == 0
        assert not report.failed


class TestRunSuite:
    def test_deterministic_json(self):
        cfg = canonicalize(demo_config("two-coin"))
        a = run_suite(cfg).to_json(include_timing=False)
        b = run_suite(cfg).to_json(include_timing=False)
        assert a == b

    def test_reports_sorted(self):
        report = run_suite(canonicalize(demo_config("two-coin")))
        names = [r.name for r in report.reports]
        assert names == sorted(names)

    def test_identity_approximator_degenerates_gracefully(self):
        cfg = canonicalize(
            dict(
                MINIMAL,
                approximator={"default": {"rule": "lazy", "epsilon": 1.0}, "overrides": {}},
                suite=["random-scan"],
            )
        )
        report = run_suite(cfg)
        assert report.exit_status() == 0
        assert report.kernels["random_scan_hybrid"]["gap"] == pytest.approx(0.0, abs=1e-12)
        unmet = [r for r in report.reports if r.status == "hypothesis_unmet"]
        assert any(r.name.startswith("variance-sandwich") for r in unmet)

    def test_explicit_inapplicable_suite_raises(self):
        cfg = canonicalize(dict(MINIMAL, suite=["block"]))
        from hybridgibbs.errors import HybridGibbsError

        with pytest.raises(HybridGibbsError):
            run_suite(cfg)

    def test_csv_columns(self):
        report = run_suite(canonicalize(demo_config("two-coin")))
        lines = report.to_csv().splitlines()
        assert lines[0] == "check,lhs,rhs,slack,status"
        assert len(lines) == len(report.reports) + 1


class TestCli:
    def _write(self, tmp_path, data):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(data))
        return str(path)

    def test_list_demos(self, capsys):
        assert main(["list-demos"]) == 0
        out = capsys.readouterr().out
        assert "two-coin" in out and "spike-slab-toy" in out

    def test_analyze(self, tmp_path, capsys):
        path = self._write(tmp_path, MINIMAL)
        assert main(["analyze", path]) == 0
        data = json.loads(capsys.readouterr().out)
        assert "random_scan_exact" in data["kernels"]

    def test_check_exit_zero_and_files(self, tmp_path):
        path = self._write(tmp_path, MINIMAL)
        out = tmp_path / "report.json"
        csv_out = tmp_path / "report.csv"
        code = main(
            ["check", path, "--suite", "random-scan,da", "--t", "2", "--out", str(out), "--csv", str(csv_out)]
        )
        assert code == 0
        data = json.loads(out.read_text())
        assert data["reports"]
        assert csv_out.read_text().startswith("check,lhs,rhs,slack,status")

    def test_check_determinism_byte_identical(self, tmp_path):
        path = self._write(tmp_path, MINIMAL)
        outs = []
        for k in range(2):
            out = tmp_path / f"r{k}.json"
            assert main(["check", path, "--suite", "all", "--out", str(out)]) == 0
            parsed = json.loads(out.read_text())
            parsed.pop("timing")
            outs.append(json.dumps(parsed, sort_keys=True))
        assert outs[0] == outs[1]

    def test_check_bad_config_exit_two(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        assert main(["check", str(path), "--suite", "all"]) == 2

    def test_check_inapplicable_suite_exit_two(self, tmp_path):
        path = self._write(tmp_path, MINIMAL)
        assert main(["check", path, "--suite", "block"]) == 2

    def test_simulate(self, tmp_path, capsys):
        path = self._write(tmp_path, MINIMAL)
        traj = tmp_path / "traj.txt"
        code = main(
            [
                "simulate",
                path,
                "--kernel",
                "exact",
                "--steps",
                "30000",
                "--seed",
                "5",
                "--f",
                "coord:0",
                "--batch",
                "150",
                "--traj-out",
                str(traj),
            ]
        )
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["report"]["status"] == "pass"
        assert traj.read_text().startswith("# seed=5 kernel=")

    def test_simulate_vector_observable(self, tmp_path, capsys):
        path = self._write(tmp_path, MINIMAL)
        code = main(
            ["simulate", path, "--kernel", "hybrid", "--steps", "20000", "--seed", "3",
             "--f", "vector:1,0,0,-1", "--batch", "100"]
        )
        assert code == 0

    def test_demo_run(self, capsys):
        assert main(["demo", "two-coin", "--run"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["kernels"]["random_scan_exact"]["operator_norm"] == pytest.approx(0.5)

    def test_demo_unknown_exit_two(self):
        assert main(["demo", "does-not-exist"]) == 2


class TestExitStatusMapping:
    def test_failing_report_gives_exit_one(self):
        # The mathematics never fails on valid models, so exercise the
        # mapping directly with a fabricated failing report.
        from hybridgibbs.report import make_report
        from hybridgibbs.suite import RunReport

        failing = make_report("fabricated", 1.0, 0.0, 1e-9)
        assert failing.status == "fail"
        report = RunReport(
            fingerprint="x",
            config={},
            kernels={},
            quality={},
            reports=(failing,),
            timing={},
            versions={},
        )
        assert report.exit_status() == 1

    def test_hypothesis_unmet_never_fails(self):
        from hybridgibbs.report import make_report
        from hybridgibbs.suite import RunReport

        unmet = make_report("fabricated", 1.0, 0.0, 1e-9, hypothesis_ok=False)
        report = RunReport(
            fingerprint="x",
            config={},
            kernels={},
            quality={},
            reports=(unmet,),
            timing={},
            versions={},
        )
        assert report.exit_status() == 0
