import csv
import json

import numpy as np
import pytest

from varsched.cli import main
from varsched.scheduling import Job
from varsched.trace import write_trace
from varsched.variability import VariabilityProfile, write_profile

from conftest import heavy_tail_profile


@pytest.fixture
def small_inputs(tmp_path):
    """A 2-job trace and a flat 4-GPU profile, hand-traceable."""
    trace_path = tmp_path / "trace.csv"
    jobs = [Job(0, 0.0, 2, 0, 30, 10.0),     # 300s of work
            Job(1, 0.0, 2, 0, 10, 10.0)]     # 100s of work
    write_trace(jobs, trace_path)
    profile_path = tmp_path / "profile.csv"
    write_profile(VariabilityProfile({0: np.ones(4)}), profile_path)
    return trace_path, profile_path


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestRun:
    def test_outputs_and_hand_trace(self, tmp_path, small_inputs):
        trace, profile = small_inputs
        out = tmp_path / "out"
        rc = run_cli("run", "--trace", trace, "--profile", profile,
                     "--nodes", 1, "--gpus-per-node", 4,
                     "--round-duration", 100, "--out", out)
        assert rc == 0

        with open(out / "jobs.csv") as f:
            rows = {int(r["job_id"]): r for r in csv.DictReader(f)}
        assert float(rows[0]["finish_s"]) == pytest.approx(300.0)
        assert float(rows[1]["finish_s"]) == pytest.approx(100.0)
        assert float(rows[0]["wait_s"]) == 0.0
        assert int(rows[0]["gpu_demand"]) == 2

        with open(out / "rounds.csv") as f:
            rounds = list(csv.DictReader(f))
        assert len(rounds) == 3
        assert int(rounds[0]["gpus_in_use"]) == 4
        assert int(rounds[2]["gpus_in_use"]) == 2

        summary = json.loads((out / "summary.json").read_text())
        assert summary["metrics"]["num_jobs"] == 2
        assert summary["metrics"]["avg_jct_s"] == pytest.approx(200.0)
        assert summary["config"]["placement"] == "pal"

    def test_missing_profile_exit_code(self, tmp_path, small_inputs, capsys):
        trace, _ = small_inputs
        rc = run_cli("run", "--trace", trace,
                     "--profile", tmp_path / "nope.csv",
                     "--out", tmp_path / "out")
        assert rc == 1
        assert "nope.csv" in capsys.readouterr().err

    def test_trace_and_spec_mutually_exclusive(self, tmp_path, small_inputs):
        trace, profile = small_inputs
        spec = tmp_path / "spec.yaml"
        spec.write_text("num_jobs: 1\n")
        rc = run_cli("run", "--trace", trace, "--trace-spec", spec,
                     "--profile", profile, "--out", tmp_path / "out")
        assert rc == 1

    def test_seed_determinism_byte_identical(self, tmp_path):
        spec = tmp_path / "spec.yaml"
        spec.write_text(
            "num_jobs: 40\narrival_rate_per_hour: 20\n"
            "demand_distribution: {1: 0.5, 2: 0.3, 4: 0.2}\n"
            "class_distribution: {0: 1.0}\n"
            "iteration_range: {0: [100, 500]}\n"
            "base_iter_time_range: {0: [1.0, 2.0]}\nseed: 5\n")
        profile = tmp_path / "profile.csv"
        write_profile(heavy_tail_profile(16), profile)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            rc = run_cli("run", "--trace-spec", spec, "--profile", profile,
                         "--nodes", 4, "--gpus-per-node", 4, "--seed", 9,
                         "--placement", "random-nonsticky", "--out", out)
            assert rc == 0
            outs.append((out / "summary.json").read_bytes())
        assert outs[0] == outs[1]

    def test_config_file_with_flag_override(self, tmp_path, small_inputs):
        trace, profile = small_inputs
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text("nodes: 1\ngpus_per_node: 4\nround_duration: 50\n"
                       "scheduler: fifo\n")
        out = tmp_path / "out"
        rc = run_cli("run", "--config", cfg, "--round-duration", 100,
                     "--trace", trace, "--profile", profile, "--out", out)
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["round_duration"] == 100.0
        assert summary["config"]["nodes"] == 1

    def test_profile_downsampled_to_cluster(self, tmp_path, small_inputs):
        trace, _ = small_inputs
        profile = tmp_path / "big_profile.csv"
        write_profile(heavy_tail_profile(64), profile)
        out = tmp_path / "out"
        rc = run_cli("run", "--trace", trace, "--profile", profile,
                     "--nodes", 1, "--gpus-per-node", 4, "--out", out)
        assert rc == 0


class TestSweep:
    def test_sweep_grid(self, tmp_path, small_inputs):
        trace, profile = small_inputs
        out = tmp_path / "out"
        rc = run_cli("sweep", "--trace", trace, "--profile", profile,
                     "--nodes", 1, "--gpus-per-node", 4,
                     "--round-duration", 100,
                     "--sweep-axis", "placement",
                     "--sweep-values", "pal,pm-first,packed-sticky",
                     "--sweep-axis", "l_across", "--sweep-values", "1.0,2.0",
                     "--jobs", 2, "--out", out)
        assert rc == 0
        with open(out / "sweep.csv") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 6
        assert {r["placement"] for r in rows} == {"pal", "pm-first",
                                                  "packed-sticky"}
        assert {r["l_across"] for r in rows} == {"1.0", "2.0"}
        for r in rows:
            assert r["error"] == ""
            assert float(r["avg_jct_s"]) > 0

    def test_failed_cell_recorded(self, tmp_path, small_inputs):
        trace, profile = small_inputs
        out = tmp_path / "out"
        rc = run_cli("sweep", "--trace", trace, "--profile", profile,
                     "--nodes", 1, "--gpus-per-node", 4,
                     "--sweep-axis", "placement",
                     "--sweep-values", "pal,not-a-policy",
                     "--jobs", 1, "--out", out)
        assert rc == 0
        with open(out / "sweep.csv") as f:
            rows = {r["placement"]: r for r in csv.DictReader(f)}
        assert rows["pal"]["error"] == ""
        assert rows["not-a-policy"]["error"] != ""

    def test_unknown_axis(self, tmp_path, small_inputs):
        trace, profile = small_inputs
        rc = run_cli("sweep", "--trace", trace, "--profile", profile,
                     "--sweep-axis", "l_across", "--sweep-values", "1.0",
                     "--sweep-axis", "l_across",
                     "--out", tmp_path / "out")
        assert rc == 1


class TestBinProfile:
    def test_report(self, tmp_path):
        profile_path = tmp_path / "profile.csv"
        vals = np.concatenate([np.full(40, 0.89), np.full(40, 0.94),
                               np.full(40, 1.06), [2.55]])
        for lo in (0, 40, 80):
            vals[lo:lo + 40] += np.linspace(-0.002, 0.002, 40)
        write_profile(VariabilityProfile({0: vals}), profile_path)
        out = tmp_path / "bins.json"
        rc = run_cli("bin-profile", "--profile", profile_path, "--out", out)
        assert rc == 0
        report = json.loads(out.read_text())["0"]
        assert report["k_inliers"] == 3
        assert not report["single_bin_fallback"]
        assert report["bin_centroids"] == pytest.approx([0.89, 0.94, 1.06],
                                                        abs=0.005)
        assert report["outlier_gpus"] == [120]
        assert report["gpu_to_score"][120] == pytest.approx(2.55)

    def test_missing_profile(self, tmp_path, capsys):
        rc = run_cli("bin-profile", "--profile", tmp_path / "absent.csv",
                     "--out", tmp_path / "bins.json")
        assert rc == 1
        assert "absent.csv" in capsys.readouterr().err
