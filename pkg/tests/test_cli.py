"""CLI: config resolution, manifests, exit codes, artifact contracts."""

import csv
import subprocess
import sys

import numpy as np
import pytest

from nmwpm.bench import estimate_threshold, read_results_csv
from nmwpm.cli import (ConfigError, main, parse_config_text, read_syndrome_file,
                       resolve_config)
from nmwpm.ground_truth import (correction_from_paths, paths_from_record,
                                read_dataset)
from nmwpm.lattice import build_toric
from nmwpm.noise import extract_syndrome

BASE = ["--override", "code=toric", "--override", "noise=independent",
        "--override", "L=4"]
TINY = ["--override", "d_hidden=8", "--override", "L_layers=2",
        "--override", "K=2", "--override", "L_enc=1", "--override", "d_pe=8"]


def run(args):
    return main([str(a) for a in args])


class TestConfigParsing:
    def test_comments_and_blanks(self):
        text = "# a comment\n\ncode=toric\n  L = 4  \n"
        assert parse_config_text(text) == {"code": "toric", "L": "4"}

    def test_missing_equals_reports_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config_text("a=1\nnot a pair\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("a=1\na=2\n")

    def test_unknown_keys_are_errors(self):
        with pytest.raises(ConfigError, match="momentum"):
            resolve_config("bench", {"momentum": "0.9"}, {}, None, None)
        with pytest.raises(ConfigError, match="override"):
            resolve_config("bench", {}, {"typo": "1"}, None, None)

    def test_missing_required(self):
        with pytest.raises(ConfigError, match="missing"):
            resolve_config("gen-data", {"code": "toric"}, {}, None, None)

    def test_bad_value(self):
        mapping = {"code": "toric", "noise": "independent", "L": "four",
                   "p": "0.1", "shots": "5"}
        with pytest.raises(ConfigError, match="bad value for L"):
            resolve_config("gen-data", mapping, {}, None, None)

    def test_range_checks(self):
        mapping = {"code": "toric", "noise": "independent", "L": "4",
                   "p": "1.5", "shots": "5"}
        with pytest.raises(ConfigError, match="out of range for p"):
            resolve_config("gen-data", mapping, {}, None, None)

    def test_flags_beat_config(self):
        mapping = {"code": "toric", "noise": "independent", "L": "4",
                   "p": "0.1", "shots": "5", "seed": "1"}
        parsed, raw = resolve_config("gen-data", mapping, {}, 7, 2)
        assert parsed["seed"] == 7 and raw["seed"] == "7"
        assert parsed["threads"] == 2


class TestBench:
    def test_p_zero_grid_gives_zero_ler(self, tmp_path, capsys):
        rc = run(["bench", "--out", tmp_path, *BASE[:4],
                  "--override", "L_grid=4", "--override", "p_grid=0,0.05",
                  "--override", "shots=40", "--seed", "3"])
        assert rc == 0
        rows = read_results_csv(tmp_path / "results.csv")
        assert rows[0].p == 0.0 and rows[0].ler == 0.0
        assert rows[1].logical_failures > 0
        assert not list(tmp_path.glob(".*tmp*"))  # atomic leftovers

    def test_manifest_replays_bitwise(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["bench", *BASE[:4], "--override", "L_grid=4",
                "--override", "p_grid=0.06", "--override", "shots=60",
                "--seed", "11"]
        assert run([*args, "--out", a]) == 0
        assert run(["bench", "--config", a / "manifest.txt", "--out", b]) == 0
        assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()
        assert (a / "manifest.txt").read_bytes() == (b / "manifest.txt").read_bytes()

    def test_nmwpm_requires_checkpoint(self, tmp_path, capsys):
        rc = run(["bench", "--out", tmp_path, *BASE[:4],
                  "--override", "L_grid=4", "--override", "p_grid=0.05",
                  "--override", "shots=5", "--override", "decoder=nmwpm"])
        assert rc == 2
        assert "checkpoint" in capsys.readouterr().err


class TestExitCodes:
    def test_unknown_key_exits_2(self, tmp_path):
        assert run(["bench", "--out", tmp_path,
                    "--override", "bogus=1"]) == 2

    def test_corrupt_checkpoint_exits_3(self, tmp_path):
        bad = tmp_path / "bad.ckpt"
        bad.write_bytes(b"not a checkpoint")
        rc = run(["hist", "--out", tmp_path, *BASE, *TINY,
                  "--override", f"checkpoint={bad}",
                  "--override", "p=0.05", "--override", "shots=3"])
        assert rc == 3

    def test_success_exits_0(self, tmp_path):
        assert run(["gt-audit", "--out", tmp_path, *BASE,
                    "--override", "p=0.05", "--override", "shots=10"]) == 0


class TestGenData:
    def test_records_roundtrip_and_zero_residual(self, tmp_path):
        rc = run(["gen-data", "--out", tmp_path, *BASE,
                  "--override", "p=0.08", "--override", "shots=30",
                  "--seed", "2"])
        assert rc == 0
        meta, records = read_dataset(tmp_path / "dataset.bin")
        assert meta == {"kind": "toric", "L": 4, "noise": "independent",
                        "p": 0.08, "n_stabs": 32}
        assert records
        lat = build_toric(4)
        for rec in records[:10]:
            # the stored decisions must reproduce the stored syndrome
            corr = correction_from_paths(lat, paths_from_record(rec, lat))
            assert np.array_equal(extract_syndrome(corr, lat).bits,
                                  rec.syndrome_bits)


class TestGtAudit:
    def test_report_file(self, tmp_path):
        rc = run(["gt-audit", "--out", tmp_path, *BASE,
                  "--override", "p=0.10", "--override", "shots=50",
                  "--seed", "4"])
        assert rc == 0
        report = dict(line.split("=", 1) for line in
                      (tmp_path / "audit.txt").read_text().splitlines())
        assert report["validity_rate"] == "1.0"
        assert int(report["timeouts"]) + int(report["audited"]) == 50


class TestDecode:
    def make_syndrome(self, tmp_path, bits):
        path = tmp_path / "syndrome.txt"
        path.write_text("".join(map(str, bits)))
        return path

    def test_two_defects_print_one_pair(self, tmp_path, capsys):
        bits = [0] * 32
        bits[0] = bits[5] = 1  # two X-type defects on the L=4 torus
        path = self.make_syndrome(tmp_path, bits)
        rc = run(["decode", "--out", tmp_path, *BASE,
                  "--override", f"syndrome={path}"])
        out = capsys.readouterr().out
        assert rc == 0
        assert out.count("pair=") == 1
        assert "pair=(0, 5)" in out
        assert (tmp_path / "decode.txt").read_text() == out

    def test_wrong_length_exits_2(self, tmp_path):
        path = self.make_syndrome(tmp_path, [0, 1, 0])
        assert run(["decode", "--out", tmp_path, *BASE,
                    "--override", f"syndrome={path}"]) == 2

    def test_non_binary_rejected(self, tmp_path):
        path = tmp_path / "syndrome.txt"
        path.write_text("2" * 32)
        with pytest.raises(ConfigError, match="0/1"):
            read_syndrome_file(path, build_toric(4))


class TestTrainHistChain:
    def test_artifacts_and_histogram(self, tmp_path):
        tdir, hdir = tmp_path / "t", tmp_path / "h"
        rc = run(["train", "--out", tdir, *BASE, *TINY,
                  "--override", "epochs=1", "--override", "batches_per_epoch=2",
                  "--override", "batch_size=3",
                  "--override", "p_range=0.08,0.12", "--seed", "6"])
        assert rc == 0
        assert (tdir / "model.ckpt").exists()
        with open(tdir / "metrics.csv", newline="") as fh:
            assert len(list(csv.reader(fh))) == 2  # header + 1 epoch
        manifest = parse_config_text((tdir / "manifest.txt").read_text())
        assert manifest["p_range"] == "0.08,0.12"

        rc = run(["hist", "--out", hdir, *BASE, *TINY,
                  "--override", f"checkpoint={tdir / 'model.ckpt'}",
                  "--override", "p=0.08", "--override", "shots=20",
                  "--override", "bins=10", "--seed", "8"])
        assert rc == 0
        lines = (hdir / "histogram.csv").read_text().splitlines()
        assert lines[0] == "bin_lo,bin_hi,density"
        rows = [tuple(map(float, l.split(","))) for l in lines[1:]]
        assert sum((hi - lo) * d for lo, hi, d in rows) == pytest.approx(1.0)


class TestThreshold:
    def test_report_matches_results_csv(self, tmp_path):
        rc = run(["threshold", "--out", tmp_path,
                  "--override", "code=toric", "--override", "noise=independent",
                  "--override", "L_grid=4,6",
                  "--override", "p_grid=0.08,0.10,0.12,0.14",
                  "--override", "shots=150", "--seed", "12"])
        assert rc == 0
        report = dict(line.split("=", 1) for line in
                      (tmp_path / "threshold.txt").read_text().splitlines())
        recomputed = estimate_threshold(read_results_csv(tmp_path / "results.csv"))
        assert float(report["p_th"]) == recomputed.p_th

    def test_grid_shape_checked_early(self, tmp_path):
        assert run(["threshold", "--out", tmp_path,
                    "--override", "code=toric",
                    "--override", "noise=independent",
                    "--override", "L_grid=4",
                    "--override", "p_grid=0.08,0.1,0.12,0.14",
                    "--override", "shots=10"]) == 2


def test_console_script(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "nmwpm.cli", "bench", "--out", str(tmp_path),
         "--override", "code=toric", "--override", "noise=independent",
         "--override", "L_grid=4", "--override", "p_grid=0",
         "--override", "shots=5"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "results.csv").exists()
    assert (tmp_path / "manifest.txt").exists()
