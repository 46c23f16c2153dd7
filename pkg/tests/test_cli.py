import csv
import io

import numpy as np
import pytest

from bttb import (KernelParams, assemble_dense, build_transform_stack,
                  make_grid, read_vector, run_bench, simulate, sizes_rows,
                  write_bench_csv, write_vector)
from bttb.cli import main
from bttb.harness import CSV_COLUMNS
from bttb.multiply import apply as apply_stack

from oracles import bouguer_slab


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


class TestSizes:
    def test_padded_values(self, capsys):
        assert main(["sizes", "--padding", "0.05"]) == 0
        header, rows = parse_csv(capsys.readouterr().out)
        n_col = header.index("n")
        assert [int(r[n_col]) for r in rows[:3]] == [918, 7616, 24402]
        assert int(rows[9][n_col]) == 916320

    def test_unpadded_is_product_of_counts(self, capsys):
        assert main(["sizes"]) == 0
        header, rows = parse_csv(capsys.readouterr().out)
        idx = {k: header.index(k) for k in ("sx", "sy", "nz", "m", "n")}
        for r in rows:
            sx, sy, nz = (int(r[idx[k]]) for k in ("sx", "sy", "nz"))
            assert int(r[idx["m"]]) == sx * sy
            assert int(r[idx["n"]]) == sx * sy * nz
        assert int(rows[9][idx["n"]]) == 750000


class TestBench:
    def test_rows_and_errors(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert main(["bench", "--problems", "1,2", "--trials", "3",
                     "--kernel", "gravity", "--seed", "11",
                     "--out", str(out)]) == 0
        header, rows = parse_csv(out.read_text())
        assert tuple(header) == CSV_COLUMNS
        assert len(rows) >= 8
        idx = {k: header.index(k) for k in header}
        for r in rows:
            if r[idx["path"]] == "transform" and r[idx["phase"]] in ("forward", "transpose"):
                assert float(r[idx["mean_rel_error_vs_dense"]]) <= 1e-12
            if r[idx["phase"]] != "skipped":
                assert float(r[idx["mean_seconds"]]) > 0.0
        p1 = [r for r in rows if r[idx["problem"]] == "1"]
        assert {(r[idx["path"]], r[idx["phase"]]) for r in p1} == {
            ("transform", "build"), ("dense", "build"),
            ("dense", "forward"), ("dense", "transpose"),
            ("transform", "forward"), ("transform", "transpose")}
        assert all(r[idx["m"]] == "375" and r[idx["n"]] == "750" for r in p1)

    def test_seeded_errors_reproduce(self):
        params = KernelParams.gravity()
        a = run_bench([1], 0.0, 2, params, seed=123)
        b = run_bench([1], 0.0, 2, params, seed=123)
        for ra, rb in zip(a, b):
            assert ra.mean_rel_error == rb.mean_rel_error  # times differ, data not

    def test_guard_skip_recorded(self):
        params = KernelParams.gravity()
        records = run_bench([1], 0.0, 1, params, seed=0, mem_guard_bytes=1)
        assert any(r.path == "dense" and r.phase == "skipped" for r in records)
        assert all(r.mean_rel_error is None for r in records)
        text = io.StringIO()
        write_bench_csv(records, text)
        assert "skipped" in text.getvalue()

    def test_unknown_problem_index(self, capsys):
        assert main(["bench", "--problems", "13"]) == 2
        assert "problem" in capsys.readouterr().err

    def test_dump_dense_layer(self, tmp_path):
        out = tmp_path / "bench.csv"
        dump = tmp_path / "layer.csv"
        assert main(["bench", "--problems", "1", "--trials", "1",
                     "--out", str(out), "--dump-dense-layer", str(dump)]) == 0
        rows = dump.read_text().strip().splitlines()
        assert len(rows) == 375 and len(rows[0].split(",")) == 375

    def test_magnetic_kernel(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert main(["bench", "--problems", "1", "--trials", "2",
                     "--kernel", "magnetic", "--D", "33", "--I", "47",
                     "--F", "45000", "--out", str(out)]) == 0
        header, rows = parse_csv(out.read_text())
        idx = {k: header.index(k) for k in header}
        assert all(r[idx["kernel"]] == "magnetic" for r in rows)
        errs = [float(r[idx["mean_rel_error_vs_dense"]]) for r in rows
                if r[idx["path"]] == "transform"
                and r[idx["phase"]] in ("forward", "transpose")]
        assert errs and all(e <= 1e-12 for e in errs)


class TestVectorFiles:
    @pytest.mark.parametrize("ext", ["txt", "bin"])
    def test_round_trip(self, tmp_path, ext):
        path = str(tmp_path / f"v.{ext}")
        x = np.random.default_rng(9).uniform(size=33)
        write_vector(x, path)
        np.testing.assert_array_equal(read_vector(path), x)

    def test_unknown_extension(self, tmp_path):
        with pytest.raises(ValueError, match="txt"):
            write_vector(np.zeros(3), str(tmp_path / "v.dat"))


GRID_FLAGS = ["--sx", "4", "--sy", "3", "--nz", "2", "--pxl", "1", "--pxr", "0",
              "--pyl", "0", "--pyr", "1", "--dx", "1.0", "--dy", "1.5",
              "--zblocks", "0,1,2.5"]
GRID = make_grid(4, 3, 2, 1, 0, 0, 1, 1.0, 1.5, (0.0, 1.0, 2.5))


class TestSimulate:
    def test_zero_model(self, tmp_path):
        model = str(tmp_path / "m.txt")
        out = str(tmp_path / "d.txt")
        write_vector(np.zeros(GRID.n), model)
        assert main(["simulate", *GRID_FLAGS, "--model", model, "--out", out]) == 0
        assert np.all(read_vector(out) == 0.0)

    def test_single_prism_matches_dense_column(self, tmp_path):
        model = str(tmp_path / "m.bin")
        out = str(tmp_path / "d.bin")
        col = 17
        e = np.zeros(GRID.n)
        e[col] = 1.0
        write_vector(e, model)
        assert main(["simulate", *GRID_FLAGS, "--kernel", "magnetic",
                     "--D", "33", "--I", "47", "--F", "45000",
                     "--model", model, "--out", out]) == 0
        dense = assemble_dense(GRID, KernelParams.magnetic(33.0, 47.0, 45000.0))
        ref = np.hstack(dense.layers)[:, col]
        got = read_vector(out)
        assert np.linalg.norm(got - ref) <= 1e-12 * np.linalg.norm(ref)

    def test_slab_center_station_near_bouguer(self, tmp_path):
        grid = make_grid(21, 21, 1, 0, 0, 0, 0, 1.0, 1.0, (0.25, 0.35))
        data = simulate(grid, KernelParams.gravity(), np.ones(grid.n))
        center = data.reshape(21, 21)[10, 10]
        ref = bouguer_slab(0.1)
        assert abs(center - ref) / ref < 0.05

    def test_gamma_scale_scales_output(self, tmp_path):
        model = str(tmp_path / "m.txt")
        out1 = str(tmp_path / "d1.txt")
        out2 = str(tmp_path / "d2.txt")
        write_vector(np.ones(GRID.n), model)
        assert main(["simulate", *GRID_FLAGS, "--model", model, "--out", out1]) == 0
        assert main(["simulate", *GRID_FLAGS, "--gamma-scale", "1e5",
                     "--model", model, "--out", out2]) == 0
        np.testing.assert_allclose(read_vector(out2), 1e5 * read_vector(out1),
                                   rtol=1e-12)

    def test_length_mismatch_names_factorization(self, tmp_path, capsys):
        model = str(tmp_path / "m.txt")
        write_vector(np.zeros(GRID.n + 1), model)
        out = str(tmp_path / "d.txt")
        assert main(["simulate", *GRID_FLAGS, "--model", model, "--out", out]) == 2
        err = capsys.readouterr().err
        assert f"n={GRID.n}" in err
        assert f"{GRID.nx}*{GRID.ny}*{GRID.nz}" in err


class TestStackCommands:
    def test_build_stack_then_apply(self, tmp_path):
        stack_path = str(tmp_path / "g.bttb")
        vec = str(tmp_path / "u.bin")
        out = str(tmp_path / "d.bin")
        assert main(["build-stack", *GRID_FLAGS, "--out", stack_path]) == 0
        rng = np.random.default_rng(10)
        u = rng.uniform(size=GRID.n)
        write_vector(u, vec)
        assert main(["apply", "--stack", stack_path, "--in", vec,
                     "--mode", "forward", "--out", out]) == 0
        stack = build_transform_stack(GRID, KernelParams.gravity())
        np.testing.assert_array_equal(read_vector(out),
                                      apply_stack(stack, u, "forward"))
        v = rng.uniform(size=GRID.m)
        write_vector(v, vec)
        assert main(["apply", "--stack", stack_path, "--in", vec,
                     "--mode", "transpose", "--out", out]) == 0
        np.testing.assert_array_equal(read_vector(out),
                                      apply_stack(stack, v, "transpose"))


class TestConfigFile:
    def test_config_and_flag_override(self, tmp_path):
        cfg = tmp_path / "survey.cfg"
        cfg.write_text(
            "# survey geometry\n"
            "sx = 4\nsy = 3\nnz = 2\npxl = 1\npyr = 1\n"
            "dx = 1.0\ndy = 9.9\nzblocks = 0,1,2.5\nkernel = gravity\n")
        model = str(tmp_path / "m.txt")
        out = str(tmp_path / "d.txt")
        write_vector(np.zeros(GRID.n), model)
        # --dy overrides the config's 9.9; grid then matches GRID exactly
        assert main(["simulate", "--config", str(cfg), "--dy", "1.5",
                     "--model", model, "--out", out]) == 0
        assert read_vector(out).shape == (GRID.m,)

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("sx = 4\nbogus = 1\n")
        assert main(["simulate", "--config", str(cfg), "--model", "x.txt",
                     "--out", "y.txt"]) == 2
        assert "bogus" in capsys.readouterr().err


def test_sizes_rows_function():
    rows = sizes_rows(0.05)
    assert rows[0]["n"] == 918 and rows[2]["n"] == 24402
