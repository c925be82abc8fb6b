import io
import json
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image

from gridprop import gp_bruteforce, guide_tree, lp_direct
from gridprop.cli import main
from gridprop.fileio import read_pgm16, write_pgm16

WORKED_GUIDE = np.array([[0.0, 0.5], [0.0, 1.0]])
WORKED_PHI = np.array([[[1.0, 0.0], [0.0, 0.0]]])


def npy_bytes(arr):
    buf = io.BytesIO()
    np.save(buf, np.ascontiguousarray(arr, dtype=np.float64))
    return buf.getvalue()


@pytest.fixture
def worked_files(tmp_path):
    guide_path = tmp_path / "guide.npy"
    unary_path = tmp_path / "phi.npy"
    np.save(guide_path, WORKED_GUIDE)
    np.save(unary_path, WORKED_PHI)
    return guide_path, unary_path


class TestPropagate:
    def test_parallel_writes_both_fields(self, tmp_path, worked_files, capsys):
        guide_path, unary_path = worked_files
        prefix = tmp_path / "y"
        code = main([
            "propagate", "--image", str(guide_path), "--unary", str(unary_path),
            "--mode", "parallel", "--zeta-g", "0.5", "--zeta-s", "1.0",
            "--radius", "1", "--iters", "1", "--out-prefix", str(prefix),
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "2x2" in out and "mode=parallel" in out
        y_g = np.load(f"{prefix}_g.npy")
        y_s = np.load(f"{prefix}_s.npy")
        np.testing.assert_allclose(
            y_g, gp_bruteforce(guide_tree(WORKED_GUIDE), WORKED_PHI, 0.5), atol=1e-12
        )
        np.testing.assert_allclose(
            y_s, lp_direct(WORKED_GUIDE, WORKED_PHI, 1.0, 1, 1), atol=1e-12
        )

    def test_constant_unary_stays_constant(self, tmp_path):
        guide_path = tmp_path / "g.npy"
        unary_path = tmp_path / "phi.npy"
        np.save(guide_path, np.random.default_rng(1).random((5, 5)))
        np.save(unary_path, np.full((2, 5, 5), 0.4))
        prefix = tmp_path / "out"
        code = main([
            "propagate", "--image", str(guide_path), "--unary", str(unary_path),
            "--iters", "2", "--out-prefix", str(prefix),
        ])
        assert code == 0
        for tag in ("g", "s"):
            np.testing.assert_allclose(
                np.load(f"{prefix}_{tag}.npy"), np.full((2, 5, 5), 0.4), atol=1e-12
            )

    def test_cascade_writes_identical_slots(self, tmp_path, worked_files):
        guide_path, unary_path = worked_files
        prefix = tmp_path / "c"
        code = main([
            "propagate", "--image", str(guide_path), "--unary", str(unary_path),
            "--mode", "gp-lp", "--iters", "1", "--out-prefix", str(prefix),
        ])
        assert code == 0
        assert (tmp_path / "c_g.npy").read_bytes() == (tmp_path / "c_s.npy").read_bytes()

    def test_bit_identical_across_runs(self, tmp_path, worked_files):
        guide_path, unary_path = worked_files
        for prefix in ("r1", "r2"):
            assert main([
                "propagate", "--image", str(guide_path), "--unary", str(unary_path),
                "--zeta-g", "0.5", "--iters", "1",
                "--out-prefix", str(tmp_path / prefix),
            ]) == 0
        assert (tmp_path / "r1_g.npy").read_bytes() == (tmp_path / "r2_g.npy").read_bytes()
        assert (tmp_path / "r1_s.npy").read_bytes() == (tmp_path / "r2_s.npy").read_bytes()

    def test_pgm_format(self, tmp_path, worked_files):
        guide_path, unary_path = worked_files
        prefix = tmp_path / "p"
        code = main([
            "propagate", "--image", str(guide_path), "--unary", str(unary_path),
            "--iters", "1", "--format", "pgm", "--out-prefix", str(prefix),
        ])
        assert code == 0
        img = read_pgm16(f"{prefix}_g_c0.pgm")
        assert img.shape == (2, 2)

    def test_png_guide(self, tmp_path):
        img_path = tmp_path / "guide.png"
        Image.fromarray(np.array([[0, 255], [0, 255]], dtype=np.uint8), "L").save(img_path)
        unary_path = tmp_path / "phi.npy"
        np.save(unary_path, WORKED_PHI)
        code = main([
            "propagate", "--image", str(img_path), "--unary", str(unary_path),
            "--iters", "1", "--out-prefix", str(tmp_path / "png"),
        ])
        assert code == 0
        expected_guide = np.array([[0.0, 1.0], [0.0, 1.0]])
        np.testing.assert_allclose(
            np.load(tmp_path / "png_g.npy"),
            gp_bruteforce(guide_tree(expected_guide), WORKED_PHI, 0.07),
            atol=1e-9,
        )

    def test_missing_file_is_io_error(self, tmp_path, worked_files):
        _, unary_path = worked_files
        code = main([
            "propagate", "--image", str(tmp_path / "absent.npy"),
            "--unary", str(unary_path), "--out-prefix", str(tmp_path / "x"),
        ])
        assert code == 3

    def test_shape_mismatch_is_validation_error(self, tmp_path, worked_files):
        guide_path, _ = worked_files
        bad = tmp_path / "bad.npy"
        np.save(bad, np.zeros((1, 3, 3)))
        code = main([
            "propagate", "--image", str(guide_path), "--unary", str(bad),
            "--out-prefix", str(tmp_path / "x"),
        ])
        assert code == 4

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as err:
            main(["propagate", "--no-such-flag"])
        assert err.value.code == 2


class TestAffinityMap:
    def test_two_region_png(self, tmp_path):
        arr = np.zeros((4, 6), dtype=np.uint8)
        arr[:, 3:] = 255
        img_path = tmp_path / "regions.png"
        Image.fromarray(arr, "L").save(img_path)
        prefix = tmp_path / "amap"
        code = main([
            "affinity-map", "--image", str(img_path), "--pixel", "1,1",
            "--zeta-g", "0.7", "--out-prefix", str(prefix),
        ])
        assert code == 0
        raw = np.load(f"{prefix}.npy")
        assert raw[1, 1] == 1.0
        cross = np.exp(-1.0 / 0.49)
        np.testing.assert_array_equal(raw[:, :3], np.ones((4, 3)))
        np.testing.assert_allclose(raw[:, 3:], cross, atol=1e-15)
        img = read_pgm16(f"{prefix}.pgm")
        assert img[1, 1] == 65535
        assert (img[:, :3] == 65535).all()
        expected = int(np.floor(cross * 65535 + 0.5))
        assert (img[:, 3:] == expected).all()

    def test_uniform_image_all_white(self, tmp_path):
        img_path = tmp_path / "uniform.png"
        Image.fromarray(np.full((3, 3), 128, dtype=np.uint8), "L").save(img_path)
        prefix = tmp_path / "u"
        assert main([
            "affinity-map", "--image", str(img_path), "--pixel", "2,0",
            "--out-prefix", str(prefix),
        ]) == 0
        assert (read_pgm16(f"{prefix}.pgm") == 65535).all()

    def test_local_window_outputs(self, tmp_path):
        img_path = tmp_path / "g.png"
        Image.fromarray(np.full((5, 5), 7, dtype=np.uint8), "L").save(img_path)
        prefix = tmp_path / "w"
        assert main([
            "affinity-map", "--image", str(img_path), "--pixel", "2,2",
            "--radius", "1", "--local-window", "--out-prefix", str(prefix),
        ]) == 0
        wmap = np.load(f"{prefix}_local.npy")
        assert wmap[2, 2] == 1.0
        assert wmap[0, 0] == 0.0

    def test_pixel_out_of_bounds(self, tmp_path):
        img_path = tmp_path / "g.png"
        Image.fromarray(np.zeros((2, 2), dtype=np.uint8), "L").save(img_path)
        code = main([
            "affinity-map", "--image", str(img_path), "--pixel", "5,0",
            "--out-prefix", str(tmp_path / "x"),
        ])
        assert code == 4


class TestBench:
    def test_report_schema(self, capsys):
        code = main([
            "bench", "--sizes", "256,1024", "--warmup", "1", "--reps", "2",
            "--naive-max-n", "1024", "--seed", "7",
        ])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        rows = [json.loads(line) for line in lines]
        assert len(rows) == 3
        for row, n in zip(rows[:2], (256, 1024)):
            assert row["n"] == n
            assert row["fast_ms"] > 0
            assert row["naive_ms"] > 0
            assert row["speedup"] == pytest.approx(row["naive_ms"] / row["fast_ms"])
            assert "fast_ms_spread" in row
        assert "slope" in rows[2]

    def test_naive_cap(self, capsys):
        code = main([
            "bench", "--sizes", "64,256", "--warmup", "0", "--reps", "1",
            "--naive-max-n", "64",
        ])
        assert code == 0
        rows = [json.loads(line) for line in capsys.readouterr().out.strip().splitlines()]
        assert rows[0]["naive_ms"] is not None
        assert rows[1]["naive_ms"] is None and rows[1]["speedup"] is None

    def test_bad_sizes(self):
        assert main(["bench", "--sizes", "abc"]) == 4


class TestLoss:
    def test_worked_example(self, tmp_path, capsys):
        np.save(tmp_path / "pred.npy", np.array([[[0.0, 0.0]]]))
        np.save(tmp_path / "g.npy", np.array([[[1.0, 0.0]]]))
        np.save(tmp_path / "s.npy", np.array([[[0.0, 1.0]]]))
        code = main([
            "loss", "--pred", str(tmp_path / "pred.npy"),
            "--label-global", str(tmp_path / "g.npy"),
            "--label-local", str(tmp_path / "s.npy"),
        ])
        assert code == 0
        assert float(capsys.readouterr().out.strip()) == 1.0

    def test_identical_pred_zero(self, tmp_path, capsys):
        field = np.random.default_rng(3).random((2, 3, 3))
        np.save(tmp_path / "pred.npy", field)
        np.save(tmp_path / "g.npy", field)
        code = main([
            "loss", "--pred", str(tmp_path / "pred.npy"),
            "--label-global", str(tmp_path / "g.npy"),
        ])
        assert code == 0
        assert float(capsys.readouterr().out.strip()) == 0.0

    def test_empty_mask_zero(self, tmp_path, capsys):
        np.save(tmp_path / "pred.npy", np.zeros((1, 2, 2)))
        np.save(tmp_path / "g.npy", np.ones((1, 2, 2)))
        np.save(tmp_path / "mask.npy", np.zeros((2, 2), dtype=np.uint8))
        code = main([
            "loss", "--pred", str(tmp_path / "pred.npy"),
            "--label-global", str(tmp_path / "g.npy"),
            "--mask", str(tmp_path / "mask.npy"),
        ])
        assert code == 0
        assert float(capsys.readouterr().out.strip()) == 0.0

    def test_shape_mismatch(self, tmp_path):
        np.save(tmp_path / "pred.npy", np.zeros((1, 2, 2)))
        np.save(tmp_path / "g.npy", np.ones((1, 3, 3)))
        assert main([
            "loss", "--pred", str(tmp_path / "pred.npy"),
            "--label-global", str(tmp_path / "g.npy"),
        ]) == 4


class TestPgmRoundTrip:
    def test_roundtrip(self, tmp_path):
        values = np.linspace(0, 1, 12).reshape(3, 4)
        path = tmp_path / "x.pgm"
        write_pgm16(path, values)
        back = read_pgm16(path)
        np.testing.assert_array_equal(
            back, np.floor(values * 65535 + 0.5).astype(np.uint16)
        )


class TestConsoleScript:
    def test_module_invocation(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "gridprop", "--version"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert result.stdout.strip() == "0.1.0"

    def test_propagate_subprocess(self, tmp_path):
        np.save(tmp_path / "g.npy", WORKED_GUIDE)
        np.save(tmp_path / "phi.npy", WORKED_PHI)
        result = subprocess.run(
            [
                sys.executable, "-m", "gridprop", "propagate",
                "--image", str(tmp_path / "g.npy"),
                "--unary", str(tmp_path / "phi.npy"),
                "--zeta-g", "0.5", "--iters", "1",
                "--out-prefix", str(tmp_path / "y"),
            ],
            capture_output=True, text=True,
        )
        assert result.returncode == 0, result.stderr
        assert (tmp_path / "y_g.npy").exists()
