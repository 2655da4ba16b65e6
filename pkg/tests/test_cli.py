import csv
import json

import numpy as np
import pytest

from weaktomo.cli import main
from weaktomo.config import matrix_to_literal

IDENTITY_POVM = {"elements": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]], "labels": ["all"]}


def rotated_projector_literal(angle):
    v = np.array([np.cos(angle), np.sin(angle)])
    return matrix_to_literal(np.outer(v, v))


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def run(command, config_path, out_dir, *extra):
    return main([command, "--config", config_path, "--out", str(out_dir), *extra])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def double_slit_config(**overrides):
    cfg = {
        "weak_povm": {"catalog": "double-slit"},
        "epsilon": 0.001,
        "seed": 7,
    }
    cfg.update(overrides)
    return cfg


class TestPostselectCommand:
    def test_double_slit_rows(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config())
        out = tmp_path / "out"
        assert run("postselect", cfg, out) == 0
        rows = read_csv(out / "postselect.csv")
        assert rows[0] == ["outcome", "probability", "min_eigenvalue", "negativity"]
        label, prob, min_eig, neg = rows[1]
        assert label == "path1"
        assert float(prob) == pytest.approx(0.5, abs=1e-12)
        assert float(min_eig) == pytest.approx((1 - np.sqrt(2)) / 2, abs=1e-10)
        assert float(neg) == pytest.approx((np.sqrt(2) - 1) / 2, abs=1e-10)
        doc = json.loads((out / "postselect.json").read_text())
        assert doc["decomposition_residual"] < 1e-10
        assert (out / "postselect.png").stat().st_size > 0

    def test_trivial_final_povm(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config(final_povm=IDENTITY_POVM))
        out = tmp_path / "out"
        assert run("postselect", cfg, out) == 0
        rows = read_csv(out / "postselect.csv")
        assert len(rows) == 2
        assert float(rows[1][3]) <= 1e-10  # negativity of the full ensemble

    def test_byte_identical_replay(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config(postselect={"samples": 50_000}))
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run("postselect", cfg, out1) == 0
        assert run("postselect", cfg, out2) == 0
        for name in ("postselect.csv", "postselect.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_seed_override_changes_estimates(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config(postselect={"samples": 50_000}))
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run("postselect", cfg, out1) == 0
        assert run("postselect", cfg, out2, "--seed", "8") == 0
        assert (out1 / "postselect.csv").read_bytes() != (out2 / "postselect.csv").read_bytes()

    def test_missing_final_povm(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "weak_povm": {"catalog": "double-slit"},
                "epsilon": 0.1,
                "seed": 1,
                "final_povm": None,
            },
        )
        # null final_povm fails schema parsing -> config error
        assert run("postselect", cfg, tmp_path / "out") == 1


class TestReconstructCommand:
    def test_exact_round_trip(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config(epsilon=0.05))
        out = tmp_path / "out"
        assert run("reconstruct", cfg, out) == 0
        doc = json.loads((out / "reconstruct.json").read_text())
        assert doc["trace_distance_to_true_state"] < 1e-9
        assert doc["frame_rank"] == 4
        assert doc["frame_complete"] is True

    def test_zero_strength_exits_two(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config(epsilon=0.0))
        assert run("reconstruct", cfg, tmp_path / "out") == 2

    def test_incomplete_frame_exits_two(self, tmp_path, capsys):
        projective = {
            "elements": [
                [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
                [[[0, 0], [0, 0]], [[0, 0], [1, 0]]],
            ]
        }
        cfg = write_config(
            tmp_path,
            {
                "initial_state": {"pure": [[1, 0], [1, 0]]},
                "weak_povm": projective,
                "epsilon": 0.1,
                "seed": 3,
            },
        )
        assert run("reconstruct", cfg, tmp_path / "out") == 2
        assert "FrameIncomplete" in capsys.readouterr().err

    def test_malformed_literal_exits_one_with_path(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            {
                "initial_state": [[[1, 0], [0]], [[0, 0], [0, 0]]],
                "weak_povm": {"catalog": "sic-qubit"},
                "epsilon": 0.1,
                "seed": 3,
            },
        )
        assert run("reconstruct", cfg, tmp_path / "out") == 1
        err = capsys.readouterr().err
        assert "initial_state[0][1]" in err

    def test_sampled_reconstruction(self, tmp_path):
        cfg = write_config(
            tmp_path, double_slit_config(epsilon=0.3, reconstruct={"samples": 200_000})
        )
        out = tmp_path / "out"
        assert run("reconstruct", cfg, out) == 0
        doc = json.loads((out / "reconstruct.json").read_text())
        assert doc["samples"] == 200_000
        assert doc["trace_distance_to_true_state"] < 0.05


class TestJointCommand:
    def test_trivial_second_reproduces_marginal(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config(second_final_povm=IDENTITY_POVM))
        out = tmp_path / "out"
        assert run("joint", cfg, out) == 0
        rows = read_csv(out / "joint.csv")
        assert rows[0] == ["outcome", "all"]
        assert float(rows[1][1]) == pytest.approx(0.5, abs=1e-12)
        assert float(rows[2][1]) == pytest.approx(0.5, abs=1e-12)

    def test_documented_negative_cell(self, tmp_path):
        angle = 2 * np.pi / 3
        second = {
            "elements": [
                rotated_projector_literal(angle),
                matrix_to_literal(np.eye(2) - np.outer(
                    np.array([np.cos(angle), np.sin(angle)]),
                    np.array([np.cos(angle), np.sin(angle)]),
                )),
            ],
            "labels": ["psi", "not-psi"],
        }
        cfg = write_config(
            tmp_path,
            {
                "initial_state": {"pure": [[1, 0], [1, 0]]},
                "weak_povm": {"catalog": "pauli6-qubit"},
                "final_povm": {
                    "elements": [
                        [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
                        [[[0, 0], [0, 0]], [[0, 0], [1, 0]]],
                    ],
                    "labels": ["ground", "excited"],
                },
                "second_final_povm": second,
                "epsilon": 0.1,
                "seed": 5,
            },
        )
        out = tmp_path / "out"
        assert run("joint", cfg, out) == 0
        doc = json.loads((out / "joint.json").read_text())
        cell = doc["table"][0][0]
        assert cell == pytest.approx(-(np.sqrt(3) - 1) / 8, abs=1e-12)
        assert doc["negative_cells"] >= 1
        assert doc["max_order_deviation"] < 1e-10
        assert doc["max_joint_deviation"] < 1e-10

    def test_missing_second_final_exits_one(self, tmp_path, capsys):
        # inline scenario with a final POVM but no second one
        cfg = write_config(
            tmp_path,
            {
                "initial_state": {"pure": [[1, 0], [1, 0]]},
                "weak_povm": {"elements": [matrix_to_literal(m) for m in _pauli6_matrices()]},
                "epsilon": 0.1,
                "final_povm": {
                    "elements": [
                        [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
                        [[[0, 0], [0, 0]], [[0, 0], [1, 0]]],
                    ]
                },
                "seed": 2,
            },
        )
        assert run("joint", cfg, tmp_path / "out") == 1
        assert "second_final_povm" in capsys.readouterr().err


def _pauli6_matrices():
    eye = np.eye(2, dtype=complex)
    paulis = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    out = []
    for s in paulis:
        out.append((eye + s) / 6)
        out.append((eye - s) / 6)
    return out


class TestSweepCommand:
    def test_epsilon_sweep(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "weak_povm": {"catalog": "sic-qubit"},
                "epsilon": 0.001,
                "seed": 9,
                "sweep": {
                    "axis": "epsilon",
                    "epsilons": [0.001, 0.003, 0.01, 0.03, 0.1],
                    "mode": "exact",
                    "postselect": "z0",
                },
            },
        )
        out = tmp_path / "out"
        assert run("sweep", cfg, out) == 0
        doc = json.loads((out / "sweep.json").read_text())
        assert doc["fitted_slope"] == pytest.approx(1.0, abs=0.15)
        rows = read_csv(out / "sweep.csv")
        assert rows[0] == ["epsilon", "error", "min_eigenvalue", "negativity"]
        assert len(rows) == 6
        assert (out / "sweep.png").stat().st_size > 0

    def test_samples_sweep_replay(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "weak_povm": {"catalog": "double-slit"},
                "epsilon": 0.001,
                "seed": 9,
                "sweep": {
                    "axis": "samples",
                    "counts": [1000, 3000, 10000, 30000],
                    "repeats": 3,
                    "postselect": "path1",
                },
            },
        )
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run("sweep", cfg, out1) == 0
        assert run("sweep", cfg, out2) == 0
        assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
        assert (out1 / "sweep.json").read_bytes() == (out2 / "sweep.json").read_bytes()

    def test_bad_axis_exits_one(self, tmp_path):
        cfg = write_config(
            tmp_path, double_slit_config(sweep={"axis": "voltage", "epsilons": [1, 2, 3, 4]})
        )
        assert run("sweep", cfg, tmp_path / "out") == 1

    def test_unknown_section_field_exits_one(self, tmp_path):
        cfg = write_config(
            tmp_path,
            double_slit_config(
                sweep={"axis": "epsilon", "epsilons": [0.001, 0.01, 0.1, 1.0], "foo": 1}
            ),
        )
        assert run("sweep", cfg, tmp_path / "out") == 1


class TestSampleCommand:
    def test_counts_table(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config(sample={"count": 5000}))
        out = tmp_path / "out"
        assert run("sample", cfg, out, "--format", "both") == 0
        rows = read_csv(out / "sample.csv")
        assert rows[0] == ["outcome", "path1", "path2"]
        total = sum(int(c) for row in rows[1:] for c in row[1:])
        assert total == 5000
        doc = json.loads((out / "sample.json").read_text())
        assert doc["total"] == 5000

    def test_missing_count_exits_one(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config(sample={}))
        assert run("sample", cfg, tmp_path / "out") == 1

    def test_csv_only_format(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config(sample={"count": 100}))
        out = tmp_path / "out"
        assert run("sample", cfg, out, "--format", "csv", "--no-plot") == 0
        assert (out / "sample.csv").exists()
        assert not (out / "sample.json").exists()
        assert not (out / "sample.png").exists()

    def test_byte_identical_replay(self, tmp_path):
        cfg = write_config(tmp_path, double_slit_config(sample={"count": 250_000}))
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run("sample", cfg, out1) == 0
        assert run("sample", cfg, out2) == 0
        assert (out1 / "sample.csv").read_bytes() == (out2 / "sample.csv").read_bytes()
        assert (out1 / "sample.json").read_bytes() == (out2 / "sample.json").read_bytes()


class TestRandomCatalogThroughCli:
    def test_postselect_replay(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "weak_povm": {"catalog": "random", "dim": 3, "rank": 2},
                "epsilon": 0.05,
                "seed": 31,
                "postselect": {"samples": 20_000},
            },
        )
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run("postselect", cfg, out1) == 0
        assert run("postselect", cfg, out2) == 0
        assert (out1 / "postselect.csv").read_bytes() == (out2 / "postselect.csv").read_bytes()
        assert (out1 / "postselect.json").read_bytes() == (out2 / "postselect.json").read_bytes()
