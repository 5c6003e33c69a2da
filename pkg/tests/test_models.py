import json

import numpy as np
import pytest

from sparsectl import (InvalidInputError, PlantFormatError, check_assumptions,
                       converter, interconnected_chain, load_plant,
                       parse_model_uri, plant_sha256, power_grid, save_plant,
                       streams)


class TestConverter:
    def test_matrices(self):
        plant = converter()
        assert (plant.n, plant.m) == (3, 2)
        assert plant.A[0, 2] == 0.1017
        assert plant.A[2, 2] == 2.0
        assert plant.B[2, 0] == 314.1593
        assert plant.B[1, 1] == 1.5095

    def test_assumptions_hold(self):
        report = check_assumptions(converter())
        assert report.rank_ok and report.spectral_ok

    def test_open_loop_unstable(self):
        rho = max(abs(np.linalg.eigvals(converter().A)))
        assert rho == pytest.approx(2.0, abs=1e-12)


class TestPowerGrid:
    def test_two_node_hand_assembly(self):
        inertia = np.array([1.0, 2.0])
        damping = np.array([0.5, 1.0])
        dk, leak, gain = 0.2, 2.0, 1.8
        plant = power_grid(2, dk=dk, param_seed=0, inertia=inertia,
                           damping=damping, theta_leak=leak, freq_gain=gain)
        alpha = 1.0 - (damping / inertia) * dk
        kij = 1.0
        A = np.zeros((4, 4))
        for i in range(2):
            A[2 * i, 2 * i] = 1.0 - leak * dk
            A[2 * i, 2 * i + 1] = dk
            j = 1 - i
            A[2 * i + 1, 2 * j] = (kij / inertia[i]) * dk
            A[2 * i + 1, 2 * i] = -(kij / inertia[i]) * dk
            for jj in range(2):
                A[2 * i + 1, 2 * jj + 1] = gain * alpha[i] / 2.0
        assert np.array_equal(plant.A, A)
        assert np.array_equal(plant.B.ravel(), [0.0, 1.0, 0.0, 1.0])

    def test_dimensions_at_scale(self):
        plant = power_grid(1000, dk=0.2, param_seed=7)
        assert plant.A.shape == (2000, 2000)
        assert plant.B.shape == (2000, 1)
        report = check_assumptions(plant)
        assert report.rank_ok and report.spectral_ok

    def test_deterministic_in_seed(self):
        a = power_grid(10, param_seed=42)
        b = power_grid(10, param_seed=42)
        c = power_grid(10, param_seed=43)
        assert np.array_equal(a.A, b.A) and np.array_equal(a.B, b.B)
        assert not np.array_equal(a.A, c.A)

    def test_assumptions_hold_across_seeds_and_sizes(self):
        for seed in (1, 2, 7):
            for nodes in (10, 50):
                plant = power_grid(nodes, param_seed=seed)
                report = check_assumptions(plant)
                assert report.rank_ok and report.spectral_ok, \
                    (seed, nodes, report)

    def test_open_loop_unstable(self):
        plant = power_grid(50, param_seed=7)
        assert max(abs(np.linalg.eigvals(plant.A))) > 1.0

    def test_metadata_replayable(self):
        plant = power_grid(5, param_seed=9)
        meta = plant.meta
        assert meta["generator"] == streams.GENERATOR_NAME
        replay = power_grid(5, param_seed=9,
                            inertia=np.array(meta["inertia"]),
                            damping=np.array(meta["damping"]))
        assert np.array_equal(plant.A, replay.A)

    def test_too_few_nodes(self):
        with pytest.raises(InvalidInputError):
            power_grid(1)


class TestChain:
    def test_single_subsystem(self):
        plant = interconnected_chain(1)
        assert np.array_equal(plant.A, [[1.0, 0.890], [0.890, 1.0]])
        assert np.array_equal(plant.B, [[3.5600], [1.7800]])

    def test_twenty_subsystems(self):
        plant = interconnected_chain(20)
        assert plant.A.shape == (40, 40)
        assert plant.B.shape == (40, 20)
        assert check_assumptions(plant).spectral_ok

    def test_block_structure(self):
        N = 6
        plant = interconnected_chain(N)
        Ab = np.array([[1.0, 0.890], [0.890, 1.0]])
        E = np.diag([0.0890, 0.0890])
        for i in range(N):
            for j in range(N):
                block = plant.A[2 * i:2 * i + 2, 2 * j:2 * j + 2]
                if i == j:
                    assert np.array_equal(block, Ab)
                elif abs(i - j) == 1:
                    assert np.array_equal(block, E)
                else:
                    assert np.array_equal(block, np.zeros((2, 2)))
        assert np.array_equal(plant.A, plant.A.T)


class TestPlantFiles:
    def test_round_trip_bit_exact(self, tmp_path):
        for plant in (converter(), power_grid(4, param_seed=3),
                      interconnected_chain(3)):
            path = tmp_path / f"{plant.name}.json"
            save_plant(plant, path)
            back = load_plant(path)
            assert np.array_equal(back.A, plant.A)
            assert np.array_equal(back.B, plant.B)
            assert back.name == plant.name
            assert plant_sha256(back) == plant_sha256(plant)

    def test_dimension_mismatch_names_field(self, tmp_path):
        path = tmp_path / "bad.json"
        doc = {"format": "sparsectl-plant", "version": 1, "n": 3, "m": 1,
               "A": [0.0] * 6, "B": [0.0] * 3}
        path.write_text(json.dumps(doc))
        with pytest.raises(PlantFormatError, match="'A'"):
            load_plant(path)

    def test_nan_entry_located(self, tmp_path):
        path = tmp_path / "nan.json"
        A = [0.0] * 9
        A[5] = "nan"
        doc = {"format": "sparsectl-plant", "version": 1, "n": 3, "m": 1,
               "A": A, "B": [1.0, 0.0, 0.0]}
        path.write_text(json.dumps(doc))
        with pytest.raises(PlantFormatError, match="row 1, column 2"):
            load_plant(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(PlantFormatError):
            load_plant(tmp_path / "nope.json")

    def test_weights_round_trip(self, tmp_path):
        plant = converter()
        plant.weights = np.array([1.0, 2.0, 3.0])
        path = tmp_path / "weighted.json"
        save_plant(plant, path)
        assert np.array_equal(load_plant(path).weights, plant.weights)


class TestModelUri:
    def test_converter(self):
        spec = parse_model_uri("builtin:converter")
        assert spec.kind == "converter"
        assert spec.resolve().n == 3

    def test_grid_with_params(self):
        spec = parse_model_uri("builtin:grid?nodes=12&dk=0.2&seed=5")
        assert spec.kind == "grid"
        plant = spec.resolve()
        assert plant.n == 24
        assert plant.meta["param_seed"] == 5

    def test_chain(self):
        spec = parse_model_uri("builtin:chain?N=4")
        assert spec.resolve().n == 8

    def test_file_fallback(self, tmp_path):
        path = tmp_path / "p.json"
        save_plant(converter(), path)
        spec = parse_model_uri(str(path))
        assert spec.kind == "file"
        assert spec.resolve().n == 3

    def test_unknown_builtin(self):
        with pytest.raises(InvalidInputError):
            parse_model_uri("builtin:rocket")

    def test_grid_requires_nodes(self):
        with pytest.raises(InvalidInputError):
            parse_model_uri("builtin:grid")
