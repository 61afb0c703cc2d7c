import json
import os
import tempfile
import unittest
from unittest import mock

import numpy as np

from twinphoton_spectra.config import (
    builtin_config_text,
    bundle_from_dict,
    config_digest,
    get_logs_dir,
    load_run_config,
    parse_delays,
    parse_grid,
    parse_sweep,
)
from twinphoton_spectra.errors import ConfigError, PumpEnergyMismatch, ValidationError
from twinphoton_spectra.workers import ordered_map, worker_count


def example(name: str) -> dict:
    return json.loads(builtin_config_text(name))


class LoadTests(unittest.TestCase):
    def test_builtin_by_name(self) -> None:
        run = load_run_config("two_level")

        self.assertEqual(run.source, "builtin:two_level")
        self.assertEqual(run.bundle.system.n_single, 1)
        np.testing.assert_allclose(run.omega_grid(), np.linspace(5.0, 15.0, 401))

    def test_file_path_wins_over_builtin_name(self) -> None:
        data = example("two_level")
        data["field"]["conversion_scale"] = 2.0
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "two_level")
            with open(path, "w", encoding="utf-8") as f:
                json.dump(data, f)

            run = load_run_config(path)

        self.assertEqual(run.bundle.field.conversion_scale, 2.0)
        self.assertEqual(run.digest, config_digest(data))

    def test_invalid_json_is_a_config_error(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "broken.json")
            with open(path, "w", encoding="utf-8") as f:
                f.write("{\"system\": ")

            with self.assertRaises(ConfigError) as ctx:
                load_run_config(path)

        self.assertEqual(ctx.exception.key, "config")

    def test_unknown_builtin(self) -> None:
        with self.assertRaises(ConfigError):
            load_run_config("trimer")

    def test_digest_ignores_key_order(self) -> None:
        self.assertEqual(config_digest({"a": 1, "b": [1, 2]}), config_digest({"b": [1, 2], "a": 1}))
        self.assertNotEqual(config_digest({"a": 1}), config_digest({"a": 2}))


class SchemaTests(unittest.TestCase):
    def test_scalar_dephasing_fills_every_transition(self) -> None:
        data = example("dimer_transfer")
        data["model"]["dephasing"] = 0.3

        model = bundle_from_dict(data).model

        np.testing.assert_allclose(model.gamma_ge, [0.3, 0.3])
        np.testing.assert_allclose(model.gamma_ef, [[0.3, 0.3]])

    def test_field_defaults(self) -> None:
        field = load_run_config("dimer_coherence").bundle.field

        self.assertEqual(field.delay, 0.0)
        self.assertEqual(field.conversion_scale, 1.0)
        self.assertEqual(field.entanglement_time, 0.0)

    def test_transfer_endpoints_must_use_from_and_to(self) -> None:
        data = example("dimer_coherence")
        data["model"]["coherence_transfer"] = [{"source": [0, 1], "target": [1, 0], "rate": 0.1}]
        before = config_digest(data)

        with self.assertRaises(ConfigError) as ctx:
            bundle_from_dict(data)

        self.assertEqual(ctx.exception.key, "model.coherence_transfer[0].from")
        self.assertEqual(config_digest(data), before)

    def test_mistyped_value_names_its_key(self) -> None:
        data = example("two_level")
        data["field"]["pump_frequency"] = "20"

        with self.assertRaises(ConfigError) as ctx:
            bundle_from_dict(data)

        self.assertEqual(ctx.exception.key, "field.pump_frequency")

    def test_coherence_needs_a_decay(self) -> None:
        data = example("dimer_coherence")
        del data["model"]["intra_coherences"][0]["decay"]

        with self.assertRaises(ConfigError) as ctx:
            bundle_from_dict(data)

        self.assertEqual(ctx.exception.key, "model.intra_coherences[0].decay")

    def test_physics_problems_surface_as_validation_error(self) -> None:
        data = example("two_level")
        data["field"]["signal_center"] = 9.0

        with self.assertRaises(ValidationError) as ctx:
            bundle_from_dict(data)

        self.assertIn(PumpEnergyMismatch, ctx.exception.kinds())

    def test_grid_block_is_checked(self) -> None:
        data = example("two_level")
        data["grid"]["points"] = 1

        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "grid.json")
            with open(path, "w", encoding="utf-8") as f:
                json.dump(data, f)
            with self.assertRaises(ConfigError) as ctx:
                load_run_config(path)

        self.assertEqual(ctx.exception.key, "grid.points")


class FlagParsingTests(unittest.TestCase):
    def test_grid(self) -> None:
        np.testing.assert_allclose(parse_grid("1:2:3"), [1.0, 1.5, 2.0])
        for bad in ("1:2", "2:1:5", "1:2:1", "a:b:c"):
            with self.assertRaises(ConfigError):
                parse_grid(bad)

    def test_sweep_includes_the_stop_value(self) -> None:
        pumps = parse_sweep("18.6:19.4:0.1")

        self.assertEqual(pumps.size, 9)
        self.assertAlmostEqual(pumps[-1], 19.4)

    def test_sweep_rejects_empty_ranges(self) -> None:
        for bad in ("19:20:0", "19:20:-1", "20:19:0.1"):
            with self.assertRaises(ConfigError) as ctx:
                parse_sweep(bad)
            self.assertEqual(ctx.exception.key, "--wp")

    def test_delays(self) -> None:
        self.assertEqual(parse_delays("0, 0.5,1"), [0.0, 0.5, 1.0])
        for bad in ("", ",", "1,-2", "x"):
            with self.assertRaises(ConfigError):
                parse_delays(bad)


class EnvironmentTests(unittest.TestCase):
    def test_log_dir_override(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            target = os.path.join(tmp, "logs")
            with mock.patch.dict(os.environ, {"TWINPHOTON_LOG_DIR": target}):
                self.assertEqual(get_logs_dir(), target)
            self.assertTrue(os.path.isdir(target))

    def test_thread_override_and_cap(self) -> None:
        with mock.patch.dict(os.environ, {"TWINPHOTON_THREADS": "3"}):
            self.assertEqual(worker_count(), 3)
        with mock.patch.dict(os.environ, {"TWINPHOTON_THREADS": "not-a-number"}):
            self.assertGreaterEqual(worker_count(), 1)
        self.assertEqual(worker_count(500), 16)
        self.assertEqual(worker_count(0), 1)

    def test_ordered_map_keeps_input_order(self) -> None:
        self.assertEqual(ordered_map(lambda x: x * x, range(20), workers=4), [x * x for x in range(20)])
        self.assertEqual(ordered_map(str, [], workers=4), [])


if __name__ == "__main__":
    unittest.main()
