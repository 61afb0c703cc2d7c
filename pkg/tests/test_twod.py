import unittest

import numpy as np

from twinphoton_spectra.config import load_run_config
from twinphoton_spectra.errors import LineOutsideGrid
from twinphoton_spectra.signal import difference_spectrum
from twinphoton_spectra.twod import (
    Spectrum2D,
    absorptive_2d,
    antidiagonal_cut,
    correspondence_check,
    default_omega_grid,
)

from tests.systems import LogDirTestCase, dimer, two_level


class AbsorptiveTests(unittest.TestCase):
    def test_two_level_peak_at_zero_waiting_time(self) -> None:
        spec = absorptive_2d([10.0], 0.0, [10.0], two_level())

        # GSB and SE each contribute mu^4 / gamma^2
        self.assertAlmostEqual(spec.components["GSB"][0, 0], 4.0, places=12)
        self.assertAlmostEqual(spec.components["SE"][0, 0], 4.0, places=12)
        self.assertAlmostEqual(spec.values[0, 0], 8.0, places=12)
        self.assertEqual(spec.components["ESA"][0, 0], 0.0)

    def test_stimulated_emission_decays_with_the_population(self) -> None:
        bundle = two_level(recovery=0.2)

        late = absorptive_2d([10.0], 3.0, [10.0], bundle)

        self.assertAlmostEqual(late.components["SE"][0, 0], 4.0 * np.exp(-0.6), places=12)

    def test_transfer_cross_peak_grows_with_waiting_time(self) -> None:
        k = 0.3
        bundle = dimer(transfer=k, recovery=(0.0, 0.0))
        # omega1 = 10 pumps the upper state, omega3 = 9 probes the lower one
        emit_upper, emit_lower = 0.4 / 1.16, 0.64 / 0.4
        pump_upper, pump_lower = 1.0 / 0.4, 0.64 * 0.4 / 1.16

        for t2 in (0.0, 1.0, 4.0):
            spec = absorptive_2d([9.0], t2, [10.0], bundle)
            kept = np.exp(-k * t2)
            expected = emit_upper * kept * pump_upper + emit_lower * ((1.0 - kept) * pump_upper + pump_lower)
            self.assertAlmostEqual(spec.components["SE"][0, 0], expected, places=12)

    def test_shape_is_omega3_by_omega1(self) -> None:
        spec = absorptive_2d(np.linspace(8.0, 11.0, 7), 1.0, np.linspace(8.0, 11.0, 5), dimer())

        self.assertEqual(spec.values.shape, (7, 5))
        self.assertTrue(np.all(spec.components["ESA"] <= 0.0))

    def test_negation_flips_every_component(self) -> None:
        spec = absorptive_2d([9.5, 10.0], 1.0, [9.5, 10.0], dimer())

        flipped = -spec

        np.testing.assert_allclose(flipped.values, -spec.values)


class AntidiagonalTests(unittest.TestCase):
    def test_cut_on_matching_grid_hits_the_nodes(self) -> None:
        omega3 = np.array([9.0, 9.5, 10.0])
        omega1 = np.array([9.0, 9.5, 10.0])
        values = np.arange(9.0).reshape(3, 3)
        spec = Spectrum2D(omega3, omega1, 0.0, {"GSB": values, "SE": np.zeros((3, 3)), "ESA": np.zeros((3, 3))})

        cut = antidiagonal_cut(spec, 19.0)

        np.testing.assert_array_equal(cut.omega_grid, omega3)
        np.testing.assert_allclose(cut.values, [values[0, 2], values[1, 1], values[2, 0]])
        np.testing.assert_allclose(cut.components["GSB"], cut.values)
        self.assertEqual(cut.meta["pump_frequency"], 19.0)

    def test_cut_matches_direct_evaluation_on_the_line(self) -> None:
        bundle = dimer()
        omega3 = np.linspace(8.5, 10.5, 9)
        omega1 = (19.0 - omega3)[::-1]

        cut = antidiagonal_cut(absorptive_2d(omega3, 1.0, omega1, bundle), 19.0)

        for k, w3 in enumerate(omega3):
            direct = absorptive_2d([w3], 1.0, [19.0 - w3], bundle).values[0, 0]
            self.assertAlmostEqual(cut.values[k], direct, places=12)

    def test_midpoint_is_linear_in_omega1(self) -> None:
        values = np.array([[1.0, 3.0]])
        zeros = np.zeros((1, 2))
        spec = Spectrum2D([10.0], [9.0, 10.0], 0.0, {"GSB": values, "SE": zeros, "ESA": zeros})

        cut = antidiagonal_cut(spec, 19.5)

        self.assertAlmostEqual(cut.values[0], 2.0)

    def test_line_outside_the_grid(self) -> None:
        zeros = np.zeros((1, 2))
        spec = Spectrum2D([10.0], [1.0, 2.0], 0.0, {"GSB": zeros, "SE": zeros, "ESA": zeros})

        with self.assertRaises(LineOutsideGrid):
            antidiagonal_cut(spec, 20.0)

    def test_axes_must_increase(self) -> None:
        zeros = np.zeros((2, 2))
        comps = {"GSB": zeros, "SE": zeros, "ESA": zeros}

        with self.assertRaises(ValueError):
            Spectrum2D([9.0, 10.0], [2.0, 1.0], 0.0, comps)
        with self.assertRaises(ValueError):
            Spectrum2D([10.0, 10.0], [1.0, 2.0], 0.0, comps)


class CorrespondenceTests(LogDirTestCase):
    def setUp(self) -> None:
        super().setUp()
        self.omega = np.linspace(8.0, 11.5, 141)

    def test_shipped_examples_pass(self) -> None:
        for name in ("two_level", "dimer_transfer", "dimer_coherence"):
            bundle = load_run_config(name).bundle
            report = correspondence_check(self.omega, [0.5, 2.0], bundle)
            self.assertTrue(report.passed, msg=name)
            self.assertLess(report.worst, 1e-10, msg=name)

    def test_conversion_scale_divides_out(self) -> None:
        report = correspondence_check(self.omega, [1.0], two_level(scale=2.5))

        self.assertTrue(report.passed)

    def test_sign_flip_is_caught(self) -> None:
        report = correspondence_check(self.omega, [2.0], dimer(), negate_2d=True)

        self.assertFalse(report.passed)
        check = report.checks[0]
        self.assertGreater(check.max_deviation, 1e-3)
        self.assertGreaterEqual(check.argmax_omega, self.omega[0])
        self.assertLessEqual(check.argmax_omega, self.omega[-1])

    def test_wrong_pump_line_is_caught(self) -> None:
        report = correspondence_check(self.omega, [2.0], dimer(), twod_pump_frequency=19.4)

        self.assertFalse(report.passed)
        self.assertEqual(report.pump_frequency, 19.0)

    def test_tolerance_is_absolute(self) -> None:
        failing = correspondence_check(self.omega, [2.0], dimer(), negate_2d=True)
        deviation = failing.checks[0].max_deviation
        self.assertGreater(deviation, 1.0)

        above = correspondence_check(self.omega, [2.0], dimer(), tolerance=1.01 * deviation, negate_2d=True)
        below = correspondence_check(self.omega, [2.0], dimer(), tolerance=0.99 * deviation, negate_2d=True)

        self.assertTrue(above.passed)
        self.assertFalse(below.passed)


class PumpSweepTests(LogDirTestCase):
    def test_swept_difference_spectra_rebuild_the_2d_change(self) -> None:
        bundle = dimer(coherence_decay=0.3)
        omega3 = np.linspace(8.6, 10.4, 10)
        delay = 1.5

        for wp in np.linspace(18.4, 19.6, 7):
            swept = bundle.with_field(bundle.field.with_pump(wp))
            row = difference_spectrum(omega3, delay, swept).values
            omega1 = wp - omega3[::-1]
            change = absorptive_2d(omega3, delay, omega1, bundle) - absorptive_2d(omega3, 0.0, omega1, bundle)
            np.testing.assert_allclose(row, -np.fliplr(change.values).diagonal(), rtol=1e-10, atol=1e-12)


class DefaultGridTests(unittest.TestCase):
    def test_two_level_margin_and_density(self) -> None:
        grid = default_omega_grid(two_level())

        self.assertAlmostEqual(grid[0], 5.0)
        self.assertAlmostEqual(grid[-1], 15.0)
        self.assertEqual(grid.size, 161)

    def test_dimer_covers_the_double_transitions(self) -> None:
        grid = default_omega_grid(dimer())

        self.assertAlmostEqual(grid[0], 4.0)
        self.assertAlmostEqual(grid[-1], 15.5)


if __name__ == "__main__":
    unittest.main()
