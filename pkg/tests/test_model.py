import unittest

import numpy as np

from twinphoton_spectra.errors import (
    DarkSystem,
    DipoleShapeMismatch,
    InvalidEnergyOrdering,
    NegativeRate,
    NonPositiveDephasing,
    PumpEnergyMismatch,
    UnknownCoherenceElement,
    ValidationError,
)
from twinphoton_spectra.model import (
    CoherenceTransfer,
    EvolutionModel,
    ExcitonSystem,
    FieldConfig,
    IntraCoherence,
    validate_system,
)

from tests.systems import dimer, field


class ValidationTests(unittest.TestCase):
    def test_every_issue_is_reported_at_once(self) -> None:
        system = ExcitonSystem.build([10.0, 9.0], dipoles_ge=[1.0, 0.5])
        bad_field = FieldConfig(pump_frequency=19.0, signal_center=9.0, idler_center=9.0)
        model = EvolutionModel.build([[0.0, -0.1], [0.2, 0.0]], [0.1, 0.1], [0.4, 0.4])

        with self.assertRaises(ValidationError) as ctx:
            validate_system(system, bad_field, model)

        self.assertEqual(ctx.exception.kinds(), {PumpEnergyMismatch, NegativeRate})
        self.assertEqual(len(ctx.exception.issues), 2)

    def test_doubles_below_singles_are_rejected(self) -> None:
        system = ExcitonSystem.build([10.0], double_energies=[9.0], dipoles_ge=[1.0], dipoles_ef=[[1.0]])
        model = EvolutionModel.build([[0.0]], [0.1], [0.4], [[0.4]])

        with self.assertRaises(ValidationError) as ctx:
            validate_system(system, field(20.0), model)

        self.assertIn(InvalidEnergyOrdering, ctx.exception.kinds())

    def test_all_zero_dipoles_make_a_dark_system(self) -> None:
        system = ExcitonSystem.build([10.0], dipoles_ge=[0.0])
        model = EvolutionModel.build([[0.0]], [0.1], [0.4])

        with self.assertRaises(ValidationError) as ctx:
            validate_system(system, field(20.0), model)

        self.assertEqual(ctx.exception.kinds(), {DarkSystem})

    def test_dipole_shape_mismatch_names_the_key(self) -> None:
        system = ExcitonSystem.build([10.0, 9.0], double_energies=[19.5], dipoles_ge=[1.0, 1.0], dipoles_ef=[[1.0]])
        model = EvolutionModel.build([[0.0, 0.0], [0.0, 0.0]], [0.1, 0.1], [0.4, 0.4], [[0.5, 0.5]])

        with self.assertRaises(ValidationError) as ctx:
            validate_system(system, field(19.0), model)

        issue = ctx.exception.issues[0]
        self.assertIsInstance(issue, DipoleShapeMismatch)
        self.assertEqual(issue.key, "system.dipoles_ef")

    def test_zero_dephasing_is_rejected(self) -> None:
        system = ExcitonSystem.build([10.0], dipoles_ge=[1.0])
        model = EvolutionModel.build([[0.0]], [0.1], [0.0])

        with self.assertRaises(ValidationError) as ctx:
            validate_system(system, field(20.0), model)

        self.assertIn(NonPositiveDephasing, ctx.exception.kinds())

    def test_transfer_between_unregistered_coherences_is_rejected(self) -> None:
        system = ExcitonSystem.build([10.0, 9.0], dipoles_ge=[1.0, 1.0])
        model = EvolutionModel.build(
            [[0.0, 0.0], [0.0, 0.0]],
            [0.1, 0.1],
            [0.4, 0.4],
            coherence_transfer=[CoherenceTransfer((0, 1), (1, 0), 0.1)],
        )

        with self.assertRaises(ValidationError) as ctx:
            validate_system(system, field(19.0), model)

        self.assertEqual(ctx.exception.kinds(), {UnknownCoherenceElement})


class GeneratorTests(unittest.TestCase):
    def test_population_columns_close_with_ground_recovery(self) -> None:
        model = EvolutionModel.build([[5.0, 0.2], [0.3, 7.0]], [0.05, 0.1], [0.4, 0.4])

        gen = model.population_generator()

        np.testing.assert_allclose(gen.sum(axis=0), [-0.05, -0.1], atol=1e-15)
        self.assertAlmostEqual(gen[1, 0], 0.3)
        self.assertAlmostEqual(gen[0, 0], -0.35)

    def test_full_generator_conserves_probability(self) -> None:
        model = EvolutionModel.build([[0.0, 0.2], [0.3, 0.0]], [0.05, 0.1], [0.4, 0.4])

        full = model.full_generator()

        np.testing.assert_allclose(full.sum(axis=0), 0.0, atol=1e-15)
        self.assertEqual(full[0, 0], 0.0)


class BundleTests(unittest.TestCase):
    def test_conjugate_coherence_is_registered_with_opposite_frequency(self) -> None:
        bundle = dimer(coherence_decay=0.3)

        elements = bundle.coherence_elements()

        self.assertEqual([(c.a, c.b) for c in elements], [(0, 1), (1, 0)])
        self.assertAlmostEqual(elements[0].frequency, 1.0)
        self.assertAlmostEqual(elements[1].frequency, -1.0)
        self.assertEqual(bundle.liouville_elements(), [(0, 0), (1, 1), (0, 1), (1, 0)])

    def test_explicit_coherence_frequency_wins(self) -> None:
        system = ExcitonSystem.build([10.0, 9.0], dipoles_ge=[1.0, 1.0])
        model = EvolutionModel.build(
            [[0.0, 0.0], [0.0, 0.0]], [0.1, 0.1], [0.4, 0.4], intra_coherences=[IntraCoherence(0, 1, 0.2, 1.5)]
        )
        bundle = validate_system(system, field(19.0), model)

        self.assertAlmostEqual(bundle.coherence_elements()[0].frequency, 1.5)

    def test_pump_shift_keeps_energy_conservation_and_offset(self) -> None:
        base = field(19.0, offset=0.25)

        shifted = base.with_pump(20.0)

        self.assertAlmostEqual(shifted.signal_center + shifted.idler_center, 20.0)
        self.assertAlmostEqual(
            shifted.signal_center - shifted.idler_center, base.signal_center - base.idler_center
        )

    def test_scaled_multiplies_every_dipole(self) -> None:
        system = dimer().system

        scaled = system.scaled(2.0)

        np.testing.assert_allclose(scaled.mu_ge, 2.0 * system.mu_ge)
        np.testing.assert_allclose(scaled.mu_ef, 2.0 * system.mu_ef)


if __name__ == "__main__":
    unittest.main()
