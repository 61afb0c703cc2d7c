import os
import tempfile
import unittest
from typing import Sequence
from unittest import mock

from twinphoton_spectra.model import (
    Bundle,
    CoherenceTransfer,
    EvolutionModel,
    ExcitonSystem,
    FieldConfig,
    IntraCoherence,
    validate_system,
)


def field(pump: float, entanglement_time: float = 0.0, offset: float = 0.0, scale: float = 1.0) -> FieldConfig:
    signal = 0.5 * pump + offset
    return FieldConfig(
        pump_frequency=pump,
        signal_center=signal,
        idler_center=pump - signal,
        entanglement_time=entanglement_time,
        conversion_scale=scale,
    )


def two_level(
    energy: float = 10.0,
    dipole: float = 1.0,
    recovery: float = 0.1,
    dephasing: float = 0.5,
    pump: float = 20.0,
    entanglement_time: float = 0.0,
    scale: float = 1.0,
) -> Bundle:
    system = ExcitonSystem.build([energy], dipoles_ge=[dipole])
    model = EvolutionModel.build([[0.0]], [recovery], [dephasing])
    return validate_system(system, field(pump, entanglement_time, scale=scale), model)


def dimer(
    transfer: float = 0.3,
    recovery: Sequence[float] = (0.05, 0.05),
    dephasing: float = 0.4,
    pump: float = 19.0,
    entanglement_time: float = 0.0,
    coherence_decay: float = 0.0,
    coherence_transfer: float = 0.0,
    doubles: bool = True,
) -> Bundle:
    system = ExcitonSystem.build(
        [10.0, 9.0],
        double_energies=[19.5] if doubles else [],
        dipoles_ge=[1.0, 0.8],
        dipoles_ef=[[0.6, 0.9]] if doubles else [],
    )
    coherences = [IntraCoherence(0, 1, coherence_decay)] if coherence_decay else []
    transfers = [CoherenceTransfer((0, 1), (1, 0), coherence_transfer)] if coherence_transfer else []
    model = EvolutionModel.build(
        [[0.0, 0.0], [transfer, 0.0]],
        list(recovery),
        [dephasing, dephasing],
        [[0.5, 0.5]] if doubles else [],
        intra_coherences=coherences,
        coherence_transfer=transfers,
    )
    return validate_system(system, field(pump, entanglement_time), model)


class LogDirTestCase(unittest.TestCase):
    """Routes the app log into a throwaway directory."""

    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self._env = mock.patch.dict(os.environ, {"TWINPHOTON_LOG_DIR": self._tmp.name})
        self._env.start()

    def tearDown(self) -> None:
        self._env.stop()
        self._tmp.cleanup()
