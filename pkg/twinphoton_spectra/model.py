"""Level structure, field configuration and evolution-model parameters.

Units: hbar = 1, frequencies in radians per user time unit. Every container
here is frozen and holds plain tuples, so a validated bundle can be shared
read-only between worker threads.
"""
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from .errors import (
    DarkSystem,
    DipoleShapeMismatch,
    InvalidEnergyOrdering,
    NegativeRate,
    NonPositiveDephasing,
    PumpEnergyMismatch,
    UnknownCoherenceElement,
    ValidationError,
    ValidationIssue,
)

PUMP_RTOL = 1e-12

Pair = Tuple[int, int]


def _tuple1(values) -> Tuple[float, ...]:
    return tuple(float(v) for v in values)


def _tuple2(rows) -> Tuple[Tuple[float, ...], ...]:
    return tuple(tuple(float(v) for v in row) for row in rows)


@dataclass(frozen=True)
class ExcitonSystem:
    single_energies: Tuple[float, ...]
    double_energies: Tuple[float, ...] = ()
    dipoles_ge: Tuple[float, ...] = ()
    # one row per double state, one column per single state
    dipoles_ef: Tuple[Tuple[float, ...], ...] = ()
    labels: Optional[Tuple[str, ...]] = None

    @classmethod
    def build(cls, single_energies, double_energies=(), dipoles_ge=(), dipoles_ef=(), labels=None):
        return cls(
            single_energies=_tuple1(single_energies),
            double_energies=_tuple1(double_energies),
            dipoles_ge=_tuple1(dipoles_ge),
            dipoles_ef=_tuple2(dipoles_ef),
            labels=tuple(labels) if labels else None,
        )

    @property
    def n_single(self) -> int:
        return len(self.single_energies)

    @property
    def n_double(self) -> int:
        return len(self.double_energies)

    @property
    def w_e(self) -> np.ndarray:
        return np.asarray(self.single_energies, dtype=float)

    @property
    def w_f(self) -> np.ndarray:
        return np.asarray(self.double_energies, dtype=float)

    @property
    def mu_ge(self) -> np.ndarray:
        return np.asarray(self.dipoles_ge, dtype=float)

    @property
    def mu_ef(self) -> np.ndarray:
        if not self.dipoles_ef:
            return np.zeros((self.n_double, self.n_single))
        return np.asarray(self.dipoles_ef, dtype=float)

    def scaled(self, c: float) -> "ExcitonSystem":
        """Copy with every transition dipole multiplied by c."""
        return replace(
            self,
            dipoles_ge=tuple(c * v for v in self.dipoles_ge),
            dipoles_ef=tuple(tuple(c * v for v in row) for row in self.dipoles_ef),
        )


@dataclass(frozen=True)
class FieldConfig:
    pump_frequency: float
    signal_center: float
    idler_center: float
    entanglement_time: float = 0.0
    delay: float = 0.0
    conversion_scale: float = 1.0

    @property
    def delta_limit(self) -> bool:
        return self.entanglement_time == 0.0

    def with_pump(self, pump_frequency: float) -> "FieldConfig":
        """Shift pump and both centres so that energy conservation is kept."""
        shift = 0.5 * (pump_frequency - self.pump_frequency)
        return replace(
            self,
            pump_frequency=pump_frequency,
            signal_center=self.signal_center + shift,
            idler_center=pump_frequency - (self.signal_center + shift),
        )


@dataclass(frozen=True)
class IntraCoherence:
    a: int
    b: int
    decay: float
    frequency: Optional[float] = None


@dataclass(frozen=True)
class CoherenceTransfer:
    source: Pair
    target: Pair
    rate: float


@dataclass(frozen=True)
class EvolutionModel:
    # rates[b][a] is the transfer rate a -> b; the diagonal is recomputed
    rates: Tuple[Tuple[float, ...], ...]
    ground_recovery: Tuple[float, ...]
    dephasing_ge: Tuple[float, ...]
    dephasing_ef: Tuple[Tuple[float, ...], ...] = ()
    intra_coherences: Tuple[IntraCoherence, ...] = ()
    coherence_transfer: Tuple[CoherenceTransfer, ...] = ()

    @classmethod
    def build(
        cls,
        rates,
        ground_recovery,
        dephasing_ge,
        dephasing_ef=(),
        intra_coherences=(),
        coherence_transfer=(),
    ):
        return cls(
            rates=_tuple2(rates),
            ground_recovery=_tuple1(ground_recovery),
            dephasing_ge=_tuple1(dephasing_ge),
            dephasing_ef=_tuple2(dephasing_ef),
            intra_coherences=tuple(intra_coherences),
            coherence_transfer=tuple(coherence_transfer),
        )

    @property
    def n_single(self) -> int:
        return len(self.ground_recovery)

    @property
    def gamma_ge(self) -> np.ndarray:
        return np.asarray(self.dephasing_ge, dtype=float)

    @property
    def gamma_ef(self) -> np.ndarray:
        if not self.dephasing_ef:
            return np.zeros((0, self.n_single))
        return np.asarray(self.dephasing_ef, dtype=float)

    def population_generator(self) -> np.ndarray:
        """Rate matrix over single-manifold populations, dP/dt = K P."""
        n = self.n_single
        k = np.array(self.rates, dtype=float).reshape(n, n) if n else np.zeros((0, 0))
        np.fill_diagonal(k, 0.0)
        k[np.diag_indices(n)] = -k.sum(axis=0) - np.asarray(self.ground_recovery, dtype=float)
        return k

    def full_generator(self) -> np.ndarray:
        """Rate matrix over {ground, singles}; index 0 is the ground state.

        Columns sum to zero, so the trace over ground and singles is conserved.
        """
        n = self.n_single
        full = np.zeros((n + 1, n + 1))
        full[1:, 1:] = self.population_generator()
        full[0, 1:] = np.asarray(self.ground_recovery, dtype=float)
        return full


@dataclass(frozen=True)
class CoherenceElement:
    """A registered single-manifold coherence |a><b| with its free evolution."""
    a: int
    b: int
    frequency: float
    decay: float


@dataclass(frozen=True)
class Bundle:
    system: ExcitonSystem
    field: FieldConfig
    model: EvolutionModel

    def coherence_elements(self) -> List[CoherenceElement]:
        """Registered coherences plus their conjugates, in registration order."""
        w = self.system.w_e
        out: List[CoherenceElement] = []
        seen = set()
        for c in self.model.intra_coherences:
            freq = c.frequency if c.frequency is not None else float(w[c.a] - w[c.b])
            for a, b, f in ((c.a, c.b, freq), (c.b, c.a, -freq)):
                if (a, b) in seen:
                    continue
                seen.add((a, b))
                out.append(CoherenceElement(a, b, float(f), float(c.decay)))
        return out

    def liouville_elements(self) -> List[Pair]:
        """Ordering of the waiting-interval Liouville space: populations first."""
        pops = [(a, a) for a in range(self.system.n_single)]
        return pops + [(c.a, c.b) for c in self.coherence_elements()]

    def has_coherences(self) -> bool:
        return bool(self.model.intra_coherences)

    def has_transfer(self) -> bool:
        return bool(self.model.coherence_transfer)

    def with_field(self, field: FieldConfig) -> "Bundle":
        return replace(self, field=field)


def _check_system(system: ExcitonSystem, issues: List[ValidationIssue]) -> None:
    n, m = system.n_single, system.n_double
    if n == 0:
        issues.append(InvalidEnergyOrdering("no single-excitation states", "system.single_energies"))
    if any(w <= 0 for w in system.single_energies):
        issues.append(InvalidEnergyOrdering("single energies must be > 0", "system.single_energies"))
    if n and any(w <= max(system.single_energies) for w in system.double_energies):
        issues.append(
            InvalidEnergyOrdering("double energies must exceed every single energy", "system.double_energies")
        )
    if len(system.dipoles_ge) != n:
        issues.append(
            DipoleShapeMismatch(f"dipoles_ge has {len(system.dipoles_ge)} entries, expected {n}", "system.dipoles_ge")
        )
    elif not any(v != 0.0 for v in system.dipoles_ge):
        issues.append(DarkSystem("every ground-to-single dipole is zero", "system.dipoles_ge"))
    if m and (len(system.dipoles_ef) != m or any(len(row) != n for row in system.dipoles_ef)):
        issues.append(DipoleShapeMismatch(f"dipoles_ef must be {m}x{n}", "system.dipoles_ef"))
    if not m and system.dipoles_ef:
        issues.append(DipoleShapeMismatch("dipoles_ef given without double states", "system.dipoles_ef"))
    if system.labels is not None and len(system.labels) != n:
        issues.append(DipoleShapeMismatch(f"labels must name {n} single states", "system.labels"))


def _check_field(fc: FieldConfig, issues: List[ValidationIssue]) -> None:
    total = fc.signal_center + fc.idler_center
    if abs(total - fc.pump_frequency) > PUMP_RTOL * max(abs(fc.pump_frequency), 1e-300):
        issues.append(
            PumpEnergyMismatch(
                f"signal_center + idler_center = {total!r} != pump_frequency = {fc.pump_frequency!r}",
                "field.pump_frequency",
            )
        )
    if fc.entanglement_time < 0:
        issues.append(NegativeRate("entanglement_time must be >= 0", "field.entanglement_time"))
    if fc.delay < 0:
        issues.append(NegativeRate("delay must be >= 0", "field.delay"))


def _check_model(model: EvolutionModel, system: ExcitonSystem, issues: List[ValidationIssue]) -> None:
    n, m = system.n_single, system.n_double
    rates = model.rates
    if len(rates) != n or any(len(row) != n for row in rates):
        issues.append(DipoleShapeMismatch(f"rates must be {n}x{n}", "model.rates"))
    else:
        for b in range(n):
            for a in range(n):
                if a != b and rates[b][a] < 0:
                    issues.append(NegativeRate(f"transfer rate {a}->{b} is {rates[b][a]}", "model.rates"))
    if len(model.ground_recovery) != n:
        issues.append(DipoleShapeMismatch(f"ground_recovery needs {n} entries", "model.ground_recovery"))
    elif any(g < 0 for g in model.ground_recovery):
        issues.append(NegativeRate("ground recovery rates must be >= 0", "model.ground_recovery"))
    if len(model.dephasing_ge) != n:
        issues.append(DipoleShapeMismatch(f"dephasing.ge needs {n} entries", "model.dephasing"))
    elif any(g <= 0 for g in model.dephasing_ge):
        issues.append(NonPositiveDephasing("ground-single dephasing must be > 0", "model.dephasing"))
    if m:
        ef = model.dephasing_ef
        if len(ef) != m or any(len(row) != n for row in ef):
            issues.append(DipoleShapeMismatch(f"dephasing.ef must be {m}x{n}", "model.dephasing"))
        elif any(g <= 0 for row in ef for g in row):
            issues.append(NonPositiveDephasing("single-double dephasing must be > 0", "model.dephasing"))

    registered = set()
    for c in model.intra_coherences:
        if not (0 <= c.a < n and 0 <= c.b < n) or c.a == c.b:
            issues.append(UnknownCoherenceElement(f"bad coherence pair ({c.a}, {c.b})", "model.intra_coherences"))
            continue
        if c.decay <= 0:
            issues.append(NonPositiveDephasing(f"coherence ({c.a}, {c.b}) decay must be > 0", "model.intra_coherences"))
        registered.update({(c.a, c.b), (c.b, c.a)})
    for t in model.coherence_transfer:
        if t.rate < 0:
            issues.append(NegativeRate(f"coherence transfer rate {t.rate}", "model.coherence_transfer"))
        for pair in (tuple(t.source), tuple(t.target)):
            if pair not in registered:
                issues.append(
                    UnknownCoherenceElement(f"coherence {pair} is not registered", "model.coherence_transfer")
                )
        if tuple(t.source) == tuple(t.target):
            issues.append(UnknownCoherenceElement("transfer source equals target", "model.coherence_transfer"))


def validate_system(system: ExcitonSystem, field: FieldConfig, model: EvolutionModel) -> Bundle:
    """Return the validated bundle, or raise ValidationError listing every issue."""
    issues: List[ValidationIssue] = []
    _check_system(system, issues)
    _check_field(field, issues)
    _check_model(model, system, issues)
    if issues:
        raise ValidationError(issues)
    return Bundle(system=system, field=field, model=model)


def revalidate(bundle: Bundle) -> Bundle:
    return validate_system(bundle.system, bundle.field, bundle.model)
