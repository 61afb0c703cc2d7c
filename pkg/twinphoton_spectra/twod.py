"""Absorptive 2D spectra in the delta limit and their pump-probe anti-diagonal."""
import math
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import LineOutsideGrid
from .model import Bundle
from .notifier import log_event
from .propagator import ge_transforms, ground_propagator, population_propagator
from .signal import Spectrum1D, _population_factors, coherence_additions, difference_spectrum

TWOD_COMPONENTS = ("GSB", "SE", "ESA")
CHECK_TOL = 1e-8
GRID_MARGIN = 10.0
POINTS_PER_GAMMA = 8


@dataclass
class Spectrum2D:
    omega3: np.ndarray
    omega1: np.ndarray
    t2: float
    # values[i3, i1]
    components: Dict[str, np.ndarray]
    values: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        self.omega3 = np.asarray(self.omega3, dtype=float)
        self.omega1 = np.asarray(self.omega1, dtype=float)
        for name in ("omega3", "omega1"):
            axis = getattr(self, name)
            if axis.ndim != 1 or np.any(np.diff(axis) <= 0):
                raise ValueError(f"{name} must be one-dimensional and strictly increasing")
        total = np.zeros((self.omega3.size, self.omega1.size))
        for name in TWOD_COMPONENTS:
            total = total + self.components[name]
        self.values = total

    def __sub__(self, other: "Spectrum2D") -> "Spectrum2D":
        comps = {k: self.components[k] - other.components[k] for k in TWOD_COMPONENTS}
        return Spectrum2D(self.omega3, self.omega1, self.t2, comps)

    def __neg__(self) -> "Spectrum2D":
        comps = {k: -v for k, v in self.components.items()}
        return Spectrum2D(self.omega3, self.omega1, self.t2, comps)


def absorptive_2d(omega3, t2: float, omega1, bundle: Bundle) -> Spectrum2D:
    """GSB, SE and ESA parts of the absorptive spectrum S_2D(omega3, t2, omega1)."""
    om3 = np.atleast_1d(np.asarray(omega3, dtype=float))
    om1 = np.atleast_1d(np.asarray(omega1, dtype=float))
    # probe-side and pump-side factors only depend on their own axis
    emit, _, absorb = _population_factors(bundle, om3)
    pump = (bundle.system.mu_ge ** 2)[:, None] * ge_transforms(bundle, om1).real
    pops = population_propagator(bundle.model, t2)
    g00 = ground_propagator(bundle.model, t2)
    gsb = g00 * np.outer(emit.sum(axis=0), pump.sum(axis=0))
    se = np.einsum("bk,ba,al->kl", emit, pops, pump)
    esa = -np.einsum("bk,ba,al->kl", absorb, pops, pump)
    if bundle.has_coherences():
        w3, w1 = np.meshgrid(om3, om1, indexing="ij")
        se_coh, esa_coh = coherence_additions(bundle, w3.ravel(), w1.ravel(), t2)
        se = se + se_coh.reshape(w3.shape)
        esa = esa - esa_coh.reshape(w3.shape)
    return Spectrum2D(om3, om1, t2, {"GSB": gsb, "SE": se, "ESA": esa})


def antidiagonal_cut(spectrum: Spectrum2D, pump_frequency: float) -> Spectrum1D:
    """Profile along omega1 = pump_frequency - omega3, linear in omega1 between grid points.

    Only the omega3 rows whose omega1 lies inside the grid are kept.
    """
    om1 = spectrum.omega1
    slack = 1e-12 * max(1.0, float(np.max(np.abs(om1))))
    target = pump_frequency - spectrum.omega3
    inside = (target >= om1[0] - slack) & (target <= om1[-1] + slack)
    if not inside.any():
        raise LineOutsideGrid(
            f"the line omega1 = {pump_frequency:g} - omega3 misses the omega1 grid "
            f"[{om1[0]:g}, {om1[-1]:g}]"
        )
    rows = np.flatnonzero(inside)
    comps = {
        name: np.array([np.interp(target[i], om1, spectrum.components[name][i]) for i in rows])
        for name in TWOD_COMPONENTS
    }
    meta = {"pump_frequency": float(pump_frequency), "t2": spectrum.t2, "mode": "antidiagonal"}
    return Spectrum1D(spectrum.omega3[rows], comps, meta)


@dataclass
class DelayCheck:
    delay: float
    max_deviation: float
    argmax_omega: float
    passed: bool


@dataclass
class CorrespondenceReport:
    pump_frequency: float
    tolerance: float
    checks: List[DelayCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst(self) -> float:
        return max((c.max_deviation for c in self.checks), default=0.0)


def correspondence_check(
    omega_grid,
    delays: Sequence[float],
    bundle: Bundle,
    tolerance: float = CHECK_TOL,
    twod_pump_frequency: Optional[float] = None,
    negate_2d: bool = False,
) -> CorrespondenceReport:
    """Compare Delta S / zeta^2 with minus the t2-difference of the 2D anti-diagonal.

    twod_pump_frequency and negate_2d spoil the comparison on purpose, for
    negative controls.
    """
    om = np.asarray(omega_grid, dtype=float)
    wp = bundle.field.pump_frequency if twod_pump_frequency is None else float(twod_pump_frequency)
    omega1 = (wp - om)[::-1]
    scale = bundle.field.conversion_scale ** 2
    base = absorptive_2d(om, 0.0, omega1, bundle)
    checks = []
    for delay in delays:
        one_d = difference_spectrum(om, delay, bundle).values / scale
        change = absorptive_2d(om, delay, omega1, bundle) - base
        if negate_2d:
            change = -change
        cut = antidiagonal_cut(change, wp)
        rows = cut.omega_grid
        keep = np.isin(om, rows)
        deviation = np.abs(one_d[keep] + cut.values)
        worst = int(np.argmax(deviation))
        max_dev = float(deviation[worst])
        ok = max_dev <= tolerance
        log_event(f"correspondence at delay {delay:g}: max deviation {max_dev:.3e} ({'ok' if ok else 'FAIL'})")
        checks.append(DelayCheck(float(delay), max_dev, float(rows[worst]), ok))
    return CorrespondenceReport(bundle.field.pump_frequency, tolerance, checks)


def default_omega_grid(bundle: Bundle, points_per_gamma: int = POINTS_PER_GAMMA) -> np.ndarray:
    """Covers every single and single-to-double transition with a margin of ten linewidths."""
    system, model = bundle.system, bundle.model
    widths = list(model.gamma_ge)
    highs = list(system.w_e)
    if system.n_double:
        highs += list(np.ravel(system.w_f[:, None] - system.w_e[None, :]))
        widths += list(np.ravel(model.gamma_ef))
    gamma_max = max(widths)
    gamma_min = min(widths)
    lo = float(np.min(system.w_e)) - GRID_MARGIN * gamma_max
    hi = float(np.max(highs)) + GRID_MARGIN * gamma_max
    n = int(math.ceil((hi - lo) / gamma_min * points_per_gamma)) + 1
    return np.linspace(lo, hi, n)
