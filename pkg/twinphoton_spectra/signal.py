"""Frequency-dispersed transmission signal of entangled twin photons.

Closed forms are phase-averaged: every population pathway equals half the
sum of its rephasing and non-rephasing Liouville pathways in the delta
limit, and the coherence pathways carry the same factor one half.
"""
from dataclasses import dataclass, field as dc_field, replace
from typing import Dict, List, Optional

import numpy as np

from .correlators import arrival_window, complex_sinc, sinc_filter
from .errors import DivergentKernel, UnsupportedModel
from .model import Bundle, FieldConfig
from .notifier import log_event
from .propagator import (
    ef_transforms,
    ge_transforms,
    ground_propagator,
    liouville_propagator,
    population_propagator,
    waiting_kernel,
    window_integral,
)

COMPONENTS = ("GSB", "SE", "ESA", "SEcoh", "ESAcoh", "Sc")

SHORT_TE = "short-te"
FINITE_TE = "finite-te"
ORACLE = "oracle"


@dataclass
class Spectrum1D:
    omega_grid: np.ndarray
    components: Dict[str, np.ndarray]
    meta: Dict[str, object] = dc_field(default_factory=dict)
    values: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        self.omega_grid = np.asarray(self.omega_grid, dtype=float)
        if self.omega_grid.ndim != 1 or np.any(np.diff(self.omega_grid) <= 0):
            raise ValueError("omega_grid must be one-dimensional and strictly increasing")
        size = self.omega_grid.size
        comps = {}
        for name in COMPONENTS:
            arr = self.components.get(name)
            comps[name] = np.zeros(size) if arr is None else np.asarray(arr, dtype=float).reshape(size)
        self.components = comps
        total = np.zeros(size)
        for name in COMPONENTS:
            total = total + comps[name]
        self.values = total
        self.meta.setdefault("warnings", [])

    def __sub__(self, other: "Spectrum1D") -> "Spectrum1D":
        if not np.array_equal(self.omega_grid, other.omega_grid):
            raise ValueError("spectra live on different grids")
        comps = {k: self.components[k] - other.components[k] for k in COMPONENTS}
        return Spectrum1D(self.omega_grid, comps, dict(self.meta))

    def warn(self, message: str) -> None:
        self.meta["warnings"].append(message)


def _grid(omega_grid) -> np.ndarray:
    return np.atleast_1d(np.asarray(omega_grid, dtype=float))


def _meta(bundle: Bundle, delay: float, mode: str) -> Dict[str, object]:
    f = bundle.field
    return {
        "delay": float(delay),
        "pump_frequency": f.pump_frequency,
        "entanglement_time": f.entanglement_time,
        "mode": mode,
    }


def _scale(field: FieldConfig) -> float:
    return field.conversion_scale ** 2


def _population_factors(bundle: Bundle, om: np.ndarray):
    """Dipole-weighted lineshapes shared by every population pathway."""
    system = bundle.system
    mu2 = system.mu_ge ** 2
    ge_w = ge_transforms(bundle, om)
    ge_1 = ge_transforms(bundle, bundle.field.pump_frequency - om)
    emit = mu2[:, None] * ge_w.real
    pump = mu2[:, None] * ge_1.real
    ef_w = ef_transforms(bundle, om)
    absorb = np.einsum("fb,fbk->bk", system.mu_ef ** 2, ef_w.real)
    return emit, pump, absorb


def coherence_additions(bundle: Bundle, om: np.ndarray, om1: np.ndarray, t2: float):
    """Phase-averaged SE and ESA coherence pathways (2D sign convention).

    Returns (se, esa) with se entering the 2D spectrum with a plus sign and
    esa with a minus sign; om probes the third interval, om1 the first.
    """
    size = om.size
    se = np.zeros(size)
    esa = np.zeros(size)
    if not bundle.has_coherences():
        return se, esa
    system = bundle.system
    mu, mu_ef = system.mu_ge, system.mu_ef
    elements = bundle.liouville_elements()
    prop = liouville_propagator(bundle, t2)
    ge_3 = ge_transforms(bundle, om)
    ef_3 = ef_transforms(bundle, om)
    ge_1 = ge_transforms(bundle, om1)
    for j, (a, b) in enumerate(elements):
        first = ge_1[a] + np.conj(ge_1[b])
        for i, (c, d) in enumerate(elements):
            if a == b and c == d:
                continue
            g = prop[i, j]
            if g == 0:
                continue
            w = mu[d] * mu[c] * mu[b] * mu[a]
            se += 0.5 * np.real(w * ge_3[c] * first * g)
            if system.n_double:
                third = np.einsum("f,f,fk->k", mu_ef[:, d], mu_ef[:, c], ef_3[:, d, :])
                esa += 0.5 * np.real(mu[b] * mu[a] * third * first * g)
    return se, esa


def sc_term(bundle: Bundle, om: np.ndarray) -> np.ndarray:
    """Delay-independent autocorrelation contribution S_c(omega).

    Raises DivergentKernel when some population never decays.
    """
    kernel = waiting_kernel(bundle.model)
    mu2 = bundle.system.mu_ge ** 2
    lorentz = ge_transforms(bundle, om).real
    emit = mu2[:, None] * lorentz
    direct = emit.sum(axis=0) * (mu2[:, None] * lorentz).sum(axis=0)
    via_kernel = np.einsum("bk,ba,a->k", emit, kernel, mu2)
    return -(direct + via_kernel)


def signal_short_te(omega_grid, delay: float, bundle: Bundle) -> Spectrum1D:
    """Delta-limit transmission signal S(omega; delay) with its pathway breakdown."""
    om = _grid(omega_grid)
    model = bundle.model
    emit, pump, absorb = _population_factors(bundle, om)
    pops = population_propagator(model, delay)
    g00 = ground_propagator(model, delay)
    gsb = -g00 * emit.sum(axis=0) * pump.sum(axis=0)
    se = -np.einsum("bk,ba,ak->k", emit, pops, pump)
    esa = np.einsum("bk,ba,ak->k", absorb, pops, pump)
    se_coh, esa_coh = coherence_additions(bundle, om, bundle.field.pump_frequency - om, delay)
    spec_meta = _meta(bundle, delay, SHORT_TE)
    comps = {"GSB": gsb, "SE": se, "ESA": esa, "SEcoh": -se_coh, "ESAcoh": esa_coh}
    sc_warning = None
    try:
        comps["Sc"] = sc_term(bundle, om)
        spec_meta["sc_available"] = True
    except DivergentKernel as e:
        spec_meta["sc_available"] = False
        sc_warning = f"Sc omitted: {e}"
    scale = _scale(bundle.field)
    spec = Spectrum1D(om, {k: scale * v for k, v in comps.items()}, spec_meta)
    if sc_warning:
        spec.warn(sc_warning)
    return spec


def difference_spectrum(omega_grid, delay: float, bundle: Bundle, mode: str = SHORT_TE, **kwargs) -> Spectrum1D:
    """Delta S(omega; delay) = S(omega; delay) - S(omega; 0) for the chosen engine."""
    engines = {SHORT_TE: signal_short_te, FINITE_TE: signal_finite_te_rephasing}
    if mode == ORACLE:
        from .oracle import brute_force_signal
        engine = brute_force_signal
    else:
        engine = engines[mode]
    at_delay = engine(omega_grid, delay, bundle, **kwargs)
    at_zero = engine(omega_grid, 0.0, bundle, **kwargs)
    out = at_delay - at_zero
    out.meta["difference"] = True
    out.meta["sc_available"] = at_delay.meta.get("sc_available", False)
    # an unavailable Sc is absent from both sides, so the warning carries over
    out.meta["warnings"] = list(at_delay.meta.get("warnings", []))
    return out


# --- finite entanglement time -------------------------------------------------

@dataclass(frozen=True)
class FKernelArgs:
    omega: object
    delay: float
    # lambda for populations, i omega_ab + lambda for coherences
    rate: complex
    field: FieldConfig


def _window(z, start: float, stop: float):
    """int_start^stop e^{i z s} ds, written through sinc so z = 0 is harmless."""
    width = stop - start
    return width * complex_sinc(0.5 * z * width, damping=-0.5j * z * (start + stop))


def _f_long(omega, delay, rate, field: FieldConfig):
    """Branch for delay >= Te/2: sinc((omega - w_i + i rate) Te/2) e^{-rate delay}."""
    z = np.asarray(omega, dtype=float) - field.idler_center + 1j * rate
    return complex_sinc(0.5 * z * field.entanglement_time, damping=rate * delay)


def _f_short(omega, delay, rate, field: FieldConfig):
    """Branch for delay < Te/2: the signal and idler windows both reach s = 0."""
    te = field.entanglement_time
    om = np.asarray(omega, dtype=float)
    om_i = om - field.idler_center
    om_s = om - field.signal_center
    lead = np.exp(-1j * om_i * delay) / te
    idler = _window(om_i + 1j * rate, 0.0, delay + 0.5 * te)
    signal = _window(om_s + 1j * rate, 0.0, max(0.5 * te - delay, 0.0))
    return lead * (idler + signal)


def f_kernel(args: FKernelArgs):
    """Finite-Te replacement of the waiting propagator e^{-rate t}."""
    te = args.field.entanglement_time
    if te == 0.0:
        out = np.exp(-args.rate * args.delay) * np.ones_like(np.asarray(args.omega, dtype=float))
    elif args.delay >= 0.5 * te:
        out = _f_long(args.omega, args.delay, args.rate, args.field)
    else:
        out = _f_short(args.omega, args.delay, args.rate, args.field)
    out = np.asarray(out, dtype=complex)
    return out if out.ndim else complex(out)


def f_matrix(generator: np.ndarray, omega_grid, delay: float, field: FieldConfig) -> np.ndarray:
    """F kernel for a sum-of-exponentials propagator expm(generator t).

    Shape (len(omega), n, n); equals f_kernel elementwise for diagonal
    generators and reduces to expm(generator delay) as Te -> 0.
    """
    om = _grid(omega_grid)
    te = field.entanglement_time
    n = generator.shape[0]
    out = np.empty((om.size, n, n), dtype=complex)
    eye = np.eye(n)
    for k, w in enumerate(om):
        om_i = w - field.idler_center
        om_s = w - field.signal_center
        idler = window_integral(generator + 1j * om_i * eye, max(delay - 0.5 * te, 0.0), delay + 0.5 * te)
        signal = window_integral(generator + 1j * om_s * eye, 0.0, max(0.5 * te - delay, 0.0))
        out[k] = np.exp(-1j * om_i * delay) * (idler + signal) / te
    return out


def _is_diagonal(generator: np.ndarray) -> bool:
    return not np.any(generator - np.diag(np.diag(generator)))


def population_f(bundle: Bundle, om: np.ndarray, delay: float) -> np.ndarray:
    """F_{bb<-aa}(omega, delay) for every omega; shape (len(om), n, n)."""
    gen = bundle.model.population_generator()
    if bundle.field.entanglement_time == 0.0:
        return np.broadcast_to(population_propagator(bundle.model, delay), (om.size,) + gen.shape)
    if _is_diagonal(gen):
        n = gen.shape[0]
        out = np.zeros((om.size, n, n), dtype=complex)
        for a in range(n):
            out[:, a, a] = f_kernel(FKernelArgs(om, delay, -gen[a, a], bundle.field))
        return out
    return f_matrix(gen, om, delay, bundle.field)


def _rephasing_population_terms(bundle: Bundle, om: np.ndarray, waiting: np.ndarray):
    """(SE, ESA) rephasing population pathways for a per-omega waiting matrix."""
    system = bundle.system
    mu2 = system.mu_ge ** 2
    ge_w = ge_transforms(bundle, om)
    ge_1 = np.conj(ge_transforms(bundle, bundle.field.pump_frequency - om))
    ef_w = ef_transforms(bundle, om)
    emit = mu2[:, None] * ge_w
    absorb = np.einsum("fb,fbk->bk", system.mu_ef ** 2, ef_w)
    pump = mu2[:, None] * ge_1
    se = -np.real(np.einsum("bk,kba,ak->k", emit, waiting, pump))
    esa = np.real(np.einsum("bk,kba,ak->k", absorb, waiting, pump))
    return se, esa


def rephasing_share_short_te(omega_grid, delay: float, bundle: Bundle) -> Spectrum1D:
    """Rephasing-only SE/ESA population pathways in the delta limit."""
    om = _grid(omega_grid)
    pops = population_propagator(bundle.model, delay)
    waiting = np.broadcast_to(pops, (om.size,) + pops.shape)
    se, esa = _rephasing_population_terms(bundle, om, waiting)
    scale = _scale(bundle.field)
    return Spectrum1D(om, {"SE": scale * se, "ESA": scale * esa}, _meta(bundle, delay, "short-te-rephasing"))


def signal_finite_te_rephasing(omega_grid, delay: float, bundle: Bundle, pathways=("SE", "ESA")) -> Spectrum1D:
    """Rephasing SE/ESA signal at finite entanglement time through the F kernel."""
    if bundle.has_transfer():
        raise UnsupportedModel("finite-Te closed forms assume no coherence transfer")
    unknown = set(pathways) - {"SE", "ESA"}
    if unknown:
        raise UnsupportedModel(f"finite-Te closed forms exist for SE and ESA only, not {sorted(unknown)}")
    om = _grid(omega_grid)
    field = bundle.field
    waiting = population_f(bundle, om, delay)
    se, esa = _rephasing_population_terms(bundle, om, waiting)
    prefactor = sinc_filter(om - field.idler_center, field.entanglement_time)
    scale = _scale(field)
    comps = {}
    if "SE" in pathways:
        comps["SE"] = scale * prefactor * se
    if "ESA" in pathways:
        comps["ESA"] = scale * prefactor * esa
    meta = _meta(bundle, delay, FINITE_TE)
    lo, hi, causal = arrival_window(replace(field, delay=float(delay)))
    meta["arrival_window"] = [lo, hi]
    meta["causal"] = causal
    spec = Spectrum1D(om, comps, meta)
    if bundle.has_coherences():
        spec.warn("coherence pathways are not part of the finite-Te closed form")
        log_event("finite-Te rephasing signal: coherence pathways omitted")
    return spec


def component_table(spec: Spectrum1D, names: Optional[List[str]] = None) -> np.ndarray:
    """Columns omega, total, then the named components, as a 2D array."""
    names = names or list(COMPONENTS)
    cols = [spec.omega_grid, spec.values] + [spec.components[n] for n in names]
    return np.column_stack(cols)
