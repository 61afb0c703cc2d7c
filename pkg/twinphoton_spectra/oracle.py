"""Brute-force transmission signal by direct quadrature over the three delays.

Slow but independent of the closed forms in signal.py: the four-body field
correlators are sampled pointwise and contracted with the waiting-interval
propagator, so it serves as the reference the closed forms are tested against.
"""
import dataclasses
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy.integrate import quad_vec

from .correlators import CorrelatorKind, delta_weight, four_body
from .errors import NegativeTime, TruncationTooShort
from .model import Bundle
from .notifier import log_event
from .propagator import ground_propagator, liouville_propagator
from .signal import ORACLE, Spectrum1D, _grid, _meta, _scale
from .workers import ordered_map

EPSREL = 1e-6
# decay lengths covered by the default horizon
HORIZON_DECAYS = 30.0
TAIL_TOL = 1e-9

ALL_KINDS = tuple(CorrelatorKind)


def _as_kinds(kinds) -> Tuple[CorrelatorKind, ...]:
    if kinds is None:
        return ALL_KINDS
    return tuple(k if isinstance(k, CorrelatorKind) else CorrelatorKind.parse(k) for k in kinds)


def _phase_weights(kinds: Iterable[CorrelatorKind]) -> dict:
    kinds = set(kinds)
    out = {}
    for k in kinds:
        partner = [o for o in kinds if o.pathway == k.pathway and o is not k]
        out[k] = 0.5 if partner else 1.0
    return out


def _integrate(fn, lo: float, hi: float, size: int, points=None) -> np.ndarray:
    if hi <= lo:
        return np.zeros(size)
    pts = [p for p in (points or ()) if lo < p < hi] or None
    res, _ = quad_vec(fn, lo, hi, epsrel=EPSREL, points=pts)
    return np.asarray(res)


class _Pathways:
    """Dipole weights and free propagators of one pathway family (GSB, SE or ESA)."""

    def __init__(self, bundle: Bundle, pathway: str, horizon: float):
        self.bundle = bundle
        self.pathway = pathway
        self.horizon = horizon
        system, model = bundle.system, bundle.model
        mu = system.mu_ge
        self.n = system.n_single
        w_e, g_e = system.w_e, model.gamma_ge
        if pathway == "GSB":
            self.elements = [(a, a) for a in range(self.n)]
            self.src_weight = mu ** 2
            self.ket = (w_e, g_e)
            self.bra = (w_e, g_e)
        else:
            self.elements = bundle.liouville_elements()
            a = np.array([e[0] for e in self.elements])
            b = np.array([e[1] for e in self.elements])
            self.src_weight = mu[a] * mu[b]
            self.ket = (w_e[a], g_e[a])
            self.bra = (w_e[b], g_e[b])

    def first(self, s1: float, rephasing: bool) -> np.ndarray:
        """Source vector: dipole weight times the first-interval coherence."""
        if rephasing:
            w, g = self.bra
            return self.src_weight * np.exp((1j * w - g) * s1)
        w, g = self.ket
        return self.src_weight * np.exp(-(1j * w + g) * s1)

    def waiting(self, s2: float) -> np.ndarray:
        if self.pathway == "GSB":
            return np.full((1, self.n), ground_propagator(self.bundle.model, s2))
        return liouville_propagator(self.bundle, s2)

    def third(self, omega: float) -> np.ndarray:
        """int_0^horizon e^{i omega s3} times the third-interval propagators, per waiting element."""
        system, model = self.bundle.system, self.bundle.model
        mu, mu_ef = system.mu_ge, system.mu_ef
        if self.pathway == "ESA":
            w = system.w_f[:, None] - system.w_e[None, :]
            g = model.gamma_ef
        else:
            w, g = system.w_e, model.gamma_ge
        shape = np.shape(w)
        rates = (1j * (np.ravel(w) - omega) + np.ravel(g))
        size = rates.size

        def fn(s3):
            v = np.exp(-rates * s3)
            return np.concatenate([v.real, v.imag])

        res = _integrate(fn, 0.0, self.horizon, 2 * size)
        t3 = (res[:size] + 1j * res[size:]).reshape(shape)
        if self.pathway == "GSB":
            return np.array([np.sum(mu ** 2 * t3)])
        out = np.zeros(len(self.elements), dtype=complex)
        for i, (c, d) in enumerate(self.elements):
            if self.pathway == "SE":
                out[i] = mu[c] * mu[d] * t3[c]
            else:
                out[i] = np.sum(mu_ef[:, c] * mu_ef[:, d] * t3[:, d])
        return out

    def split(self, t3: np.ndarray, wait: np.ndarray, src: np.ndarray) -> Tuple[complex, complex]:
        """Contract to (population, coherence) contributions."""
        if self.pathway == "GSB":
            return complex(t3[0] * (wait[0] @ src)), 0j
        total = complex(t3 @ (wait @ src))
        n = self.n
        pop = complex(t3[:n] @ (wait[:n, :n] @ src[:n]))
        return pop, total - pop


def _default_horizon(bundle: Bundle) -> float:
    decays = list(bundle.model.gamma_ge)
    if bundle.system.n_double:
        decays += list(np.ravel(bundle.model.gamma_ef))
    return HORIZON_DECAYS / min(decays)


def _check_horizon(bundle: Bundle, horizon: float) -> None:
    slowest = min(bundle.model.gamma_ge)
    if bundle.system.n_double:
        slowest = min(slowest, float(np.min(bundle.model.gamma_ef)))
    tail = np.exp(-slowest * horizon)
    if tail > TAIL_TOL:
        raise TruncationTooShort(
            f"horizon {horizon:g} leaves a tail of {tail:.2e}; the slowest dephasing needs a longer one"
        )


def _population_horizon(bundle: Bundle) -> float:
    eig = np.linalg.eigvals(bundle.model.population_generator())
    slowest = float(np.min(-eig.real))
    if slowest <= 1e-12:
        raise TruncationTooShort("populations do not decay; the autocorrelation term needs a finite waiting horizon")
    return HORIZON_DECAYS / slowest


def _cross(kind: CorrelatorKind, omega: float, path: _Pathways, bundle: Bundle) -> Tuple[complex, complex]:
    field = bundle.field
    te, delay = field.entanglement_time, field.delay
    half = 0.5 * te
    t3 = path.third(omega)

    def inner(s2, s1):
        c = four_body(kind, omega, 0.0, 0.0, s2, s1, field, terms="cross")
        pop, coh = path.split(t3, path.waiting(s2), path.first(s1, kind.rephasing))
        return np.array([(c * pop).real, (c * pop).imag, (c * coh).real, (c * coh).imag])

    if kind.rephasing:
        windows = [(max(0.0, delay - half), delay + half), (0.0, max(0.0, half - delay))]

        def outer(s1):
            return sum(_integrate(lambda s2: inner(s2, s1), lo, hi, 4) for lo, hi in windows)

        res = _integrate(outer, 0.0, path.horizon, 4)
    else:
        def outer(s1):
            windows = [
                (max(0.0, delay - s1 - half), delay - s1 + half),
                (0.0, half - delay - s1),
            ]
            return sum(_integrate(lambda s2: inner(s2, s1), lo, hi, 4) for lo, hi in windows)

        res = _integrate(outer, 0.0, delay + half, 4, points=[delay - half, half - delay])
    return complex(res[0], res[1]), complex(res[2], res[3])


def _auto(kind: CorrelatorKind, omega: float, path: _Pathways, bundle: Bundle) -> complex:
    field = bundle.field
    te = field.entanglement_time
    if kind.pathway == "ESA":
        return 0j
    t3 = path.third(omega)

    if kind is CorrelatorKind.GSB_NR:
        def on_diagonal(s1):
            c = delta_weight(kind, omega, 0.0, 0.0, s1, field)
            pop, coh = path.split(t3, path.waiting(0.0), path.first(s1, False))
            v = c * (pop + coh)
            return np.array([v.real, v.imag])

        res = _integrate(on_diagonal, 0.0, path.horizon, 2)
        return complex(res[0], res[1])

    def inner(s2, s1):
        c = four_body(kind, omega, 0.0, 0.0, s2, s1, field, terms="auto")
        pop, coh = path.split(t3, path.waiting(s2), path.first(s1, kind.rephasing))
        v = c * (pop + coh)
        return np.array([v.real, v.imag])

    if kind is CorrelatorKind.GSB_R:
        res = _integrate(lambda s1: _integrate(lambda s2: inner(s2, s1), 0.0, te - s1, 2), 0.0, te, 2)
    else:
        s2_max = _population_horizon(bundle)
        res = _integrate(lambda s1: _integrate(lambda s2: inner(s2, s1), 0.0, s2_max, 2), 0.0, te, 2)
    return complex(res[0], res[1])


def brute_force_signal(
    omega_grid,
    delay: float,
    bundle: Bundle,
    kinds=None,
    horizon: Optional[float] = None,
    include_autocorrelation: bool = False,
    workers: Optional[int] = None,
) -> Spectrum1D:
    """Transmission signal from nested adaptive quadrature of correlator times response.

    kinds selects Liouville pathways (all six by default); when both phases of
    a pathway are requested each is weighted one half. The autocorrelation
    terms land in the Sc component at full weight and are skipped unless
    requested; the delta(s2) bleach term gives Re(G G) where the closed form
    keeps only G' G'.
    """
    if delay < 0:
        raise NegativeTime(f"delay must be >= 0, got {delay}")
    om = _grid(omega_grid)
    kinds = _as_kinds(kinds)
    weights = _phase_weights(kinds)
    bundle = bundle.with_field(dataclasses.replace(bundle.field, delay=float(delay)))
    if horizon is None:
        horizon = _default_horizon(bundle)
    _check_horizon(bundle, horizon)
    if include_autocorrelation and any(k.pathway == "SE" for k in kinds):
        _population_horizon(bundle)
    paths = {p: _Pathways(bundle, p, horizon) for p in {k.pathway for k in kinds}}
    if "ESA" in paths and not bundle.system.n_double:
        del paths["ESA"]
        kinds = tuple(k for k in kinds if k.pathway != "ESA")

    def evaluate(job):
        k_idx, kind = job
        w = om[k_idx]
        pop, coh = _cross(kind, w, paths[kind.pathway], bundle)
        auto = _auto(kind, w, paths[kind.pathway], bundle) if include_autocorrelation else 0j
        return pop, coh, auto

    jobs: List = [(i, k) for i in range(om.size) for k in kinds]
    log_event(f"oracle: {len(jobs)} quadrature jobs at delay {delay:g}")
    results = ordered_map(evaluate, jobs, workers)

    comps = {name: np.zeros(om.size) for name in ("GSB", "SE", "ESA", "SEcoh", "ESAcoh", "Sc")}
    for (i, kind), (pop, coh, auto) in zip(jobs, results):
        sign = 1.0 if kind.pathway == "ESA" else -1.0
        w = weights[kind]
        comps[kind.pathway][i] += sign * w * pop.real
        if kind.pathway != "GSB":
            comps[kind.pathway + "coh"][i] += sign * w * coh.real
        # no phase average: R and NR each see half of the D2 window
        comps["Sc"][i] += sign * auto.real
    scale = _scale(bundle.field)
    meta = _meta(bundle, delay, ORACLE)
    meta["kinds"] = [k.name for k in kinds]
    meta["horizon"] = horizon
    meta["sc_available"] = include_autocorrelation
    return Spectrum1D(om, {k: scale * v for k, v in comps.items()}, meta)
