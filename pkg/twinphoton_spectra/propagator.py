"""Time-evolution matrix elements of the molecular excitations.

Populations follow the rate generator of the evolution model, coherences
evolve as damped exponentials unless coherence-transfer rates couple them.
All matrix exponentials go through scipy.linalg.expm (scaling and squaring
with Pade approximants), so degenerate generators never produce NaNs.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.linalg import expm

from .errors import DivergentKernel, NegativeTime, UnknownCoherence, ZeroDephasing
from .model import Bundle, EvolutionModel

GROUND, SINGLE, DOUBLE = "g", "e", "f"


@dataclass(frozen=True)
class CoherenceIndex:
    """Identifies |ket><bra| with manifold tags 'g', 'e' or 'f'."""
    ket_manifold: str
    ket: int
    bra_manifold: str
    bra: int

    @classmethod
    def eg(cls, alpha: int) -> "CoherenceIndex":
        return cls(SINGLE, alpha, GROUND, 0)

    @classmethod
    def fe(cls, gamma: int, beta: int) -> "CoherenceIndex":
        return cls(DOUBLE, gamma, SINGLE, beta)

    @classmethod
    def ee(cls, a: int, b: int) -> "CoherenceIndex":
        return cls(SINGLE, a, SINGLE, b)

    def conjugate(self) -> "CoherenceIndex":
        return CoherenceIndex(self.bra_manifold, self.bra, self.ket_manifold, self.ket)


def _check_time(t: float) -> None:
    if t < 0:
        raise NegativeTime(f"propagators are defined for t >= 0, got {t}")


def population_propagator(model: EvolutionModel, t: float) -> np.ndarray:
    """Matrix of G_{bb<-aa}(t) over the single manifold (row b, column a)."""
    _check_time(t)
    return expm(model.population_generator() * t)


def ground_propagator(model: EvolutionModel, t: float) -> float:
    """G_{00<-00}(t); nothing leaves the ground state, so this stays 1."""
    _check_time(t)
    return float(expm(model.full_generator() * t)[0, 0])


def waiting_kernel(model: EvolutionModel) -> np.ndarray:
    """K_{ba} = int_0^inf G_{bb<-aa}(s) ds = -(generator)^-1."""
    n = model.n_single
    rates = np.array(model.rates, dtype=float).reshape(n, n)
    np.fill_diagonal(rates, 0.0)
    decays = np.asarray(model.ground_recovery) > 0
    # a population decays if it can reach, through transfer, a state with recovery
    for _ in range(n):
        reach = decays | ((rates > 0) & decays[:, None]).any(axis=0)
        if np.array_equal(reach, decays):
            break
        decays = reach
    if not decays.all():
        stuck = [int(i) for i in np.flatnonzero(~decays)]
        raise DivergentKernel(f"population of state(s) {stuck} never returns to the ground state")
    return -np.linalg.inv(model.population_generator())


def frequency_and_decay(bundle: Bundle, idx: CoherenceIndex) -> Tuple[float, float]:
    """Return (omega_ab, gamma_ab) so that G_ab(t) = exp(-(i omega_ab + gamma_ab) t)."""
    system, model = bundle.system, bundle.model
    pair = (idx.ket_manifold, idx.bra_manifold)
    try:
        if pair == (SINGLE, GROUND):
            return float(system.w_e[idx.ket]), float(model.gamma_ge[idx.ket])
        if pair == (DOUBLE, SINGLE):
            w = system.w_f[idx.ket] - system.w_e[idx.bra]
            return float(w), float(model.gamma_ef[idx.ket, idx.bra])
        if pair in ((GROUND, SINGLE), (SINGLE, DOUBLE)):
            w, g = frequency_and_decay(bundle, idx.conjugate())
            return -w, g
        if pair == (SINGLE, SINGLE) and idx.ket != idx.bra:
            for c in bundle.coherence_elements():
                if (c.a, c.b) == (idx.ket, idx.bra):
                    return c.frequency, c.decay
    except IndexError:
        pass
    raise UnknownCoherence(f"no coherence registered for {idx}")


def coherence_propagator(bundle: Bundle, idx: CoherenceIndex, t):
    """exp(-(i omega_ab + gamma_ab) t); vectorized over t."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise NegativeTime("coherence propagator needs t >= 0")
    w, g = frequency_and_decay(bundle, idx)
    out = np.exp(-(1j * w + g) * t_arr)
    return out if out.ndim else complex(out)


def laplace_transform(bundle: Bundle, idx: CoherenceIndex, omega):
    """G_ab[omega] = int_0^inf e^{i omega t} G_ab(t) dt = 1 / (gamma + i(omega_ab - omega))."""
    w, g = frequency_and_decay(bundle, idx)
    if g <= 0:
        raise ZeroDephasing(f"{idx} has no dephasing; its transform diverges")
    out = 1.0 / (g + 1j * (w - np.asarray(omega, dtype=float)))
    return out if np.ndim(out) else complex(out)


def lineshape(bundle: Bundle, idx: CoherenceIndex, omega):
    """Real part G'_ab[omega]: Lorentzian of height 1/gamma and HWHM gamma."""
    return np.real(laplace_transform(bundle, idx, omega))


def ge_transforms(bundle: Bundle, omega) -> np.ndarray:
    """G_{a0}[omega] for every single state; shape (n_single, len(omega))."""
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    w, g = bundle.system.w_e, bundle.model.gamma_ge
    if np.any(g <= 0):
        raise ZeroDephasing("ground-single dephasing must be > 0")
    return 1.0 / (g[:, None] + 1j * (w[:, None] - om[None, :]))


def ef_transforms(bundle: Bundle, omega) -> np.ndarray:
    """G_{fb}[omega]; shape (n_double, n_single, len(omega))."""
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    system = bundle.system
    m, n = system.n_double, system.n_single
    if m == 0:
        return np.zeros((0, n, om.size), dtype=complex)
    w = system.w_f[:, None] - system.w_e[None, :]
    g = bundle.model.gamma_ef
    if np.any(g <= 0):
        raise ZeroDephasing("single-double dephasing must be > 0")
    return 1.0 / (g[:, :, None] + 1j * (w[:, :, None] - om[None, None, :]))


def liouville_generator(bundle: Bundle) -> np.ndarray:
    """Waiting-interval generator over bundle.liouville_elements().

    Populations are coupled by the rate matrix; coherences decay as
    -(i omega_ab + lambda_ab) and exchange amplitude through the transfer
    rates, which deplete their source at the same rate.
    """
    elements = bundle.liouville_elements()
    index = {e: i for i, e in enumerate(elements)}
    n = bundle.system.n_single
    gen = np.zeros((len(elements), len(elements)), dtype=complex)
    gen[:n, :n] = bundle.model.population_generator()
    for c in bundle.coherence_elements():
        i = index[(c.a, c.b)]
        gen[i, i] = -(1j * c.frequency + c.decay)
    for tr in bundle.model.coherence_transfer:
        src, dst = tuple(tr.source), tuple(tr.target)
        conj_src, conj_dst = src[::-1], dst[::-1]
        for s, d in ((src, dst), (conj_src, conj_dst)):
            gen[index[d], index[s]] += tr.rate
            gen[index[s], index[s]] -= tr.rate
    return gen


def liouville_propagator(bundle: Bundle, t: float) -> np.ndarray:
    """Matrix of G_{cd<-ab}(t) over bundle.liouville_elements()."""
    _check_time(t)
    return expm(liouville_generator(bundle) * t)


def window_integral(generator: np.ndarray, start: float, stop: float) -> np.ndarray:
    """int_start^stop expm(generator s) ds, from one augmented exponential.

    Eigen-free, so singular or defective generators are fine.
    """
    if stop <= start:
        return np.zeros_like(generator, dtype=complex)
    n = generator.shape[0]
    aug = np.zeros((2 * n, 2 * n), dtype=complex)
    aug[:n, :n] = generator
    aug[:n, n:] = np.eye(n)
    block = expm(aug * (stop - start))[:n, n:]
    return expm(generator * start) @ block if start else block
