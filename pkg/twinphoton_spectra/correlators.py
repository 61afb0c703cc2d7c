"""Field statistics of PDC twin photons pumped by a monochromatic laser.

The four-body correlators drop the common prefactor zeta^2 / (2 pi)^2; the
conversion scale is applied once, to finished signals.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DeltaNotSamplable, UnknownKind
from .model import FieldConfig

DELTA_LIMIT = "delta"
FINITE = "finite"

SIGNAL = "signal"
IDLER = "idler"

# below this |x| sin(x)/x is summed as a series
SINC_SERIES_CUTOFF = 1e-4
# beyond this |Im z| the complex sinc is built from exponentials
SINC_EXP_CUTOFF = 20.0


class CorrelatorKind(Enum):
    GSB_R = ("GSB", "rephasing")
    GSB_NR = ("GSB", "non-rephasing")
    SE_R = ("SE", "rephasing")
    SE_NR = ("SE", "non-rephasing")
    ESA_R = ("ESA", "rephasing")
    ESA_NR = ("ESA", "non-rephasing")

    @property
    def pathway(self) -> str:
        return self.value[0]

    @property
    def phase(self) -> str:
        return self.value[1]

    @property
    def rephasing(self) -> bool:
        return self.value[1] == "rephasing"

    @classmethod
    def parse(cls, text: str) -> "CorrelatorKind":
        """Accept 'ESA_R', 'esa/rephasing', 'se-nr' and similar spellings."""
        key = text.strip().upper().replace("/", "_").replace("-", "_")
        key = key.replace("NON_REPHASING", "NR").replace("REPHASING", "R")
        try:
            return cls[key]
        except KeyError:
            raise UnknownKind(f"unknown correlator kind {text!r}") from None


@dataclass(frozen=True)
class DnForm:
    mode: str
    order: int
    entanglement_time: float = 0.0

    @classmethod
    def for_field(cls, field: FieldConfig, order: int) -> "DnForm":
        if field.entanglement_time == 0.0:
            return cls(DELTA_LIMIT, order)
        return cls(FINITE, order, field.entanglement_time)


def _real_or_array(values):
    return values if np.ndim(values) else float(values)


def dn(form: DnForm, t):
    """Rectangular (n=1) or triangular (n=2) window of unit area."""
    if form.mode == DELTA_LIMIT:
        raise DeltaNotSamplable("the delta-limit D_n is symbolic and cannot be sampled")
    te = form.entanglement_time
    if te <= 0:
        raise DeltaNotSamplable("finite D_n needs entanglement_time > 0")
    t = np.abs(np.asarray(t, dtype=float))
    if form.order == 1:
        out = np.where(t <= 0.5 * te, 1.0 / te, 0.0)
    elif form.order == 2:
        out = np.where(t <= te, (1.0 - t / te) / te, 0.0)
    else:
        raise ValueError(f"D_n is defined for n in (1, 2), got {form.order}")
    return _real_or_array(out)


def complex_sinc(z, damping=0.0):
    """sin(z)/z * exp(-damping) for complex z, with the removable singularity handled.

    Large |Im z| is evaluated as (e^{iz - damping} - e^{-iz - damping}) / 2iz,
    so a growing sin(z) and a strong damping never overflow separately.
    """
    shape = np.broadcast(z, damping).shape
    z = np.broadcast_to(np.asarray(z, dtype=complex), shape).ravel()
    d = np.broadcast_to(np.asarray(damping, dtype=complex), shape).ravel()
    small = np.abs(z) < SINC_SERIES_CUTOFF
    wide = ~small & (np.abs(z.imag) > SINC_EXP_CUTOFF)
    mid = ~small & ~wide
    out = np.empty(z.shape, dtype=complex)
    z2 = z[small] * z[small]
    out[small] = (1.0 - z2 / 6.0 + z2 * z2 / 120.0) * np.exp(-d[small])
    out[mid] = np.sin(z[mid]) / z[mid] * np.exp(-d[mid])
    zw, dw = z[wide], d[wide]
    out[wide] = (np.exp(1j * zw - dw) - np.exp(-1j * zw - dw)) / (2j * zw)
    out = out.reshape(shape)
    return out if out.ndim else complex(out)


def sinc_filter(omega, entanglement_time: float):
    """D~(omega) = sinc(omega Te / 2), with sinc(x) = sin(x)/x."""
    x = 0.5 * np.asarray(omega, dtype=float) * entanglement_time
    small = np.abs(x) < SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return _real_or_array(out)


def _finite(field: FieldConfig) -> float:
    if field.entanglement_time == 0.0:
        raise DeltaNotSamplable("field is in the delta limit (entanglement_time = 0)")
    return field.entanglement_time


def _d1(field: FieldConfig, t):
    return dn(DnForm(FINITE, 1, _finite(field)), t)


def _d2(field: FieldConfig, t):
    return dn(DnForm(FINITE, 2, _finite(field)), t)


def two_photon_wavefunction(t, s, field: FieldConfig):
    """<vac| E_s^+(t) E_i^+(s) |twin> = zeta/(2 pi) D1(t - s) e^{-i ws t - i wi s}."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    amp = field.conversion_scale / (2 * np.pi) * _d1(field, t - s)
    out = amp * np.exp(-1j * field.signal_center * t - 1j * field.idler_center * s)
    return out if np.ndim(out) else complex(out)


def autocorrelation(t, s, branch: str, field: FieldConfig):
    """<twin| E_sigma^-(t) E_sigma^+(s) |twin> = zeta^2/(2 pi) D2(t - s) e^{i w_sigma (t - s)}."""
    if branch == SIGNAL:
        center = field.signal_center
    elif branch == IDLER:
        center = field.idler_center
    else:
        raise ValueError(f"branch must be '{SIGNAL}' or '{IDLER}', got {branch!r}")
    dt = np.asarray(t, dtype=float) - np.asarray(s, dtype=float)
    out = field.conversion_scale ** 2 / (2 * np.pi) * _d2(field, dt) * np.exp(1j * center * dt)
    return out if np.ndim(out) else complex(out)


def idler_amplitude(omega, tau, field: FieldConfig):
    """<vac| a_i(omega) E_s^+(tau) |twin>, the idler-frequency projection of the pair."""
    te = field.entanglement_time
    om_i = np.asarray(omega, dtype=float) - field.idler_center
    tau = np.asarray(tau, dtype=float)
    phase = np.exp(-1j * field.signal_center * tau + 1j * om_i * tau)
    out = field.conversion_scale / (2 * np.pi) * sinc_filter(om_i, te) * phase
    return out if np.ndim(out) else complex(out)


def arrival_window(field: FieldConfig):
    """Blurred idler-minus-signal arrival interval and whether it stays causal."""
    lo = field.delay - 0.5 * field.entanglement_time
    hi = field.delay + 0.5 * field.entanglement_time
    return lo, hi, lo >= 0.0


def _cross_terms(kind: CorrelatorKind, omega, t, s3, s2, s1, field: FieldConfig):
    om = np.asarray(omega, dtype=float)
    delay = field.delay
    om_i = om - field.idler_center
    om_s = om - field.signal_center
    base = sinc_filter(om_i, field.entanglement_time) * np.exp(
        -1j * om * t + 1j * om * s3 - 1j * om_i * delay
    )
    if kind.rephasing:
        pump = np.exp(-1j * (field.pump_frequency - om) * s1)
        return base * pump * (
            _d1(field, s2 - delay) * np.exp(1j * om_i * s2)
            + _d1(field, s2 + delay) * np.exp(1j * om_s * s2)
        )
    return base * (
        _d1(field, s2 + s1 - delay) * np.exp(1j * om_i * s2 + 1j * field.signal_center * s1)
        + _d1(field, s2 + s1 + delay) * np.exp(1j * om_s * s2 + 1j * field.idler_center * s1)
    )


def _auto_terms(kind: CorrelatorKind, omega, t, s3, s2, s1, field: FieldConfig):
    om = np.asarray(omega, dtype=float)
    base = np.exp(-1j * om * t + 1j * om * s3)
    ws = field.signal_center
    if kind is CorrelatorKind.GSB_R:
        return _d2(field, s2 + s1) * base * np.exp(1j * (om - ws) * s2 - 1j * ws * s1)
    if kind is CorrelatorKind.SE_R:
        return _d2(field, s1) * base * np.exp(-1j * ws * s1)
    if kind is CorrelatorKind.SE_NR:
        return _d2(field, s1) * base * np.exp(1j * ws * s1)
    # ESA has no autocorrelation term; the GSB non-rephasing one sits on delta(s2)
    return np.zeros(np.broadcast(om, t, s3, s2, s1).shape, dtype=complex)


def four_body(kind: CorrelatorKind, omega, t, s3, s2, s1, field: FieldConfig, terms: str = "all"):
    """Four-body field correlator C_x^(y)(omega, t; s3, s2, s1) at finite Te.

    terms: 'cross' keeps the two D1 pump-probe terms, 'auto' the
    autocorrelation term, 'all' both. The delta(s2) term of the GSB
    non-rephasing correlator is not samplable; see delta_weight().
    """
    if not isinstance(kind, CorrelatorKind):
        raise UnknownKind(f"unknown correlator kind {kind!r}")
    _finite(field)
    if terms not in ("all", "cross", "auto"):
        raise ValueError(f"terms must be 'all', 'cross' or 'auto', got {terms!r}")
    out = 0
    if terms in ("all", "cross"):
        out = out + _cross_terms(kind, omega, t, s3, s2, s1, field)
    if terms in ("all", "auto"):
        out = out + _auto_terms(kind, omega, t, s3, s2, s1, field)
    out = np.asarray(out, dtype=complex)
    return out if out.ndim else complex(out)


def delta_weight(kind: CorrelatorKind, omega, t, s3, s1, field: FieldConfig):
    """Coefficient of delta(s2) in the correlator; only GSB non-rephasing has one."""
    om = np.asarray(omega, dtype=float)
    if kind is not CorrelatorKind.GSB_NR:
        return np.zeros(np.broadcast(om, t, s3, s1).shape, dtype=complex)
    filt = sinc_filter(om - field.idler_center, field.entanglement_time)
    out = filt ** 2 * np.exp(-1j * om * t + 1j * om * s3 + 1j * om * s1)
    return out if np.ndim(out) else complex(out)
