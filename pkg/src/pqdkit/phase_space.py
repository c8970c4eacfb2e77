"""Closed-form s-parameterized quasiprobability distributions.

Everything here is a pure function of its arguments.  The conventions are
dimensionless quadrature variances ``a_plus = 2*V_xx`` and ``a_minus =
2*V_yy`` so that the vacuum has ``a_plus == a_minus == 1``; ordering ``s``
gives the Glauber-Sudarshan P, Wigner, and Husimi Q distributions at
``s = 1, 0, -1``.

Gaussian-factor shifting: a factor ``exp(rate*|alpha|^2)`` can be moved from
the input side to the measurement side of a circuit (norm preservation of
passive linear optics).  ``rate = 2*gamma/denom_scale`` with a *signed*
normalized ``gamma``: positive gamma with ``denom_scale = a_max - s`` shifts
forward, negative gamma with ``denom_scale = s + 1`` shifts in reverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DomainError,
    OrderingOutOfRange,
    ShiftOutOfRange,
    SingularOrdering,
)

_PHYS_TOL = 1e-12


@dataclass(frozen=True)
class ModeCovariance:
    """Diagonal single-mode covariance in dimensionless form.

    ``a_plus``/``a_minus`` are twice the quadrature variances; physicality
    requires ``a_plus >= a_minus > 0`` and ``a_plus * a_minus >= 1``.
    """

    a_plus: float
    a_minus: float

    def __post_init__(self):
        if not (self.a_plus >= self.a_minus > 0.0):
            raise ValueError(
                f"need a_plus >= a_minus > 0, got ({self.a_plus}, {self.a_minus})"
            )
        if self.a_plus * self.a_minus < 1.0 - 1e-10:
            raise ValueError(
                f"uncertainty violation: a_plus*a_minus = {self.a_plus * self.a_minus}"
            )


VACUUM = ModeCovariance(1.0, 1.0)


def squeezed_thermal_covariance(r: float, n: float) -> ModeCovariance:
    """Covariance of a squeezed thermal state with mean photons ``n``."""
    u = 2.0 * n + 1.0
    return ModeCovariance(u * math.exp(2.0 * r), u * math.exp(-2.0 * r))


def lossy_covariance(r: float, n: float, eta: float, n_th: float) -> ModeCovariance:
    """Squeezed thermal state sent through a transmissivity-``eta`` channel
    whose environment carries ``n_th`` mean thermal photons."""
    u = 2.0 * n + 1.0
    env = (1.0 - eta) * (2.0 * n_th + 1.0)
    return ModeCovariance(
        eta * u * math.exp(2.0 * r) + env, eta * u * math.exp(-2.0 * r) + env
    )


@dataclass(frozen=True)
class MeasurementOutcome:
    """Per-mode detector outcome tag."""

    kind: str  # "photon" | "click" | "noclick" | "marginal"
    m: int = 0

    def __post_init__(self):
        if self.kind not in ("photon", "click", "noclick", "marginal"):
            raise ValueError(f"unknown outcome kind {self.kind!r}")
        if self.kind == "photon" and (self.m < 0 or self.m != int(self.m)):
            raise ValueError("photon count must be a nonnegative integer")

    @property
    def is_gaussian(self) -> bool:
        """True when the measurement factor is Gaussian (analytically
        integrable): vacuum projection, no-click, or a marginalized mode."""
        return self.kind in ("noclick", "marginal") or (
            self.kind == "photon" and self.m == 0
        )


def photon(m: int) -> MeasurementOutcome:
    return MeasurementOutcome("photon", m)


CLICK = MeasurementOutcome("click")
NOCLICK = MeasurementOutcome("noclick")
MARGINAL = MeasurementOutcome("marginal")


@dataclass(frozen=True)
class PqdParams:
    """Ordering and shift parameters with their admissible ranges."""

    s: float
    gamma: float
    gamma_R: float
    gamma_F: float
    a_max: float
    s_max: float

    @classmethod
    def from_covariances(
        cls, covs: Sequence[ModeCovariance], s: float, gamma: float = 0.0
    ) -> "PqdParams":
        a_max = max(c.a_plus for c in covs)
        s_max = classicality(covs)
        if s <= -1.0:
            raise OrderingOutOfRange(f"s must exceed -1, got {s}")
        if s > s_max:
            raise SingularOrdering(f"s = {s} exceeds classicality s_max = {s_max}")
        return cls(
            s=s,
            gamma=gamma,
            gamma_R=2.0 / (s + 1.0),
            gamma_F=2.0 / (a_max - s) if a_max > s else math.inf,
            a_max=a_max,
            s_max=s_max,
        )

    def validate(self):
        if not (-self.gamma_R < self.gamma < self.gamma_F):
            raise ShiftOutOfRange(
                f"gamma = {self.gamma} outside (-{self.gamma_R}, {self.gamma_F})"
            )


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

_INV_E = math.exp(-1.0)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function, ``w*exp(w) = x``.

    Halley iteration from a log-based starting point; residual below 1e-14
    over the whole branch domain ``x >= -1/e``.
    """
    if x < -_INV_E:
        raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0
    if x < -_INV_E + 1e-290:
        return -1.0
    # starting guess
    if x < 1.0:
        # series around 0 is adequate here
        w = x * (1.0 - x)
    else:
        lx = math.log(x)
        llx = math.log(lx) if lx > 0 else 0.0
        w = lx - llx
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w -= step
        if abs(step) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


W_INV_E = lambert_w0(_INV_E)  # W(1/e) = 0.27846...


def laguerre(m: int, x):
    """Laguerre polynomial L_m(x) by the stable three-term recurrence.

    Accepts scalars or numpy arrays for ``x``.
    """
    if m < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if m == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for k in range(1, m):
        prev, cur = cur, ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0)
    return cur if cur.ndim else float(cur)


# ---------------------------------------------------------------------------
# state and measurement PQDs
# ---------------------------------------------------------------------------


def classicality(covs: Iterable[ModeCovariance]) -> float:
    """Largest ordering for which every input PQD stays a proper Gaussian."""
    return min(c.a_minus for c in covs)


def spqd_gaussian(cov: ModeCovariance, s: float, alpha: complex) -> float:
    """s-PQD of a centered Gaussian state at phase-space point ``alpha``."""
    ap, am = cov.a_plus - s, cov.a_minus - s
    if am <= _PHYS_TOL:
        raise SingularOrdering(
            f"s = {s} reaches a_minus = {cov.a_minus}; distribution is singular"
        )
    ax, ay = alpha.real, alpha.imag
    return (
        2.0
        / (math.pi * math.sqrt(ap * am))
        * math.exp(-2.0 * ax * ax / ap - 2.0 * ay * ay / am)
    )


def pqd_photon_number(m: int, s: float, beta):
    """(-s)-PQD of the photon-number projector ``|m><m|``.

    Not multiplied by pi.  The s = 1 limit is only defined for m = 0 here;
    higher counts at s = 1 are served by the hafnian route instead.
    """
    if s <= -1.0:
        raise OrderingOutOfRange(f"photon-number PQD needs s > -1, got {s}")
    if s == 1.0 and m > 0:
        raise OrderingOutOfRange("s = 1 with m >= 1 is outside this branch")
    b = np.abs(np.asarray(beta)) ** 2
    sp = s + 1.0
    if m == 0:
        val = (2.0 / (math.pi * sp)) * np.exp(-2.0 * b / sp)
    else:
        ratio = (s - 1.0) / sp
        val = (
            (2.0 / (math.pi * sp))
            * ratio**m
            * laguerre(m, 4.0 * b / (1.0 - s * s))
            * np.exp(-2.0 * b / sp)
        )
    val = np.asarray(val)
    return val if val.ndim else float(val)


def pqd_threshold_click(s: float, beta):
    """(-s)-PQD of the click POVM element, already multiplied by pi."""
    if s <= -1.0:
        raise OrderingOutOfRange(f"threshold PQD needs s > -1, got {s}")
    b = np.abs(np.asarray(beta)) ** 2
    sp = s + 1.0
    val = np.asarray(1.0 - (2.0 / sp) * np.exp(-2.0 * b / sp))
    return val if val.ndim else float(val)


def measurement_pqd_pi(outcome: MeasurementOutcome, s: float, beta):
    """pi * W^(-s) of any supported measurement outcome (1 for marginals)."""
    if outcome.kind == "marginal":
        b = np.abs(np.asarray(beta)) ** 2
        val = np.ones_like(np.asarray(b, dtype=float))
        return val if val.ndim else 1.0
    if outcome.kind == "click":
        return pqd_threshold_click(s, beta)
    m = 0 if outcome.kind == "noclick" else outcome.m
    val = np.asarray(math.pi * np.asarray(pqd_photon_number(m, s, beta)))
    return val if val.ndim else float(val)


# ---------------------------------------------------------------------------
# shifted factors
# ---------------------------------------------------------------------------


def shift_rate(gamma: float, denom_scale: float) -> float:
    """Raw exponent moved between input and measurement factors."""
    if denom_scale <= 0.0:
        raise ShiftOutOfRange(f"denominator scale must be positive, got {denom_scale}")
    return 2.0 * gamma / denom_scale


def input_exponents(cov: ModeCovariance, s: float, rate: float) -> tuple[float, float]:
    """Shifted Gaussian exponents (c_x, c_y) of a normalized input factor."""
    ap, am = cov.a_plus - s, cov.a_minus - s
    if am <= _PHYS_TOL:
        raise SingularOrdering(
            f"s = {s} reaches a_minus = {cov.a_minus}; use the singular branch"
        )
    cx = 2.0 / ap - rate
    cy = 2.0 / am - rate
    if cx <= 0.0 or cy <= 0.0:
        raise ShiftOutOfRange(
            f"shifted exponent nonpositive (cx={cx}, cy={cy}) for rate {rate}"
        )
    return cx, cy


def input_norm(cov: ModeCovariance, s: float, rate: float) -> float:
    """Normalization constant N_i of the shifted input factor."""
    cx, cy = input_exponents(cov, s, rate)
    c0x = 2.0 / (cov.a_plus - s)
    c0y = 2.0 / (cov.a_minus - s)
    return math.sqrt(c0x / cx) * math.sqrt(c0y / cy)


def shifted_input_factor(
    cov: ModeCovariance,
    s: float,
    gamma: float,
    denom_scale: float,
    alpha: complex,
) -> tuple[float, float]:
    """Normalized, gamma-shifted input density P_i at ``alpha``.

    Returns ``(density, N_i)`` where N_i is the normalization constant that
    re-appears in the paired measurement factor.
    """
    rate = shift_rate(gamma, denom_scale)
    cx, cy = input_exponents(cov, s, rate)
    n_i = input_norm(cov, s, rate)
    ax, ay = alpha.real, alpha.imag
    dens = math.sqrt(cx * cy) / math.pi * math.exp(-cx * ax * ax - cy * ay * ay)
    return dens, n_i


def shifted_meas_factor(
    outcome: MeasurementOutcome,
    s: float,
    gamma: float,
    denom_scale: float,
    n_j: float,
    beta,
):
    """Shifted measurement factor f_j = N_j * pi*W^(-s)(beta) * exp(-rate*|beta|^2)."""
    rate = shift_rate(gamma, denom_scale)
    b = np.abs(np.asarray(beta)) ** 2
    val = np.asarray(n_j * np.asarray(measurement_pqd_pi(outcome, s, beta)) * np.exp(-rate * b))
    return val if val.ndim else float(val)
