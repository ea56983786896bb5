"""Equivalent-circuit equations for single-diode, double-diode and module models.

Currents are evaluated with the measured current substituted on the
right-hand side of the implicit circuit equation, so every evaluation is a
closed-form expression (no root finding). Saturation currents are given in
microamperes and converted to amperes only here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

#: Electron charge (C) and Boltzmann constant (J/K). These exact literals are
#: the ones used throughout the PV parameter-estimation literature; RMSE values
#: at 5 significant digits are sensitive to them.
Q_ELECTRON = 1.60217646e-19
K_BOLTZMANN = 1.3806503e-23

#: Saturation currents are stored in microamperes.
MICRO = 1e-6
KELVIN_OFFSET = 273.15


class EvaluationOverflowError(ArithmeticError):
    """Raised when a model evaluation leaves the finite double range."""


@dataclass(frozen=True)
class PhysicalConstants:
    q: float = Q_ELECTRON
    k: float = K_BOLTZMANN


CONSTANTS = PhysicalConstants()


def _check_params(p) -> None:
    for f in fields(p):
        value = getattr(p, f.name)
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{type(p).__name__}.{f.name} must be finite and >= 0, got {value!r}")
    for name in ("n", "n1", "n2"):
        if hasattr(p, name) and getattr(p, name) < 1:
            raise ValueError(f"{type(p).__name__}.{name} must be >= 1, got {getattr(p, name)!r}")


@dataclass(frozen=True)
class SdmParams:
    """Single diode model parameters ``[iph, i0, n, rs, rp]``.

    ``iph`` in A, ``i0`` in uA, ``n`` dimensionless, ``rs`` and ``rp`` in ohm.
    """

    iph: float
    i0: float
    n: float
    rs: float
    rp: float

    def __post_init__(self):
        _check_params(self)

    def as_array(self) -> np.ndarray:
        return np.array([self.iph, self.i0, self.n, self.rs, self.rp], dtype=float)

    @classmethod
    def from_array(cls, theta) -> "SdmParams":
        return cls(*(float(x) for x in theta))


@dataclass(frozen=True)
class DdmParams:
    """Double diode model parameters ``[iph, i01, i02, n1, n2, rs, rp]``."""

    iph: float
    i01: float
    i02: float
    n1: float
    n2: float
    rs: float
    rp: float

    def __post_init__(self):
        _check_params(self)

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.iph, self.i01, self.i02, self.n1, self.n2, self.rs, self.rp], dtype=float
        )

    @classmethod
    def from_array(cls, theta) -> "DdmParams":
        return cls(*(float(x) for x in theta))


@dataclass(frozen=True)
class OperatingCondition:
    """Cell temperature in kelvin plus series/parallel cell counts."""

    temperature: float
    ns: int = 1
    np: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError(f"temperature must be a positive kelvin value, got {self.temperature!r}")
        if int(self.ns) != self.ns or self.ns < 1 or int(self.np) != self.np or self.np < 1:
            raise ValueError(f"ns and np must be integers >= 1, got ns={self.ns!r}, np={self.np!r}")

    @classmethod
    def from_celsius(cls, t_celsius: float, ns: int = 1, np: int = 1) -> "OperatingCondition":
        return cls(t_celsius + KELVIN_OFFSET, ns, np)


# ---------------------------------------------------------------------------
# Broadcasting kernels. These take plain floats / arrays and never validate;
# the objective and the optimizer call them on whole populations at once.
# ---------------------------------------------------------------------------


def diode_current(x, i0_ua, n, temperature):
    """Shockley diode current ``i0 * (exp(q x / (n k T)) - 1)`` in amperes.

    Terms with a zero saturation current are exactly zero, even where the
    exponential overflows.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        term = i0_ua * MICRO * (np.exp(Q_ELECTRON * x / (n * K_BOLTZMANN * temperature)) - 1)
    return np.where(np.asarray(i0_ua) == 0, 0.0, term)


def sdm_rhs(v, i, iph, i0, n, rs, rp, temperature):
    """Right-hand side of the single diode equation, unvalidated."""
    x = v + i * rs
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return iph - diode_current(x, i0, n, temperature) - x / rp


def ddm_rhs(v, i, iph, i01, i02, n1, n2, rs, rp, temperature):
    """Right-hand side of the double diode equation, unvalidated.

    With ``i02 == 0`` this is bit-for-bit :func:`sdm_rhs`: the second diode
    term is an exact zero and subtracting it is exact.
    """
    x = v + i * rs
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return (
            iph
            - diode_current(x, i01, n1, temperature)
            - diode_current(x, i02, n2, temperature)
            - x / rp
        )


def _finite_or_raise(out, what):
    out = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(out)):
        raise EvaluationOverflowError(f"{what} evaluation is not finite (exponential overflow)")
    return out if out.ndim else float(out)


def sdm_current(v_meas, i_meas, p: SdmParams, cond: OperatingCondition):
    """Single diode model current at measured ``(v, i)`` pairs.

    ``v_meas`` and ``i_meas`` may be scalars or arrays of equal shape.

    Raises
    ------
    ValueError
        If ``p.rp`` is not positive.
    EvaluationOverflowError
        If the exponential overflows.
    """
    if p.rp <= 0:
        raise ValueError("point evaluation requires rp > 0")
    out = sdm_rhs(
        np.asarray(v_meas, float), np.asarray(i_meas, float),
        p.iph, p.i0, p.n, p.rs, p.rp, cond.temperature,
    )
    return _finite_or_raise(out, "SDM")


def ddm_current(v_meas, i_meas, p: DdmParams, cond: OperatingCondition):
    """Double diode model current at measured ``(v, i)`` pairs."""
    if p.rp <= 0:
        raise ValueError("point evaluation requires rp > 0")
    out = ddm_rhs(
        np.asarray(v_meas, float), np.asarray(i_meas, float),
        p.iph, p.i01, p.i02, p.n1, p.n2, p.rs, p.rp, cond.temperature,
    )
    return _finite_or_raise(out, "DDM")


def module_current(v_meas, i_meas, p: SdmParams, cond: OperatingCondition):
    """PV module current built from ``ns`` x ``np`` identical SDM cells.

    ``p`` holds the per-cell parameters. With ``ns == np == 1`` the result is
    identical to :func:`sdm_current`.
    """
    if p.rp <= 0:
        raise ValueError("point evaluation requires rp > 0")
    ns, npar = cond.ns, cond.np
    v = np.asarray(v_meas, float)
    i = np.asarray(i_meas, float)
    if ns == 1 and npar == 1:
        return sdm_current(v, i, p, cond)
    x = v / ns + i * p.rs / npar
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out = (
            p.iph * npar
            - npar * diode_current(x, p.i0, p.n, cond.temperature)
            - x / (p.rp / npar)
        )
    return _finite_or_raise(out, "module")
