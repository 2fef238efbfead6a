"""Spectral cutoff regularization: parameter rules, the cutoff itself, the regularized
solution and the computable error and stability bounds."""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analytic import exact_uhat
from .errors import ParameterError
from .spectral import A1, CauchyData, SpectralField

RULES = ("apriori", "logrule", "manual", "thm17")


@dataclass(frozen=True)
class RegParams:
    """Noise level, cutoff eps (modes with |rho|^2 <= 1/eps survive) and kappa = sqrt(1/eps - k^2)."""
    delta: float
    eps: float
    kappa: float
    M0: Optional[float] = None
    rule: str = "manual"
    P: Optional[float] = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise ParameterError(f"unknown rule {self.rule!r}")
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise ParameterError(f"eps must be positive and finite, got {self.eps!r}")
        if self.delta < 0:
            raise ParameterError("delta must be nonnegative")
        if self.rule == "apriori" and not (self.M0 is not None and self.delta < self.M0):
            raise ParameterError("the a-priori rule needs delta < M0")

    @property
    def radius(self):
        return 1.0 / math.sqrt(self.eps)

    @classmethod
    def manual(cls, eps, params, delta=0.0, M0=None, P=None):
        return cls(delta, eps, _kappa(eps, params.k), M0, "manual", P)


def _kappa(eps, k):
    return math.sqrt(max(1.0 / eps - k * k, 0.0))


def eps_apriori(delta, M0, params):
    """eps = (k^2 + ln^2(delta/M0)/d^2)^-1, i.e. kappa = -ln(delta/M0)/d."""
    if not 0 < delta < M0:
        raise ParameterError(f"a-priori rule needs 0 < delta < M0 (delta={delta}, M0={M0})")
    kappa = -math.log(delta / M0) / params.d
    eps = 1.0 / (params.k ** 2 + kappa ** 2)
    return RegParams(delta, eps, kappa, M0, "apriori")


def eps_logrule(delta, params):
    """kappa = ln(1/delta)/d, with the source constant P = 1."""
    if not 0 < delta < 1:
        raise ParameterError(f"log rule needs 0 < delta < 1, got {delta}")
    kappa = math.log(1.0 / delta) / params.d
    return RegParams(delta, 1.0 / (params.k ** 2 + kappa ** 2), kappa, None, "logrule", 1.0)


def eps_thm17(delta, params):
    """eps = d^2 / ln^2(1/delta), the choice used for the nonlinear problem."""
    if not 0 < delta < 1:
        raise ParameterError(f"need 0 < delta < 1, got {delta}")
    eps = params.d ** 2 / math.log(1.0 / delta) ** 2
    return RegParams(delta, eps, _kappa(eps, params.k), None, "thm17")


def cutoff_mask(grid, reg):
    return grid.rho2 <= 1.0 / reg.eps


def truncate(obj, reg):
    """Zero every mode with |rho|^2 > 1/eps. Accepts a SpectralField or CauchyData."""
    keep = cutoff_mask(obj.grid, reg)
    if isinstance(obj, SpectralField):
        return SpectralField(obj.grid, np.where(keep[:, None], obj.values, 0))
    if isinstance(obj, CauchyData):
        return obj.masked(keep)
    raise TypeError(f"cannot truncate {type(obj).__name__}")


def regularized_uhat(data_delta, grid, params, reg, rule, a1_only=False, panels=1):
    """Unstable solution formula applied to cut-off data; zero outside the cutoff disk.

    With ``a1_only`` the surviving set is further restricted to lambda > 0.
    """
    keep = cutoff_mask(grid, reg)
    if a1_only:
        keep &= grid.region == A1
    out = np.zeros((grid.n_rho, grid.z.size), complex)
    if np.any(keep):
        sub = data_delta.restricted(keep)
        out[keep] = exact_uhat(sub, sub.grid, params, rule, panels).values
    return SpectralField(grid, out)


# ---- bounds -------------------------------------------------------------

def _m1_tail(t, kappa):
    """t * (sinh(2 kappa t) - 2 kappa t) / (2 kappa^3), with a series for small kappa*t."""
    x = kappa * t
    if x < 1e-4:
        return (2.0 / 3.0) * t ** 4 * (1 + x * x / 5 + 2 * x ** 4 / 105)
    return t * (math.sinh(2 * x) - 2 * x) / (2 * kappa ** 3)


def m1_stability(z, reg, params):
    """M1(z) = sqrt(2 cosh^2((d-z) kappa) + (d-z)(sinh(2 kappa (d-z)) - 2 kappa (d-z)) / (2 kappa^3))."""
    t = params.d - z
    if t < 0 or z < 0:
        raise ParameterError("z must lie in [0, d]")
    kappa = reg.kappa if isinstance(reg, RegParams) else float(reg)
    return math.sqrt(2 * math.cosh(t * kappa) ** 2 + _m1_tail(t, kappa))


def thm11_error_bound(z, delta, M0, params):
    """A-priori rule error bound, of order delta^(z/d)."""
    if not 0 < delta < M0:
        raise ParameterError(f"need 0 < delta < M0 (delta={delta}, M0={M0})")
    d = params.d
    if not 0 < z <= d:
        raise ParameterError("z must lie in (0, d]")
    inner = 2 * delta ** (2 * (1 - z / d)) + M0 ** (2 * (d - z) / d) * (
        1 + d ** 3 * (d - z) / (4 * math.log(M0 / delta) ** 3))
    return (2 * math.sqrt(inner) + M0 ** ((d - z) / d)) * delta ** (z / d)


def thm13_error_bound(z, reg, params, M0, P):
    """(M0 + P) sqrt(2 + (d-z)/(4 kappa^3)) exp(-z kappa)."""
    kappa = reg.kappa if isinstance(reg, RegParams) else float(reg)
    if not kappa > 0:
        raise ParameterError("kappa must be positive")
    if not 0 <= z <= params.d:
        raise ParameterError("z must lie in [0, d]")
    return (M0 + P) * math.sqrt(2 + (params.d - z) / (4 * kappa ** 3)) * math.exp(-z * kappa)


def theta_measure(reg, params):
    """Size of the cutoff set: k^2 + ln^2(delta/M0)/d^2 under the a-priori rule, pi/eps otherwise."""
    if reg.rule == "apriori":
        return params.k ** 2 + math.log(reg.delta / reg.M0) ** 2 / params.d ** 2
    return math.pi / reg.eps


@dataclass(frozen=True)
class BoundReport:
    z: np.ndarray
    m1_of_z: np.ndarray
    thm11_bound: np.ndarray
    thm13_bound: np.ndarray
    p_const: Optional[float]
    theta_area: float


def bound_report(z_list, reg, params, M0, P=None):
    """Evaluate every bound at each z. The a-priori bound needs delta < M0."""
    z = np.asarray(z_list, float)
    P = reg.P if P is None else P
    m1 = np.array([m1_stability(zz, reg, params) for zz in z])
    if 0 < reg.delta < M0:
        t11 = np.array([thm11_error_bound(zz, reg.delta, M0, params) for zz in z])
    else:
        t11 = np.full(z.size, np.nan)
    if P is not None and reg.kappa > 0:
        t13 = np.array([thm13_error_bound(zz, reg, params, M0, P) for zz in z])
    else:
        t13 = np.full(z.size, np.nan)
    return BoundReport(z, m1, t11, t13, P, theta_measure(reg, params))
