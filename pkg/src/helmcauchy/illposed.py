"""Data families that shrink to zero while the solutions at z = 0 blow up."""
import math
from dataclasses import dataclass

import numpy as np

from .analytic import exact_uhat
from .errors import ParameterError, ValidityError
from .quadrature import legendre_rule
from .spectral import CauchyData, ModeGrid
from .truncation import regularized_uhat

EXP_BUDGET = 700.0


@dataclass(frozen=True)
class BlowupFamily:
    """g_hat = sqrt(n) and f_hat = sqrt(n)/d on the square W_n = (n+k+1, n+k+1+1/n)^2, zero elsewhere."""
    n: int
    params: object

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"family index must be an integer >= 2, got {self.n}")

    @property
    def lo(self):
        return self.n + self.params.k + 1

    @property
    def side(self):
        return 1.0 / self.n

    @property
    def g_amp(self):
        return math.sqrt(self.n)

    @property
    def f_amp(self):
        return math.sqrt(self.n) / self.params.d

    def grid(self, m, z=(0.0,)):
        """Midpoint sub-grid with m x m samples over W_n."""
        h = self.side / m
        ax = self.lo + (np.arange(m) + 0.5) * h
        p1, p2 = np.meshgrid(ax, ax, indexing="ij")
        return ModeGrid(np.column_stack([p1.ravel(), p2.ravel()]), h, np.asarray(z, float), self.params.k)

    def data(self, grid):
        fa = self.f_amp
        return CauchyData(grid, np.full(grid.n_rho, self.g_amp, complex),
                          lambda s: np.full((grid.n_rho, np.size(s)), fa, complex))


def family_norms(fam, m=None):
    """(|g_n|^2, |f_n|^2) in closed form: 1/n and 1/(n d).

    The second value is the squared norm over the whole slab; a single depth slice
    carries 1/(n d^2). With ``m`` the midpoint-rule versions on an m x m sub-grid are
    appended.
    """
    n, d = fam.n, fam.params.d
    closed = (1.0 / n, 1.0 / (n * d))
    if m is None:
        return closed
    grid = fam.grid(m)
    area = grid.spacing ** 2 * grid.n_rho
    return closed + (fam.g_amp ** 2 * area, fam.f_amp ** 2 * area * d)


def blowup_lower_bound(fam):
    """(n^2-1)/(2(n^2+1)) * exp(2dn) / (4 n exp(2kd))."""
    n, d, k = fam.n, fam.params.d, fam.params.k
    return (n * n - 1) / (2 * (n * n + 1)) * math.exp(2 * d * n) / (4 * n * math.exp(2 * k * d))


def log_blowup_lower_bound(fam):
    n, d, k = fam.n, fam.params.d, fam.params.k
    return math.log((n * n - 1) / (2 * (n * n + 1))) + 2 * d * n - math.log(4 * n) - 2 * k * d


def _log_norm2_closed(fam, grid):
    """log of the discrete |u_n(., 0)|^2, evaluated in exponent-scaled form."""
    d = fam.params.d
    lam = grid.lam
    a = np.sqrt(lam)
    # u(0) = sqrt(n) [cosh(d a) - (cosh(d a) - 1)/(d lam)] = sqrt(n) e^{da} * scaled
    scaled = 0.5 * (1 + np.exp(-2 * d * a)) * (1 - 1 / (d * lam)) + np.exp(-d * a) / (d * lam)
    logs = math.log(fam.n) + 2 * d * a + 2 * np.log(np.abs(scaled))
    top = np.max(logs)
    return 2 * math.log(grid.spacing) + top + math.log(math.fsum(np.exp(logs - top).tolist()))


@dataclass(frozen=True)
class BlowupRow:
    n: int
    g_norm2: float
    g_norm2_discrete: float
    f_norm2: float
    log_u_norm2: float
    log_lower_bound: float

    @property
    def u_norm2(self):
        return math.exp(self.log_u_norm2)

    @property
    def lower_bound(self):
        return math.exp(self.log_lower_bound)

    @property
    def exceeds_bound(self):
        return self.log_u_norm2 > self.log_lower_bound


def demo_blowup(n_list, m=100, params=None, rule=None, panels=8, log_space=False, reg=None):
    """Solution norms at z = 0 for the family members in ``n_list``.

    Each W_n is sampled by an m x m midpoint grid. The solution goes through
    ``exact_uhat`` (or ``regularized_uhat`` when ``reg`` is given). With
    ``log_space`` the norm is evaluated from the closed form in exponent-scaled
    arithmetic, which lifts the 2dn < 700 limit.
    """
    rule = rule or legendre_rule(20)
    rows = []
    for n in n_list:
        fam = BlowupFamily(int(n), params)
        g2, f2, g2d, _ = family_norms(fam, m)
        grid = fam.grid(m)
        if log_space:
            if reg is not None:
                raise ParameterError("log_space evaluation is only available without a cutoff")
            logu = _log_norm2_closed(fam, grid)
        else:
            if 2 * params.d * n >= EXP_BUDGET:
                raise ValidityError(f"2dn = {2 * params.d * n:.0f} exceeds the exponent budget; "
                                    "use a smaller n or log_space=True")
            data = fam.data(grid)
            if reg is None:
                u = exact_uhat(data, grid, params, rule, panels)
            else:
                u = regularized_uhat(data, grid, params, reg, rule, panels=panels)
            v = u.values[:, 0]
            tot = grid.spacing ** 2 * math.fsum((v.real ** 2 + v.imag ** 2).tolist())
            logu = math.log(tot) if tot > 0 else -math.inf
        rows.append(BlowupRow(fam.n, g2, g2d, f2, logu, log_blowup_lower_bound(fam)))
    return rows


def growth_slope(rows):
    """Least-squares slope of log |u_n(., 0)|^2 against n."""
    n = np.array([r.n for r in rows], float)
    y = np.array([r.log_u_norm2 for r in rows])
    return float(np.polyfit(n, y, 1)[0])
