"""Experiment runners, the E(z0) metric, configuration handling and CSV output."""
import hashlib
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import OutputError, ParameterError
from .illposed import demo_blowup, growth_slope
from .nonlinear import (NonlinearRegSetup, example2_data, example2_exact, example2_forcing,
                        example2_rhat_grid, fixed_point_solve, volterra_march)
from .quadrature import legendre_rule
from .quasiboundary import QuasiBoundaryParams, xiong_uhat
from .spectral import A1, CauchyData, ModeGrid, SpectralField, WaveParams, fourier_coeff_rect
from .truncation import (RegParams, bound_report, eps_apriori, eps_logrule, eps_thm17, m1_stability,
                         regularized_uhat, thm13_error_bound, theta_measure)

# ---- configuration ------------------------------------------------------

# Box-shaped test problem: u = xy (z - 1/2)^4 on (0,1)^2 x (0,1/2)
EX1_NORM_CONST = 0.3167506677


def _floats(text):
    return [float(v) for v in str(text).replace(",", " ").split()]


def _ints(text):
    return [int(v) for v in str(text).replace(",", " ").split()]


_PARSE = {
    "k": float, "d": float, "M0": float, "norm_const": float,
    "quad_order": int, "coeff_order": int, "spacing_divisor": float,
    "volterra_steps": int, "blowup_grid": int, "fp_panels": int, "fp_max_iters": int,
    "fp_tol": float, "deltas": _floats, "z0s": _floats, "n_list": _ints,
    "rhat_form": str, "solver": str, "method": str,
}

_EX1 = {"k": 1 / 3, "d": 0.5, "M0": 1 / 48, "quad_order": 5, "coeff_order": 10,
        "spacing_divisor": 30.0, "norm_const": EX1_NORM_CONST,
        "deltas": [1e-1, 1e-2, 1e-3, 1e-4], "z0s": [0.4, 0.25, 0.1, 0.05]}

DEFAULTS = {
    "table1": dict(_EX1),
    "table2": dict(_EX1),
    "figure": dict(_EX1, deltas=[1e-3], z0s=[0.05], method="truncation"),
    "bounds": {k: _EX1[k] for k in ("k", "d", "M0", "deltas", "z0s")},
    "table3": {"k": math.sqrt(5), "d": math.pi / math.sqrt(3), "spacing_divisor": 30.0,
               "volterra_steps": 50, "deltas": [1e-3, 1e-5, 1e-7, 1e-9],
               "z0s": [1.45, 1.08, 0.90, 0.36], "rhat_form": "derived", "solver": "march",
               "quad_order": 10, "fp_panels": 10, "fp_max_iters": 500, "fp_tol": 1e-10},
    "blowup": {"k": 1 / 3, "d": 0.5, "n_list": [2, 4, 6, 8, 10], "blowup_grid": 100, "quad_order": 20},
}

_CHOICES = {"rhat_form": ("derived", "printed"), "solver": ("march", "fixed_point"),
            "method": ("truncation", "quasiboundary")}


# manifest lines that are not configuration, so a manifest can be fed back as a config file
_MANIFEST_ONLY = {"command", "config_hash", "kernel_backend", "output", "note"}


def parse_config_text(text):
    """Flat ``key = value`` lines; ``#`` starts a comment; lists are comma or space separated."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in _MANIFEST_ONLY:
            out[key] = val
    return out


def read_config_file(path):
    try:
        with open(path) as fh:
            return parse_config_text(fh.read())
    except OSError as e:
        raise OutputError(f"cannot read config file {path}: {e}") from e


def make_config(command, *sources):
    """Defaults for ``command`` overridden by each mapping in ``sources`` in turn."""
    if command not in DEFAULTS:
        raise ParameterError(f"unknown command {command!r}")
    cfg = dict(DEFAULTS[command])
    for src in sources:
        for key, val in (src or {}).items():
            if val is None:
                continue
            if key not in cfg:
                raise ParameterError(f"key {key!r} is not used by {command}")
            try:
                cfg[key] = _PARSE[key](val) if isinstance(val, str) or key not in ("deltas", "z0s", "n_list") \
                    else [type(cfg[key][0])(v) for v in val]
            except (TypeError, ValueError) as e:
                raise ParameterError(f"bad value for {key}: {val!r}") from e
    _validate(command, cfg)
    return cfg


def _validate(command, cfg):
    for key, allowed in _CHOICES.items():
        if key in cfg and cfg[key] not in allowed:
            raise ParameterError(f"{key} must be one of {allowed}, got {cfg[key]!r}")
    for key in ("k", "d", "M0", "spacing_divisor", "norm_const", "fp_tol"):
        if key in cfg and not (cfg[key] > 0 and math.isfinite(cfg[key])):
            raise ParameterError(f"{key} must be positive, got {cfg[key]}")
    for key in ("quad_order", "coeff_order", "volterra_steps", "blowup_grid", "fp_panels", "fp_max_iters"):
        if key in cfg and cfg[key] < 1:
            raise ParameterError(f"{key} must be at least 1, got {cfg[key]}")
    for key in ("quad_order", "coeff_order"):
        if key in cfg and cfg[key] > 64:
            raise ParameterError(f"{key} must be at most 64")
    if "deltas" in cfg:
        if not cfg["deltas"]:
            raise ParameterError("need at least one delta")
        for dl in cfg["deltas"]:
            if not 0 < dl < 1:
                raise ParameterError(f"delta={dl} must lie in (0, 1)")
    if "z0s" in cfg:
        for z in cfg["z0s"]:
            if not 0 < z <= cfg["d"]:
                raise ParameterError(f"z0={z} must lie in (0, d]")
    if "n_list" in cfg and min(cfg["n_list"]) < 2:
        raise ParameterError("family indices must be >= 2")


def config_echo(command, cfg):
    lines = [f"command = {command}"]
    for key in sorted(cfg):
        v = cfg[key]
        lines.append(f"{key} = {', '.join(repr(x) for x in v) if isinstance(v, list) else repr(v) if not isinstance(v, str) else v}")
    return "\n".join(lines) + "\n"


def config_hash(command, cfg):
    return hashlib.sha256(config_echo(command, cfg).encode()).hexdigest()


# ---- reports ------------------------------------------------------------

@dataclass
class ErrorReport:
    rows: list
    method: str
    config_hash: str
    z0s: list
    config: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: -r[0])
        for _, cells in self.rows:
            for v in cells.values():
                if not (math.isfinite(v) and v >= 0):
                    raise ArithmeticError("error values must be finite and nonnegative")

    def table(self):
        """(n_delta, n_z0) array in row order."""
        return np.array([[cells[z] for z in self.z0s] for _, cells in self.rows])

    @property
    def deltas(self):
        return [r[0] for r in self.rows]

    def to_csv(self, path):
        lines = ["delta," + ",".join(f"E({z:g})" for z in self.z0s)]
        for dl, cells in self.rows:
            lines.append(",".join(_fmt8(v) for v in [dl] + [cells[z] for z in self.z0s]))
        _write(path, "\n".join(lines) + "\n")


def _fmt8(v):
    return f"{v:.7E}"


def _write(path, text):
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e


def error_E(exact, approx, z0, window=None):
    """Root mean square of |exact - approx| at depth z0 over the window's modes (all modes by default)."""
    if exact.grid is not approx.grid and not (
            np.array_equal(exact.grid.rho, approx.grid.rho) and np.array_equal(exact.grid.z, approx.grid.z)):
        raise ParameterError("fields live on different grids")
    i = exact.grid.z_index(z0)
    diff = exact.values[:, i] - approx.values[:, i]
    if window is not None:
        diff = diff[window]
    if diff.size == 0:
        raise ParameterError("empty error window")
    return math.sqrt(math.fsum((diff.real ** 2 + diff.imag ** 2).tolist()) / diff.size)


# ---- noise --------------------------------------------------------------

@dataclass(frozen=True)
class NoiseModel:
    """example1_deterministic: f_delta = f (1 + delta/norm_const), g_delta = delta on the box.
    additive_uniform: data plus uniform noise of amplitude delta in each spectral entry.
    none: exact data."""
    kind: str
    delta: float
    norm_const: float = EX1_NORM_CONST
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("example1_deterministic", "additive_uniform", "none"):
            raise ParameterError(f"unknown noise kind {self.kind!r}")
        if self.delta < 0:
            raise ParameterError("delta must be nonnegative")

    @property
    def f_factor(self):
        return 1 + self.delta / self.norm_const if self.kind == "example1_deterministic" else 1.0

    def apply(self, data, box_hat=None):
        """Measured version of ``data``. ``box_hat`` is the transform of the box indicator (example1)."""
        if self.kind == "none":
            return data
        if self.kind == "example1_deterministic":
            fac, f = self.f_factor, data.f_hat
            g = self.delta * np.asarray(box_hat, complex)
            return CauchyData(data.grid, g, lambda s: fac * np.asarray(f(s)), data.h_hat)
        rng = np.random.default_rng(self.seed)
        n = data.grid.n_rho
        noise = self.delta * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)) / math.sqrt(2)
        return CauchyData(data.grid, data.g_hat + noise, data.f_hat, data.h_hat)


# ---- Example 1 ----------------------------------------------------------

def ex1_profile(s):
    """Depth factor of the forcing: (s - 1/2)^2 (12 + (s - 1/2)^2 / 9); f = -xy * profile."""
    t = (np.asarray(s, float) - 0.5) ** 2
    return t * (12 + t / 9)


def example1_reg(delta, M0, params):
    """eps = (k^2 + ln^2(delta/M0)/d^2)^-1.

    For delta >= M0 the a-priori rule's hypothesis fails but the formula is still
    defined; the table protocol uses it there too, as a manual cutoff.
    """
    if delta < M0:
        return eps_apriori(delta, M0, params)
    eps = 1.0 / (params.k ** 2 + math.log(delta / M0) ** 2 / params.d ** 2)
    return RegParams.manual(eps, params, delta=delta, M0=M0)


def example1_setup(delta, cfg, z0s=None):
    """Grid on the cutoff disk intersected with A1, measured data and the exact spectrum."""
    params = WaveParams(cfg["k"], cfg["d"])
    reg = example1_reg(delta, cfg["M0"], params)
    R = reg.radius
    z = np.array(sorted(set(cfg["z0s"] if z0s is None else z0s)))
    k2 = params.k ** 2

    def keep(rho):
        r2 = np.sum(rho * rho, axis=1)
        return (r2 <= 1 / reg.eps) & (r2 - k2 > 0)
    grid = ModeGrid.square(R, R / cfg["spacing_divisor"], z, params, keep=keep)
    grid = grid.subset(grid.region == A1)
    X = fourier_coeff_rect(lambda x, y: x * y, 1.0, grid.rho, cfg["coeff_order"])
    box = fourier_coeff_rect(lambda x, y: np.ones(np.broadcast(x, y).shape), 1.0, grid.rho, cfg["coeff_order"])
    clean = CauchyData(grid, np.zeros(grid.n_rho), lambda s: -X[:, None] * ex1_profile(s)[None, :])
    noise = NoiseModel("example1_deterministic", delta, cfg["norm_const"])
    data = noise.apply(clean, box)
    exact = SpectralField(grid, X[:, None] * ((z - 0.5) ** 4)[None, :])
    return params, reg, grid, data, exact


def _run_ex1(cfg, method):
    rule = legendre_rule(cfg["quad_order"])
    rows, modes = [], {}
    for dl in cfg["deltas"]:
        params, reg, grid, data, exact = example1_setup(dl, cfg)
        if method == "truncation":
            approx = regularized_uhat(data, grid, params, reg, rule, a1_only=True)
        else:
            approx = xiong_uhat(data, grid, params, QuasiBoundaryParams.from_reg(reg), rule)
        rows.append((dl, {z: error_E(exact, approx, z) for z in cfg["z0s"]}))
        modes[dl] = grid.n_rho
    return rows, modes


def run_table1(config=None):
    cfg = make_config("table1", config)
    rows, modes = _run_ex1(cfg, "truncation")
    return ErrorReport(rows, "truncation", config_hash("table1", cfg), list(cfg["z0s"]), cfg, {"modes": modes})


def run_table2(config=None):
    cfg = make_config("table2", config)
    rows, modes = _run_ex1(cfg, "quasiboundary")
    return ErrorReport(rows, "quasiboundary", config_hash("table2", cfg), list(cfg["z0s"]), cfg, {"modes": modes})


# ---- Example 2 ----------------------------------------------------------

def example2_setup(delta, cfg):
    params = WaveParams(cfg["k"], cfg["d"])
    reg = eps_thm17(delta, params)
    R = reg.radius
    z = np.linspace(0.0, params.d, cfg["volterra_steps"] + 1)
    grid = ModeGrid.square(R, R / cfg["spacing_divisor"], z, params,
                           keep=lambda rho: np.sum(rho * rho, axis=1) <= 1 / reg.eps)
    setup = NonlinearRegSetup(reg, M=cfg["volterra_steps"], panels=cfg["fp_panels"],
                              max_iters=cfg["fp_max_iters"], fp_tol=cfg["fp_tol"])
    return params, reg, grid, setup


def run_table3(config=None):
    """Errors at the marching node nearest each z0 against the exact Gaussian spectrum there."""
    cfg = make_config("table3", config)
    rows, modes, nodes = [], {}, {}
    for dl in cfg["deltas"]:
        params, reg, grid, setup = example2_setup(dl, cfg)
        if cfg["solver"] == "march":
            approx = volterra_march(example2_rhat_grid(grid, params, cfg["rhat_form"]), setup, grid, params)
        else:
            data, _ = example2_data(grid)
            approx, _, _ = fixed_point_solve(data, setup, example2_forcing(grid, params), grid, params,
                                             legendre_rule(cfg["quad_order"]))
        exact = SpectralField(grid, example2_exact(grid, params))
        cells = {}
        for z0 in cfg["z0s"]:
            zi = float(grid.z[int(np.argmin(np.abs(grid.z - z0)))])
            nodes[z0] = zi
            cells[z0] = error_E(exact, approx, zi)
        rows.append((dl, cells))
        modes[dl] = grid.n_rho
    return ErrorReport(rows, f"{cfg['solver']}-{cfg['rhat_form']}", config_hash("table3", cfg),
                       list(cfg["z0s"]), cfg, {"modes": modes, "nodes": nodes})


# ---- other outputs -----------------------------------------------------

def emit_figure_data(field, z0, path):
    """CSV of (rho1, rho2, |u(rho, z0)|) per mode in grid order, 17 significant digits."""
    v = np.abs(field.at(z0))
    lines = ["rho1,rho2,abs_uhat"]
    for (r1, r2), a in zip(field.grid.rho, v):
        lines.append(f"{r1:.16E},{r2:.16E},{a:.16E}")
    _write(path, "\n".join(lines) + "\n")


def run_figure(config=None):
    """Exact and regularized fields at one (delta, z0)."""
    cfg = make_config("figure", config)
    dl, z0 = cfg["deltas"][0], cfg["z0s"][0]
    params, reg, grid, data, exact = example1_setup(dl, cfg, [z0])
    rule = legendre_rule(cfg["quad_order"])
    if cfg["method"] == "truncation":
        approx = regularized_uhat(data, grid, params, reg, rule, a1_only=True)
    else:
        approx = xiong_uhat(data, grid, params, QuasiBoundaryParams.from_reg(reg), rule)
    return cfg, exact, approx


def run_bounds(config=None):
    """Stability function and error bounds for each (delta, z0). Rows as dicts in a fixed order."""
    cfg = make_config("bounds", config)
    params = WaveParams(cfg["k"], cfg["d"])
    rows = []
    for dl in sorted(cfg["deltas"], reverse=True):
        reg = example1_reg(dl, cfg["M0"], params)
        rep = bound_report(cfg["z0s"], reg, params, cfg["M0"])
        lreg = eps_logrule(dl, params)
        for i, z in enumerate(cfg["z0s"]):
            rows.append({"delta": dl, "z": z, "eps": reg.eps, "kappa": reg.kappa,
                         "m1": rep.m1_of_z[i], "thm11": rep.thm11_bound[i],
                         "kappa_log": lreg.kappa,
                         "thm13_log": thm13_error_bound(z, lreg, params, cfg["M0"], lreg.P),
                         "theta_area": rep.theta_area})
    return cfg, rows


def run_blowup(config=None):
    cfg = make_config("blowup", config)
    params = WaveParams(cfg["k"], cfg["d"])
    rows = demo_blowup(cfg["n_list"], cfg["blowup_grid"], params, legendre_rule(cfg["quad_order"]))
    return cfg, rows


def write_manifest(path, command, cfg, outputs, notes=()):
    text = config_echo(command, cfg)
    text += f"config_hash = {config_hash(command, cfg)}\n"
    text += f"kernel_backend = {kernels.BACKEND}\n"
    for o in outputs:
        text += f"output = {o}\n"
    for n in notes:
        text += f"note = {n}\n"
    _write(path, text)


def write_rows_csv(path, rows, columns, fmt=_fmt8):
    lines = [",".join(columns)]
    for r in rows:
        lines.append(",".join(str(r[c]) if isinstance(r[c], (int, bool, np.bool_, str)) else fmt(r[c])
                              for c in columns))
    _write(path, "\n".join(lines) + "\n")


def ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise OutputError(f"cannot create output directory {path}: {e}") from e
