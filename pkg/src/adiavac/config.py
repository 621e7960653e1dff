"""Experiment configuration: TOML in, validated plan out.

A config file names one background model and any subset of suite
sections; a section is required only when its suite is requested. All
validation errors raise ConfigInvalid with the offending key path, so a
bad file is rejected before any numerics run.
"""

from __future__ import annotations

from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

from .background import ScaleFactorModel
from .errors import ConfigInvalid

_BACKGROUND_KINDS = ("constant", "power_law", "exponential", "taylor")


def _get(section: dict, where: str, key: str, kind, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigInvalid(f"[{where}] missing required key {key!r}")
        return default
    val = section[key]
    if kind is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise ConfigInvalid(f"[{where}] {key} must be an integer, got {val!r}")
    if not isinstance(val, kind):
        raise ConfigInvalid(f"[{where}] {key} must be {kind.__name__}, got {val!r}")
    return val


def _int_list(section: dict, where: str, key: str, required=False, default=()):
    raw = _get(section, where, key, list, required=required)
    if raw is None:
        return tuple(default)
    out = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigInvalid(f"[{where}] {key} must list integers, got {v!r}")
        out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class FrequencySuiteConfig:
    orders: tuple[int, ...]
    k_values: tuple[int, ...]
    t0: float
    positivity_action: str


@dataclass(frozen=True)
class SymbolOrderSuiteConfig:
    orders: tuple[int, ...]
    omega_min: float
    omega_max: float
    points: int
    t0: float
    slope_margin: float


@dataclass(frozen=True)
class ModeSuiteConfig:
    k_values: tuple[int, ...]
    order: int
    t0: float
    t1: float
    tol: float
    samples: int
    drift_tol: float


@dataclass(frozen=True)
class BogoliubovSuiteConfig:
    order_pairs: tuple[tuple[int, int], ...]
    k_min: int
    k_max: int
    k_count: int
    t0: float


@dataclass(frozen=True)
class ParticleNumberSuiteConfig:
    order: int
    t0: float
    t1: float
    k_max: int
    tol: float


@dataclass(frozen=True)
class DetectorSuiteConfig:
    orders: tuple[int, ...]
    window_kind: str
    window_start: float
    window_end: float
    window_rel_width: float
    energy_min: float
    energy_max: float
    energy_count: int
    k_cutoff: int
    t0: float
    tol: float
    fit_min: float
    fit_max: float


@dataclass(frozen=True)
class InvariantSuiteConfig:
    samples: int


@dataclass(frozen=True)
class ExperimentConfig:
    label: str
    seed: int
    outdir: str
    background: ScaleFactorModel
    mass: float
    frequencies: FrequencySuiteConfig | None
    symbol_orders: SymbolOrderSuiteConfig | None
    modes: ModeSuiteConfig | None
    bogoliubov: BogoliubovSuiteConfig | None
    particle_numbers: ParticleNumberSuiteConfig | None
    detector: DetectorSuiteConfig | None
    invariants: InvariantSuiteConfig | None
    raw: dict  # parsed TOML, echoed verbatim into the run manifest

    def section(self, suite: str):
        cfg = getattr(self, suite, None)
        if cfg is None:
            raise ConfigInvalid(f"config has no [{suite}] section but suite was requested")
        return cfg


def _background(doc: dict) -> tuple[ScaleFactorModel, float]:
    if "background" not in doc:
        raise ConfigInvalid("missing required [background] section")
    sec = doc["background"]
    kind = _get(sec, "background", "kind", str, required=True)
    if kind not in _BACKGROUND_KINDS:
        raise ConfigInvalid(
            f"[background] kind must be one of {_BACKGROUND_KINDS}, got {kind!r}"
        )
    mass = _get(sec, "background", "mass", float, required=True)
    if mass < 0.0:
        raise ConfigInvalid(f"[background] mass must be non-negative, got {mass}")
    if kind == "constant":
        a0 = _get(sec, "background", "a0", float, default=1.0)
        if a0 <= 0.0:
            raise ConfigInvalid(f"[background] a0 must be positive, got {a0}")
        model = ScaleFactorModel.constant(a0)
    elif kind == "exponential":
        H = _get(sec, "background", "hubble", float, required=True)
        model = ScaleFactorModel.exponential(H)
    elif kind == "power_law":
        p = _get(sec, "background", "exponent", float, required=True)
        t_ref = _get(sec, "background", "t_ref", float, default=0.0)
        model = ScaleFactorModel.power_law(p, t_ref)
    else:
        raw = _get(sec, "background", "coeffs", list, required=True)
        coeffs = []
        for v in raw:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigInvalid(f"[background] coeffs must list numbers, got {v!r}")
            coeffs.append(float(v))
        if not coeffs or coeffs[0] <= 0.0:
            raise ConfigInvalid("[background] coeffs must start with a positive value")
        t_ref = _get(sec, "background", "t_ref", float, default=0.0)
        model = ScaleFactorModel.taylor(tuple(coeffs), t_ref)
    return model, mass


def _orders(sec: dict, where: str, key: str = "orders") -> tuple[int, ...]:
    orders = _int_list(sec, where, key, required=True)
    if not orders or any(n < 0 for n in orders):
        raise ConfigInvalid(f"[{where}] {key} must be non-empty, non-negative")
    return orders


def _positive(val: float, where: str, key: str) -> float:
    if not val > 0.0:
        raise ConfigInvalid(f"[{where}] {key} must be positive, got {val}")
    return val


def _parse_frequencies(sec: dict) -> FrequencySuiteConfig:
    action = _get(sec, "frequencies", "positivity_action", str, default="strict")
    if action not in ("strict", "clamped"):
        raise ConfigInvalid(
            f"[frequencies] positivity_action must be 'strict' or 'clamped', got {action!r}"
        )
    ks = _int_list(sec, "frequencies", "k_values", required=True)
    if not ks or any(k < 0 for k in ks):
        raise ConfigInvalid("[frequencies] k_values must be non-empty, non-negative")
    return FrequencySuiteConfig(
        orders=_orders(sec, "frequencies"),
        k_values=ks,
        t0=_get(sec, "frequencies", "t0", float, default=0.0),
        positivity_action=action,
    )


def _parse_symbol_orders(sec: dict) -> SymbolOrderSuiteConfig:
    omega_min = _positive(
        _get(sec, "symbol_orders", "omega_min", float, required=True),
        "symbol_orders", "omega_min",
    )
    omega_max = _get(sec, "symbol_orders", "omega_max", float, required=True)
    if omega_max <= omega_min:
        raise ConfigInvalid("[symbol_orders] omega_max must exceed omega_min")
    points = _get(sec, "symbol_orders", "points", int, default=9)
    if points < 2:
        raise ConfigInvalid("[symbol_orders] points must be at least 2")
    orders = _orders(sec, "symbol_orders")
    if any(n < 1 for n in orders):
        raise ConfigInvalid("[symbol_orders] orders must be at least 1")
    return SymbolOrderSuiteConfig(
        orders=orders,
        omega_min=omega_min,
        omega_max=omega_max,
        points=points,
        t0=_get(sec, "symbol_orders", "t0", float, default=0.0),
        slope_margin=_get(sec, "symbol_orders", "slope_margin", float, default=0.1),
    )


def _parse_modes(sec: dict) -> ModeSuiteConfig:
    ks = _int_list(sec, "modes", "k_values", required=True)
    if not ks or any(k < 0 for k in ks):
        raise ConfigInvalid("[modes] k_values must be non-empty, non-negative")
    t0 = _get(sec, "modes", "t0", float, default=0.0)
    t1 = _get(sec, "modes", "t1", float, required=True)
    if t1 == t0:
        raise ConfigInvalid("[modes] t1 must differ from t0")
    samples = _get(sec, "modes", "samples", int, default=129)
    if samples < 2:
        raise ConfigInvalid("[modes] samples must be at least 2")
    order = _get(sec, "modes", "order", int, default=0)
    if order < 0:
        raise ConfigInvalid("[modes] order must be non-negative")
    return ModeSuiteConfig(
        k_values=ks,
        order=order,
        t0=t0,
        t1=t1,
        tol=_positive(_get(sec, "modes", "tol", float, default=1e-10), "modes", "tol"),
        samples=samples,
        drift_tol=_positive(
            _get(sec, "modes", "drift_tol", float, default=1e-8), "modes", "drift_tol"
        ),
    )


def _parse_bogoliubov(sec: dict) -> BogoliubovSuiteConfig:
    raw = _get(sec, "bogoliubov", "order_pairs", list, required=True)
    pairs = []
    for item in raw:
        ok = (
            isinstance(item, list) and len(item) == 2
            and all(isinstance(v, int) and not isinstance(v, bool) for v in item)
        )
        if not ok or item[0] < 0 or item[1] < 0:
            raise ConfigInvalid(
                f"[bogoliubov] order_pairs entries must be pairs of orders, got {item!r}"
            )
        pairs.append((item[0], item[1]))
    if not pairs:
        raise ConfigInvalid("[bogoliubov] order_pairs must be non-empty")
    k_min = _get(sec, "bogoliubov", "k_min", int, required=True)
    k_max = _get(sec, "bogoliubov", "k_max", int, required=True)
    if not (0 <= k_min < k_max):
        raise ConfigInvalid("[bogoliubov] need 0 <= k_min < k_max")
    k_count = _get(sec, "bogoliubov", "k_count", int, default=12)
    if k_count < 4:
        raise ConfigInvalid("[bogoliubov] k_count must be at least 4")
    return BogoliubovSuiteConfig(
        order_pairs=tuple(pairs),
        k_min=k_min,
        k_max=k_max,
        k_count=k_count,
        t0=_get(sec, "bogoliubov", "t0", float, default=0.0),
    )


def _parse_particle_numbers(sec: dict) -> ParticleNumberSuiteConfig:
    t0 = _get(sec, "particle_numbers", "t0", float, default=0.0)
    t1 = _get(sec, "particle_numbers", "t1", float, required=True)
    if t1 == t0:
        raise ConfigInvalid("[particle_numbers] t1 must differ from t0")
    order = _get(sec, "particle_numbers", "order", int, required=True)
    if order < 0:
        raise ConfigInvalid("[particle_numbers] order must be non-negative")
    k_max = _get(sec, "particle_numbers", "k_max", int, required=True)
    if k_max < 1:
        raise ConfigInvalid("[particle_numbers] k_max must be at least 1")
    return ParticleNumberSuiteConfig(
        order=order,
        t0=t0,
        t1=t1,
        k_max=k_max,
        tol=_positive(
            _get(sec, "particle_numbers", "tol", float, default=1e-10),
            "particle_numbers", "tol",
        ),
    )


def _parse_detector(sec: dict) -> DetectorSuiteConfig:
    kind = _get(sec, "detector", "window_kind", str, default="smooth_bump")
    if kind not in ("smooth_bump", "gaussian_truncated"):
        raise ConfigInvalid(
            f"[detector] window_kind must be 'smooth_bump' or 'gaussian_truncated', got {kind!r}"
        )
    w_start = _get(sec, "detector", "window_start", float, required=True)
    w_end = _get(sec, "detector", "window_end", float, required=True)
    if w_end <= w_start:
        raise ConfigInvalid("[detector] window_end must exceed window_start")
    rel_width = _get(sec, "detector", "window_rel_width", float, default=0.25)
    if not (0.0 < rel_width <= 1.0):
        raise ConfigInvalid("[detector] window_rel_width must lie in (0, 1]")
    e_min = _positive(
        _get(sec, "detector", "energy_min", float, required=True), "detector", "energy_min"
    )
    e_max = _get(sec, "detector", "energy_max", float, required=True)
    if e_max <= e_min:
        raise ConfigInvalid("[detector] energy_max must exceed energy_min")
    e_count = _get(sec, "detector", "energy_count", int, default=24)
    if e_count < 8:
        raise ConfigInvalid("[detector] energy_count must be at least 8")
    k_cutoff = _get(sec, "detector", "k_cutoff", int, required=True)
    if k_cutoff < 1:
        raise ConfigInvalid("[detector] k_cutoff must be at least 1")
    fit_min = _get(sec, "detector", "fit_min", float, default=e_min)
    fit_max = _get(sec, "detector", "fit_max", float, default=e_max)
    if fit_max <= fit_min:
        raise ConfigInvalid("[detector] fit_max must exceed fit_min")
    return DetectorSuiteConfig(
        orders=_orders(sec, "detector"),
        window_kind=kind,
        window_start=w_start,
        window_end=w_end,
        window_rel_width=rel_width,
        energy_min=e_min,
        energy_max=e_max,
        energy_count=e_count,
        k_cutoff=k_cutoff,
        t0=_get(sec, "detector", "t0", float, default=0.0),
        tol=_positive(_get(sec, "detector", "tol", float, default=1e-8), "detector", "tol"),
        fit_min=fit_min,
        fit_max=fit_max,
    )


def _parse_invariants(sec: dict) -> InvariantSuiteConfig:
    samples = _get(sec, "invariants", "samples", int, default=200)
    if samples < 10:
        raise ConfigInvalid("[invariants] samples must be at least 10")
    return InvariantSuiteConfig(samples=samples)


_SECTION_PARSERS = {
    "frequencies": _parse_frequencies,
    "symbol_orders": _parse_symbol_orders,
    "modes": _parse_modes,
    "bogoliubov": _parse_bogoliubov,
    "particle_numbers": _parse_particle_numbers,
    "detector": _parse_detector,
    "invariants": _parse_invariants,
}

KNOWN_SUITES = tuple(_SECTION_PARSERS)


def parse_config(doc: dict) -> ExperimentConfig:
    known = {"run", "background", *_SECTION_PARSERS}
    for key in doc:
        if key not in known:
            raise ConfigInvalid(f"unknown section [{key}]")
    run = doc.get("run", {})
    label = _get(run, "run", "label", str, default="run")
    seed = _get(run, "run", "seed", int, default=0)
    outdir = _get(run, "run", "outdir", str, default="out")
    model, mass = _background(doc)
    sections = {}
    for name, parser in _SECTION_PARSERS.items():
        sections[name] = parser(doc[name]) if name in doc else None
    return ExperimentConfig(
        label=label,
        seed=seed,
        outdir=outdir,
        background=model,
        mass=mass,
        raw=doc,
        **sections,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigInvalid(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigInvalid(f"config is not valid TOML: {exc}")
    return parse_config(doc)
