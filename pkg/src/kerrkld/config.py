"""Run configuration: defaults, flat key=value files, validation."""

import math
from dataclasses import dataclass, fields
from typing import Optional, get_args

from .errors import ConfigError
from .qmap import INDICATORS, ModelParams
from .spectra import NORMALIZATIONS, TAPERS


@dataclass
class RunConfig:
    # model
    chi: float = 1.0
    period: float = math.pi
    epsilon: float = 0.1
    delta_epsilon: float = 1e-3
    dim: int = 128
    pulses: int = 10_000
    initial: str = "vacuum"
    indicator: str = "k1"
    q: Optional[float] = None
    dense: bool = False
    # spectrum
    input: Optional[str] = None
    window_start: Optional[int] = None
    window_end: Optional[int] = None
    remove_mean: bool = True
    normalization: str = "max_one"
    taper: str = "rectangular"
    # classical scans
    eps_min: float = 0.25
    eps_max: float = 0.75
    n_eps: int = 800
    transient: int = 500
    samples: int = 300
    iterations: int = 20_000
    alpha0: str = "0"
    # output
    output: Optional[str] = None
    json: bool = False


def _base_type(typ):
    args = [a for a in get_args(typ) if a is not type(None)]
    return (args[0] if args else typ), bool(args)


_FIELD_TYPES = {f.name: _base_type(f.type) for f in fields(RunConfig)}
KEYS = tuple(_FIELD_TYPES)

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_initial(text: str) -> Optional[complex]:
    """``vacuum`` -> None; ``coherent:<complex>`` or a bare complex -> alpha."""
    t = str(text).strip()
    if t.lower() == "vacuum":
        return None
    if t.lower().startswith("coherent:"):
        t = t.split(":", 1)[1]
    return complex(t.replace(" ", ""))


def convert(key, raw):
    """Convert a string value for ``key`` to its field type."""
    if key not in _FIELD_TYPES:
        raise ConfigError(key, "unknown configuration key")
    typ, optional = _FIELD_TYPES[key]
    if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "none")):
        if optional:
            return None
        raise ConfigError(key, "a value is required")
    try:
        if typ is bool:
            return parse_bool(raw)
        if typ is int:
            val = float(raw)
            if val != int(val):
                raise ValueError(f"not an integer: {raw!r}")
            return int(val)
        if typ is float:
            return float(raw)
        return str(raw).strip()
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}", f"expected key=value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key] = convert(key, value)
    return out


def resolve(*layers: dict) -> RunConfig:
    """Apply override layers in order on top of the defaults."""
    cfg = RunConfig()
    for layer in layers:
        for key, value in layer.items():
            if key not in _FIELD_TYPES:
                raise ConfigError(key, "unknown configuration key")
            setattr(cfg, key, value)
    return cfg


def model_params(cfg: RunConfig) -> ModelParams:
    try:
        initial = parse_initial(cfg.initial)
    except ValueError:
        raise ConfigError("initial", f"expected 'vacuum' or 'coherent:<alpha>', got {cfg.initial!r}")
    params = ModelParams(
        chi=cfg.chi,
        period=cfg.period,
        epsilon=cfg.epsilon,
        delta_epsilon=cfg.delta_epsilon,
        dim=cfg.dim,
        n_pulses=cfg.pulses,
        initial=initial,
    )
    try:
        params.validate()
    except ConfigError as exc:
        if exc.field == "n_pulses":
            raise ConfigError("pulses", str(exc).split(": ", 1)[1]) from None
        raise
    return params


def validate_series(cfg: RunConfig) -> ModelParams:
    params = model_params(cfg)
    if cfg.indicator not in INDICATORS:
        raise ConfigError("indicator", f"must be one of {INDICATORS}, got {cfg.indicator!r}")
    if cfg.indicator == "kq" and (cfg.q is None or not 0 < cfg.q < 1):
        raise ConfigError("q", "indicator kq needs 0 < q < 1")
    return params


def validate_spectrum(cfg: RunConfig):
    if cfg.normalization not in NORMALIZATIONS:
        raise ConfigError("normalization", f"must be one of {NORMALIZATIONS}")
    if cfg.taper not in TAPERS:
        raise ConfigError("taper", f"must be one of {TAPERS}")
    if cfg.window_start is not None and cfg.window_start < 0:
        raise ConfigError("window_start", "must be >= 0")
    if cfg.window_start is not None and cfg.window_end is not None:
        if cfg.window_end - cfg.window_start < 1:
            raise ConfigError("window_end", "window must hold at least 2 samples")
    if cfg.input is None:
        params = validate_series(cfg)
        if cfg.window_end is not None and cfg.window_end > params.n_pulses:
            raise ConfigError("window_end", f"exceeds pulses={params.n_pulses}")
        if cfg.window_start is not None and cfg.window_start > params.n_pulses - 1:
            raise ConfigError("window_start", f"exceeds pulses={params.n_pulses}")
        return params
    return None


def parse_alpha0(cfg: RunConfig) -> complex:
    try:
        return complex(cfg.alpha0.replace(" ", ""))
    except ValueError:
        raise ConfigError("alpha0", f"not a complex number: {cfg.alpha0!r}") from None


def validate_scan(cfg: RunConfig, lyapunov=False):
    if not cfg.chi > 0:
        raise ConfigError("chi", "must be > 0")
    if not cfg.period > 0:
        raise ConfigError("period", "must be > 0")
    if cfg.n_eps < 1:
        raise ConfigError("n_eps", "must be >= 1")
    if cfg.n_eps > 1 and not cfg.eps_min < cfg.eps_max:
        raise ConfigError("eps_max", "must exceed eps_min")
    if cfg.transient < 0:
        raise ConfigError("transient", "must be >= 0")
    if cfg.samples < 1:
        raise ConfigError("samples", "must be >= 1")
    if lyapunov and cfg.iterations < 1000:
        raise ConfigError("iterations", "must be >= 1000")
    return parse_alpha0(cfg)
