"""INI configuration for the command line.

Three sections, all keys optional except where noted::

    [model]
    alpha = 2.0
    hurst = logistic            ; kind, or a preset name via hurst_preset;
                                ; constant 0.5 when neither is given
    hurst.lower = 0.5
    hurst.upper = 0.7
    hurst.center = 0.5
    hurst.steepness = 8
    n = 4096
    domain = 0, 1
    truncation_radius = 8
    refinement = 16
    normalization = unit
    rule = cell
    near_field = 16             ; or "none" for the plain Riemann sum
    seed = 0

    [estimator]
    t0 = 0.5
    gamma = 0.8
    beta = -0.3
    beta1 = -0.4
    beta2 = -0.2
    L = 2                       ; binomial filter order, or
    filter = -1, 3, -3, 1       ; explicit coefficients (L then required)
    zero_guard = 1e-300

    [experiment]
    n_values = 512, 1024, 2048
    replicates = 50
    seed = 0
    output_path = results.csv
    workers = 1
    timing = true

Every error names the section and key it comes from.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError, MfstableError
from .estim import EstimatorConfig
from .filters import FilterSeq, binomial_filter
from .sim import _HURST_KINDS, _HURST_PARAMS, HURST_PRESETS, HurstFunction, ModelSpec

__all__ = ["ExperimentConfig", "load_config", "parse_config", "model_from_section",
           "estimator_from_section"]

_MODEL_KEYS = {"alpha", "hurst", "hurst_preset", "n", "domain", "truncation_radius",
               "refinement", "normalization", "rule", "near_field", "seed"}
_EST_KEYS = {"t0", "gamma", "beta", "beta1", "beta2", "l", "filter", "zero_guard"}
_EXP_KEYS = {"n_values", "replicates", "seed", "output_path", "workers", "timing"}


@dataclass
class ExperimentConfig:
    model: ModelSpec
    estimator: EstimatorConfig
    n_values: list = field(default_factory=lambda: [512, 1024, 2048])
    replicates: int = 10
    seed: int = 0
    output_path: str = "experiment.csv"
    workers: int = 1
    timing: bool = True

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError("[experiment] replicates: must be at least 1")
        if self.workers < 1:
            raise ConfigError("[experiment] workers: must be at least 1")
        if not self.n_values:
            raise ConfigError("[experiment] n_values: empty list")
        odd = [n for n in self.n_values if n % 2]
        if odd:
            raise ConfigError(f"[experiment] n_values: every n must be even, got {odd}")


def _get(section, key, conv, what, default=None):
    if key not in section:
        return default
    raw = section[key]
    try:
        return conv(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(
            f"[{section.name}] {key}: cannot read {raw!r} as {what}"
        ) from exc


def _floats(raw: str) -> list:
    return [float(x) for x in raw.replace(",", " ").split()]


def _ints(raw: str) -> list:
    out = []
    for x in raw.replace(",", " ").split():
        v = float(x)
        if v != int(v):
            raise ValueError(x)
        out.append(int(v))
    return out


def _int(raw: str) -> int:
    v = float(raw)
    if v != int(v):
        raise ValueError(raw)
    return int(v)


def _int_or_none(raw: str):
    return None if raw.strip().lower() == "none" else _int(raw)


def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _check_keys(section, allowed):
    for key in section:
        base = key.split(".", 1)[0] if key.startswith("hurst.") else key
        if base != "hurst" and key not in allowed:
            raise ConfigError(f"[{section.name}] {key}: unknown key")
        if key.startswith("hurst.") and "hurst" not in allowed:
            raise ConfigError(f"[{section.name}] {key}: unknown key")


def _hurst_from_section(sec, domain) -> HurstFunction:
    preset = sec.get("hurst_preset")
    kind = sec.get("hurst")
    if preset is not None and kind is not None:
        raise ConfigError(f"[{sec.name}] hurst_preset: give either hurst or hurst_preset, not both")
    if preset is not None:
        if preset not in HURST_PRESETS:
            raise ConfigError(
                f"[{sec.name}] hurst_preset: unknown preset {preset!r}, "
                f"choose from {sorted(HURST_PRESETS)}"
            )
        return HURST_PRESETS[preset](domain)
    if kind is None:
        if not any(k.startswith("hurst.") for k in sec):
            return HURST_PRESETS["bm"](domain)
        kind = "constant"
    if kind not in _HURST_KINDS:
        raise ConfigError(f"[{sec.name}] hurst: unknown kind {kind!r}, choose from {_HURST_KINDS}")
    params = {}
    for name in _HURST_PARAMS[kind]:
        key = f"hurst.{name}"
        if key not in sec:
            if kind == "sinusoidal" and name == "phase":
                params[name] = 0.0
                continue
            if kind == "constant" and "hurst.h" in sec:
                key = "hurst.h"
            else:
                raise ConfigError(f"[{sec.name}] {key}: missing parameter for H-function {kind!r}")
        params[name] = _get(sec, key, float, "a number")
    extra = [k for k in sec if k.startswith("hurst.")
             and k[6:] not in _HURST_PARAMS[kind] and not (kind == "constant" and k == "hurst.h")]
    if extra:
        raise ConfigError(f"[{sec.name}] {extra[0]}: not a parameter of H-function {kind!r}")
    try:
        return HurstFunction(kind, params, tuple(domain))
    except ConfigError as exc:
        raise ConfigError(f"[{sec.name}] hurst: {exc}") from exc


def model_from_section(sec, overrides: dict | None = None) -> ModelSpec:
    """Build a :class:`ModelSpec` from the ``[model]`` section.

    ``overrides`` maps field names to values that replace the file's.
    """
    _check_keys(sec, _MODEL_KEYS)
    ov = dict(overrides or {})
    domain = ov.pop("domain", None) or _get(sec, "domain", _floats, "two numbers", [0.0, 1.0])
    if len(domain) != 2:
        raise ConfigError(f"[{sec.name}] domain: expected two numbers, got {domain}")
    hurst = ov.pop("hurst", None) or _hurst_from_section(sec, domain)
    kw = {
        "alpha": _get(sec, "alpha", float, "a number", 2.0),
        "n": _get(sec, "n", _int, "an integer", 1024),
        "truncation_radius": _get(sec, "truncation_radius", float, "a number", 8.0),
        "refinement": _get(sec, "refinement", _int, "an integer", 16),
        "seed": _get(sec, "seed", _int, "an integer", 0),
        "normalization": sec.get("normalization", "unit"),
        "rule": sec.get("rule", "cell"),
        "near_field": _get(sec, "near_field", _int_or_none, "an integer or 'none'", 16),
    }
    kw.update({k: v for k, v in ov.items() if v is not None or k == "near_field"})
    try:
        return ModelSpec(hurst=hurst, domain=tuple(domain), **kw)
    except ConfigError as exc:
        first = str(exc).split()[0]
        field_name = first if first in kw else "domain"
        raise ConfigError(f"[{sec.name}] {field_name}: {exc}") from exc


def estimator_from_section(sec, overrides: dict | None = None) -> EstimatorConfig:
    _check_keys(sec, _EST_KEYS)
    ov = {k: v for k, v in (overrides or {}).items() if v is not None}
    kw = {}
    for key in ("t0", "gamma", "beta", "beta1", "beta2", "zero_guard"):
        val = _get(sec, key, float, "a number")
        if val is not None:
            kw[key] = val
    L = ov.pop("L", None)
    if L is None:
        L = _get(sec, "l", _int, "an integer")
    coeffs = ov.pop("filter", None)
    if coeffs is None:
        coeffs = _get(sec, "filter", _floats, "a list of numbers")
    try:
        if coeffs is not None:
            if L is None:
                raise ConfigError(f"[{sec.name}] L: required with an explicit filter")
            kw["filter"] = FilterSeq.from_coefficients(coeffs, L)
        elif L is not None:
            kw["filter"] = binomial_filter(L)
    except MfstableError as exc:
        raise ConfigError(f"[{sec.name}] filter: {exc}") from exc
    kw.update(ov)
    try:
        return EstimatorConfig(**kw)
    except ConfigError as exc:
        first = str(exc).split()[0]
        field_name = first if first in ("gamma", "beta", "zero_guard") else "beta1"
        raise ConfigError(f"[{sec.name}] {field_name}: {exc}") from exc


def parse_config(text: str, source: str = "<config>") -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    for name in cp.sections():
        if name not in ("model", "estimator", "experiment"):
            raise ConfigError(f"{source}: unknown section [{name}]")
    for name in ("model", "estimator", "experiment"):
        if not cp.has_section(name):
            cp.add_section(name)
    return cp


def load_config(path=None) -> configparser.ConfigParser:
    if path is None:
        return parse_config("")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text, str(path))


def experiment_from_config(cp, overrides: dict | None = None) -> ExperimentConfig:
    ov = {k: v for k, v in (overrides or {}).items() if v is not None}
    sec = cp["experiment"]
    _check_keys(sec, _EXP_KEYS)
    model = model_from_section(cp["model"], ov.pop("model", None))
    est = estimator_from_section(cp["estimator"], ov.pop("estimator", None))
    kw = {
        "n_values": _get(sec, "n_values", _ints, "a list of integers", [512, 1024, 2048]),
        "replicates": _get(sec, "replicates", _int, "an integer", 10),
        "seed": _get(sec, "seed", _int, "an integer", model.seed),
        "output_path": sec.get("output_path", "experiment.csv"),
        "workers": _get(sec, "workers", _int, "an integer", 1),
        "timing": _get(sec, "timing", _bool, "a boolean", True),
    }
    kw.update(ov)
    model = replace(model, seed=kw["seed"])
    return ExperimentConfig(model=model, estimator=est, **kw)
