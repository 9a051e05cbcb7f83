"""Flat ``key = value`` experiment configuration files.

Grammar: one ``key = value`` pair per line; ``#`` starts a comment (whole
line or trailing); blank lines are ignored; booleans are ``true``/``false``.
Unknown keys and repeated keys are errors. Every key is optional and the
defaults reproduce the sine-regression experiment.

Keys::

    problem            sine | toy
    toy_potential      quadratic | zero          (toy only)
    inner_sampler      ula | exact               (exact: 1-D toy only)
    dt T alpha sigma2_half ds S_first S_other init_mean init_std   floats
    N M seed                                     integers (M defaults to N)
    out_dir            output directory
    emit_svg baseline record_wall_clock          booleans
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .types import ConfigError, EfpConfig

PROBLEMS = ("sine", "toy")
TOY_POTENTIALS = ("quadratic", "zero")
INNER_SAMPLERS = ("ula", "exact")

_FLOAT_KEYS = ("dt", "T", "alpha", "sigma2_half", "ds", "S_first", "S_other", "init_mean", "init_std")
_INT_KEYS = ("N", "M", "seed")
_BOOL_KEYS = ("emit_svg", "baseline", "record_wall_clock")
_STR_KEYS = ("problem", "toy_potential", "inner_sampler", "out_dir")


class ConfigParseError(ConfigError):
    def __init__(self, path, line_no, message):
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    efp: EfpConfig = field(default_factory=EfpConfig)
    problem: str = "sine"
    toy_potential: str = "quadratic"
    inner_sampler: str = "ula"
    out_dir: str = "out"
    emit_svg: bool = False
    baseline: bool = False
    record_wall_clock: bool = False

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        if self.toy_potential not in TOY_POTENTIALS:
            raise ConfigError(f"toy_potential must be one of {TOY_POTENTIALS}, got {self.toy_potential!r}")
        if self.inner_sampler not in INNER_SAMPLERS:
            raise ConfigError(f"inner_sampler must be one of {INNER_SAMPLERS}, got {self.inner_sampler!r}")
        if self.inner_sampler == "exact" and self.problem != "toy":
            raise ConfigError("inner_sampler = exact needs a 1-D problem (problem = toy)")

    def replace(self, **changes) -> "ExperimentConfig":
        efp_changes = {k: changes.pop(k) for k in list(changes) if k in _FLOAT_KEYS + _INT_KEYS}
        efp = dataclasses.replace(self.efp, **efp_changes) if efp_changes else self.efp
        return dataclasses.replace(self, efp=efp, **changes)


def _parse_bool(text):
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _coerce(key, text):
    if key in _FLOAT_KEYS:
        return float(text)
    if key in _INT_KEYS:
        return int(text)
    if key in _BOOL_KEYS:
        return _parse_bool(text)
    return text


def parse_config(text: str, path: str = "<config>") -> ExperimentConfig:
    values = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(path, line_no, f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FLOAT_KEYS + _INT_KEYS + _BOOL_KEYS + _STR_KEYS:
            raise ConfigParseError(path, line_no, f"unknown key {key!r}")
        if key in values:
            raise ConfigParseError(path, line_no, f"duplicate key {key!r}")
        if not value:
            raise ConfigParseError(path, line_no, f"missing value for {key!r}")
        try:
            values[key] = _coerce(key, value)
        except ValueError as err:
            raise ConfigParseError(path, line_no, f"bad value for {key!r}: {err}") from None
    efp = EfpConfig(**{k: values.pop(k) for k in list(values) if k in _FLOAT_KEYS + _INT_KEYS})
    return ExperimentConfig(efp=efp, **values)


def load_config(path) -> ExperimentConfig:
    """Read and validate a config file. Raises :class:`ConfigError` or ``OSError``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, str(path))
