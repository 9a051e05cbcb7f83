"""Domain types shared by every module: clouds, datasets, configs, traces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Slack for floor/ceil of ratios such as T/dt that are integers in exact
# arithmetic but not in binary floating point (120 / 0.2 = 600.0000000000001).
_RATIO_EPS = 1e-9


class ConfigError(ValueError):
    """A configuration value violates a documented invariant."""


class DivergenceError(FloatingPointError):
    """A Langevin update produced a non-finite coordinate."""

    def __init__(self, particle, step, epoch=None, phase="inner"):
        self.particle = int(particle)
        self.step = int(step)
        self.epoch = epoch
        self.phase = phase
        super().__init__(self._message())

    def _message(self):
        where = f"epoch {self.epoch}, " if self.epoch is not None else ""
        return (
            f"{self.phase} Langevin update diverged at {where}step {self.step}, "
            f"particle {self.particle}: non-finite coordinate (reduce ds or check sigma)"
        )

    def with_epoch(self, epoch):
        return DivergenceError(self.particle, self.step, epoch=epoch, phase=self.phase)


def floor_ratio(a: float, b: float) -> int:
    return int(math.floor(a / b + _RATIO_EPS))


def ceil_ratio(a: float, b: float) -> int:
    return int(math.ceil(a / b - _RATIO_EPS))


@dataclass(frozen=True, eq=False)
class ParticleCloud:
    """N particles in R^n, stored as a read-only ``(N, n)`` array.

    A cloud is the empirical measure ``(1/N) sum_i delta_{x_i}``. Updates
    always produce a new cloud.
    """

    positions: np.ndarray

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float, copy=True)
        if pos.ndim == 1:
            pos = pos[:, None]
        if pos.ndim != 2 or pos.shape[0] < 1:
            raise ValueError(f"cloud needs shape (N, n) with N >= 1, got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ValueError("cloud contains non-finite coordinates")
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return self.positions.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.positions
        return self.positions.astype(dtype)

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def replace(self, indices, new_positions) -> "ParticleCloud":
        pos = self.positions.copy()
        pos[indices] = new_positions
        return ParticleCloud(pos)


def as_positions(cloud) -> np.ndarray:
    """View a cloud (or array) as a 2-D ``(N, n)`` float array."""
    pos = np.asarray(cloud, dtype=float)
    if pos.ndim == 1:
        pos = pos[:, None]
    return pos


def gaussian_cloud(n: int, N: int, mean: float, std: float, rng: np.random.Generator) -> ParticleCloud:
    """N particles with i.i.d. Normal(mean, std^2) coordinates."""
    if N < 1:
        raise ConfigError(f"particle count must be >= 1, got N={N}")
    if not std > 0:
        raise ConfigError(f"init std must be > 0, got {std}")
    return ParticleCloud(mean + std * rng.standard_normal((N, n)))


@dataclass(frozen=True, eq=False)
class Dataset:
    """Training pairs ``(z_k, y_k)`` plus a validation set of the same form."""

    features: np.ndarray
    labels: np.ndarray
    validation_features: np.ndarray
    validation_labels: np.ndarray

    def __post_init__(self):
        for f_name, l_name in (("features", "labels"), ("validation_features", "validation_labels")):
            z = np.array(getattr(self, f_name), dtype=float)
            if z.ndim == 1:
                z = z[:, None]
            y = np.array(getattr(self, l_name), dtype=float).reshape(-1)
            if z.shape[0] != y.shape[0] or y.shape[0] < 1:
                raise ValueError(f"{f_name}/{l_name} must be non-empty with equal length")
            if not (np.all(np.isfinite(z)) and np.all(np.isfinite(y))):
                raise ValueError(f"{f_name}/{l_name} contain non-finite entries")
            z.flags.writeable = False
            y.flags.writeable = False
            object.__setattr__(self, f_name, z)
            object.__setattr__(self, l_name, y)
        if self.features.shape[1] != self.validation_features.shape[1]:
            raise ValueError("training and validation features differ in dimension")

    @property
    def K(self) -> int:
        return self.labels.shape[0]

    @property
    def K_val(self) -> int:
        return self.validation_labels.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def validation(self) -> "Dataset":
        """The validation pairs as the training set of a new Dataset."""
        return Dataset(self.validation_features, self.validation_labels,
                       self.validation_features, self.validation_labels)


@dataclass(frozen=True)
class EfpConfig:
    """Parameters of one entropic fictitious play run.

    Defaults are the sine-regression setup: dt=0.2, T=120, alpha=1, N=M=1000,
    sigma^2/2=0.0005, ds=0.1, S_first=100, S_other=5, m0=N(0, 15^2).
    """

    dt: float = 0.2
    T: float = 120.0
    alpha: float = 1.0
    N: int = 1000
    sigma2_half: float = 0.0005
    ds: float = 0.1
    S_first: float = 100.0
    S_other: float = 5.0
    init_mean: float = 0.0
    init_std: float = 15.0
    seed: int = 0
    M: int | None = None

    def __post_init__(self):
        for name in ("dt", "T", "alpha", "sigma2_half", "ds", "S_first", "S_other", "init_std"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a finite positive number, got {value}")
        if not math.isfinite(self.init_mean):
            raise ConfigError(f"init_mean must be finite, got {self.init_mean}")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError(f"N must be an integer >= 1, got {self.N}")
        if self.M is not None and (int(self.M) != self.M or self.M < 1):
            raise ConfigError(f"M must be an integer >= 1, got {self.M}")
        if not 0 <= int(self.seed) < 2**64 or int(self.seed) != self.seed:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.alpha * self.dt > 1 + _RATIO_EPS:
            raise ConfigError(
                f"alpha*dt = {self.alpha * self.dt:g} > 1: the mixture weight must stay in (0, 1]"
            )
        if self.replacements < 1:
            raise ConfigError(
                f"floor(alpha*dt*N) = 0 (alpha={self.alpha}, dt={self.dt}, N={self.N}): "
                "the outer step would replace no particle"
            )
        if self.replacements > self.inner_count:
            raise ConfigError(
                f"floor(alpha*dt*N) = {self.replacements} exceeds the inner particle count M={self.inner_count}"
            )

    @property
    def sigma(self) -> float:
        return math.sqrt(2.0 * self.sigma2_half)

    @property
    def inner_count(self) -> int:
        return int(self.N if self.M is None else self.M)

    @property
    def replacements(self) -> int:
        return floor_ratio(self.alpha * self.dt * self.N, 1.0)

    @property
    def n_epochs(self) -> int:
        return ceil_ratio(self.T, self.dt)

    def inner_horizon(self, epoch: int) -> float:
        """Inner Langevin horizon for 0-based ``epoch``."""
        return self.S_first if epoch == 0 else self.S_other


@dataclass
class EpochRecord:
    epoch: int
    t: float
    objective_value: float
    validation_error: float
    free_energy: float
    entropy_rel_g: float
    aux: dict = field(default_factory=dict)
    wall_s: float = float("nan")
    entropy_flagged: bool = False


@dataclass
class RunTrace:
    """Per-epoch metric log of a run, plus the final cloud and checkpoints."""

    config: EfpConfig
    records: list = field(default_factory=list)
    final_cloud: ParticleCloud | None = None
    checkpoints: dict = field(default_factory=dict)
    label: str = "efp"

    def append(self, record: EpochRecord):
        if self.records and record.epoch <= self.records[-1].epoch:
            raise ValueError("epoch indices must be strictly increasing")
        self.records.append(record)

    def column(self, name: str) -> np.ndarray:
        if name.startswith("aux_"):
            key = name[4:]
            return np.array([r.aux.get(key, np.nan) for r in self.records], dtype=float)
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def __len__(self):
        return len(self.records)
