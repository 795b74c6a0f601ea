"""Central defaults and evaluation settings."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .numerics import TAIL_MODES

N_MAX = 2000
TOL = 1e-4
QUAD_TOL = 1e-8
SIGN_SEARCH_BOUND = 8


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation settings for every truncated series in the package.

    ``eta`` raises each edge exponent ``k`` to ``k * (1 + eta)``.  ``tail_mode``
    selects how partial sums are extrapolated (see :func:`gmzv.numerics.extrapolate`).
    """

    n_max: int = N_MAX
    eta: float = 0.0
    tail_mode: str = "fit"
    sign_bound: int = SIGN_SEARCH_BOUND

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.tail_mode not in TAIL_MODES:
            raise ValueError(f"tail_mode must be one of {TAIL_MODES}")

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT = SeriesConfig()
