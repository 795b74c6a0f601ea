"""Index types and integer linear combinations of them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Generic, Hashable, Iterable, Iterator, Mapping, TypeVar

T = TypeVar("T", bound=Hashable)


@dataclass(frozen=True, order=True)
class MzvIndex:
    """Composition ``(t_1, ..., t_d)`` naming sum_{0<n_1<...<n_d} prod n_j^-t_j.

    The last exponent sits on the largest summation variable.
    """

    t: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(int(x) for x in self.t))
        if not self.t or any(x < 1 for x in self.t):
            raise ValueError(f"exponents must be positive: {self.t}")

    @property
    def depth(self) -> int:
        return len(self.t)

    @property
    def weight(self) -> int:
        return sum(self.t)

    @property
    def convergent(self) -> bool:
        return self.t[-1] >= 2

    def __str__(self) -> str:
        return "zeta(" + ",".join(map(str, self.t)) + ")"


def _phase(x) -> Fraction:
    return Fraction(x) % 1


@dataclass(frozen=True, order=True)
class PolylogTerm:
    """``Li_t(z)`` at roots of unity ``z_j = exp(2 pi i phases[j])``."""

    t: tuple[int, ...]
    phases: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(int(x) for x in self.t))
        object.__setattr__(self, "phases", tuple(_phase(p) for p in self.phases))
        if len(self.t) != len(self.phases):
            raise ValueError("exponents and phases differ in length")
        if not self.t or any(x < 1 for x in self.t):
            raise ValueError(f"exponents must be positive: {self.t}")

    @property
    def depth(self) -> int:
        return len(self.t)

    @property
    def weight(self) -> int:
        return sum(self.t)

    @property
    def convergent(self) -> bool:
        return self.t[-1] >= 2 or self.phases[-1] != 0

    @property
    def period(self) -> int:
        n = 1
        for p in self.phases:
            n = math.lcm(n, p.denominator)
        return n

    def conjugate(self) -> "PolylogTerm":
        return PolylogTerm(self.t, tuple(-p for p in self.phases))

    def __str__(self) -> str:
        zs = ",".join(str(p) for p in self.phases)
        return "Li(" + ",".join(map(str, self.t)) + ";" + zs + ")"


class IntCombination(Mapping[T, int], Generic[T]):
    """Finite map from terms to nonzero integers; zero coefficients are dropped."""

    __slots__ = ("_d",)

    def __init__(self, items: Mapping[T, int] | Iterable[tuple[T, int]] = ()):
        self._d: dict[T, int] = {}
        pairs = items.items() if isinstance(items, Mapping) else items
        for k, v in pairs:
            self._add(k, v)

    def _add(self, key: T, coeff: int) -> None:
        c = self._d.get(key, 0) + int(coeff)
        if c:
            self._d[key] = c
        else:
            self._d.pop(key, None)

    def __getitem__(self, key: T) -> int:
        return self._d[key]

    def __iter__(self) -> Iterator[T]:
        return iter(sorted(self._d))

    def __len__(self) -> int:
        return len(self._d)

    def __add__(self, other: "IntCombination[T]") -> "IntCombination[T]":
        out = IntCombination(self._d)
        for k, v in other.items():
            out._add(k, v)
        return out

    def scale(self, c: int) -> "IntCombination[T]":
        return IntCombination({k: c * v for k, v in self._d.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, IntCombination):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._d.items()))

    def __repr__(self) -> str:
        return "IntCombination({" + ", ".join(f"{k}: {v}" for k, v in self.items()) + "})"

    def __str__(self) -> str:
        if not self._d:
            return "0"
        return " + ".join(f"{v} * {k}" for k, v in self.items())

    def to_records(self) -> list[dict]:
        out = []
        for k, v in self.items():
            rec = {"coefficient": v, "indices": list(k.t)}
            if isinstance(k, PolylogTerm):
                rec["phases"] = [str(p) for p in k.phases]
            out.append(rec)
        return out

    @staticmethod
    def from_records(records: Iterable[Mapping]) -> "IntCombination":
        out: IntCombination = IntCombination()
        for rec in records:
            if "phases" in rec:
                key = PolylogTerm(tuple(rec["indices"]), tuple(Fraction(p) for p in rec["phases"]))
            else:
                key = MzvIndex(tuple(rec["indices"]))
            out._add(key, int(rec["coefficient"]))
        return out
