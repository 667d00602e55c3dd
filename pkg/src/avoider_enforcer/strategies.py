"""Strategy registry: name -> factory, with the knobs each factory accepts."""

from __future__ import annotations

from fractions import Fraction

from .avoider import RandomAvoider, SpreadToucher, StagedAvoider, StrictForestAvoider
from .enforcer import (
    GirthBlocker,
    IsolationEnforcer,
    MonotoneNonplanarEnforcer,
    NonplanarEnforcer,
    RandomEnforcer,
    SpreadEnforcer,
)
from .errors import InvalidConfig
from .rules import Strategy

__all__ = ["AVOIDERS", "ENFORCERS", "make_strategy", "check_strategy"]


class FirstPlayerRandom(RandomAvoider):
    name = "fp.random"


AVOIDERS = {
    "avoider.staged": (StagedAvoider, ()),
    "avoider.staged-strict": (StrictForestAvoider, ()),
    "avoider.random": (RandomAvoider, ("max_claim",)),
    "fp.random": (FirstPlayerRandom, ("max_claim",)),
    "fp.spread": (SpreadToucher, ()),
}

ENFORCERS = {
    "enforcer.random": (RandomEnforcer, ()),
    "enforcer.spread": (SpreadEnforcer, ()),
    "enforcer.isolation": (IsolationEnforcer, ()),
    "enforcer.girth": (GirthBlocker, ("k", "budget")),
    "enforcer.nonplanar": (NonplanarEnforcer, ("k", "C", "c")),
    "enforcer.nonplanar-mono": (MonotoneNonplanarEnforcer, ("k", "C", "c")),
}


def _convert(key, value):
    if key == "c":
        return Fraction(value)
    if key == "C":
        return float(value)
    return int(value)


def check_strategy(name: str, seat: str, params: dict | None = None) -> None:
    table = AVOIDERS if seat == "avoider" else ENFORCERS
    if name not in table:
        raise InvalidConfig(f"unknown {seat} strategy {name!r}; known: {', '.join(sorted(table))}")
    allowed = table[name][1]
    extra = sorted(set(params or {}) - set(allowed))
    if extra:
        raise InvalidConfig(f"{name} does not take parameter(s) {', '.join(extra)}")


def make_strategy(name: str, seat: str, params: dict | None = None) -> Strategy:
    """Build a fresh strategy instance for ``seat`` ("avoider" or "enforcer")."""
    check_strategy(name, seat, params)
    cls, _ = (AVOIDERS if seat == "avoider" else ENFORCERS)[name]
    kwargs = {k: _convert(k, v) for k, v in (params or {}).items() if v is not None}
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(f"{name}: {exc}") from exc
