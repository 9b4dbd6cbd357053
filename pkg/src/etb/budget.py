"""Enumeration caps shared by every builder.

Defaults can be overridden per process with ``ETB_BUDGET``, a comma-separated
list of ``key=value`` pairs, e.g. ``ETB_BUDGET=vectors=1e8,simplices=2e6``.
A bare number scales every cap by that factor.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Budget:
    vectors: int = 10**7
    simplices: int = 5 * 10**6
    group: int = 10**6

    def check(self, what: str, count: int) -> None:
        cap = getattr(self, what)
        if count > cap:
            raise BudgetExceeded(f"{what} budget exceeded: {count} > {cap}")


def _from_env() -> Budget:
    raw = os.environ.get("ETB_BUDGET", "").strip()
    b = Budget()
    if not raw:
        return b
    names = {f.name for f in fields(Budget)}
    try:
        if "=" not in raw:
            s = float(raw)
            return Budget(*(int(getattr(b, n) * s) for n in ("vectors", "simplices", "group")))
        updates = {}
        for part in raw.split(","):
            key, val = part.split("=")
            key = key.strip()
            if key not in names:
                raise ValueError(key)
            updates[key] = int(float(val))
        return replace(b, **updates)
    except ValueError as exc:
        raise ValueError(f"bad ETB_BUDGET value {raw!r}") from exc


_current = None


def get_budget() -> Budget:
    global _current
    if _current is None:
        _current = _from_env()
    return _current


def set_budget(b: Budget | None) -> None:
    """Install a process-wide budget (``None`` re-reads the environment)."""
    global _current
    _current = b
