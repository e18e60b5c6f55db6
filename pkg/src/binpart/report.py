"""Verification reports and the registry of verifier families."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable


@dataclass
class Report:
    """Outcome of one verification campaign.

    ``notes`` collects findings that do not fail the campaign, for instance a
    literal reading of a statement that the exact data contradicts.
    """

    family: str
    range: dict[str, Any]
    status: str = "pass"
    counterexample: dict[str, Any] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def fail(self, **context) -> "Report":
        """Record the first counterexample; later calls keep the smallest index."""
        if self.counterexample is None or _index(context) < _index(self.counterexample):
            self.counterexample = context
        self.status = "fail"
        return self

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.family, "range": self.range, "status": self.status}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.notes:
            out["notes"] = self.notes
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)


def _index(ctx: dict[str, Any]) -> int:
    for key in ("n", "m", "x", "index"):
        if key in ctx:
            return int(ctx[key])
    return 0


def _jsonable(obj):
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    if hasattr(obj, "numerator"):  # Fraction
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def merge(reports: list[Report]) -> Report:
    """Combine block reports of one family; the smallest counterexample wins."""
    if not reports:
        raise ValueError("nothing to merge")
    out = Report(reports[0].family, dict(reports[0].range))
    for rep in reports:
        for note in rep.notes:
            if note not in out.notes:
                out.notes.append(note)
        if rep.counterexample is not None:
            out.fail(**rep.counterexample)
    return out


@dataclass(frozen=True)
class Family:
    name: str
    module: str
    run: Callable[..., Report]
    small: dict[str, Any] | None  # None: runs under the full budget only
    full: dict[str, Any]


REGISTRY: dict[str, Family] = {}


def register(name: str, module: str, small: dict[str, Any] | None, full: dict[str, Any] | None = None):
    """Decorator adding a verifier to the registry under ``name``."""

    def wrap(fn: Callable[..., Report]) -> Callable[..., Report]:
        if name in REGISTRY:
            raise ValueError(f"duplicate verifier family {name!r}")
        if small is None and full is None:
            raise ValueError("a family needs at least one budget")
        REGISTRY[name] = Family(name, module, fn, None if small is None else dict(small),
                                dict(full if full is not None else small))
        return fn

    return wrap


def families_by_module() -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for fam in REGISTRY.values():
        out.setdefault(fam.module, []).append(fam.name)
    return out


# modules whose import registers verifier families
FAMILY_MODULES = ("partitions", "squares", "characterizations", "counting", "dfao")


def load_families() -> dict[str, Family]:
    """Import every verifier module and check each registered something."""
    import importlib

    for mod in FAMILY_MODULES:
        importlib.import_module(f".{mod}", __package__)
    by_module = families_by_module()
    empty = [m for m in FAMILY_MODULES if not by_module.get(m)]
    if empty:
        raise RuntimeError(f"no verifier families registered by {', '.join(empty)}")
    return REGISTRY
