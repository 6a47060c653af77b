"""Search caps with ``HASSE_FORGE_CAP_*`` environment overrides."""

from __future__ import annotations

import dataclasses
import os

from .errors import InvalidArgument


@dataclasses.dataclass(frozen=True)
class Caps:
    prime_scan: int = 10_000_000
    prime_scan_seconds: float = 1800.0
    schinzel_scan: int = 100_000
    rho_iterations: int = 2_000_000
    depth: int | None = None
    max_classes: int = 200_000
    max_n: int = 8
    brauer_samples: int = 5

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if value is not None and value <= 0:
                raise InvalidArgument(f"cap {field.name} must be positive, got {value}")

    def replace(self, **changes) -> "Caps":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def caps_from_env(environ=None, **overrides) -> Caps:
    """Default caps, then ``HASSE_FORGE_CAP_<NAME>`` variables, then keyword overrides."""
    environ = os.environ if environ is None else environ
    values = {}
    for field in dataclasses.fields(Caps):
        raw = environ.get("HASSE_FORGE_CAP_" + field.name.upper())
        if raw is None:
            continue
        kind = float if field.name == "prime_scan_seconds" else int
        try:
            values[field.name] = kind(raw)
        except ValueError as exc:
            raise InvalidArgument(f"bad value for cap {field.name}: {raw!r}") from exc
    values.update({k: v for k, v in overrides.items() if v is not None})
    return Caps(**values)


DEFAULT_CAPS = Caps()
