"""Physical-quantity parsing for config values like ``t_ret = 10 ms``.

Every numeric config entry carries an explicit unit which is validated
against the dimension the consumer expects.  Quantities are stored in SI
base units (volts, seconds, farads, amps, watts, meters, hertz, ohms,
bits).  Dimensionless values use the dimension ``"1"``.
"""

from __future__ import annotations

from dataclasses import dataclass

_PREFIXES = {
    "a": 1e-18,
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,
    "μ": 1e-6,
    "m": 1e-3,
    "": 1.0,
    "k": 1e3,
    "M": 1e6,
    "G": 1e9,
    "T": 1e12,
}

_BASES = {
    "V": "V",
    "s": "s",
    "F": "F",
    "A": "A",
    "W": "W",
    "m": "m",
    "Hz": "Hz",
    "ohm": "ohm",
    "Ω": "ohm",
    "b": "bit",
    "B": "byte",
}

# Compound and special-case units used by the models.
_SPECIAL = {
    "mV/dec": ("V/dec", 1e-3),
    "V/dec": ("V/dec", 1.0),
    "F/m": ("F/m", 1.0),
    "fF/um": ("F/m", 1e-15 / 1e-6),
    "fF/µm": ("F/m", 1e-15 / 1e-6),
    "fF/μm": ("F/m", 1e-15 / 1e-6),
    "A/m": ("A/m", 1.0),
    "A/um": ("A/m", 1.0 / 1e-6),
    "A/µm": ("A/m", 1.0 / 1e-6),
    "A/μm": ("A/m", 1.0 / 1e-6),
    "fA/um": ("A/m", 1e-15 / 1e-6),
    "fA/µm": ("A/m", 1e-15 / 1e-6),
    "fA/μm": ("A/m", 1e-15 / 1e-6),
    "A/V2m": ("A/V2m", 1.0),
    "A/V2um": ("A/V2m", 1.0 / 1e-6),
    "uA/V2um": ("A/V2m", 1e-6 / 1e-6),
    "um2": ("m2", 1e-12),
    "µm2": ("m2", 1e-12),
    "μm2": ("m2", 1e-12),
    "mm2": ("m2", 1e-6),
    "Mb/mm2": ("bit/m2", 1e6 / 1e-6),
    "ohm/cell": ("ohm", 1.0),
    "F/cell": ("F", 1.0),
    "kB": ("byte", 1024.0),
    "MB": ("byte", 1024.0**2),
    "GB": ("byte", 1024.0**3),
    "Kb": ("bit", 1024.0),
    "Mb": ("bit", 1024.0**2),
}


class UnitError(ValueError):
    """Unknown unit token or dimension mismatch."""


def parse_unit(token: str) -> tuple[str, float]:
    """Return ``(dimension, scale_to_SI)`` for a unit token."""
    if token in ("", "1", "-"):
        return "1", 1.0
    if token in _SPECIAL:
        return _SPECIAL[token]
    if token in _BASES:
        return _BASES[token], 1.0
    # prefix + base, longest base first so e.g. "MHz" parses as M + Hz
    for base in sorted(_BASES, key=len, reverse=True):
        if token.endswith(base):
            prefix = token[: -len(base)]
            if prefix in _PREFIXES:
                return _BASES[base], _PREFIXES[prefix]
    raise UnitError(f"unknown unit {token!r}")


@dataclass(frozen=True)
class Quantity:
    """A parsed config value: SI magnitude plus its dimension."""

    value: float
    dimension: str
    raw: str = ""

    def in_dim(self, dimension: str) -> float:
        if self.dimension != dimension:
            raise UnitError(
                f"expected a quantity in {dimension!r}, got {self.raw!r} "
                f"({self.dimension!r})"
            )
        return self.value


def parse_quantity(text: str) -> Quantity:
    """Parse ``"10 ms"`` / ``"0.75 V"`` / ``"42"`` into a Quantity."""
    parts = text.strip().split()
    if len(parts) == 1:
        num, unit = parts[0], ""
    elif len(parts) == 2:
        num, unit = parts
    else:
        raise UnitError(f"cannot parse quantity {text!r}")
    try:
        value = float(num)
    except ValueError as exc:
        raise UnitError(f"bad number in {text!r}") from exc
    dim, scale = parse_unit(unit)
    return Quantity(value * scale, dim, text.strip())
