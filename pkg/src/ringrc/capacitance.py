"""Interconnect capacitance decomposition and crosstalk-mode algebra.

A victim wire running between a plate above and a plate below, with one
neighbour on each side, sees five elementary capacitances: the area terms
to the top and bottom plates (c_ta, c_ba), the fringe terms to those
plates (c_ft, c_fb), and the lateral coupling to each neighbour (c_c).

All values are in farads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class CrosstalkMode(Enum):
    """Aggressor activity relative to the victim wire."""

    QUIET = "quiet"
    IN_PHASE = "in_phase"
    OUT_OF_PHASE = "out_of_phase"


@dataclass(frozen=True)
class CapacitanceSet:
    """Elementary capacitance components of one victim wire.

    c_ta / c_ba are the area capacitances to the top / bottom plane,
    c_ft / c_fb the fringe capacitances to those planes, and c_c the
    lateral coupling capacitance to one adjacent wire (the victim has
    one such neighbour on each side).
    """

    c_ta: float
    c_ba: float
    c_ft: float
    c_fb: float
    c_c: float

    def __post_init__(self):
        for name in ("c_ta", "c_ba", "c_ft", "c_fb", "c_c"):
            value = getattr(self, name)
            if not value >= 0.0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")

    @property
    def c_top(self) -> float:
        """Capacitance to the top plane: area term plus both fringe edges."""
        return self.c_ta + 2.0 * self.c_ft

    @property
    def c_bottom(self) -> float:
        """Capacitance to the bottom plane: area term plus both fringe edges."""
        return self.c_ba + 2.0 * self.c_fb

    @property
    def c_ground(self) -> float:
        """Total capacitance to static planes, c_top + c_bottom."""
        return self.c_top + self.c_bottom

    @property
    def c_total(self) -> float:
        """Worst-case total load, c_ground + 2 * c_c (both neighbours)."""
        return self.c_ground + 2.0 * self.c_c


def effective_capacitance(mode: CrosstalkMode, c_ground: float, c_c: float) -> float:
    """Switching-load capacitance seen by the victim driver in a given mode.

    With both neighbours held static the victim charges c_ground plus the
    two coupling capacitances. Neighbours switching with the victim remove
    the coupling contribution entirely; neighbours switching against it
    double the voltage swing across each coupling capacitor.

    Args:
        mode: aggressor activity pattern.
        c_ground: capacitance to static planes (farads).
        c_c: coupling capacitance to one neighbour (farads).

    Returns:
        Effective capacitance in farads.
    """
    if c_ground < 0.0 or c_c < 0.0:
        raise ValueError("capacitances must be >= 0")
    if mode is CrosstalkMode.QUIET:
        return c_ground + 2.0 * c_c
    if mode is CrosstalkMode.IN_PHASE:
        return c_ground
    if mode is CrosstalkMode.OUT_OF_PHASE:
        return c_ground + 4.0 * c_c
    raise ValueError(f"unknown mode {mode!r}")
