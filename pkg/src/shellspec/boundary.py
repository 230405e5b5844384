"""Boundary conditions for the two boundary components of an annular domain.

A condition is Neumann (h = 0), Robin with parameter h > 0, or Dirichlet
(the h -> infinity limit).  Dirichlet is represented explicitly rather
than by a large-h surrogate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


NEUMANN = "neumann"
ROBIN = "robin"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str
    h: float | None = None

    def __post_init__(self):
        if self.kind not in (NEUMANN, ROBIN, DIRICHLET):
            raise ValueError(f"unknown boundary condition kind {self.kind!r}")
        if self.kind == ROBIN:
            if self.h is None or not (self.h > 0) or not math.isfinite(self.h):
                raise ValueError("Robin condition requires finite h > 0")
        elif self.h is not None:
            raise ValueError(f"{self.kind} condition takes no parameter")

    @property
    def is_neumann(self):
        return self.kind == NEUMANN

    @property
    def is_robin(self):
        return self.kind == ROBIN

    @property
    def is_dirichlet(self):
        return self.kind == DIRICHLET

    def __str__(self):
        if self.is_robin:
            return f"robin:{self.h:g}"
        return self.kind


def neumann() -> BoundaryCondition:
    return BoundaryCondition(NEUMANN)


def robin(h: float) -> BoundaryCondition:
    return BoundaryCondition(ROBIN, float(h))


def dirichlet() -> BoundaryCondition:
    return BoundaryCondition(DIRICHLET)


def from_h(h: float) -> BoundaryCondition:
    """Condition from a parameter in [0, inf]: 0 -> Neumann, inf -> Dirichlet."""
    h = float(h)
    if h == 0:
        return neumann()
    if math.isinf(h):
        return dirichlet()
    return robin(h)


def parse_bc(text: str) -> BoundaryCondition:
    """Parse CLI syntax: 'neumann', 'dirichlet', or 'robin:H'."""
    text = text.strip().lower()
    if text == NEUMANN:
        return neumann()
    if text == DIRICHLET:
        return dirichlet()
    if text.startswith("robin"):
        _, _, hpart = text.partition(":")
        if not hpart:
            raise ValueError("robin condition needs a parameter, e.g. robin:1.0")
        return robin(float(hpart))
    raise ValueError(f"cannot parse boundary condition {text!r}")
