"""Fractional-order Euler-Bernoulli beam: stiffness assembly and scaling."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from fracbuckle.errors import ConfigError
from fracbuckle.fem import (
    BC,
    BCSpec,
    DofMap,
    Mesh1D,
    StiffnessSystem,
    beam_bc,
    shape_rows,
)
from fracbuckle.kernel import FracParams, frac_derivative_rows

MIN_ELEMENTS = 4
MIN_SLENDERNESS = 50.0


class NonlocalityMode(enum.Enum):
    """Which stiffness terms use fractional derivatives.

    ``MATERIAL`` and ``GEOMETRIC`` are diagnostic modes that replace the
    fractional operator by its integer-order counterpart in the other term.
    """

    FULL = "full"
    MATERIAL = "material"
    GEOMETRIC = "geometric"
    LOCAL = "local"

    @property
    def material_nonlocal(self) -> bool:
        return self in (NonlocalityMode.FULL, NonlocalityMode.MATERIAL)

    @property
    def geometric_nonlocal(self) -> bool:
        return self in (NonlocalityMode.FULL, NonlocalityMode.GEOMETRIC)


def element_count(span: float, l_f: float, n_inf: int) -> int:
    """Number of uniform elements of size ``l_f / n_inf`` fitting into ``span``."""
    return int(round(span * n_inf / l_f))


@dataclass(frozen=True)
class BeamConfig:
    """Beam geometry, material, fractional parameters and discretisation.

    Stiffness is assembled per unit width; the width multiplies both ``K``
    and ``G`` and drops out of the critical load.
    """

    frac: FracParams
    L: float = 1.0
    h: float = 0.01
    E: float = 30.0e6
    n_inf: int = 24
    bc: BC = BC.SS
    mode: NonlocalityMode = NonlocalityMode.FULL

    def __post_init__(self):
        object.__setattr__(self, "bc", BC(self.bc))
        object.__setattr__(self, "mode", NonlocalityMode(self.mode))
        if self.bc.is_plate:
            raise ConfigError(f"{self.bc.value} is a plate boundary condition")
        if self.L <= 0 or self.h <= 0 or self.E <= 0:
            raise ConfigError("L, h and E must be positive")
        if self.L / self.h < MIN_SLENDERNESS:
            raise ConfigError(f"slenderness L/h = {self.L / self.h:g} is below {MIN_SLENDERNESS:g}")
        if self.n_inf < 1:
            raise ConfigError("n_inf must be a positive integer")
        if self.n_elem < MIN_ELEMENTS:
            raise ConfigError(f"mesh has {self.n_elem} elements, at least {MIN_ELEMENTS} required")

    @property
    def n_elem(self) -> int:
        return element_count(self.L, self.frac.l_f, self.n_inf)

    @property
    def mesh(self) -> Mesh1D:
        return Mesh1D(self.L, self.n_elem)

    @property
    def bending_rigidity(self) -> float:
        """``E h^3 / 12`` per unit width."""
        return self.E * self.h**3 / 12.0

    @property
    def bc_spec(self) -> BCSpec:
        return beam_bc(self.bc, self.mesh)


def strain_rows(mesh: Mesh1D, fp: FracParams, xs, base_deriv: int, nonlocal_: bool):
    """Fractional rows, or the matching integer-order rows when ``nonlocal_`` is false."""
    if nonlocal_:
        return frac_derivative_rows(mesh, fp, xs, base_deriv)
    return shape_rows(mesh, xs, base_deriv + 1)


def assemble_beam(cfg: BeamConfig) -> StiffnessSystem:
    """Material stiffness ``K`` and geometric stiffness ``G`` of the full beam."""
    mesh = cfg.mesh
    xs, ws = mesh.gauss_points()
    b11 = strain_rows(mesh, cfg.frac, xs, 1, cfg.mode.material_nonlocal)
    b1 = strain_rows(mesh, cfg.frac, xs, 0, cfg.mode.geometric_nonlocal)
    K = cfg.bending_rigidity * (b11.T * ws) @ b11
    G = (b1.T * ws) @ b1
    return StiffnessSystem(0.5 * (K + K.T), (0.5 * (G + G.T),), DofMap.beam(mesh))


def nondim_beam(N0: float, cfg: BeamConfig) -> float:
    """``N0 L^2 / (pi^2 E I)`` with ``I = h^3 / 12`` per unit width."""
    return N0 * cfg.L**2 / (np.pi**2 * cfg.bending_rigidity)
