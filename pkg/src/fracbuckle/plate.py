"""Fractional-order Kirchhoff plate on a uniform Bogner-Fox-Schmit mesh.

Every strain row at a 2D Gauss point factors into an x1 row times an x2
row, and the directional fractional derivatives act on one factor only.
Plate matrices are therefore sums of Kronecker products of small 1D
integrals such as ``FV = int F1^T V dx``, where ``V``, ``S``, ``T`` are the
value, slope and curvature rows, ``R`` is the fractional derivative of
``w`` and ``F`` the fractional derivative of the slope.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from fracbuckle.beam import MIN_ELEMENTS, MIN_SLENDERNESS, NonlocalityMode, element_count, strain_rows
from fracbuckle.errors import ConfigError, ParameterError
from fracbuckle.fem import BC, BCSpec, DofMap, Mesh1D, Mesh2D, StiffnessSystem, plate_bc, shape_rows
from fracbuckle.kernel import FracParams


class LoadCase(enum.Enum):
    """In-plane compression: along x1 only, or equal along x1 and x2."""

    UNIAXIAL = "uniaxial"
    BIAXIAL = "biaxial"


@dataclass(frozen=True)
class PlateConfig:
    frac: FracParams
    a: float = 1.0
    b: float = 1.0
    h: float = 0.01
    E: float = 30.0e6
    nu: float = 0.3
    n_inf1: int = 8
    n_inf2: int = 8
    bc: BC = BC.SSSS
    mode: NonlocalityMode = NonlocalityMode.FULL

    def __post_init__(self):
        object.__setattr__(self, "bc", BC(self.bc))
        object.__setattr__(self, "mode", NonlocalityMode(self.mode))
        if not self.bc.is_plate:
            raise ConfigError(f"{self.bc.value} is a beam boundary condition")
        if min(self.a, self.b, self.h, self.E) <= 0:
            raise ConfigError("a, b, h and E must be positive")
        if not -1.0 < self.nu < 0.5:
            raise ConfigError(f"Poisson ratio {self.nu} outside (-1, 0.5)")
        if min(self.a, self.b) / self.h < MIN_SLENDERNESS:
            raise ConfigError("plate is too thick for Kirchhoff theory")
        if self.n_inf1 < 1 or self.n_inf2 < 1:
            raise ConfigError("n_inf must be a positive integer")
        m = self.mesh
        if min(m.n1, m.n2) < MIN_ELEMENTS:
            raise ConfigError(f"mesh {m.n1}x{m.n2} is coarser than {MIN_ELEMENTS}x{MIN_ELEMENTS}")

    @property
    def mesh(self) -> Mesh2D:
        n1 = element_count(self.a, self.frac.l_f, self.n_inf1)
        n2 = element_count(self.b, self.frac.l_f, self.n_inf2)
        return Mesh2D(self.a, self.b, n1, n2)

    @property
    def flexural_rigidity(self) -> float:
        return self.E * self.h**3 / (12.0 * (1.0 - self.nu**2))

    @property
    def twist_rigidity(self) -> float:
        return self.E * self.h**3 / (24.0 * (1.0 + self.nu))

    @property
    def bc_spec(self) -> BCSpec:
        return plate_bc(self.bc, self.mesh)


@dataclass(frozen=True)
class AxisIntegrals:
    """1D integrals along one axis that make up the plate matrices."""

    VV: np.ndarray
    SS: np.ndarray
    FF: np.ndarray
    FV: np.ndarray
    RR: np.ndarray
    RS: np.ndarray
    GG: np.ndarray


def axis_integrals(mesh: Mesh1D, fp: FracParams, mode: NonlocalityMode) -> AxisIntegrals:
    xs, ws = mesh.gauss_points()
    V = shape_rows(mesh, xs, 0)
    S = shape_rows(mesh, xs, 1)
    F = strain_rows(mesh, fp, xs, 1, mode.material_nonlocal)
    R = strain_rows(mesh, fp, xs, 0, mode.material_nonlocal)
    Rg = strain_rows(mesh, fp, xs, 0, mode.geometric_nonlocal)

    def integral(X, Y):
        return (X.T * ws) @ Y

    return AxisIntegrals(
        VV=integral(V, V),
        SS=integral(S, S),
        FF=integral(F, F),
        FV=integral(F, V),
        RR=integral(R, R),
        RS=integral(R, S),
        GG=integral(Rg, Rg),
    )


def _to_node_major(A: np.ndarray, perm: np.ndarray) -> np.ndarray:
    A = A[np.ix_(perm, perm)]
    return 0.5 * (A + A.T)


def assemble_plate(cfg: PlateConfig) -> StiffnessSystem:
    """Bending stiffness ``K`` and directional geometric stiffnesses ``(G1, G2)``.

    The strains are

    * curvatures ``D1[w,1]`` and ``D2[w,2]``,
    * twist ``D1[w,2] + D2[w,1]``,

    where ``Dk`` is the fractional derivative along ``xk``. The twist is the
    mixed form that reduces to ``2 w,12`` in the local limit.
    """
    mesh = cfg.mesh
    m1 = axis_integrals(mesh.x1, cfg.frac, cfg.mode)
    m2 = axis_integrals(mesh.x2, cfg.frac, cfg.mode)
    kron = np.kron
    nu = cfg.nu
    bend = (
        kron(m1.FF, m2.VV)
        + kron(m1.VV, m2.FF)
        + nu * kron(m1.FV, m2.FV.T)
        + nu * kron(m1.FV.T, m2.FV)
    )
    twist = (
        kron(m1.RR, m2.SS)
        + kron(m1.SS, m2.RR)
        + kron(m1.RS, m2.RS.T)
        + kron(m1.RS.T, m2.RS)
    )
    K = cfg.flexural_rigidity * bend + cfg.twist_rigidity * twist
    G1 = kron(m1.GG, m2.VV)
    G2 = kron(m1.VV, m2.GG)
    perm = mesh.kron_permutation()
    return StiffnessSystem(
        _to_node_major(K, perm),
        (_to_node_major(G1, perm), _to_node_major(G2, perm)),
        DofMap.plate(mesh),
    )


def combine_geometric(G1: np.ndarray, G2: np.ndarray, lc: LoadCase | str) -> np.ndarray:
    """Geometric stiffness per unit load factor (``N2 = N1`` when biaxial)."""
    if G1.shape != G2.shape:
        raise ParameterError(f"G1 {G1.shape} and G2 {G2.shape} differ in shape")
    lc = LoadCase(lc)
    return G1.copy() if lc is LoadCase.UNIAXIAL else G1 + G2


def nondim_plate(N0: float, cfg: PlateConfig) -> float:
    """``N0 b^2 / (pi^2 D)``."""
    return N0 * cfg.b**2 / (np.pi**2 * cfg.flexural_rigidity)
