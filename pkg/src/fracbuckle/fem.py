"""Uniform meshes, C1 Hermite bases, DOF maps and boundary conditions.

Beam DOFs per node are ``(w, w,x)``. Plate DOFs per node are
``(w, w,1, w,2, w,12)``; since the Bogner-Fox-Schmit basis is the tensor
product of two 1D Hermite bases, every plate matrix can be written as a sum
of Kronecker products of 1D matrices (see :mod:`fracbuckle.plate`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.linalg as sla

from fracbuckle.errors import AssemblyError, DomainError, ParameterError

#: Gauss-Legendre points per element and direction used for all stiffness integrals.
GAUSS_ORDER = 4

# Cubic Hermite shape functions on s in [0, 1], rows = (w_i, w'_i, w_j, w'_j),
# columns = coefficients of s**0 .. s**3. Slope rows are later scaled by l_e.
_HERMITE = np.array(
    [
        [1.0, 0.0, -3.0, 2.0],
        [0.0, 1.0, -2.0, 1.0],
        [0.0, 0.0, 3.0, -2.0],
        [0.0, 0.0, -1.0, 1.0],
    ]
)


def hermite_derivatives(s, l_e: float, order: int) -> np.ndarray:
    """Derivative of order ``order`` (w.r.t. the global coordinate) of the
    four cubic Hermite functions at local coordinates ``s``.

    Vectorised over ``s``; returns an array of shape ``s.shape + (4,)``.
    Orders above 3 vanish identically.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape + (4,))
    for j in range(order, 4):
        c = factorial(j) // factorial(j - order)
        out += c * _HERMITE[:, j] * s[..., None] ** (j - order)
    out *= np.array([1.0, l_e, 1.0, l_e])
    return out / l_e**order


def hermite_basis_1d(xi: float, l_e: float, order: int = 0) -> np.ndarray:
    """Values (``order=0``) or derivatives of the cubic Hermite functions.

    DOF order is ``(w_i, w'_i, w_j, w'_j)``.
    """
    if order not in (0, 1, 2):
        raise ParameterError(f"Hermite derivative order must be 0, 1 or 2, got {order}")
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"local coordinate {xi} outside [0, 1]")
    return hermite_derivatives(xi, l_e, order)


# local node (i, j) -> corner position, counter-clockwise
_CORNERS = ((0, 0), (1, 0), (1, 1), (0, 1))
# plate nodal DOFs as (x1-derivative, x2-derivative) orders
PLATE_DOF_ORDERS = ((0, 0), (1, 0), (0, 1), (1, 1))


def bfs_basis_2d(xi, l_e1: float, l_e2: float, order=(0, 0)) -> np.ndarray:
    """Bicubic Bogner-Fox-Schmit basis on one rectangular element.

    Returns 16 values: for each corner (counter-clockwise from ``(0, 0)``)
    the DOFs ``(w, w,1, w,2, w,12)``, differentiated ``order[0]`` times in
    x1 and ``order[1]`` times in x2.
    """
    o1, o2 = order
    if o1 not in (0, 1, 2) or o2 not in (0, 1, 2):
        raise ParameterError(f"BFS derivative orders must be <= 2, got {order}")
    s, t = xi
    h1 = hermite_basis_1d(s, l_e1, o1)
    h2 = hermite_basis_1d(t, l_e2, o2)
    out = np.empty(16)
    k = 0
    for ci, cj in _CORNERS:
        for p, q in PLATE_DOF_ORDERS:
            out[k] = h1[2 * ci + p] * h2[2 * cj + q]
            k += 1
    return out


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh of ``n_elem`` cubic Hermite elements on ``[0, length]``."""

    length: float
    n_elem: int

    def __post_init__(self):
        if self.length <= 0:
            raise ParameterError("mesh length must be positive")
        if self.n_elem < 1:
            raise ParameterError("mesh needs at least one element")

    @property
    def l_e(self) -> float:
        return self.length / self.n_elem

    @property
    def n_nodes(self) -> int:
        return self.n_elem + 1

    @property
    def n_dof(self) -> int:
        return 2 * self.n_nodes

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_nodes)

    def locate(self, x):
        """Element index and local coordinate of the points ``x``."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(x > self.length):
            raise DomainError(f"point outside [0, {self.length}]")
        e = np.minimum((x / self.l_e).astype(int), self.n_elem - 1)
        return e, x / self.l_e - e

    def gauss_points(self, n: int = GAUSS_ORDER):
        """Global Gauss-Legendre points and weights, element by element."""
        g, w = np.polynomial.legendre.leggauss(n)
        h = self.l_e
        xs = (np.arange(self.n_elem)[:, None] + (g + 1.0) / 2.0) * h
        return xs.ravel(), np.tile(w * h / 2.0, self.n_elem)


def shape_rows(mesh: Mesh1D, xs, order: int) -> np.ndarray:
    """Integer-order derivative rows: ``rows @ u`` gives ``u^(order)(xs)``."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    e, s = mesh.locate(xs)
    vals = hermite_derivatives(s, mesh.l_e, order)
    rows = np.zeros((xs.size, mesh.n_dof))
    cols = 2 * e[:, None] + np.arange(4)
    np.put_along_axis(rows, cols, vals, axis=1)
    return rows


@dataclass(frozen=True)
class Mesh2D:
    """Uniform rectangular grid of ``n1 x n2`` BFS elements on ``[0,a] x [0,b]``."""

    a: float
    b: float
    n1: int
    n2: int

    @property
    def x1(self) -> Mesh1D:
        return Mesh1D(self.a, self.n1)

    @property
    def x2(self) -> Mesh1D:
        return Mesh1D(self.b, self.n2)

    @property
    def n_nodes(self) -> int:
        return (self.n1 + 1) * (self.n2 + 1)

    @property
    def n_dof(self) -> int:
        return 4 * self.n_nodes

    def node_index(self, i: int, j: int) -> int:
        """Node at grid position ``(i, j)``; x1 runs fastest."""
        return j * (self.n1 + 1) + i

    def kron_permutation(self) -> np.ndarray:
        """``perm[g]`` = Kronecker-product index of node-major global DOF ``g``.

        ``kron(A_x1, B_x2)`` indexes DOFs as ``(2*i + p) * n2dof + 2*j + q``.
        """
        n2dof = 2 * (self.n2 + 1)
        perm = np.empty(self.n_dof, dtype=int)
        for j in range(self.n2 + 1):
            for i in range(self.n1 + 1):
                node = self.node_index(i, j)
                for k, (p, q) in enumerate(PLATE_DOF_ORDERS):
                    perm[4 * node + k] = (2 * i + p) * n2dof + 2 * j + q
        return perm


@dataclass(frozen=True)
class DofMap:
    """Contiguous node-major DOF numbering."""

    n_nodes: int
    labels: tuple[str, ...]

    @property
    def dofs_per_node(self) -> int:
        return len(self.labels)

    @property
    def n_dof(self) -> int:
        return self.n_nodes * self.dofs_per_node

    def index(self, node: int, label: str) -> int:
        return node * self.dofs_per_node + self.labels.index(label)

    @classmethod
    def beam(cls, mesh: Mesh1D) -> DofMap:
        return cls(mesh.n_nodes, ("w", "w,x"))

    @classmethod
    def plate(cls, mesh: Mesh2D) -> DofMap:
        return cls(mesh.n_nodes, ("w", "w,1", "w,2", "w,12"))


class BC(enum.Enum):
    SS = "SS"
    CC = "CC"
    SSSS = "SSSS"
    CCCC = "CCCC"

    @property
    def is_plate(self) -> bool:
        return len(self.value) == 4


@dataclass(frozen=True)
class BCSpec:
    kind: BC
    constrained: tuple[int, ...]

    def free_dofs(self, n_dof: int) -> np.ndarray:
        return np.setdiff1d(np.arange(n_dof), self.constrained)


def beam_bc(kind: BC | str, mesh: Mesh1D) -> BCSpec:
    """SS pins ``w`` at both ends; CC also fixes the slope."""
    kind = BC(kind)
    last = mesh.n_nodes - 1
    if kind is BC.SS:
        fixed = (0, 2 * last)
    elif kind is BC.CC:
        fixed = (0, 1, 2 * last, 2 * last + 1)
    else:
        raise ParameterError(f"{kind.value} is not a beam boundary condition")
    return BCSpec(kind, fixed)


def plate_bc(kind: BC | str, mesh: Mesh2D) -> BCSpec:
    """Edge constraints of a rectangular plate.

    SSSS fixes ``w`` and the tangential slope on every edge (``w,2`` on the
    x1 = const edges, ``w,1`` on the x2 = const edges) and leaves the twist
    free. CCCC fixes all four nodal DOFs on the boundary; the twist follows
    from differentiating the clamped slope along the edge.
    """
    kind = BC(kind)
    if not kind.is_plate:
        raise ParameterError(f"{kind.value} is not a plate boundary condition")
    fixed = set()
    for j in range(mesh.n2 + 1):
        for i in range(mesh.n1 + 1):
            on_x1_edge = i in (0, mesh.n1)
            on_x2_edge = j in (0, mesh.n2)
            if not (on_x1_edge or on_x2_edge):
                continue
            base = 4 * mesh.node_index(i, j)
            if kind is BC.CCCC:
                fixed.update(base + k for k in range(4))
                continue
            fixed.add(base)
            if on_x1_edge:
                fixed.add(base + 2)
            if on_x2_edge:
                fixed.add(base + 1)
    return BCSpec(kind, tuple(sorted(fixed)))


@dataclass(frozen=True)
class StiffnessSystem:
    """Material stiffness ``K`` and one geometric stiffness per load direction.

    ``free`` maps reduced indices back to the full DOF numbering once
    :func:`apply_bcs` has been applied.
    """

    K: np.ndarray
    Gs: tuple[np.ndarray, ...]
    dof_map: DofMap
    free: np.ndarray | None = field(default=None, compare=False)

    @property
    def G(self) -> np.ndarray:
        if len(self.Gs) != 1:
            raise ParameterError("system has several geometric matrices; combine them first")
        return self.Gs[0]

    @property
    def n(self) -> int:
        return self.K.shape[0]


def symmetry_error(A: np.ndarray) -> float:
    """Relative asymmetry ``max|A - A^T| / max|A|``."""
    scale = np.max(np.abs(A))
    return float(np.max(np.abs(A - A.T)) / scale) if scale > 0 else 0.0


def apply_bcs(sys: StiffnessSystem, bc: BCSpec) -> StiffnessSystem:
    """Delete constrained rows/columns from ``K`` and every ``G``."""
    if sys.free is not None:
        raise ParameterError("system is already reduced")
    free = bc.free_dofs(sys.dof_map.n_dof)
    if free.size == 0:
        raise ParameterError("boundary conditions leave no free DOF")
    ix = np.ix_(free, free)
    K = sys.K[ix]
    try:
        sla.cholesky(K, lower=True)
    except sla.LinAlgError as exc:
        raise AssemblyError("reduced material stiffness is not positive definite") from exc
    return StiffnessSystem(K, tuple(G[ix] for G in sys.Gs), sys.dof_map, free)
