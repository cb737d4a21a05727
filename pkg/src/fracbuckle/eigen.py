"""Critical load factor and buckling mode from ``K phi = lambda G phi``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from fracbuckle.errors import AssemblyError, NoBucklingError, NumericalError, ParameterError
from fracbuckle.fem import BCSpec, DofMap, Mesh1D, Mesh2D, shape_rows

#: relative residual ``|K phi - lambda G phi| / |K phi|`` every solve must meet
RESIDUAL_TOL = 1.0e-8
DEFAULT_SAMPLES = 65


@dataclass(frozen=True)
class EigenSolution:
    lam: float
    phi: np.ndarray
    #: next critical load factor, ``inf`` if ``G`` has rank one
    lam_next: float
    residual: float

    @property
    def gap(self) -> float:
        """Relative separation of the two lowest load factors."""
        return (self.lam_next - self.lam) / self.lam


def residual(K: np.ndarray, G: np.ndarray, lam: float, phi: np.ndarray) -> float:
    Kphi = K @ phi
    return float(np.linalg.norm(Kphi - lam * (G @ phi)) / np.linalg.norm(Kphi))


def solve_generalized(K: np.ndarray, G: np.ndarray) -> EigenSolution:
    """Smallest positive ``lambda`` with ``det(K - lambda G) = 0``.

    The inverted pencil ``G phi = mu K phi`` is solved instead, with ``K`` as
    the definite operand, so a singular ``G`` is harmless; ``lambda = 1/mu``
    for the largest ``mu``.
    """
    K = np.asarray(K, dtype=float)
    G = np.asarray(G, dtype=float)
    n = K.shape[0]
    if K.shape != (n, n) or G.shape != (n, n):
        raise ParameterError(f"K {K.shape} and G {G.shape} must be square and equal in size")
    if n < 2:
        raise ParameterError("need at least two DOFs")
    if not np.any(G):
        raise NoBucklingError("geometric stiffness is identically zero")
    try:
        mu, vec = sla.eigh(G, K, subset_by_index=[n - 2, n - 1])
    except sla.LinAlgError as exc:
        raise AssemblyError("material stiffness is not positive definite") from exc
    if mu[1] <= 0.0:
        raise NoBucklingError("no positive critical load: G has no compressive direction")
    lam = 1.0 / mu[1]
    lam_next = 1.0 / mu[0] if mu[0] > 0.0 else np.inf
    phi = vec[:, 1]
    res = residual(K, G, lam, phi)
    if res > RESIDUAL_TOL:
        raise NumericalError(f"eigen residual {res:.2e} exceeds {RESIDUAL_TOL:.0e}")
    return EigenSolution(float(lam), phi, float(lam_next), res)


def generalized_min_eig(K: np.ndarray, G: np.ndarray) -> tuple[float, np.ndarray]:
    """``(lambda, phi)`` for the lowest critical load factor (see :func:`solve_generalized`)."""
    sol = solve_generalized(K, G)
    return sol.lam, sol.phi


def scatter(phi: np.ndarray, free: np.ndarray, n_dof: int) -> np.ndarray:
    """Reduced vector back to full length; constrained DOFs are zero."""
    full = np.zeros(n_dof)
    full[free] = phi
    return full


def _normalise(w: np.ndarray) -> np.ndarray:
    peak = np.max(np.abs(w))
    if peak == 0.0:
        raise ParameterError("mode vector is zero")
    w = w / peak
    centre = w[w.size // 2]
    # antisymmetric modes vanish at the centre: orient by the largest sample
    ref = centre if abs(centre) > 1e-8 else w[np.argmax(np.abs(w))]
    return -w if ref < 0.0 else w


def mode_line(full: np.ndarray, mesh: Mesh1D | Mesh2D, n_samples: int):
    """Sample ``w`` on a uniform grid: along the beam, or along x1 at ``x2 = b/2``."""
    if isinstance(mesh, Mesh1D):
        coords = np.linspace(0.0, mesh.length, n_samples)
        return coords, shape_rows(mesh, coords, 0) @ full
    coords = np.linspace(0.0, mesh.a, n_samples)
    kron_vec = np.empty_like(full)
    kron_vec[mesh.kron_permutation()] = full
    rows = np.kron(shape_rows(mesh.x1, coords, 0), shape_rows(mesh.x2, [mesh.b / 2.0], 0))
    return coords, rows @ kron_vec


def extract_mode(
    phi: np.ndarray,
    dof_map: DofMap,
    bc: BCSpec,
    mesh: Mesh1D | Mesh2D,
    n_samples: int = DEFAULT_SAMPLES,
):
    """Max-normalised mode samples ``(coords, w)`` with non-negative centre value."""
    if n_samples < 16:
        raise ParameterError("need at least 16 mode samples")
    free = bc.free_dofs(dof_map.n_dof)
    if phi.shape != free.shape:
        raise ParameterError("phi does not match the free DOF count")
    coords, w = mode_line(scatter(phi, free, dof_map.n_dof), mesh, n_samples)
    return coords, _normalise(w)


@dataclass(frozen=True)
class BucklingResult:
    """Critical load of one case with its first buckling mode."""

    lambda_c: float
    lambda_nondim: float
    #: full-length nodal vector, constrained DOFs zero
    mode: np.ndarray
    mode_coords: np.ndarray
    mode_values: np.ndarray
    gap: float
    n_dof: int
    residual: float

    @property
    def mode_samples(self) -> list[tuple[float, float]]:
        return list(zip(self.mode_coords.tolist(), self.mode_values.tolist()))


def buckling_result(
    sol: EigenSolution,
    dof_map: DofMap,
    bc: BCSpec,
    mesh: Mesh1D | Mesh2D,
    nondim: float,
    n_samples: int = DEFAULT_SAMPLES,
) -> BucklingResult:
    coords, values = extract_mode(sol.phi, dof_map, bc, mesh, n_samples)
    full = scatter(sol.phi, bc.free_dofs(dof_map.n_dof), dof_map.n_dof)
    return BucklingResult(
        lambda_c=sol.lam,
        lambda_nondim=nondim,
        mode=full,
        mode_coords=coords,
        mode_values=values,
        gap=sol.gap,
        n_dof=sol.phi.size,
        residual=sol.residual,
    )
