"""Study orchestration: single cases, convergence sweeps, grids and isolation runs.

Every study is a set of independent cells keyed by
``(mode, lf_ratio, alpha, n_inf)``. Cells run concurrently on a thread pool
(LAPACK releases the GIL) and are merged by key, so the worker count cannot
change the results.
"""

from __future__ import annotations

import enum
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from fracbuckle.beam import BeamConfig, NonlocalityMode, assemble_beam, nondim_beam
from fracbuckle.eigen import DEFAULT_SAMPLES, BucklingResult, buckling_result, solve_generalized
from fracbuckle.errors import ConfigError, FracBuckleError
from fracbuckle.fem import BC, apply_bcs
from fracbuckle.kernel import FracParams, LengthScale
from fracbuckle.plate import LoadCase, PlateConfig, assemble_plate, combine_geometric, nondim_plate

THREADS_ENV = "FRACBUCKLE_THREADS"
#: relative change between successive refinements regarded as converged
CONVERGENCE_TOL = 0.01


class StudyKind(enum.Enum):
    SINGLE = "single"
    CONVERGENCE = "convergence"
    GRID = "grid"
    PARAMETRIC = "parametric"
    MODES = "modes"


class Structure(enum.Enum):
    BEAM = "beam"
    PLATE = "plate"


DEFAULT_N_INF = {Structure.BEAM: 24, Structure.PLATE: 8}
DEFAULT_ALPHAS = (1.0, 0.9, 0.8, 0.7)


@dataclass(frozen=True)
class StudySpec:
    """What to compute.

    ``length_scale=None`` picks the study default: constant kernel prefactors
    for isolation studies, truncated (normalised) ones otherwise.
    Span and thickness are dimensionless multiples of 1; only ratios matter.
    """

    kind: StudyKind = StudyKind.SINGLE
    structure: Structure = Structure.BEAM
    bc: BC = BC.SS
    alphas: tuple[float, ...] = (1.0,)
    lf_ratios: tuple[float, ...] = (1.0,)
    n_infs: tuple[int, ...] = ()
    modes: tuple[NonlocalityMode, ...] = (NonlocalityMode.FULL,)
    load: LoadCase = LoadCase.UNIAXIAL
    length_scale: LengthScale | None = None
    slenderness: float = 100.0
    E: float = 30.0e6
    nu: float = 0.3
    n_samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        try:
            set_ = object.__setattr__
            set_(self, "kind", StudyKind(self.kind))
            set_(self, "structure", Structure(self.structure))
            set_(self, "bc", BC(self.bc))
            set_(self, "load", LoadCase(self.load))
            set_(self, "alphas", tuple(float(a) for a in self.alphas))
            set_(self, "lf_ratios", tuple(float(r) for r in self.lf_ratios))
            set_(self, "n_infs", tuple(int(n) for n in self.n_infs) or (DEFAULT_N_INF[self.structure],))
            set_(self, "modes", tuple(NonlocalityMode(m) for m in self.modes))
            if self.length_scale is not None:
                set_(self, "length_scale", LengthScale(self.length_scale))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.bc.is_plate != (self.structure is Structure.PLATE):
            raise ConfigError(f"bc {self.bc.value} does not fit a {self.structure.value}")
        for name in ("alphas", "lf_ratios", "n_infs", "modes"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        if any(not 0.0 < a <= 1.0 for a in self.alphas):
            raise ConfigError("alpha values must lie in (0, 1]")
        if any(not 0.0 < r <= 1.0 for r in self.lf_ratios):
            raise ConfigError("lf_ratio values must lie in (0, 1]")
        if any(n < 1 for n in self.n_infs):
            raise ConfigError("n_inf values must be positive")
        if self.kind is StudyKind.SINGLE and self.n_cells != 1:
            raise ConfigError("a single-case study takes exactly one value per parameter")
        if self.kind is StudyKind.PARAMETRIC and not set(self.modes) <= {
            NonlocalityMode.MATERIAL,
            NonlocalityMode.GEOMETRIC,
        }:
            raise ConfigError("parametric studies run only material and geometric modes")
        if self.slenderness < 50.0:
            raise ConfigError("slenderness must be at least 50")
        if self.E <= 0 or not -1.0 < self.nu < 0.5:
            raise ConfigError("E must be positive and nu in (-1, 0.5)")
        if self.n_samples < 16:
            raise ConfigError("n_samples must be at least 16")

    @property
    def n_cells(self) -> int:
        return len(self.modes) * len(self.lf_ratios) * len(self.alphas) * len(self.n_infs)

    @property
    def resolved_length_scale(self) -> LengthScale:
        if self.length_scale is not None:
            return self.length_scale
        if self.kind is StudyKind.PARAMETRIC:
            return LengthScale.CONSTANT
        return LengthScale.TRUNCATED

    def keys(self) -> list[CellKey]:
        """Cells in row-major order over (mode, l_f, alpha, n_inf)."""
        return [
            CellKey(m, r, a, n)
            for m in self.modes
            for r in self.lf_ratios
            for a in self.alphas
            for n in self.n_infs
        ]


class CellKey(NamedTuple):
    mode: NonlocalityMode
    lf_ratio: float
    alpha: float
    n_inf: int


@dataclass(frozen=True)
class CellResult:
    value: float
    n_dof: int
    gap: float
    runtime: float
    buckling: BucklingResult = field(repr=False, compare=False)


@dataclass(frozen=True)
class StudyResult:
    spec: StudySpec
    cells: dict[CellKey, CellResult]

    def cell(self, mode=None, lf_ratio=None, alpha=None, n_inf=None) -> CellResult:
        """Look up a cell; omitted parameters default to the first requested value."""
        s = self.spec
        key = CellKey(
            NonlocalityMode(s.modes[0] if mode is None else mode),
            float(s.lf_ratios[0] if lf_ratio is None else lf_ratio),
            float(s.alphas[0] if alpha is None else alpha),
            int(s.n_infs[0] if n_inf is None else n_inf),
        )
        return self.cells[key]

    def value(self, mode=None, lf_ratio=None, alpha=None, n_inf=None) -> float:
        return self.cell(mode, lf_ratio, alpha, n_inf).value

    def rows(self) -> list[tuple[CellKey, CellResult]]:
        return [(k, self.cells[k]) for k in self.spec.keys()]

    def refinement(self) -> list[tuple[CellKey, float, bool]]:
        """Relative change to the previous ``n_inf`` for every refined cell."""
        out = []
        for m in self.spec.modes:
            for r in self.spec.lf_ratios:
                for a in self.spec.alphas:
                    prev = None
                    for n in self.spec.n_infs:
                        key = CellKey(m, r, a, n)
                        v = self.cells[key].value
                        if prev is not None:
                            d = abs(v - prev) / abs(prev)
                            out.append((key, d, d < CONVERGENCE_TOL))
                        prev = v
        return out


def beam_config(spec: StudySpec, key: CellKey) -> BeamConfig:
    L = 1.0
    return BeamConfig(
        frac=FracParams(key.alpha, key.lf_ratio * L, spec.resolved_length_scale),
        L=L,
        h=L / spec.slenderness,
        E=spec.E,
        n_inf=key.n_inf,
        bc=spec.bc,
        mode=key.mode,
    )


def plate_config(spec: StudySpec, key: CellKey) -> PlateConfig:
    a = 1.0
    return PlateConfig(
        frac=FracParams(key.alpha, key.lf_ratio * a, spec.resolved_length_scale),
        a=a,
        b=a,
        h=a / spec.slenderness,
        E=spec.E,
        nu=spec.nu,
        n_inf1=key.n_inf,
        n_inf2=key.n_inf,
        bc=spec.bc,
        mode=key.mode,
    )


def solve_beam(cfg: BeamConfig, n_samples: int = DEFAULT_SAMPLES) -> BucklingResult:
    """Assemble, reduce and solve one beam case."""
    bc = cfg.bc_spec
    red = apply_bcs(assemble_beam(cfg), bc)
    sol = solve_generalized(red.K, red.G)
    return buckling_result(sol, red.dof_map, bc, cfg.mesh, nondim_beam(sol.lam, cfg), n_samples)


def solve_plate(
    cfg: PlateConfig, load: LoadCase | str = LoadCase.UNIAXIAL, n_samples: int = DEFAULT_SAMPLES
) -> BucklingResult:
    """Assemble, reduce and solve one plate case under ``load``."""
    bc = cfg.bc_spec
    red = apply_bcs(assemble_plate(cfg), bc)
    G = combine_geometric(*red.Gs, load)
    sol = solve_generalized(red.K, G)
    return buckling_result(sol, red.dof_map, bc, cfg.mesh, nondim_plate(sol.lam, cfg), n_samples)


def solve_cell(spec: StudySpec, key: CellKey) -> CellResult:
    t0 = time.perf_counter()
    try:
        if spec.structure is Structure.BEAM:
            res = solve_beam(beam_config(spec, key), spec.n_samples)
        else:
            res = solve_plate(plate_config(spec, key), spec.load, spec.n_samples)
    except FracBuckleError as exc:
        label = f"{key.mode.value}, lf_ratio={key.lf_ratio}, alpha={key.alpha}, n_inf={key.n_inf}"
        raise type(exc)(f"cell ({label}): {exc}") from exc
    return CellResult(res.lambda_nondim, res.n_dof, res.gap, time.perf_counter() - t0, res)


def worker_count(n_tasks: int) -> int:
    """Workers allowed by ``FRACBUCKLE_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ConfigError(f"{THREADS_ENV} must be >= 0")
    if n == 0:
        n = os.cpu_count() or 1
    return max(1, min(n, n_tasks))


def run_cells(spec: StudySpec) -> StudyResult:
    keys = spec.keys()
    workers = worker_count(len(keys))
    if workers == 1:
        results = [solve_cell(spec, k) for k in keys]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda k: solve_cell(spec, k), keys))
    return StudyResult(spec, dict(zip(keys, results)))


def _require(spec: StudySpec, kind: StudyKind):
    if spec.kind is not kind:
        raise ConfigError(f"expected a {kind.value} study, got {spec.kind.value}")


def run_single(spec: StudySpec) -> StudyResult:
    _require(spec, StudyKind.SINGLE)
    return run_cells(spec)


def run_convergence(spec: StudySpec) -> StudyResult:
    """Sweep over ``n_inf``; see :meth:`StudyResult.refinement` for the changes."""
    _require(spec, StudyKind.CONVERGENCE)
    return run_cells(spec)


def run_critical_grid(spec: StudySpec) -> StudyResult:
    _require(spec, StudyKind.GRID)
    return run_cells(spec)


def run_parametric(spec: StudySpec) -> StudyResult:
    """Isolated material and geometric nonlocality over the (alpha, l_f) grid."""
    _require(spec, StudyKind.PARAMETRIC)
    return run_cells(spec)


def run_modes(spec: StudySpec) -> StudyResult:
    _require(spec, StudyKind.MODES)
    return run_cells(spec)


_RUNNERS = {
    StudyKind.SINGLE: run_single,
    StudyKind.CONVERGENCE: run_convergence,
    StudyKind.GRID: run_critical_grid,
    StudyKind.PARAMETRIC: run_parametric,
    StudyKind.MODES: run_modes,
}


def run_study(spec: StudySpec) -> StudyResult:
    return _RUNNERS[spec.kind](spec)


def with_kind(spec: StudySpec, kind: StudyKind) -> StudySpec:
    return replace(spec, kind=kind)
