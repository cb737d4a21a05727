"""Command-line front end: run a study and write CSV tables or mode shapes.

Exit status is 0 on success, 2 for configuration errors, 3 for numerical
failures and 4 for I/O errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from fracbuckle import __version__
from fracbuckle.beam import NonlocalityMode
from fracbuckle.config import format_config, load_config
from fracbuckle.eigen import BucklingResult
from fracbuckle.errors import ConfigError, DomainError, FracBuckleError, ParameterError
from fracbuckle.fem import BC
from fracbuckle.plate import LoadCase
from fracbuckle.study import StudyKind, StudyResult, StudySpec, Structure, run_study

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _atomic_write(path: Path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _header(spec: StudySpec) -> list[str]:
    lines = [f"# fracbuckle {__version__}", f"# length_scale (resolved): {spec.resolved_length_scale.value}"]
    lines += [f"# {ln}" if ln else "#" for ln in format_config(spec).rstrip().splitlines()]
    return lines


def output_name(spec: StudySpec) -> str:
    return f"{spec.kind.value}_{spec.structure.value}_{spec.bc.value}.csv"


def table_lines(res: StudyResult) -> list[str]:
    """Rows per ``l_f`` (and ``n_inf`` if swept), one column per (mode,) alpha."""
    spec = res.spec
    if not res.cells:
        raise ValueError("empty study result")
    multi_mode = len(spec.modes) > 1
    with_n = spec.kind is StudyKind.CONVERGENCE or len(spec.n_infs) > 1

    def label(m, a):
        return f"{m.value}:alpha={a:g}" if multi_mode else f"alpha={a:g}"

    cols = [(m, a) for m in spec.modes for a in spec.alphas]
    head = ["lf_ratio"] + (["n_inf"] if with_n else [])
    head += [label(m, a) for m, a in cols] + [label(m, a) + "_full" for m, a in cols]
    out = _header(spec) + [",".join(head)]
    for r in spec.lf_ratios:
        for n in spec.n_infs:
            vals = [res.value(m, r, a, n) for m, a in cols]
            row = [f"{r:g}"] + ([str(n)] if with_n else [])
            row += [f"{v:.4f}" for v in vals] + [repr(float(v)) for v in vals]
            out.append(",".join(row))
    return out


def emit_table(res: StudyResult, path) -> Path:
    """Write ``res`` as CSV, replacing any existing file atomically."""
    lines = table_lines(res)
    _atomic_write(Path(path), "\n".join(lines) + "\n")
    return Path(path)


def emit_modes(results: list[tuple[str, BucklingResult]], path, header: list[str] = ()) -> Path:
    """Mode shapes on a shared grid: first column is the normalised coordinate."""
    if not results:
        raise ValueError("no mode shapes to write")
    coords = results[0][1].mode_coords
    for lab, r in results[1:]:
        if r.mode_coords.shape != coords.shape or not np.allclose(
            r.mode_coords / r.mode_coords[-1], coords / coords[-1], rtol=0, atol=1e-12
        ):
            raise ValueError(f"mode grid of {lab!r} differs from the first case")
    xi = coords / coords[-1]
    lines = list(header) + [",".join(["x_over_span"] + [lab for lab, _ in results])]
    for i, x in enumerate(xi):
        lines.append(",".join([repr(float(x))] + [repr(float(r.mode_values[i])) for _, r in results]))
    _atomic_write(Path(path), "\n".join(lines) + "\n")
    return Path(path)


def mode_results(res: StudyResult) -> list[tuple[str, BucklingResult]]:
    bc = res.spec.bc.value
    return [
        (f"{k.mode.value} alpha={k.alpha:g} lf={k.lf_ratio:g} bc={bc}", c.buckling)
        for k, c in res.rows()
    ]


_SUBCOMMANDS = {
    "beam": None,
    "plate": None,
    "convergence": StudyKind.CONVERGENCE,
    "parametric": StudyKind.PARAMETRIC,
    "modes": StudyKind.MODES,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracbuckle", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fracbuckle {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        s = sub.add_parser(name, help=f"run a {name} study")
        s.add_argument("--config", type=Path, help="study configuration file")
        s.add_argument("--out", type=Path, default=Path("."), help="output directory")
        s.add_argument("--alpha", type=float)
        s.add_argument("--lf-ratio", type=float, dest="lf_ratio")
        s.add_argument("--n-inf", type=int, dest="n_inf")
        s.add_argument("--bc", choices=[b.value for b in BC])
        s.add_argument("--load", choices=[c.value for c in LoadCase])
        s.add_argument("--mode", choices=[m.value for m in NonlocalityMode])
        if name not in ("beam", "plate"):
            s.add_argument("--structure", choices=[t.value for t in Structure])
    return p


def resolve_spec(args) -> StudySpec:
    """Merge config file, subcommand and override flags into one spec."""
    fields = {}
    if args.config is not None:
        try:
            base = load_config(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from exc
        fields = {f: getattr(base, f) for f in StudySpec.__dataclass_fields__}

    if args.command in ("beam", "plate"):
        structure = Structure(args.command)
        if args.config is not None and fields["structure"] is not structure:
            raise ConfigError(f"config describes a {fields['structure'].value}, not a {args.command}")
        fields["structure"] = structure
        if fields.get("kind") not in (StudyKind.SINGLE, StudyKind.GRID):
            fields["kind"] = StudyKind.SINGLE
    else:
        fields["kind"] = _SUBCOMMANDS[args.command]
        if args.structure:
            fields["structure"] = Structure(args.structure)
    structure = Structure(fields.get("structure", Structure.BEAM))
    fields.setdefault("bc", BC.SS if structure is Structure.BEAM else BC.SSSS)

    if args.alpha is not None:
        fields["alphas"] = (args.alpha,)
    if args.lf_ratio is not None:
        fields["lf_ratios"] = (args.lf_ratio,)
    if args.n_inf is not None:
        fields["n_infs"] = (args.n_inf,)
    if args.bc is not None:
        fields["bc"] = BC(args.bc)
    if args.load is not None:
        fields["load"] = LoadCase(args.load)
    if args.mode is not None:
        fields["modes"] = (NonlocalityMode(args.mode),)
    elif fields["kind"] is StudyKind.PARAMETRIC and tuple(fields.get("modes", ())) in (
        (),
        (NonlocalityMode.FULL,),
    ):
        fields["modes"] = (NonlocalityMode.MATERIAL, NonlocalityMode.GEOMETRIC)
    if args.command == "convergence" and "n_infs" not in fields:
        fields["n_infs"] = (12, 18, 24, 30) if structure is Structure.BEAM else (4, 6, 8, 10)
    if fields["kind"] is StudyKind.MODES and "alphas" not in fields:
        fields["alphas"] = (1.0, 0.7)
    # several values on a beam/plate run make it a grid
    if fields["kind"] is StudyKind.SINGLE:
        n = 1
        for f in ("alphas", "lf_ratios", "n_infs", "modes"):
            n *= len(fields.get(f, ()) or (1,))
        if n > 1:
            fields["kind"] = StudyKind.GRID
    return StudySpec(**fields)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = resolve_spec(args)
        res = run_study(spec)
    except (ConfigError, ParameterError, DomainError) as exc:
        print(f"fracbuckle: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FracBuckleError as exc:
        print(f"fracbuckle: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    try:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / output_name(spec)
        if spec.kind is StudyKind.MODES:
            emit_modes(mode_results(res), path, _header(spec))
        else:
            emit_table(res, path)
    except OSError as exc:
        print(f"fracbuckle: {exc}", file=sys.stderr)
        return EXIT_IO

    for key, cell in res.rows():
        print(
            f"{key.mode.value:9s} lf_ratio={key.lf_ratio:<5g} alpha={key.alpha:<4g} "
            f"n_inf={key.n_inf:<3d} -> {cell.value:.4f}"
        )
    print(f"wrote {path}")
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
