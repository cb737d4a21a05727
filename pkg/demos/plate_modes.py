"""Critical loads and first modes of square fractional plates.

Writes a CSV of the mid-line mode shapes next to this script, the same
format the ``fracbuckle modes`` subcommand produces.
"""

from pathlib import Path

import numpy as np

from fracbuckle.cli import emit_modes, mode_results
from fracbuckle.fem import BC
from fracbuckle.plate import LoadCase
from fracbuckle.study import StudyKind, StudySpec, Structure, run_study

for bc in (BC.SSSS, BC.CCCC):
    for load in LoadCase:
        spec = StudySpec(
            kind=StudyKind.GRID,
            structure=Structure.PLATE,
            bc=bc,
            load=load,
            alphas=(1.0, 0.9, 0.8, 0.7),
            lf_ratios=(0.4, 1.0),
        )
        res = run_study(spec)
        for lf in spec.lf_ratios:
            vals = [res.value(lf_ratio=lf, alpha=a) for a in spec.alphas]
            print(f"{bc.value} {load.value:9s} l_f/a={lf:.1f}: " + "  ".join(f"{v:7.4f}" for v in vals))

# %% Mode shapes along x2 = b/2
modes = run_study(
    StudySpec(kind=StudyKind.MODES, structure=Structure.PLATE, bc=BC.CCCC, alphas=(1.0, 0.7))
)
(local, frac) = [b.mode_values for _, b in mode_results(modes)]
print("cosine similarity, alpha 0.7 vs local:", float(local @ frac / np.linalg.norm(local) / np.linalg.norm(frac)))
out = emit_modes(mode_results(modes), Path(__file__).with_name("plate_modes.csv"))
print("wrote", out)
