"""L-bracket (20 star blocks): clamped holes, line load on the right edge,
field export in legacy VTK format."""

import pathlib
import tempfile

from sbiga.harness import CaseConfig, run_case
from sbiga.vtkio import export_field

cfg = CaseConfig.from_file(str(pathlib.Path(__file__).parents[1] / "configs" / "l_bracket.json"))
rows, sol = run_case(cfg)
r = rows[-1]
print("h=%.3f N6=%d deflection at load edge midpoint: %.6e" % (r.h, r.N6, r.center_deflection))

out = pathlib.Path(tempfile.mkdtemp()) / "bracket"
paths = export_field(sol, (5, 4), str(out))
print("exported %d structured-grid files, e.g. %s" % (len(paths), paths[0]))
