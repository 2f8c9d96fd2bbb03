"""Perforated disk (25 star blocks): simply supported rim, four trimmed
holes, uniform load.  Uses the bundled config at a coarse level; raise the
segments list for the converged study."""

import pathlib

from sbiga.harness import CaseConfig, run_case

cfg = CaseConfig.from_file(str(pathlib.Path(__file__).parents[1] / "configs" / "perforated_disk.json"))
cfg.segments = [2]
rows, _ = run_case(cfg, progress=lambda r: None)
for r in rows:
    print("h=%.3f  N6=%d  center deflection=%.6f  u/uref=%.4f"
          % (r.h, r.N6, r.center_deflection, r.u_over_uref))
print("(converged reference: 0.008950; run segments [4, 5] to approach it)")
