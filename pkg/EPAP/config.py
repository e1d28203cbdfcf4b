"""
EPAP configurations

This module contains global configurations used in the EPAP code.
"""
from pathlib import Path

DENSITY_FLOOR = 1e-12
"""
Positivity floor for the density.

Densities below this value are not clipped. They raise
``AdmissibilityError`` so that a collapsing state is reported
as an instability.

:type: float
"""

BLOWUP_THRESHOLD = 1e8
"""
Blow-up threshold for the electric potential.

A state with :math:`\\|\\phi\\|_\\infty` above this value is flagged
as blown up.

:type: float
"""

POISSON_TOL = 1e-12
"""
Default tolerance on the normwise backward error of a Poisson solve.

:type: float
"""

POISSON_MAXITER = 20000
"""
Iteration cap of the conjugate-gradient Poisson solver.

:type: int
"""

SOLVABILITY_RTOL = 1e-10
"""
Relative part of the periodic solvability tolerance.

A periodic right hand side is accepted if
``abs(mean(rhs)) <= SOLVABILITY_RTOL * max(abs(rhs)) + SOLVABILITY_ATOL``.

:type: float
"""

SOLVABILITY_ATOL = 1e-14
"""
Absolute part of the periodic solvability tolerance.

:type: float
"""

DT_MAX_FACTOR = 1e-2
"""
Time step cap as a fraction of the domain length.

Used when the CFL rule is degenerate (fluid at rest).

:type: float
"""

CSV_SIGNIFICANT_DIGITS = 17
"""
Significant digits of every float written to CSV.

17 digits round-trip a double exactly.

:type: int
"""

N_ZFILL = 5
"""
Zero padding of the snapshot file counter.

:type: int
"""

PRESET_PATH = Path(__file__).parent / 'presets'
"""
The directory holding the preset YAML files.

:type: pathlib.Path
"""

SCENARIO_PRESET_PATH = PRESET_PATH / 'scenarios.yaml'
"""
The experiment manifests, one per named scenario.

:type: pathlib.Path
"""

TABLEAU_PATH = PRESET_PATH / 'tableaux.yaml'
"""
The builtin double Butcher tableaux.

:type: pathlib.Path
"""

EPAP_PARENT_PATH = Path('.epap')
"""
The parent directory of all run outputs.

Relative paths in a configuration file are resolved against it.

:type: pathlib.Path
"""
