"""Bifurcation toolkit for a planar two-neuron firing-rate model.

Equilibria and their classification, the Lienard reduction with exact
Taylor coefficients, the first three focal (Lyapunov) quantities by three
independent routes, Poincare return maps and limit-cycle detection,
symbolic phase-portrait codes, and analytic/numerical bifurcation-set
scans over the (a, b, c) parameter space.
"""

from __future__ import annotations

from .model import (
    Equilibrium,
    EquilibriumKind,
    OriginalParams,
    Params,
    State,
    bt_condition,
    classify_equilibrium,
    equilibria,
    equilibrium_residual,
    fold_points,
    fold_residual,
    mirror_state,
    reduce_original,
    sigmoid,
    symmetry_conjugate,
    vector_field,
)
from .lienard import (
    HopfPoint,
    LienardCoeffs,
    hopf_manifold,
    sigmoid_derivative_polys,
    taylor_coeffs,
    to_lienard,
)
from .lyapunov import (
    BautinPoint,
    FitInconclusiveError,
    LyapunovCoeffs,
    LyapunovSource,
    NotAFocusError,
    OracleResult,
    bautin_curve,
    focal_oracle,
    l2bar,
    l2bar_roots,
    lyapunov_closed,
    lyapunov_generic,
)
from .dynamics import (
    CycleStability,
    LimitCycle,
    NoReturnError,
    SectionRay,
    StepSizeUnderflowError,
    Trajectory,
    big_cycle_scan,
    find_cycles,
    integrate,
    poincare_return,
)
from .portrait import (
    CATALOGUE,
    DegenerateParametersError,
    PortraitCode,
    classify_portrait,
    is_catalogued,
)
from .scan import (
    CountNotMonotoneError,
    CurveKind,
    CurveSample,
    NoHopfError,
    RegionMap,
    bautin_points,
    bt_points,
    hopf_curve,
    region_scan,
    sn_curve,
    snpo_locate,
)
from .kernel import IMPLEMENTATION as KERNEL_IMPLEMENTATION

__version__ = "0.1.0"
