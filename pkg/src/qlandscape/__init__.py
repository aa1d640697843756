"""Control-landscape topology of quantum gates under dynamical symmetry.

Character landscapes of SU(2) and SU(3) irreps, their critical points and
basins, Riemannian ascent inside a symmetry group, and GRAPE pulse
optimization for comparing dynamical traps with kinematic ones.
"""

__version__ = "0.1.0"

from .characters import (  # noqa: E402
    LandscapeGrid,
    SU3Label,
    TorusPoint,
    character,
    fidelity_from_character,
    format_label,
    parse_label,
    scan_landscape,
    su2_character,
    su3_character,
    weyl_orthonormality,
)
from .dynamics import (  # noqa: E402
    ControlField,
    GrapeConfig,
    GrapeOutcome,
    fidelity_and_gradient,
    load_problem,
    propagate,
    run_grape,
    trap_statistics,
)
from .errors import (  # noqa: E402
    ClosureError,
    InvalidInputError,
    LandscapeError,
    NonSmoothPointError,
    NumericalError,
    RefinementError,
)
from .kinematics import (  # noqa: E402
    AscentConfig,
    EulerPoint,
    FlowResult,
    TargetGate,
    criticality_residual,
    euler_unitary,
    gate_gradient_generator,
    kinematic_flow,
    reduced_scan,
    riemannian_ascent,
)
from .linalg import MatrixSubspaceBasis, expm, hs_inner, orthonormalize, project  # noqa: E402
from .representations import (  # noqa: E402
    ControlSystem,
    SpinLabel,
    build_spin_operators,
    lie_closure,
    spin_control_system,
)
from .topology import (  # noqa: E402
    CriticalPoint,
    CriticalReport,
    critical_points,
    critical_points_su2,
    critical_points_torus,
    global_basin_su2,
    ruggedness_compare,
)
