"""Electromagnetic effective degrees of freedom of free-space MIMO links.

Builds scalar and dyadic Green's-function channel matrices between point
arrays and analyses the eigenvalue spectra of their correlation matrices.
"""

__version__ = "0.1.0"

from .channel import (  # noqa: E402
    ChannelMatrix,
    CorrelationMatrix,
    PolarizationMode,
    apply_channel,
    assemble_channel,
    correlation,
)
from .errors import (  # noqa: E402
    ConfigError,
    DegenerateSpectrumError,
    EmdofError,
    GeometryError,
    ShapeError,
    SingularityError,
    SolverError,
)
from .geometry import (  # noqa: E402
    ArrayGeometry,
    PlaneSpec,
    Vec3,
    make_paired_planes,
    make_planar_array,
    min_cross_separation,
)
from .green import (  # noqa: E402
    GreensKind,
    dyadic_green,
    farfield_projector_green,
    field_boundaries,
    scalar_green,
)
from .spectra import (  # noqa: E402
    Spectrum,
    SpectralSummary,
    capacity_edof,
    capacity_exact,
    capacity_ideal,
    dof,
    edof,
    edof_from_matrix,
    hermitian_eigenvalues,
    paraxial_dof,
    summarize,
)
