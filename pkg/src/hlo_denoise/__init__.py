"""Feature-preserving mesh denoising with the half-kernel Laplacian operator."""

__version__ = "0.1.0"

from .errors import MeshError  # noqa: E402
from .fileio import ScalarField, read_mesh, write_mesh, write_scalar_field  # noqa: E402
from .hlo import (  # noqa: E402
    EnergyMode,
    HalfWindowPair,
    HloCandidate,
    HloConfig,
    denoise,
    generate_half_windows,
    half_kernel_laplacian,
)
from .laplacian import (  # noqa: E402
    FlowConfig,
    LaplacianField,
    cotangent_laplacian,
    flow_step,
    smooth,
    uniform_laplacian,
)
from .mesh import (  # noqa: E402
    TriMesh,
    VertexNeighborhood,
    build_mesh,
    face_normal,
    mean_edge_length,
    neighborhood,
)
from .metrics import (  # noqa: E402
    NoiseSpec,
    QualityReport,
    add_noise,
    avg_vertex_error,
    e_v,
    enclosed_volume,
    evaluate,
    flipped_faces,
    mean_curvature_energy,
    msae,
)
