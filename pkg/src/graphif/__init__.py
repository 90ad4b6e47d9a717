"""Iterative filtering for signals sampled on graphs and scattered points."""

from .decomposers import (
    NU_DEFAULT,
    FifKernel,
    WindowOperator,
    auto_gft_cutoff,
    build_window_operator,
    count_extrema_1d,
    db_if,
    db_window_length,
    domain_extent,
    fif_1d,
    fif_kernel,
    fif_window_length,
    gft_if,
    sinkhorn_symmetric,
)
from .delaunay import delaunay_triangles
from .distances import (
    circular_distance_matrix,
    dijkstra_all_pairs,
    euclidean_distance_matrix,
    floyd_warshall,
    shortest_path_matrix,
)
from .errors import (
    DataIOError,
    DivergenceError,
    GraphIFError,
    HypothesisViolationError,
    InvalidInputError,
    NonConvergenceError,
    NumericFailureError,
)
from .graph import (
    DisconnectedGraphWarning,
    Graph,
    build_delaunay_graph,
    build_ring_graph,
    count_extrema,
    laplacian,
)
from .sifting import (
    AveragingOperator,
    DecompositionResult,
    DiagonalOperator,
    MatrixOperator,
    StoppingRule,
    decompose,
    sift,
    sifting_limit,
)
from .spectral import (
    SpectralBasis,
    SpectralKernel,
    eigendecompose,
    gft,
    graph_convolve,
    hann,
    hann_spectral_kernel,
    igft,
    spectral_sifting_limit,
)

__version__ = "0.1.0"
