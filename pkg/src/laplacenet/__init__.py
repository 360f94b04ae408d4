"""Graph-Laplacian spectral approximation of model manifolds.

Build eps-nets on a circle, round sphere, or flat torus; assemble the
weighted proximity-graph Laplacian; solve for its low spectrum; transfer
functions between the manifold and the graph; and verify spectral
convergence against the closed-form spectra.
"""

from ._backend import COMPILED
from .diagnostics import DiagnosticRow, LEMMA_IDS, level_diagnostics
from .eigensolve import (
    SpectrumResult,
    cluster_eigenvalues,
    smallest_k,
    spectral_projection,
)
from .errors import (
    ClusterMismatch,
    ConfigError,
    DisconnectedGraphWarning,
    EmptyCell,
    EpsTooLarge,
    IntervalNotResolved,
    KTooLarge,
    LaplaceNetError,
    NoConvergence,
    RadiusNonpositive,
    RhoOutOfRange,
    ThetaNonpositive,
)
from .graph import WeightedGraph, build_graph
from .harness import (
    ConvergenceReport,
    RhoRule,
    SweepConfig,
    alignment_experiment,
    emit_report,
    run_sweep,
)
from .manifolds import (
    Circle,
    ExactSpectrum,
    FlatTorus2,
    Manifold,
    Sphere2,
    make_rng,
    manifold_from_spec,
    unit_ball_volume,
)
from .net import EpsNet, QuadratureSet, build_net, verify_net
from .transfer import (
    TransferContext,
    average_dispersion,
    compute_theta,
    discretize_P,
    interpolate_I,
    lift_Pstar,
    psi,
    smooth_Lambda,
    smooth_Lambda0,
)

__version__ = "0.1.0"
