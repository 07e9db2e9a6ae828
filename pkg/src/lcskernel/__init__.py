"""Graph kernels from longest common subsequences of shortest paths.

Each graph becomes a discrete measure over its serialized shortest paths
(``build_basic``), optionally compressed by fragment removal and adjacent
point merging (``build_fast``). Two graphs are compared by the Wasserstein
distance between their measures under the LCS metric, and the Laplacian
kernel of that distance feeds a precomputed-kernel SVM.
"""
from .errors import (
    BadMarginals,
    ConfigError,
    DatasetError,
    EmptyMeasure,
    EmptyRepresentation,
    EmptySequence,
    InconsistentEdgeLabels,
    InvalidGraph,
    LCSKernelError,
    MalformedLine,
    MissingEdgeLabel,
    MissingFile,
    NonConvergenceWarning,
    SingleClass,
    TooFewPerClassWarning,
    TooLarge,
)
from .evaluation import C_GRID, LAMBDA_GRID, CvReport, OneVsOneSVM, SvmModel, cross_validate, svm_train
from .graph import Dataset, Graph, degree_labeling, load_tudataset, save_tudataset
from .kernel import (
    DistanceMatrix,
    GramMatrix,
    KernelParams,
    build_representations,
    distance_matrix,
    graph_distance,
    gram_matrix,
    ground_distance_matrix,
    kernel_value,
    load_gram,
    save_gram,
)
from .lcs import cross_distances, lcs_distance, lcs_length, lcstr_length, path_similarity
from .paths import all_pairs_shortest_paths, bfs_distances, shortest_path_tree
from .representation import FlcsParams, PathMeasure, build_basic, build_fast, merge_adjacent, remove_fragments
from .serialize import serialize_path, serialize_paths
from .transport import OTSettings, TransportPlan, exact_emd, sinkhorn, transport

__version__ = "0.1.0"
