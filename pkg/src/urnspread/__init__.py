"""Parameter estimation for reinforced contagion on directed graphs.

Infections spread across edges with probability proportional to the source's
cumulative infection count times an edge weight ``exp(x_e . beta)``.  The
package simulates such traces and estimates the weights from ordered traces
(maximum likelihood, per-edge weights) or unordered counts (empirical and
fixed-point estimators).
"""
from .errors import (DataError, DuplicateEdgeId, EmptyCounts, GraphFormatError, InconsistentCounts,
                     InvalidTrace, LPSizeError, NoPerronVector, NotConverged, NotStronglyConnected,
                     RankDeficient, UrnSpreadError)
from .existence import check_mle_existence
from .general import fit_general_weights, project_to_beta
from .graph import (Graph, complete_graph, cycle_graph, cycle_with_loops_graph, edge_weights, load_graph,
                    replacement_matrix, strongly_connected, write_graph)
from .inference import infer, information_estimate, normal_quantile, standard_errors_ci, wald_stats
from .likelihood import (FitResult, LikelihoodContext, conditional_distribution, fit_mle, gradient, hessian,
                         log_likelihood, vertex_context, vertex_log_likelihood)
from .simulate import (Counts, Trace, counts_from_trace, simulate_trace, simulate_trace_weights,
                       simulate_vertex_trace)
from .spectral import leading_left_eigenvector, limiting_edge_distribution
from .unordered import (UnorderedData, cyclic_fixed_point_oracle, empirical_weight_estimate,
                        fixed_point_estimate)

__version__ = "0.1.0"
