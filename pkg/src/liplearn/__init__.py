"""Graph-based semi-supervised learning with Lipschitz extensions."""

from .cli import DemoSpec, pde_demo, write_field_csv
from .data import (KeelInfo, MoonSpec, gen_moons, load_csv, load_keel,
                   moon_point, save_csv)
from .graph import (D_MIN, W_MAX, W_MIN, Dataset, Graph, WeightKernel,
                    graph_from_edges, grid_graph, kernel_weight, knn_graph,
                    read_edge_list, write_edge_list)
from .learn import (GraphParams, LabelConstraint, TrialMetrics, TrialReport,
                    TrialSpec, classify, decide, evaluate, infl_classify,
                    infsl_classify, laplace_classify, onehot_boundary,
                    poisson_classify, run_trials, sample_labels)
from .operators import (LabelField, apply_to_field, graph_laplacian,
                        holder_infinity, infinity_laplacian, p_laplacian,
                        upwind_grad_norm)
from .solvers import (BoundaryData, SolveResult, SolverConfig, check_reachable,
                      component_labels, evolution_solve, laplace_solve,
                      lipschitz_solve, p_laplace_solve, poisson_solve,
                      stable_dt)

__version__ = "0.1.0"
