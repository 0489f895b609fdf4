from .evaluation import eval_map, map_deviation, node_maps, random_grid, zero_map_probe, ProbeResult
from .reduction import (ReductionWitness, RegularityReport, apply_reduction, find_reduction,
                        fold_constants, proportional_classes, reduce_to_regular, regularity_report)
from .modification import (ModificationPlan, NoRegularPlan, PlanError, apply_modification,
                           check_plan, invert_modification, plan_from_symmetry,
                           plan_regular_modification)
from .isomorphism import (BudgetExceeded, IsoSearchResult, SignIsomorphism, apply_sign_map,
                          rho_isomorphic_bounded, sign_isomorphic)
from .anchoring import AnchorSearchResult, anchor_input, anchor_search, default_samples
from .log import RewriteLog
