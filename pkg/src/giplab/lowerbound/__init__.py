from .confusion import (
    ConfusionGraph,
    ShatteredPair,
    Triangle,
    build_confusion_graph,
    chromatic_number_exact,
    confusion_edge_brute,
    constant_labeling,
    construct_triangle,
    find_shattered_coordinate_pair,
    triangle_for_labeling,
)
from .model import (
    AbsDiff,
    Constraint,
    LinearModel,
    Product,
    brute_force_feasible,
    build_ilp,
    export_lp,
    format_lp,
    linearize,
    parse_lp,
    solve_with_milp,
)
from .pairs import confusable_remote_pairs, enumerate_confusable_pairs
from .solver import (
    TABLE1,
    FeasibilityConfig,
    FeasibilityResult,
    LabelAssignment,
    UndecidedError,
    UnrealizableTranscript,
    decode,
    reproduce_table1,
    separation_report,
    solve_feasibility,
    verify_assignment,
)
