"""View-aware rate allocation for streaming many point-cloud models under a bandwidth budget."""
from .allocator import Allocation, BudgetTrail, InfeasibleBudget, allocate, total_quality, w_min
from .generator import GeneratorParams, generate_instances
from .oracle import OracleResult, gap_report, solve_exact
from .prioritizer import PrioritizationConfig, classify, prioritize, visibility
from .scene import (
    ManifestError,
    PointCloudModel,
    PrioritizedModel,
    PriorityClass,
    PriorityWeights,
    RepresentationLadder,
    Scene,
    ViewState,
    dump_manifest,
    load_manifest,
    validate_scene,
)
from .simulator import SessionReport, SessionTrace, run_session

__version__ = "0.1.0"
