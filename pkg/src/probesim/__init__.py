"""Markovian open-dynamics simulator for coupled bosonic-mode/qubit networks."""

from .tensorspace import (
    CompositeSpace,
    DensityMatrix,
    OperatorMatrix,
    SubsystemSpec,
    annihilation_op,
    boson,
    creation_op,
    embed,
    ground_state,
    identity_op,
    pauli_op,
    qubit,
)
from .lindblad import (
    CompiledLiouvillian,
    IntegratorConfig,
    JumpOperator,
    LindbladGenerator,
    Trajectory,
    evolve,
    evolve_samples,
    liouvillian_apply,
    materialize_superoperator,
)
from .models import (
    BacteriaModelParams,
    TardigradeModelParams,
    build_bacteria_model,
    build_tardigrade_model,
)
from .correlations import (
    Bipartition,
    discord_two_qubit,
    mutual_information,
    negativity,
    partial_trace,
    partial_transpose,
    purity,
    von_neumann_entropy,
)
from .scenarios import (
    ScenarioConfig,
    SweepConfig,
    run_scenario,
    run_sweep,
)

__version__ = "0.1.0"
