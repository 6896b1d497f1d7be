"""Two-party quantum coin tossing over entanglement swapping.

`qct.bell` tracks Bell pairs symbolically (labels + XOR algebra),
`qct.oracle` is the dense statevector reference it is certified against,
`qct.protocol` runs honest sessions, `qct.adversary` implements both
parties' cheating strategies, `qct.analysis` holds the closed-form pass
probability and noise-robustness results, and `qct.crosscheck` / `qct.cli`
wire everything into a verifiable command-line tool.
"""

from .bell import (
    BellLabel,
    EntangledMatching,
    ParticleId,
    Party,
    PauliLabel,
    apply_pauli,
    parity,
    total_parity,
)
from .protocol import (
    NoiseModel,
    SessionConfig,
    SessionTranscript,
    Sequence,
    Verdict,
    alice_verify,
    apply_noise,
    run_honest,
    toss_from_outcomes,
)
from .adversary import (
    CycleStructure,
    ExperimentReport,
    Strategy,
    StrategyKind,
    best_guess_results,
    cycle_structure,
    estimate_pass_probability,
    run_cheat_experiment,
    run_fake_sequence_attack,
    run_reflect_attack,
)
from .analysis import (
    BiasTarget,
    RobustnessQuery,
    min_gamma,
    min_pairs_for_bias,
    min_pairs_for_threshold,
    pass_prob_closed_form,
    pass_prob_composition_sum,
    pass_prob_permutation_model,
    robustness_ok,
)

__version__ = "0.1.0"

__all__ = [
    "BellLabel",
    "PauliLabel",
    "Party",
    "ParticleId",
    "EntangledMatching",
    "apply_pauli",
    "parity",
    "total_parity",
    "NoiseModel",
    "SessionConfig",
    "SessionTranscript",
    "Sequence",
    "Verdict",
    "alice_verify",
    "apply_noise",
    "run_honest",
    "toss_from_outcomes",
    "Strategy",
    "StrategyKind",
    "CycleStructure",
    "ExperimentReport",
    "cycle_structure",
    "best_guess_results",
    "run_reflect_attack",
    "run_fake_sequence_attack",
    "run_cheat_experiment",
    "estimate_pass_probability",
    "BiasTarget",
    "RobustnessQuery",
    "pass_prob_closed_form",
    "pass_prob_composition_sum",
    "pass_prob_permutation_model",
    "min_gamma",
    "min_pairs_for_threshold",
    "min_pairs_for_bias",
    "robustness_ok",
    "__version__",
]
