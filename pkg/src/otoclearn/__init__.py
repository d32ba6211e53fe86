"""Spin-chain OTOC datasets and kernel models that learn them.

The package has two halves.  The simulation half builds four parameterised
spin-chain Hamiltonian families, evaluates out-of-time-ordered correlators
exactly (dense matrices up to a site cap) or with a Heisenberg-picture
MPO/TEBD engine, and writes labelled datasets.  The learning half fits
kernel ridge models to those datasets with a pseudoinverse solver,
cross-validated over a hyperparameter grid.
"""

__version__ = "0.1.0"

from .dense import (  # noqa: E402
    DENSE_CAP_DEFAULT,
    OtocValue,
    Target,
    dense_hamiltonian,
    heisenberg_dense,
    mi_lower_bound,
    otoc_dense,
    pauli_string_dense,
    target_dense,
)
from .errors import (  # noqa: E402
    DataFormatError,
    GenerationError,
    IntegrityError,
    NumericalFailure,
    OtoclearnError,
    ResourceLimitError,
)
from .hamiltonians import (  # noqa: E402
    Family,
    PauliTerm,
    TermList,
    ball_radius,
    build_terms,
    sample_inputs,
    split_scaling,
)
from .kernels import (  # noqa: E402
    KERNEL_KINDS,
    KernelSpec,
    gram_matrix,
    kernel_eval,
    kernel_matrix,
)
from .mpo import (  # noqa: E402
    MPO,
    ChiSweepRow,
    GateOp,
    TrotterPlan,
    TruncationPolicy,
    chi_sweep,
    identity_mpo,
    make_trotter_plan,
    mpo_pair_trace,
    mpo_to_dense,
    mpo_trace,
    otoc_mpo,
    pauli_mpo,
    sweep_diffs,
    target_mpo,
    tebd_evolve,
    trotter_unitary_dense,
)
from .regression import (  # noqa: E402
    CVResult,
    HyperGrid,
    KernelRidge,
    LearningCurveRow,
    Metrics,
    cross_validate,
    evaluate,
    fit_model,
    learning_curve,
    load_model,
    save_model,
)
from .datasets import (  # noqa: E402
    Dataset,
    SplitSpec,
    generate,
    load_dataset,
    save_dataset,
    split,
)
