"""Low-rank tensor completion for pilot-limited wideband MIMO channel estimation."""

from tensorchan._tensorchan import (
    ContractError,
    IoError,
    NumericalError,
    cp_complete,
    dof_cp,
    dof_tucker,
    export_hybrid_dataset,
    generate_channel,
    generate_rich_channel,
    nmse,
    observe,
    read_cten,
    run_experiment,
    selftest,
    somp_estimate,
    tucker_complete,
    write_cten,
)

__all__ = [
    "ContractError",
    "IoError",
    "NumericalError",
    "cp_complete",
    "dof_cp",
    "dof_tucker",
    "export_hybrid_dataset",
    "generate_channel",
    "generate_rich_channel",
    "nmse",
    "observe",
    "read_cten",
    "run_experiment",
    "selftest",
    "somp_estimate",
    "tucker_complete",
    "write_cten",
]
