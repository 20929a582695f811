"""Seat reservations across departments and beneficiary categories."""

from ._reservations import (
    RNG_NAME,
    ContractError,
    Problem,
    Scheme,
    controlled_round,
    derive_seed,
    draw_roster,
    fair_share_table,
    indian_scheme,
    max_abs_bias,
    run,
)

__all__ = [
    "RNG_NAME",
    "ContractError",
    "Problem",
    "Scheme",
    "controlled_round",
    "derive_seed",
    "draw_roster",
    "fair_share_table",
    "indian_scheme",
    "max_abs_bias",
    "run",
]
