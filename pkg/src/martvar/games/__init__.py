"""Zero-sum games, repeated games with one informed player, and their value solvers."""

from .certify import (
    ErrorTermReport,
    ErrorTermRow,
    certify_error_term,
    certify_superadditivity,
    error_term_table,
)
from .model import (
    IncompleteInfoGame,
    MatrixGame,
    game_norm,
    random_game,
    tensor_games,
    tensor_power,
    zamir_game,
)
from .values import (
    GameValueResult,
    cav_u_binary,
    exact_size,
    matrix_value,
    u,
    u_table,
    value_exact,
    value_recursive,
    value_recursive_tables,
)

__all__ = [
    "ErrorTermReport",
    "ErrorTermRow",
    "GameValueResult",
    "IncompleteInfoGame",
    "MatrixGame",
    "cav_u_binary",
    "certify_error_term",
    "certify_superadditivity",
    "error_term_table",
    "exact_size",
    "game_norm",
    "matrix_value",
    "random_game",
    "tensor_games",
    "tensor_power",
    "u",
    "u_table",
    "value_exact",
    "value_recursive",
    "value_recursive_tables",
    "zamir_game",
]
