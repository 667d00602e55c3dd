"""Simulation toolkit for biased Avoider-Enforcer games on the edges of K_n."""

from .board import Board, Owner, edge_endpoints, edge_index, num_edges
from .errors import (
    AlreadyClaimed,
    BiasInfeasible,
    BoardExhausted,
    GameError,
    IllegalMove,
    InvalidCertificate,
    InvalidConfig,
    StrategyViolation,
    TheoremViolation,
    Unsupported,
)
from .rules import audit_transcript, play_game
from .strategies import make_strategy
from .transcript import GameConfig, Rule, Transcript, read_transcript, write_transcript

__version__ = "0.1.0"
