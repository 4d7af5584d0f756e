"""Finite potentialist systems: structures, embeddings, modal first-order logic,
bisimulation games and characteristic formulas."""

from .structures import (ElementMap, Literal, AtomicType, Signature, Structure, StructureError,
                         atomic_type, canonical_form, enumerate_embeddings, find_isomorphism,
                         is_embedding, is_partial_isomorphism, parse_signature, relabel, substructure)
from .formulas import (And, BigAnd, BigOr, Box, Dia, Eq, Exists, FALSE, Forall, Formula, FormulaError,
                       Implies, Neq, Not, Or, ParseError, Rel, TRUE, box_to_dia, mqrank, parse,
                       parse_many, pretty, random_formula, substitute, to_sexpr)
from .checker import CheckError, Checker, satisfies, satisfies_fo
from .systems import (Arrow, IsoBisimWitness, PointedSystem, PotentialistSystem, SystemsError,
                      UnravelDepthExceeded, build_mod_system, build_mode_system, check_flatten_squares,
                      check_unravel_zigzag, disjointify, enumerate_models, flatten, flatten_step,
                      is_closed, is_disjoint, is_thin, iter_flatten, iter_unravel, skeleton,
                      skeleton_witness, unravel_children, unravel_root, validate_or_close)
from .games import (INF, BisimulationRelation, GameError, Move, NoBisimulation, NoReply, Position,
                    RankTable, alpha_bisimilar, canonical_position, derived_bisimulation, eloise_reply,
                    extract_bisimulation, is_bisimilar, rank_table, verify_bisimulation,
                    verify_iso_bisimulation)
from .refine import Refinement
from .charform import (CapExceeded, button_system, button_theta, nu, ordinal_graph, theta, xi)
from .play import Transcript, play, play_interactive, replay

__version__ = "0.1.0"
