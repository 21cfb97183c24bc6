"""pdbisim: pushdown-system bisimulation games at desk scale.

Build first- and second-order pushdown systems, collapse silent steps, solve
bounded bisimulation games with checkable Attacker certificates, compile
word-matching instances into forcing-gadget games, and play the strategies
the gadgets are designed around.
"""

from .errors import (
    IllegalMoveError,
    InstanceError,
    MalformedInputError,
    ParseError,
    PartialSolutionError,
    PdbisimError,
    ResourceLimitError,
    StrategyDefectError,
)
from .pds import (
    EPSILON,
    Action,
    Configuration,
    NormVerdict,
    PushdownSystem,
    Rule,
    collapsed_successors,
    config,
    normedness_check,
    reachable,
    successors,
)
from .codec import PdsDocument, parse_pds, render_pds
from .lts import SystemLts
from .game import (
    GamePosition,
    Move,
    Session,
    StrategyNode,
    Verdict,
    check_certificate,
    decide_game,
    verify_certificate,
)
from .pcp import (
    PcpInstance,
    ReductionOptions,
    ReductionOutput,
    build_first_order,
    build_reduction,
    build_second_order,
    is_partial_solution,
    parse_instance,
    partial_solution_tree,
    switch_targets,
    validate_instance,
)
from .strategies import (
    AttackerSwitch,
    DefenderForcing,
    PlayTrace,
    RandomAgent,
    SearchAgent,
    SolutionOracle,
    compute_switch_choice,
    simulate,
)

__version__ = "0.1.0"
