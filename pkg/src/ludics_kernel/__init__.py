"""ludics-kernel: designs, interaction, paths, visitable paths, incarnation."""

from .core import (
    DAIMON,
    Action,
    Chronicle,
    ChronicleError,
    Design,
    DesignError,
    Locus,
    LudicsError,
    Net,
    NetBase,
    NetError,
    Sequent,
    chronicles_coherent,
    dai_plus,
    design_from_tuples,
    is_slice,
    negative_base,
    positive_base,
    skunk,
    slices_of,
    validate_chronicle,
    validate_design,
    validate_net,
)
from .paths import (
    Path,
    PathError,
    PathSet,
    design_paths,
    dual,
    dual_base,
    extend_path,
    net_from_clique,
    paths_coherent,
    paths_of_net,
    paths_of_net_bruteforce,
    validate_path,
    view,
)
from .interaction import (
    CONVERGES,
    DIVERGES,
    CutNet,
    CutNetError,
    NormalizationResult,
    RamificationMissing,
    StepBudgetExhausted,
    interact,
    nets_orthogonal,
    normalize,
    orthogonal,
    restrictive_negative_jump_ok,
    validate_cutnet,
)

__version__ = "0.1.0"
