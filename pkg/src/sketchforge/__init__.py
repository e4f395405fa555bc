"""Finite product sketches, tree completions of free semi-theories, and
Set-valued strict algebra enumeration."""

from .core import (
    ExplicitCategory,
    FreeCategory,
    Generator,
    Word,
    compose,
    free_category,
    indiscrete_category,
    product_category,
)
from .sketches import (
    CheckReport,
    Cone,
    FreeSemiTheory,
    ProjLetter,
    Sketch,
    SortGenerator,
    SortWord,
    SortedStructure,
    builtin,
    is_algebraic_theory,
    is_multisorted_fps,
    is_product_cone,
    is_semi_theory,
    validate_sketch,
)
from .completion import (
    Branch,
    GenLabel,
    LabeledTree,
    LeafLabel,
    TreeTuple,
    enumerate_trees,
    filtration_degree,
    graft_compose,
    projection_tuple,
    theta,
    theta_preimage,
    tree_validate,
)
from .resolution import (
    ResolutionWord,
    counit,
    degeneracy,
    face,
    identity_word,
    resolution_compose,
)
from .transforms import (
    InitialTheory,
    MuSketch,
    SigmaTheory,
    SketchMorphism,
    initial_semitheory,
    left_extend,
    mu_transform,
    restrict_to_projections,
    sigma_transform,
    transport_functor,
    unique_map_to,
)
from .algebra import (
    FinSetAlgebra,
    SortedAlgebra,
    StrictnessWitness,
    corepresented,
    enumerate_strict_algebras,
    evaluate_tree,
    extend_restrict_roundtrip,
    is_strict_algebra,
    is_strictly_local,
    localizing_map,
    natural_transformations,
    restrict_along,
)

__version__ = "0.1.0"
