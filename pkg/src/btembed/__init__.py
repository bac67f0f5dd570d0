"""Compositional tree embeddings with orthogonal matrix binding."""

__version__ = "0.1.0"

from .decoder import DecodeConfig, DecodeStats, decode, decode_token, decode_with_stats
from .embedding import (
    Embedding,
    attach,
    bt_encode,
    cardinality_estimate,
    encode_list,
    haar_orthogonal,
    make_embedding,
    push,
    zero_vector,
)
from .exceptions import (
    ArityExceededError,
    BTError,
    BudgetExceededError,
    DimensionTooSmallError,
    DuplicateNameError,
    EmptyAlphabetError,
    FileFormatError,
    InvalidSpecError,
    NoParseError,
    NonReflexiveError,
    PathTooLongError,
    SchemaMismatchError,
    SeparationUnachievableError,
    StepBudgetExceededError,
)
from .grammar import (
    balanced_parens_grammar,
    balanced_parens_schema,
    compile_rules,
    default_arg_attrs,
    load_grammar,
    parse,
    random_balanced,
    save_grammar,
    symbolic_parse,
)
from .harness import (
    CellResult,
    SeparationResult,
    SweepSpec,
    make_sweep_schema,
    random_tree,
    run_list_sweep,
    run_parse_sweep,
    run_separation_probe,
    run_sweep,
    run_tree_sweep,
    write_separation_csv,
    write_sweep_csv,
)
from .io import load_embedding, load_vector, save_embedding, save_vector
from .parser import (
    ParseState,
    Rule,
    RuleSet,
    apply_replacement,
    match_window,
    parse_vectors,
    pattern_arity,
    window_vector,
)
from .schema import Schema, Tree, validate_schema
from .transformer import (
    PositionCodes,
    SeqState,
    XfConfig,
    attention_matrix,
    attention_step,
    block,
    build_position_codes,
    export_weights,
    ffn1,
    ffn2,
    init_state,
    run_decoder,
    save_weights,
)
from .vectors import BTVector

__all__ = [name for name in dir() if not name.startswith("_")]
