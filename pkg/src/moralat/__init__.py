"""moralat: weighted finite-state lattice toolkit for pitch-accent mora
transcription.

Builds confusion networks from CTC posterior grids, collapses them into
mora or character lattices, converts text lattices to mora lattices through
a pronunciation dictionary, fuses the two estimates by a mixture union, and
extracts the best mora sequence. Also ships the mora tokenizer, the
pitch-trajectory frame classifier, and mora/character error-rate scoring.
"""

from .ctc import (
    PosteriorMatrix,
    build_blank_remover,
    build_confusion_network,
    ctc_lattice,
    load_posterior_file,
    save_posterior_file,
)
from .errors import (
    EmptyLatticeError,
    FormatError,
    FstOpError,
    MoralatError,
    TokenizeError,
)
from .f0 import (
    F0Track,
    classify_frame,
    classify_utterance,
    load_f0_track,
    mean_log_f0,
    save_f0_track,
    voicedness,
    window_segments,
)
from .fst import EPSILON, NO_STATE, Arc, Wfst, connect, is_acyclic, linear_acceptor
from .fst_io import load_fst, read_fst_text, save_fst, write_fst_text
from .fusion import (
    DecodeConfig,
    FusionTrace,
    decode_explicit_conditioning,
    decode_mt_lf,
    decode_pa_only,
    fuse,
    run_fusion,
    text_lattice,
)
from .lexicon import (
    DictEntry,
    LexiconFst,
    build_lexicon,
    load_dict_entries,
    reweight_with_pa,
    tt_to_pa_lattice,
)
from .metrics import AlignmentResult, cer, corpus_aggregate, mler
from .ops import (
    compose,
    determinize,
    minimize,
    normalize_local,
    opt,
    project_output,
    prune,
    rm_epsilon,
    shortest_distance,
    shortest_path,
    union,
)
from .semiring import INF, LOG, TROPICAL, log_add
from .symbols import BLANK_SYMBOL, EPSILON_SYMBOL, UNKNOWN_SYMBOL, SymbolTable
from .tokens import MoraToken, render_pa, tokenize_pa, tokenize_tt

__version__ = "0.1.0"
