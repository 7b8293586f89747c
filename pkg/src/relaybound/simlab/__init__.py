"""Desk-scale simulations: Hamming blow-ups, color guessing, soft covering, the deterministic relay code."""
from .blowup import (EventSet, ProductSpace, blow_up, blowing_up_check, codeword_entropy_check,
                     likely_colors_check)
from .codes import (Coloring, RelayCode, code_success_probability, coloring_conditional_entropy,
                    det_code, det_example_run, random_balanced_coloring, random_code)
from .guessing import ProxyUnavailableError, exact_guessing_success, guessing_decoder_sim
from .outcome import SimOutcome
from .resolvability import block_pmi, conditional_block_pmi, csicr_sim, resolvability_sim

__all__ = [
    "EventSet", "ProductSpace", "blow_up", "blowing_up_check", "codeword_entropy_check",
    "likely_colors_check", "Coloring", "RelayCode", "code_success_probability",
    "coloring_conditional_entropy", "det_code", "det_example_run", "random_balanced_coloring",
    "random_code", "ProxyUnavailableError", "exact_guessing_success", "guessing_decoder_sim",
    "SimOutcome", "block_pmi", "conditional_block_pmi", "csicr_sim", "resolvability_sim",
]
