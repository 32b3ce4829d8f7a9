"""reuselaw: an entropy model of software-library reuse.

Simulate problem domains with a tunable entropy parameter, compress programs
against ranked component libraries, ingest real ELF reference corpora, and
check the predicted rank-frequency, vocabulary-growth, rate-bound, and
normality regularities.
"""

__version__ = "0.1.0"

from .codes import (Codebook, Codeword, FiniteDistribution, entropy, kraft_sum,
                    log_plus, omega_codeword, omega_decode, omega_decode_stream,
                    shannon_fano_codebook)
from .compress import (CompressionReport, available_engines, compress,
                       default_engine, incompleteness_curve, run_trials,
                       savings_profile)
from .domain import (DomainSpec, Library, SimProgram, Token, build_library,
                     estimate_entropy_parameter, generate_program)
from .ingest import (Corpus, ObjectRecord, build_corpus, load_corpus,
                     save_corpus, scan_elf, scan_text)
from .analysis import (FitResult, NormalityReport, RankFrequencyTable,
                       check_rate_bound, erdos_kac_check, fit_heaps, fit_zipf,
                       incompressibility_probe, rank_frequency)
