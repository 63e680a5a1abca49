"""Canonical forms and stability checks for matrix product states with boundary."""

from .block_structure import BlockPartition, analyze_blocks, triangularize
from .canonical_basis import (GammaTensor, MatrixCF, StructuredBasis, block_injectivity,
                              build_structured_basis, gamma_tensor, matrix_cf)
from .equivalence import (GaugeRelation, Wfa, mpsx_equal, negligible_blocks,
                          physical_subspace, reduce_pair, stack_and_relate, to_wfa,
                          wfa_compare, wfa_equal)
from .errors import (CapExceeded, InconsistentBasis, InvalidALow, InvalidInput, InvalidMode,
                     MpsxError, NotEquivalent, NotStable, NotTI, RelationNotFound,
                     RlsSyntaxError, SectorConflict, StructureUncertain, Undecided)
from .matrix_sets import MatrixSet, generate_algebra, span_fixed_length
from .mpsx_states import (GcfResult, MpsX, TiReport, analyze_ti, assemble_gcf,
                          generate_state, simplify_boundary)
from .rls import (AlgebraicRls, SpanRls, SpanTerm, extract_backbone, gamma_block_check,
                  parse_rls, render, rls_to_mpsx, span_rls_to_mpsx)
from .stability import StabilityReport, check_stability

__version__ = "0.1.0"
