"""Finite-domain workbench for clones, omega-operations and omega-relations."""

from .errors import (ArityMismatch, CapExceeded, ColumnNotInRelation, DecreasingViolation,
                     DomainMismatch, IndexOutOfRange, NotFiniteSupport, ParseError, ShapeMismatch,
                     UnknownName, WorkbenchError)
from .finite_core import (CloneCaps, FinOp, FinRel, compose, cut_of_intersection, finrel_transform,
                          generate_clone, geiger_roundtrip, inv, is_polymorphism, pol, projection,
                          relation_clone_generate)
from .threads import EvThread, TraceDescriptor, eq_omega, in_trace, restrict, substitute
from .omega_ops import (OpSeq, ROp, axiom_suite, eval_rop, fin_of, finitary_approximation,
                        generate_omega_clone, proj_e, q_inf, q_n, rop_equal, top_ext)
from .matrices import EvMatrix, apply_rop, enumerate_matrices, row_injective, substitute_columns
from .omega_relations import (DecSeq, Explicit, PatternFamily, dec_exists, dec_intersect, dec_join,
                              dec_permute, from_finitary, lim_membership, local_closure)
from .galois import (IdealSpec, cl_membership, duedue2_condition4_check, inv_finitary,
                     is_bot_polymorphism, is_g_polymorphism_decseq, is_g_polymorphism_fin,
                     matrical_polymorphism, pol_omega, r_mc, theorem_clone_inclusion_check)

__version__ = "0.1.0"
