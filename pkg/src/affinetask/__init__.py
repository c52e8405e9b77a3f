"""Chromatic subdivisions, fair adversaries, affine tasks, and an
exhaustive checker for the two-round snapshot protocol that solves them."""

from .adversary import (Adversary, AdversaryError, AgreementFunction,
                        AgreementFunctionError, FairnessVerdict,
                        UnfairAdversaryError,
                        adversary_from_dict, adversary_to_dict,
                        agreement_function, check_fairness, classify, csize,
                        enumerate_adversaries, hitting_number, is_fair,
                        is_superset_closed, is_symmetric, make_k_of,
                        make_superset_closed, make_symmetric,
                        make_t_resilient, require_fair, restrict, restrict2,
                        setcon, symmetric_setcon, verify_fair_subtraction)
from .affine import (AffineTask, CriticalData, build_r_a, build_r_kof,
                     build_r_tres, concurrency_levels, contention_simplices,
                     critical_data, critical_simplices, is_contention,
                     is_critical, task_to_dict, variant_divergence_report,
                     verify_cs_distribution, verify_single_carrier)
from .complexes import (ChromaticComplex, ComplexError, Simplex, Vertex,
                        closure, complex_from_dict, complex_to_dict, facets,
                        is_pure, pure_complement, skeleton, star)
from .leader import (LeaderError, delta_q, gamma_q, mu_q, verify_leader,
                     verify_mu_agreement, verify_mu_robustness,
                     verify_mu_validity)
from .render import render_complex_svg, render_off
from .reports import VerificationReport
from .simulate import (Exploration, ProtocolModel, SimulationError,
                       StateCapExceeded, check_liveness, check_model,
                       check_safety, compose_runs, events_from_jsonable,
                       events_to_jsonable, finish_predicate, replay,
                       run_projection, state_cap_from_env,
                       valid_participations, wait_predicate)
from .subdivision import (build_chr, carrier, carrier_step, chr2_complex,
                          chr_complex, chr_vertex, facet_to_partition,
                          geometry, ordered_set_partitions,
                          partition_to_facet, standard_simplex,
                          two_round_facet, vertex_depth, view1, view2,
                          view2_simplex)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
