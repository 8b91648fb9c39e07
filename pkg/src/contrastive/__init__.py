"""Contrastive and congruent causes and explanations in structural causal models."""
from .model import (CausalModel, Context, ModelError, RestrictedModel, Situation, StructuralFunction,
                    Variable, ValidationReport, conj, enumerate_contexts, intervene, override_functions,
                    restrict_model, solve, validate_model)
from .formula import (TRUE, Atom, And, Formula, Implies, Intervene, Not, Or, Xor, conjunction, holds,
                      holds_in, incompatible_in, valid_in_model)
from .causes import (ContrastivePair, InstanceTooLarge, PreconditionError, RestrictedCause,
                     check_actual_cause, check_presupposed_cause, check_sufficient_cause,
                     compute_restricted_causes, enumerate_actual_causes, enumerate_alternative_causes,
                     enumerate_congruent_causes, enumerate_congruent_causes_general,
                     maximal_consistent_unions, presupposed_causes)
from .explain import (EpistemicState, GeneralEpistemicState, Hypothesis, default_hypotheses,
                      enumerate_alternative_explanations, enumerate_alternative_explanations_prime,
                      enumerate_congruent_explanations, enumerate_congruent_explanations_prime,
                      enumerate_explanations, enumerate_general_alternative_explanations,
                      enumerate_general_congruent_explanations, enumerate_general_explanations,
                      function_identity)
from .dsl import Bundle, DSLError, parse_bundle, parse_formula, print_bundle, print_formula
