"""levinson1d: numerical verification of the one-dimensional Levinson theorem.

Counts bound states per parity for symmetric potentials, computes
scattering phase shifts under the coupling-continuity convention,
detects half-bound (critical) states, and checks the parity-resolved
relations between zero-momentum phase shifts and bound-state counts,
including the modified relations for inverse-square potential tails.
"""

from .bound_states import (BoundStateResult, count_by_matching, count_by_nodes,
                           detect_half_bound, matching_defect)
from .engine import (DEFAULT_CONFIG, BoundaryState, EngineConfig, InnerSolution,
                     Parity, dA_dE_quadrature, inner_log_derivative,
                     integrate_inner, integrate_inner_batch, node_positions,
                     outer_log_derivative)
from .errors import (BranchTrackingError, ConfigError, CriticalTailError,
                     DomainError, InfiniteSpectrumError, LevinsonError,
                     LimitUnresolvedError, MatchingRadiusError,
                     MethodDisagreementError, NodeAtBoundaryError,
                     ParameterError, RefusalError, SlowDecayError,
                     SweepUnresolvedError, TailModeError)
from .phase_shifts import (PhaseShiftCurve, SmallKExpansion, ZeroMomentumLimit,
                           phase_curve, phase_lambda_curve, phase_shift,
                           small_k_expansion, tan_eta_odd, zero_momentum_limit)
from .potentials import (Potential, TailClass, classify_tail, declare_slow_decay,
                         evaluate, from_document, from_json,
                         inverse_square_tail_class, make_double_well,
                         make_free_particle, make_gaussian_well,
                         make_inverse_square_tail, make_square_barrier,
                         make_square_well, make_tabulated, max_abs,
                         to_document, to_json)
from .tail import (TailZeroEnergy, tail_phase_shift, tail_zero_energy,
                   tail_zero_momentum)
from .verifier import (LambdaSweep, LevinsonReport, ParityBlock, SweepEvent,
                       sweep_lambda, verify)

__version__ = "0.1.0"
