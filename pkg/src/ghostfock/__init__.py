"""Ghost imaging with photon-added, photon-subtracted and coherently operated
two-mode squeezed light: Fock-space simulation, moments, SNR and optimization."""

from .errors import (BadParams, DegenerateHerald, DegenerateState, DegenerateStatistics, NoTransition,
                     NullStateError, TruncationOverflow)
from .fock import FockConfig, FockState, JointPnd
from .moments import MomentSet, analytic_moments, compare_moments, numeric_moments
from .snr import SnrEstimate, SnrModelVariant, central_stats, snr_bell, snr_curve_tmss, snr_from_moments
from .sources import (CoherentOpParams, HeraldResult, HeraldSpec, apply_coherent_op, build_source, build_tmss,
                      herald_params, simulate_herald_circuit)
from .sweep import figure_data, locate_bifurcation, optimize_r, snr_grid

__version__ = "0.1.0"
