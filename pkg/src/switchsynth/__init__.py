"""Stabilizing switching signals for discrete-time switched linear systems.

Subsystem certificates give a weighted digraph; contractive closed walks
on it (found by LP, Bellman-Ford or a randomized walk) give periodic
switching signals under which the system is globally asymptotically stable.
"""

from .certificates import (
    LyapunovCertificate,
    StabilityClass,
    check_certificate,
    compute_certificate,
    compute_mu,
)
from .circuit_synth import CircuitSolution, Status, synthesize_circuit
from .cycle_synth import detect_negative_cycle, enumerate_cycles, most_negative_cycle_via_lp_support
from .digraph import SwitchingDigraph, build, edge_cost, from_constants, incidence_matrix
from .random_synth import RandomGraphModel, azuma_bound, monte_carlo_experiment, random_cycle
from .simulate import signal_from_walk, simulate, verify_gas
from .walks import Walk, decompose_to_circuits, decompose_to_cycles, extract_contractive_cycle, nu, xi, xi_bar

__version__ = "0.1.0"
