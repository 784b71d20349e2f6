"""Projective self-repairing codes over GF(2).

Objects are split into B fragments and stored on n = (2^B-1)/(2^alpha-1)
nodes, alpha XOR-coded pieces each. Any failed node can be rebuilt from two
live nodes.
"""

from .codec import (
    NodePieces,
    ObjectData,
    Piece,
    SystematicSource,
    decode,
    encode,
    retrieve_systematic,
    systematic_map,
)
from .errors import SpreadCodeError
from .gf2 import GFContext, format_bits, gf_add, gf_new, parse_bits, rank, solve_xor
from .kernels import BACKEND
from .layout import (
    CodeParams,
    SpreadLayout,
    build_layout,
    derive_params,
    layout_for,
    subfield_generator,
    verify_spread,
)
from .repair import (
    RepairPlan,
    pair_partner,
    plan_min_download,
    plan_pair_repair,
    repair_pairs,
    simultaneous_assignment,
    three_partners_alpha2,
)
from .resilience import (
    availability,
    compare_bandwidth,
    msr_download,
    rho_exhaustive,
    rho_sampled,
    rho_table,
)
from .sim import ScenarioConfig, sim_init, sim_report, sim_retrieve, sim_run, sim_step

__version__ = "0.1.0"
