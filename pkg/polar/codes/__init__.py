from .gp_code import GpCode, SignSequence, index_to_signs
from .encoder import column_weights, encode, kron_matrix, polar_transform
from .construction import (
    ConstructionKind,
    bec_synthetic_erasures,
    construct,
    construct_polar,
    construct_rm,
    construct_zero_ue,
    synthetic_bhattacharyya,
    zero_ue_dimension,
)

__all__ = [
    'GpCode', 'SignSequence', 'index_to_signs',
    'column_weights', 'encode', 'kron_matrix', 'polar_transform',
    'ConstructionKind', 'bec_synthetic_erasures', 'construct', 'construct_polar',
    'construct_rm', 'construct_zero_ue', 'synthetic_bhattacharyya', 'zero_ue_dimension',
]
