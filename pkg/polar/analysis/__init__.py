from .operating_point import (
    AnalysisRow,
    OperatingPoint,
    analysis_table,
    info_thresholds,
    operating_point,
    per_index_erasures,
    ue_lower_bound,
    union_bound_erasure,
)
from .polarization import (
    BicProcess,
    ConverseWitness,
    ProcessStep,
    bic_process,
    converse_witnesses,
    fraction_bic_above,
    fraction_polarized,
    polarization_process,
    q_inverse,
    scaling_exponent,
)

__all__ = [
    'AnalysisRow', 'OperatingPoint', 'analysis_table', 'info_thresholds', 'operating_point',
    'per_index_erasures', 'ue_lower_bound', 'union_bound_erasure',
    'BicProcess', 'ConverseWitness', 'ProcessStep', 'bic_process', 'converse_witnesses',
    'fraction_bic_above', 'fraction_polarized', 'polarization_process', 'q_inverse', 'scaling_exponent',
]
