from .bsc_mixture import (
    BscMixture,
    ChannelParams,
    CrossoverProb,
    Exactness,
    MixtureForm,
    bec_erasure,
    binary_entropy,
    canonicalize,
    is_bec,
    m,
    make_bec,
    make_bsc,
    naturalize,
    p_w,
    params,
    star,
    total_variation,
)
from .transforms import degrade, synthesize, synthesize_all, transform_minus, transform_plus

__all__ = [
    'BscMixture', 'ChannelParams', 'CrossoverProb', 'Exactness', 'MixtureForm',
    'bec_erasure', 'binary_entropy', 'canonicalize', 'is_bec', 'm', 'make_bec', 'make_bsc',
    'naturalize', 'p_w', 'params', 'star', 'total_variation',
    'degrade', 'synthesize', 'synthesize_all', 'transform_minus', 'transform_plus',
]
