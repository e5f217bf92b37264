from .threshold import Decision, DecodeResult, LikelihoodPair, ThresholdVector, dt_decide
from .likelihoods import as_likelihood_array, observation_likelihoods
from .sce_decoder import SceDecoder, sce_decode, sce_decode_trace
from .oracle import brute_force_posteriors, enumerate_synthetic_channel, posterior_from_likelihoods

__all__ = [
    'Decision', 'DecodeResult', 'LikelihoodPair', 'ThresholdVector', 'dt_decide',
    'as_likelihood_array', 'observation_likelihoods',
    'SceDecoder', 'sce_decode', 'sce_decode_trace',
    'brute_force_posteriors', 'enumerate_synthetic_channel', 'posterior_from_likelihoods',
]
