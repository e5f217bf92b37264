from .channel_sampler import sample_channel_output, sample_outputs
from .monte_carlo import MonteCarloSimulator, exact_bec_erasure, run_trials, sweep_thresholds, trial_rng
from .report import SimReport, TradeoffCurve, TradeoffPoint, wilson_half_width

__all__ = [
    'sample_channel_output', 'sample_outputs',
    'MonteCarloSimulator', 'exact_bec_erasure', 'run_trials', 'sweep_thresholds', 'trial_rng',
    'SimReport', 'TradeoffCurve', 'TradeoffPoint', 'wilson_half_width',
]
