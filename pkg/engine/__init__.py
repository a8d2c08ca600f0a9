"""Computation engines: enumeration, costs, learners, NFL checks and OLEA"""
from .learners import Learner, CvSelectionMode, resolve_learner
from .nfl_engine import nfl_f_average_check, nfl_uniform_prior_check
from .olea import ftl_strategy, gap_exhaustive

__all__ = [
    'Learner', 'CvSelectionMode', 'resolve_learner',
    'nfl_f_average_check', 'nfl_uniform_prior_check',
    'ftl_strategy', 'gap_exhaustive'
]
