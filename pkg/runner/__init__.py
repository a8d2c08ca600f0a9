"""Experiment runner package"""
from .config import parse_config
from .experiments import run_experiment
from .verify import verify_all

__all__ = ['parse_config', 'run_experiment', 'verify_all']
