"""Data models package"""
from .data_models import (
    Rational, FiniteDomain, TargetFunction, StochasticHypothesis, Dataset,
    Prior, SamplingDistribution, LossFunction, WeightingMode, QueryWeighting,
    CostDistribution, JointCostDistribution, Discrepancy, NflReport,
    PriorWitness, ConditionalTable, PriorAverageReport, LlnReport,
    HeadToHeadReport, PayoffSequence, LeaderBoard, StrategyTrace, GapRow,
    SupervisedEmbedding, VerdictStatus, Verdict, ExperimentConfig, ReportBundle
)

__all__ = [
    'Rational', 'FiniteDomain', 'TargetFunction', 'StochasticHypothesis', 'Dataset',
    'Prior', 'SamplingDistribution', 'LossFunction', 'WeightingMode', 'QueryWeighting',
    'CostDistribution', 'JointCostDistribution', 'Discrepancy', 'NflReport',
    'PriorWitness', 'ConditionalTable', 'PriorAverageReport', 'LlnReport',
    'HeadToHeadReport', 'PayoffSequence', 'LeaderBoard', 'StrategyTrace', 'GapRow',
    'SupervisedEmbedding', 'VerdictStatus', 'Verdict', 'ExperimentConfig', 'ReportBundle'
]
