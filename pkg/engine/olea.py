"""
Online learning under expert advice: payoff sequences, follow-the-leader and
weighted strategies, regret accounting, gap tables and the embedding of the
payoff game into supervised learning
"""
import itertools
import logging
from collections import defaultdict
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from models.data_models import (
    ONE, ZERO, Dataset, FiniteDomain, GapRow, LeaderBoard, PayoffSequence,
    StochasticHypothesis, StrategyTrace, SupervisedEmbedding, TargetFunction,
    to_rational
)
from models.errors import BudgetExceededError, InvalidValueError, NonBinaryError
from engine.costs import zero_one_loss
from engine.enumeration import enumerate_functions
from engine.learners import Learner
from engine.nfl_engine import expected_ots_cost_fixed_inputs
from engine.parallel import chunked, parallel_map

logger = logging.getLogger(__name__)

MAX_GAP_HORIZON = 14


def _check_sequences(sequences: Sequence[PayoffSequence], n: int):
    if n < 1:
        raise InvalidValueError("the horizon n must be at least 1")
    if not sequences:
        raise InvalidValueError("at least one payoff sequence is required")
    for k, s in enumerate(sequences):
        if len(s) < n:
            raise InvalidValueError(f"sequence {k} has length {len(s)} < horizon {n}")


def leaderboard(sequences: Sequence[PayoffSequence], n: int) -> LeaderBoard:
    """Prefix sums π_k(i) with leader k⁺(i) and laggard k⁻(i) for i = 0..n"""
    _check_sequences(sequences, n)
    acc = []
    for s in sequences:
        row = [0]
        for i in range(n):
            row.append(row[-1] + s[i])
        acc.append(tuple(row))
    ks = range(len(sequences))
    leaders = tuple(max(ks, key=lambda k: (acc[k][i], -k)) for i in range(n + 1))
    laggards = tuple(min(ks, key=lambda k: (acc[k][i], k)) for i in range(n + 1))
    return LeaderBoard(tuple(acc), leaders, laggards)


def _trace(name: str, board: LeaderBoard, choices: Sequence[int], payoffs: Sequence[Fraction]) -> StrategyTrace:
    regret = []
    own = ZERO
    for i, payoff in enumerate(payoffs, start=1):
        own += payoff
        regret.append(board.best(i) - own)
    return StrategyTrace(name, tuple(choices), tuple(payoffs), tuple(regret))


def _index_following(name: str, sequences: Sequence[PayoffSequence], board: LeaderBoard,
                     choices: Sequence[int]) -> StrategyTrace:
    payoffs = [Fraction(sequences[k][i]) for i, k in enumerate(choices)]
    trace = _trace(name, board, choices, payoffs)
    # Playing one of the sequences can never beat the best of them.
    assert all(r >= 0 for r in trace.regret), trace
    return trace


def ftl_strategy(sequences: Sequence[PayoffSequence], n: int) -> StrategyTrace:
    """Play k⁺(i-1) at iteration i; the empty history picks index 0"""
    board = leaderboard(sequences, n)
    choices = [board.leaders[i - 1] for i in range(1, n + 1)]
    return _index_following("ftl", sequences, board, choices)


def fixed_strategy(sequences: Sequence[PayoffSequence], n: int, k: int) -> StrategyTrace:
    """Always play sequence k"""
    if not 0 <= k < len(sequences):
        raise InvalidValueError(f"no sequence with index {k}")
    board = leaderboard(sequences, n)
    return _index_following(f"fixed:{k}", sequences, board, [k] * n)


def lazy_ftl_strategy(sequences: Sequence[PayoffSequence], n: int, period: int) -> StrategyTrace:
    """Follow the leader, but only reconsider the choice every `period` iterations"""
    if period < 1:
        raise InvalidValueError(f"switching period must be >= 1, got {period}")
    board = leaderboard(sequences, n)
    choices = []
    current = 0
    for i in range(1, n + 1):
        if (i - 1) % period == 0:
            current = board.leaders[i - 1]
        choices.append(current)
    return _index_following(f"lazy-ftl:{period}", sequences, board, choices)


def _ewa_weights(board: LeaderBoard, i: int, base: Fraction) -> List[Fraction]:
    return [base ** row[i] for row in board.accumulated]


def ewa_strategy(sequences: Sequence[PayoffSequence], n: int, eta) -> StrategyTrace:
    """Play the sequence with the largest weight (1+eta)^π_k(i-1), lowest index on ties"""
    eta = to_rational(eta)
    if eta <= 0:
        raise InvalidValueError(f"eta must be positive, got {eta}")
    board = leaderboard(sequences, n)
    choices = []
    for i in range(1, n + 1):
        weights = _ewa_weights(board, i - 1, 1 + eta)
        choices.append(weights.index(max(weights)))
    return _index_following(f"ewa:{eta}", sequences, board, choices)


def ewa_mixture_strategy(sequences: Sequence[PayoffSequence], n: int, eta) -> StrategyTrace:
    """Receive the (1+eta)^π-weighted average payoff instead of committing to one sequence"""
    eta = to_rational(eta)
    if eta <= 0:
        raise InvalidValueError(f"eta must be positive, got {eta}")
    board = leaderboard(sequences, n)
    choices, payoffs = [], []
    for i in range(1, n + 1):
        weights = _ewa_weights(board, i - 1, 1 + eta)
        total = sum(weights)
        choices.append(weights.index(max(weights)))
        payoffs.append(sum((w * sequences[k][i - 1] for k, w in enumerate(weights)), ZERO) / total)
    return _trace(f"ewa-mix:{eta}", board, choices, payoffs)


def _ftl_pair_profile(a: int, b: int, n: int) -> Tuple[int, int, int, int]:
    """(gap, final regret, max running regret, zero-regret iterations) for two bit-packed sequences"""
    pa = pb = own = 0
    max_running = regret = zero_iters = 0
    for shift in range(n - 1, -1, -1):
        va = (a >> shift) & 1
        vb = (b >> shift) & 1
        own += va if pa >= pb else vb
        pa += va
        pb += vb
        regret = (pa if pa >= pb else pb) - own
        if regret > max_running:
            max_running = regret
        if regret == 0:
            zero_iters += 1
    return abs(pa - pb), regret, max_running, zero_iters


def _merge_rows(into: Dict[int, List[int]], gap: int, final: int, running: int, count: int, half: int):
    row = into.get(gap)
    if row is None:
        into[gap] = [final, running, count, half]
    else:
        row[0] = max(row[0], final)
        row[1] = max(row[1], running)
        row[2] += count
        row[3] += half


def gap_exhaustive(n: int, workers: int = 1) -> Dict[int, GapRow]:
    """Per-gap worst follow-the-leader regret over all 4^n pairs of bit sequences"""
    if n < 1:
        raise InvalidValueError("the horizon n must be at least 1")
    if n > MAX_GAP_HORIZON:
        raise BudgetExceededError(f"sequence pairs at n={n}", 4 ** n, 4 ** MAX_GAP_HORIZON)
    span = 1 << n

    def scan(first_values: List[int]) -> Dict[int, List[int]]:
        rows: Dict[int, List[int]] = {}
        for a in first_values:
            for b in range(span):
                gap, final, running, zeros = _ftl_pair_profile(a, b, n)
                _merge_rows(rows, gap, final, running, 1, 1 if 2 * zeros >= n else 0)
        return rows

    merged: Dict[int, List[int]] = {}
    for part in parallel_map(scan, chunked(range(span), max(1, workers) * 4), workers):
        for gap, (final, running, count, half) in part.items():
            _merge_rows(merged, gap, final, running, count, half)
    logger.info("gap table for n=%d covers %d pairs", n, sum(r[2] for r in merged.values()))
    return {g: GapRow(g, *merged[g]) for g in sorted(merged)}


def full_gap_pairs(n: int) -> List[Tuple[PayoffSequence, PayoffSequence]]:
    """Every pair whose final gap equals the horizon"""
    if n > MAX_GAP_HORIZON:
        raise BudgetExceededError(f"sequence pairs at n={n}", 4 ** n, 4 ** MAX_GAP_HORIZON)
    found = []
    for a, b in itertools.product(range(1 << n), repeat=2):
        if abs(bin(a).count("1") - bin(b).count("1")) == n:
            found.append((_unpack(a, n), _unpack(b, n)))
    return found


def _unpack(bits: int, n: int) -> PayoffSequence:
    return PayoffSequence(tuple((bits >> shift) & 1 for shift in range(n - 1, -1, -1)))


def gap_sampled(k: int, n: int, n_samples: int, seed: int) -> Dict[int, GapRow]:
    """Gap table over randomly drawn sets of k sequences (gap = leader minus laggard at n)"""
    if k < 2 or n_samples < 1:
        raise InvalidValueError("sampled gap tables need k >= 2 and at least one sample")
    rng = np.random.default_rng(seed)
    merged: Dict[int, List[int]] = {}
    for draw in rng.integers(0, 2, size=(n_samples, k, n)):
        sequences = [PayoffSequence(tuple(int(v) for v in row)) for row in draw]
        trace = ftl_strategy(sequences, n)
        board = leaderboard(sequences, n)
        zeros = sum(1 for r in trace.regret if r == 0)
        _merge_rows(merged, board.gap(n), int(trace.regret[-1]), int(trace.max_regret), 1,
                    1 if 2 * zeros >= n else 0)
    return {g: GapRow(g, *merged[g]) for g in sorted(merged)}


# ---------------------------------------------------------------------------
# Embedding into supervised learning
# ---------------------------------------------------------------------------

def embed_to_supervised(sequences: Sequence[PayoffSequence], d_y: Sequence[int], m: int) -> SupervisedEmbedding:
    """
    Training inputs are the first m iterations, the query is iteration m+1
    (index m). g_k agrees with d_Y exactly where sequence k paid off; its value
    at the query is left open (see SupervisedEmbedding.complete).
    """
    if m < 1:
        raise InvalidValueError("the embedding needs at least one training iteration")
    if len(d_y) < m:
        raise InvalidValueError(f"need {m} labels, got {len(d_y)}")
    if any(y not in (0, 1) for y in d_y):
        raise NonBinaryError(f"labels must be bits, got {tuple(d_y)}")
    _check_sequences(sequences, m + 1)
    considered = tuple(
        tuple(d_y[x] if s[x] == 1 else 1 - d_y[x] for x in range(m)) for s in sequences
    )
    domain = FiniteDomain(m + 1, 2)
    dataset = Dataset(tuple((x, d_y[x]) for x in range(m)))
    return SupervisedEmbedding(domain, considered, dataset, m)


def embedding_cost_equivalence(embedding: SupervisedEmbedding, f_next: int, h_next: int) -> Tuple[Fraction, int]:
    """Next-step OTS cost 1 - δ(h, f) and the matching payoff"""
    if f_next not in (0, 1) or h_next not in (0, 1):
        raise NonBinaryError("query values must be bits")
    cost = ZERO if h_next == f_next else ONE
    payoff = int(ONE - cost)
    assert cost + payoff == 1
    return cost, payoff


def expert_learner(considered: Sequence[TargetFunction], mode: str = "ftl", eta=1) -> Learner:
    """
    Supervised learner that scores each considered function by its agreements
    with the training set (its accumulated payoff) and predicts off the
    training set with the leader ('ftl') or a (1+eta)^score weighted vote ('ewa').
    """
    if mode not in ("ftl", "ewa"):
        raise InvalidValueError(f"unknown expert mode {mode!r}")
    considered = tuple(considered)
    base = 1 + to_rational(eta)

    def rule(d: Dataset, domain: FiniteDomain) -> StochasticHypothesis:
        scores = [sum(1 for x, y in d.pairs if g(x) == y) for g in considered]
        seen = d.memorized()
        if mode == "ftl":
            leader = max(range(len(considered)), key=lambda k: (scores[k], -k))
            return StochasticHypothesis.deterministic(
                domain, [seen.get(x, considered[leader](x)) for x in domain.inputs()])
        weights = [base ** s for s in scores]
        total = sum(weights)
        rows = []
        for x in domain.inputs():
            if x in seen:
                rows.append(tuple(ONE if y == seen[x] else ZERO for y in domain.outputs()))
            else:
                rows.append(tuple(
                    sum((w for w, g in zip(weights, considered) if g(x) == y), ZERO) / total
                    for y in domain.outputs()))
        return StochasticHypothesis(domain, tuple(rows))

    return Learner(f"expert-{mode}", rule)


def embedding_round_trip(sequences: Sequence[PayoffSequence], d_y: Sequence[int], m: int,
                         f_next: int) -> Tuple[Fraction, int]:
    """
    Next-step cost of the embedded follow-the-leader learner and the payoff
    v_{K+1}(m+1) the follow-the-leader strategy collects on the same sequences.
    Sequences need length m + 1; v_k(m+1) fixes g_k at the query.
    """
    _check_sequences(sequences, m + 1)
    embedding = embed_to_supervised(sequences, d_y, m)
    next_values = [f_next if s[m] == 1 else 1 - f_next for s in sequences]
    learner = expert_learner(embedding.complete(next_values), "ftl")
    h = learner.train(embedding.dataset, embedding.domain)
    cost, _ = embedding_cost_equivalence(embedding, f_next, h.deterministic_outputs[embedding.query])
    payoff = int(ftl_strategy(sequences, m + 1).payoffs[m])
    return cost, payoff


def embedding_nfl_average(window: int, k: int = 2, mode: str = "ftl", eta=1) -> Dict[Fraction, int]:
    """
    Uniform-f average next-step cost of the embedded strategy for every
    choice of K considered functions on the window; maps value -> count.
    """
    domain = FiniteDomain(window, 2)
    functions = list(enumerate_functions(domain))
    loss = zero_one_loss(domain)
    values: Dict[Fraction, int] = defaultdict(int)
    for considered in itertools.product(functions, repeat=k):
        learner = expert_learner(considered, mode, eta)
        values[expected_ots_cost_fixed_inputs(learner, domain, range(window - 1), loss)] += 1
    return dict(values)
