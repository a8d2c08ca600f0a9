"""
Experiment dispatch: each experiment runs the engine, writes its CSV artifacts
and returns its verdicts
"""
import logging
import time
from dataclasses import replace
from datetime import datetime, timezone
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from models.data_models import (
    ExperimentConfig, PayoffSequence, ReportBundle, TargetFunction, Verdict, VerdictStatus
)
from models.errors import (
    EmptyOtsError, ExperimentError, InvalidValueError, LabError, SumIdentityError
)
from database.database_manager import RunLedger
from database.text_format import format_rational, load_sequences
from engine.costs import empirical_cost
from engine.enumeration import (
    enumerate_functions, enumerate_labelled_datasets,
    enumerate_training_sets, two_constant_prior
)
from engine.learners import CvSelectionMode, constant_hypothesis, cv_meta, resolve_learner, resolve_learners
from engine.nfl_engine import (
    HALF, cost_distribution_given_f, cv_pair, expected_cost_given_d, expected_cost_given_m,
    f_averaged_distribution, joint_head_to_head, lln_convergence_experiment, nfl_f_average_check,
    nfl_uniform_prior_check, ots_vs_empirical_table, phi_sum_constant, prior_average_check,
    prior_witness_search
)
from engine.olea import (
    embed_to_supervised, embedding_nfl_average, embedding_round_trip, ewa_mixture_strategy,
    ewa_strategy, fixed_strategy, ftl_strategy, full_gap_pairs, gap_exhaustive, gap_sampled,
    lazy_ftl_strategy
)
from runner.config import resolve_eta, resolve_loss, resolve_pi
from runner.reports import (
    ReportWriter, render_distribution, render_pairs, run_metadata, write_metadata, write_verdicts
)

logger = logging.getLogger(__name__)

PASS = VerdictStatus.PASS
FAIL = VerdictStatus.FAIL
INFO = VerdictStatus.INFO

# Mean-cost tolerance for the Monte Carlo prior average
MC_TOLERANCE = 0.02


def _status(ok: bool) -> VerdictStatus:
    return PASS if ok else FAIL


def _run_nfl_f_average(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    learners = resolve_learners(config.learners)
    report = nfl_f_average_check(learners, config.domain, config.m, resolve_pi(config), resolve_loss(config),
                                 force=config.force, replacement=config.replacement,
                                 exclude_empty_ots=config.exclude_empty_ots, workers=config.workers)
    writer.write_distributions("nfl_f_average", report.learner_names, report.distributions)
    return [Verdict(
        "nfl-f-average", _status(report.passed),
        value=render_distribution(report.distributions[0]),
        witness=report.discrepancy.describe() if report.discrepancy else None,
        detail=f"{len(learners)} learners, |F|={config.domain.function_count}",
    )]


def _run_nfl_uniform_prior(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    learners = resolve_learners(config.learners)
    pi = resolve_pi(config)
    loss = resolve_loss(config)
    rows = []
    checked = skipped = 0
    failure = None
    for d in enumerate_labelled_datasets(config.domain, config.m, config.replacement):
        try:
            report = nfl_uniform_prior_check(learners, config.domain, d, loss, pi)
        except EmptyOtsError:
            if not config.exclude_empty_ots:
                raise
            skipped += 1
            continue
        checked += 1
        for name, dist in zip(report.learner_names, report.distributions):
            rows.extend((render_pairs(d.pairs), name, c, p) for c, p in dist.atoms.items())
        if not report.passed and failure is None:
            failure = f"d={render_pairs(d.pairs)}: {report.discrepancy.describe()}"
    writer.write_csv("nfl_uniform_prior", ["dataset", "learner", "cost", "probability"], rows)
    detail = f"{checked} datasets of size {config.m}"
    if skipped:
        detail += f", {skipped} with empty OTS excluded"
    return [Verdict("nfl-uniform-prior", _status(failure is None), value=str(checked), witness=failure,
                    detail=detail)]


def _run_prior_average(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    learners = resolve_learners(config.learners)
    report = prior_average_check(learners, config.domain, config.m, resolve_pi(config), resolve_loss(config),
                                 n_samples=config.n_samples, seed=config.seed, replacement=config.replacement,
                                 exclude_empty_ots=config.exclude_empty_ots)
    rows = []
    for i, name in enumerate(report.learner_names):
        mc = (report.mc_means[i], report.mc_stds[i]) if report.n_samples else (None, None)
        rows.append((name, report.exact_costs[i]) + mc)
    writer.write_csv("prior_average", ["learner", "exact_cost", "mc_mean", "mc_std"], rows)

    verdicts = [Verdict(
        "prior-average-exact", _status(report.exact_equal),
        value=" ".join(format_rational(c) for c in sorted(set(report.exact_costs))),
        detail="expected OTS cost at the uniform prior (barycenter of the prior simplex)",
    )]
    if report.n_samples:
        worst = max(abs(mean - float(exact)) for mean, exact in zip(report.mc_means, report.exact_costs))
        verdicts.append(Verdict(
            "prior-average-monte-carlo", _status(worst < MC_TOLERANCE),
            value=" ".join(f"{n}={m:.6f}" for n, m in zip(report.learner_names, report.mc_means)),
            detail=f"{report.n_samples} flat-Dirichlet priors, max deviation from exact {worst:.6f}",
        ))
        wins = ", ".join(
            f"{report.learner_names[i]}<{report.learner_names[j]}: {frac:.3f}"
            for (i, j), frac in sorted(report.win_fractions.items())
        )
        verdicts.append(Verdict("prior-average-wins", INFO, value=wins,
                                detail="fraction of sampled priors where the first learner has lower cost"))
        verdicts.append(Verdict("prior-average-spread", INFO, value=f"{report.max_distribution_spread:.6f}",
                                detail="max atom difference between prior-averaged cost distributions"))
    return verdicts


def _phi_sum_verdict(config: ExperimentConfig) -> Verdict:
    try:
        value = phi_sum_constant(config.domain, config.m, resolve_pi(config), resolve_loss(config),
                                 config.replacement, config.workers)
    except SumIdentityError as e:
        return Verdict("phi-sum-constant", FAIL, witness=str(e))
    except InvalidValueError as e:
        return Verdict("phi-sum-constant", FAIL, detail=str(e))
    if value == 1:
        detail = "the two selections complement each other off the training set, so the sum is 1, not 1/2"
    elif value == HALF:
        detail = "sum is 1/2"
    else:
        detail = "sum is neither 1/2 nor 1"
    return Verdict("phi-sum-constant", PASS, value=format_rational(value), detail=detail)


def _run_counterexample(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    domain = config.domain
    pi = resolve_pi(config)
    loss = resolve_loss(config)
    algos = resolve_learners(config.learners)
    prior = two_constant_prior(domain)
    contenders = [
        cv_meta(algos, CvSelectionMode.MAX), cv_meta(algos, CvSelectionMode.MIN), resolve_learner("random"),
    ]

    rows = []
    per_d_anti = []
    for f in prior.support:
        for d in enumerate_training_sets(f, config.m, pi, config.replacement):
            for learner in contenders:
                cost = expected_cost_given_d(learner, prior, d, loss, True, pi)
                rows.append((render_pairs(d.pairs), learner.name, cost))
                if learner is contenders[0]:
                    per_d_anti.append(cost)
    writer.write_csv("counterexample", ["dataset", "learner", "expected_ots_cost"], rows)

    anti, cv, rand = (expected_cost_given_m(l, prior, config.m, pi, loss, True, config.replacement)
                      for l in contenders)
    logger.info("two-constant prior: anti-CV %s, CV %s, random %s", anti, cv, rand)
    return [
        Verdict("counterexample-anti-cv", _status(anti == 1 and all(c == 1 for c in per_d_anti)),
                value=format_rational(anti), detail="expected OTS cost of anti-cross-validation"),
        Verdict("counterexample-random", _status(rand == HALF), value=format_rational(rand),
                detail="expected OTS cost of random guessing"),
        Verdict("counterexample-cv", INFO, value=format_rational(cv),
                detail="expected OTS cost of cross-validation"),
        _phi_sum_verdict(config),
    ]


def _run_prior_witness(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    domain = config.domain
    pi = resolve_pi(config)
    loss = resolve_loss(config)
    witness = prior_witness_search(domain, config.m, pi, loss, config.replacement)

    anti_cv = cv_meta(cv_pair(), CvSelectionMode.MAX)
    cv = cv_meta(cv_pair(), CvSelectionMode.MIN)
    rows = []
    constants_ok = True
    for f in enumerate_functions(domain):
        anti = cost_distribution_given_f(anti_cv, f, config.m, pi, loss, True, config.replacement).mean()
        rows.append((f.label(), anti,
                     cost_distribution_given_f(cv, f, config.m, pi, loss, True, config.replacement).mean()))
        if f.is_constant() and anti != 1:
            constants_ok = False
    writer.write_csv("vertex_costs", ["function", "anti_cv_cost", "cv_cost"], rows)

    verdicts = [
        Verdict("prior-witness", _status(witness.anti_cv_cost < HALF), value=format_rational(witness.anti_cv_cost),
                witness=f"f={witness.function.label()}",
                detail=f"cross-validation cost at the witness {format_rational(witness.cv_cost)}"),
        Verdict("prior-witness-constants", _status(constants_ok), value="1",
                detail="anti-cross-validation costs exactly 1 on both constant functions"),
    ]
    phi_sum = _phi_sum_verdict(config)
    if phi_sum.status is PASS and phi_sum.value == "1/1":
        verdicts.append(Verdict("prior-witness-cv-worse", _status(witness.cv_cost > HALF),
                                value=format_rational(witness.cv_cost),
                                detail="with a cost sum of 1, cross-validation must be worse than 1/2 here"))
    else:
        verdicts.append(Verdict("prior-witness-cv-worse", INFO, value=format_rational(witness.cv_cost),
                                detail=f"cost sum is {phi_sum.value or 'not constant'}; no claim checked"))
    return verdicts


def _run_head_to_head(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    learners = resolve_learners(config.learners)
    pi = resolve_pi(config)
    loss = resolve_loss(config)
    common = f_averaged_distribution(learners[0], config.domain, config.m, pi, loss, config.replacement,
                                     config.exclude_empty_ots, True, config.workers)

    rows = []
    verdicts = []
    asymmetric = None
    for i, a in enumerate(learners):
        for b in learners[i + 1:]:
            report = joint_head_to_head(a, b, config.domain, config.m, pi, loss, config.replacement,
                                        config.exclude_empty_ots, config.workers)
            rows.extend((a.name, b.name, ca, cb, p) for (ca, cb), p in report.joint.atoms.items())
            same = report.marginal_a == common and report.marginal_b == common
            verdicts.append(Verdict(f"head-to-head-marginals:{a.name}|{b.name}", _status(same),
                                    value=render_distribution(report.marginal_a),
                                    detail="symmetric joint" if report.symmetric else "asymmetric joint"))
            if not report.symmetric and asymmetric is None:
                (ca, cb), p, q = report.witness
                asymmetric = (f"{a.name} vs {b.name}: P(C_A={format_rational(ca)}, C_B={format_rational(cb)})="
                              f"{format_rational(p)} but {format_rational(q)} after swapping")
    writer.write_csv("head_to_head", ["learner_a", "learner_b", "cost_a", "cost_b", "probability"], rows)

    symmetric_loss = all(loss(a, b) == loss(b, a) for a in range(loss.y_size) for b in range(loss.y_size))
    if asymmetric:
        verdicts.append(Verdict("head-to-head-asymmetry", PASS, witness=asymmetric))
    elif symmetric_loss:
        verdicts.append(Verdict("head-to-head-asymmetry", INFO,
                                detail=f"loss '{loss.name}' is symmetric; every joint is swap-symmetric"))
    else:
        verdicts.append(Verdict("head-to-head-asymmetry", FAIL, detail="no tested pair has an asymmetric joint"))
    return verdicts


def _run_ots_vs_empirical(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    domain = config.domain
    pi = resolve_pi(config)
    loss = resolve_loss(config)
    rows = []
    verdicts = []
    for name in config.learners:
        h_star = constant_hypothesis(name.split(":", 1)[1], domain)
        table = ots_vs_empirical_table(h_star, domain, config.m, pi, loss, config.replacement)
        rows.extend((name, c_hat, expected, mass) for c_hat, (expected, mass) in table.rows.items())
        values = set(table.expected_values())
        ok = len(values) == 1
        if ok and loss.name == "zero-one":
            ok = values == {Fraction(domain.y_size - 1, domain.y_size)}
        verdicts.append(Verdict(f"ots-vs-empirical:{name}", _status(ok),
                                value=" ".join(format_rational(v) for v in sorted(values)),
                                detail=f"{len(table.rows)} empirical-cost rows"))

        learner = resolve_learner(name)
        mean_hat = sum((empirical_cost(f, learner, config.m, pi, loss, config.replacement)
                        for f in enumerate_functions(domain)), Fraction(0)) / domain.function_count
        verdicts.append(Verdict(f"empirical-cost:{name}", INFO, value=format_rational(mean_hat),
                                detail="uniform-f average of the empirical cost"))
    writer.write_csv("ots_vs_empirical", ["learner", "empirical_cost", "expected_ots_cost", "mass"], rows)
    return verdicts


def lln_target(config: ExperimentConfig):
    """The fixed target of the LLN experiment: f(x) = x mod |Y|"""
    domain = config.domain
    return TargetFunction(domain, tuple(x % domain.y_size for x in domain.inputs()))


def _run_lln(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    pi = resolve_pi(config)
    loss = resolve_loss(config)
    f = lln_target(config)
    rows = []
    verdicts = []
    for name in config.learners:
        h_star = constant_hypothesis(name.split(":", 1)[1], config.domain)
        report = lln_convergence_experiment(h_star, f, config.m, pi, loss, config.n_samples, config.seed)
        rows.append((name, config.seed, report.estimate, report.standard_error, report.exact, report.gap))
        verdicts.append(Verdict(
            f"lln:{name}", _status(report.within_bound), value=f"{report.estimate:.6f}",
            detail=(f"C(f,h*)={format_rational(report.exact)}, gap {report.gap:.6f}, "
                    f"3 SE = {3 * report.standard_error:.6f}, {report.n_samples} samples"),
        ))
    writer.write_csv("lln", ["learner", "seed", "estimate", "standard_error", "exact", "gap"], rows)
    return verdicts


def _alternating_pair(n: int) -> List[PayoffSequence]:
    return [PayoffSequence(tuple((i + 1) % 2 for i in range(n))), PayoffSequence(tuple(i % 2 for i in range(n)))]


def _run_olea_gap(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    n = config.horizon
    verdicts = []
    if config.experts == 2:
        table = gap_exhaustive(n, config.workers)
    else:
        table = gap_sampled(config.experts, n, config.n_samples, config.seed)
    writer.write_csv("gap_table", ["gap", "max_final_regret", "max_running_regret", "count_pairs"],
                     [(r.gap, r.max_final_regret, r.max_running_regret, r.count_pairs) for r in table.values()])
    writer.write_csv("gap_detail", ["gap", "count_pairs", "half_zero_regret_pairs"],
                     [(r.gap, r.count_pairs, r.half_zero_regret_pairs) for r in table.values()])

    if config.experts == 2:
        full = table[n]
        verdicts.append(Verdict("olea-gap-full", _status(full.max_running_regret <= 1),
                                value=str(full.max_running_regret),
                                detail="bound 0 plus one tie-break at the empty history"))
        if n >= 2:
            near = table[n - 2]
            verdicts.append(Verdict("olea-gap-minus-two", _status(near.max_running_regret <= 3),
                                    value=str(near.max_running_regret),
                                    detail="bound 2 plus one tie-break at the empty history"))
        pairs = full_gap_pairs(n)
        extreme = all({str(a), str(b)} == {"1" * n, "0" * n} for a, b in pairs)
        verdicts.append(Verdict("olea-gap-full-pairs", _status(extreme), value=str(len(pairs)),
                                detail="every pair at gap n is one all-1 and one all-0 sequence"))
        verdicts.append(Verdict("olea-gap-half-zero", INFO,
                                value=" ".join(f"{r.gap}:{r.half_zero_regret_pairs}/{r.count_pairs}"
                                               for r in table.values()),
                                detail="pairs with zero regret on at least half of the iterations"))
    else:
        verdicts.append(Verdict("olea-gap-sampled", INFO,
                                value=" ".join(f"{r.gap}:{r.max_running_regret}" for r in table.values()),
                                detail=f"{config.n_samples} sampled sets of {config.experts} sequences"))
    verdicts.extend(_strategy_comparison(config, writer))
    return verdicts


def _strategy_comparison(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    n = config.horizon
    sequences = load_sequences(config.source) if config.source else _alternating_pair(n)
    eta = resolve_eta(config)
    traces = [
        ftl_strategy(sequences, n),
        ewa_strategy(sequences, n, eta),
        ewa_mixture_strategy(sequences, n, eta),
        lazy_ftl_strategy(sequences, n, config.period),
    ] + [fixed_strategy(sequences, n, k) for k in range(len(sequences))]
    writer.write_csv(
        "strategies", ["strategy", "iteration", "choice", "payoff", "regret"],
        [(t.name, i + 1, t.choices[i], t.payoffs[i], t.regret[i]) for t in traces for i in range(n)],
    )
    ftl, ewa = traces[0], traces[1]
    summary = " ".join(f"{t.name}={format_rational(t.max_regret)}" for t in traces)
    if config.source:
        return [Verdict("olea-strategies", INFO, value=summary, detail=f"sequences from {config.source.name}")]
    return [Verdict("olea-ewa-vs-ftl", _status(ewa.max_regret <= ftl.max_regret), value=summary,
                    detail="alternating pair: weighted choice regret must not exceed follow-the-leader")]


def _run_olea_embedding(config: ExperimentConfig, writer: ReportWriter) -> List[Verdict]:
    m = config.m
    k = config.experts
    rng = np.random.default_rng(config.seed)
    mismatches = unsound = 0
    for _ in range(config.n_samples):
        bits = rng.integers(0, 2, size=(k, m + 1))
        sequences = [PayoffSequence(tuple(int(v) for v in row)) for row in bits]
        d_y = [int(v) for v in rng.integers(0, 2, size=m)]
        f_next = int(rng.integers(0, 2))
        cost, payoff = embedding_round_trip(sequences, d_y, m, f_next)
        if cost != 1 - payoff:
            mismatches += 1
        embedding = embed_to_supervised(sequences, d_y, m)
        for s, g in zip(sequences, embedding.considered):
            if any((s[x] == 1) != (g[x] == d_y[x]) for x in range(m)):
                unsound += 1
                break
    verdicts = [
        Verdict("olea-embedding-round-trip", _status(mismatches == 0), value=str(config.n_samples),
                detail=f"{mismatches} instances where the next-step cost differs from 1 - v_(K+1)(m+1)"),
        Verdict("olea-embedding-soundness", _status(unsound == 0), value=str(config.n_samples),
                detail="v_k(x) = 1 exactly where g_k(x) = d_Y(x) on the training window"),
    ]

    rows = []
    eta = resolve_eta(config)
    for mode in ("ftl", "ewa"):
        values = embedding_nfl_average(config.x_size, k, mode, eta)
        rows.extend((mode, v, count) for v, count in sorted(values.items()))
        verdicts.append(Verdict(f"olea-embedding-nfl:{mode}", _status(set(values) == {HALF}),
                                value=" ".join(format_rational(v) for v in sorted(values)),
                                detail=f"uniform-f next-step cost over {sum(values.values())} expert sets, "
                                       f"window {config.x_size}"))
    writer.write_csv("embedding_nfl", ["mode", "expected_cost", "expert_sets"], rows)
    return verdicts


EXPERIMENT_RUNNERS: Dict[str, Callable[[ExperimentConfig, ReportWriter], List[Verdict]]] = {
    "nfl-f-average": _run_nfl_f_average,
    "nfl-uniform-prior": _run_nfl_uniform_prior,
    "prior-average": _run_prior_average,
    "counterexample": _run_counterexample,
    "prior-witness": _run_prior_witness,
    "head-to-head": _run_head_to_head,
    "ots-vs-empirical": _run_ots_vs_empirical,
    "lln": _run_lln,
    "olea-gap": _run_olea_gap,
    "olea-embedding": _run_olea_embedding,
}


def run_experiment(config: ExperimentConfig, ledger: Optional[RunLedger] = None) -> ReportBundle:
    """Run one configured experiment and write its artifacts to config.output_dir"""
    started_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    writer = ReportWriter(config.output_dir)
    logger.info("running %s into %s", config.experiment, config.output_dir)
    try:
        verdicts = EXPERIMENT_RUNNERS[config.experiment](config, writer)
    except ExperimentError:
        raise
    except LabError as e:
        raise ExperimentError(config.experiment, e) from e

    params = config.parameters()
    bundle = ReportBundle(config.experiment, [replace(v, parameters=params) for v in verdicts], list(writer.paths))
    bundle.metadata = run_metadata(config, started_at, time.perf_counter() - t0)
    write_verdicts(config.output_dir, bundle.verdicts)
    write_metadata(config.output_dir, bundle)
    if ledger is not None:
        ledger.record_run(bundle)
    return bundle
