"""Named verification suites driven by ``relaybound verify``.

Each suite returns a :class:`SuiteReport`; ``passed`` is False only for build-breaking
failures. Informative checks (e.g. the asymptotic guessing floor on synthetic codes)
are recorded without affecting it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .blocks import all_sequences
from .channels import (RelayChannel, bec, bsc, det_example_channels, product_companion)
from .exponent import bec_exponent, bec_switch_rate, error_exponent
from .info import pmi_quantile
from .simlab.blowup import (EventSet, ProductSpace, blow_up, blowing_up_check, codeword_entropy_check,
                            likely_colors_check)
from .simlab.codes import color_distributions, color_entropies, det_code, det_example_run, random_code
from .simlab.guessing import exact_guessing_success, guessing_decoder_sim
from .simlab.outcome import _plain
from .simlab.resolvability import block_pmi, conditional_block_pmi, csicr_sim, resolvability_sim


@dataclass
class SuiteReport:
    suite: str
    passed: bool
    checks: int
    failures: int
    summary: dict = field(default_factory=dict)
    records: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return _plain({"suite": self.suite, "passed": self.passed, "checks": self.checks,
                       "failures": self.failures, "summary": self.summary, "records": self.records})


# --- concentration ------------------------------------------------------------

def blowup_events(space: ProductSpace, rng) -> list[tuple[str, EventSet]]:
    """Random and structured events in a binary product space."""
    seqs = all_sequences(space.alphabet, space.n)
    weight = seqs.sum(axis=1)
    events = []
    for k in range(7):
        for rep in range(4):
            idx = rng.choice(space.size, size=2 ** k, replace=False)
            events.append((f"random-2^{k}-{rep}", EventSet.from_indices(space, idx)))
    for t in range(4):
        events.append((f"weight<={t}", EventSet(space, weight <= t)))
    for t in range(2):
        events.append((f"weight>={space.n - t}", EventSet(space, weight >= space.n - t)))
    for j in (2, 4, 6):
        events.append((f"prefix-zero-{j}", EventSet(space, ~seqs[:, :j].any(axis=1))))
    center = rng.integers(0, space.alphabet, size=space.n)
    for r in (1, 2):
        events.append((f"ball-{r}", EventSet(space, (seqs != center).sum(axis=1) <= r)))
    events.append(("full", EventSet(space, np.ones(space.size, dtype=bool))))
    return events


def blowup_suite(seed: int = 0, lambdas=(1.5, 2.0, 4.0), blocklengths=(8, 10, 12)) -> SuiteReport:
    rng = np.random.default_rng(seed)
    checks = failures = instances = 0
    summary, records = {}, []
    for n in blocklengths:
        for label, p in (("uniform", [0.5, 0.5]), ("biased-0.3", [0.7, 0.3])):
            space = ProductSpace.iid(p, n)
            margin = math.inf
            for name, event in blowup_events(space, rng):
                for lam in lambdas:
                    out = blowing_up_check(event, lam)
                    checks += 1
                    instances += 1
                    margin = min(margin, out.estimate - out.references["floor"])
                    if not out.passed:
                        failures += 1
                        records.append({"n": n, "measure": label, "event": name, **out.to_dict()})
                # nesting of successive blow-ups
                prev = event
                for l in range(1, 3):
                    cur = blow_up(event, l)
                    checks += 1
                    if not (prev.issubset(cur) and event.issubset(cur)):
                        failures += 1
                        records.append({"n": n, "measure": label, "event": name, "nesting_radius": l})
                    prev = cur
            summary[f"n={n},{label}"] = {"min_margin": margin}
    summary["blowup_instances"] = instances
    return SuiteReport("blowup", failures == 0, checks, failures, summary, records)


def lemmas_suite(seed: int = 0, levels=(1.5, 2.0, 4.0)) -> SuiteReport:
    """Codeword-entropy and likely-color mass checks on seeded random codes."""
    relays = {"bec0.5-iid": RelayChannel(bec(0.5), bec(0.5)),
              "bsc0.1-bsc0.3": RelayChannel(bsc(0.1), bsc(0.3)),
              "bec0.2-bec0.5": RelayChannel(bec(0.2), bec(0.5))}
    checks = failures = 0
    records = []
    worst = {"codeword_entropy": math.inf, "likely_colors": math.inf}
    for name, relay in relays.items():
        for n, rate, r0 in ((3, 1.0, 1 / 3), (4, 0.75, 0.5), (4, 1.0, 0.75), (5, 0.6, 0.4)):
            code = random_code(relay.with_r0(r0), n, rate, r0, [seed, n, int(100 * rate)])
            ent = color_entropies(code, relay.w_z)
            a_n = float(ent.mean()) / n
            cap = min(math.log2(code.coloring.colors) / n, math.log2(relay.w_z.shape[1]))
            checks += 1
            if not -1e-12 <= a_n <= cap + 1e-12:
                failures += 1
                records.append({"relay": name, "n": n, "a_n": a_n, "cap": cap})
            dists = color_distributions(code.codebook, code.coloring, relay.w_z)
            for lam in levels:
                out = codeword_entropy_check(ent, lam)
                checks += 1
                worst["codeword_entropy"] = min(worst["codeword_entropy"], out.estimate - out.references["floor"])
                if not out.passed:
                    failures += 1
                    records.append({"relay": name, "n": n, **out.to_dict()})
                for row in dists:
                    out = likely_colors_check(row / row.sum(), lam)
                    checks += 1
                    worst["likely_colors"] = min(worst["likely_colors"], out.estimate - out.references["floor"])
                    if not out.passed:
                        failures += 1
                        records.append({"relay": name, "n": n, **out.to_dict()})
    return SuiteReport("lemmas", failures == 0, checks, failures, {"min_margin": worst}, records)


# --- guessing --------------------------------------------------------------

def guessing_suite(seed: int = 0, trials: int = 100_000, lam: float = 2.0,
                   seeds=range(1, 11)) -> SuiteReport:
    """Deterministic-code floor on every seed (build-breaking) plus a Monte Carlo/exact cross-check."""
    w_y, w_z = det_example_channels()
    relay = RelayChannel(w_y, w_z, 0.5)
    code = det_code(6, 0.5)
    companion = product_companion(relay)
    exact = exact_guessing_success(code, relay, lam, companion)
    checks = failures = 0
    records = []
    for s in seeds:
        out = guessing_decoder_sim(code, relay, lam, trials, s, companion=companion)
        checks += 1
        ok = out.estimate >= out.references["floor"]
        failures += not ok
        records.append({**out.to_dict(), "passed": ok})
    # synthetic i.i.d. code: Monte Carlo agrees with exact enumeration (informative)
    iid = RelayChannel(bec(0.5), bec(0.5), 0.5)
    syn = random_code(iid, 4, 0.75, 0.5, seed)
    mc = guessing_decoder_sim(syn, iid, lam, max(trials // 5, 1000), seed)
    syn_exact = exact_guessing_success(syn, iid, lam)
    summary = {"det_exact_success": exact,
               "det_floor": records[0]["references"]["floor"] if records else None,
               "iid_monte_carlo": mc.estimate, "iid_halfwidth": mc.ci_halfwidth, "iid_exact": syn_exact,
               "iid_within_ci": abs(mc.estimate - syn_exact) <= mc.ci_halfwidth,
               "iid_floor_met": mc.estimate >= mc.references["floor"]}
    return SuiteReport("guessing", failures == 0, checks, failures, summary, records)


# --- soft covering -------------------------------------------------------------

def _gap_record(low, high) -> tuple[bool, dict]:
    gap = low.estimate - high.estimate
    need = 3.0 * (low.ci_halfwidth + high.ci_halfwidth)
    return gap >= need, {"low_rate": low.to_dict(), "high_rate": high.to_dict(), "gap": gap,
                         "required": need}


def resolvability_suite(seed: int = 0, trials: int = 200, n: int = 6, crossover: float = 0.2) -> SuiteReport:
    p_u, w = [0.5, 0.5], bsc(crossover)
    q90 = pmi_quantile(block_pmi(p_u, w, n), 0.9)
    low = resolvability_sim(p_u, w, n, max(q90 - 0.5, 0.0), trials, seed)
    high = resolvability_sim(p_u, w, n, q90 + 0.5, trials, seed)
    ok, rec = _gap_record(low, high)
    # expected distance along a rate ladder should not increase beyond sampling noise
    ladder = [resolvability_sim(p_u, w, n, r, trials, seed) for r in np.linspace(0.0, 1.5, 6)]
    trend_ok = all(b.estimate <= a.estimate + a.ci_halfwidth + b.ci_halfwidth
                   for a, b in zip(ladder, ladder[1:]))
    summary = {"q90": q90, "gap_ok": ok, "trend_ok": trend_ok,
               "ladder": [(o.params["rate"], o.estimate, o.ci_halfwidth) for o in ladder]}
    failures = int(not ok) + int(not trend_ok)
    return SuiteReport("resolvability", failures == 0, 2, failures, summary, [rec])


def csicr_instance(seed: int = 0):
    relay = RelayChannel(bec(0.2), bec(0.5), 0.5)
    companion = product_companion(relay)
    code = random_code(relay, 4, 1.0, 0.5, seed)
    return relay, companion, code


def csicr_suite(seed: int = 0, trials: int = 100) -> SuiteReport:
    relay, companion, code = csicr_instance(seed)
    q90 = pmi_quantile(conditional_block_pmi(relay, companion, code), 0.9)
    low = csicr_sim(relay, companion, code, max(q90 - 0.5, 0.05), trials=trials, seed=seed)
    high = csicr_sim(relay, companion, code, q90 + 0.5, trials=trials, seed=seed)
    ok, rec = _gap_record(low, high)
    return SuiteReport("csicr", ok, 1, int(not ok), {"q90": q90, "gap_ok": ok}, [rec])


# --- exact checks ------------------------------------------------------------

def det_example_suite(n: int = 6, r0: float = 0.5, messages: int | None = None, seed: int = 0) -> SuiteReport:
    out = det_example_run(n, r0, messages, seed)
    k = out.params["k"]
    rate_ok = out.references["rate"] == (n + k) / n == 1 + k / n
    ok = bool(out.passed) and rate_ok
    return SuiteReport("det-example", ok, 2, int(not out.passed) + int(not rate_ok),
                       {"errors": out.references["errors"], "rate": out.references["rate"],
                        "messages": out.trials}, [out.to_dict()])


def exponent_oracle_suite(eps_values=(0.1, 0.3, 0.5, 0.7), points: int = 50,
                          tol: float = 1e-6, continuity_tol: float = 1e-9) -> SuiteReport:
    """Generic exponent against the erasure-channel closed form on (1 - eps, 1]."""
    checks = failures = 0
    summary = {}
    for eps in eps_values:
        w = bec(eps)
        rates = np.linspace(1.0 - eps, 1.0, points + 1)[1:]
        dev = max(abs(error_exponent(r, w) - bec_exponent(r, eps)) for r in rates)
        switch = bec_switch_rate(eps)
        jump = abs(bec_exponent(switch, eps, "low") - bec_exponent(switch, eps, "high"))
        checks += 2
        failures += int(dev > tol) + int(jump > continuity_tol)
        summary[f"eps={eps}"] = {"max_deviation": dev, "branch_jump": jump}
    return SuiteReport("exponent-oracle", failures == 0, checks, failures, summary)


SUITES = {
    "blowup": blowup_suite,
    "lemmas": lemmas_suite,
    "guessing": guessing_suite,
    "resolvability": resolvability_suite,
    "csicr": csicr_suite,
    "det-example": det_example_suite,
    "exponent-oracle": exponent_oracle_suite,
}
