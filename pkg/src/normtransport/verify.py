"""Verification suites with fixed tolerances and byte-stable reports.

Each suite runs a battery of cases against exact values or certified
brackets and returns a SuiteReport.  Tolerances live here, not in the
callers: a suite is the unit that owns its acceptance thresholds.  Reports
serialize to canonical bytes that exclude wall time, so re-running a suite
on the same inputs yields byte-identical output.

The plain-transport control suite is expected to FAIL: it runs the naive
(unnormalized) pushforward through the same stationarity comparison, and a
correct engine must detect the drift.  Wrap it with expect_failure_case to
turn "it failed" into a passing meta-case.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .codes import (
    FinitaryCode,
    check_self_avoiding,
    check_unique_decodability,
    replay_witness,
)
from .core import CylinderEvent, Window, Word, shift_event
from .errors import InsufficientVisitsError, StochasticityError
from .measures import PushforwardModel, cylinder_prob, sample
from .recurrence import (
    EventSet,
    birkhoff_gap_agreement,
    event_prob,
    gap_functional_stats,
    gap_law_table,
    gap_stationarity_report,
    kac_expected_return,
    recurrence_joint_law,
    recurrence_parse,
    recurrence_times,
    return_map_invariance,
    sample_recurrence_trace,
    unary_bridge,
)
from .transport import (
    InverseEvaluator,
    cesaro_profile,
    expected_quasi_period,
    forward,
    normalization_residual,
    transported_model,
)

__all__ = [
    "CaseResult",
    "SuiteReport",
    "make_case",
    "expect_failure_case",
    "combine_reports",
    "stationarity_suite",
    "plain_transport_control",
    "roundtrip_suite",
    "normalization_suite",
    "cesaro_suite",
    "recurrence_suite",
    "code_suite",
]

REPORT_FORMAT_VERSION = 1


# -- report containers -------------------------------------------------------


@dataclass(frozen=True)
class CaseResult:
    """One checked quantity: what was compared, how far apart, and verdict."""

    key: str
    inputs_digest: str
    expected: str
    got: str
    residual: float
    tolerance: float
    passed: bool

    def row(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return "%s  %-44s residual=%.3e tol=%.3e" % (
            mark,
            self.key,
            self.residual,
            self.tolerance,
        )


@dataclass(frozen=True)
class SuiteReport:
    """Ordered case results for one suite, with an all-cases verdict.

    Wall time is measured but excluded from canonical_bytes, so canonical
    output depends only on the inputs.
    """

    suite: str
    cases: tuple[CaseResult, ...]
    passed: bool
    wall_time: float = field(compare=False)

    @property
    def n_failed(self) -> int:
        return sum(1 for c in self.cases if not c.passed)

    def to_dict(self, include_wall_time: bool = True) -> dict:
        d = {
            "format_version": REPORT_FORMAT_VERSION,
            "suite": self.suite,
            "passed": self.passed,
            "n_cases": len(self.cases),
            "n_failed": self.n_failed,
            "cases": [
                {
                    "key": c.key,
                    "inputs_digest": c.inputs_digest,
                    "expected": c.expected,
                    "got": c.got,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                }
                for c in self.cases
            ],
        }
        if include_wall_time:
            d["wall_time_s"] = self.wall_time
        return d

    def canonical_bytes(self) -> bytes:
        return json.dumps(
            self.to_dict(include_wall_time=False),
            sort_keys=True,
            separators=(",", ":"),
        ).encode("ascii")

    def render(self, failures_only: bool = False) -> str:
        lines = ["suite %s: %d cases" % (self.suite, len(self.cases))]
        for c in self.cases:
            if failures_only and c.passed:
                continue
            lines.append("  " + c.row())
        verdict = "PASS" if self.passed else "FAIL (%d cases)" % self.n_failed
        lines.append("suite %s: %s" % (self.suite, verdict))
        return "\n".join(lines)


def _digest(inputs: dict) -> str:
    blob = json.dumps(inputs, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, (int, float, np.floating, np.integer)):
        return repr(float(v))
    return str(v)


def make_case(key, inputs, expected, got, tolerance, residual=None) -> CaseResult:
    """Assemble a CaseResult; residual defaults to |got - expected|."""
    if residual is None:
        residual = abs(float(got) - float(expected))
    residual = float(residual)
    tolerance = float(tolerance)
    return CaseResult(
        key=key,
        inputs_digest=_digest(dict(inputs, case=key)),
        expected=_fmt(expected),
        got=_fmt(got),
        residual=residual,
        tolerance=tolerance,
        passed=residual <= tolerance,
    )


def _finish(name: str, cases, t0: float) -> SuiteReport:
    cases = tuple(cases)
    return SuiteReport(
        suite=name,
        cases=cases,
        passed=all(c.passed for c in cases),
        wall_time=time.perf_counter() - t0,
    )


def expect_failure_case(report: SuiteReport, key: str = "control-must-fail") -> CaseResult:
    """Meta-case that passes exactly when the wrapped report failed.

    Used for negative controls: an engine that cannot detect a planted
    defect is itself broken.
    """
    residual = 1.0 if report.passed else 0.0
    return CaseResult(
        key=key,
        inputs_digest=_digest({"suite": report.suite, "meta": "must-fail"}),
        expected="fail",
        got="pass" if report.passed else "fail",
        residual=residual,
        tolerance=0.0,
        passed=residual == 0.0,
    )


def combine_reports(name: str, reports, extra_cases=()) -> SuiteReport:
    """Roll several reports into one, a summary case per sub-suite."""
    t0 = time.perf_counter()
    cases = []
    seen: dict[str, int] = {}
    for r in reports:
        seen[r.suite] = seen.get(r.suite, 0) + 1
        key = "suite:%s" % r.suite
        if seen[r.suite] > 1:
            key += "#%d" % seen[r.suite]
        cases.append(
            make_case(
                key,
                {"suite": r.suite, "n_cases": len(r.cases), "nth": seen[r.suite]},
                expected=0,
                got=r.n_failed,
                tolerance=0.0,
            )
        )
    cases.extend(extra_cases)
    rep = _finish(name, cases, t0)
    # wall time of the roll-up is the sum of the parts, not assembly time
    total = sum(r.wall_time for r in reports)
    return SuiteReport(rep.suite, rep.cases, rep.passed, total)


# -- word enumeration helpers ------------------------------------------------


def _words_up_to(alphabet, max_len: int):
    stack = [()]
    for _ in range(max_len):
        nxt = []
        for ids in stack:
            for s in range(alphabet.size):
                nxt.append(ids + (s,))
        for ids in nxt:
            yield Word(alphabet, ids)
        stack = nxt


# -- stationarity ------------------------------------------------------------


def stationarity_suite(
    code: FinitaryCode, modelX, max_len: int = 3, max_shift: int = 3
) -> SuiteReport:
    """Transported cylinder probabilities must not move under shifts.

    Compares the value at start 1 with the value at starts 2..max_shift+1
    for every target word of length <= max_len; agreement to 1e-12 is
    required.  The engine computes each start independently (no shared
    shortcut), so equality is evidence, not bookkeeping.
    """
    t0 = time.perf_counter()
    base_inputs = {
        "op": "stationarity",
        "code": code.describe(),
        "model": modelX.descriptor(),
        "max_len": max_len,
        "max_shift": max_shift,
    }
    tm = transported_model(code, modelX)
    cases = []
    for w in _words_up_to(code.target, max_len):
        ref = forward(code, tm, CylinderEvent(code.target, 1, w)).value
        for j in range(1, max_shift + 1):
            got = forward(code, tm, CylinderEvent(code.target, 1 + j, w)).value
            cases.append(
                make_case(
                    "shift:%s:+%d" % (w.render(), j),
                    base_inputs,
                    expected=ref,
                    got=got,
                    tolerance=1e-12,
                )
            )
    return _finish("stationarity", cases, t0)


def plain_transport_control(
    code: FinitaryCode, modelX, max_len: int = 2, max_shift: int = 2
) -> SuiteReport:
    """Run the unnormalized pushforward through the stationarity comparison.

    This suite is supposed to FAIL for every non-degenerate code: the plain
    pushforward pins codeword boundaries to fixed coordinates, so shifted
    cylinders get different probabilities (the coordinate-0 separator is the
    loudest witness).  A pass here means the detector is blind.
    """
    t0 = time.perf_counter()
    push = PushforwardModel(code, modelX)
    base_inputs = {
        "op": "plain-transport-control",
        "code": code.describe(),
        "model": modelX.descriptor(),
        "max_len": max_len,
        "max_shift": max_shift,
    }
    cases = []
    for w in _words_up_to(code.target, max_len):
        ref = cylinder_prob(push, CylinderEvent(code.target, 0, w))
        for j in range(1, max_shift + 1):
            got = cylinder_prob(push, CylinderEvent(code.target, j, w))
            cases.append(
                make_case(
                    "shift:%s:+%d" % (w.render(), j),
                    base_inputs,
                    expected=ref,
                    got=got,
                    tolerance=1e-12,
                )
            )
    return _finish("plain-transport-control", cases, t0)


# -- roundtrip ---------------------------------------------------------------


def roundtrip_suite(
    code: FinitaryCode, modelX, depth: int = 12, max_len: int = 3
) -> SuiteReport:
    """inverse(transport(model)) must recover source cylinder probabilities.

    Each source word of length <= max_len gets two cases: the bracket must
    contain the source probability up to 1e-9 slack, and the bracket width
    at the given depth must itself be below 1e-9.  Mixture sources go
    through their ergodic decomposition on both legs.
    """
    t0 = time.perf_counter()
    base_inputs = {
        "op": "roundtrip",
        "code": code.describe(),
        "model": modelX.descriptor(),
        "depth": depth,
        "max_len": max_len,
    }
    ev = InverseEvaluator(code, transported_model(code, modelX))
    cases = []
    for w in _words_up_to(code.source, max_len):
        a = CylinderEvent(code.source, 1, w)
        expected = cylinder_prob(modelX, a)
        br = ev.value(a, depth)
        outside = max(br.lo - expected, expected - br.hi, 0.0)
        cases.append(
            make_case(
                "contain:%s" % w.render(),
                base_inputs,
                expected=expected,
                got=br.mid,
                tolerance=1e-9,
                residual=outside,
            )
        )
        cases.append(
            make_case(
                "width:%s" % w.render(),
                base_inputs,
                expected=0.0,
                got=br.width,
                tolerance=1e-9,
                residual=br.width,
            )
        )
    return _finish("roundtrip", cases, t0)


# -- normalization -----------------------------------------------------------


def normalization_suite(
    code: FinitaryCode,
    modelX,
    n_symbols: int = 1_000_000,
    seed: int = 2026,
    expected_quasi_period_mean: float | None = None,
) -> SuiteReport:
    """Boundary density times mean quasi-period must equal one.

    Exact legs: the normalization residual per ergodic component (<= 1e-9)
    and the boundary bracket width.  Monte Carlo leg (ergodic sources only):
    sample n_symbols source letters, encode lengths, and compare the
    empirical boundary frequency 1/mean-length against the exact value at
    four delta-method standard deviations.
    """
    t0 = time.perf_counter()
    base_inputs = {
        "op": "normalization",
        "code": code.describe(),
        "model": modelX.descriptor(),
        "n_symbols": n_symbols,
        "seed": seed,
    }
    cases = []
    el = expected_quasi_period(code, modelX)
    if expected_quasi_period_mean is not None:
        cases.append(
            make_case(
                "quasi-period-mean",
                base_inputs,
                expected=expected_quasi_period_mean,
                got=el,
                tolerance=1e-12,
            )
        )
    cases.append(
        make_case(
            "normalization-exact",
            base_inputs,
            expected=0.0,
            got=normalization_residual(code, modelX),
            tolerance=1e-9,
        )
    )
    tm = transported_model(code, modelX)
    ev = InverseEvaluator(code, tm)
    br = ev.boundary()
    cases.append(
        make_case(
            "boundary-width",
            base_inputs,
            expected=0.0,
            got=br.width,
            tolerance=1e-9,
        )
    )
    if modelX.variant != "mixture":
        cases.append(
            make_case(
                "boundary-vs-quasi-period",
                base_inputs,
                expected=1.0 / el,
                got=br.mid,
                tolerance=1e-9 + br.width,
            )
        )
        # Monte Carlo: empirical boundary frequency via sampled code lengths
        ps = sample(modelX, 1, n_symbols, seed)
        lens = np.array(
            [code.length(x) for x in range(code.source.size)], dtype=np.float64
        )
        drawn = lens[np.asarray(ps.window.ids, dtype=np.int64)]
        lbar = float(drawn.mean())
        marginal = modelX.marginal()
        var_len = float(
            math.fsum(
                float(marginal[x]) * (code.length(x) - el) ** 2
                for x in range(code.source.size)
            )
        )
        sigma = math.sqrt(var_len / n_symbols) / (el * el)
        cases.append(
            make_case(
                "mc-boundary-frequency",
                base_inputs,
                expected=1.0 / el,
                got=1.0 / lbar,
                tolerance=4.0 * sigma,
            )
        )
    return _finish("normalization", cases, t0)


# -- Cesaro convergence of the plain pushforward -----------------------------


def cesaro_suite(
    code: FinitaryCode,
    modelX,
    ns=(256, 1024, 4096, 10_000),
    events=None,
    budget: int = 200_000,
) -> SuiteReport:
    """Shift-averages of the pushforward must settle on the transported value.

    For each target event, the Cesaro mean over the first n shifts is
    compared with the stationary transported probability; the gap must
    shrink at every step of ns and end below 1e-2.  This is the slow-lane
    consistency check between the two constructions.
    """
    t0 = time.perf_counter()
    ns = sorted(set(int(n) for n in ns))
    if len(ns) < 2:
        raise ValueError("need at least two horizon values")
    tgt_ab = code.target
    if events is None:
        events = (
            CylinderEvent(tgt_ab, 1, Word(tgt_ab, (0,))),
            CylinderEvent(tgt_ab, 1, Word(tgt_ab, (1,))),
            CylinderEvent(tgt_ab, 1, Word(tgt_ab, (0, 1))),
        )
    base_inputs = {
        "op": "cesaro",
        "code": code.describe(),
        "model": modelX.descriptor(),
        "ns": ns,
    }
    tm = transported_model(code, modelX)
    push = PushforwardModel(code, modelX)
    cases = []
    for ev in events:
        target = forward(code, tm, ev).value
        prof = cesaro_profile(push, ev, ns, budget)
        gaps = {n: abs(prof[n] - target) for n in ns}
        for a, b in zip(ns, ns[1:]):
            cases.append(
                make_case(
                    "decreasing:%s:%d->%d" % (ev.render(), a, b),
                    base_inputs,
                    expected=gaps[a],
                    got=gaps[b],
                    tolerance=0.0,
                    residual=max(gaps[b] - gaps[a], 0.0),
                )
            )
        cases.append(
            make_case(
                "limit:%s:n=%d" % (ev.render(), ns[-1]),
                base_inputs,
                expected=target,
                got=prof[ns[-1]],
                tolerance=1e-2,
            )
        )
    return _finish("cesaro", cases, t0)


# -- recurrence --------------------------------------------------------------


def _event_as_cylinder(C: EventSet) -> CylinderEvent | None:
    if C.kind == "cylinder":
        return C.event
    if len(C.ids) == 1:
        return CylinderEvent(C.alphabet, 0, Word(C.alphabet, (C.ids[0],)))
    return None


def recurrence_suite(
    model,
    C: EventSet,
    seeds=(17, 18),
    n_gaps: int = 100_000,
    r_cap: int = 10,
    j_max: int = 3,
) -> SuiteReport:
    """Return-time laws: exact identities plus sampled agreement.

    Exact legs: the mean-return identity E[R | C] * P(C) = 1, the mass of
    the truncated gap law, invariance of the conditioned law under the
    first-return map (the shift-stationarity of gaps, checked by a linear
    solve rather than truncation), the product form of the joint law when C
    is a single chain state, and the unary-code bridge between window
    probabilities and gap probabilities.  Sampled legs per seed: the raw
    mean gap against the exact mean at four asymptotic standard deviations,
    and total-variation distances of the empirical gap law against both the
    exact law and its own shifted version.  Multi-seed Birkhoff agreement
    and window parsing identities close the suite.
    """
    t0 = time.perf_counter()
    seeds = tuple(int(s) for s in seeds)
    if len(seeds) < 2:
        raise ValueError("need at least two seeds")
    base_inputs = {
        "op": "recurrence",
        "model": model.descriptor(),
        "event": C.render(),
        "seeds": seeds,
        "n_gaps": n_gaps,
        "r_cap": r_cap,
        "j_max": j_max,
    }
    cases = []

    kac = kac_expected_return(model, C)
    p_event = event_prob(model, C)
    cases.append(
        make_case(
            "kac-identity",
            base_inputs,
            expected=1.0,
            got=kac * p_event,
            tolerance=1e-9,
        )
    )
    law = gap_law_table(model, C)
    cases.append(
        make_case(
            "gap-law-mass",
            base_inputs,
            expected=1.0,
            got=law.total() + law.tail,
            tolerance=1e-9,
        )
    )
    cases.append(
        make_case(
            "return-map-invariance",
            base_inputs,
            expected=0.0,
            got=return_map_invariance(model, C),
            tolerance=1e-12,
        )
    )
    # singleton events make gaps independent; the joint law must factor
    if C.kind == "states" and len(C.ids) == 1 and C.pattern_len == 1:
        worst = 0.0
        for r1 in range(1, min(r_cap, 6) + 1):
            p1 = law.probs.get(r1, 0.0)
            for r2 in range(1, min(r_cap, 6) + 1):
                joint = recurrence_joint_law(model, C, (r1, r2))
                worst = max(worst, abs(joint - p1 * law.probs.get(r2, 0.0)))
        cases.append(
            make_case(
                "joint-law-product",
                base_inputs,
                expected=0.0,
                got=worst,
                tolerance=1e-9,
            )
        )

    bridge = unary_bridge(model, C, r_max=r_cap, j_max=j_max, tolerance=1e-9)
    cases.append(
        make_case(
            "bridge-max-residual",
            base_inputs,
            expected=0.0,
            got=bridge.max_residual,
            tolerance=1e-9,
        )
    )
    cases.append(
        make_case(
            "bridge-normalization",
            base_inputs,
            expected=0.0,
            got=bridge.normalization_residual,
            tolerance=1e-9,
        )
    )

    # sampled legs
    raw_stats = gap_functional_stats(model, C, cap=law.r_max)
    sigma_raw = math.sqrt(max(raw_stats.long_run_variance, 0.0) / n_gaps)
    exact_block = {(r,): p for r, p in law.probs.items()}
    for s in seeds:
        trace, _ = sample_recurrence_trace(model, C, n_gaps, s)
        gaps = trace.gaps()[:n_gaps]
        emp_mean = math.fsum(gaps) / len(gaps)
        cases.append(
            make_case(
                "mc-mean-return:seed=%d" % s,
                base_inputs,
                expected=kac,
                got=emp_mean,
                tolerance=4.0 * sigma_raw,
            )
        )
        rep = gap_stationarity_report(trace, 1, exact_law=exact_block)
        cases.append(
            make_case(
                "tv-exact-law:seed=%d" % s,
                base_inputs,
                expected=0.0,
                got=rep.tv_exact,
                tolerance=1e-2,
            )
        )
        cases.append(
            make_case(
                "tv-shifted:seed=%d" % s,
                base_inputs,
                expected=0.0,
                got=rep.tv_offset,
                tolerance=1e-2,
            )
        )
    ag = birkhoff_gap_agreement(model, C, seeds, n_gaps, cap=r_cap)
    cases.append(
        make_case(
            "birkhoff-vs-exact",
            base_inputs,
            expected=ag.exact_mean,
            got=ag.exact_mean + ag.max_deviation,
            tolerance=ag.sigma_factor * ag.sigma_mean,
            residual=ag.max_deviation,
        )
    )
    cases.append(
        make_case(
            "birkhoff-pairwise",
            base_inputs,
            expected=0.0,
            got=ag.max_pairwise,
            tolerance=ag.sigma_factor * math.sqrt(2.0) * ag.sigma_mean,
        )
    )

    # window parsing identities (single-word events only)
    b_event = _event_as_cylinder(C)
    if b_event is not None:
        n_windows = 20
        win_len = int(30 * kac) + C.pattern_len + 8
        bad_concat = 0
        bad_gaps = 0
        bad_first = 0
        used = 0
        for i in range(n_windows):
            ps = sample(model, 0, win_len, seed=7_000_000 + 97 * i)
            try:
                parse = recurrence_parse(ps, b_event)
            except InsufficientVisitsError:
                continue
            used += 1
            w = ps.window
            b0, blast = parse.boundaries[0], parse.boundaries[-1]
            rebuilt = parse.concat()
            orig = w.segment(b0 + 1, blast)
            if rebuilt.start != b0 + 1 or tuple(rebuilt.ids) != tuple(
                int(x) for x in orig
            ):
                bad_concat += 1
            if parse.gaps() != tuple(
                b - a for a, b in zip(parse.boundaries, parse.boundaries[1:])
            ):
                bad_gaps += 1
            anchored = Window(w.alphabet, 0, tuple(int(x) for x in w.ids[b0:]))
            tr = recurrence_times(anchored, C, max_k=1)
            if not tr.found_forward or tr.positions[1] != len(parse.words[0]):
                bad_first += 1
        cases.append(
            make_case(
                "parse-windows-used",
                base_inputs,
                expected=n_windows,
                got=used,
                tolerance=float(n_windows // 2),
            )
        )
        cases.append(
            make_case(
                "parse-concat-identity",
                base_inputs,
                expected=0,
                got=bad_concat,
                tolerance=0.0,
            )
        )
        cases.append(
            make_case(
                "parse-gap-lengths",
                base_inputs,
                expected=0,
                got=bad_gaps,
                tolerance=0.0,
            )
        )
        cases.append(
            make_case(
                "parse-first-return",
                base_inputs,
                expected=0,
                got=bad_first,
                tolerance=0.0,
            )
        )
    return _finish("recurrence", cases, t0)


# -- code hygiene ------------------------------------------------------------


def _count_factorizations(codewords, word_ids: tuple[int, ...], limit: int = 4) -> int:
    """Number of distinct codeword tilings of a word, capped at limit."""
    n = len(word_ids)
    counts = [0] * (n + 1)
    counts[0] = 1
    for pos in range(1, n + 1):
        total = 0
        for cw in codewords:
            k = len(cw)
            if k <= pos and tuple(word_ids[pos - k : pos]) == tuple(cw):
                total += counts[pos - k]
                if total >= limit:
                    break
        counts[pos] = min(total, limit)
    return counts[n]


def code_suite(entries, depth: int = 8) -> SuiteReport:
    """Structural checks for a batch of codes against expected verdicts.

    Each entry is (name, code, expect_self_avoiding, expect_unique).  On a
    claimed self-avoidance violation the witness is replayed at window
    level; on a claimed decodability failure the ambiguous word is
    re-derived by counting its codeword tilings.
    """
    t0 = time.perf_counter()
    cases = []
    for name, code, expect_sa, expect_ud in entries:
        inputs = {"op": "codes", "name": name, "code": code.describe(), "depth": depth}
        sa = check_self_avoiding(code, depth)
        got_sa = "pass(depth=%d)" % sa.depth if sa.passed else (
            "violation(shift=%d)" % sa.witness.shift
        )
        cases.append(
            make_case(
                "self-avoiding:%s" % name,
                inputs,
                expected="pass" if expect_sa else "violation",
                got=got_sa,
                tolerance=0.0,
                residual=0.0 if sa.passed == expect_sa else 1.0,
            )
        )
        if sa.witness is not None:
            ok = replay_witness(code, sa.witness)
            cases.append(
                make_case(
                    "self-avoiding-witness:%s" % name,
                    inputs,
                    expected="replays",
                    got="replays" if ok else "broken",
                    tolerance=0.0,
                    residual=0.0 if ok else 1.0,
                )
            )
        ud = check_unique_decodability(code)
        cases.append(
            make_case(
                "unique-decodability:%s" % name,
                inputs,
                expected="unique" if expect_ud else "ambiguous",
                got="unique" if ud.unique else "ambiguous:%s" % ud.witness.render(),
                tolerance=0.0,
                residual=0.0 if ud.unique == expect_ud else 1.0,
            )
        )
        if ud.witness is not None:
            tilings = _count_factorizations(
                [cw for cw in code.codewords], tuple(ud.witness.ids)
            )
            cases.append(
                make_case(
                    "ambiguity-witness:%s" % name,
                    inputs,
                    expected=2,
                    got=tilings,
                    tolerance=2.0,
                    residual=0.0 if tilings >= 2 else 1.0,
                )
            )
    return _finish("codes", cases, t0)
