"""File-driven command line front end.

Four subcommands: ``check-code`` classifies a code file, ``transport`` runs
forward or inverse values for listed cylinders, ``recurrence`` prints exact
return-time laws (optionally exporting a sampled trace), and ``suite``
dispatches the verification suites.

All inputs come from JSON config files; no environment variables are read.
Configs are validated strictly: unknown keys are rejected with their JSON
path, parse errors are reported with line and column, and both exit with
status 2.  Exit status 1 means a property failed (a suite case, a code
violation); 0 means everything checked out.  Reports are byte-identical
across runs of the same config: they embed the config digest and master
seed, and wall time goes to stderr only.

Input paths inside a config are resolved relative to the config file;
output paths (``--out``, ``trace_out``) are resolved relative to the
working directory.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from .codes import (
    make_comma_embedded,
    make_comma_separated,
    make_generic,
    make_unary,
    check_self_avoiding,
    check_unique_decodability,
    replay_witness,
)
from .core import Alphabet, CylinderEvent, shift_event
from .errors import ConfigError, NormTransportError
from .measures import IIDModel, MarkovModel, MixtureModel
from .recurrence import (
    EventSet,
    event_prob,
    gap_law_table,
    kac_expected_return,
    return_map_invariance,
    sample_recurrence_trace,
    write_trace,
)
from .transport import InverseEvaluator, forward, transported_model
from .verify import (
    cesaro_suite,
    code_suite,
    combine_reports,
    expect_failure_case,
    normalization_suite,
    plain_transport_control,
    recurrence_suite,
    roundtrip_suite,
    stationarity_suite,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

CONFIG_FORMAT_VERSION = 1


# -- config loading ----------------------------------------------------------


def _read_config(path: str):
    """Load a JSON document; returns (doc, sha256 hex of the file bytes)."""
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror or e}") from None
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as e:
        raise ConfigError(f"{path}: not valid UTF-8 ({e.reason})") from None
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{path}: parse error at line {e.lineno} column {e.colno}: {e.msg}"
        ) from None
    return doc, hashlib.sha256(raw).hexdigest()


def _need_dict(doc, where: str) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    return doc


def _check_keys(doc: dict, allowed, required, where: str):
    for k in doc:
        if k not in allowed:
            raise ConfigError(f"{where}.{k}: unknown key")
    for k in required:
        if k not in doc:
            raise ConfigError(f"{where}: missing required key '{k}'")


def _check_version(doc: dict, where: str):
    v = doc.get("format_version")
    if v != CONFIG_FORMAT_VERSION:
        raise ConfigError(
            f"{where}.format_version: expected {CONFIG_FORMAT_VERSION}, got {v!r}"
        )


def _as_str(doc, key, where):
    v = doc[key]
    if not isinstance(v, str):
        raise ConfigError(f"{where}.{key}: expected a string")
    return v


def _as_int(doc, key, where, default=None, minimum=None):
    if key not in doc:
        if default is None:
            raise ConfigError(f"{where}: missing required key '{key}'")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}.{key}: expected an integer")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}.{key}: must be >= {minimum}")
    return v


def _as_list(doc, key, where):
    v = doc[key]
    if not isinstance(v, list):
        raise ConfigError(f"{where}.{key}: expected a list")
    return v


# -- domain object builders --------------------------------------------------


def _load_code(cfg_dir: Path, relpath: str, where: str):
    doc, _ = _read_config(str(cfg_dir / relpath))
    doc = _need_dict(doc, where)
    _check_version(doc, where)
    kind = doc.get("kind")
    try:
        if kind == "unary":
            _check_keys(doc, {"format_version", "kind", "support"}, {"support"}, where)
            return make_unary(_as_list(doc, "support", where))
        if kind == "comma_separated":
            _check_keys(
                doc,
                {"format_version", "kind", "words", "separator", "target_labels"},
                {"words", "separator"},
                where,
            )
            return make_comma_separated(
                doc["words"], doc["separator"], doc.get("target_labels")
            )
        if kind == "comma_embedded":
            _check_keys(
                doc,
                {
                    "format_version",
                    "kind",
                    "words",
                    "separator",
                    "suffixes",
                    "target_labels",
                },
                {"words", "separator", "suffixes"},
                where,
            )
            return make_comma_embedded(
                doc["words"],
                doc["separator"],
                doc["suffixes"],
                target_labels=doc.get("target_labels"),
            )
        if kind == "generic":
            _check_keys(
                doc,
                {"format_version", "kind", "codewords", "target_labels"},
                {"codewords"},
                where,
            )
            return make_generic(doc["codewords"], doc.get("target_labels"))
    except NormTransportError as e:
        raise ConfigError(f"{where}: {e}") from None
    raise ConfigError(f"{where}.kind: unknown code kind {kind!r}")


def _build_model_doc(doc: dict, where: str, labels=None, name=None):
    doc = _need_dict(doc, where)
    variant = doc.get("variant")
    nested = labels is not None
    if not nested:
        if "labels" not in doc:
            raise ConfigError(f"{where}: missing required key 'labels'")
        labels = doc["labels"]
        if not isinstance(labels, list) or not all(
            isinstance(x, str) for x in labels
        ):
            raise ConfigError(f"{where}.labels: expected a list of strings")
        name = doc.get("name", "source")
    # components of a mixture inherit the alphabet and carry no header keys
    head = set() if nested else {"format_version", "labels", "name"}
    ab = Alphabet(name, tuple(labels))
    try:
        if variant == "iid":
            _check_keys(doc, head | {"variant", "probs"}, {"probs"}, where)
            return IIDModel(ab, _as_list(doc, "probs", where))
        if variant == "markov":
            _check_keys(doc, head | {"variant", "matrix"}, {"matrix"}, where)
            return MarkovModel(ab, _as_list(doc, "matrix", where))
        if variant == "mixture" and not nested:
            _check_keys(
                doc, head | {"variant", "weights", "components"},
                {"weights", "components"},
                where,
            )
            comps = [
                _build_model_doc(
                    c, f"{where}.components[{i}]", labels=labels, name=name
                )
                for i, c in enumerate(_as_list(doc, "components", where))
            ]
            return MixtureModel(doc["weights"], comps)
    except ConfigError:
        raise
    except NormTransportError as e:
        raise ConfigError(f"{where}: {e}") from None
    raise ConfigError(f"{where}.variant: unknown model variant {variant!r}")


def _load_model(cfg_dir: Path, relpath: str, where: str):
    doc, _ = _read_config(str(cfg_dir / relpath))
    doc = _need_dict(doc, where)
    _check_version(doc, where)
    return _build_model_doc(doc, where)


def _build_word(alphabet: Alphabet, value, where: str) -> Word:
    if isinstance(value, str):
        labels = list(value)
    elif isinstance(value, list) and all(isinstance(x, str) for x in value):
        labels = value
    else:
        raise ConfigError(f"{where}: expected a label string or list of labels")
    try:
        return alphabet.word(labels)
    except NormTransportError as e:
        raise ConfigError(f"{where}: {e}") from None


def _build_cylinder(alphabet: Alphabet, doc, where: str) -> CylinderEvent:
    doc = _need_dict(doc, where)
    _check_keys(doc, {"start", "word"}, {"start", "word"}, where)
    start = _as_int(doc, "start", where)
    return CylinderEvent(alphabet, start, _build_word(alphabet, doc["word"], where))


def _build_event_set(alphabet: Alphabet, doc, where: str) -> EventSet:
    doc = _need_dict(doc, where)
    kind = doc.get("kind")
    try:
        if kind == "states":
            _check_keys(doc, {"kind", "symbols"}, {"symbols"}, where)
            return EventSet.from_states(alphabet, _as_list(doc, "symbols", where))
        if kind == "cylinder":
            _check_keys(doc, {"kind", "word"}, {"word"}, where)
            return EventSet.from_event(
                CylinderEvent(alphabet, 0, _build_word(alphabet, doc["word"], where))
            )
    except ConfigError:
        raise
    except (NormTransportError, ValueError) as e:
        raise ConfigError(f"{where}: {e}") from None
    raise ConfigError(f"{where}.kind: unknown event kind {kind!r}")


def _pair_check(code, model, where: str):
    if model.alphabet != code.source:
        raise ConfigError(
            f"{where}: model alphabet {model.alphabet.labels} does not match "
            f"code source {code.source.labels}"
        )


# -- report plumbing ---------------------------------------------------------


class _Report:
    def __init__(self, command: str, digest: str, seed: int):
        self.lines = [
            "normtransport report v1",
            f"command: {command}",
            f"config: sha256={digest}",
            f"seed: {seed}",
        ]

    def add(self, text: str = ""):
        self.lines.extend(text.split("\n") if text else [""])

    def emit(self, out_path: str | None) -> str:
        text = "\n".join(self.lines) + "\n"
        sys.stdout.write(text)
        if out_path:
            Path(out_path).write_text(text, encoding="utf-8")
        return text


def _seed_of(args, doc: dict) -> int:
    if args.seed is not None:
        return args.seed
    return _as_int(doc, "seed", "$", default=0)


# -- subcommands -------------------------------------------------------------


_CHECK_KEYS = {"format_version", "seed", "code", "depth"}


def _cmd_check_code(args) -> int:
    doc, digest = _read_config(args.config)
    doc = _need_dict(doc, "$")
    _check_version(doc, "$")
    _check_keys(doc, _CHECK_KEYS, {"code"}, "$")
    cfg_dir = Path(args.config).resolve().parent
    depth = args.depth if args.depth is not None else _as_int(doc, "depth", "$", 8, 2)
    code = _load_code(cfg_dir, _as_str(doc, "code", "$"), "$.code")

    rep = _Report("check-code", digest, _seed_of(args, doc))
    rep.add()
    rep.add(f"kind: {code.kind}")
    rep.add("codewords:")
    for x in range(code.source.size):
        cw = "".join(code.target.label_of(t) for t in code.codewords[x])
        rep.add(f"  {code.source.label_of(x)} -> {cw}")

    ud = check_unique_decodability(code)
    ok = True
    if ud.unique:
        rep.add("unique-decodability: unique")
    else:
        ok = False
        rep.add(f"unique-decodability: AMBIGUOUS, witness {ud.witness.render()}")
        left, right = ud.parses
        left = " ".join(code.source.label_of(x) for x in left)
        right = " ".join(code.source.label_of(x) for x in right)
        rep.add(f"  parses: [{left}] and [{right}]")

    sa = check_self_avoiding(code, depth)
    if sa.passed:
        rep.add(f"self-avoiding: pass (searched {sa.depth} codewords per side)")
    else:
        ok = False
        w = sa.witness
        rep.add(f"self-avoiding: VIOLATION at shift {w.shift}")
        srcs = " ".join(
            code.source.label_of(x) for x in w.left_sources + w.right_sources
        )
        rep.add(f"  source word: {srcs}")
        rep.add(f"  re-parse start: {w.reparse_start}")
        rep.add(f"  witness replays: {replay_witness(code, w)}")
    rep.add()
    rep.add("verdict: %s" % ("pass" if ok else "FAIL"))
    rep.emit(args.out)
    return EXIT_OK if ok else EXIT_FAIL


_TRANSPORT_KEYS = {
    "format_version",
    "seed",
    "code",
    "model",
    "direction",
    "cylinders",
    "depth",
}


def _cmd_transport(args) -> int:
    doc, digest = _read_config(args.config)
    doc = _need_dict(doc, "$")
    _check_version(doc, "$")
    _check_keys(doc, _TRANSPORT_KEYS, {"code", "model", "direction", "cylinders"}, "$")
    cfg_dir = Path(args.config).resolve().parent
    code = _load_code(cfg_dir, _as_str(doc, "code", "$"), "$.code")
    model = _load_model(cfg_dir, _as_str(doc, "model", "$"), "$.model")
    _pair_check(code, model, "$.model")
    direction = _as_str(doc, "direction", "$")
    if direction not in ("forward", "inverse"):
        raise ConfigError(f"$.direction: expected 'forward' or 'inverse', got {direction!r}")
    depth = args.depth if args.depth is not None else _as_int(doc, "depth", "$", 12, 1)

    rep = _Report("transport", digest, _seed_of(args, doc))
    rep.add()
    rep.add(f"direction: {direction}")
    tm = transported_model(code, model)
    if direction == "forward":
        rep.add("event            value                numerator            denominator")
        for i, cdoc in enumerate(_as_list(doc, "cylinders", "$")):
            ev = _build_cylinder(code.target, cdoc, f"$.cylinders[{i}]")
            note = ""
            if ev.start < 1:
                ev = shift_event(ev, 1 - ev.start)
                note = "   (canonicalized to start 1 by stationarity)"
            res = forward(code, tm, ev)
            rep.add(
                "%-16s %.17g  %.17g  %.17g%s"
                % (res.event.render(), res.value, res.numerator, res.denominator, note)
            )
            for comp in res.components:
                rep.add(
                    "  component w=%.17g value=%.17g" % (comp.weight, comp.value)
                )
    else:
        ev_engine = InverseEvaluator(code, tm)
        b = ev_engine.boundary(depth)
        rep.add("boundary: [%.17g, %.17g] width %.3g" % (b.lo, b.hi, b.width))
        rep.add("event            bracket")
        for i, cdoc in enumerate(_as_list(doc, "cylinders", "$")):
            ev = _build_cylinder(code.source, cdoc, f"$.cylinders[{i}]")
            note = ""
            if ev.start != 1:
                ev = shift_event(ev, 1 - ev.start)
                note = "   (canonicalized to start 1 by stationarity)"
            br = ev_engine.value(ev, depth)
            rep.add(
                "%-16s [%.17g, %.17g] width %.3g%s"
                % (ev.render(), br.lo, br.hi, br.width, note)
            )
    rep.emit(args.out)
    return EXIT_OK


_RECURRENCE_KEYS = {
    "format_version",
    "seed",
    "model",
    "event",
    "law_head",
    "trace_gaps",
    "trace_out",
}


def _cmd_recurrence(args) -> int:
    doc, digest = _read_config(args.config)
    doc = _need_dict(doc, "$")
    _check_version(doc, "$")
    _check_keys(doc, _RECURRENCE_KEYS, {"model", "event"}, "$")
    cfg_dir = Path(args.config).resolve().parent
    model = _load_model(cfg_dir, _as_str(doc, "model", "$"), "$.model")
    C = _build_event_set(model.alphabet, doc["event"], "$.event")
    seed = _seed_of(args, doc)
    law_head = _as_int(doc, "law_head", "$", 8, 1)

    rep = _Report("recurrence", digest, seed)
    rep.add()
    rep.add(f"event: {C.render()}")
    p = event_prob(model, C)
    kac = kac_expected_return(model, C)
    rep.add("P(C) = %.17g" % p)
    rep.add("E[R | C] = %.17g" % kac)
    rep.add("E[R | C] * P(C) - 1 = %.3g" % (kac * p - 1.0))
    rep.add("return-map invariance residual = %.3g" % return_map_invariance(model, C))
    law = gap_law_table(model, C)
    rep.add("gap law (first %d of %d tabulated, tail %.3g):" % (law_head, law.r_max, law.tail))
    for r in sorted(law.probs)[:law_head]:
        rep.add("  P(gap = %d) = %.17g" % (r, law.probs[r]))

    if "trace_out" in doc:
        n_gaps = _as_int(doc, "trace_gaps", "$", 1000, 1)
        out_path = _as_str(doc, "trace_out", "$")
        trace, _ = sample_recurrence_trace(model, C, n_gaps, seed)
        write_trace(trace, out_path, model=model, event=C, seed=seed)
        rep.add(
            "trace: %d visits written to %s" % (len(trace.positions), out_path)
        )
    rep.emit(args.out)
    return EXIT_OK


_SUITE_KEYS = {
    "format_version",
    "seed",
    "suite",
    "code",
    "model",
    "depth",
    "max_len",
    "max_shift",
    "n_symbols",
    "quasi_period_mean",
    "cesaro_ns",
    "recurrence",
    "codes",
}

_SUITE_NAMES = (
    "stationarity",
    "roundtrip",
    "normalization",
    "cesaro",
    "recurrence",
    "codes",
    "control",
    "all",
)


def _suite_recurrence_reports(doc, cfg_dir: Path, seed: int):
    reports = []
    for i, entry in enumerate(_as_list(doc, "recurrence", "$")):
        where = f"$.recurrence[{i}]"
        entry = _need_dict(entry, where)
        _check_keys(
            entry,
            {"model", "event", "seeds", "n_gaps", "r_cap", "j_max"},
            {"model", "event"},
            where,
        )
        model = _load_model(cfg_dir, _as_str(entry, "model", where), where + ".model")
        C = _build_event_set(model.alphabet, entry["event"], where + ".event")
        seeds = entry.get("seeds", [seed + 1, seed + 2])
        if not isinstance(seeds, list) or len(seeds) < 2 or not all(
            isinstance(s, int) and not isinstance(s, bool) for s in seeds
        ):
            raise ConfigError(f"{where}.seeds: expected a list of two or more integers")
        reports.append(
            recurrence_suite(
                model,
                C,
                seeds=seeds,
                n_gaps=_as_int(entry, "n_gaps", where, 100_000, 10),
                r_cap=_as_int(entry, "r_cap", where, 10, 1),
                j_max=_as_int(entry, "j_max", where, 3, 1),
            )
        )
    return reports


def _suite_code_entries(doc, cfg_dir: Path):
    entries = []
    for i, entry in enumerate(_as_list(doc, "codes", "$")):
        where = f"$.codes[{i}]"
        entry = _need_dict(entry, where)
        _check_keys(
            entry,
            {"name", "code", "self_avoiding", "unique"},
            {"name", "code", "self_avoiding", "unique"},
            where,
        )
        if not isinstance(entry["self_avoiding"], bool) or not isinstance(
            entry["unique"], bool
        ):
            raise ConfigError(f"{where}: expectations must be booleans")
        entries.append(
            (
                _as_str(entry, "name", where),
                _load_code(cfg_dir, _as_str(entry, "code", where), where + ".code"),
                entry["self_avoiding"],
                entry["unique"],
            )
        )
    return entries


def _cmd_suite(args) -> int:
    doc, digest = _read_config(args.config)
    doc = _need_dict(doc, "$")
    _check_version(doc, "$")
    _check_keys(doc, _SUITE_KEYS, {"suite"}, "$")
    name = _as_str(doc, "suite", "$")
    if name not in _SUITE_NAMES:
        raise ConfigError(
            f"$.suite: unknown suite {name!r}; choose from {', '.join(_SUITE_NAMES)}"
        )
    cfg_dir = Path(args.config).resolve().parent
    seed = _seed_of(args, doc)
    depth = args.depth if args.depth is not None else _as_int(doc, "depth", "$", 12, 1)
    max_len = _as_int(doc, "max_len", "$", 4, 1)
    max_shift = _as_int(doc, "max_shift", "$", 3, 1)

    def pair():
        if "code" not in doc or "model" not in doc:
            raise ConfigError(f"$: suite '{name}' needs 'code' and 'model'")
        code = _load_code(cfg_dir, _as_str(doc, "code", "$"), "$.code")
        model = _load_model(cfg_dir, _as_str(doc, "model", "$"), "$.model")
        _pair_check(code, model, "$.model")
        return code, model

    t0 = time.perf_counter()
    reports = []
    extra_cases = []
    if name in ("stationarity", "all"):
        code, model = pair()
        reports.append(stationarity_suite(code, model, max_len, max_shift))
    if name in ("roundtrip", "all"):
        code, model = pair()
        reports.append(roundtrip_suite(code, model, depth, max_len=3))
    if name in ("normalization", "all"):
        code, model = pair()
        qpm = doc.get("quasi_period_mean")
        if qpm is not None and not isinstance(qpm, (int, float)):
            raise ConfigError("$.quasi_period_mean: expected a number")
        reports.append(
            normalization_suite(
                code,
                model,
                n_symbols=_as_int(doc, "n_symbols", "$", 1_000_000, 100),
                seed=seed,
                expected_quasi_period_mean=qpm,
            )
        )
    if name in ("cesaro", "all"):
        code, model = pair()
        ns = doc.get("cesaro_ns", [256, 1024, 4096, 10_000])
        if not isinstance(ns, list) or not all(
            isinstance(n, int) and n >= 1 for n in ns
        ):
            raise ConfigError("$.cesaro_ns: expected a list of positive integers")
        budget = args.budget if args.budget is not None else 200_000
        reports.append(cesaro_suite(code, model, ns=ns, budget=budget))
    if name in ("recurrence", "all"):
        if "recurrence" not in doc:
            raise ConfigError("$: suite 'recurrence' needs a 'recurrence' list")
        reports.extend(_suite_recurrence_reports(doc, cfg_dir, seed))
    if name in ("codes", "all"):
        if "codes" not in doc:
            raise ConfigError("$: suite 'codes' needs a 'codes' list")
        reports.append(code_suite(_suite_code_entries(doc, cfg_dir), depth=8))
    if name in ("control", "all"):
        code, model = pair()
        control = plain_transport_control(code, model)
        if name == "control":
            reports.append(control)
        else:
            extra_cases.append(expect_failure_case(control))

    rep = _Report("suite", digest, seed)
    for r in reports:
        rep.add()
        rep.add(r.render())
    if name == "all":
        rolled = combine_reports("all", reports, extra_cases)
        rep.add()
        rep.add(rolled.render())
        passed = rolled.passed
    else:
        passed = all(r.passed for r in reports)
    rep.add()
    rep.add("verdict: %s" % ("pass" if passed else "FAIL"))
    rep.emit(args.out)
    print("wall time: %.2fs" % (time.perf_counter() - t0), file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


# -- argument parsing --------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="normtransport", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for cmd, fn in (
        ("check-code", _cmd_check_code),
        ("transport", _cmd_transport),
        ("recurrence", _cmd_recurrence),
        ("suite", _cmd_suite),
    ):
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--seed", type=int, default=None, help="override config seed")
        sp.add_argument("--out", default=None, help="also write the report here")
        sp.add_argument("--depth", type=int, default=None, help="override depth")
        sp.add_argument(
            "--budget", type=int, default=None, help="override enumeration budget"
        )
        sp.set_defaults(fn=fn)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_USAGE
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NormTransportError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
