"""Command-line front end.

    ctxdom <poset|chain|overlap|growth|puzzle> --input FILE [--seed N] [--trials N]
           [--format csv|json] [--output FILE]

Exit status is 0 on success, 1 for unreadable or invalid input, and 2 when a
checked invariant fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections.abc import Mapping

import numpy as np

from . import classical, experiments, order, quantum
from .errors import ChainTooLong, CtxDomError, ParseError
from .info import binary_entropy, is_monotone_measurement, reflects_max, success_probability

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2


def fmt(x) -> str:
    """CSV cell: 6 significant digits, empty for None."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def to_json(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


class Output:
    """What a subcommand produced: the main text plus an exit status and notes for stderr."""

    def __init__(self, text: str, status: int = EXIT_OK, notes: list[str] | None = None):
        self.text = text
        self.status = status
        self.notes = notes or []


# poset


def run_poset(doc: Mapping, fmt_name: str, **_) -> Output:
    d, content = order.load_poset(doc)
    els = d.elements
    maximal = sorted(order.maximal_elements(d))
    dcpo = order.is_dcpo(d)
    wb = order.way_below_matrix(d)
    trans = order.approximation_transitivity_check(d)
    orth = None
    laws = None
    if content is not None:
        orth = [[order.orthogonal(content, x, y) for y in els] for x in els]
        laws = {
            "monotone": is_monotone_measurement(content).monotone,
            "reflects_max": reflects_max(content).max_reflecting,
        }
    status = EXIT_OK if dcpo and trans.passed else EXIT_INVARIANT
    if fmt_name == "json":
        report = {
            "valid": True,
            "elements": list(els),
            "maximal": maximal,
            "dcpo": dcpo,
            "approximation_transitive": trans.passed,
            "way_below": {x: [y for j, y in enumerate(els) if wb[i, j]] for i, x in enumerate(els)},
        }
        if orth is not None:
            report["orthogonal"] = {
                x: [y for j, y in enumerate(els) if orth[i][j]] for i, x in enumerate(els)
            }
            report["measurement"] = laws
        return Output(to_json(report), status)
    rows = [["valid", "", "", True]]
    rows += [["maximal", x, "", True] for x in maximal]
    rows.append(["dcpo", "", "", dcpo])
    rows.append(["approximation_transitive", "", "", trans.passed])
    rows += [["way_below", x, y, bool(wb[i, j])] for i, x in enumerate(els) for j, y in enumerate(els)]
    if orth is not None:
        rows += [["orthogonal", x, y, orth[i][j]] for i, x in enumerate(els) for j, y in enumerate(els)]
        rows += [[k, "", "", v] for k, v in laws.items()]
    return Output(to_csv(["kind", "x", "y", "value"], rows), status)


# chain


def load_chain(doc: Mapping) -> tuple[quantum.PureState, list[quantum.Context], int, int]:
    if not isinstance(doc, Mapping):
        raise ParseError("chain document must be a JSON object")
    unknown = set(doc) - {"initial", "contexts", "trials", "seed"}
    if unknown:
        raise ParseError(f"unexpected keys in chain document: {sorted(unknown)}")
    initial = experiments.parse_state(doc.get("initial", {"axis_deg": [0, 0], "sign": "+"}))
    raw = doc.get("contexts")
    if not isinstance(raw, list) or not raw:
        raise ParseError('"contexts" must be a nonempty list')
    contexts = []
    for c in raw:
        if not isinstance(c, Mapping) or set(c) != {"axis_deg"}:
            raise ParseError('each context must look like {"axis_deg": [theta, phi]}')
        contexts.append(quantum.context_from_axis(experiments.parse_axis(c["axis_deg"])))
    trials, seed = doc.get("trials", 100000), doc.get("seed", 0)
    for key, v in (("trials", trials), ("seed", seed)):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParseError(f'"{key}" must be an integer')
    if trials < 1:
        raise ParseError('"trials" must be >= 1')
    return initial, contexts, trials, seed


def _seq(code: int, length: int) -> str:
    return "".join(quantum.OUTCOMES[(code >> k) & 1] for k in range(length))


def _is_reset_pattern(contexts) -> bool:
    if len(contexts) != 3:
        return False
    a, b, c = (ctx.axis for ctx in contexts)
    right = math.pi / 2
    return (
        abs(quantum.angle_between(a, b) - right) < 1e-9
        and abs(quantum.angle_between(b, c) - right) < 1e-9
        and quantum.angle_between(a, c) < 1e-9
    )


def run_chain_cmd(doc: Mapping, fmt_name: str, seed=None, trials=None, **_) -> Output:
    initial, contexts, n, s = load_chain(doc)
    n = n if trials is None else trials
    s = s if seed is None else seed
    if n < 1:
        raise ParseError("trials must be >= 1")
    if len(contexts) > quantum.MAX_EXACT_CHAIN:
        raise ChainTooLong(f"{len(contexts)} steps; the exact column stops at {quantum.MAX_EXACT_CHAIN}")
    length = len(contexts)
    exact = quantum.chain_distribution(initial, contexts)
    outcomes = quantum.sample_chains(initial, contexts, n, s)
    codes = outcomes.astype(np.int64) @ (np.int64(1) << np.arange(length, dtype=np.int64))
    counts = np.bincount(codes, minlength=1 << length)
    empirical = {_seq(code, length): c / n for code, c in enumerate(counts) if c}
    tv = 0.5 * math.fsum(abs(empirical.get(k, 0.0) - p) for k, p in exact.items())
    emp_marg = [(1.0 - float(m), float(m)) for m in outcomes.mean(axis=0)]
    exact_marg = quantum.step_marginals(exact)

    reset = None
    if _is_reset_pattern(contexts):
        first_plus = outcomes[:, 0] == 0
        mass = {o: math.fsum(p for k, p in exact.items() if k[0] == "+" and k[2] == o) for o in "+-"}
        total = mass["+"] + mass["-"]
        reset = {
            "exact_third_given_first_plus": None
            if total <= 0
            else [mass["+"] / total, mass["-"] / total],
            "empirical_third_given_first_plus": None
            if not first_plus.any()
            else [
                float((outcomes[first_plus, 2] == 0).mean()),
                float((outcomes[first_plus, 2] == 1).mean()),
            ],
            "direct_overlap_a_c": quantum.context_overlap(contexts[0].axis, contexts[2].axis),
        }
        if total > 0:
            reset["path_overlap_a_c"] = 1.0 - binary_entropy(mass["+"] / total)

    if fmt_name == "json":
        report = {
            "trials": n,
            "seed": s,
            "steps": [
                {"step": k + 1, "empirical": list(emp_marg[k]), "exact": list(exact_marg[k])}
                for k in range(length)
            ],
            "total_variation": tv,
        }
        if length <= 10:
            report["sequences"] = {
                k: {"empirical": empirical.get(k, 0.0), "exact": p} for k, p in exact.items()
            }
        if reset is not None:
            report["reset"] = reset
        return Output(to_json(report))
    rows = []
    for k in range(length):
        for j, o in enumerate(quantum.OUTCOMES):
            rows.append(["marginal", k + 1, o, emp_marg[k][j], exact_marg[k][j]])
    rows.append(["total_variation", "", "", tv, ""])
    if reset is not None:
        for j, o in enumerate(quantum.OUTCOMES):
            e = reset["empirical_third_given_first_plus"]
            x = reset["exact_third_given_first_plus"]
            rows.append(["reset_third_given_first_plus", 3, o, e and e[j], x and x[j]])
        rows.append(["reset_overlap_direct", "", "", "", reset["direct_overlap_a_c"]])
        rows.append(["reset_overlap_path", "", "", "", reset.get("path_overlap_a_c")])
    return Output(to_csv(["quantity", "step", "outcome", "empirical", "exact"], rows))


# overlap


def run_overlap(doc: Mapping, fmt_name: str, **_) -> Output:
    """``{"axes_deg": {"a": [theta, phi], ...}}`` and/or ``{"angles_deg": [...]}``
    (angles from z in the x-z plane)."""
    if not isinstance(doc, Mapping) or not doc or set(doc) - {"axes_deg", "angles_deg"}:
        raise ParseError('overlap document needs "axes_deg" and/or "angles_deg"')
    axes = {}
    raw = doc.get("axes_deg", {})
    if not isinstance(raw, Mapping):
        raise ParseError('"axes_deg" must map names to [theta, phi]')
    for name, v in raw.items():
        axes[name] = experiments.parse_axis(v)
    angles = doc.get("angles_deg", [])
    if not isinstance(angles, list) or not all(
        isinstance(a, (int, float)) and not isinstance(a, bool) for a in angles
    ):
        raise ParseError('"angles_deg" must be a list of numbers')
    rows = []
    names = list(axes)
    for i, m in enumerate(names):
        for n in names[i:]:
            theta = math.degrees(quantum.angle_between(axes[m], axes[n]))
            rows.append([m, n, theta, quantum.context_overlap(axes[m], axes[n])])
    for a in angles:
        other = quantum.axis_in_xz(a)
        theta = math.degrees(quantum.angle_between(quantum.Z_AXIS, other))
        rows.append(["z", f"{a:g}deg", theta, quantum.context_overlap(quantum.Z_AXIS, other)])
    header = ["m", "n", "angle_deg", "overlap"]
    if fmt_name == "json":
        return Output(to_json([dict(zip(header, r)) for r in rows]))
    return Output(to_csv(header, rows))


# growth


def run_growth_cmd(doc: Mapping, fmt_name: str, seed=None, trials=None, **_) -> Output:
    policy, steps, n, s = experiments.load_experiment(doc)
    n = n if trials is None else trials
    s = s if seed is None else seed
    if n < 1:
        raise ParseError("trials must be >= 1")
    curve = experiments.entropy_growth(policy, steps, n, s)
    report = experiments.second_law_report([curve]) if steps >= 2 else None
    status = EXIT_OK if report is None or report.ok else EXIT_INVARIANT
    notes = []
    if report is not None:
        for arm in report.arms:
            notes.append(
                f"{arm.label}: verdict={arm.verdict} expected={arm.expected} "
                f"mean_increment={arm.mean_increment:.6g} nondecreasing={str(arm.nondecreasing).lower()}"
            )
    if fmt_name == "json":
        doc_out = {
            "policy": policy.label,
            "trials": n,
            "seed": s,
            "steps": [
                {
                    "step": p.step,
                    "empirical_entropy_bits": p.entropy,
                    "exact_entropy_bits": p.exact,
                    "stderr_bits": p.stderr,
                }
                for p in curve.points
            ],
        }
        if report is not None:
            doc_out["verdicts"] = [
                {
                    "policy": a.label,
                    "verdict": a.verdict,
                    "expected": a.expected,
                    "max_increment": a.max_increment,
                    "mean_increment": a.mean_increment,
                    "nondecreasing": a.nondecreasing,
                    "ok": a.ok,
                }
                for a in report.arms
            ]
        return Output(to_json(doc_out), status)
    rows = [[p.step, p.entropy, p.exact, p.stderr] for p in curve.points]
    header = ["step", "empirical_entropy_bits", "exact_entropy_bits", "stderr_bits"]
    return Output(to_csv(header, rows), status, notes)


# puzzle


def run_puzzle(doc: Mapping, fmt_name: str, **_) -> Output:
    traj, confidence = classical.load_puzzle(doc)
    threshold = classical.determinism_threshold(traj, confidence)
    rows = []
    for i, st in enumerate(traj.states):
        alive = classical.consistent_hypotheses(st)
        rows.append(
            [
                i,
                len(st.revealed),
                len(alive),
                classical.puzzle_entropy(st),
                success_probability(classical.posterior_vector(st)),
                classical.predict_message(st, confidence),
                threshold is not None and i >= threshold,
            ]
        )
    header = [
        "state",
        "revealed",
        "consistent",
        "entropy_bits",
        "success_probability",
        "prediction",
        "determined",
    ]
    if fmt_name == "json":
        return Output(
            to_json(
                {
                    "confidence": confidence,
                    "static": traj.static,
                    "threshold": threshold,
                    "states": [dict(zip(header, r)) for r in rows],
                }
            )
        )
    return Output(to_csv(header, rows))


COMMANDS = {
    "poset": run_poset,
    "chain": run_chain_cmd,
    "overlap": run_overlap,
    "growth": run_growth_cmd,
    "puzzle": run_puzzle,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ctxdom", description="Order-theoretic information and spin contextuality tools.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", required=True, help="JSON input file")
    p.add_argument("--seed", type=int, help="override the seed in the input file")
    p.add_argument("--trials", type=int, help="override the trial count in the input file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", help="write here instead of stdout")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.input, encoding="utf-8") as fh:
            doc = json.load(fh, object_pairs_hook=_reject_duplicate_keys)
        result = COMMANDS[args.command](doc, args.format, seed=args.seed, trials=args.trials)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: ParseError: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CtxDomError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(result.text)
    else:
        sys.stdout.write(result.text)
    for note in result.notes:
        print(note, file=sys.stderr)
    return result.status


def _reject_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ParseError(f"duplicate key {k!r}")
        out[k] = v
    return out


if __name__ == "__main__":
    sys.exit(main())
