"""``cb-lab``: build or load a scenario, run theorem checks, report.

Exit status is 0 when every non-vacuous check passes, 1 when some check
fails, and 2 for unusable input (bad arguments, malformed files, scenarios
that violate the hypotheses).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Any, Callable, Sequence

from .algebra import QQ, Field
from .cb import (CIScenario, Split, ValidationError, all_splits, li_degree, propagation,
                 tv_sweep)
from .detloci import DetScenario, det_cb_check
from .koszul import koszul_report
from .scenario_io import (FileScenario, ScenarioFormatError, load_scenario, parse_field_name,
                          scenario_to_dict)
from .scenarios import BuildError, ScenarioSpec, det_from_ci

BUILTINS = {"twisted-cubic": "twisted_cubic", "line-grid": "line_grid",
            "det-eleven-points": "det_eleven_points"}
CHECKS = ("all", "cb", "tv", "det", "koszul")


class TaskError(ValueError):
    """A task cannot be run on the scenario it was given."""


# --------------------------------------------------------------------------
# reports


@dataclass
class TaskResult:
    name: str
    kind: str
    inputs: dict
    summary: dict
    details: list[dict]
    passed: bool
    vacuous: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "inputs": self.inputs,
                "summary": self.summary, "details": self.details, "pass": self.passed,
                "vacuous": self.vacuous}

    @classmethod
    def from_dict(cls, d: dict) -> "TaskResult":
        return cls(d["name"], d["kind"], d["inputs"], d["summary"], d["details"], d["pass"],
                   d["vacuous"])


@dataclass
class RunReport:
    scenario: dict
    field: dict
    tasks: list[TaskResult] = dc_field(default_factory=list)
    timing: dict | None = None

    @property
    def passed(self) -> bool:
        return all(t.passed or t.vacuous for t in self.tasks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> dict:
        d = {"scenario": self.scenario, "field": self.field,
             "tasks": [t.to_dict() for t in self.tasks], "pass": self.passed}
        if self.timing is not None:
            d["timing"] = self.timing
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(d["scenario"], d["field"], [TaskResult.from_dict(t) for t in d["tasks"]],
                   d.get("timing"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        desc = self.scenario.get("name") or self.scenario.get("kind", "scenario")
        lines = [f"scenario {desc} over {_field_label(self.field)}"
                 + (f" (seed {self.scenario['seed']})" if "seed" in self.scenario else "")]
        for t in self.tasks:
            status = "VACUOUS" if t.vacuous else ("PASS" if t.passed else "FAIL")
            lines.append(f"[{status}] {t.name}: {_summary_text(t.summary)}")
            if self.timing and t.name in self.timing:
                lines[-1] += f" ({self.timing[t.name]:.2f}s)"
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def _field_label(spec: dict) -> str:
    return "Q" if spec.get("kind") == "Q" else f"F_{spec.get('p')}"


def _summary_text(summary: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in summary.items())


# --------------------------------------------------------------------------
# tasks


@dataclass
class Context:
    """What a task may use: the scenario views and reproduction metadata."""

    ci: CIScenario | None
    det: DetScenario | None
    splits: list[Split]
    meta: dict


def _need_ci(ctx: Context, kind: str) -> CIScenario:
    if ctx.ci is None:
        raise TaskError(f"{kind} tasks need a complete-intersection scenario")
    return ctx.ci


def _resolve_degree(sc: CIScenario, spec: Any) -> int:
    if spec in (None, "canonical"):
        return sc.canonical_degree()
    if spec == "li":
        if not sc.excess:
            return sc.canonical_degree()
        return li_degree(sc.degrees, sc.n, sc.excess_dim, sc.equation_degree)
    if isinstance(spec, int) and not isinstance(spec, bool):
        return spec
    raise TaskError(f"bad degree {spec!r}; expected an integer, \"canonical\" or \"li\"")


def _int_range(spec: Any, what: str) -> list[int]:
    if isinstance(spec, list) and len(spec) == 2 and all(isinstance(x, int) for x in spec):
        lo, hi = spec
        if lo > hi:
            raise TaskError(f"empty {what} range {spec}")
        return list(range(lo, hi + 1))
    if isinstance(spec, int) and not isinstance(spec, bool):
        return [spec]
    raise TaskError(f"bad {what} range {spec!r}; expected [lo, hi]")


def run_cb(ctx: Context, task: dict) -> TaskResult:
    """Propagation across Z at one degree, with jets of a given order along W."""
    sc = _need_ci(ctx, "cb")
    order = task.get("jet_order", 0)
    degree = _resolve_degree(sc, task.get("degree"))
    expect = task.get("expect", "holds")
    if expect not in ("holds", "fails"):
        raise TaskError("expect must be \"holds\" or \"fails\"")
    omit = task.get("omit", list(range(len(sc.points))))
    results = [propagation(sc, sc.excess_conditions(order), degree, i) for i in omit]
    live = [r for r in results if not r.vacuous]
    holds = all(r.holds for r in results)
    failing = [r.omit for r in results if not r.holds]
    passed = holds if expect == "holds" else bool(failing)
    summary = {"degree": degree, "jet_order": order, "holds_everywhere": holds,
               "failing_omissions": failing, "expected": expect}
    inputs = {**ctx.meta, "degree": degree, "jet_order": order, "omit": list(omit),
              "expect": expect}
    return TaskResult(task.get("name", "cb"), "cb", inputs, summary,
                      [r.to_dict() for r in results], passed, not live)


def run_tv(ctx: Context, task: dict) -> TaskResult:
    """``v2 <= v1`` over a twist range and a set of splits."""
    sc = _need_ci(ctx, "tv")
    twists = _int_range(task.get("a", [0, 2]), "twist")
    mult = task.get("multiplier", True)
    splits = _task_splits(ctx, task, len(sc.points))
    reports = tv_sweep(sc, twists, use_multiplier=mult, splits=splits)
    live = [r for r in reports if not r.vacuous]
    failures = sum(not r.passed for r in live)
    summary = {"twists": twists, "splits": len(splits), "checks": len(reports),
               "failures": failures, "multiplier": bool(mult and sc.excess),
               "max_v1": max((r.v1 for r in reports), default=0),
               "max_v2": max((r.v2 for r in reports), default=0)}
    inputs = {**ctx.meta, "a": [twists[0], twists[-1]], "multiplier": mult,
              "splits": [list(s.z1) for s in splits]}
    return TaskResult(task.get("name", "tv"), "tv", inputs, summary,
                      [r.to_dict() for r in reports], failures == 0, not live)


def _task_splits(ctx: Context, task: dict, size: int) -> list[Split]:
    if "splits" in task:
        try:
            return [Split.from_z1(z, size) for z in task["splits"]]
        except (ValueError, IndexError, TypeError) as exc:
            raise TaskError(f"bad split: {exc}") from None
    if task.get("use_file_splits") and ctx.splits:
        return list(ctx.splits)
    sizes = task.get("sizes")
    splits = all_splits(size)
    if sizes is not None:
        splits = [s for s in splits if len(s.z1) in set(sizes)]
    return splits


def run_det(ctx: Context, task: dict) -> TaskResult:
    """``c2 <= c1`` for a determinantal locus (a CI is read as the e = 0 case)."""
    sc = ctx.det if ctx.det is not None else det_from_ci(_need_ci(ctx, "det"))
    splits = _task_splits(ctx, task, len(sc.points))
    reports = [det_cb_check(sc, s) for s in splits]
    live = [r for r in reports if not r.vacuous]
    failures = sum(not r.passed for r in live)
    positive = [list(r.split.z1) for r in reports if r.c1 or r.c2]
    summary = {"splits": len(reports), "failures": failures, "nonzero_c": positive}
    inputs = {**ctx.meta, "splits": [list(s.z1) for s in splits]}
    return TaskResult(task.get("name", "det"), "det", inputs, summary,
                      [r.to_dict() for r in reports], failures == 0, not live)


def run_koszul(ctx: Context, task: dict) -> TaskResult:
    """Homology of degree strands of the Koszul or Skoda complex over a twist window.

    ``expect="exact"`` asks for vanishing homology at positions ``>= 1`` (and,
    for the Skoda variant, a tail image equal to the jet + point condition
    space); ``expect="excess"`` asks for nonzero homology there at every twist.
    """
    sc = _need_ci(ctx, "koszul")
    variant = task.get("variant", "koszul")
    expect = task.get("expect", "exact")
    if expect not in ("exact", "excess"):
        raise TaskError("expect must be \"exact\" or \"excess\"")
    twists = _int_range(task.get("twists", [sum(sc.degrees), sum(sc.degrees) + 3]), "twist")
    try:
        reports = [koszul_report(sc, t, variant) for t in twists]
    except ValueError as exc:
        raise TaskError(str(exc)) from None
    if expect == "exact":
        ok = [r.interior_exact and r.tail_matches is not False for r in reports]
    else:
        ok = [not r.interior_exact for r in reports]
    summary = {"variant": variant, "twists": [twists[0], twists[-1]], "expected": expect,
               "homology": {str(r.t): r.homology for r in reports},
               "failing_twists": [r.t for r, good in zip(reports, ok) if not good]}
    inputs = {**ctx.meta, "variant": variant, "twists": [twists[0], twists[-1]],
              "expect": expect}
    return TaskResult(task.get("name", f"koszul-{variant}"), "koszul", inputs, summary,
                      [r.to_dict() for r in reports], all(ok), False)


RUNNERS: dict[str, Callable[[Context, dict], TaskResult]] = {
    "cb": run_cb, "tv": run_tv, "det": run_det, "koszul": run_koszul}


def thread_count() -> int:
    raw = os.environ.get("CB_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_tasks(ctx: Context, tasks: Sequence[dict], timing: bool = False,
              threads: int | None = None) -> tuple[list[TaskResult], dict]:
    """Run tasks (possibly in parallel); results follow declaration order."""
    times: dict[str, float] = {}

    def one(task: dict) -> TaskResult:
        start = time.perf_counter()
        result = RUNNERS[task["kind"]](ctx, task)
        times[result.name] = time.perf_counter() - start
        return result

    threads = threads or thread_count()
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, tasks))
    else:
        results = [one(t) for t in tasks]
    return results, (times if timing else {})


# --------------------------------------------------------------------------
# builtin scenarios and their default task lists


def builtin_tasks(kind: str, checks: set[str], twists: list[int] | None,
                  window: list[int] | None, params: dict) -> list[dict]:
    out: list[dict] = []
    if kind == "line_grid":
        if "cb" in checks:
            out.append({"kind": "cb", "name": "classical-cb"})
        if "tv" in checks:
            out.append({"kind": "tv", "name": "tan-viehweg", "a": twists or [0, 2]})
        if "det" in checks:
            out.append({"kind": "det", "name": "det-cb", "sizes": [1, 2]})
        if "koszul" in checks:
            d = params["d1"] + params["d2"]
            out.append({"kind": "koszul", "name": "koszul-exact", "variant": "koszul",
                        "expect": "exact", "twists": window or [d, d + 3]})
    elif kind == "twisted_cubic":
        if "cb" in checks:
            out += [{"kind": "cb", "name": "naive-excess-cb", "jet_order": 1,
                     "expect": "fails"},
                    {"kind": "cb", "name": "excess-cb-order-w+1", "jet_order": 2},
                    {"kind": "cb", "name": "li-degree-cb", "jet_order": 1, "degree": "li"}]
        if "tv" in checks:
            out.append({"kind": "tv", "name": "tan-viehweg-multiplier", "a": twists or [0, 1],
                        "multiplier": True})
        if "koszul" in checks:
            d = params["d"]
            win = window or [d + 1, d + 4]
            out += [{"kind": "koszul", "name": "koszul-excess", "variant": "koszul",
                     "expect": "excess", "twists": win},
                    {"kind": "koszul", "name": "skoda-exact", "variant": "skoda",
                     "expect": "exact", "twists": win}]
    elif kind == "det_eleven_points":
        if "det" in checks:
            out += [{"kind": "det", "name": "det-cb-default-split", "use_file_splits": True},
                    {"kind": "det", "name": "det-cb-small-splits", "sizes": [1, 2]}]
    return out


def _parse_range(text: str, flag: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{flag} expects <lo>..<hi>, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"{flag} range {text!r} is empty")
    return [lo, hi]


def _parse_checks(text: str) -> set[str]:
    names = {c.strip() for c in text.split(",") if c.strip()}
    bad = names - set(CHECKS)
    if bad:
        raise argparse.ArgumentTypeError(f"unknown check(s) {sorted(bad)}; choose from {CHECKS}")
    return set(CHECKS[1:]) if "all" in names else names


def _parse_roots(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("--roots expects integers like 1,2,3") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--check", type=_parse_checks, default=None,
                        help="comma list of all, cb, tv, det, koszul (default all)")
    common.add_argument("--a", type=lambda s: _parse_range(s, "--a"), default=None,
                        metavar="LO..HI", help="twist range for the v1/v2 sweep")
    common.add_argument("--twist-window", type=lambda s: _parse_range(s, "--twist-window"),
                        default=None, metavar="LO..HI", help="degrees t for the Koszul checks")
    common.add_argument("--field", type=str, default=None, help="Q or Fp:<prime>")
    common.add_argument("--report", choices=("text", "json"), default="text")
    common.add_argument("--output", "-o", default=None, help="write the report here")
    common.add_argument("--timing", action="store_true", help="record per-task timings")

    parser = argparse.ArgumentParser(prog="cb-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    b = sub.add_parser("builtin", parents=[common], help="run a built-in scenario")
    b.add_argument("name", choices=sorted(BUILTINS))
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--d", type=int, default=5, help="twisted cubic: degree of F")
    b.add_argument("--roots", type=_parse_roots, default=None,
                   help="twisted cubic: the d-2 roots k_i, comma separated")
    b.add_argument("--d1", type=int, default=2)
    b.add_argument("--d2", type=int, default=3)
    b.add_argument("--no-collinear", action="store_true",
                   help="eleven points: default split is a pair not collinear with O")
    b.add_argument("--emit-scenario", default=None, metavar="PATH",
                   help="also write the scenario (with its tasks) as a JSON file")
    r = sub.add_parser("run", parents=[common], help="run a scenario file")
    r.add_argument("file")
    return parser


def _builtin(args) -> tuple[Context, list[dict], dict, Field, CIScenario | DetScenario]:
    kind = BUILTINS[args.name]
    field = parse_field_name(args.field) if args.field else QQ
    if args.seed < 0 or args.seed >= 2 ** 64:
        raise TaskError("--seed must be an unsigned 64-bit integer")
    if kind == "twisted_cubic":
        params = {"d": args.d, "roots": args.roots}
    elif kind == "line_grid":
        params = {"d1": args.d1, "d2": args.d2}
    else:
        params = {"collinear_flag": not args.no_collinear}
    spec = ScenarioSpec(args.name, kind, params, field, args.seed)
    built = spec.build()
    if kind == "twisted_cubic" and params["roots"] is None:
        params["roots"] = [int(z[0]) if field is QQ else z[0].value for z in built.points]
    descriptor = spec.to_dict()
    checks = args.check or set(CHECKS[1:])
    tasks = builtin_tasks(kind, checks, args.a, args.twist_window, params)
    meta = {"scenario": args.name, "seed": args.seed, "params": dict(params),
            "field": field.spec()}
    if isinstance(built, DetScenario):
        ctx = Context(None, built, [built.split] if built.split else [], meta)
    else:
        ctx = Context(built, None, [], meta)
    return ctx, tasks, descriptor, field, built


def _from_file(args) -> tuple[Context, list[dict], dict, Field]:
    field = parse_field_name(args.field) if args.field else None
    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    fs: FileScenario = load_scenario(text, field, source=args.file)
    tasks = list(fs.tasks)
    if args.check is not None:
        tasks = [t for t in tasks if t["kind"] in args.check]
    for t in tasks:
        if args.a is not None and t["kind"] == "tv":
            t["a"] = args.a
        if args.twist_window is not None and t["kind"] == "koszul":
            t["twists"] = args.twist_window
    descriptor = {"name": fs.name or os.path.basename(args.file), "kind": "file",
                  "file": os.path.basename(args.file), "points": fs.size}
    ctx = Context(fs.ci, fs.det, fs.splits, {"scenario": descriptor["name"],
                                             "field": fs.field.spec()})
    return ctx, tasks, descriptor, fs.field


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "builtin":
            ctx, tasks, descriptor, field, built = _builtin(args)
            if args.emit_scenario:
                doc = scenario_to_dict(built, tasks, ctx.splits)
                with open(args.emit_scenario, "w", encoding="utf-8") as fh:
                    json.dump(doc, fh, indent=2)
                    fh.write("\n")
        else:
            ctx, tasks, descriptor, field = _from_file(args)
        results, times = run_tasks(ctx, tasks, timing=args.timing)
    except ScenarioFormatError as exc:
        print(f"cb-lab: parse error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print("cb-lab: scenario fails validation:", file=sys.stderr)
        for p in exc.problems:
            print(f"  - {p}", file=sys.stderr)
        return 2
    except (TaskError, BuildError, ValueError, OSError) as exc:
        print(f"cb-lab: error: {exc}", file=sys.stderr)
        return 2
    report = RunReport(descriptor, field.spec(), results, times if args.timing else None)
    text = report.to_json() if args.report == "json" else report.to_text()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
