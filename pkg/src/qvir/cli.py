"""Batch driver: scenario selection, suite execution, report emission.

Exit status: 0 when every check passes (documented discrepancies do not
fail a run), 1 when any check fails, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from .distcalc import ModeWindow
from .currents import (
    KacMoodyLevel,
    modes_from_ope,
    verify_commutator_antisymmetry,
    verify_commutators,
    verify_serre_mode_equivalence,
    verify_table_degeneration,
)
from .dirac import (
    SCENARIO_KEYS,
    UnknownScenarioError,
    dirac_suite,
    reduce,
    reduce_suite,
    scenario,
)
from .qvirasoro import (
    ClassicalVirasoro,
    QVirasoroBracket,
    antisymmetry_check,
    classical_jacobi_check,
    classical_limit_check,
)
from .report import Report
from .vertexcalc import exchange_suite, verify_ee_ope

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2

SUITES = {
    "q-sl2": ("exchange", "commutators", "modes", "dirac", "reduce", "limit"),
    "classical-sl2": ("dirac", "reduce"),
}

JACOBI_CUTOFF = 6


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    """One batch run: scenario, window, suites, weight and expansion knobs."""

    scenario: str = "q-sl2"
    window: int = 12
    suites: tuple = ("all",)
    weight_on: bool = True
    weight_exponent: int = 2
    order: int = 6
    fmt: str = "json"
    output: str | None = None

    def resolve_suites(self):
        if self.scenario not in SUITES:
            raise ConfigError(
                f"unknown scenario {self.scenario!r}; known: {sorted(SUITES)}")
        available = SUITES[self.scenario]
        wanted = []
        for s in self.suites:
            for name in s.split(","):
                name = name.strip()
                if not name:
                    continue
                if name == "all":
                    wanted.extend(available)
                elif name in available:
                    wanted.append(name)
                else:
                    raise ConfigError(
                        f"suite {name!r} is not available for scenario "
                        f"{self.scenario!r}; available: {list(available)} or 'all'")
        seen = []
        for name in available:        # dependency order is fixed
            if name in wanted and name not in seen:
                seen.append(name)
        if not seen:
            raise ConfigError("no suites selected")
        return seen

    def validate(self):
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.order < 0:
            raise ConfigError("expansion order must be >= 0")
        if self.fmt not in ("json", "markdown"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        self.resolve_suites()


def _timed(records_fn):
    t0 = time.perf_counter()
    records = records_fn()
    dt = time.perf_counter() - t0
    for r in records:
        r.seconds = dt / max(1, len(records))
    return records


def run(config: RunConfig) -> Report:
    """Execute the selected suites in dependency order."""
    config.validate()
    suites = config.resolve_suites()
    W = ModeWindow(config.window)
    rep = Report(config.scenario, config.window)

    sc = scenario(config.scenario) if config.scenario == "classical-sl2" \
        else scenario(config.scenario, weighted=False)

    for name in suites:
        if name == "exchange":
            rep.extend(_timed(lambda: exchange_suite(W)))
        elif name == "commutators":
            rep.extend(_timed(lambda: verify_commutators(W)))
            rep.extend(_timed(lambda: verify_commutator_antisymmetry(W)))
            rep.extend(_timed(lambda: verify_ee_ope(W, +1)))
            rep.extend(_timed(lambda: verify_ee_ope(W, -1)))
        elif name == "modes":
            for k in (1, 2, 3):
                rep.extend(_timed(lambda k=k: modes_from_ope(KacMoodyLevel(k), W)))
            rep.extend(_timed(lambda: verify_serre_mode_equivalence(W)))
            rep.extend(_timed(lambda: verify_table_degeneration(W)))
        elif name == "dirac":
            rep.extend(_timed(lambda: dirac_suite(sc, W)))
        elif name == "reduce":
            rep.extend(_timed(lambda: reduce_suite(sc, W)))
            if config.scenario == "q-sl2" and config.weight_on:
                weighted = scenario("q-sl2", weighted=True,
                                    weight_exponent=config.weight_exponent)
                rep.extend(_timed(lambda: reduce_suite(weighted, W)))
            if config.scenario == "classical-sl2":
                rep.extend(_timed(lambda: _classical_jacobi(sc, W)))
        elif name == "limit":
            rep.extend(_timed(lambda: _limit_suite(sc, W, config.order)))
    return rep


def _classical_jacobi(sc, W):
    reduced = reduce(sc.current, sc.table, sc.constraints, W)
    V = ClassicalVirasoro.from_reduced(reduced, sc.current, W.N)
    return classical_jacobi_check(V, JACOBI_CUTOFF)


def _limit_suite(sc, W, order):
    classical = scenario("classical-sl2")
    reduced_q = reduce(sc.current, sc.table, sc.constraints, W)
    reduced_c = reduce(classical.current, classical.table, classical.constraints, W)
    out = antisymmetry_check(QVirasoroBracket(False), W)
    out.extend(classical_limit_check(reduced_q, reduced_c, order, W))
    return out


def emit(report: Report, fmt: str) -> str:
    """Serialize a report as JSON or a markdown table."""
    if fmt == "json":
        return report.to_json()
    if fmt == "markdown":
        return report.to_markdown()
    raise ConfigError(f"unknown format {fmt!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qvir",
        description=("Exact verification of the q-deformed Virasoro algebra "
                     "obtained by Dirac reduction of the quantum affine sl(2) "
                     "current algebra at level 1."))
    p.add_argument("--scenario", default="q-sl2", choices=SCENARIO_KEYS,
                   help="which reduction to verify")
    p.add_argument("--window", type=int, default=12, metavar="N",
                   help="mode window: checks run for |n| <= N (default 12)")
    p.add_argument("--suite", action="append", default=None, metavar="NAME",
                   help="suite selection (repeatable or comma-separated): "
                        "exchange, commutators, modes, dirac, reduce, limit, all")
    wg = p.add_mutually_exclusive_group()
    wg.add_argument("--weight", dest="weight", action="store_true", default=True,
                    help="also verify the weight-absorbed bracket (default)")
    wg.add_argument("--no-weight", dest="weight", action="store_false",
                    help="skip the weight-absorbed verification")
    p.add_argument("--weight-exponent", type=int, default=2, metavar="H",
                   help="mode-weight exponent h in q^(h|n|) (default 2)")
    p.add_argument("--order", type=int, default=6, metavar="K",
                   help="h-expansion order for the limit suite (default 6)")
    p.add_argument("--format", dest="fmt", default="json",
                   choices=("json", "markdown"), help="output format")
    p.add_argument("--output", default=None, metavar="PATH",
                   help="write the report here instead of stdout")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(
        scenario=args.scenario,
        window=args.window,
        suites=tuple(args.suite) if args.suite else ("all",),
        weight_on=args.weight,
        weight_exponent=args.weight_exponent,
        order=args.order,
        fmt=args.fmt,
        output=args.output,
    )
    try:
        config.validate()
    except (ConfigError, UnknownScenarioError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    report = run(config)
    text = emit(report, config.fmt)
    if config.output:
        try:
            with open(config.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as err:
            print(f"error: cannot write {config.output!r}: {err}", file=sys.stderr)
            return EXIT_CONFIG_ERROR
    else:
        sys.stdout.write(text)

    n_fail = len(report.failed)
    n_doc = len(report.documented)
    print(f"{len(report.checks)} checks: "
          f"{len(report.checks) - n_fail - n_doc} passed, {n_fail} failed, "
          f"{n_doc} documented discrepancies.", file=sys.stderr)
    return EXIT_OK if report.ok() else EXIT_CHECK_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
