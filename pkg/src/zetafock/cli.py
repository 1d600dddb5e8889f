"""Batch verification harness and exact-fraction tables.

Command shape:
    zetafock verify <suite> [flags]     suites: abstract rep jacobi mwa
                                        iterates genfun delta generators
                                        dims all
    zetafock table <kind> [flags]       kinds: corrections central zeta delta
    zetafock bernoulli --n INT [--x FRAC]

Exit codes: 0 all checks pass, 1 at least one failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .bernoulli import bernoulli_number, bernoulli_poly, zeta_negative
from .diffop import (
    GeneratorIndex,
    bar_central_term,
    bracket,
    decompose,
    generator,
)
from .fields import (
    VoaVector,
    generators_corollary_check,
    genfun_check,
    homogeneous_commutator_check,
    iterate_commutator_check,
    iterate_identity_check,
    jacobi_check,
    lbar_bracket_check,
    virasoro_axiom_check,
)
from .fock import (
    TwistSetup,
    basis_vectors,
    delta_genfun,
    graded_dimension_check,
    rep_check,
    vacuum_correction,
)
from .reports import CheckRecord, Report

SUITES = (
    "abstract",
    "rep",
    "jacobi",
    "mwa",
    "iterates",
    "genfun",
    "delta",
    "generators",
    "dims",
)


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    p: int = 1
    dims: list[int] = field(default_factory=lambda: [1])
    suites: list[str] = field(default_factory=lambda: list(SUITES))
    r_max: int = 2
    s_max: int = 2
    m_max: int = 2
    degree_max: Fraction = Fraction(2)
    window: int = 1
    y_order: int = 1
    out: str | None = None
    jobs: int = 1

    def validate(self) -> "RunConfig":
        for name in ("r_max", "s_max", "m_max", "window", "y_order", "jobs"):
            if getattr(self, name) < 0 or (name == "jobs" and self.jobs < 1):
                raise ConfigError(f"{name} must be positive")
        if self.degree_max <= 0:
            raise ConfigError("degree_max must be positive")
        if self.p % self.degree_max.denominator:
            raise ConfigError(
                f"degree_max denominator {self.degree_max.denominator} "
                f"does not divide p={self.p}"
            )
        for s in self.suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}")
        return self

    def setup(self) -> TwistSetup:
        try:
            return TwistSetup(self.p, self.dims)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        for key, val in raw.items():
            if not hasattr(cfg, key):
                raise ConfigError(f"unknown config field {key!r}")
            if key == "degree_max":
                val = Fraction(val)
            setattr(cfg, key, val)
    for key in ("p", "r_max", "s_max", "m_max", "window", "y_order", "jobs"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "dims", None) is not None:
        try:
            cfg.dims = [int(x) for x in args.dims.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad --dims value {args.dims!r}") from exc
    if getattr(args, "degree_max", None) is not None:
        cfg.degree_max = Fraction(args.degree_max)
    if getattr(args, "out", None) is not None:
        cfg.out = args.out
    if getattr(args, "suite", None) and args.suite != "all":
        cfg.suites = [args.suite]
    return cfg.validate()


def _weight1_labels(setup: TwistSetup) -> list[tuple[int, int]]:
    return [
        (k, a)
        for k in range(setup.p)
        for a in range(1, setup.dims[k] + 1)
    ]


def _suite_abstract(cfg: RunConfig, setup: TwistSetup) -> list[CheckRecord]:
    records = []
    t0 = time.perf_counter()
    bad = []
    for r in range(cfg.r_max + 1):
        for s in range(cfg.s_max + 1):
            for m in range(1, cfg.m_max + 1):
                got = bar_central_term(r, s, m)
                rs = r + s
                num = Fraction(1)
                for i in range(1, rs + 2):
                    num *= i
                den = Fraction(1)
                for i in range(1, 2 * rs + 4):
                    den *= i
                want = num * num / (2 * den) * Fraction(m) ** (2 * rs + 3)
                if got != want:
                    bad.append({"r": r, "s": s, "m": m, "got": str(got)})
    records.append(
        CheckRecord(
            "abstract",
            {"check": "central-term", "r_max": cfg.r_max, "m_max": cfg.m_max},
            "pass" if not bad else "fail",
            witness=bad[:4] or None,
            elapsed_ms=(time.perf_counter() - t0) * 1000,
        )
    )
    t0 = time.perf_counter()
    bad = []
    for r in range(cfg.r_max + 1):
        for s in range(cfg.s_max + 1):
            for m in range(-cfg.m_max, cfg.m_max + 1):
                for n in range(-cfg.m_max, cfg.m_max + 1):
                    br = bracket(
                        generator(GeneratorIndex(m, r)),
                        generator(GeneratorIndex(n, s)),
                    )
                    dec = decompose(br, m + n)
                    if dec.residual.terms:
                        bad.append({"r": r, "s": s, "m": m, "n": n, "why": "residual"})
                        continue
                    support = [i for i, c in dec.coefficients.items() if c]
                    if support and not (
                        min(support) >= min(r, s) and max(support) <= r + s
                    ):
                        bad.append({"r": r, "s": s, "m": m, "n": n, "why": "support"})
    records.append(
        CheckRecord(
            "abstract",
            {"check": "closure-range", "r_max": cfg.r_max, "m_max": cfg.m_max},
            "pass" if not bad else "fail",
            witness=bad[:4] or None,
            elapsed_ms=(time.perf_counter() - t0) * 1000,
        )
    )
    t0 = time.perf_counter()
    rng = random.Random(20260826)
    bad = []
    for _ in range(100):
        xs = [
            generator(
                GeneratorIndex(rng.randint(-4, 4), rng.randint(0, 3))
            )
            for _ in range(3)
        ]
        a, b, c = xs
        total = (
            bracket(a, bracket(b, c))
            + bracket(b, bracket(c, a))
            + bracket(c, bracket(a, b))
        )
        if total.terms or total.central:
            bad.append("jacobi violation")
    records.append(
        CheckRecord(
            "abstract",
            {"check": "jacobi-random", "count": 100},
            "pass" if not bad else "fail",
            witness=bad[:1] or None,
            elapsed_ms=(time.perf_counter() - t0) * 1000,
        )
    )
    return records


def _suite_rep(cfg: RunConfig, setup: TwistSetup) -> list[CheckRecord]:
    records = []
    for r in range(cfg.r_max + 1):
        for s in range(cfg.s_max + 1):
            for m in range(-cfg.m_max, cfg.m_max + 1):
                for n in range(-cfg.m_max, cfg.m_max + 1):
                    records.append(
                        rep_check(setup, r, s, m, n, cfg.degree_max)
                    )
    records.append(virasoro_axiom_check(setup, window=max(cfg.window, 2)))
    return records


def _suite_jacobi(cfg: RunConfig, setup: TwistSetup) -> list[CheckRecord]:
    records = []
    labels = _weight1_labels(setup)
    for w in basis_vectors(setup, cfg.degree_max):
        for u in labels:
            for v in labels:
                records.append(jacobi_check(setup, u, v, w, window=cfg.window))
    return records


def _suite_mwa(cfg: RunConfig, setup: TwistSetup) -> list[CheckRecord]:
    records = []
    labels = _weight1_labels(setup)
    for w in basis_vectors(setup, cfg.degree_max):
        for u in labels:
            for v in labels:
                records.append(
                    homogeneous_commutator_check(setup, u, v, w, window=cfg.window)
                )
    if labels:
        k, a = labels[0]
        b = VoaVector.creation(setup.p, k, a, 1)
        records.append(
            iterate_commutator_check(
                setup,
                b,
                b,
                b,
                b,
                y_order=cfg.y_order,
                window=cfg.window,
                max_degree=min(cfg.degree_max, 2),
            )
        )
    return records


def _suite_iterates(cfg: RunConfig, setup: TwistSetup) -> list[CheckRecord]:
    return [iterate_identity_check(setup, k=2, orders=(cfg.y_order + 1, cfg.y_order + 1))]


def _suite_genfun(cfg: RunConfig, setup: TwistSetup) -> list[CheckRecord]:
    return [
        genfun_check(setup, cfg.r_max, cfg.m_max, min(cfg.degree_max, 2)),
        lbar_bracket_check(setup, orders=cfg.y_order + 1, window=cfg.window),
    ]


def _suite_delta(cfg: RunConfig, setup: TwistSetup) -> list[CheckRecord]:
    return [delta_genfun(setup, order=2 * max(cfg.r_max, 2) + 2)]


def _suite_generators(cfg: RunConfig, setup: TwistSetup) -> list[CheckRecord]:
    return [
        generators_corollary_check(setup, m=min(cfg.m_max, 1), max_degree=cfg.degree_max)
    ]


def _suite_dims(cfg: RunConfig, setup: TwistSetup) -> list[CheckRecord]:
    return [graded_dimension_check(setup, max(cfg.degree_max, 5))]


SUITE_RUNNERS = {
    "abstract": _suite_abstract,
    "rep": _suite_rep,
    "jacobi": _suite_jacobi,
    "mwa": _suite_mwa,
    "iterates": _suite_iterates,
    "genfun": _suite_genfun,
    "delta": _suite_delta,
    "generators": _suite_generators,
    "dims": _suite_dims,
}


def run(cfg: RunConfig) -> tuple[Report, int]:
    setup = cfg.setup()
    report = Report()
    for suite in cfg.suites:
        report.extend(SUITE_RUNNERS[suite](cfg, setup))
    return report, (0 if report.passed else 1)


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    report, code = run(cfg)
    text = report.to_json()
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    summary = report.summary()
    print(
        f"suites: {', '.join(cfg.suites)}; "
        f"{summary['passed']}/{summary['total']} passed, "
        f"{summary['failed']} failed",
        file=sys.stderr,
    )
    return code


def cmd_table(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    rows: list[dict] = []
    if args.kind == "corrections":
        setup = cfg.setup()
        for r in range(cfg.r_max + 1):
            rows.append(
                {
                    "r": r,
                    "plain": str(vacuum_correction(setup, r, "plain")),
                    "bar": str(vacuum_correction(setup, r, "bar")),
                }
            )
    elif args.kind == "central":
        for r in range(cfg.r_max + 1):
            for s in range(cfg.s_max + 1):
                for m in range(1, cfg.m_max + 1):
                    rows.append(
                        {"r": r, "s": s, "m": m, "value": str(bar_central_term(r, s, m))}
                    )
    elif args.kind == "zeta":
        for r in range(cfg.r_max + 1):
            rows.append({"r": r, "zeta(-1-2r)": str(zeta_negative(1 + 2 * r))})
    elif args.kind == "delta":
        setup = cfg.setup()
        record = delta_genfun(setup, order=2 * max(cfg.r_max, 2) + 2)
        for key, val in sorted(record.lhs.items()):
            rows.append({"coefficient": key, "value": val})
    for row in rows:
        print("  ".join(f"{k}={v}" for k, v in row.items()))
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_bernoulli(args: argparse.Namespace) -> int:
    if args.x is not None:
        print(str(bernoulli_poly(args.n, Fraction(args.x))))
    else:
        print(str(bernoulli_number(args.n)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zetafock", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="JSON run configuration file")
        p.add_argument("--p", type=int, help="twist period")
        p.add_argument("--dims", help="comma-separated eigenspace dimensions")
        p.add_argument("--r-max", dest="r_max", type=int)
        p.add_argument("--s-max", dest="s_max", type=int)
        p.add_argument("--m-max", dest="m_max", type=int)
        p.add_argument("--degree-max", dest="degree_max", help="fraction string")
        p.add_argument("--window", type=int)
        p.add_argument("--y-order", dest="y_order", type=int)
        p.add_argument("--out", help="write JSON output to this path")
        p.add_argument("--jobs", type=int, help="worker count (accepted; runs serially)")

    pv = sub.add_parser("verify", help="run verification suites")
    pv.add_argument("suite", choices=SUITES + ("all",))
    common(pv)
    pv.set_defaults(fn=cmd_verify)

    pt = sub.add_parser("table", help="print exact-value tables")
    pt.add_argument("kind", choices=("corrections", "central", "zeta", "delta"))
    common(pt)
    pt.set_defaults(fn=cmd_table)

    pb = sub.add_parser("bernoulli", help="Bernoulli numbers and polynomials")
    pb.add_argument("--n", type=int, required=True)
    pb.add_argument("--x", help="evaluate the degree-n polynomial at this fraction")
    pb.set_defaults(fn=cmd_bernoulli)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
