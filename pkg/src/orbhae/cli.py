"""Command line front end: ``python3 -m orbhae.cli <subcommand> ...``.

Exit status is 0 when every requested check passes, 1 when a check fails and
2 for usage or configuration errors (including an R-matrix depth that is too
small for the requested genus).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from gmpy2 import mpq

from . import cache
from . import intnum
from .cohft import (Algebra, edge_lemmas, gw_expansion, hae_check, potential, required_depth,
                    string_check, t_derivative)
from .cyclo import Cyc
from .freering import Elem, evaluate_to_series, is_free
from .graphs import decorations, enumerate_graphs
from .mirror import build_all, check_identities, variant_da2_residual
from .rmatrix import (DepthError, FrobeniusData, RTable, build_rtable, derivative_lemmas,
                      flatness_residuals, row0_is_laurent, symplectic_residual)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SERIES_NAMES = ("T", "L", "C1", "C2", "C3", "X1", "X2", "A1", "A2", "DA1", "D2A1")


class ConfigError(ValueError):
    pass


def order_floor(genus: int) -> int:
    return 5 * genus + 10


def depth_floor(genus: int) -> int:
    return 2 * (3 * genus - 3) + 2


@dataclass(frozen=True)
class RunConfig:
    order: int = 40
    max_k: int = 8
    genera: tuple = (2,)
    cache_dir: Path | None = None
    emit: str = "text"
    jobs: int = 1
    poison: tuple | None = None

    def validate(self) -> "RunConfig":
        if self.order < 10:
            raise ConfigError(f"--order {self.order} is too small (need at least 10)")
        if self.max_k < 0:
            raise ConfigError("--max-k must be non-negative")
        if self.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        for g in self.genera:
            if g < 0:
                raise ConfigError("genus must be non-negative")
            if self.order < order_floor(g):
                raise ConfigError(f"--order {self.order} is below the floor {order_floor(g)} for genus {g}")
            if self.max_k < depth_floor(g):
                raise ConfigError(f"--max-k {self.max_k} is too small for genus {g}; "
                                  f"need max-k >= {depth_floor(g)}")
        return self

    @property
    def guard(self) -> int:
        # room for the precision lost to L^-1 factors along the R-matrix levels
        return max(24, 3 * self.max_k)


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    seconds: float = 0.0


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, name, ok, detail="", seconds=0.0):
        self.checks.append(Check(name, bool(ok), detail, seconds))
        return ok

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> list:
        return [{"name": c.name, "residual_zero": c.ok, "detail": c.detail} for c in self.checks]

    def lines(self) -> list:
        return [f"{'PASS' if c.ok else 'FAIL'}  {c.name}" + (f"  ({c.detail})" if c.detail else "")
                for c in self.checks]


# -- shared state -------------------------------------------------------------------


class Session:
    """Builds (and caches) the mirror data and R-matrix table for one config."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._mirror = None
        self._table = None
        self._table_ser = None
        if cfg.cache_dir is not None:
            intnum.load_memo(cfg.cache_dir)

    def mirror(self):
        if self._mirror is None:
            self._mirror = build_all(self.cfg.order, guard=self.cfg.guard)
        return self._mirror

    def table(self, series: bool = False) -> RTable:
        if series:
            if self._table_ser is None:
                self._table_ser = build_rtable(self.cfg.max_k, mirror=self.mirror(), poison=self.cfg.poison)
            return self._table_ser
        if self._table is None and self._table_ser is not None:
            self._table = self._table_ser
        if self._table is None:
            self._table = self._load_table() or self._store_table(
                build_rtable(self.cfg.max_k, poison=self.cfg.poison))
        return self._table

    def _cache_params(self):
        return {"K": self.cfg.max_k, "poison": [str(x) for x in self.cfg.poison or ()]}

    def _load_table(self):
        data = cache.load(self.cfg.cache_dir, "rtable", **self._cache_params())
        if data is None:
            return None
        sym = [[[Elem.from_json(e) for e in row] for row in lvl] for lvl in data["levels"]]
        consts = [[_decode_scalar(c) for c in lvl] for lvl in data["constants"]]
        return RTable(self.cfg.max_k, sym, None, consts, None, 0)

    def _store_table(self, table):
        payload = {"levels": [[[e.to_json() for e in row] for row in lvl] for lvl in table.sym],
                   "constants": [[_encode_scalar(c) for c in lvl] for lvl in table.constants]}
        cache.store(self.cfg.cache_dir, "rtable", payload, **self._cache_params())
        return table

    def close(self):
        if self.cfg.cache_dir is not None:
            intnum.save_memo(self.cfg.cache_dir)


def _encode_scalar(c):
    return c.to_json() if isinstance(c, Cyc) else str(c)


def _decode_scalar(c):
    return Cyc.from_json(c) if isinstance(c, list) else mpq(c)


def _series_json(s, n: int) -> dict:
    return {"order": n, "coeffs": [_encode_scalar(s[k]) for k in range(n + 1)]}


def _parse_ints(text: str, what: str) -> tuple:
    if text is None or text.strip() == "":
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _parse_poison(text):
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError("--poison-constant expects LEVEL,COLUMN,DELTA")
    try:
        k, j, delta = int(parts[0]), int(parts[1]), Fraction(parts[2])
    except ValueError:
        raise ConfigError(f"--poison-constant: cannot parse {text!r}") from None
    if not 0 <= j < 5 or k < 1:
        raise ConfigError("--poison-constant: need LEVEL >= 1 and 0 <= COLUMN <= 4")
    return (k, j, mpq(delta.numerator, delta.denominator))


def _pot_name(g: int, ins) -> str:
    args = ", ".join(f"phi_{c}" for c in ins)
    return f"F_{g},{len(ins)}({args})" if ins else f"F_{g}"


def _insertions(text) -> tuple:
    ins = _parse_ints(text, "--insertions")
    if any(not 0 <= c < 5 for c in ins):
        raise ConfigError("--insertions: classes are 0..4")
    return ins


def _emit(args, payload: dict, text_lines: list):
    if args.emit == "json":
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


# -- subcommands ---------------------------------------------------------------------


def cmd_mirror_series(args, cfg: RunConfig) -> int:
    m = Session(cfg).mirror()
    table = {name: getattr(m, name) for name in SERIES_NAMES}
    table.update({f"I{k}": m.I[k] for k in range(5) if k in m.I})
    table.update({f"B{i}": m.B[i] for i in range(1, 5)})
    payload = {"order": cfg.order, "series": {k: _series_json(v, cfg.order) for k, v in table.items()}}
    lines = [f"{k}: " + ", ".join(str(v[i]) for i in range(cfg.order + 1)) for k, v in table.items()]
    _emit(args, payload, lines)
    return EXIT_OK


def identity_checks(m, report: Report) -> None:
    t = time.time()
    for name, (_, ok) in check_identities(m).items():
        report.add(f"mirror: {name}", ok, seconds=time.time() - t)


def cmd_verify_identities(args, cfg: RunConfig) -> int:
    m = Session(cfg).mirror()
    report = Report()
    identity_checks(m, report)
    variant = variant_da2_residual(m)
    note = f"DA2 variant with -DA1 and an L^5 tail: residual starts at x^{variant.val}"
    _emit(args, {"order": cfg.order, "checks": report.to_json(), "notes": [note]}, report.lines() + [note])
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_intersection(args, cfg: RunConfig) -> int:
    exps = _parse_ints(args.exps, "--exps")
    g = args.genus if args.genus is not None else 0
    try:
        value = intnum.psi_integral(g, exps)
    except intnum.UnstableError as exc:
        raise ConfigError(str(exc)) from None
    _emit(args, {"genus": g, "exps": list(exps), "value": str(value)}, [str(value)])
    return EXIT_OK


def cmd_graphs(args, cfg: RunConfig) -> int:
    g = args.genus if args.genus is not None else 2
    n = args.legs
    if 2 * g - 2 + n <= 0:
        raise ConfigError(f"unstable (g, n) = ({g}, {n})")
    graphs = enumerate_graphs(g, n)
    items = [d.to_json() for gr in graphs for d in decorations(gr)] if args.decorated else \
        [gr.to_json() for gr in graphs]
    lines = [f"{len(items)} {'decorated ' if args.decorated else ''}graphs, genus {g}, {n} legs"]
    lines += [json.dumps(it, sort_keys=True) for it in items]
    if args.emit == "json":
        print(json.dumps(items, indent=1, sort_keys=True))
    else:
        print("\n".join(lines))
    return EXIT_OK


def rmatrix_checks(sess: Session, report: Report, series: bool = True) -> RTable:
    K = sess.cfg.max_k
    t = time.time()
    base = FrobeniusData().base_case()
    report.add("rmatrix: base case P~^0 = all ones", all(x == 1 for row in base for x in row))
    table = sess.table(series=series)
    report.add("rmatrix: build", True, f"K = {K}", time.time() - t)
    kinds = ("sym", "ser") if series else ("sym",)
    for kind in kinds:
        ok = all(r.is_zero() if kind == "sym" else r.truncate(sess.cfg.order).is_zero()
                 for k in range(K + 1) for col in flatness_residuals(table, k, kind) for r in col)
        report.add(f"rmatrix: flatness ({kind}), k <= {K}", ok)
    report.add(f"rmatrix: row 0 Laurent in L, k <= {K}", all(row0_is_laurent(table, k) for k in range(K + 1)))
    for kind in kinds:
        bad = []
        for k in range(1, K + 1):
            M = symplectic_residual(table, k, kind)
            zero = all((x if kind == "sym" else x.truncate(sess.cfg.order)).is_zero() for row in M for x in row)
            if not zero:
                bad.append(k)
        report.add(f"rmatrix: symplectic ({kind}), 1 <= k <= {K}", not bad,
                   f"nonzero at levels {bad}" if bad else "")
    if series:
        m = sess.mirror()
        ok = all((evaluate_to_series(table.sym[k][i][j], m) - table.ser[k][i][j]).truncate(sess.cfg.order).is_zero()
                 for k in range(K + 1) for i in range(5) for j in range(5))
        report.add("rmatrix: symbolic table evaluates to the series table", ok)
    return table


def cmd_rmatrix(args, cfg: RunConfig) -> int:
    sess = Session(cfg)
    report = Report()
    table = rmatrix_checks(sess, report)
    payload = {"max_k": cfg.max_k, "order": cfg.order, "checks": report.to_json(),
               "constants": [[_encode_scalar(c) for c in lvl] for lvl in table.constants],
               "a_degree": table.degree_report(),
               "P": [[[e.to_json() for e in row] for row in lvl] for lvl in table.sym]}
    lines = report.lines() + [f"row0 level {k}: {table.row0(k)}" for k in range(cfg.max_k + 1)]
    lines.append(f"A-degree by level: {table.degree_report()}")
    _emit(args, payload, lines)
    sess.close()
    return EXIT_OK if report.ok else EXIT_FAIL


def _pot(sess: Session, g, ins, kind="sym"):
    table = sess.table(series=(kind == "ser"))
    return potential(table, g, ins, kind=kind, jobs=sess.cfg.jobs)


def cmd_potential(args, cfg: RunConfig) -> int:
    g = args.genus
    ins = _insertions(args.insertions)
    sess = Session(cfg)
    pot = _pot(sess, g, ins)
    report = Report()
    m = sess.mirror()
    ser = evaluate_to_series(pot.value, m)
    ser_pipe = _pot(sess, g, ins, kind="ser").value
    report.add("two-pipeline equivalence", (ser - ser_pipe).truncate(cfg.order).is_zero())
    payload = {"genus": g, "insertions": list(ins), "ring_element": pot.value.to_json(),
               "series": _series_json(ser, cfg.order), "checks": report.to_json(),
               "coefficient_field": pot.value.coefficient_field()}
    _emit(args, payload, [f"{_pot_name(g, ins)} = {pot.value}"] + report.lines())
    sess.close()
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_gw(args, cfg: RunConfig) -> int:
    g = args.genus
    ins = _insertions(args.insertions)
    sess = Session(cfg)
    pot = _pot(sess, g, ins)
    m = sess.mirror()
    d_max = args.max_degree if args.max_degree is not None else cfg.order
    if d_max > cfg.order:
        raise ConfigError(f"--max-degree {d_max} exceeds --order {cfg.order}")
    coeffs = gw_expansion(evaluate_to_series(pot.value, m), m, d_max)
    rational = all(not isinstance(c, Cyc) or c.is_rational() for c in coeffs)
    payload = {"genus": g, "insertions": list(ins), "max_degree": d_max, "rational": rational,
               "coefficients": [_encode_scalar(c) for c in coeffs]}
    lines = [f"d={d}: {c}" for d, c in enumerate(coeffs) if c != 0]
    _emit(args, payload, lines or ["all coefficients vanish"])
    sess.close()
    return EXIT_OK


def hae_checks(sess: Session, report: Report, g: int, series: bool = True) -> None:
    t = time.time()
    table = sess.table(series=series)
    r = hae_check(table, g, mirror=sess.mirror() if series else None, jobs=sess.cfg.jobs)
    dt = time.time() - t
    for name, label in (("first", "A2"), ("second", "D2A1")):
        e = r[name]
        detail = "" if e["ring_zero"] else f"residual {e['residual']}"
        report.add(f"HAE ({label}) g={g}: ring", e["ring_zero"], detail, dt)
        if series:
            report.add(f"HAE ({label}) g={g}: series through x^{sess.cfg.order}", e["series_zero"])


def cmd_verify_hae(args, cfg: RunConfig) -> int:
    sess = Session(cfg)
    report = Report()
    for g in cfg.genera:
        if g < 2:
            raise ConfigError("the anomaly equations are checked for genus >= 2")
        hae_checks(sess, report, g)
    _emit(args, {"genera": list(cfg.genera), "checks": report.to_json()}, report.lines())
    sess.close()
    return EXIT_OK if report.ok else EXIT_FAIL


def verify_all(cfg: RunConfig) -> Report:
    sess = Session(cfg)
    report = Report()
    identity_checks(sess.mirror(), report)
    table = rmatrix_checks(sess, report)
    K = cfg.max_k
    report.add(f"derivative lemmas, k <= {K}",
               all(all(derivative_lemmas(table, k, i, j)) for k in range(K + 1)
                   for i in range(5) for j in range(5)))
    alg = Algebra(table)
    bmax = min(4, K - 1)
    edge_ok = {"A2": True, "D2A1": True, "swap": True}
    for b1 in range(bmax + 1):
        for b2 in range(bmax + 1 - b1):
            for p1 in range(5):
                for p2 in range(5):
                    for key, ok in edge_lemmas(alg, b1, b2, p1, p2).items():
                        edge_ok[key] = edge_ok[key] and ok
    report.add(f"edge derivative (A2), b1 + b2 <= {bmax}", edge_ok["A2"])
    report.add(f"edge derivative (D2A1), b1 + b2 <= {bmax}", edge_ok["D2A1"])
    report.add(f"edge symmetry, b1 + b2 <= {bmax}", edge_ok["swap"])

    m = sess.mirror()
    pots = {}

    def both(g, ins):
        if (g, ins) not in pots:
            sym = _pot(sess, g, ins)
            ser = _pot(sess, g, ins, kind="ser")
            same = (evaluate_to_series(sym.value, m) - ser.value).truncate(cfg.order).is_zero()
            report.add(f"two pipelines: {_pot_name(g, ins)}", same)
            pots[(g, ins)] = sym
        return pots[(g, ins)]

    for g in cfg.genera:
        if g >= 2:
            f = both(g, ())
            report.add(f"finite generation: F_{g} in F", is_free(f.value))
    for n in range(1, 4):
        if required_depth(1, n) <= K:
            f = both(1, (1,) * n)
            lo, hi = f.c1_degree() if not f.value.is_zero() else (None, None)
            report.add(f"C1^-1 degree of {_pot_name(1, (1,) * n)} is {n}", lo == hi == n, f"observed ({lo}, {hi})")
    base = both(1, (1,))
    for k in range(1, 4):
        if required_depth(1, 1 + k) <= K:
            td = t_derivative(table, base, k, mirror=m)
            report.add(f"t-derivative k={k} on {_pot_name(1, (1,))}", td["ring_equal"] and td["series_equal"])
    for g in cfg.genera:
        if g >= 2 and required_depth(g, 1) <= K:
            td = t_derivative(table, both(g, ()), 1, mirror=m)
            report.add(f"t-derivative k=1 on F_{g}", td["ring_equal"] and td["series_equal"])
    report.add("string equation: F_1,2(phi_1, phi_0) = 0", string_check(table, 1, (1,)))
    for g in cfg.genera:
        if g >= 2:
            hae_checks(sess, report, g)
    sess.close()
    return report


def cmd_verify_all(args, cfg: RunConfig) -> int:
    report = verify_all(cfg)
    payload = {"order": cfg.order, "max_k": cfg.max_k, "genera": list(cfg.genera),
               "poison": [str(x) for x in cfg.poison] if cfg.poison else None,
               "checks": report.to_json(), "ok": report.ok}
    if args.report:
        Path(args.report).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    _emit(args, payload, report.lines() + [f"{'ALL PASS' if report.ok else 'FAILURES'}: "
                                           f"{sum(c.ok for c in report.checks)}/{len(report.checks)}"])
    return EXIT_OK if report.ok else EXIT_FAIL


# -- argument parsing -------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=None, help="series truncation order N (default 40)")
    common.add_argument("--max-k", type=int, default=None, help="R-matrix depth K (default: max(8, floor))")
    common.add_argument("--emit", choices=("text", "json"), default="text")
    common.add_argument("--cache-dir", default=None, help=f"cache directory (or ${cache.ENV_VAR})")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--poison-constant", nargs="?", const="2,0,1", default=None,
                        metavar="LEVEL,COLUMN,DELTA", help="test hook: shift one integration constant")

    p = argparse.ArgumentParser(prog="orbhae", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    add("mirror-series", cmd_mirror_series, "print the mirror series")
    add("verify-identities", cmd_verify_identities, "check the series identities")
    sp = add("intersection", cmd_intersection, "psi-class intersection number")
    sp.add_argument("--genus", type=int, default=None)
    sp.add_argument("--exps", required=True, help="comma-separated psi exponents")
    sp = add("graphs", cmd_graphs, "enumerate stable graphs")
    sp.add_argument("--genus", type=int, default=None)
    sp.add_argument("--legs", type=int, default=0)
    sp.add_argument("--decorated", action="store_true")
    add("rmatrix", cmd_rmatrix, "build and check the R-matrix table")
    for name, func, help_ in (("potential", cmd_potential, "compute F_{g,n}"),
                              ("gw", cmd_gw, "Theta-expansion of F_{g,n}")):
        sp = add(name, func, help_)
        sp.add_argument("--genus", type=int, required=True)
        sp.add_argument("--insertions", default="")
        if name == "gw":
            sp.add_argument("--max-degree", type=int, default=None)
    sp = add("verify-hae", cmd_verify_hae, "check both anomaly equations")
    sp.add_argument("--genus", default="2", help="genus or comma-separated list")
    sp = add("verify-all", cmd_verify_all, "run the whole verification suite")
    sp.add_argument("--genus", default="2", help="genus or comma-separated list")
    sp.add_argument("--report", default=None, help="write the JSON report here")
    return p


def _config(args) -> RunConfig:
    genus = getattr(args, "genus", None)
    if isinstance(genus, str):
        genera = _parse_ints(genus, "--genus")
        if not genera:
            raise ConfigError("--genus: empty list")
    elif genus is None or args.command in ("intersection", "graphs"):
        genera = ()
    else:
        genera = (genus,)
    top = max(genera, default=1)
    order = args.order if args.order is not None else max(40, order_floor(top))
    max_k = args.max_k if args.max_k is not None else max(8, depth_floor(top))
    cache_dir = Path(args.cache_dir) if args.cache_dir else cache.default_dir()
    cfg = RunConfig(order=order, max_k=max_k, genera=genera, cache_dir=cache_dir, emit=args.emit,
                    jobs=args.jobs, poison=_parse_poison(args.poison_constant))
    return cfg.validate()


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except (ConfigError, DepthError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
