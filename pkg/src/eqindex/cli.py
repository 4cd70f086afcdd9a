"""Command-line front end.

    eqindex index <datum> [--op NAME] [--qmax Q] [--gwindow G] [--format table|json|csv]
    eqindex check <datum> [--checks a,b,...] [--op NAMES] [--p 1,2] [--seed N] [--samples K]
    eqindex catalog list | emit <name>

``<datum>`` is a catalog name or a path to a JSON file.  Exit status: 0 if
every check passed, 1 if one failed, 2 for invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import catalog
from .anomaly import constancy_details, hypotheses
from .bundle_expr import phi_levels
from .datum import FixedComponentDatum, ManifoldDatum
from .errors import EngineError, InvalidDatum, NotPolynomial
from .localization import (DEFAULT_G, DEFAULT_Q_MAX, OPERATORS, TANGENT_RIGID, dual_expansion_check, operator,
                           rigidity_check, total_index, vanishing_check)
from .shifts import check_prop_3_1, check_prop_4_1, recursion_check, translation_check
from .verdict import Verdict

CHECKS = ("dual_expansion", "rigidity", "vanishing", "translation", "recursion", "prop31", "prop41",
          "anomaly", "constancy")
FORMATS = ("table", "json", "csv")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    q_max: Fraction = Fraction(DEFAULT_Q_MAX)
    g_window: Fraction = Fraction(DEFAULT_G)
    ops: list[str] = field(default_factory=list)
    checks: list[str] = field(default_factory=lambda: ["dual_expansion"])
    fmt: str = "table"
    seed: int = 0
    samples: int = 0
    p_values: list[int] = field(default_factory=lambda: [1, 2])
    max_n: int | None = 3

    def to_json(self) -> dict:
        return {"q_max": str(self.q_max), "g_window": str(self.g_window), "ops": self.ops,
                "checks": self.checks, "format": self.fmt, "seed": self.seed, "samples": self.samples,
                "p": self.p_values, "max_n": self.max_n}


def _split(value) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [str(v).strip() for v in value if str(v).strip()]
    return [v.strip() for v in str(value).split(",") if v.strip()]


def _rat(value, what: str) -> Fraction:
    try:
        out = Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what} must be a rational number, got {value!r}") from None
    if out < 0:
        raise UsageError(f"{what} must be nonnegative")
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the TOML file, then command-line flags."""
    raw: dict[str, Any] = {}
    if getattr(args, "config", None):
        try:
            raw = tomllib.loads(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"invalid TOML in {args.config}: {exc}") from None
    for key in ("qmax", "gwindow", "op", "checks", "format", "seed", "samples", "p", "max_n"):
        flag = getattr(args, key, None)
        if flag is not None:
            raw[key] = flag
    unknown = set(raw) - {"qmax", "gwindow", "op", "checks", "format", "seed", "samples", "p", "max_n"}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    cfg = RunConfig()
    if "qmax" in raw:
        cfg.q_max = _rat(raw["qmax"], "qmax")
    if "gwindow" in raw:
        cfg.g_window = _rat(raw["gwindow"], "gwindow")
    if "op" in raw:
        cfg.ops = _split(raw["op"])
        for op in cfg.ops:
            if op not in OPERATORS:
                raise UsageError(f"unknown operator {op!r}; known: {', '.join(OPERATORS)}")
    if "checks" in raw:
        cfg.checks = _split(raw["checks"])
        for c in cfg.checks:
            if c not in CHECKS:
                raise UsageError(f"unknown check {c!r}; known: {', '.join(CHECKS)}")
    if "format" in raw:
        if raw["format"] not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        cfg.fmt = raw["format"]
    try:
        if "seed" in raw:
            cfg.seed = int(raw["seed"])
        if "samples" in raw:
            cfg.samples = int(raw["samples"])
        if "p" in raw:
            cfg.p_values = [int(x) for x in _split(raw["p"])]
        if "max_n" in raw:
            cfg.max_n = int(raw["max_n"]) or None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if any(p < 1 for p in cfg.p_values):
        raise UsageError("p values must be positive")
    return cfg


def load_datum(spec: str) -> ManifoldDatum:
    if spec in catalog.CATALOG:
        return catalog.get(spec)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"{spec!r} is neither a catalog entry nor a file")
    return ManifoldDatum.load(path)


# ---------------------------------------------------------------------------
# checks


def _default_ops(check: str, m: ManifoldDatum) -> list[str]:
    has_v = any(c.v_weights or c.v0_rank for c in m.components)
    if check == "rigidity":
        return list(TANGENT_RIGID) + (["dirac-R1", "dirac-R2", "dirac-R3", "dirac-R4"] if has_v else [])
    if check in ("translation", "recursion"):
        return ["dirac-R1", "dirac-R2", "dirac-R3", "dirac-R4"] if has_v else ["dirac-sym"]
    if any(c.l_c is not None for c in m.components) and all(c.l_c is not None for c in m.components):
        return ["spinc-s"]
    return ["dirac"]


def random_component(rng: random.Random, name: str, max_rank: int = 2, max_weight: int = 3) -> FixedComponentDatum:
    """Component with N and V ranks <= max_rank per weight and weights <= max_weight."""
    def weights():
        out = []
        for v in range(1, max_weight + 1):
            out += [v * rng.choice((1, -1))] * rng.randint(0, max_rank)
        return tuple(out)
    tw = weights() or (rng.randint(1, max_weight),)
    return FixedComponentDatum(name, tw, rng.choice((1, -1)), v_weights=weights(), v0_rank=2 * rng.randint(0, 1))


def run_checks(m: ManifoldDatum, cfg: RunConfig) -> list[Verdict]:
    out: list[Verdict] = []
    Q, G = cfg.q_max, cfg.g_window
    for check in cfg.checks:
        ops = cfg.ops or _default_ops(check, m)
        if check == "dual_expansion":
            out += [dual_expansion_check(m, operator(op), Q, G) for op in ops]
        elif check == "rigidity":
            out += [rigidity_check(m, operator(op), Q, G) for op in ops]
        elif check == "vanishing":
            out += [vanishing_check(m, operator(op), Q, G) for op in ops]
        elif check == "translation":
            out += [translation_check(m, op, p, Q, G) for op in ops for p in cfg.p_values]
        elif check == "recursion":
            for op in ops:
                for p in cfg.p_values:
                    out += recursion_check(m, op, p, min(Q, 2), G, max_n=cfg.max_n)
        elif check in ("prop31", "prop41"):
            comps = list(m.components)
            rng = random.Random(cfg.seed)
            comps += [random_component(rng, f"random{k}") for k in range(cfg.samples)]
            for c in comps:
                for p in cfg.p_values:
                    if check == "prop31":
                        out += [check_prop_3_1(c, p, i, min(Q, 2), G) for i in (1, 2)]
                    else:
                        levels = phi_levels(c.n_dims)
                        out += [check_prop_4_1(c, p, j, levels, min(Q, 2), G)
                                for j in range(1, len(levels) + 1)
                                if cfg.max_n is None or levels[j - 1].n <= cfg.max_n]
        elif check == "anomaly":
            rep = hypotheses(m)
            out.append(Verdict("anomaly", {"manifold": m.name}, rep.ok, None,
                               dict(rep.to_json(), reason="; ".join(rep.failures)) if rep.failures
                               else rep.to_json()))
        elif check == "constancy":
            levels = phi_levels(m.weight_set)
            for p in cfg.p_values:
                for j in range(1, len(levels) + 1):
                    if cfg.max_n is not None and levels[j - 1].n > cfg.max_n:
                        continue
                    d = constancy_details(m, p, j, levels)
                    ok = d["formula_agrees"] and d["epsilon_constant"] and d["parity_constant"]
                    params = {"manifold": m.name, "p": p, "j": j, "beta": levels[j - 1].beta}
                    if not ok:
                        d["reason"] = ", ".join(k for k in ("formula_agrees", "epsilon_constant", "parity_constant")
                                                if not d[k]) + " failed"
                    out.append(Verdict("constancy", params, ok, None, d))
    return out


# ---------------------------------------------------------------------------
# output


def _header(m: ManifoldDatum, cfg: RunConfig) -> dict:
    return {"manifold": m.name, "config": cfg.to_json(), "hypotheses": hypotheses(m).to_json()}


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def report_index(m: ManifoldDatum, op_name: str, cfg: RunConfig) -> int:
    op = operator(op_name)
    try:
        res = total_index(m, op, cfg.q_max, cfg.g_window)
    except NotPolynomial as exc:
        sys.stderr.write(f"not a polynomial index: {exc}\n")
        return 1
    rows = [(mm, h, k) for mm, h, k in res.series.items()]
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "h", "coefficient"])
        w.writerows([str(mm), str(h), k] for mm, h, k in rows)
        _emit(buf.getvalue())
    elif cfg.fmt == "json":
        doc = _header(m, cfg)
        doc.update({"operator": op.name, "tail": res.tail.to_json(),
                    "coefficients": [[str(mm), str(h), k] for mm, h, k in rows]})
        _emit(json.dumps(doc, indent=2, sort_keys=True))
    else:
        lines = [f"# {m.name}  operator={op.name}  q_max={cfg.q_max}  g_window={cfg.g_window}",
                 "# hypotheses " + json.dumps(hypotheses(m).to_json(), sort_keys=True),
                 "# tail " + json.dumps(res.tail.to_json(), sort_keys=True)]
        degrees = res.series.q_degrees()
        if not degrees:
            lines.append("index = 0 in the window")
        for mm in degrees:
            lines.append(f"q^{mm}: {res.series.extract_coefficient(mm)!r}")
        _emit("\n".join(lines))
    return 0


def report_checks(m: ManifoldDatum, verdicts: Sequence[Verdict], cfg: RunConfig) -> None:
    if cfg.fmt == "json":
        doc = _header(m, cfg)
        doc["verdicts"] = [v.to_json() for v in verdicts]
        doc["pass"] = all(v.passed for v in verdicts)
        _emit(json.dumps(doc, indent=2, sort_keys=True))
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "pass", "params", "first_violation"])
        for v in verdicts:
            j = v.to_json()
            w.writerow([v.check, "PASS" if v.passed else "FAIL", json.dumps(j["params"], sort_keys=True),
                        json.dumps(j.get("first_violation"), sort_keys=True) if v.first_violation else ""])
        _emit(buf.getvalue())
    else:
        lines = [f"# {m.name}", "# hypotheses " + json.dumps(hypotheses(m).to_json(), sort_keys=True)]
        lines += [v.line() for v in verdicts]
        n_fail = sum(not v.passed for v in verdicts)
        lines.append(f"# {len(verdicts) - n_fail} passed, {n_fail} failed")
        _emit("\n".join(lines))


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eqindex", description="Exact circle-equivariant indices at isolated fixed points.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("datum", help="catalog name or path to a JSON datum")
        p.add_argument("--qmax", help=f"q-truncation (default {DEFAULT_Q_MAX})")
        p.add_argument("--gwindow", help=f"g-window half-width (default {DEFAULT_G})")
        p.add_argument("--op", help="operator name(s), comma separated")
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--seed", type=int)
        p.add_argument("--config", help="TOML file with defaults; flags win")

    pi = sub.add_parser("index", help="print the index table")
    common(pi)
    pc = sub.add_parser("check", help="run checks; exit 1 on any failure")
    common(pc)
    pc.add_argument("--checks", help=f"comma separated subset of {', '.join(CHECKS)}")
    pc.add_argument("--p", help="shift parameters, comma separated (default 1,2)")
    pc.add_argument("--samples", type=int, help="random components added to prop31/prop41")
    pc.add_argument("--max-n", dest="max_n", type=int, help="largest level denominator (0 = all; default 3)")
    pk = sub.add_parser("catalog", help="list or emit catalog data")
    pk.add_argument("action", choices=("list", "emit"))
    pk.add_argument("name", nargs="?")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.command == "catalog":
            if args.action == "list":
                for name, entry in catalog.CATALOG.items():
                    tag = "  [negative control]" if entry.negative_control else ""
                    _emit(f"{name}\t{entry.summary}{tag}")
                return 0
            if not args.name:
                raise UsageError("catalog emit needs a name")
            if args.name not in catalog.CATALOG:
                raise UsageError(f"unknown catalog entry {args.name!r}")
            _emit(catalog.get(args.name).dumps())
            return 0
        cfg = build_config(args)
        m = load_datum(args.datum)
        if args.command == "index":
            ops = cfg.ops or _default_ops("index", m)
            if len(ops) != 1:
                raise UsageError("index takes exactly one operator")
            return report_index(m, ops[0], cfg)
        verdicts = run_checks(m, cfg)
        report_checks(m, verdicts, cfg)
        return 0 if all(v.passed for v in verdicts) else 1
    except InvalidDatum as exc:
        sys.stderr.write(f"invalid datum at {exc.pointer}: {exc.message}\n")
        return 2
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except EngineError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
