"""Command-line interface: ``bclab <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 a verification failed.
Every non-integer number is written as a decimal (or exact ``p/q``) string so
output is byte-identical across runs and platforms.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import mpmath
from mpmath import mpf

from . import finite_induction as fi
from .forms import has_norm_minus_one_unit
from .hecke import affine, double_coset_decompose, delta_formula
from .ideals import narrow_class_group, principal_ideal, split_prime, unit_ideal, wide_class_group
from .kms import build_level_model, constant, indicator, kms_eval, make_point
from .quadfield import make_field, parse_element, unit_info
from .zeta import dedekind_zeta, divergence_product, induced_mass_direct, induced_ratio, partial_zeta

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 2, 3
DEFAULT_CUTOFF = 10**4
DEFAULT_PRECISION = 30


class CheckFailed(RuntimeError):
    """A computed identity did not hold; carries the report that was produced."""

    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class RunConfig:
    command: str
    d: int
    beta: str | None
    cutoff: int
    modulus: int
    precision: int
    fmt: str
    out: str | None
    seed: int
    threads: int

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> RunConfig:
        if ns.cutoff < 1:
            raise ValueError("--cutoff must be positive")
        if ns.modulus < 1:
            raise ValueError("--modulus must be positive")
        if not 5 <= ns.precision <= 1000:
            raise ValueError("--precision must lie in [5, 1000]")
        threads = os.environ.get("BCLAB_THREADS", "1")
        if not threads.isdigit() or int(threads) < 1:
            raise ValueError("BCLAB_THREADS must be a positive integer")
        make_field(ns.field)
        return cls(ns.command, ns.field, ns.beta, ns.cutoff, ns.modulus, ns.precision, ns.format, ns.out, ns.seed, int(threads))

    @property
    def field(self):
        return make_field(self.d)


# -- number formatting ------------------------------------------------------------

def fmt_num(v, digits: int) -> str | int:
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return mpmath.nstr(v if isinstance(v, mpf) else mpmath.mpmathify(v), max(digits, 1))


def parse_beta(text: str | None, required: bool = True):
    if text is None:
        if required:
            raise ValueError("--beta is required for this command")
        return None
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot parse beta {text!r}") from None
    if q <= 0:
        raise ValueError("beta must be positive")
    return int(q) if q.denominator == 1 else q


def _mp_beta(beta):
    return beta if isinstance(beta, int) else mpf(beta.numerator) / beta.denominator


# -- commands -----------------------------------------------------------------------

def cmd_field(cfg: RunConfig, ns) -> dict:
    F = cfg.field
    info = unit_info(F)
    return {
        "d": F.d,
        "discriminant": F.disc,
        "signature": "rational" if F.is_rational else ("real" if F.is_real else "imaginary"),
        "omega": F.omega_str,
        "fundamental_unit": str(info.fundamental_unit) if info.fundamental_unit is not None else None,
        "fundamental_unit_norm": info.fu_norm,
        "torsion_order": info.torsion_order,
        "unit_index_plus": info.index_plus,
        "totally_positive_unit_generator": str(info.tp_generator) if info.tp_generator is not None else None,
    }


def cmd_classgroup(cfg: RunConfig, ns) -> dict:
    F = cfg.field
    Cp, Cw = narrow_class_group(F), wide_class_group(F)
    out = {
        "d": F.d,
        "discriminant": F.disc,
        "class_number": Cw.order,
        "invariants": list(Cw.invariants),
        "generators": [str(I) for I in Cw.generators],
        "narrow_class_number": Cp.order,
        "narrow_invariants": list(Cp.invariants),
        "narrow_generators": [str(I) for I in Cp.generators],
        "class_representatives": [str(I) for I in Cp.elements],
    }
    if F.is_real:
        out["norm_minus_one_unit"] = unit_info(F).fu_norm == -1
        expected = Cw.order if out["norm_minus_one_unit"] else 2 * Cw.order
        if has_norm_minus_one_unit(F.disc) != out["norm_minus_one_unit"] or Cp.order != expected:
            raise CheckFailed("narrow and wide class numbers are inconsistent", out)
    return out


def _exact(q, ns) -> str | None:
    """The exact rational as ``p/q`` when ``--exact`` was given and one is available."""
    if q is None or not ns.exact:
        return None
    sys.set_int_max_str_digits(0)
    return fmt_num(q, 0)


def _zeta_report(z, cfg: RunConfig, ns) -> dict:
    return {
        "d": cfg.d,
        "beta": fmt_num(Fraction(cfg.beta), cfg.precision),
        "cutoff": z.cutoff,
        "value": fmt_num(z.value, cfg.precision),
        "tail_bound": fmt_num(z.tail_bound, 6),
        "exact": _exact(z.exact, ns),
    }


def cmd_zeta(cfg: RunConfig, ns) -> dict:
    beta = parse_beta(cfg.beta)
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    return _zeta_report(dedekind_zeta(cfg.field, _mp_beta(beta), cfg.cutoff, cfg.precision), cfg, ns)


def cmd_partial_zeta(cfg: RunConfig, ns) -> dict:
    beta = parse_beta(cfg.beta)
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    G = narrow_class_group(cfg.field)
    if not 0 <= ns.cls < G.order:
        raise ValueError(f"class index must lie in [0, {G.order - 1}]")
    out = _zeta_report(partial_zeta(cfg.field, ns.cls, _mp_beta(beta), cfg.cutoff, cfg.precision), cfg, ns)
    out["class"] = ns.cls
    out["class_representative"] = str(G.elements[ns.cls])
    return out


def _delta_row(F, y, x) -> dict:
    g = affine(F, y, x)
    dec = double_coset_decompose(g)
    formula = delta_formula(g)
    return {"y": str(g.y), "x": str(g.x), "L": dec.L, "R": dec.R, "delta": fmt_num(dec.delta, 0),
            "norm_formula": fmt_num(formula, 0), "match": dec.delta == formula}


def _random_tp(F, rng: random.Random):
    while True:
        x = F(Fraction(rng.randint(-6, 6), rng.randint(1, 3)), Fraction(rng.randint(-4, 4), rng.randint(1, 3)) if not F.is_rational else 0)
        if not x.is_zero() and x.is_totally_positive():
            return x


def cmd_hecke_delta(cfg: RunConfig, ns) -> dict:
    F = cfg.field
    if ns.random:
        rng = random.Random(cfg.seed)
        rows = []
        for _ in range(ns.random):
            y = F(Fraction(rng.randint(-5, 5), rng.randint(1, 4)), Fraction(rng.randint(-5, 5), rng.randint(1, 4)) if not F.is_rational else 0)
            rows.append(_delta_row(F, y, _random_tp(F, rng)))
        out = {"d": F.d, "seed": cfg.seed, "samples": rows, "match": all(r["match"] for r in rows)}
    else:
        if ns.x is None:
            raise ValueError("--x is required (or use --random N)")
        out = _delta_row(F, parse_element(F, ns.y), parse_element(F, ns.x))
    if not out["match"]:
        raise CheckFailed("coset count disagrees with the norm formula", out)
    return out


def _parse_ideal(F, text: str):
    """``"prime:p"`` or ``"prime:p:i"`` for a prime above p, otherwise a principal generator."""
    if text.startswith("prime:"):
        parts = text.split(":")
        p = int(parts[1])
        i = int(parts[2]) if len(parts) > 2 else 0
        above = split_prime(F, p).primes_above
        if not 0 <= i < len(above):
            raise ValueError(f"there are {len(above)} primes above {p}")
        return above[i][0]
    if text in ("1", "O"):
        return unit_ideal(F)
    x = parse_element(F, text)
    if x.is_zero():
        raise ValueError("the zero element does not generate a fractional ideal")
    return principal_ideal(x)


def _parse_residue(F, text: str):
    parts = [int(t) for t in text.split(",")]
    if len(parts) == 1:
        parts.append(0)
    if len(parts) != 2 or (F.is_rational and parts[1]):
        raise ValueError(f"cannot parse residue {text!r}")
    return tuple(parts)


def _parse_test_function(model, text: str):
    if text == "one":
        return constant(model)
    if text.startswith("indicator:"):
        pts = [_parse_residue(model.field, t) for t in text.split(":", 1)[1].split(";") if t]
        return indicator(model, pts)
    raise ValueError(f"cannot parse test function {text!r}; use 'one' or 'indicator:a,b;a,b'")


def cmd_kms_eval(cfg: RunConfig, ns) -> dict:
    beta = parse_beta(cfg.beta)
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    F = cfg.field
    model = build_level_model(F, cfg.modulus)
    x = make_point(_parse_ideal(F, ns.g), _parse_residue(F, ns.omega), model)
    f = _parse_test_function(model, ns.f)
    v = kms_eval(beta if isinstance(beta, int) else _mp_beta(beta), x, f, cfg.cutoff, cfg.precision)
    return {
        "d": F.d, "beta": fmt_num(Fraction(cfg.beta), 0), "modulus": cfg.modulus, "g": str(x.g), "omega": list(x.omega),
        "class": x.cls, "cutoff": v.cutoff, "terms": v.terms,
        "value": fmt_num(v.value, cfg.precision),
        "exact": _exact(v.exact, ns),
        "partition_function": fmt_num(v.partition_function, cfg.precision),
    }


def cmd_induce_ratio(cfg: RunConfig, ns) -> dict:
    beta = parse_beta(cfg.beta)
    if beta <= 1:
        raise ValueError("beta must exceed 1; use the divergence command for beta in (0, 1]")
    if cfg.field.is_rational:
        raise ValueError("the induced ratio needs a quadratic field")
    r = induced_ratio(cfg.field, _mp_beta(beta), cfg.cutoff, dps=cfg.precision)
    out = {"d": cfg.d, "beta": fmt_num(Fraction(cfg.beta), 0), "cutoff": cfg.cutoff,
           "value": fmt_num(r.value, cfg.precision), "tail_bound": fmt_num(r.tail_bound, 6),
           "numerator": fmt_num(r.numerator.value, cfg.precision), "denominator": fmt_num(r.denominator.value, cfg.precision)}
    if ns.direct:
        m = induced_mass_direct(cfg.field, _mp_beta(beta), cfg.cutoff, cfg.cutoff, cfg.precision)
        out["direct_mass"] = fmt_num(m.value, cfg.precision)
        out["direct_upper"] = fmt_num(m.upper, cfg.precision)
        rel = abs(m.value / r.value - 1)
        out["relative_difference"] = fmt_num(rel, 6)
        consistent = m.value <= r.value + r.tail_bound and r.value - r.tail_bound <= m.upper
        out["consistent"] = bool(consistent)
        if not consistent:
            raise CheckFailed("direct mass falls outside the propagated bounds", out)
    return out


def cmd_divergence(cfg: RunConfig, ns) -> dict:
    beta = parse_beta(cfg.beta)
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    if cfg.field.is_rational:
        raise ValueError("the divergence product needs a quadratic field")
    reps = divergence_product(cfg.field, _mp_beta(beta) if beta != 1 else 1, ns.prime_bound, dps=cfg.precision)
    out = {
        "d": cfg.d, "beta": fmt_num(Fraction(cfg.beta), 0), "prime_bound": ns.prime_bound, "primes": len(reps),
        "product": fmt_num(reps[-1].running_product if reps else mpf(1), cfg.precision),
        "min_factor": fmt_num(min((r.factor for r in reps), default=mpf(1)), cfg.precision),
        "factors_at_least_one": all(r.factor_exact >= 1 if r.factor_exact is not None else r.factor >= 1 for r in reps),
        "exact_factors": all(r.factor_exact is not None for r in reps),
        "rows": [{"p": r.p, "kind": r.splitting.kind, "factor": fmt_num(r.factor_exact if r.factor_exact is not None else r.factor, cfg.precision),
                  "running_product": fmt_num(r.running_product, cfg.precision)} for r in reps[: ns.rows]],
    }
    if not out["factors_at_least_one"]:
        raise CheckFailed("an Euler factor fell below one", out)
    return out


def cmd_finite_induction(cfg: RunConfig, ns) -> dict:
    if not 1 <= ns.max_order <= 32 or not 1 <= ns.max_set <= 6:
        raise ValueError("--max-order must lie in [1, 32] and --max-set in [1, 6]")
    rep = fi.run_suite(ns.max_order, ns.max_set, min(ns.stages_order, ns.max_order), involution=not ns.no_involution)
    out = {"max_order": ns.max_order, "max_set": ns.max_set, "stages_order": min(ns.stages_order, ns.max_order),
           "instances": rep.instances, "checks": rep.checks, "failures": [[repr(l), r.name, repr(r.witness)] for l, r in rep.failures[:20]],
           "ok": rep.ok}
    if not rep.ok:
        raise CheckFailed(f"{len(rep.failures)} finite induction checks failed", out)
    return out


COMMANDS = {
    "field": cmd_field,
    "classgroup": cmd_classgroup,
    "zeta": cmd_zeta,
    "partial-zeta": cmd_partial_zeta,
    "hecke-delta": cmd_hecke_delta,
    "kms-eval": cmd_kms_eval,
    "induce-ratio": cmd_induce_ratio,
    "divergence": cmd_divergence,
    "finite-induction": cmd_finite_induction,
}

# list-valued keys printed as tables in csv mode
_TABLE_KEYS = {"divergence": "rows", "hecke-delta": "samples"}


def load_schema(command: str) -> dict:
    """The published JSON schema for a command's report."""
    if command not in COMMANDS:
        raise KeyError(command)
    return json.loads(resources.files("bclab").joinpath("schemas", f"{command}.json").read_text(encoding="utf-8"))


# -- output -----------------------------------------------------------------------

def render(command: str, report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if fmt == "text":
        lines = []
        for k, v in report.items():
            if isinstance(v, list) and v and isinstance(v[0], dict):
                lines.append(f"{k}:")
                lines.extend("  " + "  ".join(f"{a}={b}" for a, b in row.items()) for row in v)
            else:
                lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    key = _TABLE_KEYS.get(command)
    rows = report.get(key) if key else None
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    else:
        flat = {k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in report.items()}
        w = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
        w.writeheader()
        w.writerow(flat)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=int, default=1, help="squarefree d for Q(sqrt d); 1 means Q")
    common.add_argument("--beta", default=None, help="inverse temperature, an exact rational such as 2 or 3/2")
    common.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF, help="norm cutoff (default 10000)")
    common.add_argument("--modulus", type=int, default=1, help="level m of the finite model")
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="significant digits (default 30)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")

    p = argparse.ArgumentParser(prog="bclab", description="Exact arithmetic for Hecke pairs, zeta sums and KMS states.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("field", "classgroup"):
        sub.add_parser(name, parents=[common])
    exact = argparse.ArgumentParser(add_help=False)
    exact.add_argument("--exact", action="store_true", help="also print the exact rational value when beta is an integer")
    sub.add_parser("zeta", parents=[common, exact])
    s = sub.add_parser("partial-zeta", parents=[common, exact])
    s.add_argument("--class", dest="cls", type=int, default=0, help="narrow class index (0 is principal)")
    s = sub.add_parser("hecke-delta", parents=[common])
    s.add_argument("--y", default="0", help="translation part, syntax a+b*w")
    s.add_argument("--x", default=None, help="totally positive multiplier, syntax a+b*w")
    s.add_argument("--random", type=int, default=0, metavar="N", help="check N random elements instead")
    s = sub.add_parser("kms-eval", parents=[common, exact])
    s.add_argument("--g", default="1", help="ideal: an element (principal ideal), 'prime:p' or 'prime:p:i'")
    s.add_argument("--omega", default="1", help="invertible residue mod m, 'a' or 'a,b'")
    s.add_argument("--f", default="one", help="'one' or 'indicator:a,b;a,b'")
    s = sub.add_parser("induce-ratio", parents=[common])
    s.add_argument("--direct", action="store_true", help="also compute the direct product of local masses")
    s = sub.add_parser("divergence", parents=[common])
    s.add_argument("--prime-bound", type=int, default=10**4)
    s.add_argument("--rows", type=int, default=25, help="number of per-prime rows to print")
    s = sub.add_parser("finite-induction", parents=[common])
    s.add_argument("--max-order", type=int, default=12)
    s.add_argument("--max-set", type=int, default=4)
    s.add_argument("--stages-order", type=int, default=16)
    s.add_argument("--no-involution", action="store_true")
    return p


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_OK
    code = EXIT_OK
    try:
        cfg = RunConfig.from_args(ns)
        report = COMMANDS[ns.command](cfg, ns)
    except CheckFailed as e:
        print(f"bclab: check failed: {e}", file=stderr)
        report, code = e.report, EXIT_CHECK
        cfg = RunConfig(ns.command, ns.field, ns.beta, ns.cutoff, ns.modulus, ns.precision, ns.format, ns.out, ns.seed, 1)
    except (ValueError, ZeroDivisionError) as e:
        print(f"bclab: invalid input: {e}", file=stderr)
        return EXIT_INVALID
    text = render(ns.command, report, cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
