"""Command line front end.

Exit codes: 0 success, 1 mathematical rejection (the input is well formed
but fails a condition, e.g. membership), 2 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import mun
from .config import CONFIG_DIR_ENV, ConfigDocument, ConfigError, parse_config
from .dedekind import DedekindLogBase, Divisor, FactoredK, NotPrincipalError, exactness_audit_gm
from .kummer_torsor import build_standard_torsor
from .monodromy import DivisionProblem, PairingError, obstruction, pair, predict_fppf, predict_ramification
from .monoid import (
    AffineMonoid,
    MonoidMorphism,
    Status,
    check_integral_bounded,
    hilbert_basis,
    integrality_certificate_free_base,
    is_exact,
    is_kummer,
    is_saturated,
)
from .report import AuditReport
from .serialize import to_json

EXIT_OK, EXIT_REJECTED, EXIT_INPUT = 0, 1, 2
DEFAULT_CONFIG_NAME = "default.toml"

FORMULAS = {
    "membership": "v_p(z) = 0 mod n for p outside D",
    "rho": "class of (1/n) div(z) in DivRat(X,D)/Divp(X)",
    "nu": "(v_p(z) mod n)/n for p in D",
    "c": "-sum_p q_p [p], v_p(z) = n q_p + r_p",
    "cl": "(0, c, 2c, ..., (n-1)c)",
    "pilog": "(0, rho, 2 rho, ..., (n-1) rho)",
    "ramification": "n / gcd(n, v_p(z))",
    "fppf": "nu = 0",
    "theta_of_nu": "class of sum n nu_p [p] in Pic/n",
    "branch_divisor": "div(z) + n I",
    "forget": "class of -I + (1/n) branch divisor",
    "pairing": "sum_ij x_i y_j table[i][j]",
    "predicted_ramification": "order of <x, y> in Q/Z",
    "predicted_fppf": "<g, y> = 0 for every g in the image of G",
}


class InputError(ValueError):
    pass


@dataclass
class Outcome:
    command: str
    exit_code: int
    results: dict[str, Any] = field(default_factory=dict)
    inputs: dict[str, Any] = field(default_factory=dict)
    text: list[str] = field(default_factory=list)
    formulas: list[str] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "exit_code": self.exit_code,
            "inputs": self.inputs,
            "results": to_json(self.results),
            "formulas": {k: FORMULAS[k] for k in self.formulas},
        }


# ------------------------------------------------------------------ parsing


def parse_element(doc: ConfigDocument, expr: str) -> FactoredK:
    """Products like ``a*b^2*c^-1`` of named elements; integer literals are
    factored over bases whose places are rational primes."""
    b = _need_base(doc)
    z = b.one()
    for tok in expr.replace(" ", "").split("*"):
        if not tok:
            raise InputError(f"empty factor in element expression {expr!r}")
        name, k = tok, 1
        if "^" in tok:
            name, _, e = tok.rpartition("^")
            try:
                k = int(e)
            except ValueError:
                raise InputError(f"bad exponent {e!r} in {expr!r}") from None
        z = z * _atom(doc, b, name) ** k
    return z


def _atom(doc: ConfigDocument, b: DedekindLogBase, name: str) -> FactoredK:
    if name in doc.elements:
        return doc.elements[name]
    if name == "1":
        return b.one()
    try:
        value = int(name)
    except ValueError:
        raise InputError(f"unknown element {name!r}; declared: {sorted(doc.elements)}") from None
    return _factor_integer(b, value)


def _factor_integer(b: DedekindLogBase, value: int) -> FactoredK:
    if value == 0:
        raise InputError("0 is not in K^*")
    if not all(p.isdigit() for p in b.places) or b.unit_torsion != 2:
        raise InputError(f"integer literal {value} needs a base whose places are rational primes")
    div: dict[str, int] = {}
    m = abs(value)
    for p in b.places:
        q = int(p)
        while m % q == 0:
            div[p] = div.get(p, 0) + 1
            m //= q
    if m != 1:
        raise InputError(f"{value} has prime factors outside the declared places {list(b.places)}")
    return b.element(div, 1 if value < 0 else 0)


def parse_divisor(doc: ConfigDocument, text: str) -> Divisor:
    """``p2:1,p3:-1``; ``0`` or an empty string is the zero divisor."""
    b = _need_base(doc)
    text = text.strip()
    if text in ("", "0"):
        return Divisor()
    out = {}
    for part in text.split(","):
        p, sep, k = part.partition(":")
        p = p.strip()
        if not sep:
            k = "1"
        if p not in b.places:
            raise InputError(f"unknown place {p!r} in divisor {text!r}")
        try:
            out[p] = out.get(p, 0) + int(k)
        except ValueError:
            raise InputError(f"bad coefficient {k!r} in divisor {text!r}") from None
    return Divisor(out)


def _coords(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InputError(f"expected comma separated integers, got {text!r}") from None


def _need_base(doc: ConfigDocument) -> DedekindLogBase:
    if doc.base is None:
        raise InputError("the config has no [base] section")
    return doc.base


def _n(value: int) -> int:
    if value < 1:
        raise InputError(f"n must be >= 1, got {value}")
    return value


# ----------------------------------------------------------------- commands


def cmd_validate(doc: ConfigDocument, args) -> Outcome:
    out = Outcome("validate", EXIT_OK)
    if doc.base is not None:
        b = doc.base
        out.results["base"] = b
        out.results["places_generate_pic"] = b.places_generate_pic()
        out.results["elements"] = {k: v for k, v in doc.elements.items()}
        out.text.append(f"base {b.name}: Pic = {list(b.pic_factors) or 'trivial'}, {len(b.places)} places, D = {list(b.support)}")
        out.text.append(f"  units: torsion order {b.unit_torsion}, free rank {b.unit_rank}")
        if not b.places_generate_pic():
            out.text.append("  note: the declared places do not generate Pic")
        for k, v in doc.elements.items():
            out.text.append(f"  element {k}: {v}")
    out.results["monoids"] = dict(doc.monoids)
    out.results["morphisms"] = sorted(doc.morphisms)
    for k, M in doc.monoids.items():
        out.text.append(f"monoid {k}: generators {list(M.generators)}")
    for k in doc.morphisms:
        out.text.append(f"morphism {k}")
    if doc.pairing is not None:
        out.results["pairing"] = doc.pairing
        out.text.append(f"pairing: Phi = {list(doc.pairing.phi.invariant_factors)}, Phi' = {list(doc.pairing.phi_prime.invariant_factors)}")
    out.text.append("valid")
    return out


def _monoid_report(M: AffineMonoid) -> dict[str, Any]:
    sat = is_saturated(M)
    res: dict[str, Any] = {"generators": [list(g) for g in M.generators], "saturated": sat}
    if M.rank <= 3:
        res["hilbert_basis"] = [list(h) for h in hilbert_basis(M)]
    return res


def _morphism_report(u: MonoidMorphism, bound: int) -> dict[str, Any]:
    res: dict[str, Any] = {"matrix": u.matrix.tolist()}
    fs = all(is_saturated(M).status is Status.VERIFIED for M in (u.source, u.target))
    res["fs"] = fs
    if not fs:
        res["detail"] = "source or target is not saturated; exactness and Kummer verdicts need fs monoids"
        return res
    res["exact"] = is_exact(u)
    k = is_kummer(u)
    res["kummer"] = k
    if k.status is Status.VERIFIED:
        t = build_standard_torsor(u)
        res["torsor"] = t
    if u.source == AffineMonoid.free(u.source.ambient_rank) and k.status is Status.VERIFIED:
        cert = integrality_certificate_free_base(u)
        res["integral"] = {"status": "verified", "certificate": cert}
    else:
        res["integral"] = check_integral_bounded(u, bound)
    return res


def cmd_monoid_check(doc: ConfigDocument, args) -> Outcome:
    out = Outcome("monoid check", EXIT_OK)
    names = [args.morphism] if args.morphism else sorted(doc.morphisms)
    for name in names:
        if name not in doc.morphisms:
            raise InputError(f"unknown morphism {name!r}; declared: {sorted(doc.morphisms)}")
    if not names and not doc.monoids:
        raise InputError("the config declares no monoids or morphisms")
    out.results["monoids"] = {k: _monoid_report(M) for k, M in doc.monoids.items()}
    for k, r in out.results["monoids"].items():
        s = r["saturated"]
        out.text.append(f"monoid {k}: saturated {s.status.name.lower()}" + (f" (witness {s.witness})" if s.witness else ""))
        if "hilbert_basis" in r:
            out.text.append(f"  Hilbert basis {r['hilbert_basis']}")
    out.results["morphisms"] = {}
    for name in names:
        r = _morphism_report(doc.morphisms[name], args.bound)
        out.results["morphisms"][name] = r
        out.text.append(f"morphism {name}: matrix {r['matrix']}")
        if not r["fs"]:
            out.text.append(f"  {r['detail']}")
            continue
        for key in ("exact", "kummer"):
            v = r[key]
            w = f" (witness {v.witness})" if v.status is Status.REFUTED else ""
            out.text.append(f"  {key}: {v.status.name.lower()}{w}")
        integ = r["integral"]
        if isinstance(integ, dict):
            out.text.append(f"  integral: verified, v∘u = [{integ['certificate'].n}]")
        else:
            out.text.append(f"  integral: {integ.status.name.lower()} ({integ.detail})")
        if "torsor" in r:
            t = r["torsor"]
            out.text.append(f"  structure group {list(t.structure_group.invariant_factors)}, rank {t.rank}")
    return out


def cmd_torsor(doc: ConfigDocument, args) -> Outcome:
    b = _need_base(doc)
    n = _n(args.n)
    z = parse_element(doc, args.element)
    out = Outcome("torsor", EXIT_OK, formulas=["membership"])
    out.results["element"] = z
    try:
        T = mun.torsor_from_element(b, n, z)
    except mun.MembershipError as exc:
        out.exit_code = EXIT_REJECTED
        out.results["membership"] = {"ok": False, "place": exc.place, "valuation": exc.valuation}
        out.text.append(f"rejected: {exc}")
        return out
    places = list(b.support)
    if args.place:
        if args.place not in b.places:
            raise InputError(f"unknown place {args.place!r}")
        places = [args.place]
    nu = mun.nu(T)
    g = mun.galois_structure(T)
    out.results.update(
        membership={"ok": True},
        trivial=T.is_trivial(),
        rho=mun.rho(T),
        nu=nu,
        c=mun.c_of(T),
        cl=list(g.cl_tuple),
        pilog=list(g.pilog_tuple),
        ramification={p: mun.ramification_index(T, p) for p in places},
        fppf=mun.is_fppf(T),
        theta_of_nu=mun.theta(b, n, nu),
    )
    out.formulas += ["rho", "nu", "c", "cl", "pilog", "ramification", "fppf", "theta_of_nu"]
    r = out.results
    out.text += [
        f"z = {z}, n = {n}",
        f"  class trivial: {r['trivial']}",
        f"  rho = {r['rho']}",
        "  nu = {" + ", ".join(f"{p}: {q}" for p, q in nu.items()) + "}",
        f"  c(z) = {list(r['c'].coords)}",
        f"  cl = {[list(x.coords) for x in r['cl']]}",
        f"  pi^log = [{', '.join(str(x) for x in r['pilog'])}]",
        "  ramification: " + ", ".join(f"e_{p} = {e}" for p, e in r["ramification"].items()),
        f"  fppf: {r['fppf']}",
    ]
    return out


def _rac_summary(r: mun.RacElement) -> dict[str, Any]:
    T = mun.rac_to_torsor(r)
    return {
        "element": r,
        "torsor": T,
        "torsor_trivial": T.is_trivial(),
        "nu": mun.nu(T),
        "forget": mun.rac_forget(r),
        "neutral": mun.rac_eq(r, mun.rac_neutral(r.base, r.n)),
    }


def cmd_rac(doc: ConfigDocument, args) -> Outcome:
    b = _need_base(doc)
    n = _n(args.n)
    out = Outcome("rac", EXIT_OK, formulas=["branch_divisor", "forget"])
    try:
        elems = []
        if args.element is not None or args.I is not None:
            elems.append(mun.rac_make(b, n, parse_divisor(doc, args.I or "0"), parse_element(doc, args.element or "1")))
        if args.times_element is not None or args.times_I is not None:
            if not elems:
                raise InputError("--times-* needs a first element given by --element/--I")
            elems.append(mun.rac_make(b, n, parse_divisor(doc, args.times_I or "0"), parse_element(doc, args.times_element or "1")))
    except mun.RacError as exc:
        out.exit_code = EXIT_REJECTED
        out.results["valid"] = False
        out.results["negative"] = exc.negative
        out.results["off_support"] = exc.off_support
        out.text.append(f"rejected: {exc}")
        return out
    except NotPrincipalError as exc:
        raise InputError(str(exc)) from None
    for i, r in enumerate(elems):
        s = _rac_summary(r)
        out.results[f"element_{i + 1}"] = s
        out.text.append(f"element {i + 1}: I = {r.I}, z = {r.z}, branch divisor {r.branch_divisor}")
        out.text.append(f"  torsor trivial: {s['torsor_trivial']}, forget = {s['forget']}, equals neutral: {s['neutral']}")
    if len(elems) == 2:
        prod = mun.rac_mul(*elems)
        s = _rac_summary(prod)
        s["equal"] = mun.rac_eq(*elems)
        out.results["product"] = s
        out.text.append(f"product: I = {prod.I}, z = {prod.z}, branch divisor {prod.branch_divisor}")
        out.text.append(f"  torsor trivial: {s['torsor_trivial']}, elements isomorphic: {s['equal']}")
    w = mun.kernel_witness(b, n)
    if w is not None:
        neutral = mun.rac_eq(w, mun.rac_neutral(b, n))
        trivial = mun.rac_to_torsor(w).is_trivial()
        out.results["kernel_witness"] = {"element": w, "equals_neutral": neutral, "torsor_trivial": trivial}
        out.text.append(
            f"kernel witness: I = {w.I}, z = 1, branch divisor {w.branch_divisor}; "
            f"neutral: {neutral}, torsor trivial: {trivial}"
        )
    return out


def cmd_monodromy(doc: ConfigDocument, args) -> Outcome:
    d = doc.pairing
    if d is None:
        raise InputError("the config has no [pairing] section")
    try:
        x = d.phi(_coords(args.x)) if len(_coords(args.x)) == d.phi.ngens else None
        y = d.phi_prime(_coords(args.y)) if len(_coords(args.y)) == d.phi_prime.ngens else None
        if x is None or y is None:
            raise InputError(f"x needs {d.phi.ngens} and y needs {d.phi_prime.ngens} coordinates")
        gens = [d.phi(_coords(g)) for g in args.g.split(";")] if args.g else [x]
        if any(len(g.coords) != d.phi.ngens for g in gens):
            raise InputError(f"each generator of G needs {d.phi.ngens} coordinates")
        prob = DivisionProblem(d, tuple(gens), y)
    except PairingError as exc:
        raise InputError(str(exc)) from None
    out = Outcome("monodromy", EXIT_OK, formulas=["pairing", "predicted_ramification", "predicted_fppf"])
    out.results.update(
        x=x,
        y=y,
        pairing=pair(d, x, y),
        ramification_index=predict_ramification(d, x, y),
        fppf=predict_fppf(prob),
        obstruction=[{"g": g, "value": v} for g, v in obstruction(prob)],
    )
    r = out.results
    out.text += [
        f"<x, y> = {r['pairing']} (sign convention dependent)",
        f"  predicted ramification index: {r['ramification_index']}",
        f"  predicted fppf: {r['fppf']}",
    ]
    return out


def cmd_audit(doc: ConfigDocument, args) -> Outcome:
    b = _need_base(doc)
    n = _n(args.n)
    sample = [p.strip() for p in args.sample.split(",")] if args.sample else list(b.places)
    for p in sample:
        if p not in b.places:
            raise InputError(f"unknown place {p!r} in sample")
    seq = mun.audit_mun_sequence(b, n, sample)
    gm = exactness_audit_gm(b)
    rnd = random_square_audit(b, n, sample, args.samples, args.seed)
    out = Outcome("audit", EXIT_OK)
    out.results = {"sequence": seq, "gm": gm, "squares": rnd}
    for rep in (seq, gm, rnd):
        out.text += rep.lines()
    if not all(r.passed for r in (seq, gm, rnd)):
        out.exit_code = EXIT_REJECTED
    return out


def random_square_audit(b: DedekindLogBase, n: int, sample: Sequence[str], count: int, seed: int) -> AuditReport:
    """Seeded random Rac elements: rac_to_torsor after rac_of_unit is
    unit_to_torsor, rho after rac_to_torsor is rac_forget, and the pi^log
    tuple is the multiples of its first entry."""
    rng = random.Random(seed)
    rep = AuditReport(f"random squares (n={n}, seed={seed})")
    units = mun.unit_representatives(b, n)
    bad_d, bad_o, bad_pi = 0, 0, 0
    for _ in range(count):
        a = rng.choice(units)
        if mun.rac_to_torsor(mun.rac_of_unit(b, n, a)) != mun.unit_to_torsor(b, n, a):
            bad_d += 1
            rep.violations.append(f"omega(i({a})) != d({a})")
        r = random_rac(b, n, sample, rng)
        if mun.rho(mun.rac_to_torsor(r)) != mun.rac_forget(r):
            bad_o += 1
            rep.violations.append(f"rho(omega(r)) != o(r) for I={r.I}, z={r.z}")
        pl = mun.pilog_of(mun.rac_to_torsor(r))
        if n > 1 and any(pl[k] != k * pl[1] for k in range(n)):
            bad_pi += 1
            rep.violations.append(f"pi^log tuple law fails for z={r.z}")
    rep.add("omega∘i = d", bad_d == 0, count=count)
    rep.add("rho∘omega = o", bad_o == 0, count=count)
    rep.add("pi^log entry k = k * entry 1", bad_pi == 0, count=count)
    return rep


def random_rac(b: DedekindLogBase, n: int, places: Sequence[str], rng: random.Random, spread: int = 3) -> mun.RacElement:
    """A random valid (I, z): z principal on ``places`` with a random unit
    part, and I chosen so that div(z) + n I is effective and lives on D."""
    while True:
        div = {p: rng.randint(-spread, spread) for p in places}
        try:
            z = b.element(div, rng.randrange(b.unit_torsion), [rng.randint(-2, 2) for _ in range(b.unit_rank)])
        except NotPrincipalError:
            continue
        I = {}
        for p in places:
            v = div[p]
            if b.in_support(p):
                I[p] = -(v // n) + rng.randint(0, 1)
            elif v % n == 0:
                I[p] = -v // n
            else:
                break
        else:
            return mun.rac_make(b, n, I, z)


# ------------------------------------------------------------------- driver


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit a JSON report")
    common.add_argument(
        "--config",
        default=argparse.SUPPRESS,
        help=f"TOML description; relative paths also resolve against ${CONFIG_DIR_ENV}",
    )
    p = argparse.ArgumentParser(prog="logkummer", description="Log Kummer torsor calculus over Dedekind bases.", parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="parse and validate a config")

    pm = sub.add_parser("monoid", parents=[common], help="monoid and morphism checks")
    msub = pm.add_subparsers(dest="action", required=True)
    pc = msub.add_parser("check", parents=[common], help="Kummer, exactness and integrality verdicts")
    pc.add_argument("--morphism", help="check only this morphism")
    pc.add_argument("--bound", type=int, default=2, help="box bound for the integrality search")

    pt = sub.add_parser("torsor", parents=[common], help="invariants of the mu_n-torsor of an element")
    pt.add_argument("--element", required=True, help="product of declared elements, e.g. 'a*b^2'")
    pt.add_argument("--n", type=int, required=True)
    pt.add_argument("--place", help="report ramification at this place only")

    pr = sub.add_parser("rac", parents=[common], help="cyclic cover data (I, z)")
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--I", help="divisor 'p:k,q:l'")
    pr.add_argument("--element")
    pr.add_argument("--times-I", dest="times_I")
    pr.add_argument("--times-element", dest="times_element")

    pd = sub.add_parser("monodromy", parents=[common], help="predictions from a pairing table")
    pd.add_argument("--x", required=True, help="coordinates in Phi, comma separated")
    pd.add_argument("--y", required=True, help="coordinates in Phi', comma separated")
    pd.add_argument("--g", help="generators of the image of G, ';' separated (default: x)")

    pa = sub.add_parser("audit", parents=[common], help="exactness audits")
    pa.add_argument("--n", type=int, required=True)
    pa.add_argument("--sample", help="places spanning the enumerated divisors (default: all)")
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--samples", type=int, default=50, help="random Rac elements to test")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "torsor": cmd_torsor,
    "rac": cmd_rac,
    "monodromy": cmd_monodromy,
    "audit": cmd_audit,
}


def _config_path(args) -> str:
    path = getattr(args, "config", None)
    if path:
        return path
    default_dir = os.environ.get(CONFIG_DIR_ENV)
    if default_dir:
        return str(Path(default_dir) / DEFAULT_CONFIG_NAME)
    raise InputError(f"no --config given and ${CONFIG_DIR_ENV} is not set")


def run(argv: Sequence[str]) -> tuple[int, Outcome | None, str]:
    """Returns (exit code, outcome, error text) without printing."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_INPUT), None, ""
    name = "monoid check" if args.command == "monoid" else args.command
    try:
        doc = parse_config(_config_path(args))
        handler = cmd_monoid_check if args.command == "monoid" else COMMANDS[args.command]
        outcome = handler(doc, args)
    except ConfigError as exc:
        return EXIT_INPUT, None, "config error: " + "\n  ".join([exc.path or ""] + [str(i) for i in exc.issues])
    except (InputError, NotPrincipalError) as exc:
        return EXIT_INPUT, None, f"{name}: {exc}"
    outcome.inputs = {"argv": [a for a in argv if a != "--json"]}
    return outcome.exit_code, outcome, ""


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    as_json = "--json" in argv
    code, outcome, err = run(argv)
    if outcome is None:
        if err:
            if as_json:
                print(json.dumps({"exit_code": code, "error": err}, indent=2))
            print(err, file=sys.stderr)
        return code
    if as_json:
        print(json.dumps(outcome.to_json(), indent=2, ensure_ascii=False))
    else:
        print("\n".join(outcome.text))
    return code


if __name__ == "__main__":
    sys.exit(main())
