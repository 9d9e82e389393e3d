"""JSON encoding of the library's values.

Places appear by name and elements of Q/Z as "a/b" strings, so nothing
passes through floats. ``*_from_json`` decoders rebuild values over a
given base for the types that reports carry.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Any, Mapping

from .dedekind import DedekindLogBase, Divisor, FactoredK, LogGmClass, RatDivisor
from .kummer_torsor import StandardTorsor
from .lattice import FiniteAbelianGroup, GroupElement, IntMatrix, QmodZ
from .monodromy import MonodromyData
from .monoid import AffineMonoid, IntegralityCertificate, MonoidMorphism, MorphismVerdict
from .mun import GaloisStructure, MunTorsorClass, RacElement
from .report import AuditReport, Check


def fraction_str(q: Fraction | int) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def to_json(obj: Any) -> Any:
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, QmodZ):
        return str(obj)
    if isinstance(obj, enum.Enum):
        return obj.name.lower()
    if isinstance(obj, FiniteAbelianGroup):
        return {"invariant_factors": list(obj.invariant_factors)}
    if isinstance(obj, GroupElement):
        return list(obj.coords)
    if isinstance(obj, IntMatrix):
        return obj.tolist()
    if isinstance(obj, Divisor):
        return obj.as_dict()
    if isinstance(obj, FactoredK):
        return {"torsion": obj.torsion, "free": list(obj.free), "divisor": obj.divisor.as_dict()}
    if isinstance(obj, RatDivisor):
        return {"integer_part": obj.integer_part.as_dict(), "frac_part": {p: str(q) for p, q in obj.frac_part}}
    if isinstance(obj, LogGmClass):
        return {"frac": {p: str(q) for p, q in obj.frac_map().items()}, "pic": list(obj.picpart.coords)}
    if isinstance(obj, MunTorsorClass):
        return {"n": obj.n, "rep": to_json(obj.rep)}
    if isinstance(obj, RacElement):
        return {"n": obj.n, "I": obj.I.as_dict(), "z": to_json(obj.z), "branch_divisor": obj.branch_divisor.as_dict()}
    if isinstance(obj, GaloisStructure):
        return {"cl": [to_json(g) for g in obj.cl_tuple], "pilog": [to_json(x) for x in obj.pilog_tuple]}
    if isinstance(obj, DedekindLogBase):
        return {
            "name": obj.name,
            "pic": list(obj.pic_factors),
            "places": {p: list(c) for p, c in zip(obj.places, obj.place_classes)},
            "unit_rank": obj.unit_rank,
            "unit_torsion": obj.unit_torsion,
            "log_support": list(obj.log_support),
        }
    if isinstance(obj, AffineMonoid):
        return {"ambient_rank": obj.ambient_rank, "generators": [list(g) for g in obj.generators]}
    if isinstance(obj, MonoidMorphism):
        return {"source": to_json(obj.source), "target": to_json(obj.target), "matrix": obj.matrix.tolist()}
    if isinstance(obj, MorphismVerdict):
        out = {"status": obj.status.name.lower(), "witness": to_json(obj.witness), "detail": obj.detail}
        if obj.bound is not None:
            out["bound"] = obj.bound
        return out
    if isinstance(obj, IntegralityCertificate):
        return {"n": obj.n, "v": obj.v.matrix.tolist(), "u": obj.u_coords.matrix.tolist()}
    if isinstance(obj, StandardTorsor):
        return {
            "structure_group": to_json(obj.structure_group),
            "rank": obj.rank,
            "finite_locally_free": obj.finite_locally_free,
            "certificate_n": obj.certificate_n,
        }
    if isinstance(obj, MonodromyData):
        return {
            "phi": list(obj.phi.invariant_factors),
            "phi_prime": list(obj.phi_prime.invariant_factors),
            "table": [[str(q) for q in row] for row in obj.table],
        }
    if isinstance(obj, (AuditReport, Check)):
        return obj.to_json()
    if isinstance(obj, Mapping):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [to_json(x) for x in items]
    raise TypeError(f"no JSON encoding for {type(obj).__name__}")


def qmodz_from_json(s: str) -> QmodZ:
    return QmodZ.parse(s)


def divisor_from_json(d: Mapping[str, int]) -> Divisor:
    return Divisor({str(p): int(k) for p, k in d.items()})


def factored_from_json(b: DedekindLogBase, d: Mapping[str, Any]) -> FactoredK:
    return FactoredK.make(b, d["torsion"], d["free"], divisor_from_json(d["divisor"]))


def loggm_from_json(b: DedekindLogBase, d: Mapping[str, Any]) -> LogGmClass:
    frac = d["frac"]
    if set(frac) != set(b.support):
        raise ValueError(f"frac keys {sorted(frac)} do not match the log support {list(b.support)}")
    return LogGmClass(b, tuple(QmodZ.parse(frac[p]) for p in b.support), b.pic(tuple(d["pic"])))


def torsor_from_json(b: DedekindLogBase, d: Mapping[str, Any]) -> MunTorsorClass:
    from .mun import torsor_from_element

    return torsor_from_element(b, d["n"], factored_from_json(b, d["rep"]))


def rac_from_json(b: DedekindLogBase, d: Mapping[str, Any]) -> RacElement:
    from .mun import rac_make

    return rac_make(b, d["n"], divisor_from_json(d["I"]), factored_from_json(b, d["z"]))


def base_from_json(d: Mapping[str, Any]) -> DedekindLogBase:
    return DedekindLogBase(
        name=d["name"],
        pic_factors=tuple(d["pic"]),
        places=tuple(d["places"]),
        place_classes=tuple(tuple(c) for c in d["places"].values()),
        unit_rank=d["unit_rank"],
        unit_torsion=d["unit_torsion"],
        log_support=tuple(d["log_support"]),
    )
