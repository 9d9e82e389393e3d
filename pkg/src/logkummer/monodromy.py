"""Component groups with a monodromy pairing, and the predictions it makes.

The pairing Phi x Phi' -> Q/Z is supplied on generators. A division
torsor is fppf exactly when the reduction of y in Phi' is orthogonal to
the image of G in Phi; when that image is cyclic, generated by x, the
ramification index of the torsor is the order of <x, y> in Q/Z.

Sign conventions for the pairing vary between sources. Orthogonality and
element orders do not depend on them, but raw pairing values do.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .lattice import FiniteAbelianGroup, GroupElement, QmodZ, qmodz_order


class PairingError(ValueError):
    pass


@dataclass(frozen=True)
class MonodromyData:
    phi: FiniteAbelianGroup
    phi_prime: FiniteAbelianGroup
    table: tuple[tuple[QmodZ, ...], ...]

    def __post_init__(self):
        table = tuple(tuple(q if isinstance(q, QmodZ) else QmodZ(q) for q in row) for row in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.phi.ngens or any(len(row) != self.phi_prime.ngens for row in table):
            raise PairingError(
                f"pairing table must be {self.phi.ngens} x {self.phi_prime.ngens}, got "
                f"{len(table)} x {len(table[0]) if table else 0}"
            )
        for i, d in enumerate(self.phi.invariant_factors):
            for j, e in enumerate(self.phi_prime.invariant_factors):
                q = table[i][j]
                if not (d * q).is_zero() or not (e * q).is_zero():
                    raise PairingError(
                        f"table[{i}][{j}] = {q} is not killed by the generator orders {d} and {e}; "
                        "the table does not extend bilinearly"
                    )


def pair(d: MonodromyData, x: GroupElement, y: GroupElement) -> QmodZ:
    if x.parent != d.phi:
        raise PairingError(f"x lies in {x.parent}, expected {d.phi}")
    if y.parent != d.phi_prime:
        raise PairingError(f"y lies in {y.parent}, expected {d.phi_prime}")
    total = QmodZ(0)
    for i, a in enumerate(x.coords):
        for j, b in enumerate(y.coords):
            total = total + (a * b) * d.table[i][j]
    return total


@dataclass(frozen=True)
class DivisionProblem:
    data: MonodromyData
    g_image: tuple[GroupElement, ...]
    y_image: GroupElement

    def __post_init__(self):
        object.__setattr__(self, "g_image", tuple(self.g_image))
        for g in self.g_image:
            if g.parent != self.data.phi:
                raise PairingError(f"generator {g} of the image of G does not lie in {self.data.phi}")
        if self.y_image.parent != self.data.phi_prime:
            raise PairingError(f"y lies in {self.y_image.parent}, expected {self.data.phi_prime}")


def predict_fppf(p: DivisionProblem) -> bool:
    return all(pair(p.data, g, p.y_image).is_zero() for g in p.g_image)


def predict_ramification(d: MonodromyData, x: GroupElement, y: GroupElement) -> int:
    return qmodz_order(pair(d, x, y))


def obstruction(p: DivisionProblem) -> list[tuple[GroupElement, QmodZ]]:
    """Generators of the image of G that pair nontrivially with y."""
    out = []
    for g in p.g_image:
        v = pair(p.data, g, p.y_image)
        if not v.is_zero():
            out.append((g, v))
    return out


def subgroup_elements(gens: Sequence[GroupElement], group: FiniteAbelianGroup) -> set[GroupElement]:
    seen = {group.zero()}
    frontier = [group.zero()]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x + g
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen
