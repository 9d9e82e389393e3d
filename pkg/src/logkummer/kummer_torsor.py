"""Standard Kummer torsors attached to a Kummer chart u: P -> Q.

The diagonalizable structure group D(Q^gp/u(P^gp)) is recorded through
the finite abelian group Q^gp/u(P^gp) alone.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import FiniteAbelianGroup
from .monoid import (
    AffineMonoid,
    MonoidMorphism,
    Status,
    integrality_certificate_free_base,
    is_kummer,
)


class NotKummerError(ValueError):
    def __init__(self, verdict):
        self.verdict = verdict
        super().__init__(f"chart is not Kummer: {verdict.detail or verdict.status.value} (witness {verdict.witness})")


@dataclass(frozen=True)
class StandardTorsor:
    chart: MonoidMorphism
    structure_group: FiniteAbelianGroup
    rank: int
    finite_locally_free: bool | None = None
    certificate_n: int | None = None


def build_standard_torsor(u: MonoidMorphism) -> StandardTorsor:
    verdict = is_kummer(u)
    if verdict.status is not Status.VERIFIED:
        raise NotKummerError(verdict)
    coker = u.gp_cokernel
    group = coker.group
    flat, n = None, None
    # Q sits in a lattice, hence is torsion free; a free source admits the
    # v∘u = [n] certificate which makes the cover finite locally free.
    if u.source == AffineMonoid.free(u.source.ambient_rank):
        cert = integrality_certificate_free_base(u)
        flat, n = True, cert.n
    return StandardTorsor(u, group, group.order, flat, n)


def torsor_group_is_mu_n(t: StandardTorsor) -> int | None:
    """n when the structure group is cyclic of order n (so D(Z/n) = mu_n)."""
    g = t.structure_group
    return g.order if g.is_cyclic() else None
