"""Conflict predicates, residue restriction and the greedy type table.

This is the zero-communication core: two candidate color sets conflict
when enough of their colors are within distance g of each other, a family
K_1 conflicts with a family K_2 when enough members of K_1 individually
conflict, and the type table greedily assigns a conflict-free family to
every node type (initial color, restricted list, class).

Threshold parameters follow

    tau(h, C, m)  = ceil(8h + 2 log2 log2 |C| + 2 log2 log2 m + 16)
    tau'(h, C, m) = 2 ** (tau - ceil(2h + log2(2e)))

which are astronomically large even for tiny inputs (h=1, |C|=16, m=16
already gives tau=32 and tau'=2**27), so a scale_override pair is a
first-class configuration and GreedyExhausted is a legitimate outcome of
down-scaled runs.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import CapExceeded, GreedyExhausted, InvalidInstance


def _loglog2(x: int) -> float:
    # log2 log2 x, clamped at 0 for degenerate palettes
    if x < 2:
        return 0.0
    inner = math.log2(x)
    return max(0.0, math.log2(inner)) if inner >= 1 else 0.0


def tau_of(h: int, space_size: int, m: int) -> int:
    return math.ceil(8 * h + 2 * _loglog2(space_size) + 2 * _loglog2(m) + 16)


def tau_prime_of(h: int, space_size: int, m: int) -> int:
    t = tau_of(h, space_size, m)
    return 2 ** (t - math.ceil(2 * h + math.log2(2 * math.e)))


@dataclass(frozen=True)
class ConflictParams:
    """tau/tau' and the shared dimensions they are computed from.

    ``scale_override`` replaces the derived pair by an explicit (tau, tau')
    for down-scaled runs; both must be >= 1 and tau' <= 2**tau.
    """

    h: int
    color_space_size: int
    m: int
    g: int = 0
    scale_override: Optional[tuple[int, int]] = None

    def __post_init__(self):
        if self.h < 1 or self.m < 1 or self.color_space_size < 1 or self.g < 0:
            raise InvalidInstance("bad conflict parameters")
        if self.scale_override is not None:
            t, tp = self.scale_override
            if t < 1 or tp < 1 or tp > 2**t:
                raise InvalidInstance("override must satisfy 1 <= tau' <= 2**tau")

    @property
    def tau(self) -> int:
        if self.scale_override is not None:
            return self.scale_override[0]
        return tau_of(self.h, self.color_space_size, self.m)

    @property
    def tau_prime(self) -> int:
        if self.scale_override is not None:
            return self.scale_override[1]
        return tau_prime_of(self.h, self.color_space_size, self.m)


# -- conflict predicates -----------------------------------------------------


def mu_g(x: int, colors: Iterable[int], g: int) -> int:
    """Number of colors in the set within distance g of x."""
    return sum(1 for c in colors if abs(x - c) <= g)


def tau_g_conflict(c1: Sequence[int], c2: Sequence[int], tau: int, g: int) -> bool:
    """Whether sum over x in c1 of mu_g(x, c2) reaches tau.

    The sum is symmetric in (c1, c2); both orders are evaluated and
    compared while assertions are enabled.
    """
    total = sum(mu_g(x, c2, g) for x in c1)
    assert total == sum(mu_g(y, c1, g) for y in c2), "conflict sum must be symmetric"
    return total >= tau


def psi_g_member(
    k1: Sequence[Sequence[int]],
    k2: Sequence[Sequence[int]],
    tau_prime: int,
    tau: int,
    g: int,
) -> bool:
    """Directed family-level conflict (K_1, K_2) in Psi_g(tau', tau).

    True iff at least tau' distinct members of K_1 each tau&g-conflict
    with some member of K_2.  Not symmetric.
    """
    hits = 0
    for c1 in k1:
        if any(tau_g_conflict(c1, c2, tau, g) for c2 in k2):
            hits += 1
            if hits >= tau_prime:
                return True
    return False


def residue_restrict(colors: Sequence[int], g: int) -> tuple[int, tuple[int, ...]]:
    """Largest residue class of the list modulo 2g+1.

    Returns (a*, restricted list) where a* maximizes |L^a| with ties going
    to the smallest residue.  The restricted list keeps at least
    |L|/(2g+1) colors, and any two of its colors are more than 2g apart.
    """
    mod = 2 * g + 1
    buckets: dict[int, list[int]] = {}
    for c in sorted(colors):
        buckets.setdefault(c % mod, []).append(c)
    if not buckets:
        return 0, ()
    best = max(buckets, key=lambda a: (len(buckets[a]), -a))
    return best, tuple(buckets[best])


# -- Appendix-style bound calculators -----------------------------------------


def _comb0(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def bound_d1_d2(k: int, ell: int, k_prime: int, tau: int, tau_prime: int) -> tuple[int, int]:
    """Exact conflict-degree bounds d1 and d2 as big integers.

        d1 = C(k, tau) * C(ell - tau, k - tau)
        d2 = 4 * C(k' * d1, tau') * C(C(ell, k) - tau', k' - tau')

    Binomials with out-of-range arguments count as 0.
    """
    d1 = _comb0(k, tau) * _comb0(ell - tau, k - tau)
    d2 = 4 * _comb0(k_prime * d1, tau_prime) * _comb0(_comb0(ell, k) - tau_prime, k_prime - tau_prime)
    return d1, d2


# -- node types and the greedy table ------------------------------------------


@dataclass(frozen=True)
class NodeType:
    """(initial color, residue-restricted list, gamma class).

    All colors of the restricted list are congruent modulo 2g+1; the class
    determines the candidate-set size k_i.
    """

    init_color: int
    restricted_list: tuple[int, ...]
    gamma_class: int

    def sort_key(self) -> tuple:
        return (len(self.restricted_list), self.init_color, self.restricted_list, self.gamma_class)


def colex_combinations(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Index k-subsets of range(n) in colexicographic order, lazily."""
    if k == 0:
        yield ()
        return
    if k > n:
        return
    for top in range(k - 1, n):
        for rest in colex_combinations(top, k - 1):
            yield rest + (top,)


@dataclass(frozen=True)
class TypeTable:
    """Zero-round P2: a conflict-free family K_i per node type.

    Invariant (verified exhaustively by ``verify``): for every pair of
    assigned types with gamma_class(j) <= gamma_class(i),
    (K_i, K_j) is not in Psi_g(tau', tau).
    """

    params: ConflictParams
    types: tuple[NodeType, ...]
    families: tuple[tuple[tuple[int, ...], ...], ...]

    def family_of(self, t: NodeType) -> tuple[tuple[int, ...], ...]:
        return self.families[self.types.index(t)]

    def verify(self) -> bool:
        tau, tp, g = self.params.tau, self.params.tau_prime, self.params.g
        for i, ti in enumerate(self.types):
            for j, tj in enumerate(self.types):
                if i == j:
                    continue
                if tj.gamma_class <= ti.gamma_class and psi_g_member(
                    self.families[i], self.families[j], tp, tau, g
                ):
                    return False
        return True

    def to_bytes(self) -> bytes:
        doc = {
            "params": {
                "h": self.params.h,
                "space": self.params.color_space_size,
                "m": self.params.m,
                "g": self.params.g,
                "tau": self.params.tau,
                "tau_prime": self.params.tau_prime,
            },
            "types": [
                [t.init_color, list(t.restricted_list), t.gamma_class] for t in self.types
            ],
            "families": [[list(c) for c in fam] for fam in self.families],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def _pair_conflict(c1: Sequence[int], c2: Sequence[int], tau: int, g: int) -> bool:
    # assertion-free inner-loop version of tau_g_conflict
    if g == 0:
        return len(set(c1) & set(c2)) >= tau
    return sum(mu_g(x, c2, g) for x in c1) >= tau


def build_type_table(
    params: ConflictParams,
    types: Sequence[NodeType],
    k_by_class: dict[int, int],
    k_prime: int,
    candidate_cap: int = 200_000,
) -> TypeTable:
    """Greedy conflict-free family assignment over the given types.

    Types are processed in nondecreasing restricted-list size (ties by
    initial color, then list).  For each type the candidate families are
    the k'-subsets of the k_i-subsets of its restricted list, enumerated
    in colexicographic order, and the first family with no Psi_g conflict
    against any previously assigned type of comparable class is taken.
    The family size is capped at the number of available candidate sets,
    so degenerate scaled runs (e.g. k = |list|) still produce the single
    possible family.

    To keep the scan affordable, the per-member conflicts against every
    assigned family are precomputed once; a candidate family K then
    conflicts with an earlier family F iff at least tau' members of K hit
    F (forward direction) or the members of F hit by K number at least
    tau' (reverse direction).

    Raises GreedyExhausted when no conflict-free family exists at the
    configured parameters and CapExceeded when the enumeration would
    examine more than ``candidate_cap`` candidate families for one type.
    """
    tau, tp, g = params.tau, params.tau_prime, params.g
    order = sorted(set(types), key=NodeType.sort_key)
    assigned: list[tuple[NodeType, tuple[tuple[int, ...], ...]]] = []
    for t in order:
        k_i = k_by_class[t.gamma_class]
        if k_i < 1 or k_i > len(t.restricted_list):
            raise GreedyExhausted(f"type {t} cannot host candidate sets of size {k_i}")
        n_members = math.comb(len(t.restricted_list), k_i)
        if n_members > candidate_cap:
            raise CapExceeded(f"{n_members} candidate sets for one type")
        members = [
            tuple(t.restricted_list[i] for i in idx)
            for idx in colex_combinations(len(t.restricted_list), k_i)
        ]
        fam_size = min(k_prime, n_members)
        if fam_size < 1:
            raise GreedyExhausted(f"type {t} admits no family")

        # member i vs assigned family j: does i hit any member of j (forward),
        # and which members of j does i hit (reverse, as a bitmask)
        fwd = [[False] * len(assigned) for _ in range(n_members)]
        rev = [[0] * len(assigned) for _ in range(n_members)]
        check_fwd = [prev.gamma_class <= t.gamma_class for prev, _ in assigned]
        check_rev = [t.gamma_class <= prev.gamma_class for prev, _ in assigned]
        for i, c in enumerate(members):
            for j, (_, fam) in enumerate(assigned):
                mask = 0
                for b, c2 in enumerate(fam):
                    if _pair_conflict(c, c2, tau, g):
                        mask |= 1 << b
                fwd[i][j] = mask != 0
                rev[i][j] = mask

        chosen: Optional[tuple[int, ...]] = None
        work = 0
        for idx in colex_combinations(n_members, fam_size):
            work += 1
            if work > candidate_cap:
                raise CapExceeded(
                    f"type-table enumeration exceeded {candidate_cap} candidates for one type"
                )
            ok = True
            for j in range(len(assigned)):
                if check_fwd[j]:
                    hits = sum(1 for i in idx if fwd[i][j])
                    if hits >= tp:
                        ok = False
                        break
                if check_rev[j]:
                    union = 0
                    for i in idx:
                        union |= rev[i][j]
                    if bin(union).count("1") >= tp:
                        ok = False
                        break
            if ok:
                chosen = idx
                break
        if chosen is None:
            raise GreedyExhausted(
                f"no conflict-free family for type {t} at tau={tau}, tau'={tp}"
            )
        assigned.append((t, tuple(members[i] for i in chosen)))
    return TypeTable(
        params=params,
        types=tuple(t for t, _ in assigned),
        families=tuple(f for _, f in assigned),
    )


# -- binary cache --------------------------------------------------------------

CACHE_ENV = "LISTDEFECT_CACHE"


def table_cache_key(
    params: ConflictParams,
    types: Sequence[NodeType],
    k_by_class: dict[int, int],
    k_prime: int,
) -> str:
    doc = {
        "params": [params.h, params.color_space_size, params.m, params.g,
                   params.tau, params.tau_prime],
        "types": sorted([t.init_color, list(t.restricted_list), t.gamma_class] for t in set(types)),
        "k": sorted(k_by_class.items()),
        "k_prime": k_prime,
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def build_or_load_type_table(
    params: ConflictParams,
    types: Sequence[NodeType],
    k_by_class: dict[int, int],
    k_prime: int,
    candidate_cap: int = 200_000,
    cache_dir: Optional[str] = None,
) -> TypeTable:
    """Like build_type_table, with a binary cache keyed by the inputs.

    The cache directory comes from the argument or the LISTDEFECT_CACHE
    environment variable; without either, no caching happens.
    """
    cache_dir = cache_dir or os.environ.get(CACHE_ENV)
    path = None
    if cache_dir:
        path = os.path.join(cache_dir, table_cache_key(params, types, k_by_class, k_prime) + ".tt")
        if os.path.exists(path):
            with open(path, "rb") as fh:
                return _table_from_bytes(fh.read())
    table = build_type_table(params, types, k_by_class, k_prime, candidate_cap)
    if path:
        os.makedirs(cache_dir, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(table.to_bytes())
        os.replace(tmp, path)
    return table


def _table_from_bytes(blob: bytes) -> TypeTable:
    doc = json.loads(blob.decode())
    p = doc["params"]
    params = ConflictParams(
        h=p["h"], color_space_size=p["space"], m=p["m"], g=p["g"],
        scale_override=(p["tau"], p["tau_prime"]),
    )
    types = tuple(NodeType(t[0], tuple(t[1]), t[2]) for t in doc["types"])
    families = tuple(tuple(tuple(c) for c in fam) for fam in doc["families"])
    return TypeTable(params=params, types=types, families=families)
