"""Decision and search procedures for homomorphisms and embeddings.

Search is deterministic: static variable order by identifier, value order by
identifier.  Pruning is limited to unary candidate filtering, arc consistency
over binary tuples, and forward checking during the descent; all three only
remove values that occur in no solution, so the maps found, and their order,
are independent of the pruning.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, Optional

from .core import (
    ElementMap,
    SignatureMismatch,
    Structure,
    StructureError,
    blowup,
    blowup_id,
)

KINDS = (
    "homomorphism",
    "monomorphism",
    "embedding",
    "strong-homomorphism",
    "isomorphism",
)


class EmbeddingSet:
    """All (or some chosen) embeddings of a base structure into a target."""

    __slots__ = ("base", "target", "members")

    def __init__(self, base: Structure, target: Structure, members: tuple[ElementMap, ...]):
        self.base = base
        self.target = target
        self.members = members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _require_total(f: ElementMap, a: Structure, b: Structure) -> None:
    if tuple(f.source) != a.domain or tuple(f.target) != b.domain:
        raise StructureError("map domains do not match the given structures")
    if not f.is_total:
        raise StructureError("map is not total; use check_partial_homomorphism")


def _is_hom(f: ElementMap, a: Structure, b: Structure) -> bool:
    for name, ts in a.relations_items():
        rb = b.relation(name)
        for t in ts:
            if f.map_tuple(t) not in rb:
                return False
    return True


def _is_strong(f: ElementMap, a: Structure, b: Structure) -> bool:
    # f(A^k \ R^A) avoids R^B  <=>  every preimage of a tuple of R^B lies in R^A
    preimage: dict[str, list[str]] = {}
    for x in f.source:
        preimage.setdefault(f[x], []).append(x)
    for name, ts in b.relations_items():
        ra = a.relation(name)
        for t in ts:
            classes = [preimage.get(v) for v in t]
            if any(cls is None for cls in classes):
                continue
            for combo in product(*classes):  # type: ignore[arg-type]
                if combo not in ra:
                    return False
    return True


def check_morphism(f: ElementMap, a: Structure, b: Structure, kind: str) -> bool:
    """True iff the total map ``f`` satisfies the definition of ``kind``."""
    if kind not in KINDS:
        raise StructureError(f"unknown morphism kind: {kind!r}")
    if a.signature != b.signature:
        raise SignatureMismatch("check_morphism needs a common signature")
    _require_total(f, a, b)
    if not _is_hom(f, a, b):
        return False
    if kind == "homomorphism":
        return True
    if kind == "monomorphism":
        return f.is_injective
    if not _is_strong(f, a, b):
        return False
    if kind == "strong-homomorphism":
        return True
    if not f.is_injective:
        return False
    if kind == "embedding":
        return True
    return len(f.image) == len(b.domain)  # isomorphism: surjective embedding


def check_partial_homomorphism(f: ElementMap, a: Structure, b: Structure) -> bool:
    """True iff ``f`` is a homomorphism from ``A[dom f]`` to ``B``."""
    if a.signature != b.signature:
        raise SignatureMismatch("check_partial_homomorphism needs a common signature")
    dom = set(f.keys())
    for x in dom:
        if x not in a.domain_set:
            raise StructureError(f"map key {x!r} is not in the source structure")
    for name, ts in a.relations_items():
        rb = b.relation(name)
        for t in ts:
            if all(x in dom for x in t) and f.map_tuple(t) not in rb:
                return False
    return True


class HomomorphismSearcher:
    """Backtracking homomorphism search against a fixed target structure.

    The target's relations are indexed once as bitmasks over the sorted
    target domain, so repeated searches from many source structures stay
    cheap.  Sources must share the target's signature.
    """

    __slots__ = (
        "target",
        "_n",
        "_values",
        "_unary",
        "_succ",
        "_pred",
        "_diag",
        "_totals",
        "_wide",
        "_full",
    )

    def __init__(self, target: Structure):
        self.target = target
        values = target.domain
        index = {v: i for i, v in enumerate(values)}
        self._values = values
        self._n = len(values)
        self._full = (1 << self._n) - 1
        self._unary: dict[str, int] = {}
        self._succ: dict[str, list[int]] = {}
        self._pred: dict[str, list[int]] = {}
        self._diag: dict[str, int] = {}
        self._totals: dict[int, int] = {}  # id(rows) -> union of all rows
        self._wide: dict[str, frozenset[tuple[str, ...]]] = {}
        for name, ts in target.relations_items():
            arity = target.signature.arity(name)
            if arity == 1:
                mask = 0
                for (v,) in ts:
                    mask |= 1 << index[v]
                self._unary[name] = mask
            elif arity == 2:
                succ = [0] * self._n
                pred = [0] * self._n
                diag = 0
                for (u, v) in ts:
                    iu, iv = index[u], index[v]
                    succ[iu] |= 1 << iv
                    pred[iv] |= 1 << iu
                    if iu == iv:
                        diag |= 1 << iu
                self._succ[name] = succ
                self._pred[name] = pred
                self._diag[name] = diag
                union_pred = 0
                for mask in pred:
                    union_pred |= mask
                union_succ = 0
                for mask in succ:
                    union_succ |= mask
                self._totals[id(pred)] = union_pred
                self._totals[id(succ)] = union_succ
            else:
                self._wide[name] = ts

    def _prepare(self, source: Structure):
        """Candidate masks and constraint indexes for one source structure.

        ``support[i]`` holds (j, rows) pairs with rows[w] = mask of values
        allowed for variable i when variable j takes value w; ``forward[i]``
        holds the mirrored pairs used to narrow later variables when i is
        assigned.
        """
        if source.signature != self.target.signature:
            raise SignatureMismatch("searcher and source signatures differ")
        order, unary, binary, wide = _source_skeleton(source)
        n = len(order)
        cand = [self._full] * n
        support: list[list[tuple[int, list[int]]]] = [[] for _ in range(n)]
        forward: list[list[tuple[int, list[int]]]] = [[] for _ in range(n)]
        wide_checks: list[list[tuple[str, tuple[int, ...]]]] = [[] for _ in range(n)]
        for name, ix in unary:
            cand[ix] &= self._unary[name]
        for name, ix, iy in binary:
            if ix == iy:
                cand[ix] &= self._diag[name]
            else:
                succ = self._succ[name]
                pred = self._pred[name]
                support[ix].append((iy, pred))
                support[iy].append((ix, succ))
                forward[ix].append((iy, succ))
                forward[iy].append((ix, pred))
        for name, posn in wide:
            wide_checks[max(posn)].append((name, posn))
        return order, cand, support, forward, wide_checks

    def _ac(self, cand: list[int], support, forward) -> bool:
        """Arc-consistency fixpoint; False when some candidate set empties.

        Support unions are cached per (variable, row table) and reused while
        that variable's candidates are unchanged; a still-full candidate set
        contributes the precomputed whole-table union.
        """
        n = len(cand)
        full = self._full
        totals = self._totals
        queue = deque(range(n))
        queued = [True] * n
        cache: dict[tuple[int, int], tuple[int, int]] = {}
        while queue:
            i = queue.popleft()
            queued[i] = False
            ci = cand[i]
            for (j, rows) in support[i]:
                mj = cand[j]
                if mj == full:
                    supp = totals[id(rows)]
                else:
                    key = (j, id(rows))
                    hit = cache.get(key)
                    if hit is not None and hit[0] == mj:
                        supp = hit[1]
                    else:
                        supp = 0
                        scan = mj
                        while scan:
                            low = scan & -scan
                            supp |= rows[low.bit_length() - 1]
                            scan ^= low
                        cache[key] = (mj, supp)
                ci &= supp
                if not ci:
                    return False
            if ci != cand[i]:
                cand[i] = ci
                for (j, _rows) in forward[i]:
                    if not queued[j]:
                        queued[j] = True
                        queue.append(j)
        return True

    def _solve(self, source: Structure, injective: bool, limit: Optional[int]) -> Iterator[dict[str, str]]:
        order, cand, support, forward, wide_checks = self._prepare(source)
        n = len(order)
        if n == 0:
            yield {}
            return
        if injective and len(order) > self._n:
            return
        if any(c == 0 for c in cand):
            return
        if not self._ac(cand, support, forward):
            return
        values = self._values
        wide = self._wide
        assign = [-1] * n
        used = 0
        found = 0
        rem = [0] * n  # untried candidates per depth
        trail: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        rem[0] = cand[0]
        depth = 0
        while depth >= 0:
            mask = rem[depth]
            if injective:
                mask &= ~used
            if not mask:
                if assign[depth] >= 0:
                    if injective:
                        used &= ~(1 << assign[depth])
                    assign[depth] = -1
                for (j, old) in trail[depth]:
                    cand[j] = old
                trail[depth].clear()
                depth -= 1
                continue
            low = mask & -mask
            rem[depth] ^= low
            v = low.bit_length() - 1
            # undo effects of the previous value tried at this depth
            if assign[depth] >= 0 and injective:
                used &= ~(1 << assign[depth])
            for (j, old) in trail[depth]:
                cand[j] = old
            trail[depth].clear()
            assign[depth] = v
            if injective:
                used |= 1 << v
            ok = True
            for (j, rows) in forward[depth]:
                if j > depth:
                    old = cand[j]
                    new = old & rows[v]
                    if new != old:
                        trail[depth].append((j, old))
                        cand[j] = new
                        if not new:
                            ok = False
                            break
            if ok:
                for (name, posn) in wide_checks[depth]:
                    t = tuple(values[assign[p]] for p in posn)
                    if t not in wide[name]:
                        ok = False
                        break
            if not ok:
                continue
            if depth == n - 1:
                yield {order[i]: values[assign[i]] for i in range(n)}
                found += 1
                if limit is not None and found >= limit:
                    return
                continue
            depth += 1
            rem[depth] = cand[depth]
            assign[depth] = -1
        return

    def find(self, source: Structure) -> Optional[ElementMap]:
        for assign in self._solve(source, injective=False, limit=1):
            return ElementMap(source.domain, self.target.domain, assign)
        return None

    def exists(self, source: Structure) -> bool:
        return self.find(source) is not None

    def iter_all(self, source: Structure, limit: Optional[int] = None) -> Iterator[ElementMap]:
        for assign in self._solve(source, injective=False, limit=limit):
            yield ElementMap(source.domain, self.target.domain, assign)

    def iter_injective(self, source: Structure) -> Iterator[ElementMap]:
        yield from (
            ElementMap(source.domain, self.target.domain, assign)
            for assign in self._solve(source, injective=True, limit=None)
        )


@lru_cache(maxsize=256)
def _source_skeleton(source: Structure):
    """Variable order and constraint tuples of a source, indexed by position."""
    order = source.domain
    pos = {x: i for i, x in enumerate(order)}
    unary: list[tuple[str, int]] = []
    binary: list[tuple[str, int, int]] = []
    wide: list[tuple[str, tuple[int, ...]]] = []
    for name, ts in source.relations_items():
        arity = source.signature.arity(name)
        if arity == 1:
            unary.extend((name, pos[x]) for (x,) in ts)
        elif arity == 2:
            binary.extend((name, pos[x], pos[y]) for (x, y) in ts)
        else:
            wide.extend((name, tuple(pos[x] for x in t)) for t in ts)
    return order, tuple(unary), tuple(binary), tuple(wide)


def find_homomorphism(a: Structure, b: Structure) -> Optional[ElementMap]:
    """First total homomorphism from ``a`` to ``b`` in deterministic order, or None."""
    if a.signature != b.signature:
        raise SignatureMismatch("find_homomorphism needs a common signature")
    return HomomorphismSearcher(b).find(a)


def enumerate_homomorphisms(a: Structure, b: Structure, limit: Optional[int] = None) -> list[ElementMap]:
    """All total homomorphisms in deterministic order, truncated at ``limit``."""
    if a.signature != b.signature:
        raise SignatureMismatch("enumerate_homomorphisms needs a common signature")
    return list(HomomorphismSearcher(b).iter_all(a, limit=limit))


def enumerate_embeddings(a: Structure, b: Structure) -> EmbeddingSet:
    """All embeddings of ``a`` into ``b`` in deterministic order."""
    if a.signature != b.signature:
        raise SignatureMismatch("enumerate_embeddings needs a common signature")
    members = tuple(
        f for f in HomomorphismSearcher(b).iter_injective(a) if _is_strong(f, a, b)
    )
    return EmbeddingSet(a, b, members)


def canonical_embeddings(a: Structure, m: int) -> EmbeddingSet:
    """The m^|A| index-choice embeddings of ``a`` into its m-fold blow-up.

    The member for f : A -> [m] sends each element x to the (x, f(x)) copy.
    Members come in lexicographic order of the index choices over the sorted
    domain of ``a``.
    """
    if m < 1:
        raise StructureError("blow-up multiplicity must be >= 1")
    target = blowup(a, m)
    members = []
    for choice in product(range(m), repeat=len(a.domain)):
        assign = {x: blowup_id(x, i) for x, i in zip(a.domain, choice)}
        members.append(ElementMap(a.domain, target.domain, assign))
    return EmbeddingSet(a, target, tuple(members))


def restriction_set(emb: EmbeddingSet, r: int) -> list[ElementMap]:
    """Deduplicated restrictions of the members to all r-element subsets."""
    n = len(emb.base.domain)
    if r < 0 or r > n:
        raise StructureError(f"restriction size {r} out of range for |A| = {n}")
    seen: set[ElementMap] = set()
    out: list[ElementMap] = []
    for subset in combinations(emb.base.domain, r):
        for member in emb.members:
            g = member.restrict(subset)
            if g not in seen:
                seen.add(g)
                out.append(g)
    out.sort(key=lambda f: f.items())
    return out


def is_isomorphic(a: Structure, b: Structure) -> bool:
    """Isomorphism test via embedding search after cardinality screens."""
    if a.signature != b.signature:
        raise SignatureMismatch("is_isomorphic needs a common signature")
    if len(a.domain) != len(b.domain):
        return False
    for name in a.signature.names:
        if len(a.relation(name)) != len(b.relation(name)):
            return False
    for f in HomomorphismSearcher(b).iter_injective(a):
        if _is_strong(f, a, b):
            return True  # injective with |A| = |B| makes the embedding surjective
    return False
