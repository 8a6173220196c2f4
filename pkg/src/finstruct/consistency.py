"""(k,l)-consistency as a greatest-fixpoint computation over partial maps.

The table keeps, for every subset of the instance domain of size at most l,
the set of surviving assignments into the template.  Starting from all
partial homomorphisms, assignments are deleted when a restriction dies or
when a required extension to some superset disappears; the fixpoint family
is empty exactly when the empty assignment is deleted.  The deletion order
is deterministic and the recorded sequence drives the extraction of a
spoiler strategy tree for inconsistent instances.

Assignments are packed into integers (one base-|B| digit per subset
position) to keep the fixpoint loop cheap.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations, product
from typing import Optional, Sequence

from . import morphisms
from .core import ElementMap, SignatureMismatch, Structure, StructureError


class BudgetExceeded(RuntimeError):
    """The consistency table would exceed the configured entry cap."""


DEFAULT_TABLE_CAP = 2_000_000


class ConsistencyFamily:
    """The surviving family of partial homomorphisms, indexed per subset.

    ``table`` maps each subset of the instance domain (as a sorted identifier
    tuple, sizes 0..l) to the frozen set of surviving assignments, each a
    value-identifier tuple aligned with the subset.
    """

    __slots__ = ("instance", "template", "k", "l", "table")

    def __init__(
        self,
        instance: Structure,
        template: Structure,
        k: int,
        l: int,
        table: dict[tuple[str, ...], frozenset[tuple[str, ...]]],
    ):
        self.instance = instance
        self.template = template
        self.k = k
        self.l = l
        self.table = table

    def assignments(self, subset: Sequence[str]) -> list[ElementMap]:
        key = tuple(sorted(subset))
        return [
            ElementMap(self.instance.domain, self.template.domain, dict(zip(key, values)))
            for values in sorted(self.table.get(key, frozenset()))
        ]

    def entry_count(self) -> int:
        return sum(len(v) for v in self.table.values())


class TraceNode:
    """One spoiler move: the position held, the action, and all replies.

    ``action`` is "extend" or "retract"; ``target`` is the pebbled subset
    after the move.  For extensions, ``children`` pairs every duplicator
    reply that is a partial homomorphism with the follow-up node; a childless
    extension is a winning leaf.  Retractions have the single forced child.
    """

    __slots__ = ("pebbles", "values", "action", "target", "children")

    def __init__(
        self,
        pebbles: tuple[str, ...],
        values: tuple[str, ...],
        action: str,
        target: tuple[str, ...],
        children: tuple[tuple[tuple[str, ...], "TraceNode"], ...],
    ):
        self.pebbles = pebbles
        self.values = values
        self.action = action
        self.target = target
        self.children = children


class GameTrace:
    """A finite spoiler strategy tree extracted from the deletion sequence."""

    __slots__ = ("root",)

    def __init__(self, root: TraceNode):
        self.root = root

    def node_count(self) -> int:
        seen: set[int] = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.extend(child for _, child in node.children)
        return len(seen)


def _validate_args(a: Structure, b: Structure, k: int, l: int) -> None:
    if a.signature != b.signature:
        raise SignatureMismatch("instance and template signatures differ")
    if k < 1:
        raise StructureError("k must be >= 1")
    if l < k:
        raise StructureError("l must be >= k")


class _Fixpoint:
    """Shared machinery for kl_family and spoiler_trace."""

    def __init__(self, a: Structure, b: Structure, k: int, l: int, max_entries: int):
        _validate_args(a, b, k, l)
        self.a = a
        self.b = b
        self.k = k
        self.l = l
        self.a_ids = a.domain
        self.b_ids = b.domain
        self.base = max(len(self.b_ids), 1)
        self.powers = [self.base**r for r in range(l + 1)]
        self._candidates()
        self._subsets(max_entries)
        self._pairs()
        self.sequence: list[tuple[int, int, tuple]] = []
        self.deleted: dict[tuple[int, int], int] = {}

    # -- construction -------------------------------------------------

    def _candidates(self) -> None:
        a, b = self.a, self.b
        n_b = len(self.b_ids)
        cand: list[list[int]] = [list(range(n_b)) for _ in self.a_ids]
        pos = {x: i for i, x in enumerate(self.a_ids)}
        b_pos = {x: i for i, x in enumerate(self.b_ids)}
        for name, ts in a.relations_items():
            if a.signature.arity(name) != 1:
                continue
            allowed = {b_pos[v] for (v,) in b.relation(name)}
            for (x,) in ts:
                cand[pos[x]] = [j for j in cand[pos[x]] if j in allowed]
        self.cand = cand
        self.a_pos = pos
        self.b_pos = b_pos
        # constraint tuples as (relation index set, element-index tuple)
        self.rel_sets: dict[str, frozenset[tuple[int, ...]]] = {}
        self.tuples_by_elem: list[list[tuple[str, tuple[int, ...]]]] = [[] for _ in self.a_ids]
        for name, ts in a.relations_items():
            if a.signature.arity(name) == 1:
                continue
            self.rel_sets[name] = frozenset(
                tuple(b_pos[x] for x in t) for t in b.relation(name)
            )
            for t in ts:
                idx = tuple(pos[x] for x in t)
                for i in set(idx):
                    self.tuples_by_elem[i].append((name, idx))

    def _subset_assignments(self, elems: tuple[int, ...]) -> tuple[set[int], list]:
        """Initial assignments for one subset, packed, plus its constraints."""
        elem_set = set(elems)
        index_of = {e: i for i, e in enumerate(elems)}
        constraints: list[tuple[frozenset, tuple[int, ...]]] = []
        seen: set[tuple[str, tuple[int, ...]]] = set()
        for e in elems:
            for name, idx in self.tuples_by_elem[e]:
                if (name, idx) in seen or not set(idx) <= elem_set:
                    continue
                seen.add((name, idx))
                constraints.append((self.rel_sets[name], tuple(index_of[i] for i in idx)))
        table: set[int] = set()
        powers = self.powers
        for values in product(*(self.cand[e] for e in elems)):
            ok = True
            for rel, positions in constraints:
                if tuple(values[p] for p in positions) not in rel:
                    ok = False
                    break
            if ok:
                table.add(sum(v * powers[r] for r, v in enumerate(values)))
        return table, constraints

    def _subsets(self, max_entries: int) -> None:
        n = len(self.a_ids)
        top = min(self.l, n)
        self.subset_elems: list[tuple[int, ...]] = []
        self.subset_id: dict[tuple[int, ...], int] = {}
        for size in range(top + 1):
            for elems in combinations(range(n), size):
                self.subset_id[elems] = len(self.subset_elems)
                self.subset_elems.append(elems)
        self.table: list[set[int]] = []
        self.constraints: list[list] = []
        entries = 0
        for elems in self.subset_elems:
            assignments, constraints = self._subset_assignments(elems)
            entries += len(assignments)
            if entries > max_entries:
                raise BudgetExceeded(
                    f"consistency table exceeds {max_entries} entries; raise the cap to proceed"
                )
            self.table.append(assignments)
            self.constraints.append(constraints)

    def _pairs(self) -> None:
        """Superset/subset navigation with packed-extension addend lists."""
        n = len(self.a_ids)
        top = min(self.l, n)
        powers = self.powers
        count = len(self.subset_elems)
        # immediate supersets: for X of size < top, (Y_id, fixed_factors, addends)
        self.immediate_sups: list[list[tuple[int, tuple[int, ...], list[int]]]] = [
            [] for _ in range(count)
        ]
        # projections with |X| <= k: per Y, (X_id, proj_powers, fixed_factors, addend_lists)
        self.subs_k: list[list[tuple[int, tuple[int, ...], tuple[int, ...], list[list[int]]]]] = [
            [] for _ in range(count)
        ]
        # the same pairs keyed by X, sharing the navigation tuples
        self.sup_pairs: list[list[tuple[int, tuple[int, ...], list[list[int]]]]] = [
            [] for _ in range(count)
        ]
        for y_id, y_elems in enumerate(self.subset_elems):
            size = len(y_elems)
            if size == 0:
                continue
            y_pos = {e: p for p, e in enumerate(y_elems)}
            for sub_size in range(min(self.k, size - 1) + 1):
                for x_elems in combinations(y_elems, sub_size):
                    x_id = self.subset_id[x_elems]
                    proj = tuple(powers[y_pos[e]] for e in x_elems)
                    x_set = set(x_elems)
                    addends = [
                        [v * powers[y_pos[e]] for v in self.cand[e]]
                        for e in y_elems
                        if e not in x_set
                    ]
                    self.subs_k[y_id].append((x_id, proj, proj, addends))
                    self.sup_pairs[x_id].append((y_id, proj, addends))
                    if size == sub_size + 1:
                        self.immediate_sups[x_id].append((y_id, proj, addends[0]))
        for x_id, x_elems in enumerate(self.subset_elems):
            if self.k < len(x_elems) < top:
                x_set = set(x_elems)
                for e in range(n):
                    if e in x_set:
                        continue
                    y_elems = tuple(sorted(x_elems + (e,)))
                    y_id = self.subset_id[y_elems]
                    y_pos = {el: p for p, el in enumerate(y_elems)}
                    fixed = tuple(powers[y_pos[el]] for el in x_elems)
                    addends = [v * powers[y_pos[e]] for v in self.cand[e]]
                    self.immediate_sups[x_id].append((y_id, fixed, addends))

    # -- packed-value helpers ------------------------------------------

    def _rebase(self, h: int, factors: tuple[int, ...]) -> int:
        """Re-scatter the digits of ``h`` onto the given position factors."""
        base = self.base
        out = 0
        for fac in factors:
            out += (h % base) * fac
            h //= base
        return out

    def _project(self, g: int, proj: tuple[int, ...]) -> int:
        base = self.base
        out = 0
        p = 1
        for fac in proj:
            out += ((g // fac) % base) * p
            p *= base
        return out

    def _has_support(self, h: int, fixed: tuple[int, ...], addends: list[list[int]], y_id: int) -> bool:
        entries = self.table[y_id]
        if not entries:
            return False
        if not addends:
            return self._rebase(h, fixed) in entries
        stem = self._rebase(h, fixed)
        if len(addends) == 1:
            for u in addends[0]:
                if stem + u in entries:
                    return True
            return False
        if len(addends) == 2:
            first, second = addends
            for u in first:
                su = stem + u
                for w in second:
                    if su + w in entries:
                        return True
            return False
        return self._support_rec(stem, addends, 0, entries)

    def _support_rec(self, stem: int, addends, depth: int, entries) -> bool:
        if depth == len(addends):
            return stem in entries
        for u in addends[depth]:
            if self._support_rec(stem + u, addends, depth + 1, entries):
                return True
        return False

    # -- the fixpoint ---------------------------------------------------

    def run(self) -> bool:
        """Delete to fixpoint; True iff the family stays nonempty."""
        queue: deque[tuple[int, int]] = deque()

        def delete(s_id: int, h: int, reason: tuple) -> None:
            self.table[s_id].discard(h)
            self.deleted[(s_id, h)] = len(self.sequence)
            self.sequence.append((s_id, h, reason))
            queue.append((s_id, h))

        empty_id = self.subset_id[()]
        # initial extension-support pass over assignments of size <= k
        for x_id, x_elems in enumerate(self.subset_elems):
            if len(x_elems) > self.k:
                continue
            for h in sorted(self.table[x_id]):
                for (y_id, fixed, addends) in self.sup_pairs[x_id]:
                    if not self._has_support(h, fixed, addends, y_id):
                        delete(x_id, h, ("unsupported", y_id))
                        break
        while queue and (empty_id, 0) not in self.deleted:
            y_id, g = queue.popleft()
            # restriction closure: extensions of g on immediate supersets die
            for (z_id, fixed, addends) in self.immediate_sups[y_id]:
                entries = self.table[z_id]
                if not entries:
                    continue
                stem = self._rebase(g, fixed)
                for u in addends:
                    ext = stem + u
                    if ext in entries:
                        delete(z_id, ext, ("restriction", y_id, g))
            # extension support: small projections of g may have lost their witness
            for (x_id, proj, fixed, addends) in self.subs_k[y_id]:
                h = self._project(g, proj)
                if h in self.table[x_id] and not self._has_support(h, fixed, addends, y_id):
                    delete(x_id, h, ("unsupported", y_id))
        return (empty_id, 0) not in self.deleted

    # -- decoding --------------------------------------------------------

    def decode(self, s_id: int, h: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
        elems = self.subset_elems[s_id]
        base = self.base
        values = []
        for _ in elems:
            values.append(self.b_ids[h % base])
            h //= base
        return tuple(self.a_ids[e] for e in elems), tuple(values)

    def family(self) -> ConsistencyFamily:
        table: dict[tuple[str, ...], frozenset[tuple[str, ...]]] = {}
        for s_id, elems in enumerate(self.subset_elems):
            key = tuple(self.a_ids[e] for e in elems)
            decoded = []
            for h in self.table[s_id]:
                _, values = self.decode(s_id, h)
                decoded.append(values)
            table[key] = frozenset(decoded)
        return ConsistencyFamily(self.a, self.b, self.k, self.l, table)

    # -- trace extraction --------------------------------------------------

    def replies(self, y_id: int, h: int, fixed: tuple[int, ...], addends: list[list[int]]) -> list[int]:
        """All initial partial-homomorphism assignments on Y extending h."""
        stem = self._rebase(h, fixed)
        combos = [stem]
        for options in addends:
            combos = [c + u for c in combos for u in options]
        out = []
        elems = self.subset_elems[y_id]
        base = self.base
        for g in combos:
            values = []
            gg = g
            for _ in elems:
                values.append(gg % base)
                gg //= base
            ok = True
            for rel, positions in self.constraints[y_id]:
                if tuple(values[p] for p in positions) not in rel:
                    ok = False
                    break
            if ok:
                out.append(g)
        return sorted(out)

    def pair_structs(self, x_id: int, y_id: int):
        """(proj, fixed, addends) navigation data for X below Y."""
        x_elems = self.subset_elems[x_id]
        y_elems = self.subset_elems[y_id]
        y_pos = {el: p for p, el in enumerate(y_elems)}
        fixed = tuple(self.powers[y_pos[el]] for el in x_elems)
        x_set = set(x_elems)
        addends = [
            [v * self.powers[y_pos[e]] for v in self.cand[e]]
            for e in y_elems
            if e not in x_set
        ]
        return fixed, addends

    def build_trace(self) -> GameTrace:
        memo: dict[tuple[int, int], TraceNode] = {}

        def node_for(s_id: int, h: int) -> TraceNode:
            key = (s_id, h)
            if key in memo:
                return memo[key]
            seq_index = self.deleted[key]
            reason = self.sequence[seq_index][2]
            pebbles, values = self.decode(s_id, h)
            if reason[0] == "unsupported":
                y_id = reason[1]
                fixed, addends = self.pair_structs(s_id, y_id)
                children = []
                for g in self.replies(y_id, h, fixed, addends):
                    _, g_values = self.decode(y_id, g)
                    children.append((g_values, node_for(y_id, g)))
                target = tuple(self.a_ids[e] for e in self.subset_elems[y_id])
                node = TraceNode(pebbles, values, "extend", target, tuple(children))
            else:  # restriction death: retract to the dead sub-assignment
                x_sub_id, h_sub = reason[1], reason[2]
                sub_pebbles, sub_values = self.decode(x_sub_id, h_sub)
                child = node_for(x_sub_id, h_sub)
                node = TraceNode(pebbles, values, "retract", sub_pebbles, ((sub_values, child),))
            memo[key] = node
            return node

        return GameTrace(node_for(self.subset_id[()], 0))


def kl_family(
    a: Structure,
    b: Structure,
    k: int,
    l: int,
    max_entries: int = DEFAULT_TABLE_CAP,
) -> Optional[ConsistencyFamily]:
    """The maximal (k,l)-consistent family on (a, b), or None if none exists."""
    fix = _Fixpoint(a, b, k, l, max_entries)
    if fix.run():
        return fix.family()
    return None


def is_consistent(
    a: Structure,
    b: Structure,
    k: int,
    l: int,
    max_entries: int = DEFAULT_TABLE_CAP,
) -> bool:
    """True iff a nonempty (k,l)-consistent family on (a, b) exists."""
    return _Fixpoint(a, b, k, l, max_entries).run()


def spoiler_trace(
    a: Structure,
    b: Structure,
    k: int,
    l: int,
    max_entries: int = DEFAULT_TABLE_CAP,
) -> Optional[GameTrace]:
    """A validated spoiler strategy tree, present iff the instance is inconsistent."""
    fix = _Fixpoint(a, b, k, l, max_entries)
    if fix.run():
        return None
    return fix.build_trace()


def validate_trace(trace: GameTrace, a: Structure, b: Structure, k: int, l: int) -> bool:
    """Independent check of a strategy tree against the game rules.

    Verifies pebble budgets, the retract-before-extend discipline, that
    every extension node branches over exactly the partial-homomorphism
    replies, and that leaves are duplicator-stuck.
    """
    _validate_args(a, b, k, l)
    if not isinstance(trace, GameTrace) or not isinstance(trace.root, TraceNode):
        return False
    if trace.root.pebbles != ():
        return False
    checked: set[int] = set()

    def reply_values(position: dict[str, str], target: tuple[str, ...]) -> list[tuple[str, ...]]:
        free = [x for x in target if x not in position]
        out = []
        for choice in product(b.domain, repeat=len(free)):
            assign = dict(position)
            assign.update(zip(free, choice))
            f = ElementMap(a.domain, b.domain, assign)
            if morphisms.check_partial_homomorphism(f, a, b):
                out.append(tuple(assign[x] for x in target))
        return out

    def walk(node: TraceNode) -> bool:
        if id(node) in checked:
            return True
        if len(node.pebbles) != len(node.values) or len(node.pebbles) > l:
            return False
        position = dict(zip(node.pebbles, node.values))
        f = ElementMap(a.domain, b.domain, position)
        if not morphisms.check_partial_homomorphism(f, a, b):
            return False
        if node.action == "extend":
            if len(node.pebbles) > k or len(node.target) > l:
                return False
            if not set(node.pebbles) < set(node.target):
                return False
            expected = reply_values(position, node.target)
            got = [values for values, _ in node.children]
            if sorted(expected) != sorted(got):
                return False
            for values, child in node.children:
                if child.pebbles != tuple(node.target):
                    return False
                if child.values != values:
                    return False
                if not walk(child):
                    return False
        elif node.action == "retract":
            if len(node.children) != 1:
                return False
            if not set(node.target) < set(node.pebbles):
                return False
            values, child = node.children[0]
            expect = tuple(position[x] for x in node.target)
            if values != expect or child.pebbles != tuple(node.target) or child.values != expect:
                return False
            if not walk(child):
                return False
        else:
            return False
        checked.add(id(node))
        return True

    return walk(trace.root)


def inverse_hom_transfer(
    aprime: Structure,
    h: ElementMap,
    family: ConsistencyFamily,
) -> ConsistencyFamily:
    """Transfer a consistent family along a homomorphism into its instance.

    Composing ``h`` with each stored partial map yields a valid
    (k,l)-consistent family on ``aprime``, witnessing closure of the
    consistent class under inverse homomorphisms.
    """
    if not morphisms.check_morphism(h, aprime, family.instance, "homomorphism"):
        raise StructureError("the transfer map must be a total homomorphism")
    l = family.l
    table: dict[tuple[str, ...], frozenset[tuple[str, ...]]] = {}
    for size in range(min(l, len(aprime.domain)) + 1):
        for subset in combinations(aprime.domain, size):
            image = tuple(sorted({h[x] for x in subset}))
            pos = {e: i for i, e in enumerate(image)}
            entries = set()
            for values in family.table[image]:
                entries.add(tuple(values[pos[h[x]]] for x in subset))
            table[subset] = frozenset(entries)
    return ConsistencyFamily(aprime, family.template, family.k, l, table)


def validate_family(family: ConsistencyFamily) -> bool:
    """Verbatim check of the three consistency-family conditions plus nonemptiness."""
    a, b, k, l = family.instance, family.template, family.k, family.l
    table = family.table
    if table.get((), None) != frozenset({()}):
        return False
    for subset, entries in table.items():
        if len(subset) > l:
            return False
        for values in entries:
            f = ElementMap(a.domain, b.domain, dict(zip(subset, values)))
            if not morphisms.check_partial_homomorphism(f, a, b):
                return False
            for drop in range(len(subset)):
                sub = subset[:drop] + subset[drop + 1 :]
                sub_values = values[:drop] + values[drop + 1 :]
                if sub_values not in table.get(sub, frozenset()):
                    return False
            if len(subset) <= k:
                assign = dict(zip(subset, values))
                rest = [x for x in a.domain if x not in assign]
                for extra_size in range(1, min(l, len(a.domain)) - len(subset) + 1):
                    for extra in combinations(rest, extra_size):
                        target = tuple(sorted(subset + extra))
                        hit = False
                        for cand in table.get(target, frozenset()):
                            if all(
                                cand[target.index(x)] == assign[x] for x in subset
                            ):
                                hit = True
                                break
                        if not hit:
                            return False
    return True
