"""Generators for the concrete structure families used throughout.

Covers the linear-equation templates over finite Abelian groups and their
binary-tree instances, the colored-path family with its source/target path
class, the binary-tree family with leaf gluing, spans of embeddings
(diagrams), and the glued blow-up construction.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

from . import core, morphisms
from .core import ElementMap, Signature, Structure, StructureError


class AbelianGroup:
    """A finite Abelian group given as a product of cyclic factors.

    Elements are tuples reduced componentwise; the identity is all-zero.
    """

    __slots__ = ("orders",)

    def __init__(self, orders: Sequence[int]):
        if not orders:
            raise StructureError("group needs at least one cyclic factor")
        for d in orders:
            if not isinstance(d, int) or d < 1:
                raise StructureError("cyclic orders must be integers >= 1")
        self.orders = tuple(orders)

    @classmethod
    def parse(cls, text: str) -> "AbelianGroup":
        """Parse e.g. ``"2"`` for Z_2 or ``"2x2"`` for Z_2 x Z_2."""
        try:
            return cls([int(part) for part in text.split("x")])
        except ValueError:
            raise StructureError(f"bad group spec: {text!r}") from None

    @property
    def order(self) -> int:
        n = 1
        for d in self.orders:
            n *= d
        return n

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.orders)

    @property
    def is_trivial(self) -> bool:
        return all(d == 1 for d in self.orders)

    def elements(self) -> list[tuple[int, ...]]:
        return [tuple(e) for e in product(*(range(d) for d in self.orders))]

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.orders))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((-x) % d for x, d in zip(a, self.orders))

    def first_nonzero(self) -> tuple[int, ...]:
        """Generator of the first nontrivial cyclic factor."""
        for i, d in enumerate(self.orders):
            if d > 1:
                return tuple(1 if j == i else 0 for j in range(len(self.orders)))
        raise StructureError("the trivial group has no nonzero element")

    def render(self, a: Sequence[int]) -> str:
        return "-".join(str(x) for x in a)

    def label(self, a: Sequence[int]) -> str:
        return f"C_{self.render(a)}"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AbelianGroup) and self.orders == other.orders

    def __hash__(self) -> int:
        return hash(self.orders)

    def __repr__(self) -> str:
        return "Z" + "xZ".join(str(d) for d in self.orders)


class TreeShape:
    """A full binary tree: every node is a leaf or has exactly two children.

    The textual form is ``.`` for a leaf and ``(LR)`` for an inner node,
    e.g. ``((..)(..))`` for the balanced four-leaf tree.
    """

    __slots__ = ("left", "right")

    def __init__(self, left: Optional["TreeShape"] = None, right: Optional["TreeShape"] = None):
        if (left is None) != (right is None):
            raise StructureError("an inner node needs exactly two children")
        self.left = left
        self.right = right

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @classmethod
    def leaf(cls) -> "TreeShape":
        return cls()

    @classmethod
    def balanced(cls, depth: int) -> "TreeShape":
        if depth < 0:
            raise StructureError("depth must be >= 0")
        if depth == 0:
            return cls.leaf()
        sub = cls.balanced(depth - 1)
        return cls(sub, sub)

    @classmethod
    def parse(cls, text: str) -> "TreeShape":
        shape, rest = cls._parse(text.strip())
        if rest:
            raise StructureError(f"trailing input in shape: {rest!r}")
        return shape

    @classmethod
    def _parse(cls, text: str) -> tuple["TreeShape", str]:
        if not text:
            raise StructureError("empty shape")
        if text[0] == ".":
            return cls.leaf(), text[1:]
        if text[0] == "(":
            left, rest = cls._parse(text[1:])
            right, rest = cls._parse(rest)
            if not rest or rest[0] != ")":
                raise StructureError("unbalanced parentheses in shape")
            return cls(left, right), rest[1:]
        raise StructureError(f"unexpected character {text[0]!r} in shape")

    def render(self) -> str:
        if self.is_leaf:
            return "."
        return f"({self.left.render()}{self.right.render()})"

    def leaf_count(self) -> int:
        if self.is_leaf:
            return 1
        return self.left.leaf_count() + self.right.leaf_count()

    def node_count(self) -> int:
        if self.is_leaf:
            return 1
        return 1 + self.left.node_count() + self.right.node_count()

    def paths(self) -> Iterator[tuple[str, bool]]:
        """All (path, is_leaf) pairs, root path being the empty string."""
        stack = [("", self)]
        while stack:
            path, node = stack.pop()
            yield path, node.is_leaf
            if not node.is_leaf:
                stack.append((path + "1", node.right))
                stack.append((path + "0", node.left))

    @classmethod
    def all_shapes(cls, leaves: int) -> list["TreeShape"]:
        """All full binary trees with the given leaf count (Catalan many)."""
        if leaves < 1:
            raise StructureError("leaf count must be >= 1")
        if leaves == 1:
            return [cls.leaf()]
        out: list[TreeShape] = []
        for k in range(1, leaves):
            for left in cls.all_shapes(k):
                for right in cls.all_shapes(leaves - k):
                    out.append(cls(left, right))
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TreeShape) and self.render() == other.render()

    def __hash__(self) -> int:
        return hash(self.render())

    def __repr__(self) -> str:
        return f"TreeShape({self.render()!r})"


class Diagram:
    """A span of two embeddings of a common base into a left and right side."""

    __slots__ = ("base", "left", "right", "left_emb", "right_emb", "_hash")

    def __init__(
        self,
        base: Structure,
        left: Structure,
        right: Structure,
        left_emb: ElementMap,
        right_emb: ElementMap,
    ):
        if base.signature != left.signature or base.signature != right.signature:
            raise core.SignatureMismatch("diagram parts must share one signature")
        if not morphisms.check_morphism(left_emb, base, left, "embedding"):
            raise StructureError("left map is not an embedding of the base")
        if not morphisms.check_morphism(right_emb, base, right, "embedding"):
            raise StructureError("right map is not an embedding of the base")
        self.base = base
        self.left = left
        self.right = right
        self.left_emb = left_emb
        self.right_emb = right_emb
        self._hash = hash((base, left, right, left_emb, right_emb))

    @property
    def order(self) -> int:
        return len(self.base.domain)

    def free_amalgam(self) -> core.AmalgamResult:
        return core.free_amalgam(self.base, self.left_emb, self.left, self.right_emb, self.right)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Diagram)
            and self.base == other.base
            and self.left == other.left
            and self.right == other.right
            and self.left_emb == other.left_emb
            and self.right_emb == other.right_emb
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Diagram(|A|={self.order}, |L|={len(self.left.domain)}, |R|={len(self.right.domain)})"


class Coloring:
    """A two-sided coloring of a list of embeddings ("spots").

    ``sides`` holds one of ``"L"``/``"R"`` per spot, aligned with ``spots``.
    The encoding is the integer whose bit i is 1 exactly when spot i is
    colored ``"R"``.
    """

    __slots__ = ("spots", "sides", "_index")

    def __init__(self, spots: Sequence[ElementMap], sides: Sequence[str]):
        if len(spots) != len(sides):
            raise StructureError("coloring must assign one side per spot")
        for side in sides:
            if side not in ("L", "R"):
                raise StructureError(f"bad side {side!r}; expected 'L' or 'R'")
        self.spots = tuple(spots)
        self.sides = tuple(sides)
        self._index = {spot: i for i, spot in enumerate(self.spots)}

    @classmethod
    def from_encoding(cls, spots: Sequence[ElementMap], encoding: int) -> "Coloring":
        sides = ["R" if (encoding >> i) & 1 else "L" for i in range(len(spots))]
        return cls(spots, sides)

    def encoding(self) -> int:
        enc = 0
        for i, side in enumerate(self.sides):
            if side == "R":
                enc |= 1 << i
        return enc

    def of(self, spot: ElementMap) -> str:
        try:
            return self.sides[self._index[spot]]
        except KeyError:
            raise StructureError("spot is not in the coloring's domain") from None

    def __len__(self) -> int:
        return len(self.spots)

    def __contains__(self, spot: ElementMap) -> bool:
        return spot in self._index


# ---------------------------------------------------------------------------
# Linear-equation templates and tree instances

VALUE = "value"
TRIPLE = "triple"
PI = ("pi1", "pi2", "pi3")


def template_signature(group: AbelianGroup) -> Signature:
    symbols = [(PI[0], 2), (PI[1], 2), (PI[2], 2), (VALUE, 1), (TRIPLE, 1)]
    symbols += [(group.label(a), 1) for a in group.elements()]
    return Signature(symbols)


def build_template(group: AbelianGroup) -> Structure:
    """Incidence template for x+y+z = 0 over the group, plus x = a markers.

    The domain has one element per group value and one per zero-sum triple;
    the three binary relations are the graphs of the coordinate projections.
    """
    sig = template_signature(group)
    elements = group.elements()
    value_id = {a: group.render(a) for a in elements}
    rels: dict[str, set[tuple[str, ...]]] = {name: set() for name in sig.names}
    domain: list[str] = list(value_id.values())
    for a in elements:
        rels[VALUE].add((value_id[a],))
        rels[group.label(a)].add((value_id[a],))
    for x in elements:
        for y in elements:
            z = group.neg(group.add(x, y))
            t = f"{group.render(x)}+{group.render(y)}+{group.render(z)}"
            domain.append(t)
            rels[TRIPLE].add((t,))
            rels[PI[0]].add((t, value_id[x]))
            rels[PI[1]].add((t, value_id[y]))
            rels[PI[2]].add((t, value_id[z]))
    return Structure(sig, domain, rels)


def _tree_shape_for(n: int, shape: Optional[TreeShape]) -> TreeShape:
    if shape is not None:
        return shape
    if n < 1 or n & (n - 1):
        raise StructureError("leaf count must be a power of two unless a shape is given")
    return TreeShape.balanced(n.bit_length() - 1)


def tree_instance(n: int, shape: Optional[TreeShape] = None) -> Structure:
    """Equation instance shaped like a binary tree with ``n`` leaves.

    Nodes are value elements and each inner node contributes a triple
    element wired to its father, left son, and right son.  The default
    shape is the complete tree, so ``n`` must then be a power of two;
    passing an explicit shape lifts that restriction (such instances sit
    outside the balanced-tree guarantees of the glued families).
    """
    shape = _tree_shape_for(n, shape)
    if shape.leaf_count() != n:
        raise StructureError("shape leaf count disagrees with n")
    sig = Signature([(PI[0], 2), (PI[1], 2), (PI[2], 2), (VALUE, 1), (TRIPLE, 1)])
    rels: dict[str, set[tuple[str, ...]]] = {name: set() for name in sig.names}
    domain: list[str] = []
    for path, is_leaf in shape.paths():
        node = f"n{path}"
        domain.append(node)
        rels[VALUE].add((node,))
        if not is_leaf:
            trip = f"t{path}"
            domain.append(trip)
            rels[TRIPLE].add((trip,))
            rels[PI[0]].add((trip, node))
            rels[PI[1]].add((trip, f"n{path}0"))
            rels[PI[2]].add((trip, f"n{path}1"))
    return Structure(sig, domain, rels)


def tree_root(instance: Structure) -> str:
    """The root node: a value element that is never a left or right son."""
    sons = {t[1] for t in instance.relation(PI[1])} | {t[1] for t in instance.relation(PI[2])}
    roots = [x for (x,) in instance.relation(VALUE) if x not in sons]
    fathers = {t[1] for t in instance.relation(PI[0])}
    if fathers:
        roots = [x for x in roots if x in fathers]
    if len(roots) != 1:
        raise StructureError("instance has no identifiable root")
    return roots[0]


def tree_leaves(instance: Structure) -> list[str]:
    """Leaf nodes: value elements that are below no triple."""
    fathers = {t[1] for t in instance.relation(PI[0])}
    return [x for (x,) in sorted(instance.relation(VALUE)) if x not in fathers]


def marking(instance: Structure, a: Sequence[int], group: AbelianGroup) -> Structure:
    """The instance with its root marked by the predicate of value ``a``.

    The signature is enlarged to the full template signature of ``group``,
    so markings can be matched directly against ``build_template(group)``.
    """
    a = tuple(a)
    if a not in set(group.elements()):
        raise StructureError(f"{a!r} is not an element of {group!r}")
    root = tree_root(instance)
    target_sig = template_signature(group)
    extra = [s for s in target_sig.symbols if s[0] not in instance.signature]
    expanded = core.add_symbols(instance, extra)
    rels = {name: set(ts) for name, ts in expanded.relations_items()}
    rels[group.label(a)].add((root,))
    return Structure(expanded.signature, expanded.domain, rels)


def diagram_lineq(
    n: int,
    group: AbelianGroup,
    a: Optional[Sequence[int]] = None,
    shape: Optional[TreeShape] = None,
) -> Diagram:
    """Span gluing the 0-marked and a-marked copies of a tree along its leaves."""
    if group.is_trivial:
        raise StructureError("the trivial group admits no distinct markings")
    if n < 2:
        raise StructureError("need at least two leaves")
    mark = tuple(a) if a is not None else group.first_nonzero()
    if mark == group.zero:
        raise StructureError("the second marking must be nonzero")
    instance = tree_instance(n, shape)
    left = marking(instance, group.zero, group)
    right = marking(instance, mark, group)
    leaves = tree_leaves(instance)
    base = core.induced_substructure(left, leaves)
    inclusion_l = ElementMap(base.domain, left.domain, {x: x for x in leaves})
    inclusion_r = ElementMap(base.domain, right.domain, {x: x for x in leaves})
    return Diagram(base, left, right, inclusion_l, inclusion_r)


# ---------------------------------------------------------------------------
# The colored-path family and its double-cone structures

FN_SIGNATURE = Signature([("E", 2), ("Ed", 2), ("R", 1), ("B", 1), ("S", 1), ("T", 1)])


def _path_ids(n: int, prefix: str) -> list[str]:
    width = len(str(n))
    return [f"{prefix}{str(i).zfill(width)}" for i in range(1, n + 1)]


def gen_Fn(n: int) -> Structure:
    """Directed source-to-target path with a red and a blue vertex cone.

    Both colored vertices see every path vertex through the symmetric edge
    relation; each unary label occurs exactly once.
    """
    if n < 1:
        raise StructureError("the path needs at least one vertex")
    path = _path_ids(n, "v")
    red, blue = "red", "blue"
    rels: dict[str, set[tuple[str, ...]]] = {name: set() for name in FN_SIGNATURE.names}
    rels["S"].add((path[0],))
    rels["T"].add((path[-1],))
    rels["R"].add((red,))
    rels["B"].add((blue,))
    for u, v in zip(path, path[1:]):
        rels["Ed"].add((u, v))
    for v in path:
        for c in (red, blue):
            rels["E"].add((c, v))
            rels["E"].add((v, c))
    return Structure(FN_SIGNATURE, path + [red, blue], rels)


def diagram_Fn(n: int) -> Diagram:
    """Span of the red-only and blue-only halves glued along the path."""
    full = gen_Fn(n)
    path = [x for x in full.domain if x not in ("red", "blue")]
    left = core.induced_substructure(full, set(full.domain) - {"blue"})
    right = core.induced_substructure(full, set(full.domain) - {"red"})
    base = core.induced_substructure(full, path)
    inc_l = ElementMap(base.domain, left.domain, {x: x for x in path})
    inc_r = ElementMap(base.domain, right.domain, {x: x for x in path})
    return Diagram(base, left, right, inc_l, inc_r)


# ---------------------------------------------------------------------------
# The binary-tree family with a blue vertex over the leaves

G_SIGNATURE = Signature([("E", 2), ("Ed0", 2), ("Ed1", 2), ("R", 1), ("B", 1)])


def gen_G(shape: TreeShape) -> Structure:
    """Rooted directed binary tree, red root, blue vertex over all leaves."""
    if shape.is_leaf:
        raise StructureError("the tree needs at least one inner node")
    rels: dict[str, set[tuple[str, ...]]] = {name: set() for name in G_SIGNATURE.names}
    domain: list[str] = ["blue"]
    leaves: list[str] = []
    for path, is_leaf in shape.paths():
        node = f"t{path}"
        domain.append(node)
        if is_leaf:
            leaves.append(node)
        else:
            rels["Ed0"].add((node, f"t{path}0"))
            rels["Ed1"].add((node, f"t{path}1"))
    rels["R"].add(("t",))
    rels["B"].add(("blue",))
    for leaf in leaves:
        rels["E"].add(("blue", leaf))
        rels["E"].add((leaf, "blue"))
    return Structure(G_SIGNATURE, domain, rels)


def diagram_G(shape: TreeShape) -> Diagram:
    """Span of the bare tree and the blue cone glued along the leaves."""
    full = gen_G(shape)
    tree_nodes = [x for x in full.domain if x != "blue"]
    leaves = sorted(t[1] for t in full.relation("E") if t[0] == "blue")
    left = core.induced_substructure(full, tree_nodes)
    right = core.induced_substructure(full, leaves + ["blue"])
    base = core.induced_substructure(full, leaves)
    inc_l = ElementMap(base.domain, left.domain, {x: x for x in leaves})
    inc_r = ElementMap(base.domain, right.domain, {x: x for x in leaves})
    return Diagram(base, left, right, inc_l, inc_r)


# ---------------------------------------------------------------------------
# Glued blow-ups

def _fresh_prefix(taken: Iterable[str], base: str) -> str:
    taken = set(taken)
    prefix = base
    while any(x.startswith(prefix) for x in taken):
        prefix = "g" + prefix
    return prefix


def _spot_parts(diagram: Diagram, spot: ElementMap, side: str):
    """Fresh elements and half-rendered tuples of one glued side copy.

    Rendered tuples hold (identifier, is_glued) pairs: glued coordinates are
    already blow-up identifiers, fresh ones still need the per-copy prefix.
    """
    structure = diagram.left if side == "L" else diagram.right
    emb = diagram.left_emb if side == "L" else diagram.right_emb
    into_j = {emb[a]: spot[a] for a in diagram.base.domain}
    fresh = [x for x in structure.domain if x not in into_j]
    tuples: dict[str, list[tuple[tuple[str, bool], ...]]] = {}
    for name, ts in structure.relations_items():
        rendered = [
            tuple((into_j[x], True) if x in into_j else (x, False) for x in t)
            for t in ts
        ]
        if rendered:
            tuples[name] = rendered
    return fresh, tuples


class _JCSkeleton:
    """Coloring-independent data for gluing side copies onto one blow-up."""

    __slots__ = ("j", "spots", "spot_index", "parts", "prefix")

    def __init__(self, diagram: Diagram, m: int):
        emb = morphisms.canonical_embeddings(diagram.base, m)
        self.j = emb.target
        self.spots = emb.members
        self.spot_index = {spot: i for i, spot in enumerate(self.spots)}
        self.parts = {
            side: [_spot_parts(diagram, spot, side) for spot in self.spots]
            for side in ("L", "R")
        }
        self.prefix = _fresh_prefix(self.j.domain, "g")


_skeleton_cache: dict[tuple[Diagram, int], _JCSkeleton] = {}


def _jc_skeleton(diagram: Diagram, m: int) -> _JCSkeleton:
    key = (diagram, m)
    if key not in _skeleton_cache:
        if len(_skeleton_cache) > 8:
            _skeleton_cache.clear()
        _skeleton_cache[key] = _JCSkeleton(diagram, m)
    return _skeleton_cache[key]


def build_JC(
    diagram: Diagram,
    m: int,
    coloring: Coloring,
) -> tuple[Structure, dict[ElementMap, ElementMap]]:
    """Blow-up of the base glued with one fresh side copy per colored spot.

    Spots must be canonical embeddings of the base into its m-fold blow-up;
    a partial coloring glues only the spots it covers.  Returns the glued
    structure and, per spot, the lifted embedding of the base into it.  The
    blow-up stays an induced substructure, and each lifted embedding is the
    spot composed with that inclusion.  Fresh copies are named by their
    spot's index in the lexicographic spot order.
    """
    if m < 1:
        raise StructureError("blow-up multiplicity must be >= 1")
    skeleton = _jc_skeleton(diagram, m)
    try:
        chosen = sorted(
            (skeleton.spot_index[spot], side)
            for spot, side in zip(coloring.spots, coloring.sides)
        )
    except KeyError:
        raise StructureError("coloring mentions a spot outside the canonical embeddings") from None
    j = skeleton.j
    domain = list(j.domain)
    rels = {name: set(ts) for name, ts in j.relations_items()}
    prefix = skeleton.prefix
    for k, side in chosen:
        fresh, tuples = skeleton.parts[side][k]
        tag = f"{prefix}{k}."
        domain.extend(tag + x for x in fresh)
        for name, ts in tuples.items():
            rels[name].update(
                tuple(x if glued else tag + x for x, glued in t) for t in ts
            )
    glued = Structure(diagram.base.signature, domain, rels)
    lifted = {
        spot: ElementMap(diagram.base.domain, glued.domain, spot.assignment)
        for spot in coloring.spots
    }
    return glued, lifted


# ---------------------------------------------------------------------------
# Source-to-target paths and their reachability split

P_SIGNATURE = Signature([("Ed", 2), ("S", 1), ("T", 1)])
P_IO_SIGNATURE = P_SIGNATURE.extended([("I", 1), ("O", 1)])


def gen_Pn(n: int) -> Structure:
    """Simple directed path on n nodes, source-labeled start, target-labeled end."""
    if n < 1:
        raise StructureError("the path needs at least one node")
    ids = _path_ids(n, "p")
    rels: dict[str, set[tuple[str, ...]]] = {name: set() for name in P_SIGNATURE.names}
    rels["S"].add((ids[0],))
    rels["T"].add((ids[-1],))
    for u, v in zip(ids, ids[1:]):
        rels["Ed"].add((u, v))
    return Structure(P_SIGNATURE, ids, rels)


class ExcludedPathError(StructureError):
    """A directed walk from a source node to a target node was found."""

    def __init__(self, path: list[str]):
        super().__init__(f"source-to-target path exists: {' -> '.join(path)}")
        self.path = path


def io_expansion(s: Structure) -> Structure:
    """Expansion splitting the domain into forward-reachable and the rest.

    ``I`` holds the nodes reachable from a source-labeled node (including
    those nodes), ``O`` the complement.  Raises ExcludedPathError with a
    witnessing walk when a target-labeled node is reachable.
    """
    if s.signature != P_SIGNATURE:
        raise core.SignatureMismatch("expected the source/target path signature")
    succ: dict[str, list[str]] = {x: [] for x in s.domain}
    for (u, v) in sorted(s.relation("Ed")):
        succ[u].append(v)
    targets = {x for (x,) in s.relation("T")}
    parent: dict[str, Optional[str]] = {}
    frontier = sorted(x for (x,) in s.relation("S"))
    for x in frontier:
        parent[x] = None
    queue = list(frontier)
    while queue:
        x = queue.pop(0)
        if x in targets:
            path = [x]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])  # type: ignore[arg-type]
            raise ExcludedPathError(list(reversed(path)))
        for y in succ[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    inside = set(parent)
    return core.add_symbols(
        s,
        [("I", 1), ("O", 1)],
        {
            "I": {(x,) for x in inside},
            "O": {(x,) for x in s.domain if x not in inside},
        },
    )


def cplus_check(splus: Structure) -> bool:
    """The reachability-split membership conditions for expanded structures.

    Requires the I/O predicates to partition the domain, sources inside,
    targets outside, and no directed edge from inside to outside.
    """
    for name in ("I", "O", "S", "T", "Ed"):
        if name not in splus.signature:
            raise StructureError(f"missing predicate {name!r}")
    inside = {x for (x,) in splus.relation("I")}
    outside = {x for (x,) in splus.relation("O")}
    if inside & outside or inside | outside != set(splus.domain):
        return False
    if not {x for (x,) in splus.relation("S")} <= inside:
        return False
    if not {x for (x,) in splus.relation("T")} <= outside:
        return False
    for (u, v) in splus.relation("Ed"):
        if u in inside and v in outside:
            return False
    return True


# ---------------------------------------------------------------------------
# Indexed family enumerators (for membership oracles)

class FnFamily:
    """The colored-path family, indexed by path length; member size is n + 2."""

    def __init__(self):
        self._cache: dict[int, Structure] = {}

    @property
    def signature(self) -> Signature:
        return FN_SIGNATURE

    def member(self, n: int) -> Structure:
        if n not in self._cache:
            self._cache[n] = gen_Fn(n)
        return self._cache[n]

    def __call__(self, max_size: int) -> Iterator[Structure]:
        n = 1
        while n + 2 <= max_size:
            yield self.member(n)
            n += 1


class GFamily:
    """The leaf-glued binary-tree family, enumerated by leaf count then shape.

    A member with k leaves has 2k elements.
    """

    def __init__(self):
        self._cache: dict[int, list[Structure]] = {}

    @property
    def signature(self) -> Signature:
        return G_SIGNATURE

    def members_with_leaves(self, leaves: int) -> list[Structure]:
        if leaves not in self._cache:
            self._cache[leaves] = [gen_G(s) for s in TreeShape.all_shapes(leaves)]
        return self._cache[leaves]

    def __call__(self, max_size: int) -> Iterator[Structure]:
        leaves = 2
        while 2 * leaves <= max_size:
            yield from self.members_with_leaves(leaves)
            leaves += 1


class PnFamily:
    """The source-to-target path family; member size is n."""

    def __init__(self):
        self._cache: dict[int, Structure] = {}

    @property
    def signature(self) -> Signature:
        return P_SIGNATURE

    def __call__(self, max_size: int) -> Iterator[Structure]:
        for n in range(1, max_size + 1):
            if n not in self._cache:
                self._cache[n] = gen_Pn(n)
            yield self._cache[n]
