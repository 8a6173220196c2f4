"""Class-membership oracles and meta-level amalgamation checks.

The two built-in oracle constructors cover classes defined by forbidden
homomorphisms and by local consistency; both are closed under inverse
homomorphisms, which is what lets the free amalgam decide amalgamation
failure for every amalgam at once.  Confusion sweeps iterate colorings of
the canonical blow-up embeddings, glue, and test membership, optionally
across worker processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Optional, Sequence

from . import core, families, morphisms
from .consistency import BudgetExceeded, DEFAULT_TABLE_CAP, is_consistent
from .core import ElementMap, Structure, StructureError, pullback
from .families import Coloring, Diagram, build_JC
from .morphisms import HomomorphismSearcher, canonical_embeddings
from .rng import SplitMix64

EXHAUSTIVE_SPOT_LIMIT = 20


class ClassOracle:
    """A membership test plus the closure facts the checks rely on.

    ``inverse_hom_closed`` asserts: a homomorphism from A' to a member A
    makes A' a member.  ``witness`` optionally explains non-membership.
    """

    __slots__ = ("membership", "inverse_hom_closed", "description", "witness")

    def __init__(
        self,
        membership: Callable[[Structure], bool],
        inverse_hom_closed: bool,
        description: str,
        witness: Optional[Callable[[Structure], Optional[str]]] = None,
    ):
        self.membership = membership
        self.inverse_hom_closed = inverse_hom_closed
        self.description = description
        self.witness = witness

    def member(self, s: Structure) -> bool:
        return self.membership(s)


class _ForbhMembership:
    """No family member of bounded size maps homomorphically into the input."""

    def __init__(self, generator, size_bound: int, hard_cap: Optional[int]):
        self.generator = generator
        self.size_bound = size_bound
        self.hard_cap = hard_cap

    def _cap(self, s: Structure) -> int:
        if self.hard_cap is not None:
            return self.hard_cap
        return max(self.size_bound, len(s.domain))

    def __call__(self, s: Structure) -> bool:
        searcher = HomomorphismSearcher(s)
        for member in self.generator(self._cap(s)):
            if searcher.exists(member):
                return False
        return True

    def explain(self, s: Structure) -> Optional[str]:
        searcher = HomomorphismSearcher(s)
        for member in self.generator(self._cap(s)):
            hom = searcher.find(member)
            if hom is not None:
                return f"member of size {len(member.domain)} maps in via {dict(hom.items())}"
        return None


class _ConsistencyMembership:
    def __init__(self, template: Structure, k: int, l: int, max_entries: int):
        self.template = template
        self.k = k
        self.l = l
        self.max_entries = max_entries

    def __call__(self, s: Structure) -> bool:
        return is_consistent(s, self.template, self.k, self.l, self.max_entries)

    def explain(self, s: Structure) -> Optional[str]:
        if self(s):
            return None
        return f"not ({self.k},{self.l})-consistent with the template"


def forbh_oracle(generator, size_bound: int, hard_cap: Optional[int] = None) -> ClassOracle:
    """Membership oracle for the class forbidding homomorphisms from a family.

    ``generator(max_size)`` must yield the family members of at most
    ``max_size`` elements in nondecreasing size.  Membership enumerates
    members up to ``max(size_bound, |input|)`` elements; ``hard_cap``
    overrides that bound for families whose member count explodes with
    size, at the caller's judgement of which sizes are relevant.
    """
    impl = _ForbhMembership(generator, size_bound, hard_cap)
    return ClassOracle(
        membership=impl,
        inverse_hom_closed=True,
        description=f"Forb_h({type(generator).__name__})",
        witness=impl.explain,
    )


def consistency_oracle(
    template: Structure, k: int, l: int, max_entries: int = DEFAULT_TABLE_CAP
) -> ClassOracle:
    """Membership oracle for the (k,l)-consistent instances of a template."""
    impl = _ConsistencyMembership(template, k, l, max_entries)
    return ClassOracle(
        membership=impl,
        inverse_hom_closed=True,
        description=f"({k},{l})-consistent wrt template of size {len(template.domain)}",
        witness=impl.explain,
    )


def witnesses_failure(diagram: Diagram, oracle: ClassOracle) -> bool:
    """True iff no amalgam over the diagram stays in the class.

    Decided on the free amalgam alone: it maps homomorphically onto every
    amalgam, so for an inverse-homomorphism-closed class a non-member free
    amalgam rules out every amalgam.  Oracles without that closure are
    refused, and the diagram's own parts must be members.
    """
    if not oracle.inverse_hom_closed:
        raise StructureError(
            "oracle is not closed under inverse homomorphisms; "
            "the free amalgam would only decide itself"
        )
    for label, part in (("base", diagram.base), ("left", diagram.left), ("right", diagram.right)):
        if not oracle.member(part):
            raise StructureError(f"diagram {label} is not a member of the class")
    return not oracle.member(diagram.free_amalgam().amalgam)


class ConfusionReport:
    """Outcome of a coloring sweep over one diagram and blow-up multiplicity."""

    __slots__ = ("diagram", "m", "mode", "colorings_tested", "failures", "verdict")

    def __init__(
        self,
        diagram: Diagram,
        m: int,
        mode: dict,
        colorings_tested: int,
        failures: tuple[tuple[int, Optional[str]], ...],
    ):
        self.diagram = diagram
        self.m = m
        self.mode = mode
        self.colorings_tested = colorings_tested
        self.failures = failures
        self.verdict = colorings_tested > 0 and not failures

    def to_dict(self) -> dict:
        return {
            "order": self.diagram.order,
            "m": self.m,
            "mode": self.mode,
            "witnesses_failure": True,  # checked before any coloring is tested
            "colorings_tested": self.colorings_tested,
            "failures": [
                {"coloring": enc, "evidence": evidence} for enc, evidence in self.failures
            ],
            "verdict": self.verdict,
        }


def _test_colorings(
    diagram: Diagram,
    m: int,
    oracle: ClassOracle,
    spots: Sequence[ElementMap],
    encodings: Iterable[int],
) -> list[tuple[int, Optional[str]]]:
    failures = []
    for enc in encodings:
        coloring = Coloring.from_encoding(spots, enc)
        glued, _ = build_JC(diagram, m, coloring)
        if not oracle.member(glued):
            evidence = oracle.witness(glued) if oracle.witness else None
            failures.append((enc, evidence))
    return failures


def _confusion_chunk(args) -> list[tuple[int, Optional[str]]]:
    diagram, m, oracle, encodings = args
    spots = canonical_embeddings(diagram.base, m).members
    return _test_colorings(diagram, m, oracle, spots, encodings)


def check_confusion(
    diagram: Diagram,
    m: int,
    oracle: ClassOracle,
    mode: str = "exhaustive",
    samples: int = 0,
    seed: int = 0,
    jobs: int = 1,
) -> ConfusionReport:
    """Sweep colorings of the canonical embeddings and test glued membership.

    Exhaustive mode iterates all 2^(m^|A|) colorings and is refused beyond
    2^20 of them; sample mode draws ``samples`` seeded colorings.  The
    diagram must already witness failure of amalgamation for the oracle.
    Failures are reported sorted by coloring encoding; the verdict is true
    when no coloring left the class.
    """
    if not witnesses_failure(diagram, oracle):
        raise StructureError("diagram does not witness failure of amalgamation")
    spots = canonical_embeddings(diagram.base, m).members
    n_spots = len(spots)
    if mode == "exhaustive":
        if n_spots > EXHAUSTIVE_SPOT_LIMIT:
            raise BudgetExceeded(
                f"exhaustive sweep over {n_spots} spots exceeds 2^{EXHAUSTIVE_SPOT_LIMIT} colorings"
            )
        encodings: list[int] = list(range(1 << n_spots))
        mode_doc = {"kind": "exhaustive"}
    elif mode == "sample":
        if samples < 1:
            raise StructureError("sample mode needs a positive sample count")
        rng = SplitMix64(seed)
        encodings = [rng.next_bits(n_spots) for _ in range(samples)]
        mode_doc = {"kind": "sample", "count": samples, "seed": seed}
    else:
        raise StructureError(f"unknown mode {mode!r}")

    if jobs > 1 and len(encodings) >= 4 * jobs:
        chunk_size = max(64, len(encodings) // (jobs * 8))
        chunks = [
            (diagram, m, oracle, encodings[i : i + chunk_size])
            for i in range(0, len(encodings), chunk_size)
        ]
        failures: list[tuple[int, Optional[str]]] = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for result in pool.map(_confusion_chunk, chunks):
                failures.extend(result)
    else:
        failures = _test_colorings(diagram, m, oracle, spots, encodings)
    failures.sort(key=lambda fail: fail[0])
    return ConfusionReport(diagram, m, mode_doc, len(encodings), tuple(failures))


def antichain(structures: Sequence[Structure]) -> bool:
    """True iff no structure maps homomorphically into a different one."""
    for target_index, target in enumerate(structures):
        searcher = HomomorphismSearcher(target)
        for source_index, source in enumerate(structures):
            if source_index != target_index and searcher.exists(source):
                return False
    return True


class ExpansionSpec:
    """Parameters of a seeded random expansion: predicate count, max arity, seed."""

    __slots__ = ("t", "r", "seed")

    def __init__(self, t: int, r: int, seed: int):
        if t < 0:
            raise StructureError("predicate count must be >= 0")
        if r < 1:
            raise StructureError("maximum arity must be >= 1")
        self.t = t
        self.r = r
        self.seed = seed


def random_expansion(s: Structure, spec: ExpansionSpec) -> Structure:
    """Expansion by ``t`` fresh predicates of arities cycling 1..r.

    Every candidate tuple is included independently with probability 1/2,
    drawn from the seeded splitmix stream; identical seeds give identical
    expansions.
    """
    from itertools import product

    rng = SplitMix64(spec.seed)
    extra: list[tuple[str, int]] = []
    tuples: dict[str, set[tuple[str, ...]]] = {}
    for j in range(1, spec.t + 1):
        name = f"Q{j}"
        while name in s.signature or name in dict(extra):
            name += "_"
        arity = ((j - 1) % spec.r) + 1
        extra.append((name, arity))
        chosen = {
            t for t in product(s.domain, repeat=arity) if rng.next_bit()
        }
        tuples[name] = chosen
    return core.add_symbols(s, extra, tuples)


def collision_search(
    diagram: Diagram,
    m: int,
    coloring: Coloring,
    jplus: Structure,
) -> Optional[tuple[ElementMap, ElementMap]]:
    """First differently-colored spot pair with equal pullback expansions.

    ``jplus`` must expand the glued structure of the given coloring (same
    domain).  Pullbacks are taken along the lifted embeddings of the base;
    the scan runs in lexicographic spot-pair order.
    """
    glued, lifted = build_JC(diagram, m, coloring)
    if set(jplus.domain) != set(glued.domain):
        raise StructureError("expansion domain does not match the glued structure")
    spots = list(coloring.spots)
    pullbacks = []
    for spot in spots:
        hat = ElementMap(diagram.base.domain, jplus.domain, lifted[spot].assignment)
        pullbacks.append(pullback(hat, jplus))
    for i in range(len(spots)):
        for j in range(i + 1, len(spots)):
            if coloring.sides[i] != coloring.sides[j] and pullbacks[i] == pullbacks[j]:
                return spots[i], spots[j]
    return None


def homogenization_probe(
    samples: Sequence[Structure],
    seed: int,
    trials: Optional[int] = None,
) -> bool:
    """Check the reachability-split expansion and its free-amalgam closure.

    Every sample must avoid source-to-target paths; each is expanded, the
    expansion must satisfy the split conditions and reduce back to the
    sample, and seeded random pairs are glued along random common induced
    substructures (skipped unless the random identification is an
    embedding of expansions) with the amalgam checked again.
    """
    oracle = forbh_oracle(families.PnFamily(), size_bound=0)
    expansions = []
    for sample in samples:
        if not oracle.member(sample):
            raise StructureError("sample admits a source-to-target path")
        expanded = families.io_expansion(sample)
        if not families.cplus_check(expanded):
            return False
        if core.reduct(expanded, sample.signature.names) != sample:
            return False
        expansions.append(expanded)
    if not expansions:
        return True
    rng = SplitMix64(seed)
    if trials is None:
        trials = 2 * len(expansions)
    for _ in range(trials):
        first = expansions[rng.next_below(len(expansions))]
        second = expansions[rng.next_below(len(expansions))]
        size = rng.next_below(min(len(first.domain), len(second.domain)) + 1)
        shared = [first.domain[i] for i in rng.sample_indices(len(first.domain), size)]
        targets = [second.domain[i] for i in rng.sample_indices(len(second.domain), size)]
        base = core.induced_substructure(first, shared)
        inclusion = ElementMap(base.domain, first.domain, {x: x for x in shared})
        candidate = ElementMap(base.domain, second.domain, dict(zip(sorted(shared), targets)))
        if not morphisms.check_morphism(candidate, base, second, "embedding"):
            continue  # mismatched labels on the shared part: not a legal gluing
        result = core.free_amalgam(base, inclusion, first, candidate, second)
        if not families.cplus_check(result.amalgam):
            return False
    return True
