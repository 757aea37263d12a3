"""Finite-model checking, ontology consistency via type elimination, and
bounded entailment oracles."""

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

from .core import (
    ALC, ALCI, ALCQ, ABox, And, AtLeast, AtMost, Bottom, Concept, Exists,
    Forall, InputError, Name, Not, Ontology, Or, Role, Signature, Top, UCQ,
    UnsupportedLogicError, expand_abbreviations, signature_of, subconcepts,
)
from .homs import HomConstraints, homomorphisms, strong_constraints


@dataclass(frozen=True)
class Interpretation:
    """A finite interpretation with anchored individual names."""

    domain: frozenset
    labels: frozenset  # of (concept-name, element)
    edges: frozenset  # of (role-name, element, element)
    names: frozenset = frozenset()  # of (individual, element)
    declared: Signature = Signature(frozenset(), frozenset())

    def __post_init__(self):
        if not self.domain:
            raise InputError("interpretation domains must be non-empty")
        for n, e in self.labels:
            if e not in self.domain:
                raise InputError(f"label on unknown element {e!r}")
        for r, x, y in self.edges:
            if x not in self.domain or y not in self.domain:
                raise InputError("edge on unknown element")
        seen = {}
        for a, e in self.names:
            if e not in self.domain:
                raise InputError(f"individual {a} anchored outside the domain")
            if a in seen and seen[a] != e:
                raise InputError(f"individual {a} anchored twice")
            seen[a] = e

    @cached_property
    def concept_ext(self):
        out = {n: set() for n in self.declared.concept_names}
        for n, e in self.labels:
            out.setdefault(n, set()).add(e)
        return {n: frozenset(es) for n, es in out.items()}

    @cached_property
    def role_ext(self):
        out = {r: set() for r in self.declared.role_names}
        for r, x, y in self.edges:
            out.setdefault(r, set()).add((x, y))
        return {r: frozenset(ps) for r, ps in out.items()}

    @cached_property
    def name_map(self):
        return dict(self.names)

    def element_of(self, individual):
        m = self.name_map
        if individual not in m:
            raise InputError(f"individual {individual} is not anchored")
        return m[individual]

    def role_pairs(self, role):
        pairs = self.role_ext.get(role.name, frozenset())
        if role.inverted:
            return frozenset((y, x) for x, y in pairs)
        return pairs


def interp(domain, labels=(), edges=(), names=(), declared=None):
    return Interpretation(frozenset(domain), frozenset(labels),
                          frozenset(edges), frozenset(names),
                          declared or Signature(frozenset(), frozenset()))


def abox_interpretation(a, declared=None):
    """The ABox viewed as an interpretation over exactly its individuals."""
    if not a.individuals:
        raise InputError("an empty ABox induces no interpretation")
    return interp(a.individuals, set(a.concept_assertions),
                  set(a.role_assertions), {(i, i) for i in a.individuals},
                  declared)


@dataclass(frozen=True)
class TreeInterpretation:
    """A tree-shaped interpretation whose domain is a prefix-closed set of
    words over naturals; each edge connects a node with its parent in a
    single role, in either direction."""

    node_labels: frozenset  # of (word, concept-name)
    # (child-word, role-name, upward): upward=False means parent->child edge
    node_edges: frozenset

    def __post_init__(self):
        words = self.words
        for w in words:
            if w and w[:-1] not in words:
                raise InputError("tree domain must be prefix-closed")
            if w:
                k = w[-1]
                if k < 1 or (k > 1 and w[:-1] + (k - 1,) not in words):
                    raise InputError("successor indices must form 1..k")
        children = {w for w, _, _ in self.node_edges}
        for w in words:
            if w and w not in children:
                raise InputError(f"node {w} lacks a connecting edge")

    @cached_property
    def words(self):
        ws = {()}
        ws |= {w for w, _ in self.node_labels}
        ws |= {w for w, _, _ in self.node_edges}
        closed = set()
        for w in ws:
            for i in range(len(w) + 1):
                closed.add(w[:i])
        return frozenset(closed)

    @cached_property
    def depth(self):
        return max(len(w) for w in self.words)

    def labels_at(self, w):
        return frozenset(n for u, n in self.node_labels if u == w)

    def edge_at(self, w):
        for u, r, up in self.node_edges:
            if u == w:
                return (r, up)
        return None

    def children(self, w):
        k = 1
        out = []
        while w + (k,) in self.words:
            out.append(w + (k,))
            k += 1
        return out

    def to_interpretation(self, prefix=None, root=None, extra_labels=()):
        """Concrete interpretation; words become (prefix, word) pairs, or the
        given root element for the empty word."""

        def elem(w):
            if not w and root is not None:
                return root
            return (prefix, w) if prefix is not None else w

        labels = {(n, elem(w)) for w, n in self.node_labels}
        labels |= {(n, elem(())) for n in extra_labels}
        edges = set()
        for w, r, up in self.node_edges:
            parent, child = elem(w[:-1]), elem(w)
            edges.add((r, child, parent) if up else (r, parent, child))
        return interp({elem(w) for w in self.words}, labels, edges)

    @cached_property
    def depths(self):
        return {w: len(w) for w in self.words}


def extension(i, c):
    """The set of elements of i satisfying concept c."""
    if isinstance(c, Top):
        return set(i.domain)
    if isinstance(c, Bottom):
        return set()
    if isinstance(c, Name):
        return set(i.concept_ext.get(c.name, frozenset()))
    if isinstance(c, Not):
        return set(i.domain) - extension(i, c.arg)
    if isinstance(c, And):
        return extension(i, c.left) & extension(i, c.right)
    if isinstance(c, Or):
        return extension(i, c.left) | extension(i, c.right)
    pairs = i.role_pairs(c.role)
    inner = extension(i, c.arg)
    succ = {}
    for x, y in pairs:
        if y in inner:
            succ.setdefault(x, set()).add(y)
    if isinstance(c, Exists):
        return set(succ)
    if isinstance(c, Forall):
        bad = set()
        for x, y in pairs:
            if y not in inner:
                bad.add(x)
        return set(i.domain) - bad
    if isinstance(c, AtMost):
        return {x for x in i.domain if len(succ.get(x, ())) <= c.bound}
    if isinstance(c, AtLeast):
        return {x for x in i.domain if len(succ.get(x, ())) >= c.bound}
    raise TypeError(f"not a concept: {c!r}")


def is_model(i, x):
    """Whether i satisfies an ontology or an ABox."""
    if isinstance(x, Ontology):
        return all(extension(i, lhs) <= extension(i, rhs)
                   for lhs, rhs in x.inclusions)
    if isinstance(x, ABox):
        for n, a in x.concept_assertions:
            if i.element_of(a) not in i.concept_ext.get(n, frozenset()):
                return False
        for r, a, b in x.role_assertions:
            if (i.element_of(a), i.element_of(b)) not in \
                    i.role_ext.get(r, frozenset()):
                return False
        return True
    raise TypeError(f"cannot check modelhood of {type(x).__name__}")


def is_forest_model(i, a, logic):
    """Whether i is a forest model of the ABox: role edges between
    individuals are exactly the asserted ones, and the remaining edge graph
    is a forest (directed away from its roots under ALC, where individuals
    must be roots; undirected under ALCI)."""
    ind_elems = {i.element_of(x) for x in a.individuals}
    asserted = {(r, i.element_of(x), i.element_of(y))
                for r, x, y in a.role_assertions}
    anon_edges = set()
    for r, x, y in i.edges:
        if x in ind_elems and y in ind_elems:
            if (r, x, y) not in asserted:
                return False
        else:
            anon_edges.add((x, y))
    if logic == ALC:
        indeg = {}
        for x, y in anon_edges:
            indeg[y] = indeg.get(y, 0) + 1
        if any(v > 1 for v in indeg.values()):
            return False
        if any(e in indeg for e in ind_elems):
            return False
        # in-degree <= 1: a cycle would have to be a simple directed cycle
        succ = {}
        for x, y in anon_edges:
            succ.setdefault(x, set()).add(y)
        visited = {}
        for start in list(succ):
            node, seen = start, set()
            while node is not None:
                if visited.get(node):
                    break
                if node in seen:
                    return False
                seen.add(node)
                nxt = succ.get(node, ())
                node = next(iter(nxt)) if nxt else None
            for s in seen:
                visited[s] = True
        return True
    # ALCI: the undirected simple graph must be acyclic
    und = {frozenset((x, y)) for x, y in anon_edges}
    if any(len(p) == 1 for p in und):
        return False
    parent = {e: e for e in i.domain}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in und:
        x, y = sorted(p, key=repr)
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        parent[rx] = ry
    return True


def unravel(i, d, logic, depth):
    """The tree of paths of i starting at d, truncated to the given depth;
    under ALCI paths may also traverse edges backwards."""
    labels = set()
    edges = set()
    tails = {(): d}

    def steps(e):
        out = []
        for r, x, y in i.edges:
            if x == e:
                out.append((r, False, y))
            if y == e and logic == ALCI:
                out.append((r, True, x))
        return sorted(out, key=repr)

    def expand(word):
        e = tails[word]
        for n, elem in i.labels:
            if elem == e:
                labels.add((word, n))
        if len(word) >= depth:
            return
        for k, (r, up, target) in enumerate(steps(e), start=1):
            child = word + (k,)
            tails[child] = target
            edges.add((child, r, up))
            expand(child)

    expand(())
    tree = TreeInterpretation(frozenset(labels), frozenset(edges))
    return tree, tails


def build_iah(i, a, h, logic, depth):
    """Undo the identifications of a homomorphism h from the ABox into i:
    keep the ABox on its own individuals with labels pulled back along h, and
    glue the unraveling of i at h(x) onto each individual x."""
    hmap = h.as_dict() if hasattr(h, "as_dict") else dict(h)
    for n, x in a.concept_assertions:
        if hmap[x] not in i.concept_ext.get(n, frozenset()):
            raise InputError("not a homomorphism from the ABox")
    for r, x, y in a.role_assertions:
        if (hmap[x], hmap[y]) not in i.role_ext.get(r, frozenset()):
            raise InputError("not a homomorphism from the ABox")
    domain = set(a.individuals)
    labels = {(n, x) for x in a.individuals for n, e in i.labels
              if e == hmap[x]}
    edges = set(a.role_assertions)
    names = {(x, x) for x in a.individuals}
    for x in sorted(a.individuals):
        tree, _ = unravel(i, hmap[x], logic, depth)
        sub = tree.to_interpretation(prefix=x, root=x)
        domain |= sub.domain
        edges |= sub.edges
        labels |= {(n, e) for n, e in sub.labels if e != x}
    return interp(domain, labels, edges, names)


# --- type machinery -------------------------------------------------------

def _prim(c):
    return expand_abbreviations(c)


class TypeSystem:
    """Types over the existential subconcepts and concept names of an
    ontology (plus extra tracked concepts/names), with witness-coherent
    elimination."""

    def __init__(self, o, logic, extra_concepts=(), extra_names=()):
        if logic not in (ALC, ALCI):
            raise UnsupportedLogicError(f"type elimination supports {ALC} "
                                        f"and {ALCI} only")
        self.logic = logic
        self.cis = [( _prim(l), _prim(r)) for l, r in
                    sorted(o.inclusions, key=repr)]
        tracked = [c for pair in self.cis for c in pair]
        tracked += [_prim(c) for c in extra_concepts]
        names, exists = set(extra_names), set()
        for c in tracked:
            for s in subconcepts(c):
                if isinstance(s, Name):
                    names.add(s.name)
                elif isinstance(s, Exists):
                    if s.role.inverted and logic != ALCI:
                        raise UnsupportedLogicError("inverse role outside "
                                                    + ALCI)
                    exists.add(s)
        self.name_atoms = sorted(names)
        self.exists_atoms = sorted(exists, key=repr)
        self.types = self._enumerate()
        self.survivors = self._eliminate(self.types)
        self._witness_cache = {}

    # types are frozensets of atoms; an atom is ('n', name) or ('e', Exists)
    def holds(self, c, t):
        if isinstance(c, Top):
            return True
        if isinstance(c, Name):
            return ("n", c.name) in t
        if isinstance(c, Not):
            return not self.holds(c.arg, t)
        if isinstance(c, And):
            return self.holds(c.left, t) and self.holds(c.right, t)
        if isinstance(c, Exists):
            return ("e", c) in t
        raise TypeError(f"unexpected concept in reduced form: {c!r}")

    def _holds3(self, c, partial):
        if isinstance(c, Top):
            return True
        if isinstance(c, Name):
            return partial.get(("n", c.name))
        if isinstance(c, Not):
            v = self._holds3(c.arg, partial)
            return None if v is None else not v
        if isinstance(c, And):
            l = self._holds3(c.left, partial)
            r = self._holds3(c.right, partial)
            if l is False or r is False:
                return False
            if l is True and r is True:
                return True
            return None
        if isinstance(c, Exists):
            return partial.get(("e", c))
        raise TypeError(f"unexpected concept in reduced form: {c!r}")

    def _enumerate(self):
        atoms = ([("n", n) for n in self.name_atoms]
                 + [("e", e) for e in self.exists_atoms])
        out = []
        partial = {}

        def bad():
            for l, r in self.cis:
                if (self._holds3(l, partial) is True
                        and self._holds3(r, partial) is False):
                    return True
            return False

        def go(k):
            if k == len(atoms):
                out.append(frozenset(a for a, v in partial.items() if v))
                return
            for v in (False, True):
                partial[atoms[k]] = v
                if not bad():
                    go(k + 1)
            del partial[atoms[k]]

        go(0)
        return out

    def edge_ok(self, t_from, role, t_to):
        """Whether an edge in the given role may connect elements of the two
        types without violating any absent existential atom."""
        for e in self.exists_atoms:
            if e.role == role and ("e", e) not in t_from:
                if self.holds(e.arg, t_to):
                    return False
            if e.role == role.inverse() and ("e", e) not in t_to:
                if self.holds(e.arg, t_from):
                    return False
        return True

    def witnesses(self, t, e, pool):
        return [t2 for t2 in pool
                if self.edge_ok(t, e.role, t2) and self.holds(e.arg, t2)]

    def survivor_witnesses(self, t, e):
        key = (t, e)
        if key not in self._witness_cache:
            self._witness_cache[key] = self.witnesses(t, e, self.survivors)
        return self._witness_cache[key]

    def _eliminate(self, types):
        pool = list(types)
        changed = True
        while changed:
            changed = False
            keep = []
            for t in pool:
                if all(self.witnesses(t, e, pool)
                       for e in self.exists_atoms if ("e", e) in t):
                    keep.append(t)
                else:
                    changed = True
            pool = keep
        return pool

    def allowed_types(self, asserted_names, extra):
        """Surviving types for an element with the given asserted concept
        names and complex constraints."""
        out = []
        for t in self.survivors:
            if all(("n", n) in t for n in asserted_names) and \
                    all(self.holds(_prim(c), t) for c in extra):
                out.append(t)
        return out

    def abox_assignment(self, a, extra=()):
        """A coherent assignment of surviving types to the individuals of the
        ABox, or None.  extra: iterable of (Concept, individual)."""
        inds = sorted(a.individuals)
        constraints = {}
        for c, x in extra:
            constraints.setdefault(x, []).append(c)
        asserted = {x: set() for x in inds}
        for n, x in a.concept_assertions:
            asserted[x].add(n)
        options = {x: self.allowed_types(asserted[x],
                                         constraints.get(x, ()))
                   for x in inds}
        if any(not opts for opts in options.values()):
            return None
        assignment = {}

        def ok(x, t):
            for r, u, v in a.role_assertions:
                if u == x and v in assignment:
                    if not self.edge_ok(t, Role(r), assignment[v]):
                        return False
                if v == x and u in assignment:
                    if not self.edge_ok(assignment[u], Role(r), t):
                        return False
                if u == x and v == x:
                    if not self.edge_ok(t, Role(r), t):
                        return False
            return True

        def go(k):
            if k == len(inds):
                return True
            x = inds[k]
            for t in options[x]:
                if ok(x, t):
                    assignment[x] = t
                    if go(k + 1):
                        return True
                    del assignment[x]
            return False

        return dict(assignment) if go(0) else None


_TYPE_SYSTEM_CACHE = {}


def type_system(o, logic, extra_concepts=(), extra_names=()):
    """Memoized TypeSystem factory; construction does the exponential type
    enumeration, so repeated oracle calls share it."""
    key = (o, logic, tuple(extra_concepts), tuple(sorted(extra_names)))
    if key not in _TYPE_SYSTEM_CACHE:
        if len(_TYPE_SYSTEM_CACHE) > 512:
            _TYPE_SYSTEM_CACHE.clear()
        _TYPE_SYSTEM_CACHE[key] = TypeSystem(o, logic, extra_concepts,
                                             extra_names)
    return _TYPE_SYSTEM_CACHE[key]


def _alcq_substructure_safe(o):
    """Whether the ontology's models are closed under induced substructures:
    no construct that demands successors, except inside a negative context."""

    def polarity_ok(c, pos):
        # pos=True: c appears positively on a right-hand side
        if isinstance(c, (Top, Bottom, Name)):
            return True
        if isinstance(c, Not):
            return polarity_ok(c.arg, not pos)
        if isinstance(c, (And, Or)):
            return polarity_ok(c.left, pos) and polarity_ok(c.right, pos)
        if isinstance(c, Exists):
            return (not pos) and polarity_ok(c.arg, pos)
        if isinstance(c, Forall):
            return pos and polarity_ok(c.arg, pos)
        if isinstance(c, AtMost):
            return pos and polarity_ok(c.arg, not pos)
        if isinstance(c, AtLeast):
            return (not pos) and polarity_ok(c.arg, pos)
        return False

    return all(polarity_ok(l, False) and polarity_ok(r, True)
               for l, r in o.inclusions)


def _check_consistency_alcq(a, o):
    if not _alcq_substructure_safe(o):
        raise UnsupportedLogicError(
            "ALCQ consistency is supported only for ontologies preserved "
            "under induced substructures")
    sig = signature_of(o) | signature_of(a)
    names = sorted(sig.concept_names)
    elements = sorted(a.individuals) or ["_"]
    labels0 = set(a.concept_assertions) if a.individuals else set()
    edges = set(a.role_assertions) if a.individuals else set()
    optional = [(n, e) for e in elements for n in names
                if (n, e) not in labels0]

    def attempt(bits):
        labels = labels0 | {optional[i] for i in range(len(optional))
                            if bits >> i & 1}
        i = interp(elements, labels, edges,
                   {(e, e) for e in elements} if a.individuals else (),
                   declared=sig)
        return is_model(i, o) and (not a.individuals or is_model(i, a))

    return any(attempt(bits) for bits in range(1 << len(optional)))


def check_consistency(a, o, logic, extra=()):
    """Whether the ABox and ontology have a common model.  extra: internal
    complex-concept assertions as (Concept, individual) pairs."""
    if logic == ALCQ:
        if extra:
            raise UnsupportedLogicError("complex assertions unsupported "
                                        "under ALCQ")
        return _check_consistency_alcq(a, o)
    ts = type_system(o, logic,
                     extra_concepts=tuple(c for c, _ in extra),
                     extra_names=tuple(n for n, _ in a.concept_assertions))
    if not a.individuals:
        if extra:
            raise InputError("complex assertion on an empty ABox")
        return bool(ts.survivors)
    return ts.abox_assignment(a, extra) is not None


def entails_ground(a, o, q, logic=ALCI):
    """Whether the ABox and ontology entail a variable-free conjunctive
    query."""
    disjuncts = q.disjuncts if isinstance(q, UCQ) else (q,)
    if len(disjuncts) != 1 or disjuncts[0].variables:
        raise InputError("ground entailment requires a single variable-free "
                         "conjunctive query")
    d = disjuncts[0]
    if not check_consistency(a, o, logic):
        return True
    for atom in d.role_atoms:
        if atom not in a.role_assertions:
            return False
    for n, x in d.concept_atoms:
        if check_consistency(a, o, logic, extra=[(Not(Name(n)), x)]):
            return False
    return True


def evaluate_query(i, q):
    """Whether some disjunct of the query has a strong homomorphism into i."""
    disjuncts = q.disjuncts if isinstance(q, UCQ) else (q,)
    for d in disjuncts:
        fixed = tuple(sorted((x, i.element_of(x)) for x in d.individuals))
        if homomorphisms(d, i, HomConstraints(fixed=fixed), want="first"):
            return True
    return False


# --- bounded entailment ---------------------------------------------------

@dataclass(frozen=True)
class EntailmentBounds:
    depth: int = 3
    max_elements: int = 40
    max_candidates: int = 50000
    finite_model_size: int = 0  # 0 disables the finite-model fallback
    finite_model_budget: int = 200000


@dataclass
class EntailmentAnswer:
    status: str  # "entailed" | "not-entailed" | "unknown"
    countermodel: Interpretation = None
    diagnostics: str = ""

    @property
    def entailed(self):
        return self.status == "entailed"


def _candidate_interpretation(a, types, ts, edges, declared):
    labels = set()
    for e, t in types.items():
        for atom in t:
            if atom[0] == "n":
                labels.add((atom[1], e))
    names = {(x, x) for x in a.individuals}
    return interp(set(types), labels, edges, names, declared)


def entails_ucq_bounded(a, o, q, logic, bounds=EntailmentBounds()):
    """Three-valued entailment of a union of conjunctive queries: searches
    tree-extended countermodels up to the depth bound (claiming entailment
    only when every candidate already satisfies the query) and optionally
    falls back to exhaustive finite-model search."""
    declared = signature_of(o) | signature_of(a) | signature_of(q)
    q_names = sorted(declared.concept_names)
    ts = type_system(o, logic, extra_names=tuple(q_names))
    if not a.individuals:
        raise InputError("bounded entailment requires a non-empty ABox")

    asserted = {x: set() for x in a.individuals}
    for n, x in a.concept_assertions:
        asserted[x].add(n)
    options = {x: ts.allowed_types(asserted[x], ())
               for x in sorted(a.individuals)}
    inds = sorted(a.individuals)

    state = {"count": 0, "capped": False, "inconclusive": False}

    query_roles = set()
    for d in (q.disjuncts if isinstance(q, UCQ) else (q,)):
        query_roles |= {r for r, _, _ in d.role_atoms}

    def prioritize(queue):
        # expanding an obligation whose role the query mentions tends to
        # complete a match and prune the branch, so handle those first;
        # the expansion order never changes the answer, only the effort
        return sorted(queue,
                      key=lambda item: 0 if item[1].role.name in query_roles
                      else 1)

    def assignments():
        for combo in product(*(options[x] for x in inds)):
            tau = dict(zip(inds, combo))
            if all(ts.edge_ok(tau[u], Role(r), tau[v])
                   for r, u, v in a.role_assertions):
                yield tau

    def witnessed(elem, e_atom, types, edges):
        for r, x, y in edges:
            if e_atom.role.inverted:
                if r == e_atom.role.name and y == elem and \
                        ts.holds(e_atom.arg, types[x]):
                    return True
            else:
                if r == e_atom.role.name and x == elem and \
                        ts.holds(e_atom.arg, types[y]):
                    return True
        return False

    def closure_model(types, edges, depth):
        """Discharge every pending obligation by linking into one realizer
        node per needed type; yields a genuine finite model."""
        types = dict(types)
        edges = set(edges)
        realizer = {}

        def realize(t):
            if t in realizer:
                return realizer[t]
            node = ("c", len(realizer))
            realizer[t] = node
            types[node] = t
            for e_atom in ts.exists_atoms:
                if ("e", e_atom) in t:
                    attach(node, t, e_atom)
            return node

        def attach(elem, t, e_atom):
            t2 = ts.survivor_witnesses(t, e_atom)[0]
            other = realize(t2)
            if e_atom.role.inverted:
                edges.add((e_atom.role.name, other, elem))
            else:
                edges.add((e_atom.role.name, elem, other))

        for elem, t in list(types.items()):
            for e_atom in ts.exists_atoms:
                if ("e", e_atom) in t and \
                        not witnessed(elem, e_atom, types, edges):
                    attach(elem, t, e_atom)
        return _candidate_interpretation(a, types, ts, edges, declared)

    def explore(types, edges, depths, queue, counter):
        """DFS over witness choices; returns a countermodel or None."""
        state["count"] += 1
        if state["count"] > bounds.max_candidates:
            state["capped"] = True
            return None
        # extensions only add elements, labels, and edges, so a query match
        # in the partial candidate persists in every completion of the branch
        partial = _candidate_interpretation(a, types, ts, edges, declared)
        if evaluate_query(partial, q):
            return None
        pending = []
        while queue:
            elem, e_atom = queue[0]
            if witnessed(elem, e_atom, types, edges):
                queue = queue[1:]
                continue
            if depths[elem] >= bounds.depth or \
                    len(types) >= bounds.max_elements:
                pending.append((elem, e_atom))
                queue = queue[1:]
                continue
            # branch over witness types for the first open obligation
            found_any = False
            for t2 in ts.survivor_witnesses(types[elem], e_atom):
                child = ("t", counter)
                new_types = dict(types)
                new_types[child] = t2
                new_edges = set(edges)
                if e_atom.role.inverted:
                    new_edges.add((e_atom.role.name, child, elem))
                else:
                    new_edges.add((e_atom.role.name, elem, child))
                new_depths = dict(depths)
                new_depths[child] = depths[elem] + 1
                new_queue = prioritize(queue[1:] + [
                    (child, e2) for e2 in ts.exists_atoms
                    if ("e", e2) in t2] + pending)
                cm = explore(new_types, new_edges, new_depths, new_queue,
                             counter + 1)
                if cm is not None:
                    return cm
                found_any = True
            if not found_any:
                # survival guarantees witnesses; defensive
                state["inconclusive"] = True
            return None
        # no expandable obligations left
        candidate = _candidate_interpretation(a, types, ts, edges, declared)
        if evaluate_query(candidate, q):
            return None
        if not pending:
            return candidate
        closed = closure_model(types, edges, depths)
        if not evaluate_query(closed, q):
            return closed
        state["inconclusive"] = True
        return None

    saw_assignment = False
    for tau in assignments():
        saw_assignment = True
        edges = set(a.role_assertions)
        depths = {x: 0 for x in inds}
        queue = prioritize([(x, e) for x in inds for e in ts.exists_atoms
                            if ("e", e) in tau[x]])
        cm = explore(dict(tau), edges, depths, queue, 0)
        if cm is not None:
            return EntailmentAnswer("not-entailed", cm)
        if state["capped"]:
            break
    if not saw_assignment:
        return EntailmentAnswer("entailed",
                                diagnostics="no consistent type assignment")
    if not state["capped"] and not state["inconclusive"]:
        return EntailmentAnswer("entailed")
    if bounds.finite_model_size:
        found, settled = find_finite_countermodel(
            a, o, q, logic, bounds.finite_model_size,
            bounds.finite_model_budget)
        if found is not None:
            return EntailmentAnswer("not-entailed", found)
    return EntailmentAnswer(
        "unknown", diagnostics="bounds exhausted: "
        + ("candidate cap" if state["capped"] else "blocked extensions "
           "satisfy the query"))


def find_finite_countermodel(a, o, q, logic, max_size, budget=200000):
    """Exhaustive search for a finite model of the ABox and ontology of at
    most max_size elements falsifying the query.  Returns (model-or-None,
    settled) where settled is False when the node budget ran out."""
    sig = signature_of(o) | signature_of(a) | signature_of(q)
    names = sorted(sig.concept_names)
    roles = sorted(sig.role_names)
    if logic == ALCQ:
        raise UnsupportedLogicError("finite-model search supports ALC/ALCI")
    inds = sorted(a.individuals)
    state = {"nodes": 0}

    for size in range(max(1, len(inds)), max_size + 1):
        elements = inds + [f"_{k}" for k in range(size - len(inds))]
        forced_labels = set(a.concept_assertions)
        forced_edges = set(a.role_assertions)
        free_label_slots = [(n, e) for e in elements for n in names
                            if (n, e) not in forced_labels]
        free_edge_slots = [(r, x, y) for r in roles for x in elements
                           for y in elements if (r, x, y) not in forced_edges]

        def attempt(label_bits, edge_bits):
            labels = forced_labels | {
                free_label_slots[i] for i in range(len(free_label_slots))
                if label_bits >> i & 1}
            edges = forced_edges | {
                free_edge_slots[i] for i in range(len(free_edge_slots))
                if edge_bits >> i & 1}
            i = interp(elements, labels, edges,
                       {(x, x) for x in inds}, declared=sig)
            if not is_model(i, o):
                return None
            if inds and not is_model(i, a):
                return None
            if evaluate_query(i, q):
                return None
            return i

        for label_bits in range(1 << len(free_label_slots)):
            for edge_bits in range(1 << len(free_edge_slots)):
                state["nodes"] += 1
                if state["nodes"] > budget:
                    return None, False
                found = attempt(label_bits, edge_bits)
                if found is not None:
                    return found, True
    return None, True
