"""Fitting for unions of conjunctive queries: bounded decision procedure,
variation-based obligation checking, finite-witness search, and ontology
synthesis from finite witnesses."""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, product

from .core import (
    ALC, ALCI, And, Bottom, BOTTOM_ONTOLOGY, CQ, Exists, InputError, Name,
    Not, Ontology, PARTITION_PREFIX, Role, Signature, Top, UCQ_MODE,
    abox_components, cq_components, preprocess_collection, signature_of,
    size_of,
)
from .flatfit import (
    FITTING_EXISTS, FitVerdict, NO_FITTING, NO_FITTING_WITHIN_BOUNDS,
    UNKNOWN, _big_or,
)
from .homs import (
    HomConstraints, NO_CONSTRAINTS, homomorphisms, reachable_set, target_view,
)
from .semantics import (
    Interpretation, TreeInterpretation, evaluate_query, interp,
    is_forest_model, is_model,
)


class BoundsExceeded(Exception):
    """A configured resource cap was hit; callers surface this as an
    unknown verdict."""


@dataclass(frozen=True)
class Bounds:
    depth_unit: int = 1
    degree: int = 2
    max_mosaics: int = 20000
    finite_witness_size: int = 3

    def __post_init__(self):
        if self.depth_unit < 1 or self.degree < 1:
            raise InputError("bounds must be positive")


DEGREE_CEILING = 10 ** 9


def degree_bound(e):
    """The branching degree that suffices for witness models: the negative
    total size plus, per positive example, (size+1)^(query size)."""
    total = sum(size_of(ex) for ex in e.negatives)
    for ex in e.positives:
        total += (size_of(ex) + 1) ** size_of(ex.query)
        if total > DEGREE_CEILING:
            return DEGREE_CEILING
    return total


# --- proper variations and the per-homomorphism obligation ----------------

def _canonical_variables(q):
    """Rename variables to v0, v1, ... in order of first occurrence in the
    sorted atom list, for duplicate elimination."""
    order = []
    for _, t in sorted(q.concept_atoms):
        if t in q.variables and t not in order:
            order.append(t)
    for _, t1, t2 in sorted(q.role_atoms):
        for t in (t1, t2):
            if t in q.variables and t not in order:
                order.append(t)
    ren = {v: f"v{i}" for i, v in enumerate(order)}

    def r(t):
        return ren.get(t, t)

    return CQ(frozenset((n, r(t)) for n, t in q.concept_atoms),
              frozenset((ro, r(t1), r(t2)) for ro, t1, t2 in q.role_atoms),
              frozenset(ren.values()))


def _variation_proper(p, a, logic):
    # ground role atoms must be asserted
    for ro, t1, t2 in p.role_atoms:
        if t1 not in p.variables and t2 not in p.variables:
            if (ro, t1, t2) not in a.role_assertions:
                return False
    # components of the non-ground role atoms must be trees embeddable into
    # unravelings hanging off a single individual
    anon_atoms = [(ro, t1, t2) for ro, t1, t2 in p.role_atoms
                  if t1 in p.variables or t2 in p.variables]
    if not anon_atoms:
        return True
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    nodes = {t for _, t1, t2 in anon_atoms for t in (t1, t2)}
    for t in nodes:
        parent[t] = t
    for _, t1, t2 in anon_atoms:
        r1, r2 = find(t1), find(t2)
        if r1 != r2:
            parent[r1] = r2
    comps = {}
    for atom in anon_atoms:
        comps.setdefault(find(atom[1]), []).append(atom)
    for atoms in comps.values():
        ts = {t for _, t1, t2 in atoms for t in (t1, t2)}
        inds = ts - p.variables
        if len(inds) > 1:
            return False
        # simple tree: #atoms = #nodes - 1 and no two atoms share a node pair
        pairs = {frozenset((t1, t2)) for _, t1, t2 in atoms}
        if len(atoms) != len(ts) - 1 or len(pairs) != len(atoms):
            return False
        if any(len(pr) == 1 for pr in pairs):
            return False
        if logic == ALC:
            # edges must form an arborescence rooted at the individual if
            # one is present, else at the unique source
            indeg = {t: 0 for t in ts}
            for _, _, t2 in atoms:
                indeg[t2] += 1
            roots = [t for t in ts if indeg[t] == 0]
            if len(roots) != 1 or any(v > 1 for v in indeg.values()):
                return False
            if inds and roots[0] not in inds:
                return False
    return True


def enumerate_proper_variations(p, a, logic):
    """All substitution instances of the query p (variables replaced by
    individuals of the ABox or identified with each other) that can match
    inside some forest model of the ABox."""
    variables = sorted(p.variables)
    inds = sorted(a.individuals)
    targets = inds + variables
    out = []
    seen = set()
    for combo in product(targets, repeat=len(variables)):
        sub = dict(zip(variables, combo))
        # map each variable through its substitution chain to a fixpoint
        def resolve(t):
            path = []
            while t in sub and sub[t] != t and t not in path:
                path.append(t)
                t = sub[t]
            return t

        ren = {v: resolve(v) for v in variables}
        new_vars = {ren[v] for v in variables if ren[v] in p.variables}
        try:
            q2 = CQ(frozenset((n, ren.get(t, t)) for n, t in p.concept_atoms),
                    frozenset((ro, ren.get(t1, t1), ren.get(t2, t2))
                              for ro, t1, t2 in p.role_atoms),
                    frozenset(new_vars))
        except InputError:
            continue
        q2 = _canonical_variables(q2)
        if q2 in seen:
            continue
        seen.add(q2)
        if _variation_proper(q2, a, logic):
            out.append(q2)
    return sorted(out, key=repr)


def _variation_pool(e, logic):
    pool = []
    for d in e.query.disjuncts:
        pool.extend(enumerate_proper_variations(d, e.abox, logic))
    return pool


def obligation_holds(piece, e, h, logic, variations=None):
    """The per-homomorphism conclusion: given a homomorphism h from (part of)
    the positive example's ABox into the piece, some proper variation of a
    query disjunct must match the piece compatibly with h — agreeing with h
    on individuals and keeping variable images reachable from h's range."""
    hmap = h.as_dict() if hasattr(h, "as_dict") else dict(h)
    if variations is None:
        variations = _variation_pool(e, logic)
    anchors = frozenset(hmap.values())
    for p in variations:
        fixed = tuple(sorted((t, hmap[t]) for t in p.individuals
                             if t in hmap))
        if len(fixed) < len(p.individuals):
            continue  # not locally checkable against this homomorphism
        constraints = HomConstraints(
            fixed=fixed, reachability_anchors=(anchors, logic))
        if homomorphisms(p, piece, constraints, want="first"):
            return True
    return False


def _as_interpretation(piece):
    if isinstance(piece, TreeInterpretation):
        out = piece.to_interpretation()
        object.__setattr__(out, "depths", piece.depths)
        return out
    if isinstance(piece, BaseCandidate):
        return piece.combined
    return piece


def check_condition_b_local(piece, e, window, logic, chosen=None):
    """Whether every homomorphism from the chosen ABox component into the
    piece (range within the given depth window, if any) satisfies the
    variation obligation."""
    target = _as_interpretation(piece)
    source = chosen if chosen is not None else e.abox
    constraints = NO_CONSTRAINTS
    if window is not None:
        constraints = HomConstraints(depth_window=window)
    variations = _variation_pool(e, logic)
    for h in homomorphisms(source, target, constraints):
        if not obligation_holds(target, e, h, logic, variations):
            return False
    return True


# --- choice functions, avoid sets, mosaics --------------------------------

@dataclass(frozen=True)
class ChoiceFns:
    """Per positive example, a chosen component of its ABox; per negative
    example and query disjunct, a chosen component of that disjunct."""

    pos_component: tuple  # one ABox per positive example
    neg_component: tuple  # per negative: tuple of CQ, one per disjunct


@dataclass(frozen=True)
class AvoidSet:
    aboxes: frozenset  # of ABox components of positive examples


def all_choice_functions(e):
    pos_opts = [abox_components(ex.abox) or [ex.abox] for ex in e.positives]
    neg_opts = []
    for ex in e.negatives:
        per_disjunct = [cq_components(d) or [d] for d in ex.query.disjuncts]
        neg_opts.append([tuple(c) for c in product(*per_disjunct)])
    for pos in product(*pos_opts):
        for neg in product(*neg_opts):
            yield ChoiceFns(tuple(pos), tuple(neg))


def all_avoid_sets(e):
    comps = []
    for ex in e.positives:
        for c in abox_components(ex.abox):
            if c not in comps:
                comps.append(c)
    comps.sort(key=repr)
    for size in range(len(comps) + 1):
        from itertools import combinations
        for combo in combinations(comps, size):
            yield AvoidSet(frozenset(combo))


def enabled(ex, avoid):
    return not any(c in avoid.aboxes for c in abox_components(ex.abox))


@dataclass(frozen=True)
class Mosaic:
    tree: TreeInterpretation
    owner: int  # index of the negative example the mosaic belongs to


def _steps(sig, logic):
    steps = [(r, False) for r in sorted(sig.role_names)]
    if logic == ALCI:
        steps += [(r, True) for r in sorted(sig.role_names)]
    return steps


def _label_sets(names):
    names = sorted(names)
    out = []
    for k in range(len(names) + 1):
        from itertools import combinations
        for c in combinations(names, k):
            out.append(frozenset(c))
    return out


def enumerate_tree_shapes(names, steps, max_depth, max_degree, cap=None,
                          _count=None):
    """All tree shapes (label-set, sorted child tuple) up to the depth and
    degree bounds, small ones first."""
    labels = _label_sets(names)
    memo = {}

    def shapes(depth):
        if depth in memo:
            return memo[depth]
        if depth == 0:
            out = [(lab, ()) for lab in labels]
        else:
            child_pool = [(s, sh) for s in steps for sh in shapes(depth - 1)]
            out = []
            for lab in labels:
                for k in range(max_degree + 1):
                    for kids in combinations_with_replacement(
                            sorted(child_pool, key=repr), k):
                        out.append((lab, tuple(kids)))
                        if cap is not None and len(out) > cap:
                            raise BoundsExceeded(
                                f"more than {cap} tree shapes")
            # drop shallow duplicates introduced by the depth recursion
            out = sorted(set(out), key=lambda s: (_shape_size(s), repr(s)))
        memo[depth] = out
        return out

    return shapes(max_depth)


def _shape_size(shape):
    lab, kids = shape
    return 1 + sum(_shape_size(sh) for _, sh in kids)


def shape_to_tree(shape):
    labels = set()
    edges = set()

    def build(word, sh):
        lab, kids = sh
        labels.update((word, n) for n in lab)
        for i, ((rname, up), sub) in enumerate(kids, start=1):
            child = word + (i,)
            edges.add((child, rname, up))
            build(child, sub)

    build((), shape)
    return TreeInterpretation(frozenset(labels), frozenset(edges))


def tree_shape(t, root=()):
    """The canonical shape of the subtree of t below the given word,
    optionally truncated: see subtree_shape."""
    return subtree_shape(t, root, None)


def subtree_shape(t, root, keep_depth):
    def build(word, left):
        kids = []
        for c in t.children(word):
            if left == 0:
                continue
            rname, up = t.edge_at(c)
            kids.append(((rname, up),
                         build(c, None if left is None else left - 1)))
        return (t.labels_at(word), tuple(sorted(kids, key=repr)))

    return build(root, keep_depth)


def _matches_component(piece, comp):
    """Whether a chosen query component matches the piece; components that
    mention individuals cannot match pieces without anchored names."""
    target = _as_interpretation(piece)
    names = getattr(target, "name_map", {})
    fixed = []
    for t in comp.individuals:
        if t not in names:
            return False
        fixed.append((t, names[t]))
    return bool(homomorphisms(comp, target,
                              HomConstraints(fixed=tuple(sorted(fixed))),
                              want="first"))


def enumerate_mosaics(e, ch, avoid, neg_index, b):
    """All bounded trees that locally avoid the chosen negative-query
    components and the avoided ABoxes while honoring every positive
    obligation inside the middle depth window."""
    sig = signature_of(e)
    steps = _steps(sig, e.logic)
    shapes = enumerate_tree_shapes(sig.concept_names, steps,
                                   3 * b.depth_unit, b.degree,
                                   cap=b.max_mosaics)
    neg = e.negatives[neg_index]
    comps = ch.neg_component[neg_index]
    window = (b.depth_unit, 2 * b.depth_unit)
    out = []
    for shape in shapes:
        tree = shape_to_tree(shape)
        piece = _as_interpretation(tree)
        if any(_matches_component(piece, c) for c in comps):
            continue
        if any(homomorphisms(a, piece, want="first") for a in avoid.aboxes):
            continue
        ok = True
        for i, pos in enumerate(e.positives):
            if not enabled(pos, avoid):
                continue
            if not check_condition_b_local(piece, pos, window, e.logic,
                                           chosen=ch.pos_component[i]):
                ok = False
                break
        if ok:
            out.append(Mosaic(tree, neg_index))
        if len(out) > b.max_mosaics:
            raise BoundsExceeded(f"more than {b.max_mosaics} mosaics")
    return out


def glues_to(m, d, host, depth_unit=1):
    """Whether the host's subtree below d equals the mosaic with its deepest
    layer (depth exactly 3*depth_unit) removed."""
    tree = m.tree if isinstance(m, Mosaic) else m
    truncated = subtree_shape(tree, (), 3 * depth_unit - 1)
    if isinstance(host, Mosaic):
        host = host.tree
    if isinstance(host, TreeInterpretation):
        if d not in host.words:
            raise InputError(f"element {d} not in the host tree")
        return subtree_shape(host, d, None) == truncated
    # interpretation host with word-structured elements (individual, word)
    return _interp_subtree_shape(host, d) == truncated


def _interp_subtree_shape(i, d):
    labels = {}
    for n, e in i.labels:
        labels.setdefault(e, set()).add(n)
    kids = {}
    for r, x, y in i.edges:
        for parent, child, up in ((x, y, False), (y, x, True)):
            if isinstance(child, tuple) and len(child) == 2 and \
                    isinstance(parent, tuple) and len(parent) == 2 and \
                    child[0] == parent[0] and \
                    child[1][:-1] == parent[1]:
                kids.setdefault(parent, set()).add((child, r, up))

    def build(e):
        out = []
        for child, r, up in kids.get(e, ()):
            out.append(((r, up), build(child)))
        return (frozenset(labels.get(e, ())), tuple(sorted(out, key=repr)))

    return build(d)


def eliminate_mosaics(s0, depth_unit=1):
    """The greatest subset in which every mosaic's root successors can each
    be continued by another member of the subset."""
    current = sorted(set(s0), key=repr)
    while True:
        keep = []
        for m in current:
            ok = True
            for c in m.tree.children(()):
                if not any(glues_to(m2, c, m.tree, depth_unit)
                           for m2 in current):
                    ok = False
                    break
            if ok:
                keep.append(m)
        if len(keep) == len(current):
            return set(keep)
        current = keep


# --- base candidates -------------------------------------------------------

@dataclass(frozen=True)
class BaseCandidate:
    parts: tuple  # one Interpretation per negative example

    @property
    def combined(self):
        domain, labels, edges, names = set(), set(), set(), set()
        for p in self.parts:
            domain |= p.domain
            labels |= p.labels
            edges |= p.edges
            names |= p.names
        out = Interpretation(frozenset(domain), frozenset(labels),
                             frozenset(edges), frozenset(names))
        depths = {}
        for p in self.parts:
            d = getattr(p, "depths", None)
            if d:
                depths.update(d)
        if depths:
            object.__setattr__(out, "depths", depths)
        return out


@dataclass(frozen=True)
class RegularWitness:
    base: BaseCandidate
    assignment: tuple  # of (element, Mosaic) for required depth-1 nodes

    def dump(self):
        lines = []
        for k, part in enumerate(self.base.parts):
            lines.append(f"part {k}:")
            for n, e in sorted(part.labels, key=repr):
                lines.append(f"  {n}({e})")
            for r, x, y in sorted(part.edges, key=repr):
                lines.append(f"  {r}({x}, {y})")
        lines.append("assignment:")
        for e, m in sorted(self.assignment, key=repr):
            lines.append(f"  {e} <- mosaic {tree_shape(m.tree)!r}")
        return "\n".join(lines)


def _anon_root(neg_index):
    return f"__root{neg_index}"


def _forest_parts(ex, neg_index, sig, logic, b):
    """All bounded forest models of one negative example's ABox, smallest
    first, under the word naming convention (elements (individual, word))."""
    steps = _steps(sig, logic)
    shapes = enumerate_tree_shapes(sig.concept_names, steps,
                                   3 * b.depth_unit - 1, b.degree,
                                   cap=b.max_mosaics)
    shape_pool = sorted([(s, sh) for s in steps for sh in shapes], key=repr)
    inds = sorted(ex.abox.individuals) or [_anon_root(neg_index)]
    asserted = {a: frozenset(n for n, x in ex.abox.concept_assertions
                             if x == a) for a in inds}
    label_opts = {a: [ls | asserted[a] for ls in
                      sorted({f for f in _label_sets(sig.concept_names)},
                             key=lambda f: (len(f), sorted(f)))]
                  for a in inds}
    for a in inds:
        # dedupe label sets that collapse onto the asserted ones
        seen, opts = set(), []
        for ls in label_opts[a]:
            if ls not in seen:
                seen.add(ls)
                opts.append(ls)
        label_opts[a] = opts

    attach_opts = []
    for k in range(b.degree + 1):
        attach_opts.extend(combinations_with_replacement(shape_pool, k))

    per_ind = [[(lab, att) for att in attach_opts for lab in label_opts[a]]
               for a in inds]
    per_ind = [sorted(opts, key=lambda o: (sum(_shape_size(sh)
                                               for _, sh in o[1]),
                                           len(o[0]), repr(o)))
               for opts in per_ind]
    for combo in product(*per_ind):
        domain = {(a, ()) for a in inds}
        labels = set()
        edges = {(r, (x, ()), (y, ())) for r, x, y in ex.abox.role_assertions}
        for a, (lab, att) in zip(inds, combo):
            labels |= {(n, (a, ())) for n in lab}
            for i, ((rname, up), sh) in enumerate(att, start=1):
                tree = shape_to_tree(sh)
                prefix = (i,)
                for w in tree.words:
                    domain.add((a, prefix + w))
                labels |= {(n, (a, prefix + w)) for w, n in tree.node_labels}
                root = (a, prefix)
                top = (a, ())
                edges.add((rname, root, top) if up else (rname, top, root))
                for w, r2, up2 in tree.node_edges:
                    parent, child = (a, prefix + w[:-1]), (a, prefix + w)
                    edges.add((r2, child, parent) if up2
                              else (r2, parent, child))
        part = interp(domain, labels, edges,
                      {(a, (a, ())) for a in inds if a in ex.abox.individuals})
        depths = {e: len(e[1]) for e in domain}
        object.__setattr__(part, "depths", depths)
        yield part


def enumerate_base_candidates(e, ch, avoid, b):
    """All bounded gluings of per-negative forest models that avoid the
    chosen negative components, admit no avoided ABox, and honor the positive
    obligations up to the middle depth."""
    sig = signature_of(e)
    window = (0, 2 * b.depth_unit)
    part_gens = [list(_forest_parts(ex, k, sig, e.logic, b))
                 for k, ex in enumerate(e.negatives)]
    for parts in product(*part_gens):
        ok = True
        for k, part in enumerate(parts):
            if any(_matches_component(part, c)
                   for c in ch.neg_component[k]):
                ok = False
                break
        if not ok:
            continue
        candidate = BaseCandidate(tuple(parts))
        j = candidate.combined
        if any(homomorphisms(a, j, want="first") for a in avoid.aboxes):
            continue
        for i, pos in enumerate(e.positives):
            if not enabled(pos, avoid):
                continue
            if not check_condition_b_local(j, pos, window, e.logic,
                                           chosen=ch.pos_component[i]):
                ok = False
                break
        if ok:
            yield candidate


# --- finite witnesses -------------------------------------------------------

@dataclass(frozen=True)
class WitnessParts:
    """A finite witness: one interpretation per negative example, together
    with the (preprocessed) collection the parts anchor."""

    parts: tuple
    collection: object

    @property
    def combined(self):
        domain, labels, edges, names = set(), set(), set(), set()
        for p in self.parts:
            if p.domain & domain:
                raise InputError("witness parts must be disjoint")
            domain |= p.domain
            labels |= p.labels
            edges |= p.edges
            names |= p.names
        sig = signature_of(self.collection)
        for p in self.parts:
            sig = sig | Signature(frozenset(n for n, _ in p.labels),
                                  frozenset(r for r, _, _ in p.edges))
        return Interpretation(frozenset(domain), frozenset(labels),
                              frozenset(edges), frozenset(names), sig)


def check_finite_witness(w, e, logic):
    """Whether the partitioned finite interpretation certifies a fitting:
    each part is a forest model of its negative example falsifying every
    negative query, and every homomorphism from a positive ABox into the
    whole satisfies the variation obligation."""
    parts = w.parts if isinstance(w, WitnessParts) else tuple(w)
    if len(parts) != len(e.negatives):
        raise InputError("expected one witness part per negative example")
    combined = (w if isinstance(w, WitnessParts)
                else WitnessParts(parts, e)).combined
    for part, neg in zip(parts, e.negatives):
        if neg.abox.individuals:
            if not is_model(part, neg.abox):
                return False
        if not is_forest_model(part, neg.abox, logic):
            return False
    for neg in e.negatives:
        if evaluate_query(combined, neg.query):
            return False
    for pos in e.positives:
        variations = _variation_pool(pos, logic)
        for h in homomorphisms(pos.abox, combined):
            if not obligation_holds(combined, pos, h, logic, variations):
                return False
    return True


def _distinct_neighbors(edges, x):
    out = set()
    for r, a, b in edges:
        if a == x:
            out.add(b)
        if b == x:
            out.add(a)
    return out


def search_finite_witness(e, logic, b):
    """Bounded search for a finite witness: grow the negatives' ABoxes by
    repairing violated positive obligations, pruning anything that matches a
    negative query or breaks the forest shape."""
    if e.mode != UCQ_MODE:
        raise InputError("finite-witness search applies to ucq mode")
    e = preprocess_collection(e)
    if not e.negatives:
        return None
    part_of = {}
    init_parts = []
    for k, neg in enumerate(e.negatives):
        inds = sorted(neg.abox.individuals) or [_anon_root(k)]
        for a in inds:
            part_of[a] = k
        init_parts.append((
            frozenset(inds),
            frozenset(neg.abox.concept_assertions),
            frozenset(neg.abox.role_assertions)))
    variations = {i: _variation_pool(pos, logic)
                  for i, pos in enumerate(e.positives)}

    def to_interp(state):
        domain, labels, edges, names = set(), set(), set(), set()
        for dom, lab, edg in state:
            domain |= dom
            labels |= lab
            edges |= edg
            names |= {(x, x) for x in dom}
        return interp(domain, labels, edges, names)

    def violated(state):
        j = to_interp(state)
        for i, pos in enumerate(e.positives):
            for h in homomorphisms(pos.abox, j):
                if not obligation_holds(j, pos, h, logic, variations[i]):
                    return (i, h, j)
        return None

    def part_ok(state, k):
        dom, lab, edg = state[k]
        part = interp(dom, lab, edg,
                      {(x, x) for x in dom
                       if x in e.negatives[k].abox.individuals} or
                      {(x, x) for x in dom})
        return is_forest_model(part, e.negatives[k].abox, logic)

    def negatives_safe(j):
        return not any(evaluate_query(j, neg.query) for neg in e.negatives)

    def repairs(state, i, h, j):
        """All one-step extensions making the (i, h) obligation true."""
        pos = e.positives[i]
        hmap = h.as_dict()
        anchors = sorted(set(hmap.values()), key=repr)
        all_elems = sorted({x for dom, _, _ in state for x in dom}, key=repr)
        out = []
        for p in variations[i]:
            vs = sorted(p.variables)
            fixed = {t: hmap[t] for t in p.individuals}
            reach = set()
            for a in anchors:
                reach |= reachable_set(j, a, logic)
            # variables map to existing elements or fresh ones
            options = []
            for v in vs:
                opts = list(all_elems) + [("fresh", v)]
                options.append(opts)
            for combo in product(*options):
                g = dict(fixed)
                fresh_count = {}
                for v, tgt in zip(vs, combo):
                    if isinstance(tgt, tuple) and tgt[0] == "fresh":
                        g[v] = ("fresh", v)
                    else:
                        g[v] = tgt
                out.append((p, g))
        return out

    def apply_repair(state, p, g, anchor_part):
        """Materialize a variation match; returns the new state or None."""
        new = [list(part) for part in state]
        # decide the owning part of every term
        owner = {}
        for t, tgt in g.items():
            if not (isinstance(tgt, tuple) and tgt[0] == "fresh"):
                k = _element_part(tgt)
                if k is None:
                    return None
                owner[t] = k
        # components must live inside a single part; propagate ownership
        changed = True
        adj = {}
        for _, t1, t2 in p.role_atoms:
            adj.setdefault(t1, set()).add(t2)
            adj.setdefault(t2, set()).add(t1)
        while changed:
            changed = False
            for t1, ns in adj.items():
                for t2 in ns:
                    if t1 in owner and t2 not in owner:
                        owner[t2] = owner[t1]
                        changed = True
                    elif t1 in owner and t2 in owner and \
                            owner[t1] != owner[t2]:
                        return None
        for t in g:
            if t not in owner:
                owner[t] = anchor_part
        # allocate fresh elements
        counter = [0]

        def mat(t):
            tgt = g[t]
            if isinstance(tgt, tuple) and tgt[0] == "fresh":
                k = owner[t]
                name = f"__w{k}_{len(new[k][0])}_{counter[0]}"
                counter[0] += 1
                new[k] = [new[k][0] | {name}, new[k][1], new[k][2]]
                if len(new[k][0]) > b.finite_witness_size:
                    raise BoundsExceeded("witness part size")
                g[t] = name
            return g[t]

        try:
            for n, t in sorted(p.concept_atoms):
                x = mat(t)
                k = owner.get(t, _element_part(x))
                new[k] = [new[k][0], new[k][1] | {(n, x)}, new[k][2]]
            for r, t1, t2 in sorted(p.role_atoms):
                x, y = mat(t1), mat(t2)
                k1 = owner.get(t1, _element_part(x))
                k2 = owner.get(t2, _element_part(y))
                if k1 != k2:
                    return None
                new[k1] = [new[k1][0], new[k1][1],
                           new[k1][2] | {(r, x, y)}]
        except BoundsExceeded:
            return None
        result = tuple((frozenset(d), frozenset(l), frozenset(ed))
                       for d, l, ed in new)
        # degree bound
        for dom, _, edg in result:
            for x in dom:
                if len(_distinct_neighbors(edg, x)) > b.degree:
                    return None
        return result

    element_part_cache = {}

    def _element_part(x):
        if x in element_part_cache:
            return element_part_cache[x]
        if x in part_of:
            element_part_cache[x] = part_of[x]
            return part_of[x]
        if isinstance(x, str) and x.startswith("__w"):
            k = int(x[3:].split("_")[0])
            element_part_cache[x] = k
            return k
        return None

    initial = tuple(init_parts)
    j0 = to_interp(initial)
    if not negatives_safe(j0):
        return None
    visited = set()
    stack = [initial]
    while stack:
        state = stack.pop()
        if state in visited:
            continue
        visited.add(state)
        if len(visited) > 20000:
            raise BoundsExceeded("finite-witness search state cap")
        bad = violated(state)
        if bad is None:
            parts = []
            for k, (dom, lab, edg) in enumerate(state):
                names = {(x, x) for x in dom}
                parts.append(interp(dom, lab, edg, names))
            w = WitnessParts(tuple(parts), e)
            if check_finite_witness(w, e, logic):
                return w
            continue
        i, h, j = bad
        pos = e.positives[i]
        anchor = _element_part(sorted(h.as_dict().values(), key=repr)[0])
        if anchor is None:
            anchor = 0
        next_states = []
        for p, g in repairs(state, i, h, j):
            ns = apply_repair(state, p, dict(g), anchor)
            if ns is None or ns == state:
                continue
            if not all(part_ok(ns, k) for k in range(len(e.negatives))):
                continue
            if not negatives_safe(to_interp(ns)):
                continue
            if ns not in visited:
                next_states.append(ns)
        # deterministic order, smaller states first
        next_states.sort(key=lambda s: (sum(len(d) + len(l) + len(ed)
                                            for d, l, ed in s), repr(s)))
        stack.extend(reversed(next_states))
    return None


def synthesize_vd_ontology(w, logic, e=None, verified=False):
    """An ontology forcing every model to collapse onto the finite witness:
    one fresh name per witness element, a covering disjoint partition, exact
    labels, and exact (non-)edges, over inverse roles too when available."""
    if isinstance(w, WitnessParts):
        if e is None:
            e = w.collection
        j = w.combined
    else:
        j = w
    if not verified:
        if e is None or not isinstance(w, WitnessParts):
            raise InputError("refusing to synthesize from an unverified "
                             "witness")
        if not check_finite_witness(w, e, logic):
            raise InputError("witness failed verification")
    elems = sorted(j.domain, key=repr)
    v = {d: Name(f"{PARTITION_PREFIX}{k}") for k, d in enumerate(elems)}
    axioms = {(Top(), _big_or([v[d] for d in elems]))}
    for i, d in enumerate(elems):
        for d2 in elems[i + 1:]:
            axioms.add((And(v[d], v[d2]), Bottom()))
    concept_names = sorted(j.concept_ext)
    role_names = sorted(j.role_ext)
    if e is not None:
        sig = signature_of(e)
        concept_names = sorted(set(concept_names) | sig.concept_names)
        role_names = sorted(set(role_names) | sig.role_names)
    for d in elems:
        for n in concept_names:
            if d in j.concept_ext.get(n, frozenset()):
                axioms.add((v[d], Name(n)))
            else:
                axioms.add((v[d], Not(Name(n))))
        roles = [Role(r) for r in role_names]
        if logic == ALCI:
            roles += [Role(r, True) for r in role_names]
        for role in roles:
            pairs = j.role_pairs(role)
            for d2 in elems:
                if (d, d2) in pairs:
                    axioms.add((v[d], Exists(role, v[d2])))
                else:
                    axioms.add((v[d], Not(Exists(role, v[d2]))))
    out_logic = ALC if logic == ALC else ALCI
    o = Ontology(out_logic, frozenset(axioms))
    # sanity: the witness extended with singleton partitions models the output
    check = Interpretation(
        j.domain,
        j.labels | frozenset((v[d].name, d) for d in elems),
        j.edges, j.names)
    if not is_model(check, o):
        raise InputError("internal error: witness does not model its own "
                         "ontology")
    return o


# --- the bounded decision procedure ----------------------------------------

def _universal_completion(core, sig, logic):
    """The core plus one maximally permissive anonymous element."""
    u = ("__u",)
    domain = set(core.domain) | {u}
    labels = set(core.labels) | {(n, u) for n in sig.concept_names}
    edges = set(core.edges)
    for r in sig.role_names:
        edges.add((r, u, u))
        for x in core.domain:
            edges.add((r, x, u))
            if logic == ALCI:
                edges.add((r, u, x))
    return interp(domain, labels, edges, set(core.names))


def decide_ucq_fitting(e, b=None):
    """Bounded fitting decision for unions of conjunctive queries: a
    complete pruning pass over all labelings of the negatives' individuals,
    then a bounded finite-witness search.  Fitting-exists answers always
    carry a verified witness and its ontology; impossibility is reported
    relative to the bounds unless they reach the known sufficient ones."""
    if e.mode != UCQ_MODE:
        raise InputError("decide_ucq_fitting requires ucq mode")
    if not e.negatives:
        return FitVerdict(FITTING_EXISTS, ontology=BOTTOM_ONTOLOGY)
    e = preprocess_collection(e)
    if b is None:
        b = Bounds()
    sig = signature_of(e)
    at_full_bounds = (b.depth_unit >= size_of(e)
                      and b.degree >= degree_bound(e))

    # phase 1: prune labelings of the negatives' individuals that cannot be
    # completed to any witness, however large
    inds = []
    asserted = {}
    base_edges = set()
    for k, neg in enumerate(e.negatives):
        part = sorted(neg.abox.individuals) or [_anon_root(k)]
        inds.extend(part)
        for a in part:
            asserted[a] = frozenset(
                n for n, x in neg.abox.concept_assertions if x == a)
        base_edges |= neg.abox.role_assertions
    free = sorted(sig.concept_names)
    slots = [(a, n) for a in inds for n in free]
    optional = [(a, n) for a, n in slots if n not in asserted[a]]
    if 2 ** len(optional) > b.max_mosaics:
        return FitVerdict(UNKNOWN, diagnostics="too many core labelings "
                          "for the configured cap")
    variations = {i: _variation_pool(pos, e.logic)
                  for i, pos in enumerate(e.positives)}
    survivor = None
    for bits in range(2 ** len(optional)):
        labels = {(n, a) for a in inds for n in asserted[a]}
        labels |= {(n, a) for i, (a, n) in enumerate(optional)
                   if bits >> i & 1}
        core = interp(inds, labels, base_edges, {(a, a) for a in inds})
        if any(evaluate_query(core, neg.query) for neg in e.negatives):
            continue
        jinf = _universal_completion(core, sig, e.logic)
        pruned = False
        for i, pos in enumerate(e.positives):
            for h in homomorphisms(pos.abox, core):
                if not obligation_holds(jinf, pos, h, e.logic,
                                        variations[i]):
                    pruned = True
                    break
            if pruned:
                break
        if not pruned:
            survivor = core
            break
    if survivor is None:
        outcome = NO_FITTING if at_full_bounds else NO_FITTING_WITHIN_BOUNDS
        return FitVerdict(outcome, diagnostics="every labeling of the "
                          "negative individuals is refuted")

    # phase 2: bounded witness search
    try:
        w = search_finite_witness(e, e.logic, b)
    except BoundsExceeded as exc:
        return FitVerdict(UNKNOWN, diagnostics=str(exc))
    if w is not None:
        o = synthesize_vd_ontology(w, e.logic, e=w.collection)
        return FitVerdict(FITTING_EXISTS, ontology=o, certificate=w)
    return FitVerdict(UNKNOWN, diagnostics="no finite witness within the "
                      "size bound; larger or infinite witnesses not ruled "
                      "out")
