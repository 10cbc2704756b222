"""Integer homology and fundamental groups of the built complexes.

Everything runs on the order complex of the cell poset (the barycentric
subdivision of a regular complex), so no incidence numbers of polytope
faces are needed.
"""

from collections import deque
from itertools import combinations

from ._kernels import smith_form
from .cells import check_regularity


class IrregularComplex(RuntimeError):
    """The poset failed the regularity check; it is not subdivided."""

    def __init__(self, report):
        super().__init__(f"complex is not regular: {report.failures[:3]}")
        self.report = report


class DisconnectedComplex(ValueError):
    def __init__(self, components):
        super().__init__(f"complex has {len(components)} components: {components}")
        self.components = components


class SimplicialComplex:
    """Abstract simplicial complex stored by dimension.

    Simplices are sorted tuples of vertices; ``order`` fixes the vertex
    order used for orientations.
    """

    def __init__(self, facets, order=None):
        simplices = set()
        for f in facets:
            f = tuple(f)
            for k in range(1, len(f) + 1):
                simplices.update(combinations(f, k))
        verts = sorted({v for s in simplices for v in s}, key=order)
        self.rank = {v: n for n, v in enumerate(verts)}
        self.vertices = verts
        dims = {}
        for s in simplices:
            s = tuple(sorted(set(s), key=self.rank.__getitem__))
            dims.setdefault(len(s) - 1, set()).add(s)
        self.dim = max(dims, default=-1)
        self.simplices = [sorted(dims.get(k, ()), key=lambda s: [self.rank[v] for v in s])
                          for k in range(self.dim + 1)]

    def __len__(self):
        return sum(len(s) for s in self.simplices)

    def f_vector(self):
        return [len(s) for s in self.simplices]

    def euler_characteristic(self):
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def relabeled(self, mapping):
        """Same complex with vertices renamed (orientation order follows the
        new names)."""
        facets = [tuple(mapping[v] for v in s) for ss in self.simplices for s in ss]
        return SimplicialComplex(facets)

    def boundary_matrix(self, k):
        """Matrix of the boundary map from k-chains to (k-1)-chains."""
        if k <= 0 or k > self.dim:
            rows = len(self.simplices[k - 1]) if 0 < k <= self.dim + 1 else 0
            cols = len(self.simplices[k]) if 0 <= k <= self.dim else 0
            return [[0] * cols for _ in range(rows)]
        rows = {s: n for n, s in enumerate(self.simplices[k - 1])}
        mat = [[0] * len(self.simplices[k]) for _ in rows]
        for j, s in enumerate(self.simplices[k]):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                mat[rows[face]][j] += (-1) ** i
        return mat

    def components(self):
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in (self.simplices[1] if self.dim >= 1 else []):
            parent[find(e[0])] = find(e[1])
        groups = {}
        for v in self.vertices:
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values(), key=lambda g: self.rank[g[0]])


def order_complex(cx, check=True):
    """Chains of the cell poset as a simplicial complex on cell ids.

    Vertices are ordered by ``(dim, id)`` so every simplex lists a chain
    from its lowest cell upwards.
    """
    if check:
        rep = check_regularity(cx)
        if not rep.ok:
            raise IrregularComplex(rep)
    above = {c.id: [] for c in cx.cells}
    for a, b in cx.boundary:
        above[a].append(b)
    chains = []

    def extend(chain):
        chains.append(tuple(chain))
        for nxt in above[chain[-1]]:
            extend(chain + [nxt])

    for c in cx.cells:
        extend([c.id])
    dims = {c.id: (c.dim, c.id) for c in cx.cells}
    return SimplicialComplex(chains, order=dims.__getitem__)


def rank_of(mat):
    if not mat or not mat[0]:
        return 0
    S, _, _ = smith_form(mat, transforms=False)
    return sum(1 for i in range(min(len(S), len(S[0]))) if S[i][i])


def homology(sc):
    """Integer homology as ``[(betti, torsion list), ...]`` by degree."""
    out = []
    diag = {}
    for k in range(1, sc.dim + 1):
        mat = sc.boundary_matrix(k)
        if mat and mat[0]:
            S, _, _ = smith_form(mat, transforms=False)
            diag[k] = [S[i][i] for i in range(min(len(S), len(S[0]))) if S[i][i]]
        else:
            diag[k] = []
    for k in range(sc.dim + 1):
        n_k = len(sc.simplices[k])
        rank_out = len(diag.get(k, []))
        into = diag.get(k + 1, [])
        betti = n_k - rank_out - len(into)
        torsion = [d for d in into if d > 1]
        out.append((betti, torsion))
    return out


def _euler_from_homology(h):
    return sum((-1) ** k * b for k, (b, _) in enumerate(h))


# ---------------------------------------------------------------------------
# group presentations
# ---------------------------------------------------------------------------


def free_reduce(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word):
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def inverse(word):
    return tuple(-x for x in reversed(word))


def _canonical_relator(word):
    # least rotation of the word or its inverse; relators are cyclic
    w = cyclic_reduce(word)
    if not w:
        return w
    options = []
    for cand in (w, inverse(w)):
        for k in range(len(cand)):
            options.append(cand[k:] + cand[:k])
    return min(options, key=lambda t: (len(t), [(abs(x), x < 0) for x in t]))


class GroupPresentation:
    """Generators ``1..n`` (names kept separately); relators are tuples of
    non-zero ints, ``-g`` the inverse of ``g``."""

    def __init__(self, generators, relators):
        self.generators = list(generators)
        self.relators = [tuple(r) for r in relators]
        n = len(self.generators)
        for r in self.relators:
            for x in r:
                if not 1 <= abs(x) <= n:
                    raise ValueError(f"relator {r} uses undeclared generator {abs(x)}")

    def __repr__(self):
        return f"GroupPresentation({len(self.generators)} generators, {len(self.relators)} relators)"

    @property
    def is_trivial(self):
        return not self.generators

    def to_json(self):
        return {"generators": [str(g) for g in self.generators],
                "relators": [list(r) for r in self.relators]}

    def abelianization(self):
        """``(free rank, torsion)`` from the exponent-sum matrix."""
        n = len(self.generators)
        rows = []
        for r in self.relators:
            row = [0] * n
            for x in r:
                row[abs(x) - 1] += 1 if x > 0 else -1
            if any(row):
                rows.append(row)
        if not rows or not n:
            return n, []
        S, _, _ = smith_form(rows, transforms=False)
        d = [S[i][i] for i in range(min(len(S), n)) if S[i][i]]
        return n - len(d), [x for x in d if x > 1]

    def simplified(self):
        """Tietze reduction: drop trivial and repeated relators and eliminate
        any generator occurring exactly once in some relator, until nothing
        changes.  Best effort; a non-trivial result is not a proof."""
        gens = list(range(1, len(self.generators) + 1))
        rels = [cyclic_reduce(r) for r in self.relators]
        while True:
            seen, kept = set(), []
            for r in rels:
                c = _canonical_relator(r)
                if c and c not in seen:
                    seen.add(c)
                    kept.append(c)
            rels = kept
            target = None
            for r in sorted(rels, key=len):
                for g in gens:
                    if sum(1 for x in r if abs(x) == g) == 1:
                        target = (r, g)
                        break
                if target:
                    break
            if target is None:
                break
            r, g = target
            k = next(i for i, x in enumerate(r) if abs(x) == g)
            # r = a g^e b  =>  g^e = a^-1 b^-1, g = (b a)^-1 when e = +1
            rest = r[k + 1:] + r[:k]
            value = inverse(rest) if r[k] > 0 else rest
            subst = {g: value, -g: inverse(value)}
            rels = [free_reduce(tuple(y for x in rel for y in subst.get(x, (x,))))
                    for rel in rels if rel is not r]
            gens.remove(g)
        renum = {g: n + 1 for n, g in enumerate(gens)}
        names = [self.generators[g - 1] for g in gens]
        new_rels = [tuple((renum[abs(x)] if x > 0 else -renum[abs(x)]) for x in r) for r in rels]
        return GroupPresentation(names, new_rels)


def pi1(sc, basepoint=None):
    """Edge-path presentation of the fundamental group.

    Returns ``(raw, simplified)``.  Generators are the edges off a BFS
    spanning tree, relators the boundaries of triangles.
    """
    comps = sc.components()
    if len(comps) > 1:
        raise DisconnectedComplex(comps)
    if not sc.vertices:
        raise DisconnectedComplex([])
    if basepoint is None:
        basepoint = sc.vertices[0]
    adj = {v: [] for v in sc.vertices}
    edges = sc.simplices[1] if sc.dim >= 1 else []
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    tree = set()
    seen = {basepoint}
    queue = deque([basepoint])
    while queue:
        v = queue.popleft()
        for w in sorted(adj[v], key=sc.rank.__getitem__):
            if w not in seen:
                seen.add(w)
                queue.append(w)
                tree.add(tuple(sorted((v, w), key=sc.rank.__getitem__)))
    gen_index = {}
    names = []
    for e in edges:
        if e not in tree:
            gen_index[e] = len(names) + 1
            names.append(f"{e[0]}-{e[1]}")

    def letter(a, b):
        # path a -> b along an edge
        if sc.rank[a] < sc.rank[b]:
            g = gen_index.get((a, b))
            return (g,) if g else ()
        g = gen_index.get((b, a))
        return (-g,) if g else ()

    relators = []
    if sc.dim >= 2:
        for a, b, c in sc.simplices[2]:
            w = letter(a, b) + letter(b, c) + letter(c, a)
            if w:
                relators.append(w)
    raw = GroupPresentation(names, relators)
    return raw, raw.simplified()


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def rank_report(cx, genus=None, pi1_simplified=None):
    """Numbers entering the generator bounds for ``Gamma_f / D_f``.

    ``n = E - V + 1`` on the 1-skeleton of K and
    ``bk_bound = (q + g - 1) V + n``.
    """
    g = cx.genus if genus is None else genus
    V = sum(1 for c in cx.cells if c.dim == 0)
    E = sum(1 for c in cx.cells if c.dim == 1)
    n = E - V + 1
    if pi1_simplified is None:
        _, pi1_simplified = pi1(order_complex(cx))
    return {
        "V": V, "E": E, "n": n,
        "bk_bound": (cx.q + g - 1) * V + n,
        "pi1_generator_count": len(pi1_simplified.generators),
    }


def topology_report(cx):
    sc = order_complex(cx)
    h = homology(sc)
    raw, simp = pi1(sc)
    return {
        "betti": [b for b, _ in h],
        "torsion": [t for _, t in h],
        "pi1": {"generators": len(raw.generators), "relators": len(raw.relators),
                "simplified_generators": len(simp.generators),
                "simplified_relators": [list(r) for r in simp.relators]},
        "rank_report": rank_report(cx, pi1_simplified=simp),
    }
