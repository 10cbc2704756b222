"""Cells of the complex ``K_{p,q,r}`` and its face poset.

Each cell is an equivalence class of Morse functions, i.e. a framed numbered
molecule; its dimension is ``q`` minus the number of distinct saddle levels.
A proper refinement of a cell's framing determines a unique adjacent class
of lower dimension (perturb the saddle values apart); that class is computed
here by level-circle surgery on the atoms whose saddles get separated.
"""

import json
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from itertools import permutations, product

from . import _kernels
from .molecule import (
    DOWN, UP, Atom, FramedMolecule, MoleculeInvalid, atom_boundary, canonical_key,
    enumerate_atoms, genus_of, molecule_validate, parameter_problems)
from .permutohedron import (
    OrderedPartition, PermutohedronFace, ValidationError, coarsenings,
    ordered_partitions, refinements, refines_or_equal, set_partitions)


class IntegrityError(RuntimeError):
    """Two computations that must agree did not; indicates a bug."""


# ---------------------------------------------------------------------------
# level-circle surgery
# ---------------------------------------------------------------------------


class LevelCurves:
    """Regular level curves inside an atom neighbourhood after some saddles
    have been pushed below the critical level.

    A curve is a cycle of entry slots (slots where a down sector starts).
    At a saddle still at the critical level the curve passes its down sector
    counterclockwise, entry ``i`` to exit ``i + 1``; at a saddle already
    passed it follows the adjacent up sector clockwise, entry ``i`` to exit
    ``i - 1``.  Every edge joins an exit to an entry, so curves close up.
    """

    def __init__(self, atom, processed=()):
        self.atom = atom
        self.processed = frozenset(processed)
        self.entries = [s for s in atom.slots() if atom.is_entry(s)]
        index = {s: n for n, s in enumerate(self.entries)}
        alpha = atom.alpha
        perm = []
        for s in self.entries:
            nxt = alpha[self.exit_of(s)]
            if nxt not in index:
                raise IntegrityError(f"edge from {self.exit_of(s)} does not end at an entry slot")
            perm.append(index[nxt])
        self.curves = [tuple(self.entries[n] for n in cyc)
                       for cyc in _kernels.perm_cycles(perm)]

    def exit_of(self, entry):
        v, i = entry
        return (v, (i - 1) % 4) if v in self.processed else (v, (i + 1) % 4)

    def corner_of(self, entry):
        v, i = entry
        return (v, (i - 1) % 4) if v in self.processed else (v, i)

    def corners(self, curve, vertices=None):
        return frozenset(self.corner_of(e) for e in curve
                         if vertices is None or e[0] in vertices)

    def __len__(self):
        return len(self.curves)


class AtomSplit:
    """Result of separating the saddles of one atom into ordered sub-levels.

    Attributes
    ----------
    atoms : list of (int, Atom)
        New atoms with the index of their sub-level.
    down_map, up_map : dict
        Original down/up circle id -> circle id in the new atoms.
    internal : list of (up id, down id)
        Annuli created between new atoms.
    trace : list of (saddle, before, after)
        Curve counts around every individual saddle surgery.
    """

    def __init__(self):
        self.atoms = []
        self.down_map = {}
        self.up_map = {}
        self.internal = []
        self.trace = []


def split_atom(atom, sub_blocks):
    """Split ``atom`` by an ordered partition of its saddles.

    Raises IntegrityError if the surgery fails to reproduce the atom's own
    boundary (the up circles at the end, the new atoms' boundaries at each
    stage).
    """
    sub_blocks = [tuple(sorted(b)) for b in sub_blocks]
    if sorted(v for b in sub_blocks for v in b) != list(atom.saddles):
        raise ValidationError(f"{sub_blocks} is not a partition of {list(atom.saddles)}")
    out = AtomSplit()
    boundary = atom_boundary(atom)
    if len(sub_blocks) == 1:
        out.atoms.append((0, atom))
        for c in boundary:
            (out.down_map if c.label == DOWN else out.up_map)[("c",) + c.id] = ("c",) + c.id
        return out

    state = LevelCurves(atom)
    tags = {}
    next_tag = 0
    origin = {}      # tag -> ("orig", circle id) | ("new", circle id)
    consumer = {}    # tag -> new down circle id

    by_corners = {c.corners: ("c",) + c.id for c in boundary if c.label == DOWN}
    for curve in state.curves:
        cid = by_corners.get(state.corners(curve))
        if cid is None:
            raise IntegrityError(f"level curve {curve} is not a down circle of {atom!r}")
        tags[frozenset(curve)] = next_tag
        origin[next_tag] = ("orig", cid)
        next_tag += 1

    processed = set()
    for t, block in enumerate(sub_blocks):
        before = state
        bset = set(block)
        # individual surgeries, for the conservation trace
        step = before
        for v in block:
            nxt = LevelCurves(atom, step.processed | {v})
            out.trace.append((v, len(step), len(nxt)))
            step = nxt
        processed |= bset
        after = step

        # new atoms: edges are arcs of the pre-stage curves between block saddles
        pairs = []
        alpha = atom.alpha
        for v in block:
            for i in range(4):
                x = (v, i)
                if atom.is_entry(x):
                    continue
                y = alpha[x]
                guard = 0
                while y[0] not in bset:
                    y = alpha[before.exit_of(y)]
                    guard += 1
                    if guard > 4 * len(atom.saddles):
                        raise IntegrityError("runaway arc while reading new atom edges")
                pairs.append((x, y))
        comps = _components(block, pairs)
        sectors = {v: atom.sectors[v] for v in block}
        new_atoms = []
        for comp in comps:
            cp = [pq for pq in pairs if pq[0][0] in comp]
            new_atoms.append(Atom(comp, cp, sectors={v: sectors[v] for v in comp}))

        touched_before = [c for c in before.curves if any(e[0] in bset for e in c)]
        touched_after = [c for c in after.curves if any(e[0] in bset for e in c)]
        for a in new_atoms:
            own = set(a.saddles)
            bnd = {(c.label, c.corners): ("c",) + c.id for c in atom_boundary(a)}
            for curve in touched_before:
                if not any(e[0] in own for e in curve):
                    continue
                cid = bnd.get((DOWN, before.corners(curve, own)))
                if cid is None:
                    raise IntegrityError(f"pre-stage curve {curve} is not a down circle of {a!r}")
                consumer[tags.pop(frozenset(curve))] = cid
            for curve in touched_after:
                if not any(e[0] in own for e in curve):
                    continue
                cid = bnd.get((UP, after.corners(curve, own)))
                if cid is None:
                    raise IntegrityError(f"post-stage curve {curve} is not an up circle of {a!r}")
                tags[frozenset(curve)] = next_tag
                origin[next_tag] = ("new", cid)
                next_tag += 1
            out.atoms.append((t, a))
        state = after

    ups = {c.corners: ("c",) + c.id for c in boundary if c.label == UP}
    if len(state) != len(ups):
        raise IntegrityError(
            f"surgery ends with {len(state)} curves, atom has {len(ups)} up circles")
    for curve in state.curves:
        cid = ups.get(state.corners(curve))
        if cid is None:
            raise IntegrityError(f"final curve {curve} is not an up circle of {atom!r}")
        kind, src = origin[tags[frozenset(curve)]]
        if kind != "new":
            raise IntegrityError("a down circle survived every surgery")
        out.up_map[cid] = src
    for tag, dst in consumer.items():
        kind, src = origin[tag]
        if kind == "orig":
            out.down_map[src] = dst
        else:
            out.internal.append((src, dst))
    return out


def _components(vertices, pairs):
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        parent[find(a[0])] = find(b[0])
    groups = defaultdict(list)
    for v in vertices:
        groups[find(v)].append(v)
    return sorted(tuple(sorted(g)) for g in groups.values())


def split_molecule(mol, fine):
    """The molecule of the adjacent class with framing ``fine``."""
    if not refines_or_equal(fine, mol.framing):
        raise ValidationError(f"{fine!r} does not refine {mol.framing!r}")
    if fine == mol.framing:
        return mol
    atoms, annuli = [], []
    down_map, up_map = {}, {}
    for atom in mol.atoms:
        own = set(atom.saddles)
        subs = [tuple(sorted(own & set(b))) for b in fine.blocks if own & set(b)]
        res = split_atom(atom, subs)
        atoms.extend(a for _, a in res.atoms)
        down_map.update(res.down_map)
        up_map.update(res.up_map)
        annuli.extend(res.internal)
    for lo, hi in mol.annuli:
        annuli.append((up_map.get(lo, lo), down_map.get(hi, hi)))
    out = FramedMolecule(mol.p, mol.q, mol.r, fine, atoms, annuli)
    problems = molecule_validate(out)
    if problems:
        raise IntegrityError(f"split produced an invalid molecule: {problems}")
    return out


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


class Cell:
    __slots__ = ("id", "molecule", "dim", "face", "key")

    def __init__(self, id, molecule, key=None):
        self.id = id
        self.molecule = molecule
        self.face = molecule.framing
        self.dim = molecule.dim
        self.key = canonical_key(molecule) if key is None else key

    def __repr__(self):
        return f"Cell({self.id}, dim={self.dim}, face={self.face.to_json()})"

    def to_json(self):
        return {"id": self.id, "dim": self.dim, "face": self.face.to_json(),
                "molecule": self.molecule.to_json()}


def _atom_choices(block, cache):
    """All ways to fill one framing block with atoms."""
    out = []
    for groups in set_partitions(block):
        per_group = []
        for g in groups:
            g = tuple(sorted(g))
            if g not in cache:
                cache[g] = enumerate_atoms(g)
            per_group.append(cache[g])
        out.extend(product(*per_group))
    return out


def molecules_for_framing(p, q, r, framing):
    """Distinct valid molecules with the given framing, keyed by class."""
    cache = {}
    per_block = [_atom_choices(b, cache) for b in framing.blocks]
    minima = list(range(q + 1, q + p + 1))
    maxima = list(range(q + p + 1, q + p + r + 1))
    found = {}
    for choice in product(*per_block):
        atoms = [a for blk in choice for a in blk]
        downs, ups = [], []
        for level, blk in enumerate(choice):
            for a in blk:
                for c in atom_boundary(a):
                    (downs if c.label == DOWN else ups).append((("c",) + c.id, level))
        m = len(downs) - p
        if m < 0 or len(ups) - r != m:
            continue
        for min_pick in permutations(range(len(downs)), p):
            rest_down = [d for k, d in enumerate(downs) if k not in min_pick]
            for max_pick in permutations(range(len(ups)), r):
                rest_up = [u for k, u in enumerate(ups) if k not in max_pick]
                base = [(("min", x), downs[k][0]) for x, k in zip(minima, min_pick)]
                base += [(ups[k][0], ("max", x)) for x, k in zip(maxima, max_pick)]
                for order in permutations(rest_up):
                    if any(u[1] >= d[1] for u, d in zip(order, rest_down)):
                        continue
                    annuli = base + [(u[0], d[0]) for u, d in zip(order, rest_down)]
                    mol = FramedMolecule(p, q, r, framing, atoms, annuli)
                    try:
                        key = canonical_key(mol)
                    except MoleculeInvalid:
                        continue
                    found.setdefault(key, mol)
    return found


def _framing_job(args):
    p, q, r, blocks = args
    fr = OrderedPartition(blocks, q)
    return fr, molecules_for_framing(p, q, r, fr)


def check_parameters(p, q, r):
    problems = parameter_problems(p, q, r)
    if problems:
        raise ValidationError("; ".join(problems))


def enumerate_cells(p, q, r, workers=1):
    """One cell per class, ordered by ``(dim, framing, key)``; ids 0, 1, ...

    ``workers > 1`` spreads framings over processes; the result is identical.
    """
    check_parameters(p, q, r)
    jobs = [(p, q, r, fr.blocks) for fr in ordered_partitions(q)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_framing_job, jobs))
    else:
        results = [_framing_job(j) for j in jobs]
    entries = []
    for fr, found in results:
        for key, mol in found.items():
            entries.append((q - len(fr), fr, key, mol))
    entries.sort(key=lambda e: (e[0], e[1], e[2]))
    return [Cell(n, mol, key) for n, (_, _, key, mol) in enumerate(entries)]


def cell_counts_by_framing(cells):
    counts = defaultdict(int)
    for c in cells:
        counts[c.face] += 1
    return dict(sorted(counts.items()))


def split_cell(cell, fine, index=None):
    """The adjacent cell ``delta_fine[cell]``.

    With ``index`` (key -> Cell) the enumerated cell is returned and a miss
    is an IntegrityError; without it a fresh Cell with ``id=None`` is built.
    """
    if not refines_or_equal(fine, cell.face):
        raise ValidationError(f"{fine!r} does not refine the face {cell.face!r}")
    if fine == cell.face:
        return cell
    mol = split_molecule(cell.molecule, fine)
    key = canonical_key(mol)
    if index is None:
        return Cell(None, mol, key)
    hit = index.get(key)
    if hit is None:
        raise IntegrityError(
            f"split of cell {cell.id} by {fine.to_json()} is not among the enumerated cells")
    return hit


# ---------------------------------------------------------------------------
# the complex
# ---------------------------------------------------------------------------


class ComplexPoset:
    """Face poset of ``K_{p,q,r}``.

    ``boundary`` holds pairs ``(lower_id, higher_id)`` meaning the lower cell
    lies in the boundary of the higher one.  ``delta`` maps
    ``(cell id, partition)`` to the split cell id when it was computed.
    """

    def __init__(self, p, q, r, cells, boundary, delta=None):
        self.p, self.q, self.r = p, q, r
        self.cells = list(cells)
        self.boundary = set(boundary)
        self.delta = dict(delta or {})
        self.by_id = {c.id: c for c in self.cells}

    @property
    def genus(self):
        return genus_of(self.p, self.q, self.r)

    @property
    def dimension(self):
        return max((c.dim for c in self.cells), default=-1)

    def r0(self, cell_id):
        return PermutohedronFace(self.by_id[cell_id].face)

    def below(self, cell_id):
        return {a for a, b in self.boundary if b == cell_id}

    def above(self, cell_id):
        return {b for a, b in self.boundary if a == cell_id}

    def f_vector(self):
        counts = [0] * (max(self.dimension, 0) + 1)
        for c in self.cells:
            counts[c.dim] += 1
        return counts

    def euler_characteristic(self):
        return sum((-1) ** c.dim for c in self.cells)

    def components(self):
        parent = {c.id: c.id for c in self.cells}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.boundary:
            parent[find(a)] = find(b)
        groups = defaultdict(list)
        for c in self.cells:
            groups[find(c.id)].append(c.id)
        return sorted(sorted(g) for g in groups.values())

    def is_connected(self):
        return len(self.components()) == 1

    def to_json(self):
        return {
            "params": {"p": self.p, "q": self.q, "r": self.r, "genus": self.genus},
            "cells": [c.to_json() for c in self.cells],
            "boundary": [list(pair) for pair in sorted(self.boundary)],
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data):
        try:
            params = data["params"]
            p, q, r = int(params["p"]), int(params["q"]), int(params["r"])
            cells = []
            for c in data["cells"]:
                mol = FramedMolecule.from_json(c["molecule"])
                cell = Cell(int(c["id"]), mol)
                if cell.dim != int(c["dim"]) or cell.face.to_json() != c["face"]:
                    raise ValidationError(f"cell {c['id']}: dim/face disagree with its molecule")
                cells.append(cell)
            boundary = [(int(a), int(b)) for a, b in data["boundary"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed complex JSON: {exc}") from exc
        return cls(p, q, r, cells, boundary)

    def to_dot(self):
        """1-skeleton in Graphviz DOT: vertices are dim-0 cells, each dim-1
        cell is an edge between the two vertices in its boundary."""
        lines = [f"graph K_{self.p}_{self.q}_{self.r} {{"]
        for c in self.cells:
            if c.dim == 0:
                lines.append(f'  c{c.id} [label="{c.id}: {c.face.to_json()}"];')
        for c in self.cells:
            if c.dim == 1:
                ends = sorted(a for a in self.below(c.id) if self.by_id[a].dim == 0)
                if len(ends) == 2:
                    lines.append(f'  c{ends[0]} -- c{ends[1]} [label="{c.id}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_complex(p, q, r, workers=1):
    """Enumerate the cells and glue them along the refinement bijections."""
    cells = enumerate_cells(p, q, r, workers=workers)
    index = {c.key: c for c in cells}
    boundary, delta = set(), {}
    for cell in cells:
        for fine in refinements(cell.face, proper=True):
            low = split_cell(cell, fine, index)
            delta[(cell.id, fine)] = low.id
            boundary.add((low.id, cell.id))
    return ComplexPoset(p, q, r, cells, boundary, delta)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


class Report:
    """Named failures collected by a check; truthy when everything passed."""

    def __init__(self, name):
        self.name = name
        self.failures = []

    def fail(self, msg):
        self.failures.append(msg)

    @property
    def ok(self):
        return not self.failures

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"Report({self.name}, ok={self.ok}, failures={self.failures[:5]})"

    def to_json(self):
        return {"check": self.name, "ok": self.ok, "failures": list(self.failures)}


def check_regularity(cx):
    """Closure of every cell must match the face lattice of its permutohedron
    face via the labels ``r0``; split_cell must be injective per cell."""
    rep = Report("regularity")
    for cell in cx.cells:
        closure = cx.below(cell.id) | {cell.id}
        faces = refinements(cell.face)
        labels = defaultdict(list)
        for t in closure:
            labels[cx.by_id[t].face].append(t)
        dup = sorted(f.to_json() for f, ids in labels.items() if len(ids) > 1)
        if dup:
            rep.fail(f"cell {cell.id}: several closure cells over faces {dup}")
            continue
        if set(labels) != set(faces):
            rep.fail(f"cell {cell.id}: closure labels do not match the faces of "
                     f"{cell.face.to_json()}")
            continue
        for t in closure:
            ft = cx.by_id[t].face
            for u in closure:
                fu = cx.by_id[u].face
                order = t == u or (t, u) in cx.boundary
                if order != refines_or_equal(ft, fu):
                    rep.fail(f"cell {cell.id}: order between {t} and {u} does not "
                             f"match refinement of their faces")
        if cx.delta:
            imgs = [cx.delta.get((cell.id, f), cell.id if f == cell.face else None)
                    for f in faces]
            if None in imgs:
                rep.fail(f"cell {cell.id}: split table incomplete")
            elif len(set(imgs)) != len(imgs):
                rep.fail(f"cell {cell.id}: split_cell is not injective")
    return rep


def check_branched_covering(cx):
    """``r0`` is dimension-preserving, and every face of the permutohedron
    above ``r0(cell)`` lifts to a cell above ``cell``."""
    rep = Report("branched_covering")
    for cell in cx.cells:
        if cell.dim != cell.face.dim:
            rep.fail(f"cell {cell.id}: dim {cell.dim} but face dim {cell.face.dim}")
        if cell.face != cell.molecule.framing:
            rep.fail(f"cell {cell.id}: r0 label differs from the molecule framing")
        if cell.face.q != cx.q:
            rep.fail(f"cell {cell.id}: face is not a face of P^{cx.q - 1}")
            continue
        up_faces = defaultdict(list)
        for b in cx.above(cell.id):
            up_faces[cx.by_id[b].face].append(b)
        for coarse in coarsenings(cell.face, proper=True):
            if not up_faces.get(coarse):
                rep.fail(f"cell {cell.id}: face {coarse.to_json()} has no lift above it")
    return rep


def check_delta_transitivity(cx, index=None):
    """``delta_{J''} [f] == delta_{J''} delta_{J'} [f]`` for every chain."""
    rep = Report("delta_transitivity")
    if index is None:
        index = {c.key: c for c in cx.cells}
    for cell in cx.cells:
        refs = refinements(cell.face, proper=True)
        for mid in refs:
            once = split_cell(cell, mid, index)
            for fine in refinements(mid, proper=True):
                direct = split_cell(cell, fine, index)
                twice = split_cell(once, fine, index)
                if direct.id != twice.id:
                    rep.fail(f"cell {cell.id}: {fine.to_json()} via {mid.to_json()} "
                             f"gives {twice.id}, direct gives {direct.id}")
    return rep


def check_connected(cx):
    rep = Report("connectivity")
    comps = cx.components()
    if len(comps) != 1:
        rep.fail(f"{len(comps)} components: {[c[:5] for c in comps]}")
    return rep


def run_checks(cx):
    return [check_regularity(cx), check_delta_transitivity(cx),
            check_branched_covering(cx), check_connected(cx)]
