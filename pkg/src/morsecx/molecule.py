"""Atoms and framed numbered molecules.

An atom is a connected 4-valent ribbon graph: every saddle has four slots
``0..3`` in counterclockwise order, sector ``i`` lies between slots ``i`` and
``i + 1`` (mod 4), and sectors alternate between ``down`` (values below the
critical level) and ``up``.  Boundary walks of the ribbon structure are the
level circles just below and just above the critical level.

A framed molecule records one equivalence class of Morse functions: atoms
placed at ordered saddle levels (the framing), numbered extrema, and annuli
joining boundary circles of atoms at different levels or circles to extrema.

Conventions
-----------
slot
    ``(saddle, i)`` with ``i`` in ``0..3``.
corner
    ``(saddle, i)`` naming sector ``i`` of that saddle.
circle id
    the least corner on a boundary circle; corners belong to exactly one
    circle, so this is unique across the whole molecule.
annulus
    ``(lower, upper)``: ``lower`` is ``("min", x)`` or an up circle
    ``("c", v, i)``, ``upper`` is ``("max", x)`` or a down circle.
"""

from collections import defaultdict
from itertools import permutations, product

from . import _kernels
from .permutohedron import OrderedPartition, ValidationError

DOWN = "down"
UP = "up"
_FLIP = {DOWN: UP, UP: DOWN}


class AtomInvalid(ValueError):
    """An atom violates the structural rules of a critical-level neighbourhood."""


class MoleculeInvalid(ValueError):
    pass


def sectors_from_sector0(sector0):
    return (sector0, _FLIP[sector0], sector0, _FLIP[sector0])


class Atom:
    """A numbered atom.

    Parameters
    ----------
    saddles : iterable of int
        Saddle labels; stored sorted.
    pairing : iterable of (slot, slot)
        Edges of the ribbon graph, ``slot = (saddle, i)``.
    sectors : mapping saddle -> 4 labels, optional
        Sector labels in rotation order.
    sector0 : mapping saddle -> label, or a single label, optional
        Shorthand for alternating labels starting with the given one.
    """

    __slots__ = ("saddles", "pairing", "sectors", "_alpha")

    def __init__(self, saddles, pairing, sectors=None, sector0=DOWN):
        self.saddles = tuple(sorted(int(v) for v in saddles))
        self.pairing = tuple(sorted(
            tuple(sorted(((int(a[0]), int(a[1])), (int(b[0]), int(b[1])))))
            for a, b in pairing))
        if sectors is None:
            if isinstance(sector0, str):
                sector0 = {v: sector0 for v in self.saddles}
            sectors = {v: sectors_from_sector0(sector0[v]) for v in self.saddles}
        self.sectors = {int(v): tuple(s) for v, s in sectors.items()}
        self._alpha = None

    # -- structure -----------------------------------------------------

    @property
    def alpha(self):
        """Edge involution on slots (None-valued slots are unpaired)."""
        if self._alpha is None:
            alpha = {}
            for a, b in self.pairing:
                alpha[a] = b
                alpha[b] = a
            self._alpha = alpha
        return self._alpha

    def slots(self):
        return [(v, i) for v in self.saddles for i in range(4)]

    def sector_type(self, corner):
        v, i = corner
        return self.sectors[v][i % 4]

    def is_entry(self, slot):
        """Slot where a down sector starts; edges run exit -> entry."""
        return self.sector_type(slot) == DOWN

    def key(self):
        return (self.saddles, self.pairing,
                tuple(self.sectors[v] for v in self.saddles))

    def __eq__(self, other):
        return isinstance(other, Atom) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        s0 = {v: self.sectors[v][0] for v in self.saddles}
        return f"Atom(saddles={list(self.saddles)}, pairing={list(self.pairing)}, sector0={s0})"

    def euler_characteristic(self):
        return -len(self.saddles)

    # -- transformations ----------------------------------------------

    def rotated(self, shifts):
        """Relabel slots ``(v, i) -> (v, i + shifts[v])``.

        Even shifts are orientation-preserving automorphisms of the local
        picture; odd shifts only change which sector is called ``0``.
        """
        def f(slot):
            v, i = slot
            return (v, (i + shifts.get(v, 0)) % 4)
        sectors = {}
        for v in self.saddles:
            k = shifts.get(v, 0) % 4
            old = self.sectors[v]
            sectors[v] = tuple(old[(j - k) % 4] for j in range(4))
        return Atom(self.saddles, [(f(a), f(b)) for a, b in self.pairing], sectors=sectors)

    def normalizing_shifts(self):
        """Shifts making sector 0 ``down`` at every saddle."""
        return {v: (0 if self.sectors[v][0] == DOWN else 3) for v in self.saddles}

    # -- JSON ------------------------------------------------------------

    def to_json(self):
        pos = {v: k for k, v in enumerate(self.saddles)}
        return {
            "saddles": list(self.saddles),
            "pairing": [[4 * pos[a[0]] + a[1], 4 * pos[b[0]] + b[1]] for a, b in self.pairing],
            "sector0": [self.sectors[v][0] for v in self.saddles],
        }

    @classmethod
    def from_json(cls, data):
        try:
            saddles = [int(v) for v in data["saddles"]]
            s0 = data.get("sector0", DOWN)
            if isinstance(s0, str):
                s0 = [s0] * len(saddles)
            if len(s0) != len(saddles) or any(x not in (DOWN, UP) for x in s0):
                raise ValidationError(f"bad sector0 {s0!r}")

            def slot(n):
                n = int(n)
                if not 0 <= n < 4 * len(saddles):
                    raise ValidationError(f"slot index {n} out of range")
                return (saddles[n // 4], n % 4)

            pairing = [(slot(a), slot(b)) for a, b in data["pairing"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed atom JSON: {exc}") from exc
        return cls(saddles, pairing, sector0=dict(zip(saddles, s0)))


class BoundaryCircle:
    """One boundary component of an atom neighbourhood."""

    __slots__ = ("owner", "label", "walk")

    def __init__(self, owner, label, walk):
        self.owner = owner
        self.label = label
        self.walk = walk

    @property
    def id(self):
        return self.walk[0]

    @property
    def corners(self):
        return frozenset(self.walk)

    def __repr__(self):
        return f"BoundaryCircle({self.label}, {list(self.walk)})"


def _face_walks(atom):
    """Cycles of the face permutation ``d -> alpha(sigma(d))`` as corner lists."""
    slots = atom.slots()
    index = {s: n for n, s in enumerate(slots)}
    alpha = atom.alpha
    perm = []
    for v, i in slots:
        nxt = alpha.get((v, (i + 1) % 4))
        if nxt is None:
            raise AtomInvalid(f"slot {(v, (i + 1) % 4)} is unpaired")
        perm.append(index[nxt])
    walks = []
    for cyc in _kernels.perm_cycles(perm):
        walks.append(tuple(slots[n] for n in cyc))
    return walks


def _rotate_min(walk):
    k = walk.index(min(walk))
    return tuple(walk[k:] + walk[:k])


def atom_boundary(atom):
    """Boundary circles of an atom, each labelled ``down`` or ``up``.

    Circles are listed by their least corner and each walk starts there.

    Raises
    ------
    AtomInvalid
        If a walk passes through both down and up sectors.
    """
    problems = _structure_problems(atom)
    if problems:
        raise AtomInvalid("; ".join(problems))
    circles = []
    for walk in _face_walks(atom):
        walk = _rotate_min(list(walk))
        kinds = {atom.sector_type(c) for c in walk}
        if len(kinds) != 1:
            raise AtomInvalid(
                f"boundary walk {list(walk)} mixes down and up sectors")
        circles.append(BoundaryCircle(atom.saddles, kinds.pop(), walk))
    circles.sort(key=lambda c: c.id)
    return circles


def _structure_problems(atom):
    problems = []
    if not atom.saddles:
        return ["atom has no saddles"]
    if len(set(atom.saddles)) != len(atom.saddles):
        problems.append("repeated saddle label")
    if set(atom.sectors) != set(atom.saddles):
        problems.append("sector labels do not match the saddle set")
    else:
        for v in atom.saddles:
            labs = atom.sectors[v]
            if len(labs) != 4 or any(x not in (DOWN, UP) for x in labs):
                problems.append(f"saddle {v}: sector labels must be 4 of down/up")
            elif any(labs[i] == labs[(i + 1) % 4] for i in range(4)):
                problems.append(f"saddle {v}: sector labels do not alternate")
    valid_slots = set(atom.slots())
    seen = defaultdict(int)
    for a, b in atom.pairing:
        for s in (a, b):
            if s not in valid_slots:
                problems.append(f"slot {s} is not a slot of this atom")
            seen[s] += 1
        if a == b:
            problems.append(f"slot {a} paired with itself")
    for s in sorted(valid_slots):
        if seen[s] != 1:
            problems.append(f"slot {s} used {seen[s]} times in the pairing (must be 1)")
    return problems


def _connected(atom):
    parent = {v: v for v in atom.saddles}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in atom.pairing:
        if a[0] in parent and b[0] in parent:
            parent[find(a[0])] = find(b[0])
    return len({find(v) for v in atom.saddles}) == 1


def atom_validate(atom):
    """List of violated atom invariants; empty iff the atom is valid."""
    problems = _structure_problems(atom)
    if problems:
        return problems
    if not _connected(atom):
        problems.append("atom graph is disconnected")
    walks = _face_walks(atom)
    for walk in walks:
        kinds = {atom.sector_type(c) for c in walk}
        if len(kinds) != 1:
            problems.append(f"boundary walk {sorted(walk)} mixes down and up sectors")
    k = len(atom.saddles)
    # V - E + F for the thickened graph with faces capped off equals 2 - 2g;
    # the neighbourhood itself has chi = V - E = -k automatically.
    if (k - 2 * k + len(walks)) % 2:
        problems.append("ribbon graph Euler characteristic has the wrong parity")
    return problems


def enumerate_atoms(saddles):
    """All valid atoms on the given saddles with sector 0 ``down``, one per
    class under the half-turn symmetries at each saddle."""
    saddles = tuple(sorted(saddles))
    exits = [(v, i) for v in saddles for i in (1, 3)]
    entries = [(v, i) for v in saddles for i in (0, 2)]
    seen = set()
    out = []
    for image in permutations(entries):
        atom = Atom(saddles, list(zip(exits, image)), sector0=DOWN)
        if not _connected(atom):
            continue
        k = atom_class_key(atom)
        if k in seen:
            continue
        seen.add(k)
        out.append(atom)
    return out


def atom_class_key(atom):
    """Least encoding over half-turns at each saddle (atom must be normalized)."""
    best = None
    for turns in product((0, 2), repeat=len(atom.saddles)):
        enc = atom.rotated(dict(zip(atom.saddles, turns))).pairing
        if best is None or enc < best:
            best = enc
    return (atom.saddles, best)


# ---------------------------------------------------------------------------
# molecules
# ---------------------------------------------------------------------------


def genus_of(p, q, r):
    twice = 2 - p + q - r
    if twice < 0 or twice % 2:
        return None
    return twice // 2


def parameter_problems(p, q, r):
    problems = []
    for name, val, low in (("p", p, 1), ("q", q, 1), ("r", r, 1)):
        if not isinstance(val, int) or isinstance(val, bool) or val < low:
            problems.append(f"{name} must be an integer >= {low}, got {val!r}")
    if problems:
        return problems
    twice = 2 - p + q - r
    if twice < 0:
        problems.append(f"genus (2 - p + q - r)/2 = {twice}/2 is negative")
    elif twice % 2:
        problems.append(f"genus (2 - p + q - r)/2 = {twice}/2 is not an integer")
    return problems


def _endpoint_json(end, circle_ref):
    if end[0] == "c":
        return circle_ref[end]
    return {end[0]: end[1]}


class FramedMolecule:
    """One equivalence class of Morse functions ``[f]``.

    ``atoms`` may be listed in any order; each atom's level is the framing
    block containing its saddles.
    """

    def __init__(self, p, q, r, framing, atoms, annuli):
        self.p, self.q, self.r = p, q, r
        if not isinstance(framing, OrderedPartition):
            framing = OrderedPartition(framing, q)
        self.framing = framing
        self.atoms = tuple(atoms)
        self.annuli = tuple(sorted((tuple(lo), tuple(hi)) for lo, hi in annuli))
        self._circles = None
        self._key = None

    @property
    def minima(self):
        return tuple(range(self.q + 1, self.q + self.p + 1))

    @property
    def maxima(self):
        return tuple(range(self.q + self.p + 1, self.q + self.p + self.r + 1))

    @property
    def genus(self):
        return genus_of(self.p, self.q, self.r)

    @property
    def dim(self):
        return self.q - len(self.framing)

    def level_of(self, atom):
        return self.framing.block_of(atom.saddles[0])

    def circles(self):
        """Map circle id -> (atom index, BoundaryCircle)."""
        if self._circles is None:
            out = {}
            for n, atom in enumerate(self.atoms):
                for c in atom_boundary(atom):
                    out[("c",) + c.id] = (n, c)
            self._circles = out
        return self._circles

    def atoms_by_level(self):
        levels = defaultdict(list)
        for atom in self.atoms:
            levels[self.level_of(atom)].append(atom)
        return levels

    # -- derived forms --------------------------------------------------

    def transformed(self, shifts):
        """Apply per-saddle slot relabelling to atoms and annulus endpoints."""
        def f(end):
            if end[0] != "c":
                return end
            v, i = end[1], end[2]
            return ("c", v, (i + shifts.get(v, 0)) % 4)

        atoms = [a.rotated(shifts) for a in self.atoms]
        mol = FramedMolecule(self.p, self.q, self.r, self.framing, atoms, [])
        # endpoints move with their corners; re-identify by least corner
        ids = {}
        for cid, (_, circ) in self.circles().items():
            moved = min(f(("c",) + c)[1:] for c in circ.walk)
            ids[cid] = ("c",) + moved
        mol.annuli = tuple(sorted(
            (ids.get(lo, lo), ids.get(hi, hi)) for lo, hi in self.annuli))
        return mol

    def normalized(self):
        """Equivalent molecule with sector 0 ``down`` at every saddle."""
        shifts = {}
        for a in self.atoms:
            shifts.update(a.normalizing_shifts())
        if not any(shifts.values()):
            return self
        return self.transformed(shifts)

    # -- JSON ----------------------------------------------------------

    def to_json(self):
        refs = {}
        atoms_sorted = sorted(self.atoms, key=lambda a: (self.level_of(a), a.saddles))
        for n, atom in enumerate(atoms_sorted):
            for k, c in enumerate(atom_boundary(atom)):
                refs[("c",) + c.id] = {"atom": n, "circle": k}
        annuli = []
        for lo, hi in self.annuli:
            if lo[0] == "min":
                annuli.append({"from": refs[hi], "to": {"min": lo[1]}})
            elif hi[0] == "max":
                annuli.append({"from": refs[lo], "to": {"max": hi[1]}})
            else:
                annuli.append({"from": refs[lo], "to": refs[hi]})
        return {
            "p": self.p, "q": self.q, "r": self.r,
            "framing": self.framing.to_json(),
            "atoms": [a.to_json() for a in atoms_sorted],
            "annuli": annuli,
        }

    @classmethod
    def from_json(cls, data):
        try:
            p, q, r = int(data["p"]), int(data["q"]), int(data["r"])
            framing = OrderedPartition(data["framing"], q)
            atoms = [Atom.from_json(a) for a in data["atoms"]]
            circles = [atom_boundary(a) for a in atoms]

            def end(ref):
                if "min" in ref:
                    return ("min", int(ref["min"]))
                if "max" in ref:
                    return ("max", int(ref["max"]))
                c = circles[int(ref["atom"])][int(ref["circle"])]
                return ("c",) + c.id, c.label

            annuli = []
            for ann in data["annuli"]:
                a, b = end(ann["from"]), end(ann["to"])
                ends = []
                for e in (a, b):
                    if e[0] in ("min", "max"):
                        ends.append((e, 0 if e[0] == "min" else 1))
                    else:
                        ends.append((e[0], 0 if e[1] == UP else 1))
                ends.sort(key=lambda t: t[1])
                annuli.append((ends[0][0], ends[1][0]))
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed molecule JSON: {exc}") from exc
        return cls(p, q, r, framing, atoms, annuli)


def molecule_validate(mol):
    """List of violated molecule invariants; empty iff valid."""
    problems = parameter_problems(mol.p, mol.q, mol.r)
    if problems:
        return problems
    if mol.framing.q != mol.q:
        problems.append(f"framing covers {{1..{mol.framing.q}}}, expected q={mol.q}")
        return problems
    covered = []
    for atom in mol.atoms:
        for msg in atom_validate(atom):
            problems.append(f"atom {list(atom.saddles)}: {msg}")
        covered.extend(atom.saddles)
        blocks = {mol.framing.block_of(v) for v in atom.saddles if 1 <= v <= mol.q}
        if len(blocks) > 1:
            problems.append(f"atom {list(atom.saddles)} spans several framing blocks")
    if sorted(covered) != list(range(1, mol.q + 1)):
        problems.append(f"atoms cover saddles {sorted(covered)}, expected 1..{mol.q}")
    if problems:
        return problems

    circles = mol.circles()
    lower_use = defaultdict(int)
    upper_use = defaultdict(int)
    minima, maxima = set(mol.minima), set(mol.maxima)
    for lo, hi in mol.annuli:
        lower_use[lo] += 1
        upper_use[hi] += 1
        if lo[0] == "min":
            if lo[1] not in minima:
                problems.append(f"annulus uses unknown minimum {lo[1]}")
        elif lo[0] == "c":
            if lo not in circles or circles[lo][1].label != UP:
                problems.append(f"annulus lower end {lo} is not an up circle")
        else:
            problems.append(f"annulus lower end {lo} must be a minimum or up circle")
        if hi[0] == "max":
            if hi[1] not in maxima:
                problems.append(f"annulus uses unknown maximum {hi[1]}")
        elif hi[0] == "c":
            if hi not in circles or circles[hi][1].label != DOWN:
                problems.append(f"annulus upper end {hi} is not a down circle")
        else:
            problems.append(f"annulus upper end {hi} must be a maximum or down circle")
        if lo[0] == "c" and hi[0] == "c" and lo in circles and hi in circles:
            la = mol.level_of(mol.atoms[circles[lo][0]])
            lb = mol.level_of(mol.atoms[circles[hi][0]])
            if circles[lo][0] == circles[hi][0]:
                problems.append(f"monotonicity: annulus {lo}-{hi} joins two circles of one atom")
            elif la >= lb:
                problems.append(
                    f"monotonicity: annulus {lo}-{hi} goes from level {la} to level {lb}")
        if lo[0] == "min" and hi[0] == "max":
            problems.append(f"annulus joins two extrema {lo}, {hi}")
    for cid, (_, circ) in circles.items():
        use = lower_use[cid] if circ.label == UP else upper_use[cid]
        other = upper_use[cid] if circ.label == UP else lower_use[cid]
        if use != 1 or other:
            problems.append(f"circle {cid} ({circ.label}) used {use + other} times")
    for x in sorted(minima):
        if lower_use[("min", x)] != 1:
            problems.append(f"minimum {x} used {lower_use[('min', x)]} times")
    for x in sorted(maxima):
        if upper_use[("max", x)] != 1:
            problems.append(f"maximum {x} used {upper_use[('max', x)]} times")
    if problems:
        return problems
    if not _molecule_connected(mol):
        problems.append("molecule graph is disconnected")
    return problems


def _molecule_connected(mol):
    circles = mol.circles()
    parent = {}

    def node(end):
        if end[0] == "c":
            return ("atom", circles[end][0])
        return end

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    nodes = [("atom", n) for n in range(len(mol.atoms))]
    nodes += [("min", x) for x in mol.minima] + [("max", x) for x in mol.maxima]
    for n in nodes:
        find(n)
    for lo, hi in mol.annuli:
        parent[find(node(lo))] = find(node(hi))
    return len({find(n) for n in nodes}) == 1


def framing(mol):
    return mol.framing


def canonical_key(mol):
    """Byte string identifying the class of ``mol``.

    Saddle and extremum labels are fixed by every isomorphism, so the only
    freedom is a half-turn at each saddle (a diffeomorphism fixing the point
    with differential ``-id``).  The key is the least encoding over all
    ``2**q`` choices.
    """
    if mol._key is not None:
        return mol._key
    problems = molecule_validate(mol)
    if problems:
        raise MoleculeInvalid("; ".join(problems))
    norm = mol.normalized()
    saddles = list(range(1, mol.q + 1))
    best = None
    for turns in product((0, 2), repeat=len(saddles)):
        t = norm.transformed(dict(zip(saddles, turns)))
        enc = (
            tuple(sorted((t.level_of(a), a.saddles, a.pairing) for a in t.atoms)),
            t.annuli,
        )
        if best is None or enc < best:
            best = enc
    head = (mol.p, mol.q, mol.r, mol.framing.blocks)
    mol._key = repr((head,) + best).encode()
    return mol._key
