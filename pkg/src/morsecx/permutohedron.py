"""Ordered set partitions and the face lattice of the permutohedron.

Faces of the ``(q-1)``-dimensional permutohedron correspond to ordered
partitions of ``{1..q}`` into non-empty blocks; a face with ``s`` blocks has
dimension ``q - s`` and the order between faces is in-place refinement of
blocks.  Nothing geometric is computed beyond exact vertex coordinates.
"""

from fractions import Fraction
from functools import total_ordering
from itertools import permutations, product


class ValidationError(ValueError):
    """Raised on malformed partitions, permutations or parameters."""


@total_ordering
class OrderedPartition:
    """An ordered partition ``(J_1, ..., J_s)`` of ``{1, ..., q}``.

    Blocks are stored as sorted tuples.  Instances are immutable, hashable,
    and totally ordered by ``(q, blocks)`` so output is deterministic.

    >>> OrderedPartition([[2], [1, 3]])
    OrderedPartition([[2], [1, 3]])
    >>> OrderedPartition([[2], [1, 3]]).cumulative_sizes()
    (1, 3)
    """

    __slots__ = ("_blocks", "_q")

    def __init__(self, blocks, q=None):
        blocks = tuple(tuple(sorted(int(x) for x in b)) for b in blocks)
        if not blocks:
            raise ValidationError("an ordered partition needs at least one block")
        if any(not b for b in blocks):
            raise ValidationError("blocks must be non-empty")
        elements = [x for b in blocks for x in b]
        if q is None:
            q = len(elements)
        if sorted(elements) != list(range(1, q + 1)):
            raise ValidationError(
                f"blocks {[list(b) for b in blocks]} do not partition {{1..{q}}}")
        self._blocks = blocks
        self._q = q

    @property
    def blocks(self):
        return self._blocks

    @property
    def q(self):
        return self._q

    def __len__(self):
        return len(self._blocks)

    def __iter__(self):
        return iter(self._blocks)

    def __getitem__(self, k):
        return self._blocks[k]

    def __eq__(self, other):
        if not isinstance(other, OrderedPartition):
            return NotImplemented
        return self._q == other._q and self._blocks == other._blocks

    def __lt__(self, other):
        if not isinstance(other, OrderedPartition):
            return NotImplemented
        return (self._q, self._blocks) < (other._q, other._blocks)

    def __hash__(self):
        return hash((self._q, self._blocks))

    def __repr__(self):
        return f"OrderedPartition({[list(b) for b in self._blocks]})"

    @property
    def dim(self):
        return self._q - len(self._blocks)

    def cumulative_sizes(self):
        out, total = [], 0
        for b in self._blocks:
            total += len(b)
            out.append(total)
        return tuple(out)

    def block_of(self, x):
        """Index of the block containing ``x``."""
        for k, b in enumerate(self._blocks):
            if x in b:
                return k
        raise ValidationError(f"{x} is not in {{1..{self._q}}}")

    def base_permutation(self):
        """The permutation listing the blocks in order, each block ascending."""
        return tuple(x for b in self._blocks for x in b)

    def to_json(self):
        return [list(b) for b in self._blocks]

    @classmethod
    def from_json(cls, data, q=None):
        return cls(data, q)

    @classmethod
    def singletons(cls, perm):
        return cls([[x] for x in perm])


def _check_permutation(perm):
    perm = tuple(int(x) for x in perm)
    if sorted(perm) != list(range(1, len(perm) + 1)) or not perm:
        raise ValidationError(f"{perm} is not a permutation of 1..{len(perm)}")
    return perm


def vertex_point(perm):
    """Exact coordinates of the vertex ``P_pi``.

    Coordinate ``pi_k`` equals ``k - (q + 1) / 2``.

    >>> vertex_point((2, 1, 3))
    (Fraction(0, 1), Fraction(-1, 1), Fraction(1, 1))
    """
    perm = _check_permutation(perm)
    q = len(perm)
    centre = Fraction(q + 1, 2)
    coords = [Fraction(0)] * q
    for k, x in enumerate(perm, start=1):
        coords[x - 1] = k - centre
    return tuple(coords)


def _set_partitions(items):
    # unordered set partitions, blocks listed by least element
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def set_partitions(items):
    """Unordered partitions of ``items`` into non-empty blocks."""
    return _set_partitions(sorted(items))


def ordered_set_partitions(items):
    """All ordered partitions of ``items`` as lists of sorted tuples."""
    for part in _set_partitions(sorted(items)):
        for order in permutations(part):
            yield [tuple(sorted(b)) for b in order]


def ordered_partitions(q):
    """All ordered partitions of ``{1..q}``, sorted."""
    if q < 1:
        raise ValidationError("q must be at least 1")
    return sorted(OrderedPartition(p, q) for p in ordered_set_partitions(range(1, q + 1)))


def refines_or_equal(fine, coarse):
    """True if each block of ``coarse`` is split in place into consecutive
    blocks of ``fine``."""
    if fine.q != coarse.q:
        raise ValidationError(f"partitions of different sets: q={fine.q} vs q={coarse.q}")
    i = 0
    fb = fine.blocks
    for block in coarse.blocks:
        need = set(block)
        while need:
            if i >= len(fb) or not set(fb[i]) <= need:
                return False
            need -= set(fb[i])
            i += 1
    return i == len(fb)


def refines(fine, coarse):
    """Strict refinement: ``fine`` is a proper refinement of ``coarse``."""
    return refines_or_equal(fine, coarse) and fine != coarse


def refinements(coarse, proper=False):
    """All partitions refining ``coarse``, sorted.

    Each block is replaced independently by any ordered partition of itself.
    """
    per_block = [list(ordered_set_partitions(b)) for b in coarse.blocks]
    out = []
    for choice in product(*per_block):
        blocks = [b for sub in choice for b in sub]
        p = OrderedPartition(blocks, coarse.q)
        if proper and p == coarse:
            continue
        out.append(p)
    return sorted(out)


def coarsenings(fine, proper=False):
    """All partitions that ``fine`` refines: merges of runs of adjacent blocks."""
    s = len(fine)
    out = []
    # a coarsening is a choice of cut points among the s-1 gaps
    for cuts in product((False, True), repeat=s - 1):
        blocks, cur = [], list(fine.blocks[0])
        for k, cut in enumerate(cuts, start=1):
            if cut:
                blocks.append(cur)
                cur = list(fine.blocks[k])
            else:
                cur.extend(fine.blocks[k])
        blocks.append(cur)
        p = OrderedPartition(blocks, fine.q)
        if proper and p == fine:
            continue
        out.append(p)
    return sorted(out)


def face_vertices(partition):
    """Vertex permutations of the face: the Young-subgroup orbit of the
    block-ordered permutation.

    >>> sorted(face_vertices(OrderedPartition([[1, 2]])))
    [(1, 2), (2, 1)]
    """
    per_block = [permutations(b) for b in partition.blocks]
    return frozenset(tuple(x for blk in choice for x in blk) for choice in product(*per_block))


class PermutohedronFace:
    """A face of the permutohedron, labelled by an ordered partition."""

    __slots__ = ("partition", "dim", "vertex_permutations")

    def __init__(self, partition):
        self.partition = partition
        self.dim = partition.dim
        self.vertex_permutations = face_vertices(partition)

    def __eq__(self, other):
        return isinstance(other, PermutohedronFace) and self.partition == other.partition

    def __hash__(self):
        return hash(self.partition)

    def __repr__(self):
        return f"PermutohedronFace({self.partition.to_json()}, dim={self.dim})"

    def to_json(self):
        return {
            "partition": self.partition.to_json(),
            "dim": self.dim,
            "vertices": [list(v) for v in sorted(self.vertex_permutations)],
        }


class FaceLattice:
    """All faces of the permutohedron for a given ``q`` with the strict
    refinement order ``(finer, coarser)``."""

    def __init__(self, q):
        if not isinstance(q, int) or q < 1:
            raise ValidationError(f"q must be a positive integer, got {q!r}")
        self.q = q
        self.faces = [PermutohedronFace(p) for p in
                      sorted(ordered_partitions(q), key=lambda p: (p.dim, p))]
        self._index = {f.partition: i for i, f in enumerate(self.faces)}

    def __len__(self):
        return len(self.faces)

    def index(self, partition):
        return self._index[partition]

    def by_dim(self, d):
        return [f for f in self.faces if f.dim == d]

    def f_vector(self):
        counts = [0] * self.q
        for f in self.faces:
            counts[f.dim] += 1
        return counts

    def relations(self):
        """Strict order pairs ``(i, j)``: face ``i`` is a proper face of ``j``."""
        pairs = []
        for j, f in enumerate(self.faces):
            for p in refinements(f.partition, proper=True):
                pairs.append((self._index[p], j))
        return sorted(pairs)

    def to_json(self):
        return {"q": self.q, "faces": [f.to_json() for f in self.faces]}


def enumerate_faces(q):
    """The face lattice of the ``(q-1)``-permutohedron."""
    return FaceLattice(q)
