import copy
from itertools import combinations

import pytest

from morsecx.cells import (
    Cell, ComplexPoset, IntegrityError, LevelCurves, build_complex, cell_counts_by_framing,
    check_branched_covering, check_connected, check_delta_transitivity, check_regularity,
    enumerate_cells, run_checks, split_atom, split_cell)
from morsecx.molecule import DOWN, UP, atom_boundary, canonical_key
from morsecx.permutohedron import (
    OrderedPartition, ValidationError, ordered_partitions, ordered_set_partitions, refinements)
from morsecx.topology import homology, order_complex

from oracles import brute_class_count

OP = OrderedPartition


# enumeration ----------------------------------------------------------------

def test_k121_cells(k121):
    assert len(k121.cells) == 3
    assert k121.f_vector() == [2, 1]


def test_k112_single_cell(k112):
    assert len(k112.cells) == 1
    assert k112.cells[0].dim == 0
    assert k112.boundary == set()


def test_k132_euler(k132):
    assert k132.euler_characteristic() == 8
    assert k132.dimension == 2


@pytest.mark.parametrize("pqr", [(1, 1, 1), (2, 1, 2), (0, 2, 1), (1, 0, 1), (3, 1, 1)])
def test_parameter_errors(pqr):
    with pytest.raises(ValidationError):
        enumerate_cells(*pqr)


def test_parameter_error_names_constraint():
    with pytest.raises(ValidationError, match="not an integer"):
        enumerate_cells(1, 1, 1)


@pytest.mark.parametrize("pqr", [(1, 1, 2), (2, 1, 1), (1, 2, 1), (2, 2, 2),
                                 (1, 2, 3), (3, 2, 1), (1, 3, 2)])
def test_cell_count_matches_brute_force(pqr):
    # exhaustive molecules over all matchings, classes by 4**q rotation search
    assert len(enumerate_cells(*pqr)) == brute_class_count(*pqr)


def test_cells_sorted_and_labelled(k132):
    assert [c.id for c in k132.cells] == list(range(len(k132.cells)))
    order = [(c.dim, c.face, c.key) for c in k132.cells]
    assert order == sorted(order)
    for c in k132.cells:
        assert c.dim == k132.q - len(c.face)
        assert c.face == c.molecule.framing
    assert len({c.key for c in k132.cells}) == len(k132.cells)


def test_every_framing_is_realized(k132):
    counts = cell_counts_by_framing(k132.cells)
    assert set(counts) == set(ordered_partitions(3))
    assert sum(counts.values()) == 92


def test_parallel_enumeration_is_identical(k132):
    par = enumerate_cells(1, 3, 2, workers=2)
    assert [(c.id, c.key) for c in par] == [(c.id, c.key) for c in k132.cells]


# split_cell -----------------------------------------------------------------

def test_split_identity(k132):
    for c in k132.cells:
        assert split_cell(c, c.face) is c


def test_split_rejects_non_refinement(k121):
    top = k121.cells[-1]
    low = [c for c in k121.cells if c.dim == 0][0]
    with pytest.raises(ValidationError):
        split_cell(low, top.face)


def test_split_torus_top_cell(k121):
    top = next(c for c in k121.cells if c.dim == 1)
    fine = OP([[1], [2]])
    got = split_cell(top, fine)
    target = next(c for c in k121.cells if c.face == fine)
    assert got.key == target.key


def test_split_transitivity_instance(k132):
    fine, mid = OP([[1], [2], [3]]), OP([[1], [2, 3]])
    index = {c.key: c for c in k132.cells}
    for c in k132.cells:
        if c.face == OP([[1, 2, 3]]):
            assert split_cell(c, fine, index) is split_cell(split_cell(c, mid, index), fine, index)


def test_split_injective_per_cell(k132, k121):
    for cx in (k121, k132):
        index = {c.key: c for c in cx.cells}
        for c in cx.cells:
            imgs = [split_cell(c, f, index).id for f in refinements(c.face)]
            assert len(set(imgs)) == len(imgs)


def test_split_miss_is_integrity_error(k121):
    top = next(c for c in k121.cells if c.dim == 1)
    with pytest.raises(IntegrityError):
        split_cell(top, OP([[1], [2]]), index={})


# boundary relation ----------------------------------------------------------

def test_k121_boundary(k121):
    e = next(c for c in k121.cells if c.dim == 1)
    vs = sorted(c.id for c in k121.cells if c.dim == 0)
    assert k121.boundary == {(vs[0], e.id), (vs[1], e.id)}
    assert k121.r0(e.id).dim == 1
    assert k121.r0(e.id).partition == OP([[1, 2]])


def test_boundary_pairs_go_down_in_dimension(k132):
    for a, b in k132.boundary:
        assert k132.by_id[a].dim < k132.by_id[b].dim


def test_boundary_is_transitively_closed(k132):
    for a, b in k132.boundary:
        for c in k132.above(b):
            assert (a, c) in k132.boundary


def test_closure_sizes_match_faces(k132):
    # a 2-cell over a hexagon has 12 proper faces, over a square 8
    for c in k132.cells:
        if c.dim == 2:
            assert len(k132.below(c.id)) == 12
        elif c.dim == 1:
            assert len(k132.below(c.id)) == 2


def test_k132_connected(k132):
    assert k132.is_connected()
    assert check_connected(k132).ok


# checks ---------------------------------------------------------------------

@pytest.mark.parametrize("name", ["k121", "k132", "k112"])
def test_all_checks_pass(name, request):
    cx = request.getfixturevalue(name)
    for rep in run_checks(cx):
        assert rep.ok, rep


def _without_delta(cx):
    return ComplexPoset(cx.p, cx.q, cx.r, cx.cells, set(cx.boundary))


def test_regularity_detects_duplicate_boundary_target(k121):
    bad = _without_delta(k121)
    e = next(c for c in k121.cells if c.dim == 1)
    v = next(c for c in k121.cells if c.dim == 0)
    twin = Cell(99, v.molecule, v.key)
    bad.cells.append(twin)
    bad.by_id[99] = twin
    bad.boundary.add((99, e.id))
    rep = check_regularity(bad)
    assert not rep.ok
    assert any(f"cell {e.id}" in m for m in rep.failures)


def test_regularity_detects_missing_face(k121):
    bad = _without_delta(k121)
    bad.boundary.pop()
    assert not check_regularity(bad).ok


def test_regularity_detects_noninjective_delta(k121):
    bad = ComplexPoset(k121.p, k121.q, k121.r, k121.cells, k121.boundary, dict(k121.delta))
    keys = sorted(bad.delta, key=repr)
    bad.delta[keys[0]] = bad.delta[keys[1]]
    rep = check_regularity(bad)
    assert any("not injective" in m for m in rep.failures)


def test_branched_covering_negative():
    # a single vertex over P^1 with no edge above it
    cx = build_complex(1, 2, 1)
    v = next(c for c in cx.cells if c.dim == 0)
    lone = ComplexPoset(1, 2, 1, [v], set())
    rep = check_branched_covering(lone)
    assert not rep.ok
    assert any("no lift" in m for m in rep.failures)


def test_branched_covering_detects_dimension_mismatch(k121):
    cells = copy.copy(k121.cells)
    e = next(c for c in cells if c.dim == 1)
    broken = copy.copy(e)
    broken.dim = 0
    cx = ComplexPoset(1, 2, 1, [broken if c is e else c for c in cells], k121.boundary)
    assert not check_branched_covering(cx).ok


def test_delta_transitivity_exhaustive(k121, k132):
    assert check_delta_transitivity(k121).ok
    assert check_delta_transitivity(k132).ok


def test_disconnected_poset_detected(k121):
    vs = [c for c in k121.cells if c.dim == 0]
    cx = ComplexPoset(1, 2, 1, vs, set())
    assert not check_connected(cx).ok
    assert len(cx.components()) == 2


# surgery --------------------------------------------------------------------

def _atoms(*complexes):
    return sorted({a for cx in complexes for c in cx.cells for a in c.molecule.atoms},
                  key=lambda a: a.key())


def _same_cycle(a, b):
    a, b = list(a), list(b)
    if len(a) != len(b):
        return False
    return any(a[k:] + a[:k] == b for k in range(len(a)))


def test_surgery_conservation(k121, k132):
    checked = 0
    for atom in _atoms(k121, k132):
        if len(atom.saddles) < 2:
            continue
        for order in ordered_set_partitions(atom.saddles):
            if len(order) < 2:
                continue
            res = split_atom(atom, order)
            # one surgery per saddle, sub-blocks processed in order
            done = [v for v, _, _ in res.trace]
            assert sorted(done) == list(atom.saddles)
            level = [next(k for k, b in enumerate(order) if v in b) for v in done]
            assert level == sorted(level)
            for _, before, after in res.trace:
                assert abs(after - before) == 1
            checked += 1
    assert checked > 0


def test_final_curves_are_up_circles(k121, k132):
    for atom in _atoms(k121, k132):
        start = LevelCurves(atom)
        down = [c for c in atom_boundary(atom) if c.label == DOWN]
        assert len(start.curves) == len(down)
        assert {start.corners(c) for c in start.curves} == {c.corners for c in down}
        end = LevelCurves(atom, processed=atom.saddles)
        up = [c.walk for c in atom_boundary(atom) if c.label == UP]
        got = [[end.corner_of(e) for e in cur] for cur in end.curves]
        assert len(got) == len(up)
        # level curves run opposite to the boundary walk of the neighbourhood
        for walk in up:
            assert any(_same_cycle(g, list(reversed(walk))) for g in got)


def test_split_atom_rejects_bad_blocks(k132):
    atom = next(a for a in _atoms(k132) if len(a.saddles) == 3)
    with pytest.raises(ValidationError):
        split_atom(atom, [(1,), (2,)])


def test_split_molecules_keep_invariants(k132):
    index = {c.key: c for c in k132.cells}
    for c in k132.cells:
        for fine in refinements(c.face, proper=True):
            low = split_cell(c, fine)
            assert low.key == canonical_key(low.molecule)
            assert low.key in index
            assert low.face == fine


# Euler characteristic -------------------------------------------------------

@pytest.mark.parametrize("name", ["k121", "k132", "k112"])
def test_euler_matches_homology(name, request):
    cx = request.getfixturevalue(name)
    h = homology(order_complex(cx))
    assert cx.euler_characteristic() == sum((-1) ** k * b for k, (b, _) in enumerate(h))


# serialization --------------------------------------------------------------

def test_complex_json_round_trip(k132):
    data = k132.to_json()
    assert set(data) == {"params", "cells", "boundary"}
    assert data["params"] == {"p": 1, "q": 3, "r": 2, "genus": 1}
    back = ComplexPoset.from_json(data)
    assert back.dumps() == k132.dumps()
    assert [c.key for c in back.cells] == [c.key for c in k132.cells]
    assert check_regularity(back).ok


def test_from_json_rejects_inconsistent_face(k121):
    data = k121.to_json()
    data["cells"][0]["face"] = [[2], [1]] if data["cells"][0]["face"] == [[1], [2]] else [[1], [2]]
    with pytest.raises(ValidationError):
        ComplexPoset.from_json(data)


def test_dot_export(k121):
    dot = k121.to_dot()
    assert dot.startswith("graph K_1_2_1 {")
    assert dot.count(" -- ") == 1
    assert dot.endswith("}\n")
