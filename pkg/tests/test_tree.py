import json
from fractions import Fraction

import numpy as np
import pytest

from fareychain import spinchain, transfer
from fareychain import tree as treemod
from fareychain.rings import ONE, RHO, Params, RhoPoly
from fareychain.words import SpinWord, all_words

SYM = Params.symbolic()


def poly(*coeffs):
    return RhoPoly(coeffs)


def test_row_two_polynomials():
    row = treemod.build_row(2, SYM)
    assert [(n.p, n.q) for n in row.nodes] == [
        (poly(1), poly(2, 1)),
        (poly(1, 1), poly(2, 1)),
    ]


def test_row_three_polynomials():
    row = treemod.build_row(3, SYM)
    assert [(n.p, n.q) for n in row.nodes] == [
        (poly(1), poly(2, 1, 1)),
        (poly(1, 1), poly(2, 3)),
        (poly(1, 2), poly(2, 3)),
        (poly(1, 1, 1), poly(2, 1, 1)),
    ]


def test_row_four_tent_gives_odd_dyadics():
    row = treemod.build_row(4, Params.exact(Fraction(0)))
    assert row.values() == [Fraction(k, 16) for k in range(1, 16, 2)]


def test_row_nodes_have_positive_coefficients():
    for n in range(1, 11):
        for node in treemod.build_row(n, SYM).nodes:
            assert node.p.has_nonnegative_coeffs()
            assert node.q.has_nonnegative_coeffs()


def test_child_of_root_pair_and_first_row():
    zero, one = treemod.root_endpoints(SYM)
    half = treemod.child_of_neighbours(zero, one, SYM)
    assert (half.p, half.q, half.rank) == (ONE, poly(2), 1)
    left = treemod.child_of_neighbours(zero, half, SYM)
    assert (left.p, left.q) == (poly(1), poly(2, 1))
    right = treemod.child_of_neighbours(one, half, SYM)
    assert (right.p, right.q) == (poly(1, 1), poly(2, 1))
    assert left.path.to_bits() == (0,) and right.path.to_bits() == (1,)


def test_non_neighbours_rejected():
    zero, one = treemod.root_endpoints(SYM)
    half = treemod.child_of_neighbours(zero, one, SYM)
    left = treemod.child_of_neighbours(zero, half, SYM)
    grandchild = treemod.child_of_neighbours(zero, left, SYM)
    with pytest.raises(ValueError):
        treemod.child_of_neighbours(grandchild, half, SYM)  # not adjacent in their row set


def test_neighbour_determinant_exact_scan():
    # p' q - p q' = +- rho^(rank of the older vertex) across all of T_6
    for n in range(1, 7):
        nodes = treemod.full_tree(n, SYM)
        for a, b in zip(nodes, nodes[1:]):
            lo, hi = (a, b) if a.rank <= b.rank else (b, a)
            cross = b.p * a.q - a.p * b.q
            assert cross == SYM.rho**lo.rank


def test_child_rule_regenerates_next_row():
    # rebuilding row n+1 from the sorted T_n via the child rule alone
    for n in range(1, 7):
        nodes = treemod.full_tree(n, SYM)
        children = []
        for a, b in zip(nodes, nodes[1:]):
            lo, hi = (a, b) if a.rank <= b.rank else (b, a)
            children.append(treemod.child_of_neighbours(lo, hi, SYM))
        expected = treemod.build_row(n + 1, SYM).nodes
        got = sorted(children, key=treemod.FareyNode.order_key)
        assert [(c.p, c.q, c.path) for c in got] == [(e.p, e.q, e.path) for e in expected]


def test_rows_strictly_increasing_float():
    for r in (0.0, 0.25, 0.5, 0.75, 1.0):
        p = Params.floating(r)
        for n in range(1, 13):
            vals = treemod.build_row(n, p).values()
            assert all(x < y for x, y in zip(vals, vals[1:]))


def test_row_mesh_shrinks():
    for r in (0.0, 0.5, 0.9):
        p = Params.floating(r)
        prev = 1.0
        for n in range(1, 17):
            vals = np.sort(np.concatenate([[0.0, 1.0]] + [
                np.asarray(treemod.build_row(m, p).values()) for m in range(1, n + 1)
            ]))
            mesh = float(np.max(np.diff(vals)))
            assert mesh <= prev + 1e-15
            prev = mesh


def test_generator_matrices():
    L, R, S = treemod.mat_L(SYM), treemod.mat_R(SYM), treemod.mat_S(SYM)
    assert L.det() == RHO and R.det() == RHO
    assert S.det() == poly(-1)
    assert (S @ S) == treemod.Mat2(ONE, poly(), poly(), ONE)
    assert treemod.mat_I(1, SYM) == S @ R  # I_1 = L S = S R
    assert (L @ S) == (S @ R)


def test_presentation_examples():
    L = treemod.matrix_presentation(SpinWord(0, 0), SYM)
    assert L.image_of_one() == (ONE, poly(2))
    LL = treemod.matrix_presentation(SpinWord.from_bits((0,)), SYM)
    assert LL.image_of_one() == (poly(1), poly(2, 1))
    LR = treemod.matrix_presentation(SpinWord.from_bits((1,)), SYM)
    assert LR.image_of_one() == (poly(1, 1), poly(2, 1))


def test_presentation_matches_tables_and_determinant():
    for k in range(0, 9):
        table = spinchain.pq_tables(k, SYM)
        for w in all_words(k):
            X = treemod.matrix_presentation(w, SYM)
            assert X.image_of_one() == (table.p[w.index], table.q[w.index])
            assert X.det() == RHO ** (k + 1)


def test_trace_pair_left_powers():
    for n in (1, 2, 5):
        X = treemod.matrix_presentation(SpinWord(n - 1, 0), SYM)
        T0, T1 = treemod.trace_pair(X, SYM)
        assert T0 == ONE + RHO**n
        assert T1 == RhoPoly([1] * n)


def test_trace_pair_sum_identity():
    # T0 + T1 = r p + rho q, with (p, q) the image of 1
    r_sym = SYM.r
    for k in range(0, 7):
        for w in all_words(k):
            X = treemod.matrix_presentation(w, SYM)
            p, q = X.image_of_one()
            T0, T1 = treemod.trace_pair(X, SYM)
            assert T0 + T1 == r_sym * p + RHO * q
    X = treemod.matrix_presentation(SpinWord(0, 0), SYM)
    T0, T1 = treemod.trace_pair(X, SYM)
    assert T0 + T1 == poly(2, 1)  # r * 1 + rho * 2 at p/q = 1/2


def test_trace_pair_farey_parent_form():
    # at r = 1 the pair is {p' + q'', p'' + q'} for the two mediant parents
    one_params = Params.exact(Fraction(1))
    for n in range(1, 7):
        nodes = treemod.full_tree(n, one_params)
        for a, b in zip(nodes, nodes[1:]):
            lo, hi = (a, b) if a.rank <= b.rank else (b, a)
            child = treemod.child_of_neighbours(lo, hi, one_params)
            X = treemod.matrix_presentation(child.path, one_params)
            assert child.p == a.p + b.p and child.q == a.q + b.q
            T0, T1 = treemod.trace_pair(X, one_params)
            assert {T0, T1} == {a.p + b.q, b.p + a.q}


def test_extended_row_farey_is_stern_brocot():
    row = treemod.extended_row(1, Params.exact(Fraction(1)))
    assert [(n.p, n.q) for n in row.nodes] == [(Fraction(1), Fraction(2)), (Fraction(2), Fraction(1))]
    row2 = treemod.extended_row(2, Params.exact(Fraction(1)))
    assert [Fraction(n.p, n.q) for n in row2.nodes] == [
        Fraction(1, 3), Fraction(2, 3), Fraction(3, 2), Fraction(3, 1)]


def test_extended_row_general_r():
    row = treemod.extended_row(1, SYM)
    assert (row.nodes[0].p, row.nodes[0].q) == (ONE, poly(2))
    assert (row.nodes[1].p, row.nodes[1].q) == (poly(1, 1), RHO)  # (3-r)/(2-r)


def test_reflection_preserves_descendant_denominator():
    # r p' + rho q' = r p + rho q for the reflected vertex; at p/q = 1/2 both are 4 - r
    from fareychain.maps import involution_pair

    r_sym, rho = SYM.r, SYM.rho
    p2, q2 = involution_pair(ONE, poly(2), SYM)
    assert r_sym * p2 + rho * q2 == r_sym * ONE + rho * poly(2) == poly(2, 1)
    for node in treemod.build_row(4, SYM).nodes:
        rp, rq = involution_pair(node.p, node.q, SYM)
        assert r_sym * rp + rho * rq == r_sym * node.p + rho * node.q


def test_extended_row_matches_pair_recursion_exact():
    ex = Params.exact(Fraction(3, 7))
    for n in range(1, 9):
        row_pairs = sorted((node.p, node.q) for node in treemod.extended_row(n, ex).nodes)
        rec_pairs = sorted(transfer.extended_pairs(n + 1, ex))
        assert row_pairs == rec_pairs


def test_symbolic_row_cap():
    with pytest.raises(ValueError):
        treemod.build_row(20, SYM)


def test_node_records_and_adjacency():
    recs = treemod.node_records(treemod.build_row(2, Params.floating(1.0)))
    assert recs[0]["sigma"] == "0" and recs[1]["sigma"] == "1"
    assert float(recs[0]["value"]) == pytest.approx(1 / 3)
    adj = treemod.tree_adjacency(3, Params.floating(0.5))
    assert len(adj["nodes"]) == 1 + 2 + 4
    assert len(adj["edges"]) == 6
    parents = {e["child"]: e["parent"] for e in adj["edges"]}
    assert parents["01"] == "0" and parents["0"] == "root"
    json.dumps(adj)  # serializable
