from itertools import permutations

import pytest

import bfrank._core_py as pure
from bfrank._backend import BACKEND
from bfrank.equivalence import _intern_atoms
from bfrank.ordinals import cnf_parse
from bfrank.spaces import metric_view, validate_space
from bfrank.trees import TreeSpec, build_tree, tree_function_structure, tree_metric_space

compiled = pytest.importorskip("bfrank._core")


def views():
    p3 = validate_space([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    t = build_tree(TreeSpec(0, cnf_parse("1"), 2))
    return [metric_view(p3),
            metric_view(tree_metric_space(t)),
            tree_function_structure(t)]


def test_backend_selected():
    assert BACKEND == "compiled"


def test_compatible_ys_agree():
    for v in views():
        flat, ptype = _intern_atoms(v)
        n = v.size
        for A, B in [((0,), (1,)), ((0, 1), (1, 0)), ((2,), (2,))]:
            mask = bytearray(n)
            for b in B:
                mask[b] = 1
            for x in range(n):
                assert pure.compatible_ys(flat, n, A, B, x, mask) == \
                    compiled.compatible_ys(flat, n, A, B, x, mask)


def test_extension_and_isomorphism_agree():
    for v in views():
        flat, ptype = _intern_atoms(v)
        n = v.size
        pairs = [(a, b) for k in (1, 2)
                 for a in permutations(range(n), k)
                 for b in permutations(range(n), k)]
        for A, B in pairs:
            assert pure.extends_to_automorphism(flat, n, ptype, A, B) == \
                compiled.extends_to_automorphism(flat, n, ptype, A, B)
        for A1, B1 in pairs[:20]:
            for A2, B2 in pairs[:20]:
                if len(A1) != len(A2):
                    continue
                ic = {}
                l1 = compiled.refined_pair_labels(flat, n, ptype, A1, B1, ic)
                l2 = compiled.refined_pair_labels(flat, n, ptype, A2, B2, ic)
                ip = {}
                m1 = pure.refined_pair_labels(flat, n, ptype, A1, B1, ip)
                m2 = pure.refined_pair_labels(flat, n, ptype, A2, B2, ip)
                assert compiled.map_isomorphic(flat, n, ptype, A1, B1, l1,
                                               A2, B2, l2) == \
                    pure.map_isomorphic(flat, n, ptype, A1, B1, m1,
                                        A2, B2, m2)


def test_refined_labels_same_partition():
    # interned label values differ between backends; the induced equalities
    # must not
    for v in views():
        flat, ptype = _intern_atoms(v)
        n = v.size
        ic, ip = {}, {}
        seen = {}
        for a in permutations(range(n), 2):
            for b in permutations(range(n), 2):
                lc = tuple(compiled.refined_pair_labels(flat, n, ptype,
                                                        a, b, ic))
                lp = tuple(pure.refined_pair_labels(flat, n, ptype,
                                                    a, b, ip))
                assert seen.setdefault(lc, lp) == lp


def test_machine_agrees_across_backends(monkeypatch):
    import bfrank.equivalence as eq
    results = {}
    for backend in (compiled, pure):
        monkeypatch.setattr(eq, "refined_pair_labels",
                            backend.refined_pair_labels)
        monkeypatch.setattr(eq, "map_isomorphic", backend.map_isomorphic)
        monkeypatch.setattr(eq, "extends_to_automorphism",
                            backend.extends_to_automorphism)
        monkeypatch.setattr(eq, "compatible_ys", backend.compatible_ys)
        for i, v in enumerate(views()):
            eq._machines.clear()
            m = eq._Machine(v)
            results.setdefault(i, []).append((m.rank, len(m.classes)))
        eq._machines.clear()
    for pair in results.values():
        assert pair[0] == pair[1]
