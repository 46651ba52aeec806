import pytest

from padchar.errors import ValidationError
from padchar.fuzz import random_galois_model, rng_for
from padchar.rootgal import (
    NONSYMMETRIC,
    SYMM_RAM,
    SYMM_UNRAM,
    GaloisModel,
    RootDatum,
    automorphism_group,
    identity,
    mat_vec,
    neg_mat,
    orbits,
    positive_roots,
    root_datum,
    simple_roots,
    split_rank,
    weyl_group,
    weyl_transport,
)

NEG2 = neg_mat(identity(2))


@pytest.mark.parametrize("name,n_roots,n_weyl", [("A1", 2, 2), ("A2", 6, 6), ("C2", 8, 8),
                                                 ("B2", 8, 8), ("GL2", 2, 2)])
def test_catalog_sizes(name, n_roots, n_weyl):
    rd = root_datum(name)
    assert len(rd.roots) == n_roots
    assert len(positive_roots(rd)) == n_roots // 2
    assert len(weyl_group(rd)) == n_weyl


def test_aliases_and_unknown_names():
    assert root_datum("PGSp4").roots == root_datum("C2").roots
    assert root_datum("pgl2").name == "A1"
    with pytest.raises(ValidationError):
        root_datum("E8")


def test_c2_has_short_alpha_and_long_beta():
    rd = root_datum("C2")
    assert simple_roots(rd) == [(0, 1), (1, 0)]
    # <beta, alpha^vee> = -2 since alpha is short
    assert rd.coroot((1, 0)) == (2, -2)
    assert rd.coroot((0, 1)) == (-1, 2)
    assert set(positive_roots(rd)) == {(1, 0), (0, 1), (1, 1), (2, 1)}


def test_automorphisms_include_diagram_symmetry_for_a2():
    assert len(automorphism_group(root_datum("A2"))) == 12
    assert len(automorphism_group(root_datum("C2"))) == 8


def test_root_datum_rejects_bad_pairing():
    with pytest.raises(ValidationError):
        RootDatum(1, ((1,), (-1,)), ((1,), (-1,)))
    with pytest.raises(ValidationError):
        RootDatum(1, ((1,),), ((2,),))


def test_a1_elliptic_orbit():
    part = orbits(root_datum("A1"), GaloisModel(((-1,),)), 5)
    assert len(part) == 1
    (o,) = part.orbits
    assert (o.kind, o.e, o.f, o.n, o.q_alpha) == (SYMM_UNRAM, 1, 2, 2, 25)


def test_c2_inversion_gives_four_symmetric_unramified_orbits():
    part = orbits(root_datum("C2"), GaloisModel(NEG2), 5)
    assert sorted(o.orbit_id for o in part) == ["0,1", "1,0", "1,1", "2,1"]
    for o in part:
        assert o.kind == SYMM_UNRAM and o.f == 2 and o.n == 2
        assert set(o.roots) == {o.rep, tuple(-x for x in o.rep)}


def test_a1_ramified_orbit():
    part = orbits(root_datum("A1"), GaloisModel(((1,),), (((-1,),),)), 3)
    (o,) = part.orbits
    assert (o.kind, o.e, o.f, o.n) == (SYMM_RAM, 2, 1, 2)
    assert o.ramified


def test_split_torus_orbits_are_nonsymmetric_and_paired():
    part = orbits(root_datum("A2"), GaloisModel(identity(2)), 7)
    assert len(part) == 6
    for o in part:
        assert o.kind == NONSYMMETRIC
        assert part[o.neg_id].rep == tuple(-x for x in o.rep)
    assert len(part.pm_orbits()) == 3


def test_orbits_reject_non_automorphism():
    with pytest.raises(ValidationError):
        orbits(root_datum("C2"), GaloisModel(((0, 1), (1, 0))))


def test_random_models_partition_the_roots():
    rng = rng_for(11)
    for _ in range(60):
        rd = root_datum(rng.choice(["A1", "A2", "C2", "B2"]))
        gm = random_galois_model(rng, rd)
        part = orbits(rd, gm)
        seen = [a for o in part for a in o.roots]
        assert sorted(seen) == sorted(rd.roots)
        for o in part:
            # orbit by brute force under the generated group
            assert set(o.roots) == {mat_vec(g, o.rep) for g in gm.group}
            assert o.n == o.e * o.f
            neg = tuple(-x for x in o.rep)
            assert (neg in o.roots) == o.symmetric


def test_identity_transport_is_identity_relabeling():
    rd = root_datum("C2")
    gm = GaloisModel(NEG2)
    tr = weyl_transport(rd, gm, identity(2))
    assert tr.orbit_map == {o.orbit_id: o.orbit_id for o in tr.source}
    assert tr.galois == gm


def test_transport_by_simple_reflection_permutes_orbits():
    rd = root_datum("C2")
    s_alpha = rd.reflection_matrix((1, 0))
    tr = weyl_transport(rd, GaloisModel(NEG2), s_alpha)
    # s_alpha(beta) = beta + 2 alpha, and orbit ids follow the moved representatives
    assert tr.root_map[(0, 1)] == (2, 1)
    assert tr.orbit_map["0,1"] == "2,1"
    assert tr.orbit_map["1,0"] == "-1,0"


def test_transport_rejects_non_root_preserving_matrix():
    with pytest.raises(ValidationError):
        weyl_transport(root_datum("A2"), GaloisModel(identity(2)), ((2, 0), (0, 1)))


def test_split_rank_examples():
    a1 = root_datum("A1")
    assert split_rank(a1, ((1,),), a1.roots) == 1
    # elliptic torus in PGL2 still sits in a split quotient
    assert split_rank(a1, ((-1,),), a1.roots) == 1
    assert split_rank(a1, ((-1,),), []) == 0
    c2 = root_datum("C2")
    assert split_rank(c2, NEG2, c2.roots) == 2
    assert split_rank(c2, NEG2, [(0, 1), (0, -1), (2, 1), (-2, -1)]) == 2
    assert split_rank(c2, NEG2, [(0, 1), (0, -1)]) == 1
    a2 = root_datum("A2")
    cox = ((0, -1), (1, -1))
    assert split_rank(a2, cox, a2.roots) == 2
    assert split_rank(a2, cox, []) == 0


def test_split_rank_requires_stable_subsystem():
    c2 = root_datum("C2")
    with pytest.raises(ValidationError):
        split_rank(c2, c2.reflection_matrix((1, 0)), [(0, 1), (0, -1)])
