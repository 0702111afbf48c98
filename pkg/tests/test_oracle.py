"""The level-1 word-reduction oracle and its agreement with the engine."""

from wrsp.oracle import (
    build_oracle,
    compare_multiplication_tables,
    oracle_index_of,
    reduce_word,
    word_of_form,
    X, Y0, Y1, S0, S1, C,
)
from wrsp.subgroup import centre_block_subgroup


def test_reduction_rules():
    assert reduce_word([Y0, Y0]) == (S0,)
    assert reduce_word([Y1, Y0]) == (Y0, Y1, C)
    assert reduce_word([X, X]) == ()
    assert reduce_word([Y0, X]) == (X, Y1)
    assert reduce_word([S1, S0]) == (S0, S1)
    assert reduce_word([C, Y0, X, X, C]) == (Y0,)


def test_word_closure_is_the_full_group():
    oracle = build_oracle()
    assert oracle.order == 64
    assert len(set(oracle.forms)) == 64


def test_order_census_and_centre():
    oracle = build_oracle()
    census = oracle.order_census()
    assert max(census) == 8
    assert census[1] == 1
    assert sum(census.values()) == 64
    assert len(oracle.centre()) == 4


def test_engine_table_equals_oracle_table(ctx1):
    oracle = build_oracle()
    rep = compare_multiplication_tables(ctx1, oracle)
    assert rep["ok"], rep
    assert rep["pairs_checked"] == 64 * 64


def test_engine_forms_inject_into_oracle(ctx1):
    oracle = build_oracle()
    seen = {oracle_index_of(oracle, g) for g in ctx1.all_elements()}
    assert len(seen) == 64


def test_oracle_centre_sits_in_the_centre_block(ctx1):
    oracle = build_oracle()
    z_idx = {oracle_index_of(oracle, g)
             for g in centre_block_subgroup(ctx1).enumerate_elements()}
    assert set(oracle.centre()) <= z_idx


def test_word_of_form_round_trip(ctx1):
    oracle = build_oracle()
    for g in ctx1.all_elements():
        w = word_of_form(g.t, g.a & 1, (g.a >> 1) & 1,
                         g.z & 1, (g.z >> 1) & 1, (g.z >> 2) & 1)
        assert reduce_word(w) == w
