"""LTL parsing, name resolution, free-index inference, and quantifier
expansion."""

from __future__ import annotations

import pytest

from tests.conftest import flat_model
from ttmc.diagnostics import ParseError
from ttmc.syntax.ltl import (
    LAlways, LAnd, LAtom, LBool, LEvent, LEventually, LImplies, LMono, LNot,
    LOr, LQuant, LUntil, parse_ltl, parse_property_file, walk,
)
from ttmc.checker.expand import expand_quantifiers, invariant_body


class TestParsing:
    def test_train_safety_shape(self, train_abstract):
        f = parse_ltl(
            "forall t1 : TRAIN @ forall t2 : TRAIN @ "
            "[]( (t1 != t2 && loc[t1] != Out && loc[t2] != Out) "
            "=> loc[t1] != loc[t2] )",
            train_abstract,
        )
        assert isinstance(f, LQuant) and f.kind == "forall"
        assert isinstance(f.body, LQuant)
        assert isinstance(f.body.body, LAlways)
        # The temporal-free implication body stays one state atom.
        assert isinstance(f.body.body.operand, (LImplies, LAtom))

    def test_free_index_becomes_forall(self, train_abstract):
        f = parse_ltl("[](loc[t] == Entr => <>(loc[t] == Out))", train_abstract)
        assert isinstance(f, LQuant)
        assert f.kind == "forall" and f.var == "t" and f.set_name == "TRAIN"

    def test_mono_until_shape(self, nop_refined):
        f = parse_ltl(
            "mono(env.t) U (c_NOPparmtrip == e_Trip && env.t < 2)", nop_refined
        )
        assert isinstance(f, LUntil)
        assert isinstance(f.lhs, LMono) and f.lhs.timer == "env.t"
        assert isinstance(f.rhs, (LAnd, LAtom))

    def test_event_atom(self, train_abstract):
        f = parse_ltl("<> move_out(T1)", train_abstract)
        assert isinstance(f, LEventually)
        assert isinstance(f.operand, LEvent)
        assert f.operand.event == "move_out"

    def test_unknown_atom(self, train_abstract):
        with pytest.raises(ParseError) as err:
            parse_ltl("[](nosuchvar == 1)", train_abstract)
        assert err.value.code == "UnknownAtom"

    def test_event_arity_error(self, train_abstract):
        with pytest.raises(ParseError) as err:
            parse_ltl("<> move_out(T1, T2, T1)", train_abstract)
        assert err.value.code == "ArityError"

    def test_unknown_set(self, train_abstract):
        with pytest.raises(ParseError) as err:
            parse_ltl("forall z : NOSET @ [](loc[T1] == Out)", train_abstract)
        assert err.value.code in ("UnknownSet", "UnknownAtom")

    def test_primes_rejected(self, train_abstract):
        with pytest.raises(ParseError):
            parse_ltl("[](isgn' == true)", train_abstract)

    def test_call_predicate_inlined(self, train_abstract):
        f = parse_ltl("[](call(is_platform, loc[T1]) => <> (loc[T1] == Exit))",
                      train_abstract)
        atoms = [g for g in walk(f) if isinstance(g, LAtom)]
        assert atoms, "predicate call should inline to a state atom"

    def test_property_file(self):
        entries = parse_property_file(
            "-- comment line\n"
            "a : [](x == 1)\n"
            "\n"
            "b : <> y  -- trailing comment\n"
        )
        assert [(n, t) for n, t, _ in entries] == [
            ("a", "[](x == 1)"), ("b", "<> y"),
        ]


class TestExpansion:
    def test_forall_two_element_set(self, train_abstract):
        f = parse_ltl(
            "forall t1 : TRAIN @ forall t2 : TRAIN @ "
            "[]( (t1 != t2 && loc[t1] != Out && loc[t2] != Out) "
            "=> loc[t1] != loc[t2] )",
            train_abstract,
        )
        g = expand_quantifiers(f, train_abstract)
        # Four instantiations; the two with t1 == t2 are trivially true and
        # fold away, leaving a conjunction of two [] formulas.
        always_nodes = [n for n in walk(g) if isinstance(n, LAlways)]
        assert len(always_nodes) == 2

    def test_event_atom_expands_demonic(self, train_abstract):
        f = parse_ltl("<> move_in(T1)", train_abstract)
        g = expand_quantifiers(f, train_abstract)
        events = [n for n in walk(g) if isinstance(n, LEvent)]
        # One disjunct per demonic platform valuation (5 OPT_BLOCK values).
        assert len(events) == 5

    def test_no_quantifier_identity(self, train_abstract):
        f = parse_ltl("[](isgn => <> (!isgn))", train_abstract)
        assert expand_quantifiers(f, train_abstract) == f

    def test_exists_expands_to_disjunction(self, train_abstract):
        f = parse_ltl("exists u : TRAIN @ [](loc[u] == Out)", train_abstract)
        g = expand_quantifiers(f, train_abstract)
        assert isinstance(g, LOr)

    def test_invariant_body_detection(self, train_abstract):
        f = parse_ltl(
            "forall t1 : TRAIN @ [](loc[t1] != Exit || loc[t1] != Out)",
            train_abstract,
        )
        g = expand_quantifiers(f, train_abstract)
        assert invariant_body(g) is not None

    def test_liveness_is_not_invariant(self, train_abstract):
        f = parse_ltl("[](isgn => <>(!isgn))", train_abstract)
        assert invariant_body(expand_quantifiers(f, train_abstract)) is None


class TestQueueAtomsInProperties:
    def test_queue_count_and_first(self, train_refined):
        f = parse_ltl("[](qe.Count() <= 2)", train_refined)
        from ttmc.checker import verify

        assert verify(train_refined, f).holds
        g = parse_ltl("[](qe.Count() > 0 => (occ[qe.First()] || !occ[qe.First()]))",
                      train_refined)
        assert verify(train_refined, g).holds
