import random

import pytest

from qdamr.errors import UntypeableQuestionError
from qdamr.graph import parse_penman
from qdamr.reasoning import ReasoningType, classify, default_lexicon, load_lexicon
from support.fixtures_src import (
    bridging_graph,
    comparison_graph,
    intersection_graph,
    magazine_graph,
)
from support.oracles import rename_variables


def test_comparison_question():
    assert classify(comparison_graph()) == ReasoningType.COMPARISON


def test_intersection_question():
    assert classify(intersection_graph()) == ReasoningType.INTERSECTION


def test_bridging_question():
    assert classify(bridging_graph()) == ReasoningType.BRIDGING


def test_ordinal_comparison_question():
    assert classify(magazine_graph()) == ReasoningType.COMPARISON


def test_degree_edge_marks_comparison():
    g = parse_penman(
        "(t / tall-01 :ARG1 (u / amr-unknown) :degree (m / more) "
        ":compared-to (p / person))"
    )
    assert classify(g) == ReasoningType.COMPARISON


def test_parallel_predicate_branches_mark_intersection():
    g = parse_penman(
        "(h / have-03 :ARG0 (u / amr-unknown) :ARG1 (a / and "
        ":op1 (c / car :ARG1-of (o / own-01)) "
        ":op2 (d / dog :ARG1-of (l / love-01))))"
    )
    assert classify(g) == ReasoningType.INTERSECTION


def test_conjunction_without_predicates_stays_bridging():
    g = parse_penman(
        "(h / hold-01 :ARG0 (u / amr-unknown) :ARG1 (a / and "
        ":op1 (c / car) :op2 (d / dog)))"
    )
    assert classify(g) == ReasoningType.BRIDGING


def test_no_unknown_errors():
    with pytest.raises(UntypeableQuestionError):
        classify(parse_penman("(h / hold-01 :ARG0 (w / woman))"))


def test_two_unknowns_error():
    g = parse_penman("(a / and :op1 (u / amr-unknown) :op2 (u2 / amr-unknown))")
    with pytest.raises(UntypeableQuestionError):
        classify(g)


def test_invariant_under_renaming():
    rng = random.Random(23)
    for graph in (bridging_graph(), comparison_graph(), intersection_graph()):
        renamed = rename_variables(graph, rng)
        assert classify(renamed) == classify(graph)


def test_deterministic():
    g = comparison_graph()
    assert classify(g) == classify(g)


def test_lexicon_file_roundtrip(tmp_path):
    path = tmp_path / "lexicon.txt"
    path.write_text(
        "# comment\ncomparison have-degree-91\ndegree more\nconjunction or\n"
        "intersection same-01\ncomparison-root contrast-01\n",
        encoding="utf-8",
    )
    lex = load_lexicon(str(path))
    assert "have-degree-91" in lex.comparison_concepts
    assert "contrast-01" in lex.comparison_roots
    g = parse_penman("(c / contrast-01 :ARG1 (u / amr-unknown))")
    assert classify(g, lex) == ReasoningType.COMPARISON


def test_lexicon_rejects_bad_lines(tmp_path):
    path = tmp_path / "lexicon.txt"
    path.write_text("sideways more\n", encoding="utf-8")
    with pytest.raises(ValueError, match="lexicon.txt:1"):
        load_lexicon(str(path))


def test_default_lexicon_has_degree_frames():
    lex = default_lexicon()
    assert "have-degree-91" in lex.comparison_concepts
    assert "have-quant-91" in lex.comparison_concepts
