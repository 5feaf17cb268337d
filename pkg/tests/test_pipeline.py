import random

import pytest

from qdamr.backends import load_fixtures
from qdamr.errors import (
    GraphError,
    OpEvaluationError,
    PipelineStageError,
    UnsupportedComparisonError,
)
from qdamr.graph import Literal, Var, parse_penman, serialize_penman
from qdamr.pipeline import (
    DiscreteOp,
    OpKind,
    ValueDomain,
    answer_multihop,
    collect_evidence,
    construct_op_question,
    decompose,
    eval_discrete_op,
    find_operation,
    parse_date,
    substitute_answer,
    trace_to_dict,
)
from qdamr.reasoning import ReasoningType
from qdamr.segmentation import SubgraphRole
from support import fixtures_src as src


@pytest.fixture(scope="module")
def backend(fixtures_path):
    return load_fixtures(fixtures_path)


class TestSubstituteAnswer:
    def test_bridge_becomes_named_entity(self, backend):
        from qdamr.segmentation import find_secondary_unknown, unknowns_based_segmentation

        g = src.bridging_graph()
        seg = unknowns_based_segmentation(g, find_secondary_unknown(g))
        out = substitute_answer(seg.subgraphs[1], "w", "Shirley Temple")
        assert ("w", ":name", Var("z0")) in out.edges
        assert ("z0", ":op1", Literal("Shirley")) in out.edges
        assert ("z0", ":op2", Literal("Temple")) in out.edges
        assert backend.generate_text(out) == src.B_SUBQ2_SUBSTITUTED

    def test_multi_token_answer_with_punctuation(self):
        g = parse_penman("(h / hold-01 :ARG0 (w / woman) :ARG1 (u / amr-unknown))")
        out = substitute_answer(g, "w", "August 14, 1965")
        ops = [e for e in out.edges if e[0] == "z0" and e[1].startswith(":op")]
        assert [e[2] for e in ops] == [Literal("August"), Literal("14"), Literal("1965")]

    def test_existing_subtree_is_replaced(self):
        g = parse_penman(
            "(h / hold-01 :ARG0 (w / woman :mod (o / old)) :ARG1 (u / amr-unknown))"
        )
        out = substitute_answer(g, "w", "Ada Lovelace")
        assert "o" not in out.concepts
        assert out.concepts["w"] == "woman"

    def test_missing_bridge_variable(self):
        g = parse_penman("(h / hold-01 :ARG1 (u / amr-unknown))")
        with pytest.raises(GraphError, match="bridge variable"):
            substitute_answer(g, "w", "x")

    def test_substituting_own_concept_still_rewrites_to_named_form(self):
        g = parse_penman("(h / hold-01 :ARG0 (w / woman) :ARG1 (u / amr-unknown))")
        out = substitute_answer(g, "w", "woman")
        assert ("w", ":name", Var("z0")) in out.edges
        assert ("z0", ":op1", Literal("woman")) in out.edges


class TestFindOperation:
    def test_older_maps_to_smaller_over_dates(self):
        op = find_operation("Who is older, Annie Morton or Terry Richardson?")
        assert op.kind == OpKind.SMALLER_OF
        assert op.domain == ValueDomain.DATE
        assert op.subjects == ("Annie Morton", "Terry Richardson")

    def test_started_first_maps_to_smaller_over_dates(self):
        op = find_operation("Which magazine was started first, A or B?")
        assert (op.kind, op.domain) == (OpKind.SMALLER_OF, ValueDomain.DATE)

    def test_same_country_maps_to_same_entity(self):
        op = find_operation("Are both Coldplay and Pierre Bouvier from the same country?")
        assert (op.kind, op.domain) == (OpKind.SAME_ENTITY_YES_NO, ValueDomain.STRING)
        assert op.subjects == ("Coldplay", "Pierre Bouvier")

    def test_explicit_entities_win(self):
        op = find_operation("Who is taller, A or B?", entities=("X", "Y"))
        assert (op.kind, op.domain) == (OpKind.LARGER_OF, ValueDomain.NUMBER)
        assert op.subjects == ("X", "Y")

    def test_unknown_keyword_errors(self):
        with pytest.raises(UnsupportedComparisonError):
            find_operation("Which magazine is bluer, A or B?")

    def test_ordering_ops_require_ordered_domain(self):
        with pytest.raises(ValueError):
            DiscreteOp(OpKind.SMALLER_OF, ValueDomain.STRING, ("a", "b"))


class TestConstructOpQuestion:
    def test_smaller_template(self):
        op = DiscreteOp(OpKind.SMALLER_OF, ValueDomain.DATE, ("A", "B"))
        assert (
            construct_op_question(op, "August 14, 1965", "October 8, 1970")
            == "Which is smaller (August 14, 1965)(October 8, 1970)?"
        )

    def test_same_entity_template(self):
        op = DiscreteOp(OpKind.SAME_ENTITY_YES_NO, ValueDomain.STRING, ("A", "B"))
        assert construct_op_question(op, "British", "Canadian") == "Is (British) the same as (Canadian)?"

    def test_identical_answers_still_templated(self):
        op = DiscreteOp(OpKind.LARGER_OF, ValueDomain.NUMBER, ("A", "B"))
        assert construct_op_question(op, "3", "3") == "Which is larger (3)(3)?"


class TestEvalDiscreteOp:
    def test_smaller_of_dates_selects_earlier_entity(self):
        op = DiscreteOp(OpKind.SMALLER_OF, ValueDomain.DATE, ("Annie Morton", "Terry Richardson"))
        assert eval_discrete_op(op, "October 8, 1970", "August 14, 1965") == "Terry Richardson"
        assert eval_discrete_op(op, "August 14, 1965", "October 8, 1970") == "Annie Morton"

    def test_same_entity_yes_no(self):
        op = DiscreteOp(OpKind.SAME_ENTITY_YES_NO, ValueDomain.STRING, ("A", "B"))
        assert eval_discrete_op(op, "British", "Canadian") == "no"
        assert eval_discrete_op(op, "British", "british ") == "yes"
        assert eval_discrete_op(op, "The British", "british") == "yes"

    def test_intersect_sets(self):
        op = DiscreteOp(OpKind.INTERSECT_SETS, ValueDomain.STRING, ("A", "B"))
        assert eval_discrete_op(op, "British", "Canadian") == "no"
        assert eval_discrete_op(op, "London and Paris", "Paris, Berlin") == "paris"

    def test_unparseable_value_raises(self):
        op = DiscreteOp(OpKind.SMALLER_OF, ValueDomain.DATE, ("A", "B"))
        with pytest.raises(OpEvaluationError):
            eval_discrete_op(op, "no date here", "August 14, 1965")

    def test_larger_inverts_smaller_on_random_dates(self):
        rng = random.Random(17)
        months = [
            "January", "February", "March", "April", "May", "June",
            "July", "August", "September", "October", "November", "December",
        ]
        smaller = DiscreteOp(OpKind.SMALLER_OF, ValueDomain.DATE, ("first", "second"))
        larger = DiscreteOp(OpKind.LARGER_OF, ValueDomain.DATE, ("first", "second"))
        for _ in range(100):
            d1 = f"{rng.choice(months)} {rng.randint(1, 28)}, {rng.randint(1800, 2020)}"
            d2 = f"{rng.choice(months)} {rng.randint(1, 28)}, {rng.randint(1800, 2020)}"
            if parse_date(d1) == parse_date(d2):
                continue
            assert eval_discrete_op(smaller, d1, d2) != eval_discrete_op(larger, d1, d2)

    def test_number_domain(self):
        op = DiscreteOp(OpKind.LARGER_OF, ValueDomain.NUMBER, ("A", "B"))
        assert eval_discrete_op(op, "about 1,200 episodes", "95 episodes") == "A"

    def test_date_formats(self):
        assert parse_date("August 14, 1965") == (1965, 8, 14)
        assert parse_date("14 August 1965") == (1965, 8, 14)
        assert parse_date("born in 1965") == (1965, 1, 1)
        assert parse_date("no digits") is None


class TestCollectEvidence:
    def test_substring_containment(self):
        ctx = [("Pierre Bouvier", ["Pierre Bouvier is a Canadian singer.", "Other."])]
        assert collect_evidence("Canadian", ctx) == [("Pierre Bouvier", 0)]

    def test_absent_answer(self):
        assert collect_evidence("Zeta", [("T", ["Alpha."])]) == []

    def test_case_normalized(self):
        assert collect_evidence("british", [("T", ["A British band."])]) == [("T", 0)]

    def test_empty_answer(self):
        assert collect_evidence("", [("T", ["Alpha."])]) == []


class TestDecompose:
    def test_bridging(self, backend):
        deco = decompose(src.Q_BRIDGING, backend)
        assert deco.reasoning_type == ReasoningType.BRIDGING
        assert [s.text for s in deco.sub_questions] == [src.B_SUBQ1, src.B_SUBQ2]
        assert deco.sub_questions[0].role == SubgraphRole.SECONDARY_UNKNOWN_HOLDER
        assert deco.bridge_variable == "w"
        assert deco.op is None and not deco.fallback

    def test_comparison(self, backend):
        deco = decompose(src.Q_COMPARISON, backend)
        assert deco.reasoning_type == ReasoningType.COMPARISON
        assert [s.text for s in deco.sub_questions] == [src.C_SUBQ1, src.C_SUBQ2]
        assert deco.op == DiscreteOp(
            OpKind.SMALLER_OF, ValueDomain.DATE, ("Annie Morton", "Terry Richardson")
        )

    def test_intersection(self, backend):
        deco = decompose(src.Q_INTERSECTION, backend)
        assert deco.reasoning_type == ReasoningType.INTERSECTION
        assert [s.text for s in deco.sub_questions] == [src.I_SUBQ1, src.I_SUBQ2]
        assert deco.op is None

    def test_magazine_comparison(self, backend):
        deco = decompose(src.Q_MAGAZINE, backend)
        assert [s.text for s in deco.sub_questions] == [src.M_SUBQ1, src.M_SUBQ2]
        assert deco.op.subjects == ("Arthur's Magazine", "First for Women")

    def test_backend_failures_carry_stage(self, backend):
        with pytest.raises(PipelineStageError, match="parse-question"):
            decompose("never recorded question?", backend)


class TestAnswerMultihop:
    def test_bridging_chain_substitutes_before_final_call(self, backend):
        trace = answer_multihop(src.Q_BRIDGING, src.CTX_BRIDGING, backend)
        assert len(trace.steps) == 2
        assert trace.steps[0].answer == src.B_ANS1
        assert trace.steps[1].sub_question == src.B_SUBQ2_SUBSTITUTED
        assert "woman" not in trace.steps[1].sub_question
        assert src.B_ANS1 in trace.steps[1].sub_question
        assert trace.final_answer == src.B_FINAL
        assert ("Shirley Temple", 1) in trace.steps[1].evidence

    def test_comparison_chain(self, backend):
        trace = answer_multihop(src.Q_COMPARISON, src.CTX_COMPARISON, backend)
        assert len(trace.steps) == 3
        assert trace.final_answer == "Terry Richardson"
        assert trace.third_question == "Which is smaller (October 8, 1970)(August 14, 1965)?"
        assert trace.steps[2].sub_question == trace.third_question

    def test_intersection_chain(self, backend):
        trace = answer_multihop(src.Q_INTERSECTION, src.CTX_INTERSECTION, backend)
        assert len(trace.steps) == 2
        assert trace.final_answer == "No"
        assert ("Coldplay", 0) in trace.steps[0].evidence
        assert ("Pierre Bouvier", 0) in trace.steps[1].evidence

    def test_trace_is_deterministic(self, backend):
        t1 = trace_to_dict(answer_multihop(src.Q_COMPARISON, src.CTX_COMPARISON, backend), "x")
        t2 = trace_to_dict(answer_multihop(src.Q_COMPARISON, src.CTX_COMPARISON, backend), "x")
        assert t1 == t2

    def test_trace_dict_schema(self, backend):
        trace = answer_multihop(src.Q_INTERSECTION, src.CTX_INTERSECTION, backend)
        record = trace_to_dict(trace, "qid")
        assert list(record) == ["id", "type", "steps", "op_question", "final_answer", "fallback"]
        assert record["steps"][0].keys() == {"subq", "answer", "evidence"}
        assert record["op_question"] is None
        assert record["fallback"] is False


class TestFallback:
    def test_undecomposable_bridging_falls_back_to_single_hop(self):
        from qdamr.backends import FixtureBackend, answer_request, parse_request, request_key

        question = "What is the capital of France?"
        amr = "(c / capital :domain (u / amr-unknown) :poss (f / country :name (n / name :op1 \"France\")))"
        ctx = [("France", ["The capital of France is Paris.", "France is in Europe."])]
        entries = {
            request_key(parse_request(question)): {"amr": amr},
            request_key(answer_request(question, ctx)): {
                "answer": "Paris",
                "score": 1.0,
                "title": "France",
                "sentence_index": 0,
            },
        }
        backend = FixtureBackend(entries)
        deco = decompose(question, backend)
        assert deco.fallback and len(deco.sub_questions) == 1
        assert deco.sub_questions[0].role == SubgraphRole.SINGLE_HOP
        trace = answer_multihop(question, ctx, backend)
        assert trace.fallback
        assert len(trace.steps) == 1
        assert trace.final_answer == "Paris"
        assert trace_to_dict(trace, "q")["fallback"] is True

    def test_comparison_without_parallel_structure_falls_back(self):
        from qdamr.backends import FixtureBackend, answer_request, parse_request, request_key

        question = "What is the tallest building?"
        amr = (
            "(h / have-degree-91 :ARG1 (u / amr-unknown) :ARG2 (t / tall) :ARG3 (m / most))"
        )
        ctx = [("B", ["The tallest building is the Burj Khalifa."])]
        entries = {
            request_key(parse_request(question)): {"amr": amr},
            request_key(answer_request(question, ctx)): {
                "answer": "Burj Khalifa",
                "score": 0.9,
            },
        }
        backend = FixtureBackend(entries)
        trace = answer_multihop(question, ctx, backend)
        assert trace.fallback and trace.final_answer == "Burj Khalifa"


def test_input_graphs_are_not_mutated(backend):
    g = src.comparison_graph()
    before = serialize_penman(g)
    answer_multihop(src.Q_COMPARISON, src.CTX_COMPARISON, backend)
    assert serialize_penman(g) == before
