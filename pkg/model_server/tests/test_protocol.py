import json

import pytest
import requests

from qdamr.backends import (
    canonical_json,
    decode_answer_response,
    decode_generate_response,
    decode_parse_response,
)
from qdamr.graph import parse_penman

from qdamr_model_server.config import ServerConfig, load_config
from qdamr_model_server.models import load_models

TWENTY_QUESTIONS = [
    "What government position was held by the woman who portrayed Corliss Archer?",
    "Who is older, Annie Morton or Terry Richardson?",
    "Are both Coldplay and Pierre Bouvier from the same country?",
    "Which magazine was started first, Arthur's Magazine or First for Women?",
    "Who founded the studio that made The Red Shoes?",
    "Where is the capital of France?",
    "When was the telescope invented?",
    "Which river flows through the city where the treaty was signed?",
    "How many moons does the seventh planet have?",
    "Who directed the film that won the first ceremony's top award?",
    "What language is spoken in the country bordering two oceans?",
    "Did the author of the novel also write its screenplay?",
    "Which mountain is taller, K2 or Annapurna?",
    "Who composed the anthem used by both federations?",
    "What year did the band that recorded Parachutes form?",
    "Whose painting hangs in the museum founded in 1793?",
    "Is the singer of Simple Plan from Montreal?",
    "Which element has the higher atomic number, iron or zinc?",
    "What is the name of the harbour near the old lighthouse?",
    "Who trained the horse that won the 1970 derby?",
]


class TestGoldenConformance:
    def test_responses_match_golden_bytes(self, server, golden):
        by_key = {entry["key"]: entry for entry in golden["responses"]}
        for entry in golden["requests"]:
            kind = entry["request"]["kind"]
            resp = requests.post(f"{server.url}/{kind}", json=entry["request"], timeout=10)
            assert resp.status_code == 200
            expected = by_key[entry["key"]]
            assert resp.content.decode("utf-8") == expected["canonical"]
            assert canonical_json(resp.json()) == canonical_json(expected["response"])

    def test_golden_responses_decode_under_client_schema(self, golden):
        decoders = {
            "parse": lambda r: decode_parse_response(r),
            "generate": lambda r: decode_generate_response(r),
        }
        for req_entry, resp_entry in zip(golden["requests"], golden["responses"]):
            kind = req_entry["request"]["kind"]
            if kind in decoders:
                decoders[kind](resp_entry["response"])
            else:
                context = [(t, s) for t, s in req_entry["request"]["context"]]
                decode_answer_response(resp_entry["response"], context)


class TestParseEndpoint:
    def test_twenty_live_questions_validate(self, server):
        for question in TWENTY_QUESTIONS:
            resp = requests.post(
                f"{server.url}/parse", json={"kind": "parse", "text": question}, timeout=10
            )
            assert resp.status_code == 200
            graph = parse_penman(resp.json()["amr"])
            assert "amr-unknown" in graph.concepts.values()

    def test_kind_field_optional_but_checked(self, server):
        ok = requests.post(f"{server.url}/parse", json={"text": "Who?"}, timeout=10)
        assert ok.status_code == 200
        bad = requests.post(
            f"{server.url}/parse", json={"kind": "generate", "text": "Who?"}, timeout=10
        )
        assert bad.status_code == 400


class TestGenerateEndpoint:
    def test_output_is_interrogative(self, server):
        amr = "( h hold-01 :ARG0 ( w woman ) :ARG1 ( u amr-unknown ) )"
        resp = requests.post(
            f"{server.url}/generate", json={"kind": "generate", "amr": amr}, timeout=10
        )
        assert resp.status_code == 200
        text = resp.json()["text"]
        assert text.strip()
        assert "?" in text or text.lower().startswith(("who", "what", "where", "when"))

    def test_invalid_amr_is_a_500_with_stage(self, server):
        resp = requests.post(
            f"{server.url}/generate", json={"kind": "generate", "amr": "( broken"}, timeout=10
        )
        assert resp.status_code == 500
        assert resp.json()["stage"] == "generate"


class TestAnswerEndpoint:
    def test_span_is_verbatim(self, server):
        body = {
            "kind": "answer",
            "question": "Where is the studio?",
            "context": [["Studio", ["The studio is in London.", "It opened in 1921."]]],
        }
        resp = requests.post(f"{server.url}/answer", json=body, timeout=10)
        assert resp.status_code == 200
        payload = resp.json()
        sentences = [s for _, group in body["context"] for s in group]
        assert any(payload["answer"] in s for s in sentences)
        assert 0.0 <= payload["score"] <= 1.0
        assert payload["title"] == "Studio"

    def test_missing_fields_are_400(self, server):
        resp = requests.post(f"{server.url}/answer", json={"question": "Q?"}, timeout=10)
        assert resp.status_code == 400
        resp = requests.post(
            f"{server.url}/answer",
            json={"question": "Q?", "context": [["T", "not-a-list"]]},
            timeout=10,
        )
        assert resp.status_code == 400


class TestServerBasics:
    def test_health_reports_model_identifiers(self, server):
        resp = requests.get(f"{server.url}/health", timeout=10)
        assert resp.status_code == 200
        assert resp.json() == {
            "models": {"generator": "rule", "parser": "rule", "qa": "rule"},
            "status": "ok",
        }

    def test_malformed_body_is_400(self, server):
        resp = requests.post(
            f"{server.url}/parse",
            data=b"{not json",
            headers={"Content-Type": "application/json"},
            timeout=10,
        )
        assert resp.status_code == 400

    def test_unknown_path_is_404(self, server):
        assert requests.post(f"{server.url}/translate", json={}, timeout=10).status_code == 404

    def test_empty_text_is_400(self, server):
        resp = requests.post(f"{server.url}/parse", json={"kind": "parse", "text": " "}, timeout=10)
        assert resp.status_code == 400


class TestConfig:
    def test_port_validated(self):
        with pytest.raises(ValueError):
            ServerConfig(port=0)
        with pytest.raises(ValueError):
            ServerConfig(port=70000)

    def test_file_plus_flags(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"port": 9000, "qa_model": "rule"}), encoding="utf-8")
        config = load_config(str(path), host="0.0.0.0")
        assert config.port == 9000
        assert config.host == "0.0.0.0"

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"modle": "x"}), encoding="utf-8")
        with pytest.raises(ValueError, match="unknown keys"):
            load_config(str(path))

    def test_unavailable_model_fails_fast(self):
        with pytest.raises((RuntimeError, ValueError)):
            load_models("amrlib", "rule", "rule")
        with pytest.raises(ValueError):
            load_models("rule", "rule", "definitely-not-a-model")


def test_client_library_never_imports_the_server():
    # the pipeline package must run with this package absent
    import pathlib

    import qdamr

    package_dir = pathlib.Path(qdamr.__file__).parent
    for source in package_dir.rglob("*.py"):
        assert "qdamr_model_server" not in source.read_text(encoding="utf-8")
