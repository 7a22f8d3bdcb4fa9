import json

import httpx
import pytest

from uctestgen.gateway import (
    AuthError,
    GenerationRequest,
    LiveProvider,
    RecordingProvider,
    ReplayExhausted,
    ReplayMismatch,
    ReplayProvider,
    Transcript,
    TranscriptEntry,
    TransportError,
    complete,
    record_transcript,
)

from conftest import ScriptedProvider


def reply(text):
    return {"choices": [{"message": {"role": "assistant", "content": text}}]}


def test_request_defaults_and_bounds():
    req = GenerationRequest("hi")
    assert (req.temperature, req.top_p, req.frequency_penalty, req.presence_penalty) == (0.0, 1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        GenerationRequest("hi", temperature=1.5)
    with pytest.raises(ValueError):
        GenerationRequest("hi", top_p=0.0)


def test_fingerprint_tracks_prompt_and_params():
    a = GenerationRequest("p")
    assert a.fingerprint() == GenerationRequest("p").fingerprint()
    assert a.fingerprint() != GenerationRequest("p ").fingerprint()
    assert a.fingerprint() != GenerationRequest("p", temperature=0.5).fingerprint()
    assert a.fingerprint() != GenerationRequest("p", system_role="x").fingerprint()


def test_replay_identity_and_exhaustion():
    req = GenerationRequest("prompt")
    text = '  {"nodes": [], "edges": []}\n'
    provider = ReplayProvider(Transcript([TranscriptEntry(req.fingerprint(), text)]))
    assert complete(req, provider) == text
    with pytest.raises(ReplayExhausted):
        complete(req, provider)


def test_replay_mismatch():
    provider = ReplayProvider(Transcript([TranscriptEntry("fp1", "x")]))
    with pytest.raises(ReplayMismatch):
        provider.complete(GenerationRequest("other"))
    lax = ReplayProvider(Transcript([TranscriptEntry("fp1", "x")]), check_fingerprints=False)
    assert lax.complete(GenerationRequest("other")) == "x"


def test_record_then_replay(tmp_path):
    assert len(record_transcript(RecordingProvider(ScriptedProvider([])))) == 0
    rec = RecordingProvider(ScriptedProvider(["one", "two"]))
    reqs = [GenerationRequest("a"), GenerationRequest("b")]
    assert [rec.complete(r) for r in reqs] == ["one", "two"]
    transcript = record_transcript(rec)
    assert [e.response for e in transcript.entries] == ["one", "two"]
    path = tmp_path / "t.json"
    transcript.save(path)
    assert isinstance(json.loads(path.read_text()), list)
    replay = ReplayProvider.from_file(path)
    assert [replay.complete(r) for r in reqs] == ["one", "two"]
    assert replay.remaining == 0


def test_live_without_credential(monkeypatch):
    monkeypatch.delenv("TGEN_API_KEY", raising=False)
    with pytest.raises(AuthError):
        LiveProvider().complete(GenerationRequest("hi"))


def test_live_sends_openai_style_body(monkeypatch):
    monkeypatch.setenv("TGEN_API_BASE", "http://llm.test/v1/")
    monkeypatch.setenv("TGEN_MODEL", "model-x")
    seen = {}

    def handler(request):
        seen["url"] = str(request.url)
        seen["auth"] = request.headers["authorization"]
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json=reply(" raw text \n"))

    provider = LiveProvider(api_key="k", transport=httpx.MockTransport(handler))
    out = provider.complete(GenerationRequest("hello", system_role="be terse"))
    assert out == " raw text \n"
    assert seen["url"] == "http://llm.test/v1/chat/completions"
    assert seen["auth"] == "Bearer k"
    body = seen["body"]
    assert body["model"] == "model-x"
    assert body["messages"] == [{"role": "system", "content": "be terse"}, {"role": "user", "content": "hello"}]
    assert (body["temperature"], body["top_p"], body["frequency_penalty"], body["presence_penalty"]) == (0.0, 1.0, 0.0, 0.0)


def test_live_retries_transport_errors():
    calls = []

    def handler(request):
        calls.append(1)
        if len(calls) < 3:
            return httpx.Response(503)
        return httpx.Response(200, json=reply("ok"))

    provider = LiveProvider(api_key="k", base_url="http://x", backoff=0, transport=httpx.MockTransport(handler))
    assert provider.complete(GenerationRequest("p")) == "ok"
    assert len(calls) == 3


def test_live_gives_up_with_status():
    provider = LiveProvider(
        api_key="k", base_url="http://x", backoff=0,
        transport=httpx.MockTransport(lambda r: httpx.Response(500)),
    )
    with pytest.raises(TransportError) as info:
        provider.complete(GenerationRequest("p"))
    assert info.value.status == 500


def test_live_network_failure():
    def handler(request):
        raise httpx.ConnectError("refused")

    provider = LiveProvider(api_key="k", base_url="http://x", backoff=0, transport=httpx.MockTransport(handler))
    with pytest.raises(TransportError):
        provider.complete(GenerationRequest("p"))


def test_live_rejected_credential_not_retried():
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(401)

    provider = LiveProvider(api_key="bad", base_url="http://x", backoff=0, transport=httpx.MockTransport(handler))
    with pytest.raises(AuthError):
        provider.complete(GenerationRequest("p"))
    assert len(calls) == 1
