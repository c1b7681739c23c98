import pytest

from promptmixer.compiler import compile_chain
from promptmixer.errors import (
    AuthFailedError,
    BackendError,
    GatewayTimeoutError,
    RateLimitedError,
)
from promptmixer.gateway import (
    CompletionRequest,
    Gateway,
    HttpBackend,
    StubBackend,
    stub_complete,
)


def make_chain(config, tiles="ocean dream", **controls):
    state = config.new_surface()
    for cid, raw in controls.items():
        state.set_control(cid, raw)
    mode = config.mode_for_position(state.value("mode"))
    return compile_chain(state.snapshot(), tiles, mode, config.table)


class FlakyBackend:
    """Fails ``failures`` times with the given error, then succeeds."""

    id = "flaky"

    def __init__(self, failures, error_factory):
        self.failures = failures
        self.error_factory = error_factory
        self.calls = 0

    def complete(self, chain, timeout_ms=0):
        self.calls += 1
        if self.calls <= self.failures:
            raise self.error_factory()
        return "recovered"


def fast_gateway(backend):
    return Gateway(backend, backoff_base_s=0.0, sleep=lambda s: None)


class TestStubBackend:
    def test_repeated_calls_identical(self, config):
        chain = make_chain(config)
        assert stub_complete(chain) == stub_complete(chain)

    def test_one_word_clause_yields_single_word(self, config):
        chain = make_chain(config, length=0.0)
        assert "exactly one word" in chain.system_text.lower()
        out = stub_complete(chain)
        assert len(out.split()) == 1

    def test_different_user_messages_differ(self, config):
        pairs = [("ocean dream", "blue sky"),
                 ("whisper rust moon", "storm"),
                 ("ocean", "dream")]
        for left, right in pairs:
            assert stub_complete(make_chain(config, tiles=left)) \
                != stub_complete(make_chain(config, tiles=right))

    def test_folds_user_text_into_output(self, config):
        out = stub_complete(make_chain(config, tiles="whisper rust"))
        assert "whisper rust" in out.lower()

    def test_sarcasm_clause_colors_output(self, config):
        plain = stub_complete(make_chain(config))
        snarky = stub_complete(make_chain(config, sarcasm=1.0))
        assert plain != snarky
        assert "how original" in snarky.lower()

    def test_multiple_paragraphs_honored(self, config):
        out = stub_complete(make_chain(config, length=1.0))
        assert "\n\n" in out


class TestGatewayRetry:
    def test_success_passes_through(self, config):
        gw = fast_gateway(StubBackend())
        result = gw.complete(CompletionRequest(chain=make_chain(config)))
        assert result.text
        assert result.retries == 0
        assert result.backend_id == "stub"

    def test_sampling_echoed_verbatim(self, config):
        chain = make_chain(config, temperature=1.0)
        result = fast_gateway(StubBackend()).complete(
            CompletionRequest(chain=chain))
        assert result.sampling == dict(chain.sampling)

    def test_retries_transient_failures(self, config):
        backend = FlakyBackend(2, lambda: RateLimitedError("slow down"))
        result = fast_gateway(backend).complete(
            CompletionRequest(chain=make_chain(config), retry_budget=3))
        assert result.text == "recovered"
        assert result.retries == 2
        assert backend.calls == 3

    def test_budget_exhaustion_raises(self, config):
        backend = FlakyBackend(5, lambda: GatewayTimeoutError("slow"))
        with pytest.raises(GatewayTimeoutError):
            fast_gateway(backend).complete(
                CompletionRequest(chain=make_chain(config), retry_budget=2))
        assert backend.calls == 3  # initial try + 2 retries

    def test_auth_failure_never_retried(self, config):
        backend = FlakyBackend(1, lambda: AuthFailedError("bad key"))
        with pytest.raises(AuthFailedError):
            fast_gateway(backend).complete(
                CompletionRequest(chain=make_chain(config), retry_budget=5))
        assert backend.calls == 1

    def test_client_side_backend_error_not_retried(self, config):
        backend = FlakyBackend(1, lambda: BackendError("bad request",
                                                       status=400))
        with pytest.raises(BackendError):
            fast_gateway(backend).complete(
                CompletionRequest(chain=make_chain(config), retry_budget=5))
        assert backend.calls == 1

    def test_server_side_backend_error_retried(self, config):
        backend = FlakyBackend(1, lambda: BackendError("boom", status=503))
        result = fast_gateway(backend).complete(
            CompletionRequest(chain=make_chain(config), retry_budget=2))
        assert result.retries == 1

    def test_backoff_grows_exponentially(self, config):
        delays = []
        backend = FlakyBackend(3, lambda: RateLimitedError("429"))
        gw = Gateway(backend, backoff_base_s=0.25, sleep=delays.append)
        gw.complete(CompletionRequest(chain=make_chain(config),
                                      retry_budget=3))
        assert delays == [0.25, 0.5, 1.0]


class TestHttpBackend:
    def test_missing_credential_is_auth_failure(self, config, monkeypatch):
        monkeypatch.delenv("TEST_MIXER_KEY", raising=False)
        backend = HttpBackend(endpoint="http://localhost:1/v1",
                              model="m", credential_env="TEST_MIXER_KEY")
        with pytest.raises(AuthFailedError):
            backend.complete(make_chain(config))

    def test_chain_transmitted_verbatim(self, config, monkeypatch):
        captured = {}

        class FakeResponse:
            status_code = 200

            @staticmethod
            def json():
                return {"choices": [{"message": {"content": "hi"}}]}

        def fake_post(url, json=None, headers=None, timeout=None):
            captured.update(url=url, body=json, headers=headers,
                            timeout=timeout)
            return FakeResponse()

        monkeypatch.setenv("TEST_MIXER_KEY", "secret")
        monkeypatch.setattr("promptmixer.gateway.requests.post", fake_post)
        chain = make_chain(config, temperature=1.0, sarcasm=0.8)
        backend = HttpBackend(endpoint="http://example.test/chat",
                              model="mixer-model",
                              credential_env="TEST_MIXER_KEY")
        text = backend.complete(chain, timeout_ms=5000)
        assert text == "hi"
        assert captured["body"]["model"] == "mixer-model"
        assert captured["body"]["temperature"] == chain.sampling["temperature"]
        assert captured["body"]["messages"] == [
            {"role": role, "content": content}
            for role, content in chain.messages
        ]
        assert captured["headers"]["Authorization"] == "Bearer secret"
        assert captured["timeout"] == 5.0

    @pytest.mark.parametrize("status,exc", [
        (401, AuthFailedError), (403, AuthFailedError),
        (429, RateLimitedError), (500, BackendError),
    ])
    def test_status_mapping(self, config, monkeypatch, status, exc):
        class FakeResponse:
            status_code = status

            @staticmethod
            def json():
                return {}

        monkeypatch.setenv("TEST_MIXER_KEY", "secret")
        monkeypatch.setattr("promptmixer.gateway.requests.post",
                            lambda *a, **k: FakeResponse())
        backend = HttpBackend(endpoint="http://example.test", model="m",
                              credential_env="TEST_MIXER_KEY")
        with pytest.raises(exc):
            backend.complete(make_chain(config))

    def test_empty_system_message_omitted_on_wire(self, config, monkeypatch):
        captured = {}

        class FakeResponse:
            status_code = 200

            @staticmethod
            def json():
                return {"choices": [{"message": {"content": "ok"}}]}

        monkeypatch.setenv("TEST_MIXER_KEY", "secret")
        monkeypatch.setattr(
            "promptmixer.gateway.requests.post",
            lambda url, json=None, **k: captured.update(body=json)
            or FakeResponse())
        state = config.new_surface()
        mode = config.mode_for_position(state.value("mode"))
        chain = compile_chain(state.snapshot(), "ocean", mode, config.table,
                              mixerless=True)
        backend = HttpBackend(endpoint="http://example.test", model="m",
                              credential_env="TEST_MIXER_KEY")
        backend.complete(chain)
        roles = [m["role"] for m in captured["body"]["messages"]]
        assert roles == ["user"]
        assert "temperature" not in captured["body"]
