from evmech.games import verify_implementation
from evmech.mechanisms.hard import synthesize_theorem1
from evmech.tracer import capture_traces, trace, trace_summary
import time


def test_trace_without_tracer_yields_kwargs():
    with trace("nothing", extra=1) as kwargs:
        assert {"extra": 1} == kwargs


def test_capture_traces(env_a):
    traces = []
    with capture_traces(traces):
        verify_implementation(synthesize_theorem1(env_a), env_a, state=1, samples=1, mixed=False)
    types = {t["type"] for t in traces}
    assert {"verify", "evaluate-profiles", "induce", "pure-scan"} <= types
    for t in traces:
        assert isinstance(t["start"], float)
        assert isinstance(t["end"], float)
        assert t["duration_ms"] == (t["end"] - t["start"]) * 1000
        assert isinstance(t["traceback"], list)
    evaluate = next(t for t in traces if t["type"] == "evaluate-profiles")
    assert 8 == evaluate["profiles"]
    assert "s2" == evaluate["state"]


def test_traces_stop_outside_the_context(env_a):
    traces = []
    with capture_traces(traces):
        pass
    verify_implementation(synthesize_theorem1(env_a), env_a, state=1, samples=1, mixed=False)
    assert [] == traces


def test_trace_summary():
    traces = []
    started = time.perf_counter()
    with capture_traces(traces):
        with trace("outer", label="x"):
            pass
    summary = trace_summary(traces, started)
    assert 1 == summary["num_traces"]
    assert "x" == summary["traces"][0]["label"]
    assert summary["duration_ms"] >= summary["sum_trace_duration_ms"]
