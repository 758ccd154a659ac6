import pytest

from integralis.expr import parse
from integralis.search import STAGES, SearchOutcome, SearchRequest, find
from integralis.sysfile import load_fixture
from integralis.system import SystemError_


def fx(name):
    return load_fixture(name)


def test_first_integral_found_at_k2():
    out = find(SearchRequest(fx("ex1_8"), "fi", k=2))
    assert out.stage == "verified" and out.independence_rank == 1
    (w,) = out.witnesses
    assert (w.candidate * 2) == parse("x1^2 + x2^2")


def test_first_integral_wronskian_failure():
    out = find(SearchRequest(fx("ex1_8"), "fi", k=1))
    assert out.stage == "wronskian-failed" and not out.witnesses
    assert out.diagnostics["wronskian"]


def test_nonautonomous_first_integral():
    out = find(SearchRequest(fx("ex1_23"), "fi", s=2, k=1))
    assert [w.candidate for w in out.witnesses] == [parse("x1*exp(-t1 - 3*t2)")]
    assert find(SearchRequest(fx("ex1_23"), "fi", s=2, k=0)).stage == "wronskian-failed"


def test_autonomous_first_integral_of_gradient_system():
    out = find(SearchRequest(fx("ex1_14"), "fi", s=0))
    assert any(w.candidate == parse("x1*x2 - x3") or w.candidate == parse("x3 - x1*x2") for w in out.witnesses)


def test_last_multiplier():
    out = find(SearchRequest(fx("ex2_8"), "lm", k=1))
    assert [w.candidate for w in out.witnesses] == [parse("1/x1")]
    assert find(SearchRequest(fx("ex2_8"), "lm", k=0)).stage == "wronskian-failed"
    assert find(SearchRequest(fx("ex3_23"), "lm", k=2)).stage == "funcsys-empty"


def test_partial_integrals():
    out = find(SearchRequest(fx("ex3_13"), "pi", k=1))
    assert [w.candidate for w in out.witnesses] == [parse("x1")]
    out = find(SearchRequest(fx("ex3_23"), "pi", k=2))
    (w,) = out.witnesses
    assert w.candidate == parse("x1^2 + x2^2")
    assert all(c == parse("-2*x1^2 - 2*x2^2 - 2*x3^2") for c in w.cofactors)


def test_scan_reports_cells():
    out = find(SearchRequest(fx("ex3_13"), "pi", k="scan"))
    assert out.independence_rank == 5
    assert (0, 1, "verified") in out.cells
    assert all(stage in STAGES for _, _, stage in out.cells)


def test_request_validation():
    with pytest.raises(ValueError):
        SearchRequest(fx("ex1_8"), "xx")
    with pytest.raises(SystemError_):
        SearchRequest(fx("ex1_8"), "fi", k=9)
    req = SearchRequest(fx("ex1_8"), "fi", s="scan")
    assert req.s == 0  # PDE systems have no independent variables
    with pytest.raises(ValueError):
        SearchOutcome([], "nowhere")
