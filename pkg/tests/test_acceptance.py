"""One test per acceptance criterion; each appends its verdict line to the
terminal summary.  Targets are exact as stated; failures are reported as is."""
import pytest

from affgaudin.acceptance import CRITERIA, run_criterion


def _check(number, log, **kw):
    res = run_criterion(number, **kw)
    log.append(res.line())
    print(res.line())
    print(res.detail)
    assert res.ok, res.detail
    assert res.within_budget, f"{res.seconds:.1f}s over the {res.budget}s budget"


@pytest.mark.parametrize("number", [k for k in CRITERIA if k != 6])
def test_criterion(number, criterion_log):
    _check(number, criterion_log)


@pytest.mark.slow
def test_criterion_6_quartic_quartic(criterion_log):
    _check(6, criterion_log)


@pytest.mark.slow
def test_criterion_8_exponent_seven(criterion_log):
    _check(8, criterion_log, slow=True)
