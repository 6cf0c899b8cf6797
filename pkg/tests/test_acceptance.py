"""Acceptance criteria, one PASS/FAIL line each.

Every criterion runs its verify suite at full scale. Properties marked soft
are reported but do not fail the test. The tolerances live in the suites:
zero violations for hard bounds, 95% for the statistical ones, 2.5x per
doubling for the scaling gate.
"""

import pytest

from dynkc import verify

CRITERIA = {
    1: ("recourse hard bounds", verify.recourse_bounds, {}),
    2: ("work hard bounds", verify.work_bounds, {}),
    3: ("partition and subset invariants", verify.invariants, {}),
    4: ("size bounds", verify.size_bounds, {}),
    5: ("approximation ratios", verify.cost_ratio, {}),
    6: ("oracle equivalence", verify.oracle_equivalence, {}),
    7: ("structural checks", verify.structural, {}),
    8: ("scaling smoke test", verify.scaling, {}),
}


def _line(num: int, title: str, rep: verify.Report) -> str:
    hard_ok = rep.ok
    soft_bad = [k for k, p in rep.props.items() if p.soft and not p.ok]
    status = "PASS" if hard_ok and not soft_bad else "FAIL"
    parts = []
    for name, p in rep.props.items():
        tag = "" if p.ok else (" [soft]" if p.soft else " [HARD]")
        parts.append(f"{name}: {p.passed}/{p.total}{tag}")
    note = " (soft only)" if hard_ok and soft_bad else ""
    return f"{status}{note} criterion {num} {title} | " + "; ".join(parts)


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, capsys):
    title, fn, kw = CRITERIA[num]
    rep = fn(**kw)
    with capsys.disabled():
        print("\n" + _line(num, title, rep))
    bad = {k: p.detail for k, p in rep.props.items() if not p.soft and not p.ok}
    assert not bad, bad
