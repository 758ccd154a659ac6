import pytest

from integralis.painleve import T_BASIS, painleve_identities_check, painleve_rhs


@pytest.fixture(scope="module")
def report():
    return painleve_identities_check(degree_bound=3)


def test_all_checks_pass(report):
    assert report.passed, [c.name for c in report.checks if not c.passed]
    assert len(report.checks) >= 12


def test_shape_checks_are_inconsistent_at_degree_three(report):
    shapes = [c for c in report.checks if "cannot satisfy" in c.name]
    assert len(shapes) == 2 and all(c.passed for c in shapes)
    assert "84 unknown" in shapes[0].detail


def test_low_degree_bound_runs_quickly():
    rep = painleve_identities_check(degree_bound=1)
    assert rep.passed


def test_rhs_and_basis():
    assert len(painleve_rhs()) == 6
    assert len(T_BASIS) == 8
    with pytest.raises(ValueError):
        painleve_identities_check(degree_bound=-1)
