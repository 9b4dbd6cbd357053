import pytest

from etb.budget import Budget, BudgetExceeded, get_budget, set_budget


def test_check():
    b = Budget(vectors=10)
    b.check("vectors", 10)
    with pytest.raises(BudgetExceeded):
        b.check("vectors", 11)


def test_env_pairs(monkeypatch):
    monkeypatch.setenv("ETB_BUDGET", "simplices=2e3,group=50")
    set_budget(None)
    b = get_budget()
    assert (b.simplices, b.group, b.vectors) == (2000, 50, Budget().vectors)


def test_env_scale(monkeypatch):
    monkeypatch.setenv("ETB_BUDGET", "0.5")
    set_budget(None)
    assert get_budget().group == Budget().group // 2


@pytest.mark.parametrize("raw", ["bogus=3", "simplices", "x"])
def test_env_rejects_garbage(monkeypatch, raw):
    monkeypatch.setenv("ETB_BUDGET", raw)
    set_budget(None)
    with pytest.raises(ValueError):
        get_budget()
