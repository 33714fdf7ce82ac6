import typing

import pytest

from qdilate.enums import DilationMode
from qdilate.schemas import QEntry, QFamily, Tol, TruncationConfig, VerificationReport


def test_tol_parse():
    tol = Tol.parse("1e-8, 1e-14")
    assert tol.rel == 1e-8
    assert tol.abs == 1e-14
    assert Tol.parse("1e-7") == Tol(1e-7)
    with pytest.raises(ValueError):
        Tol.parse("1,2,3")
    with pytest.raises(ValueError):
        Tol(rel=0.0)


def test_tol_from_env():
    assert Tol.from_env({}) == Tol()
    assert Tol.from_env({"QDILATE_TOL": "1e-6"}) == Tol(1e-6)


def test_truncation_defaults():
    cfg = TruncationConfig(5)
    assert cfg.M == 7
    assert cfg.mode == DilationMode.CYCLIC
    with pytest.raises(ValueError):
        TruncationConfig(5, 6)
    with pytest.raises(ValueError):
        TruncationConfig(-1)


@pytest.mark.parametrize(
    "orders, mode, M",
    [
        ([], DilationMode.CYCLIC, 7),
        ([4], DilationMode.CYCLIC, 8),
        ([4, 3], DilationMode.CYCLIC, 12),
        ([4, None], DilationMode.WINDOWED, 7),
    ],
)
def test_truncation_for_degree(orders, mode, M):
    cfg = TruncationConfig.for_degree(5, orders)
    assert cfg.mode == mode
    assert cfg.M == M
    assert TruncationConfig.from_dict(cfg.to_dict()) == cfg


def test_truncation_for_degree_with_ring():
    """
    An explicit ring length is rounded up to the lcm of the orders; Windowed keeps it as given.
    """
    assert TruncationConfig.for_degree(3, [4], DilationMode.CYCLIC, 9).M == 12
    windowed = TruncationConfig.for_degree(3, [4], DilationMode.WINDOWED, 9)
    assert windowed == TruncationConfig(3, 9, DilationMode.WINDOWED)
    with pytest.raises(ValueError):
        TruncationConfig.for_degree(5, [], DilationMode.CYCLIC, 6)


def test_truncation_admits():
    cfg = TruncationConfig(6, 8)
    assert cfg.admits(4)
    assert not cfg.admits(3)
    assert not cfg.admits(None)


def test_q_family_inverse_and_reindex():
    fam = QFamily(3)
    fam.put(0, 1, QEntry.exact(1j, 1j, 4))
    fam.put(0, 2, QEntry.unconstrained())
    fam.put(1, 2, QEntry.exact(-1.0, -1.0, 2))
    assert fam.constant(1, 0) == pytest.approx(-1j)
    swapped = fam.reindexed([1, 0])
    assert swapped.constant(0, 1) == pytest.approx(-1j)
    assert fam.orders() == {4, 2}
    assert QFamily.from_dict(fam.to_dict()).constant(1, 2) == pytest.approx(-1.0)


def test_q_family_annotations_resolve():
    hints = typing.get_type_hints(QFamily.orders)
    assert hints["return"] == set[int | None]
    assert typing.get_type_hints(QFamily.values)["return"] == set[complex]
    assert not hasattr(QFamily, "set")


def test_report_pass_flag():
    report = VerificationReport(3, 20, 1e-14, 1e-15, 0.0, 2e-3, (0, 3), 1e-6)
    assert not report.passed
    assert report.max_residual == 2e-3
    again = VerificationReport.from_dict(report.to_dict())
    assert again.worst_index == (0, 3)
    assert not again.passed
