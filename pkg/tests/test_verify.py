import math

import numpy as np
import pytest
from scipy import sparse

from qdilate.corpus import type1_example
from qdilate.exceptions import DimensionError
from qdilate.schemas import Tol, TruncationConfig
from qdilate.tupledilate import dilate_general
from qdilate.verify import multi_indices, residual_threshold, verify_certificate


@pytest.mark.parametrize("k, N", [(1, 4), (2, 2), (3, 5)])
def test_multi_indices(k, N):
    grid = list(multi_indices(k, N))
    assert len(grid) == math.comb(N + k, k)
    assert len(set(grid)) == len(grid)
    assert all(len(m) == k and sum(m) <= N for m in grid)


def test_threshold_is_fixed_multiple_of_tolerance():
    """
    The threshold does not grow with the dimension of the dilation.
    """
    tol = Tol()
    assert residual_threshold(tol) == pytest.approx(10 * tol.bound(1.0))
    assert residual_threshold(tol) < 1e-7


def _certificate(N: int = 4):
    return dilate_general(type1_example(), TruncationConfig(N)).certificate


def test_report_covers_grid():
    cert = _certificate()
    report = verify_certificate(type1_example(), cert)
    assert report.passed
    assert report.degree == 4
    assert report.grid_size == len(list(multi_indices(2, 4)))
    assert len(report.worst_index) == 2


def test_sabotaged_operator_fails():
    """
    A phase on one unitary keeps it unitary but breaks the moments.
    """
    cert = _certificate()
    cert.U[1] = cert.U[1] * np.exp(1e-3j)
    report = verify_certificate(type1_example(), cert)
    assert not report.passed
    assert report.moment > report.threshold
    assert report.unitarity <= report.threshold


def test_sabotaged_embedding_fails():
    cert = _certificate()
    cert.V = 1.01 * cert.V
    report = verify_certificate(type1_example(), cert)
    assert not report.passed
    assert report.isometry > report.threshold


def test_higher_degree_than_certified_fails():
    cert = _certificate(N=2)
    assert verify_certificate(type1_example(), cert).passed
    assert not verify_certificate(type1_example(), cert, N=12).passed


def test_tuple_length_mismatch():
    with pytest.raises(DimensionError):
        verify_certificate(type1_example()[:1], _certificate())


def test_small_target_perturbation_fails():
    """
    A ``1e-7`` change in one entry of the target is larger than the threshold.
    """
    cert = _certificate()
    T1, T2 = type1_example()
    T1 = T1.copy()
    T1[0, 0] += 1e-7
    report = verify_certificate([T1, T2], cert)
    assert not report.passed
    assert report.moment > report.threshold


def test_tampered_entry_fails():
    cert = _certificate()
    U = cert.U[0].toarray()
    U[0, 0] += 1e-3
    cert.U[0] = sparse.csr_array(U)
    report = verify_certificate(type1_example(), cert)
    assert not report.passed
