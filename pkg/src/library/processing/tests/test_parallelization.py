"""
Unit tests for the parallelization module.
"""
from library.processing import parallelization, sequential


def _square(value: int) -> int:
    return value * value


def test_process_data_parallelized_keeps_order():
    """Results come back in the order of the input."""
    data = list(range(20))
    result = parallelization.process_data_parallelized(
        _square, data, processes=2, chunksize=3
    )
    assert result == [value * value for value in data]


def test_process_data_matches_sequential(subtests):
    """Parallel and sequential dispatch agree."""
    data = list(range(11))
    expected = [value * value for value in data]
    for processes in (0, 1, 2):
        with subtests.test(msg=f"{processes} processes"):
            assert parallelization.process_data(
                _square, data, processes
            ) == expected


def test_process_data_dispatch(mocker):
    """Single process or single entry runs in the current process."""
    spy_seq = mocker.spy(sequential, "process_data_sequentially")
    mock_par = mocker.patch.object(
        parallelization, "process_data_parallelized", return_value=[4]
    )
    assert parallelization.process_data(_square, [3], 1) == [9]
    assert parallelization.process_data(_square, [5], 4) == [25]
    assert spy_seq.call_count == 2
    mock_par.assert_not_called()

    assert parallelization.process_data(_square, [1, 2], 4) == [4]
    mock_par.assert_called_once_with(_square, [1, 2], 4)


def test_auto_chunksize():
    """About four chunks per process, at least one entry each."""
    assert parallelization._auto_chunksize(160, 4) == 10
    assert parallelization._auto_chunksize(3, 8) == 1
