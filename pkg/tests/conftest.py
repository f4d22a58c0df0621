import pytest

from giplab.instances import PromiseInstance


@pytest.fixture
def three_columns():
    # columns [1,1,1], [0,1,2], [2,2,2]
    return PromiseInstance([[1, 0, 2], [1, 1, 2], [1, 2, 2]], 3)
