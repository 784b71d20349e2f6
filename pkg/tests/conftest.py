import pytest

from spreadcode import kernels
from spreadcode.layout import layout_for


@pytest.fixture(scope="session")
def psrc5():
    return layout_for(4, 2)


@pytest.fixture(scope="session")
def psrc21():
    return layout_for(6, 2)


@pytest.fixture(params=kernels.available_backends(), ids=lambda b: b.BACKEND)
def backend(request):
    return request.param
