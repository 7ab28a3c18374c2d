import pytest

from convnec.formats import builtin_network, parse_phi
from convnec.galois import make_field
from convnec.nec import construct
from convnec.polymat import PolyMatrix

GI_TEXT = "1+z^2, 1+z+z^2"
GI_PRIME_TEXT = "1+z^2, 1+z+2z^2"


@pytest.fixture(scope="session")
def f2():
    return make_field(2)


@pytest.fixture(scope="session")
def f3():
    return make_field(3)


@pytest.fixture(scope="session")
def gi2(f2):
    return PolyMatrix.parse(GI_TEXT, f2)


@pytest.fixture(scope="session")
def gi3(f3):
    return PolyMatrix.parse(GI_TEXT, f3)


def _report(name, phi, code_text=GI_TEXT):
    spec = builtin_network(name)
    return construct(spec, parse_phi(phi, spec.num_edges), PolyMatrix.parse(code_text, spec.field))


@pytest.fixture(scope="session")
def butterfly2():
    return _report("butterfly", "single-edges")


@pytest.fixture(scope="session")
def butterfly3():
    return _report("butterfly-f3", "single-edges")


@pytest.fixture(scope="session")
def butterfly3_prime():
    return _report("butterfly-f3", "single-edges", GI_PRIME_TEXT)


@pytest.fixture(scope="session")
def net4c2():
    return _report("4c2", "upto-2-edges")
