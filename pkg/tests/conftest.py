import numpy as np
import pytest

from bentparts.fields import FieldDescriptor, SpaceDescriptor
from bentparts.transform import FunctionTable


@pytest.fixture(scope="session")
def F4():
    return FieldDescriptor(2, 2)


@pytest.fixture(scope="session")
def F9():
    return FieldDescriptor(3, 2)


@pytest.fixture(scope="session")
def F9_alt():
    # x^2 + 1 is irreducible over F_3; alternative representation of F_9
    return FieldDescriptor(3, 2, (1, 0, 1))


@pytest.fixture(scope="session")
def F16():
    return FieldDescriptor(2, 4)


@pytest.fixture(scope="session")
def F25():
    return FieldDescriptor(5, 2)


@pytest.fixture(scope="session")
def F64():
    return FieldDescriptor(2, 6)


@pytest.fixture(scope="session")
def F81():
    return FieldDescriptor(3, 4)


def mm_vectorial(field: FieldDescriptor, pi_exponent: int = 1, g_table=None):
    """F(x, y) = x * pi(y) + g(y) as a vectorial table over field^2 -> field."""
    q = field.order
    mt = field.mul_table()
    pi = field.pow_table(pi_exponent)
    g = np.zeros(q, dtype=np.int64) if g_table is None else np.asarray(g_table)
    at = field.add_table()
    vals = np.empty(q * q, dtype=np.int64)
    for y in range(q):
        vals[y * q : (y + 1) * q] = at[mt[int(pi[y])], int(g[y])]
    dom = SpaceDescriptor.of_fields(field, field)
    cod = SpaceDescriptor.of_fields(field)
    return FunctionTable(dom, cod, vals)


@pytest.fixture(scope="session")
def mm_f4(F4):
    return mm_vectorial(F4)
