import pytest

from qubithammer.device import CrosstalkMatrix, DeviceConfig, QubitParams, Topology, bundled_device


@pytest.fixture(scope="session")
def eagle():
    return bundled_device("eagle127")


@pytest.fixture(scope="session")
def ankaa():
    return bundled_device("ankaa82")


def make_line(n=5, f0=5.0, spacing=0.05, t1=100.0, t2=120.0, p01=0.0, p10=0.0,
              neighbor_c=0.0, background_c=0.0, entries=()):
    qubits = [QubitParams(i, f0 + spacing * i, 25.0, t1, t2, p01, p10) for i in range(n)]
    topo = Topology(n, tuple((i, i + 1) for i in range(n - 1)), "custom")
    xt = CrosstalkMatrix(tuple(entries), neighbor_c, background_c)
    return DeviceConfig("line", tuple(qubits), topo, xt).validate()


@pytest.fixture
def line5():
    return make_line()


ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
