"""Shared heavy fixtures: each exhaustive enumeration runs at most once per session."""

import numpy as np
import pytest

from crclist.spectrum import bounded_weight_tb_search, gray_enumerate, polar_low_weight_probe
from crclist.system import reference_polar_system, reference_tbcc_system


def pytest_addoption(parser):
    parser.addoption("--fast", action="store_true", help="skip tests marked slow")


def pytest_collection_modifyitems(config, items):
    if not config.getoption("--fast"):
        return
    skip = pytest.mark.skip(reason="--fast given")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def polar_probe():
    """Low-weight words of the bare (512,43) polar code seen by a 32768-path list."""
    return polar_low_weight_probe(reference_polar_system(None).polar, 32768)


@pytest.fixture(scope="session")
def polar_d41_spectrum():
    ws, _ = gray_enumerate(reference_polar_system("0xD41").generator())
    return ws


@pytest.fixture(scope="session")
def tbcc_f69_unpunctured():
    """Full spectrum plus the minimum-weight messages of the unpunctured CRC-TBCC."""
    system = reference_tbcc_system("0xF69", punctured=False)
    ws, msgs = gray_enumerate(system.generator(), collect_max_weight=132)
    return system, ws, msgs


@pytest.fixture(scope="session")
def tbcc_f69_punctured_spectrum():
    ws, _ = gray_enumerate(reference_tbcc_system("0xF69").generator())
    return ws


@pytest.fixture(scope="session")
def tbcc_inner_low_weight():
    system = reference_tbcc_system(None, punctured=False)
    return bounded_weight_tb_search(system.conv, 43, 140)[1]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def verdict(request):
    """Record one pass/fail line for an acceptance criterion."""
    tag = request.node.name.split("_")[1].upper()

    def _verdict(ok: bool, detail: str) -> bool:
        _ACCEPTANCE[tag] = f"{tag} {'PASS' if ok else 'FAIL'}: {detail}"
        print(_ACCEPTANCE[tag])
        return ok

    return _verdict


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for tag in sorted(_ACCEPTANCE, key=lambda t: int(t[1:])):
        terminalreporter.write_line(_ACCEPTANCE[tag])
