import pytest

from steklov_shell import ShellConfig, derive_frame

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ex1_cfg():
    """n = 1, r1 = 1, r2 = 3, t = 1: the frame used by most examples."""
    return ShellConfig(1, 1.0, 3.0, 1.0)


@pytest.fixture(scope="session")
def ex1_frame(ex1_cfg):
    return derive_frame(ex1_cfg)


@pytest.fixture(scope="session")
def ex1_frame_ext(ex1_cfg):
    return derive_frame(ex1_cfg, "extended")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
