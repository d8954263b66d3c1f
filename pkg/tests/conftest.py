import os

import mpmath
import pytest
from hypothesis import HealthCheck, settings

from lavrik import PrecisionContext

DATA = os.path.join(os.path.dirname(__file__), "data")
ATLAS_PATH = os.path.join(DATA, "zeros.jsonl")

settings.register_profile(
    "lavrik",
    deadline=None,
    max_examples=15,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("lavrik")

# first ordinates of nontrivial zeta zeros (reference values)
ZETA_ORDINATES = [
    "14.134725141734693790457251983562",
    "21.022039638771554992628479593897",
    "25.010857580145688763213790992563",
    "30.424876125859513210311897530584",
    "32.935061587739189690662368964075",
    "37.586178158825671257217763480705",
    "40.918719012147495187398126914633",
    "43.327073280914999519496122165407",
    "48.005150881167159727942472749428",
    "49.773832477672302181916784678564",
    "52.970321477714460644147296608881",
    "56.446247697063394804367759476706",
    "59.347044002602353079653648674993",
]


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(bits=128)


@pytest.fixture(scope="session")
def ctx64():
    return PrecisionContext(bits=64)


@pytest.fixture(scope="session")
def atlas():
    from lavrik.zero_atlas import load_atlas

    return load_atlas(ATLAS_PATH)


@pytest.fixture(scope="session")
def zeta_ordinates():
    with mpmath.workprec(128):
        return [mpmath.mpf(x) for x in ZETA_ORDINATES]


# ---------------------------------------------------------------------------
# Acceptance report: one line per check, grouped by criterion
# ---------------------------------------------------------------------------

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def accept():
    def record(criterion: int, check: str, ok: bool, detail: str = "") -> bool:
        line = (criterion, check, bool(ok), detail)
        ACCEPTANCE_LINES.append(line)
        print(f"[criterion {criterion}] {check}: {'PASS' if ok else 'FAIL'} {detail}")
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion in sorted({c for c, _, _, _ in ACCEPTANCE_LINES}):
        rows = [r for r in ACCEPTANCE_LINES if r[0] == criterion]
        passed = sum(1 for r in rows if r[2])
        verdict = "PASS" if passed == len(rows) else "FAIL"
        tr.write_line(f"CRITERION {criterion}: {verdict} ({passed}/{len(rows)} checks pass)")
        for _, check, ok, detail in rows:
            tr.write_line(f"    {'PASS' if ok else 'FAIL'}  {check}  {detail}")
