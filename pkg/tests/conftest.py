import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import emdof.spectra as spectra  # noqa: E402
import emdof.sweep as sweep  # noqa: E402

ACCEPTANCE = []
EIGEN_STATS = {"solves": 0, "worst": 0.0}
EIGEN_TOL = 1e-9

_original = spectra.hermitian_eigenvalues


def _checked_eigenvalues(R):
    s = _original(R)
    e1, e2 = spectra.spectrum_identity_errors(R, s)
    EIGEN_STATS["solves"] += 1
    EIGEN_STATS["worst"] = max(EIGEN_STATS["worst"], e1, e2)
    assert e1 < EIGEN_TOL and e2 < EIGEN_TOL, f"trace/Frobenius mismatch {e1:.2e}, {e2:.2e}"
    return s


@pytest.fixture(autouse=True, scope="session")
def _audit_every_eigensolve():
    """Every solve anywhere in the suite must honour the trace/Frobenius identities."""
    mp = pytest.MonkeyPatch()
    mp.setattr(spectra, "hermitian_eigenvalues", _checked_eigenvalues)
    mp.setattr(sweep, "hermitian_eigenvalues", _checked_eigenvalues)
    yield
    mp.undo()


@pytest.fixture
def acceptance():
    def record(tag, ok, detail):
        ACCEPTANCE.append((tag, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'}  {tag}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE and not EIGEN_STATS["solves"]:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for tag, ok, detail in sorted(ACCEPTANCE, key=lambda x: int(x[0][2:].split()[0])):
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  {tag}: {detail}")
    if EIGEN_STATS["solves"]:
        tr.write_line(
            f"{'PASS' if EIGEN_STATS['worst'] < EIGEN_TOL else 'FAIL'}  AC2 suite-wide: "
            f"{EIGEN_STATS['solves']} eigensolves, worst identity error {EIGEN_STATS['worst']:.2e}"
        )
