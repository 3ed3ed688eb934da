import pytest

# lines reported by the acceptance suite: (criterion, passed, detail)
ACCEPTANCE = []


@pytest.fixture
def record():
    def _record(criterion, passed, detail=""):
        ACCEPTANCE.append((criterion, bool(passed), detail))
        print("CRITERION %s: %s  %s" % (criterion, "PASS" if passed else "FAIL", detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(ACCEPTANCE, key=lambda x: int(str(x[0]).split(".")[0])):
        terminalreporter.write_line("CRITERION %s: %s  %s" % (crit, "PASS" if ok else "FAIL", detail))
