import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_VERDICTS = {}


def report(criterion, ok, detail):
    """Record and print one acceptance verdict line."""
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    _VERDICTS[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for criterion in sorted(_VERDICTS):
            terminalreporter.write_line(_VERDICTS[criterion])
