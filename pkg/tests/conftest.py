import re

_CRITERION = re.compile(r"::test_criterion_(\d+)_([a-z0-9_]+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One explicit PASS/FAIL line per numbered acceptance criterion."""
    results = {}
    for status, reports in terminalreporter.stats.items():
        for rep in reports:
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if m is None:
                continue
            num, slug = int(m.group(1)), m.group(2)
            passed = status == "passed"
            if num in results and not results[num][1]:
                continue  # a failure already recorded wins
            if status in ("passed", "failed", "error"):
                results[num] = (slug, passed)
    if not results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(results):
        slug, ok = results[num]
        word = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"criterion {num:02d} {word}  {slug.replace('_', ' ')}")
