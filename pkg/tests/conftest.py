def pytest_terminal_summary(terminalreporter):
    lines = []
    for rep in terminalreporter.stats.get("passed", []) + terminalreporter.stats.get("failed", []):
        if rep.when != "call":
            continue
        for key, value in rep.user_properties:
            if key == "acceptance":
                lines.append((value, "PASS" if rep.passed else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for (num, text), status in sorted(lines):
            terminalreporter.write_line(f"[{status}] criterion {num}: {text}")
