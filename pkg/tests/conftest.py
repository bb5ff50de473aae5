"""Per-criterion PASS/FAIL summary for the acceptance suite."""

_criteria = {}
_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, title): acceptance criterion id and title")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _criteria[item.nodeid] = mark.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    if report.when == "call" or report.failed:
        detail = dict(report.user_properties).get("detail", "")
        ok = report.passed and _results.get(report.nodeid, (True,))[0]
        _results[report.nodeid] = (ok, detail)


def _key(cid):
    digits = "".join(ch for ch in cid if ch.isdigit())
    return int(digits), cid


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    rows = sorted(((_criteria[n], r) for n, r in _results.items()), key=lambda x: _key(x[0][0]))
    for (cid, title), (ok, detail) in rows:
        line = f"criterion {cid:<3} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
