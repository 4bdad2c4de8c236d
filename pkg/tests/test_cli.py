import io
import subprocess
import sys

import pytest

from ltrm import FrozenClock, Money, history, make_timepoint
from ltrm.chronos import NOW, Granularity
from ltrm.cli import Session, repl, repl_command, run
from ltrm.storage import FIXTURE_DIR, load_fixture

CATALOG = str(FIXTURE_DIR / "catalog.ltrm")
DATA = str(FIXTURE_DIR)


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdin=io.StringIO(""), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_batch_query():
    code, out, err = invoke("--catalog", CATALOG, "--data", DATA, "--now", "15-06-2006",
                            "--execute", "SELECT salary FROM Salary WHERE empno = 103 AS OF CURRENT")
    assert code == 0, err
    assert out.splitlines()[2].strip() == "Rs. 1500"
    assert len(out.splitlines()) == 3


def test_batch_data_dir_only():
    code, out, _ = invoke("--data", DATA, "--now", "15-06-2006", "--format", "csv",
                          "--execute", "SELECT * FROM Dhead AS OF 01-06-1996")
    assert code == 0 and out == "empno,dno\n103,10\n"


def test_batch_unknown_relation():
    code, out, err = invoke("--execute", "SELECT * FROM Nope")
    assert code == 2 and out == "" and "Nope" in err


def test_batch_parse_error():
    code, _, err = invoke("--execute", "SELECT FROM Salary")
    assert code == 2 and "position 7" in err


def test_load_failure_exit_1(tmp_path):
    bad = tmp_path / "bad.ltrm"
    bad.write_text("RELATION (")
    code, _, err = invoke("--catalog", str(bad))
    assert code == 1 and "line 1" in err
    code, _, _ = invoke("--catalog", str(tmp_path / "missing.ltrm"))
    assert code == 1


def test_format_from_environment(monkeypatch):
    monkeypatch.setenv("LTRM_FORMAT", "json")
    code, out, _ = invoke("--data", DATA, "--now", "15-06-2006", "--execute", "SELECT dno FROM Dhead")
    assert code == 0 and out.strip().startswith("[")


def test_repl_banner_and_prompt():
    out = io.StringIO()
    code = run([], stdin=io.StringIO(""), stdout=out, stderr=io.StringIO())
    assert code == 0
    assert out.getvalue().startswith("ltrm:") and "ltrm> " in out.getvalue()


def test_repl_session_script():
    stdin = io.StringIO(".relations\nSELECT * FROM Nope\n.quit\nSELECT * FROM Salary\n")
    out = io.StringIO()
    session = Session(load_fixture())
    assert repl(session, stdin, out) == 0
    text = out.getvalue()
    assert "Salary  temporal  4 tuples" in text
    assert "error:" in text


@pytest.fixture
def session(clock):
    return Session(load_fixture(clock), clock)


def test_check_command(session):
    assert repl_command(".check", session) == "0 violations\n"


def test_schema_command(session):
    text = repl_command(".schema Salary", session)
    assert "ENTITY KEY (empno)" in text and "GRANULARITY DAY" in text


def test_change_then_query():
    clock = FrozenClock.at(make_timepoint(2007, 2, 1))
    session = Session(load_fixture(clock), clock)
    assert "appended" in repl_command(".change Salary SET salary=Rs.1600 WHERE empno=103 EFFECTIVE 01-01-2007", session)
    out = repl_command("SELECT salary FROM Salary WHERE empno = 103 AS OF 01-01-2007", session)
    assert out.splitlines()[2].strip() == "Rs. 1600"
    # oracle: the history row whose closed interval holds 01-01-2007
    t = make_timepoint(2007, 1, 1)
    held = [
        x.values["salary"] for x in history(session.db, "Salary", {"empno": 103})
        if x.stamp.activation_start <= t <= (clock.now_at(Granularity.DAY) if x.stamp.activation_end is NOW
                                              else x.stamp.activation_end)
    ]
    assert held == [Money(1600)]
    assert history(session.db, "Salary", {"empno": 103})[-2].stamp.activation_end == make_timepoint(2006, 12, 31)


def test_proactive_change_before_clock_reaches_it(session):
    # clock frozen at 15-06-2006: the open row starting 01-01-2007 resolves to an empty interval
    repl_command(".change Salary SET salary=Rs.1600 WHERE empno=103 EFFECTIVE 01-01-2007", session)
    out = repl_command("SELECT salary FROM Salary WHERE empno = 103 AS OF 01-01-2007", session)
    assert out.splitlines()[2:] == []
    hist = repl_command("SELECT salary, activation_start, activation_end FROM Salary WHERE empno = 103 HISTORY", session)
    last = hist.splitlines()[-1]
    assert "Rs. 1600" in last and "01-01-2007" in last and "Current time" in last


def test_insert_and_delete_commands(session):
    assert "inserted" in repl_command(".insert Salary (101, Rs.700) START 01-03-2000 UPDATE 28-02-2000", session)
    assert "inserted" in repl_command(".insert Department (30, 'Research', NULL, NULL)", session)
    assert "inserted" in repl_command(".insert Manager (101) START 01-01-2001 END 31-12-2001", session)
    assert "deleted" in repl_command(".delete Salary WHERE empno=101 EFFECTIVE 31-12-2005", session)
    assert repl_command(".delete Salary WHERE empno=101 EFFECTIVE 01-01-2006", session).startswith("error:")
    out = repl_command("SELECT * FROM Salary WHERE empno = 101 HISTORY", session)
    assert "31-12-2005" in out and "28-02-2000" in out
    assert repl_command(".check", session) == "0 violations\n"


def test_command_errors_keep_session(session):
    for line in (".insert Salary (1)", ".change Salary WHERE empno=103", ".bogus", ".schema Nope",
                 ".insert Salary (999, Rs.1) START 01-01-2000", ".delete Manager WHERE empno=103 EFFECTIVE 01-01-2000"):
        assert repl_command(line, session).startswith("error:")
    assert repl_command(".check", session) == "0 violations\n"


def test_save_command(session, tmp_path):
    assert "saved" in repl_command(f".save {tmp_path}", session)
    assert (tmp_path / "catalog.ltrm").exists()


def test_tql_lines_never_mutate(session):
    before = session.db.view()
    repl_command("SELECT * FROM Salary HISTORY COALESCED", session)
    repl_command("SELECT * FROM Dhead DURING [01-01-1990, CURRENT]", session)
    assert session.db.view() == before


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ltrm.cli", "--data", DATA, "--now", "15-06-2006",
         "--execute", "SELECT salary FROM Salary WHERE empno = 103 AS OF CURRENT"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "Rs. 1500" in proc.stdout
