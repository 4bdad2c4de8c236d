"""Acceptance criteria 1-9, each recorded as one PASS/FAIL line in the run summary."""

import functools
import io
import random
import subprocess
import sys
from datetime import date, datetime, timedelta, timezone

import pytest

from ltrm import FrozenClock, evaluate, load_catalog, validate_database
from ltrm.chronos import NOW, Granularity, TimePoint, convert, make_timepoint
from ltrm.cli import run
from ltrm.constraints import ViolationKind, check_non_overlap
from ltrm.engine import coalesce_tuples, history, snapshot_tuples
from ltrm.model import ActivationStamp, Money, TemporalTuple
from ltrm.storage import FIXTURE_DIR
from ltrm.tql import parse, print_ast
from ltrm.tql.ast import OPERATORS, AsOf, Comparison, DateTimeLiteral, During, History, Join, Query
from ltrm.tql.lexer import KEYWORDS
from ltrm.tql.render import render_result

from conftest import ACCEPTANCE_RESULTS, day
from oracles import brute_force_overlaps, day_index, pairwise_coalesce, points_covered
from sequences import run_sequence
from tql_cases import GOLDEN, PARSE_ERRORS

G = Granularity


def criterion(key, title):
    def wrap(fn):
        @functools.wraps(fn)
        def test(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE_RESULTS[key] = ("FAIL", title)
                print(f"FAIL {key}: {title}")
                raise
            ACCEPTANCE_RESULTS[key] = ("PASS", title)
            print(f"PASS {key}: {title}")
        return test
    return wrap


# ---------------------------------------------------------------- criterion 1

# Rows as printed in the source tables, tab separated.
EMPLOYEE_TABLE = """\
101\tahmed\tmumtaz\t01-03-2000\t02-05-1980\tA60\tStreet 27\tM
102\tmajid\tbhati\t14-03-2002\t10-02-1976\tA78\tStreet 22\tM
103\taliya\trasheed\t13-05-1995\t11-08-1968\tC12\tStreet 21\tF
104\tsalim\tkhan\t10-04-2006\t12-11-1981\tB21\tStreet 11\tM
105\tdanish\tkhan\t11-07-1997\t01-02-1978\tC76\tStreet 9\tM
106\tsajid\tmahmood\t02-04-1999\t10-09-1977\tD1\tStreet 9\tM"""

DHEAD_TABLE = """\
103\t10\t13-05-1995\t13-05-1998\t14-05-1995
103\t10\t14-05-1998\t21-07-2002\t14-05-1998
103\t20\t22-07-2002\tCurrent time\t22-07-2002"""

SALARY_TABLE = """\
103\tRs. 900\t13-05-1995\t01-03-1998\t12-05-1995
103\tRs. 1100\t02-03-1998\t11-12-2002\t27-02-1998
103\tRs. 1300\t12-12-2002\t10-07-2005\t11-12-2002
103\tRs. 1500\t11-07-2005\tCurrent time\t09-07-2005"""


def table_cells(text):
    lines = text.splitlines()
    assert set(lines[1]) <= {"-", "+"}
    return [[c.strip() for c in line.split("|")] for line in lines[2:]]


@criterion("C1", "fixture tables render exactly")
def test_c1_fixture_fidelity(fixture_db, clock):
    for query, expected, count in [
        ("SELECT * FROM Employee", EMPLOYEE_TABLE, 6),
        ("SELECT * FROM Dhead HISTORY", DHEAD_TABLE, 3),
        ("SELECT * FROM Salary WHERE empno = 103 HISTORY", SALARY_TABLE, 4),
    ]:
        got = table_cells(render_result(evaluate(query, fixture_db, clock), "table"))
        want = [line.split("\t") for line in expected.splitlines()]
        assert len(got) == count
        assert got == want, query


# ---------------------------------------------------------------- criterion 2

SNAPSHOT_QUERIES = [
    ("SELECT salary FROM Salary WHERE empno = 103 AS OF 01-01-2000", "salary", Money(1100)),
    ("SELECT salary FROM Salary WHERE empno = 103 AS OF CURRENT", "salary", Money(1500)),
    ("SELECT dno FROM Dhead WHERE empno = 103 AS OF 01-06-1996", "dno", 10),
    ("SELECT dno FROM Dhead WHERE empno = 103 AS OF 01-01-2003", "dno", 20),
]


@criterion("C2", "snapshot queries return the exact values")
def test_c2_snapshot_queries(fixture_db, clock):
    for text, column, value in SNAPSHOT_QUERIES:
        result = evaluate(text, fixture_db, clock)
        assert result.columns == (column,)
        assert result.rows == [(value,)], text
    assert render_result(evaluate(SNAPSHOT_QUERIES[1][0], fixture_db, clock), "csv") == "salary\nRs. 1500\n"


# ---------------------------------------------------------------- criterion 3

SALARY_HISTORY = [
    (900, "13-05-1995", "01-03-1998", "12-05-1995"),
    (1100, "02-03-1998", "11-12-2002", "27-02-1998"),
    (1300, "12-12-2002", "10-07-2005", "11-12-2002"),
    (1500, "11-07-2005", None, "09-07-2005"),
]


@criterion("C3", "salary history has the exact intervals and update times")
def test_c3_history(fixture_db, clock):
    tuples = history(fixture_db, "Salary", {"empno": 103})
    got = [(t.values["salary"], t.stamp.activation_start, t.stamp.activation_end, t.stamp.updatetime) for t in tuples]
    want = [(Money(s), day(a), NOW if e is None else day(e), day(u)) for s, a, e, u in SALARY_HISTORY]
    assert got == want
    result = evaluate("SELECT * FROM Salary WHERE empno = 103 HISTORY", fixture_db, clock)
    assert result.column("salary") == [Money(s) for s, *_ in SALARY_HISTORY]
    assert result.column("activation_end")[-1] is NOW


# ---------------------------------------------------------------- criterion 4

@criterion("C4", "update semantics hold over 1000 random operation sequences")
def test_c4_update_semantics():
    totals = {"inserts": 0, "changes": 0, "deletes": 0, "rejected": 0}
    for seed in range(1000):
        for k, v in run_sequence(seed).items():
            totals[k] += v
    assert all(v > 500 for v in totals.values()), totals


# ---------------------------------------------------------------- criterion 5

R_CATALOG = """
TEMPORAL RELATION R (k INTEGER, v INTEGER)
    KEY (k, activation_start) ENTITY KEY (k) GRANULARITY DAY;
"""
BASE = 10_000
WINDOW = 4000


def random_relation(rng, n):
    """Value-equivalent groups with overlapping, meeting and open intervals; no checks applied."""
    db = load_catalog(R_CATALOG)
    store = db.store("R")
    for _ in range(n):
        s = rng.randrange(0, WINDOW)
        end = NOW if rng.random() < 0.15 else TimePoint(G.DAY, BASE + s + rng.randrange(0, 400))
        stamp = ActivationStamp(TimePoint(G.DAY, BASE + s), end, TimePoint(G.DAY, BASE + rng.randrange(0, WINDOW)))
        store.append(TemporalTuple(db.next_tuple_id(), {"k": rng.randrange(3), "v": rng.randrange(2)}, stamp))
    return store.schema, list(store.tuples)


def triples(tuples, now):
    return [((t.values["k"], t.values["v"]), t.stamp.activation_start.index,
             now if t.stamp.activation_end is NOW else t.stamp.activation_end.index) for t in tuples]


def snapshot_rows(schema, tuples, t, clock):
    return {x.row(("k", "v")) for x in snapshot_tuples(schema, tuples, t, clock)}


@criterion("C5", "coalesce is idempotent, order independent and snapshot preserving")
def test_c5_coalesce(fixture_db, clock):
    rng = random.Random(5)
    for _ in range(60):
        schema, tuples = random_relation(rng, rng.randrange(0, 33))
        now = BASE + rng.randrange(-100, WINDOW + 100)
        clk = FrozenClock.at(TimePoint(G.DAY, now))
        merged = coalesce_tuples(schema, tuples, clk)
        assert coalesce_tuples(schema, merged, clk) == merged
        shuffled = tuples[:]
        rng.shuffle(shuffled)
        assert coalesce_tuples(schema, shuffled, clk) == merged
        assert sorted(triples(merged, now)) == pairwise_coalesce(triples(tuples, now))
        for i in range(BASE, BASE + WINDOW):
            t = TimePoint(G.DAY, i)
            assert snapshot_rows(schema, merged, t, clk) == snapshot_rows(schema, tuples, t, clk)
        lo, hi = BASE, BASE + WINDOW - 1
        assert points_covered(triples(merged, now), lo, hi) == points_covered(triples(tuples, now), lo, hi)

    schema, tuples = fixture_db.lookup("Dhead")
    merged = coalesce_tuples(schema, tuples, clock)
    assert (merged[0].values["dno"], merged[0].stamp.activation_start, merged[0].stamp.activation_end) == (
        10, day("13-05-1995"), day("21-07-2002"))


# ---------------------------------------------------------------- criterion 6

FK_CATALOG = (FIXTURE_DIR / "catalog.ltrm").read_text()


def seed_tuple(db, rel, values, start, end):
    store = db.store(rel)
    t = TemporalTuple(db.next_tuple_id(), values,
                      ActivationStamp(day(start), NOW if end is None else day(end), day(start)))
    store.append(t)
    return t.tuple_id


@criterion("C6", "non-overlap matches brute force and seeded violations are found")
def test_c6_constraints(fixture_db, clock):
    rng = random.Random(6)
    for _ in range(1000):
        db = load_catalog(R_CATALOG)
        store = db.store("R")
        for _ in range(rng.randrange(0, 65)):
            s = rng.randrange(0, 150)
            end = NOW if rng.random() < 0.15 else TimePoint(G.DAY, BASE + s + rng.randrange(-2, 30))
            store.append(TemporalTuple(db.next_tuple_id(), {"k": rng.randrange(5), "v": 0},
                                       ActivationStamp(TimePoint(G.DAY, BASE + s), end, TimePoint(G.DAY, BASE))))
        now = BASE + rng.randrange(0, 200)
        clk = FrozenClock.at(TimePoint(G.DAY, now))
        plain = [(t.values["k"], t.stamp.activation_start.index,
                  now if t.stamp.activation_end is NOW else t.stamp.activation_end.index) for t in store.tuples]
        expected = sorted((store.tuples[i].tuple_id, store.tuples[j].tuple_id) for i, j in brute_force_overlaps(plain))
        got = sorted(v.tuple_ids for v in check_non_overlap(store.schema, store.tuples, clk))
        assert got == expected

    assert len(validate_database(fixture_db, clock)) == 0

    first = fixture_db.lookup("Salary")[1][0]
    dup = seed_tuple(fixture_db, "Salary", {"empno": 103, "salary": Money(900)}, "13-05-1995", "01-03-1998")
    overlap = seed_tuple(fixture_db, "Dhead", {"empno": 103, "dno": 20}, "01-01-2003", "31-12-2003")
    dangling = seed_tuple(fixture_db, "Manager", {"empno": 999}, "01-01-2000", None)
    open_dhead = fixture_db.lookup("Dhead")[1][2].tuple_id
    found = {(v.kind, v.relation, v.tuple_ids) for v in validate_database(fixture_db, clock)}
    assert (ViolationKind.KEY_UNIQUENESS, "Salary", (first.tuple_id, dup)) in found
    assert (ViolationKind.NON_OVERLAP, "Dhead", (open_dhead, overlap)) in found
    assert (ViolationKind.REFERENTIAL_INTEGRITY, "Manager", (dangling,)) in found


# ---------------------------------------------------------------- criterion 7

@criterion("C7", "time conversion round trips and calendar order agree with datetime")
def test_c7_time_model():
    rng = random.Random(7)
    checked = 0
    for coarse in G:
        for fine in G:
            if fine > coarse:
                continue
            for _ in range(500):
                tp = TimePoint(coarse, rng.randrange(-200_000, 200_000) if coarse >= G.DAY
                               else rng.randrange(-10**9, 10**9))
                assert convert(convert(tp, fine), coarse) == tp
                checked += 1
    assert checked >= 10_000

    for i in range(-1000, 1000):
        assert convert(TimePoint(G.DAY, i), G.MINUTE).index == 1440 * i
        assert convert(TimePoint(G.MINUTE, 1440 * i), G.DAY).index == i
        assert convert(TimePoint(G.MINUTE, 1440 * i - 1), G.DAY).index == i - 1

    lo, span = date(1900, 1, 1), (date(2100, 12, 31) - date(1900, 1, 1)).days
    dates = [lo + timedelta(days=rng.randrange(span + 1)) for _ in range(1000)]
    points = [make_timepoint(d.year, d.month, d.day) for d in dates]
    assert [p.index for p in points] == [day_index(d) for d in dates]
    assert sorted(range(1000), key=lambda i: points[i]) == sorted(range(1000), key=lambda i: dates[i])
    for d in dates[:200]:
        moment = datetime(d.year, d.month, d.day, rng.randrange(24), rng.randrange(60), tzinfo=timezone.utc)
        tp = make_timepoint(moment.year, moment.month, moment.day, moment.hour, moment.minute, granularity=G.MINUTE)
        assert tp.index * 60 == int(moment.timestamp())


# ---------------------------------------------------------------- criterion 8

def random_ident(rng):
    while True:
        name = rng.choice("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_") + "".join(
            rng.choice("abcdefghijklmnopqrstuvwxyz0123456789_") for _ in range(rng.randrange(0, 8)))
        if name.upper() not in KEYWORDS and name.lower() != "rs":
            return name


def random_literal(rng):
    kind = rng.randrange(4)
    if kind == 0:
        return rng.randrange(-10**9, 10**9)
    if kind == 1:
        return "".join(rng.choice("ab ' xyz-,09") for _ in range(rng.randrange(0, 8)))
    if kind == 2:
        return Money(rng.randrange(0, 10**7))
    return make_timepoint(rng.randrange(1900, 2101), rng.randrange(1, 13), rng.randrange(1, 29))


def random_time_literal(rng):
    kind = rng.randrange(3)
    if kind == 0:
        return NOW
    ymd = (rng.randrange(1900, 2101), rng.randrange(1, 13), rng.randrange(1, 29))
    return DateTimeLiteral(*ymd) if kind == 1 else DateTimeLiteral(*ymd, rng.randrange(24), rng.randrange(60))


def random_query(rng):
    temporal = [None, AsOf(random_time_literal(rng)),
                During(random_time_literal(rng), random_time_literal(rng)),
                History(rng.random() < 0.5)][rng.randrange(4)]
    return Query(
        projection=None if rng.random() < 0.3 else tuple(random_ident(rng) for _ in range(rng.randrange(1, 5))),
        source=random_ident(rng),
        join=Join(random_ident(rng), random_ident(rng), random_ident(rng)) if rng.random() < 0.3 else None,
        predicate=tuple(Comparison(random_ident(rng), rng.choice(OPERATORS), random_literal(rng))
                        for _ in range(rng.randrange(0, 4))),
        temporal=temporal,
    )


@criterion("C8", "parser fixpoint, golden ASTs and error positions")
def test_c8_parser():
    rng = random.Random(8)
    for _ in range(1000):
        query = random_query(rng)
        assert parse(print_ast(query)) == query
    assert len(GOLDEN) == 20
    for text, expected in GOLDEN:
        assert parse(text) == expected, text
    from ltrm.errors import ParseError

    for text, position, expected in PARSE_ERRORS:
        with pytest.raises(ParseError) as err:
            parse(text)
        assert err.value.position == position, text
        assert expected in err.value.expected, text


# ---------------------------------------------------------------- criterion 9

BATCH = ["--data", str(FIXTURE_DIR), "--now", "15-06-2006", "--execute", SNAPSHOT_QUERIES[1][0]]


@criterion("C9", "batch CLI output is byte identical across runs")
def test_c9_determinism():
    outputs = [
        subprocess.run([sys.executable, "-m", "ltrm.cli", *BATCH], capture_output=True, check=True).stdout
        for _ in range(5)
    ]
    assert len(set(outputs)) == 1 and b"Rs. 1500" in outputs[0]
    for text, *_ in SNAPSHOT_QUERIES:
        seen = set()
        for _ in range(5):
            out = io.StringIO()
            assert run(BATCH[:-1] + [text], stdin=io.StringIO(""), stdout=out, stderr=io.StringIO()) == 0
            seen.add(out.getvalue())
        assert len(seen) == 1
