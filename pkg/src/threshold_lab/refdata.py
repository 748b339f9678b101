"""Embedded reference datasets: band tables, kappa=4 threshold solutions,
first-band coefficients, the kappa=3 threshold list in (-1/2, 1/2), and the
reference Sigma validity verdicts.

Closed forms are stored as Python expressions over ``sqrt``, ``cbrt`` and
the energy ``E`` and are evaluated with mpmath.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable

import mpmath as mp

from .exceptions import UnknownSource

SOURCES = ("table1", "table2", "table4", "section8", "sigma")
DECIMAL_TOL = 5e-4
TABLE1_SOLVER_TOL = 1e-3
TABLE4_SOLVER_TOL = 1e-4
CSV_COLUMNS = ("source", "kappa", "label", "value", "closed_form", "aux_json")


@dataclass(frozen=True)
class ThresholdRecord:
    source: str
    kappa: int
    label: str
    value: float | None
    closed_form: str | None = None
    aux: dict | None = field(default=None, compare=True)


@dataclass(frozen=True)
class SigmaVerdictRecord:
    kappa: int
    band: int
    indices: tuple[int, ...]
    expected_valid: bool


def _cube_root_forms():
    s = "cbrt(629+48*sqrt(177))"
    t = f"sqrt(3/(133-1495/{s}+65*{s}))"
    e3 = (f"28/65 + 2/(65*{t}) + sqrt(4256/12675 + 368/(195*{s}) - 16/195*{s}"
          f" + 121088*{t}/4225)/2")
    w = "cbrt(13025367+208250*sqrt(6294))"
    e5 = f"16/1275*(42 + {w}/cbrt(9) - 32533/({w}*cbrt(3)))"
    return e3, e5


E_K4_2 = "(2+sqrt(2)+sqrt(2+4*sqrt(2)))/4"
E_K4_3, E_K4_5 = _cube_root_forms()


def _table1():
    rows = []
    for n, frac in zip(range(6), ["1", "2/3", "1/2", "2/5", "1/3", "2/7"]):
        rows.append((2, n, eval(frac, {}), frac))
    k3 = [(0, 1.5, "3/2"), (1, 1.320, "(5+3*sqrt(2))/7"), (2, 1.228, "(9+sqrt(33))/12"),
          (3, 1.173, None), (4, 1.137, None), (5, 1.112, None)]
    k4 = [(0, 1.707, "1+1/sqrt(2)"), (1, 1.6, "8/5"), (2, 1.545, E_K4_2),
          (3, 1.512, E_K4_3), (4, 1.491, None), (5, 1.476, E_K4_5)]
    rows += [(3, n, v, cf) for n, v, cf in k3]
    rows += [(4, n, v, cf) for n, v, cf in k4]
    return [ThresholdRecord("table1", k, f"E_{n}", v, cf) for k, n, v, cf in rows]


def _table2():
    def rec(ansatz, E, printed, **aux):
        return ThresholdRecord("table2", 4, f"({ansatz})", printed, E, aux or None)

    half = {"closed_form": "sqrt(2)/2"}
    return [
        rec(1, "1/2+1/(2*sqrt(2))", 0.853, Y_1=half),
        rec(1, E_K4_2, 1.545, Y_1=half),
        rec(1, "(2+sqrt(2)-sqrt(2+4*sqrt(2)))/4", 0.161, Y_1=half),
        rec(1, "1/2-1/(2*sqrt(2))", 0.146, Y_1={"closed_form": "-sqrt(2)/2"}),
        rec(1, "8/5", 1.6, Y_1={"closed_form": "E/2", "printed": 0.8}),
        rec(3, "sqrt(2/5)", 0.632, Y_1={"closed_form": "3/sqrt(10)", "printed": 0.948}),
        rec(3, "sqrt(2)/3", 0.471, Y_1=half),
        rec(4, "2/sqrt(5)", 0.894, Y_1={"closed_form": "0"},
            Y_0={"closed_form": "E/2", "printed": 0.447}),
        rec(4, "1/sqrt(5)", 0.447, Y_1={"closed_form": "0"},
            Y_0={"closed_form": "2*E", "printed": 0.894}),
        rec(4, "(sqrt(3)-1)/(2*sqrt(2))", 0.258, Y_1={"closed_form": "0"},
            Y_0={"closed_form": "-sqrt(2)/2"}),
        rec(4, "1/(2*sqrt(2))", 0.353, Y_1={"closed_form": "0"},
            Y_0={"closed_form": "1/sqrt(2)"}),
        rec(4, "(sqrt(2)+sqrt(6))/4", 0.965, Y_1={"closed_form": "0"},
            Y_0={"closed_form": "1/sqrt(2)"}),
        rec(4, "3*sqrt(2)/5", 0.848, Y_1={"closed_form": "1/sqrt(2)"},
            Y_0={"closed_form": "7/(5*sqrt(2))", "printed": 0.989}),
        rec(4, "sqrt(2)/5", 0.282, Y_1={"closed_form": "-1/sqrt(2)"},
            Y_0={"closed_form": "E/2", "printed": 0.141}),
    ]


# ansatz rows printed without any solution
TABLE2_EMPTY = ("(2)", "(5)", "(6)")


def _table4():
    rows = [
        (2, 2 / 3, "2/3", 0.6428, "9/14"),
        (3, 1.3203, "(5+3*sqrt(2))/7", 0.6027, "(170-81*sqrt(2))/92"),
        (4, 1.6, "8/5", 0.5929, "625/1054"),
        (5, 1.7386, "(49+12*sqrt(10)+sqrt(5*(49+12*sqrt(10))))/62", 0.5889,
         "(-4000073+2667375*sqrt(2)+225*sqrt(5*(25786331-6299370*sqrt(2))))/3122396"),
        (6, 1.8164, "1+sqrt(2/3)", 0.5869, "27/46"),
        (7, 1.8642, None, 0.5857, None),
        (8, 1.8956, "(16+3*sqrt(2)+2*sqrt(26+7*sqrt(2)))/17", 0.5850, None),
        (9, 1.9173, None, 0.5844, None),
    ]
    out = []
    for k, e, ecf, rho, rcf in rows:
        aux = {"rho_index": 2 * k, "rho": rho}
        if rcf:
            aux["rho_closed_form"] = rcf
        out.append(ThresholdRecord("table4", k, "E_1", e, ecf, aux))
    return out


SECTION8_VALUES = (
    0.169, 0.25, -0.25, -0.1028, -0.16019, -0.1202, -0.17911, -0.11608, -0.10796, -0.11385,
    -0.08425, -0.0917, -0.07143, -0.14325, -0.05169, -0.06615, -0.08424, -0.18726, -0.2857,
    -0.40824, -0.2857, -0.13911, -0.06805, -0.0813, -0.07704, -0.05406, -0.08014, -0.04594,
    -0.27129, -0.1082, -0.38229, -0.4467, -0.34518, -0.43085, -0.105384, -0.05659, -0.04657,
    -0.09839, -0.08979, -0.03862, 0.05439, 0.04135, 0.13104, 0.14092, 0.14142, 0.12009,
    0.14121, 0.11771, 0.13562, 0.34089, 0.32821, 0.31674, 0.31404, 0.31616, 0.30948, 0.36612,
    0.06397, 0.07628, 0.04454, 0.05450, 0.1001, 0.08365, 0.03773, 0.03277, 0.04901, 0.05283,
    0.05445, 0.02930, 0.05402, 0.04300, 0.04030,
)
# items stated as exact values
SECTION8_EXACT = {2: "1/4", 3: "-1/4"}
# listed items that are negatives of each other
SECTION8_NEGATION_PAIRS = ((2, 3),)


def _section8():
    return [
        ThresholdRecord("section8", 3, f"{i})", v, SECTION8_EXACT.get(i))
        for i, v in enumerate(SECTION8_VALUES, start=1)
    ]


def _sigma_verdicts():
    def run(k, m):
        return list(range(k, k * m + 1, k))

    out = []
    for idx, ok in [([4, 8, 12, 24], True), ([4, 8, 12, 28], True), ([4, 8, 12, 32], True),
                    ([4, 8, 16, 24], True), ([4, 8, 12, 16], False), ([4, 8, 12, 20], False),
                    ([4, 8, 16, 20], False)]:
        out.append(SigmaVerdictRecord(4, 2, tuple(idx), ok))
    for band, idx in [(1, [4, 8]), (3, [4, 8, 12, 16, 24, 36]), (3, run(4, 6)),
                      (4, [4, 8, 12, 16, 20, 24, 28, 52]), (5, run(4, 10))]:
        out.append(SigmaVerdictRecord(4, band, tuple(idx), True))
    out.append(SigmaVerdictRecord(3, 5, tuple(run(3, 10)), True))
    kappa2 = {
        5: ([(18, 20), (20, 24), (22, 24), (24, 28), (24, 32), (28, 32)],
            [(18, 24), (18, 26), (18, 28)]),
        6: ([(22, 28), (22, 30)], [(22, 24), (22, 26)]),
        7: ([(26, 28)], [(28, 36)]),
        8: ([(30, 38), (30, 40)], [(30, 32), (30, 36)]),
    }
    for band, (good, bad) in kappa2.items():
        base = run(2, 2 * band - 2)
        for pairs, ok in ((good, True), (bad, False)):
            for a, b in pairs:
                out.append(SigmaVerdictRecord(2, band, tuple(base + [a, b]), ok))
    out.append(SigmaVerdictRecord(2, 9, tuple(run(2, 18)), True))
    return out


# reference M rho = 0 solutions, keyed by (kappa, band, Sigma)
RHO_VECTORS = {
    (2, 1, (2, 4)): (1.0, 9 / 14),
    (4, 1, (4, 8)): (1.0, 625 / 1054),
    (3, 5, (3, 6, 9, 12, 15, 18, 21, 24, 27, 30)):
        (1, 1.599931, 1.645307, 1.27734, 0.77838, 0.37292, 0.13741, 0.03703, 0.00657, 0.00058),
    (4, 2, (4, 8, 12, 24)): (1, 0.81070, 0.21647, -0.06593),
    (4, 3, (4, 8, 12, 16, 24, 36)): (1, 1.18290, 0.68875, 0.18594, -0.00794, -0.00288),
    (4, 3, (4, 8, 12, 16, 20, 24)): (1, 1.37002, 1.06973, 0.53992, 0.16964, 0.02655),
    (4, 4, (4, 8, 12, 16, 20, 24, 28, 52)):
        (1, 1.46864, 1.29941, 0.80098, 0.34657, 0.09808, 0.01417, 0.000030),
    (4, 5, (4, 8, 12, 16, 20, 24, 28, 32, 36, 40)):
        (1, 1.58691, 1.60962, 1.22543, 0.72779, 0.33759, 0.11956, 0.03071, 0.00514, 0.00042),
}

# reference interior chain points X_1, X_2, ... keyed by (kappa, band)
CHAIN_POINTS = {
    (3, 5): (0.30753, 0.44178, 0.55603, 0.67028, 0.80453),
    (4, 3): (0.65415, 0.75635),
    (4, 4): (0.62042,),
    (4, 5): (0.59734, 0.67452, 0.73825, 0.80198, 0.87916),
    (4, 6): (0.58072, 0.65158, 0.70710, 0.75857, 0.81409, 0.88495),
}

# reference annihilating polynomials, ascending; pairs (a, b) mean a + b sqrt(2)
MINIMAL_POLYNOMIALS = {
    (3, 5): (4, -220, 4333, -36442, 128593, -270784, 536359, -750010, 372775),
    (4, 3): (16, -64, 56, -112, 65),
    (4, 5): (-32768, 22784, -6048, 3825),
}
SQRT2_POLYNOMIALS = {
    (4, 4): (("1/4", 0), (-2, 1), (5, -4), (-4, -2), (5, 0)),
    (4, 6): (("1/8", 0), (-2, -1), (16, 12), (-72, -52), (200, 128), (-448, -224), (384, 0)),
}


_LOADERS = {
    "table1": _table1,
    "table2": _table2,
    "table4": _table4,
    "section8": _section8,
    "sigma": _sigma_verdicts,
}


def load_dataset(source: str) -> list:
    """All records of one embedded dataset.

    ``source`` is one of table1, table2, table4, section8 or sigma.
    """
    try:
        loader = _LOADERS[source]
    except KeyError:
        raise UnknownSource(f"unknown dataset {source!r}; choose from {', '.join(SOURCES)}") from None
    return loader()


def evaluate_closed_form(expr: str, E=None, dps: int = 40):
    """Numeric value of a stored closed-form expression."""
    namespace = {"sqrt": mp.sqrt, "cbrt": mp.cbrt, "pi": mp.pi, "cos": mp.cos}
    if E is not None:
        namespace["E"] = mp.mpf(E)
    with mp.workdps(dps):
        value = eval(expr, {"__builtins__": {}}, namespace)  # trusted, embedded strings
        return float(value)


@dataclass
class IntegrityReport:
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, passed: bool, message: str) -> None:
        self.checks += 1
        if not passed:
            self.failures.append(message)


def _truncation_note(exact: float, printed: float) -> str:
    digits = len(repr(printed).split(".")[-1]) if "." in repr(printed) else 0
    truncated = math.floor(abs(exact) * 10**digits) / 10**digits * math.copysign(1, exact)
    return " (matches truncation)" if math.isclose(truncated, printed, abs_tol=1e-12) else ""


def _compare(report, where, expr, printed, E=None, tol=DECIMAL_TOL):
    exact = evaluate_closed_form(expr, E)
    diff = abs(exact - printed)
    report.check(diff <= tol, f"{where}: {expr} = {exact:.6f} vs printed {printed} "
                              f"(|diff| = {diff:.2e}){_truncation_note(exact, printed)}")


def check_integrity(solver: bool = True, tol: float = DECIMAL_TOL) -> IntegrityReport:
    """Cross-check every embedded dataset.

    Closed forms are compared to their printed decimals within ``tol``;
    with ``solver=True`` the table1 and table4 energies are also compared to
    :func:`~threshold_lab.bands.solve_band_endpoint`.
    """
    from .bands import BandWindow, solve_band_endpoint

    report = IntegrityReport()
    for rec in load_dataset("table1"):
        where = f"table1 kappa={rec.kappa} {rec.label}"
        if rec.closed_form:
            _compare(report, where, rec.closed_form, rec.value, tol=tol)
        report.check(BandWindow(rec.kappa).contains(rec.value), f"{where}: outside J_2")
        if solver:
            n = int(rec.label.split("_")[1])
            E = solve_band_endpoint(rec.kappa, n).E
            report.check(abs(E - rec.value) <= TABLE1_SOLVER_TOL,
                         f"{where}: solver gives {E:.6f}, printed {rec.value}")

    for rec in load_dataset("table2"):
        where = f"table2 {rec.label} E~{rec.value}"
        _compare(report, where, rec.closed_form, rec.value, tol=tol)
        E = evaluate_closed_form(rec.closed_form)
        for name, entry in (rec.aux or {}).items():
            if "printed" in entry:
                _compare(report, f"{where} {name}", entry["closed_form"], entry["printed"], E, tol)

    for rec in load_dataset("table4"):
        where = f"table4 kappa={rec.kappa}"
        if rec.closed_form:
            _compare(report, f"{where} E_1", rec.closed_form, rec.value, tol=tol)
        if rec.aux.get("rho_closed_form"):
            _compare(report, f"{where} rho_{rec.aux['rho_index']}", rec.aux["rho_closed_form"],
                     rec.aux["rho"], tol=tol)
        if solver:
            E = solve_band_endpoint(rec.kappa, 1).E
            report.check(abs(E - rec.value) <= TABLE4_SOLVER_TOL,
                         f"{where}: solver gives E_1 = {E:.6f}, printed {rec.value}")

    items = load_dataset("section8")
    report.check(len(items) == 71, f"section8: {len(items)} items, expected 71")
    for rec in items:
        report.check(math.isfinite(rec.value) and abs(rec.value) < 0.5,
                     f"section8 {rec.label}: {rec.value} outside (-1/2, 1/2)")
        if rec.closed_form:
            _compare(report, f"section8 {rec.label}", rec.closed_form, rec.value, tol=tol)
    for a, b in SECTION8_NEGATION_PAIRS:
        va, vb = items[a - 1].value, items[b - 1].value
        report.check(abs(va + vb) <= tol, f"section8 items {a}), {b}) are not negatives")

    for rec in load_dataset("sigma"):
        report.check(all(i % rec.kappa == 0 for i in rec.indices),
                     f"sigma kappa={rec.kappa} band={rec.band}: index not a multiple of kappa")
    return report


def _record_dict(rec) -> dict:
    d = asdict(rec)
    if "indices" in d:
        d["indices"] = list(d["indices"])
    return d


def to_json(records: Iterable) -> str:
    return json.dumps([_record_dict(r) for r in records], indent=2, sort_keys=True)


def from_json(text: str) -> list:
    out = []
    for d in json.loads(text):
        if "indices" in d:
            d["indices"] = tuple(d["indices"])
            out.append(SigmaVerdictRecord(**d))
        else:
            out.append(ThresholdRecord(**d))
    return out


def to_csv(records: Iterable[ThresholdRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([
            r.source, r.kappa, r.label,
            "" if r.value is None else repr(float(r.value)),
            r.closed_form or "",
            json.dumps(r.aux, sort_keys=True) if r.aux is not None else "",
        ])
    return buf.getvalue()


def from_csv(text: str) -> list[ThresholdRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(ThresholdRecord(
            row["source"], int(row["kappa"]), row["label"],
            float(row["value"]) if row["value"] else None,
            row["closed_form"] or None,
            json.loads(row["aux_json"]) if row["aux_json"] else None,
        ))
    return out
