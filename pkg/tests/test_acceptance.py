"""Acceptance gate: every criterion runs exactly (no tolerances) through
the shared verification registry; pytest -v shows one pass/fail line per
criterion and the print carries the measured detail."""
import pytest

from ramcalc.verify import run_checks

CRITERIA = [
    ("degree-p-break", ["newton:degree-p-break"]),
    (
        "non-radial-catalog",
        [
            "newton:non-radial-2p",
            "newton:non-radial-p2",
            "newton:origin-envelope",
            "newton:split-threshold-radial",
            "newton:refutation-above-3",
        ],
    ),
    ("herbrand-product-eq-slopes", ["ramify:herbrand-two-routes"]),
    ("herbrand-transitivity", ["ramify:herbrand-transitivity"]),
    ("different-formulas", ["ramify:different-formulas"]),
    ("newton-vs-herbrand", ["compare:newton-vs-herbrand"]),
    ("splitting-calculus", ["tower:splitting-calculus"]),
    ("locus-radii-enlargement", ["locus:radii-enlargement"]),
    ("kernel-algebra", ["pmfun:kernel-algebra", "hahn:kernel-algebra"]),
]


@pytest.fixture(scope="module")
def results():
    return {r.name: r for r in run_checks()}


@pytest.mark.parametrize(
    "number,names",
    [
        pytest.param(i + 1, names, id=f"criterion-{i + 1}-{label}")
        for i, (label, names) in enumerate(CRITERIA)
    ],
)
def test_criterion(number, names, results):
    picked = [results[name] for name in names]
    status = "PASS" if all(r.passed for r in picked) else "FAIL"
    print(
        f"criterion {number}: {status} - "
        + "; ".join(f"{r.name}: {r.detail}" for r in picked)
    )
    failed = [r for r in picked if not r.passed]
    assert not failed, "; ".join(f"{r.name}: {r.detail}" for r in failed)


def test_golden_reference_files(results):
    golden = [r for name, r in results.items() if name.startswith("golden:")]
    assert golden and all(r.passed for r in golden), [
        (r.name, r.detail) for r in golden if not r.passed
    ]
