"""
Verification harness: cross-check engine results against brute-force oracles.

Each check returns a list of issue dictionaries; checks never raise for a
failed comparison. Example issue:
    {
        "type": "oracle_mismatch",
        "severity": "error",
        "check": "min_2norm",
        "issue": "density differs from the min-norm oracle",
        "details": "e3: 2/3 vs 3/5"
    }
Checks that cannot run (too many bases, weights outside their domain) are
reported as warnings.
"""

import logging
from collections.abc import Callable
from typing import Any, Optional

from app.config import Settings
from loaders.descriptors import LoadedInput
from loaders.hashing import verify_fingerprint
from matroids.applications import removal_number, removal_oracle
from matroids.errors import CapacityError, InputError, MatroidError
from matroids.ground import DensityVector
from matroids.handles import Matroid
from matroids.kl import length_certificate, mkl_solve
from matroids.spectrum import spectrum_consistency_check
from matroids.universal import (
    dual_density_check,
    infinity_modulus_check,
    oracle_min_2norm,
    principal_partition_check,
    universal_density,
    verify_lexicographic,
)

LOGGER = logging.getLogger(__name__)

DENSITY_TOLERANCE = 1e-9
MKL_TOLERANCE = 1e-7
REMOVAL_LEVELS = (1, 2, 3)


def _issue(kind: str, severity: str, check: str, issue: str, details: str = "") -> dict[str, Any]:
    return {"type": kind, "severity": severity, "check": check, "issue": issue, "details": details}


def _differences(a: DensityVector, b: DensityVector, tol: float) -> list[str]:
    out = []
    for e in a:
        if abs(float(a[e]) - float(b[e])) > tol:
            out.append(f"{e}: {a[e]} vs {b[e]}")
    return out


class Context:
    """Inputs shared by the checks, with the exact universal density computed once."""

    def __init__(self, loaded: LoadedInput, settings: Settings):
        self.M: Matroid = loaded.matroid
        self.sigma = loaded.weights
        self.settings = settings
        self.unweighted = self.sigma is None or all(w == 1 for w in self.sigma.values())
        self.eta, self.partition = universal_density(
            self.M, self.sigma, exhaustive_limit=settings.sfm_exhaustive_limit
        )

    @property
    def limit(self) -> int:
        return self.settings.oracle_limit


def check_min_2norm(ctx: Context) -> list[dict[str, Any]]:
    oracle = oracle_min_2norm(ctx.M, ctx.sigma, limit=ctx.limit)
    diffs = _differences(ctx.eta, oracle, DENSITY_TOLERANCE)
    if diffs:
        return [
            _issue(
                "oracle_mismatch",
                "error",
                "min_2norm",
                "density differs from the min-norm oracle",
                "; ".join(diffs[:5]),
            )
        ]
    return []


def check_lexicographic(ctx: Context) -> list[dict[str, Any]]:
    result = verify_lexicographic(ctx.M, ctx.eta, ctx.sigma)
    failed = [level for level in result["levels"] if not level["passed"]]
    return [
        _issue(
            "certificate",
            "error",
            "lexicographic",
            "level set is not tight",
            f"level {level['level']}: mass {level['mass']} vs rank {level['rank']}",
        )
        for level in failed
    ]


def check_partition(ctx: Context) -> list[dict[str, Any]]:
    result = principal_partition_check(
        ctx.M,
        ctx.partition,
        ctx.sigma,
        exhaustive_limit=ctx.settings.sfm_exhaustive_limit,
    )
    return [
        _issue("structure", "error", "principal_partition", issue)
        for issue in result["issues"]
    ]


def check_infinity_modulus(ctx: Context) -> list[dict[str, Any]]:
    result = infinity_modulus_check(ctx.M, ctx.sigma, limit=ctx.limit, eta=ctx.eta)
    if result["passed"]:
        return []
    return [
        _issue(
            "oracle_mismatch",
            "error",
            "infinity_modulus",
            "LP optimum differs from the largest density ratio",
            f"{result['lp_optimum']} vs {result['max_ratio']}",
        )
    ]


def check_duality(ctx: Context) -> list[dict[str, Any]]:
    result = dual_density_check(ctx.M, ctx.sigma, limit=ctx.limit)
    issues = []
    if not result["family"]:
        issues.append(
            _issue(
                "oracle_mismatch", "error", "duality", "complementary density is not sigma - eta"
            )
        )
    if result["dual_matroid"] is False:
        issues.append(_issue("oracle_mismatch", "error", "duality", "eta(M) + eta(M*) != 1"))
    return issues


def check_mkl(ctx: Context) -> list[dict[str, Any]]:
    solution = mkl_solve(
        ctx.M, ctx.sigma, tol=ctx.settings.mkl_tol, max_iter=ctx.settings.mkl_max_iter
    )
    issues = []
    diffs = _differences(ctx.eta, solution.density, MKL_TOLERANCE)
    if diffs:
        issues.append(
            _issue(
                "oracle_mismatch",
                "error",
                "mkl",
                "MKL density differs from the universal density",
                "; ".join(diffs[:5]),
            )
        )
    certificate = length_certificate(ctx.M, solution.density, ctx.sigma, tol=MKL_TOLERANCE)
    if not certificate["passed"]:
        issues.append(
            _issue(
                "certificate",
                "error",
                "mkl",
                "longest base length differs from sigma(E)",
                f"{certificate['max_length']} vs {certificate['total_weight']}",
            )
        )
    if not solution.converged:
        issues.append(
            _issue(
                "convergence",
                "warning",
                "mkl",
                "solver hit the iteration limit",
                f"duality gap {solution.duality_gap:.3g}",
            )
        )
    return issues


def check_removal(ctx: Context) -> list[dict[str, Any]]:
    if not ctx.unweighted:
        return [_issue("skipped", "warning", "removal", "removal number is unweighted")]
    if 1 << ctx.M.size > ctx.limit:
        raise CapacityError(
            "Too many subsets for the removal oracle", limit=ctx.limit, partial=1 << ctx.M.size
        )
    issues = []
    for k in REMOVAL_LEVELS:
        fast = removal_number(ctx.M, k, exhaustive_limit=ctx.settings.sfm_exhaustive_limit)
        slow = removal_oracle(ctx.M, k, limit=ctx.limit)
        if fast.n_value != slow:
            issues.append(
                _issue(
                    "oracle_mismatch",
                    "error",
                    "removal",
                    f"N(M, {k}) differs from the subset oracle",
                    f"{fast.n_value} vs {slow}",
                )
            )
    return issues


def check_spectrum(ctx: Context) -> list[dict[str, Any]]:
    if not ctx.unweighted:
        return [_issue("skipped", "warning", "spectrum", "truncation spectrum is unweighted")]
    limit = ctx.settings.sfm_exhaustive_limit
    result = spectrum_consistency_check(
        ctx.M, exhaustive_limit=limit, compare_oracle=ctx.M.size <= 2 * limit
    )
    return [
        _issue("consistency", "error", "spectrum", failure["check"], failure["detail"])
        for failure in result["failures"]
    ]


CHECKS: dict[str, Callable[[Context], list[dict[str, Any]]]] = {
    "min_2norm": check_min_2norm,
    "lexicographic": check_lexicographic,
    "principal_partition": check_partition,
    "infinity_modulus": check_infinity_modulus,
    "duality": check_duality,
    "mkl": check_mkl,
    "removal": check_removal,
    "spectrum": check_spectrum,
}


def generate_verification_report(
    issues: list[dict[str, Any]], checks_run: Optional[list[dict[str, Any]]] = None
) -> dict[str, Any]:
    """
    Aggregate issues into a report.

    Returns:
        {
            "status": "pass" | "warnings" | "errors",
            "error_count": int,
            "warning_count": int,
            "errors": [...],
            "warnings": [...],
            "checks": [{"check", "status"}],
            "summary": str
        }
    """
    errors = [i for i in issues if i.get("severity") == "error"]
    warnings = [i for i in issues if i.get("severity") == "warning"]

    if errors:
        status = "errors"
        summary = f"Verification FAILED: {len(errors)} error(s), {len(warnings)} warning(s)"
    elif warnings:
        status = "warnings"
        summary = f"Verification passed with {len(warnings)} warning(s)"
    else:
        status = "pass"
        summary = "Verification passed: every oracle agrees"

    return {
        "status": status,
        "error_count": len(errors),
        "warning_count": len(warnings),
        "errors": errors,
        "warnings": warnings,
        "checks": checks_run or [],
        "summary": summary,
    }


def run_verification(
    loaded: LoadedInput,
    settings: Settings,
    only: Optional[list[str]] = None,
    expect_sha256: Optional[str] = None,
) -> dict[str, Any]:
    """
    Run the oracle cross-checks on one input.

    Args:
        loaded: Parsed input
        settings: Oracle and solver limits
        only: Names from CHECKS to run (all when None)
        expect_sha256: Fingerprint from an earlier report; a changed input file
            is an error

    Returns:
        Report from generate_verification_report() plus "provenance"

    Raises:
        InputError: If ``only`` names an unknown check
        CapacityError: If every requested check hit the oracle limit
    """
    names = list(CHECKS) if not only else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise InputError(f"Unknown checks {unknown}; available: {', '.join(CHECKS)}")

    issues: list[dict[str, Any]] = []
    checks_run = []
    if expect_sha256 is not None:
        if loaded.source.startswith("demo:"):
            same = loaded.sha256 == expect_sha256.lower()
        else:
            same = verify_fingerprint(loaded.source, expect_sha256)
        if not same:
            issues.append(
                _issue(
                    "fingerprint",
                    "error",
                    "fingerprint",
                    "input changed since the recorded report",
                    f"now {loaded.sha256}",
                )
            )
        checks_run.append({"check": "fingerprint", "status": "pass" if same else "fail"})

    ctx = Context(loaded, settings)
    capacity_errors: list[CapacityError] = []
    for name in names:
        try:
            found = CHECKS[name](ctx)
        except CapacityError as e:
            capacity_errors.append(e)
            found = [
                _issue(
                    "skipped", "warning", name, "oracle limit reached", f"{e}; raise --oracle-limit"
                )
            ]
        except MatroidError as e:
            found = [_issue("skipped", "warning", name, "check not applicable", str(e))]
        issues.extend(found)
        if any(i["severity"] == "error" for i in found):
            status = "fail"
        elif any(i["type"] == "skipped" for i in found):
            status = "skipped"
        else:
            status = "pass"
        checks_run.append({"check": name, "status": status})
        LOGGER.info("Check %s: %s", name, status)

    if len(capacity_errors) == len(names) and not any(i["severity"] == "error" for i in issues):
        raise capacity_errors[-1]

    report = generate_verification_report(issues, checks_run)
    report["provenance"] = {"source": loaded.source, "sha256": loaded.sha256}
    return report
