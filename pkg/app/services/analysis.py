"""
Analysis services: run the engine on a loaded input and assemble reports.

Every report is a plain dict (Fractions stay exact until formatting) with a
"provenance" entry naming the input and its SHA256, so results can be traced
back to the file they came from.
"""

import logging
from collections import Counter
from typing import Any, Optional

from app.config import Settings
from loaders.descriptors import LoadedInput
from matroids.applications import (
    addable_edges,
    edge_toughness,
    edge_toughness_oracle,
    removal_number,
    removal_oracle,
)
from matroids.density import density_report
from matroids.distributions import BasePmf
from matroids.errors import InputError
from matroids.ground import iter_bits
from matroids.handles import GraphicMatroid
from matroids.kl import gibbs_bound, length_certificate, mkl_solve, vmax_core_check
from matroids.pmf import is_strictly_homogeneous
from matroids.spectrum import SpectrumTable, truncation_spectrum
from matroids.universal import PrincipalPartition, universal_density

LOGGER = logging.getLogger(__name__)


def provenance(loaded: LoadedInput) -> dict[str, Any]:
    return {"source": loaded.source, "sha256": loaded.sha256, "loaded_at": loaded.loaded_at}


def _block_numbers(partition: PrincipalPartition, size: int) -> list[int]:
    numbers = [0] * size
    for n, block in enumerate(partition.blocks, start=1):
        for i in iter_bits(block):
            numbers[i] = n
    return numbers


def _require_unweighted(loaded: LoadedInput, command: str) -> None:
    if loaded.weights is not None and any(w != 1 for w in loaded.weights.values()):
        raise InputError(f"{command} works on unweighted matroids; drop --weights")


def _require_graph(loaded: LoadedInput, command: str) -> GraphicMatroid:
    if not isinstance(loaded.matroid, GraphicMatroid):
        raise InputError(f"{command} needs a graph input (edge list or graphic descriptor)")
    return loaded.matroid


def analyze_input(loaded: LoadedInput, settings: Settings, strict: bool = False) -> dict[str, Any]:
    """
    Universal density, principal partition, strength and arboricity.

    Args:
        loaded: Parsed input
        settings: Runtime limits
        strict: Also decide strict homogeneity (enumerates bases when the
            matroid is disconnected)

    Returns:
        Dictionary with structure:
        {
            "provenance": {...},
            "elements": int, "rank": int, "weighted": bool,
            "strength": Fraction, "strength_set": [...],
            "arboricity": Fraction, "core": [...],
            "tau": int, "cover_number": int, "homogeneous": bool,
            "partition": [{"block", "level", "size", "nested_size", "elements"}],
            "level_counts": [{"level", "count"}, ...],
            "density": [{"element", "eta", "block", "style"?}, ...],
            "strict": {...}            (only with strict=True)
        }
    """
    M, sigma = loaded.matroid, loaded.weights
    ground = M.ground
    limit = settings.sfm_exhaustive_limit
    report = density_report(M, sigma, exhaustive_limit=limit)
    eta, partition = universal_density(M, sigma, exhaustive_limit=limit)
    numbers = _block_numbers(partition, M.size)

    density = []
    for i, e in enumerate(ground):
        row = {"element": e, "eta": eta[e], "block": numbers[i]}
        if loaded.styles:
            row["style"] = loaded.styles.get(e, "")
        density.append(row)

    counts = Counter(eta.values())
    result: dict[str, Any] = {
        "provenance": provenance(loaded),
        "elements": M.size,
        "rank": M.full_rank,
        "weighted": sigma is not None,
        "strength": report.strength,
        "strength_set": ground.members(report.strength_set),
        "arboricity": report.arboricity,
        "core": ground.members(report.core),
        "tau": report.tau,
        "cover_number": report.cover_number,
        "homogeneous": len(partition.levels) == 1,
        "partition": [
            {
                "block": n,
                "level": level,
                "size": block.bit_count(),
                "nested_size": nested.bit_count(),
                "elements": ground.members(block),
            }
            for n, (level, block, nested) in enumerate(
                zip(partition.levels, partition.blocks, partition.nested_sets), start=1
            )
        ],
        "level_counts": [{"level": v, "count": counts[v]} for v in sorted(counts)],
        "density": density,
    }
    if strict:
        verdict = is_strictly_homogeneous(M, sigma, limit=settings.oracle_limit)
        result["strict"] = {
            "strictly_homogeneous": verdict.strictly_homogeneous,
            "connected": verdict.connected,
            "criterion": verdict.criterion,
            "witness": verdict.witness,
            "components": list(verdict.components),
            "supports_all_bases": verdict.supports_all_bases,
        }
    LOGGER.info("Analyzed %s: %d levels", loaded.source, len(partition.levels))
    return result


def spectrum_groups(loaded: LoadedInput, table: SpectrumTable) -> dict[str, list]:
    """Demo inputs group by edge style; everything else by principal block."""
    ground = loaded.matroid.ground
    if loaded.styles:
        groups: dict[str, list] = {}
        for e in ground:
            groups.setdefault(loaded.styles[e], []).append(e)
        return groups
    return {
        f"block {n} ({level})": ground.members(block)
        for n, (level, block) in enumerate(
            zip(table.partition.levels, table.partition.blocks), start=1
        )
    }


def spectrum_report(
    loaded: LoadedInput, settings: Settings
) -> tuple[dict[str, Any], SpectrumTable]:
    """
    Universal densities of all truncations.

    Returns:
        {
            "provenance", "elements", "rank", "balancity",
            "breakpoints": [{"level", "nested_size", "b", "c"}],
            "dual_breakpoints": [...],
            "ranges": [{"t_from", "t_to", "cells": {group: formula}}]
        } together with the SpectrumTable for row and matrix output

    Raises:
        InputError: If the input carries non-unit weights
    """
    _require_unweighted(loaded, "spectrum")
    table = truncation_spectrum(loaded.matroid, exhaustive_limit=settings.sfm_exhaustive_limit)

    def points(breakpoints):
        return [
            {"level": p.level, "nested_size": p.nested_size, "b": p.b, "c": p.c}
            for p in breakpoints
        ]

    report = {
        "provenance": provenance(loaded),
        "elements": table.size,
        "rank": table.rank,
        "balancity": table.balancity,
        "breakpoints": points(table.breakpoints),
        "dual_breakpoints": points(table.dual_breakpoints),
        "ranges": table.ranges(spectrum_groups(loaded, table)),
    }
    return report, table


def spectrum_rows(table: SpectrumTable) -> list[dict[str, Any]]:
    """Long format: one row per (t, element) with numerator and denominator."""
    rows = []
    for t in range(1, table.size + 1):
        for e, value in table.density(t).items():
            rows.append(
                {
                    "t": t,
                    "element": e,
                    "value_num": value.numerator,
                    "value_den": value.denominator,
                }
            )
    return rows


def spectrum_matrix(table: SpectrumTable) -> list[dict[str, Any]]:
    """Wide format: one row per t, one column per element."""
    return [{"t": t, **density} for t, density in table.matrix().items()]


def mkl_report(
    loaded: LoadedInput,
    settings: Settings,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    certify: bool = False,
) -> tuple[dict[str, Any], BasePmf]:
    """
    Solve the MKL problem and optionally certify the result.

    With ``certify`` the report adds the longest-base length certificate, the
    V_max core check, the entropy lower bound and the distance to the exact
    universal density.

    Returns:
        (report, base pmf of the solver's final mixture)
    """
    M, sigma = loaded.matroid, loaded.weights
    solution = mkl_solve(
        M,
        sigma,
        tol=settings.mkl_tol if tol is None else tol,
        max_iter=settings.mkl_max_iter if max_iter is None else max_iter,
    )
    report: dict[str, Any] = {
        "provenance": provenance(loaded),
        "value": solution.value,
        "iterations": solution.iterations,
        "duality_gap": solution.duality_gap,
        "converged": solution.converged,
        "support_size": len(solution.pmf.support),
        "density": [{"element": e, "eta": v} for e, v in solution.density.items()],
    }
    if certify:
        eta, _ = universal_density(M, sigma, exhaustive_limit=settings.sfm_exhaustive_limit)
        distance = max(abs(solution.density[e] - float(eta[e])) for e in M.ground)
        length = length_certificate(M, solution.density, sigma)
        core = vmax_core_check(M, solution.density, sigma)
        bound = gibbs_bound(M, sigma, value=solution.value)
        report["certificates"] = {
            "distance_to_exact": distance,
            "length": {k: v for k, v in length.items() if k != "note"},
            "vmax_core": {"passed": core["passed"], "v_max": core["v_max"]},
            "entropy_bound": bound,
        }
    if not solution.converged:
        LOGGER.warning("MKL solver stopped with duality gap %.3g", solution.duality_gap)
    return report, solution.pmf


def removal_report(
    loaded: LoadedInput, settings: Settings, k: int, oracle: bool = False
) -> dict[str, Any]:
    """
    Removal number N(M, k) with its witness.

    Returns:
        {"provenance", "k", "n_value", "level_index", "full_packing",
         "witness": [...], "level_set": [...], "packing_ok", "oracle"?}
    """
    _require_unweighted(loaded, "nk")
    M = loaded.matroid
    answer = removal_number(M, k, exhaustive_limit=settings.sfm_exhaustive_limit)
    report: dict[str, Any] = {
        "provenance": provenance(loaded),
        "k": k,
        "n_value": answer.n_value,
        "level_index": answer.i_of_k,
        "full_packing": answer.n_value == k * M.full_rank,
        "witness": M.ground.members(answer.witness),
        "level_set": M.ground.members(answer.s_set),
        "packing_ok": answer.packing_ok,
    }
    if oracle:
        direct = removal_oracle(M, k, limit=settings.oracle_limit)
        report["oracle"] = {"n_value": direct, "agrees": direct == answer.n_value}
    return report


def addable_report(loaded: LoadedInput, settings: Settings, k: int) -> dict[str, Any]:
    """Vertex pairs where a new edge keeps the arboricity at k."""
    G = _require_graph(loaded, "addable")
    _require_unweighted(loaded, "addable")
    answer = addable_edges(G, k, exhaustive_limit=settings.sfm_exhaustive_limit)
    return {
        "provenance": provenance(loaded),
        "k": k,
        "case": answer.case,
        "arboricity": answer.arboricity,
        "addable_count": len(answer.addable),
        "blocked_count": len(answer.blocked),
        "addable": [list(pair) for pair in answer.addable],
        "blocked": [{"pair": list(pair), "witness": list(w)} for pair, w in answer.blocked],
        "witnesses": [list(w) for w in answer.witnesses],
    }


def toughness_report(
    loaded: LoadedInput, settings: Settings, c: int, oracle: bool = False
) -> dict[str, Any]:
    """c-order edge toughness, optionally cross-checked by subset enumeration."""
    G = _require_graph(loaded, "toughness")
    value = edge_toughness(G, c, exhaustive_limit=settings.sfm_exhaustive_limit)
    report: dict[str, Any] = {"provenance": provenance(loaded), "c": c, "toughness": value}
    if oracle:
        direct = edge_toughness_oracle(G, c, limit=settings.oracle_limit)
        report["oracle"] = {"toughness": direct, "agrees": direct == value}
    return report
