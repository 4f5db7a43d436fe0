"""Command-line interface: sector computation, verification, and reports.

Subcommands
-----------
sectors      compute IFE sectors of a system file
verify       evolve a state (or a sector's basis) and check the IFE identity
spin-star    build the closed-form spin-star IFE basis, optionally check claims
oracle-diff  cross-check the two independent sector computations
mixed        sector-block and dynamical checks for density matrices

Exit codes are a stable contract: 0 success, 1 input error, 2 numerical
failure, 3 empty decomposition, 4 state not IFE, 5 resonance guard,
6 oracle/claim mismatch.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    CLUSTER_TOL,
    ife_sectors,
    ife_sectors_oracle,
)
from .dynamics import EvolutionReport, covariance_trace, energy_trace, ife_deviation_trace, time_grid
from .linalg import DEFAULT_REL_TOL, max_principal_angle, spectral_norm
from .mixed import (
    block_structure_residuals,
    check_density_matrix,
    mixed_deviation_trace,
    mixed_energy_trace,
    random_ife_mixed,
)
from .serialize import (
    REPORT_SCHEMA_VERSION,
    canonical_dumps,
    load_state,
    load_system,
    matrix_to_pairs,
    sha256_digest,
    write_canonical,
)
from .spin_star import ResonanceError, SpinStarParams, spin_star_ife_basis, verify_spin_star_claims

__all__ = ["main", "entrypoint"]

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NUMERICAL_FAILURE = 2
EXIT_NO_SECTORS = 3
EXIT_NOT_IFE = 4
EXIT_RESONANCE = 5
EXIT_MISMATCH = 6

# Documented default seed for the sampling checks of `mixed`.
DEFAULT_SEED = 20260811
SUBSPACE_ANGLE_TOL = 1e-7


class CliInputError(ValueError):
    """Bad command line or input file; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors, which would collide with
    # the numerical-failure code; route usage errors through the input path.
    def error(self, message):
        raise CliInputError(message)


def _claim(name: str, residual: float, tolerance: float) -> dict:
    residual = float(residual)
    tolerance = float(tolerance)
    if not np.isfinite(residual) or residual < 0:
        raise FloatingPointError(f"claim {name!r} produced residual {residual!r}")
    return {
        "name": name,
        "residual": residual,
        "tolerance": tolerance,
        "pass": bool(residual <= tolerance),
    }


def _report(command: str, digest: str, tolerances: dict, started: float, **payload) -> dict:
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "inputs_digest": digest,
        "tolerances": {k: float(v) for k, v in tolerances.items()},
        "timing_ms": (time.perf_counter() - started) * 1000.0,
    }
    for key, value in payload.items():
        if value is not None:
            report[key] = value
    return report


def _emit(report: dict, out) -> None:
    if out:
        write_canonical(report, out)
    else:
        sys.stdout.write(canonical_dumps(report))


def _sector_payload(dec, include_bases: bool) -> list[dict]:
    payload = []
    for sector in dec.sectors:
        entry = {"alpha": float(sector.alpha), "dimension": sector.dimension}
        if include_bases:
            entry["basis"] = matrix_to_pairs(sector.basis)
        payload.append(entry)
    return payload


def _trace_lists(report, extra=None) -> dict:
    out = dict(extra or {})
    out["times"] = [float(t) for t in report.times]
    for key in ("deviation", "energy_a", "energy_b", "covariance"):
        values = getattr(report, key)
        if values is not None:
            out[key] = [float(v) for v in values]
    return out


def _write_traces_csv(path, traces: list[dict]) -> None:
    columns = ["vector", "time", "deviation", "energy_a", "energy_b", "covariance"]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for block in traces:
            vec = block.get("vector", 0)
            for k, t in enumerate(block["times"]):
                row = [vec, format(t, ".17g")]
                for key in ("deviation", "energy_a", "energy_b", "covariance"):
                    values = block.get(key)
                    row.append(format(values[k], ".17g") if values is not None else "")
                writer.writerow(row)


# ----------------------------------------------------------------------
# sectors


def _sectors_single(path: Path, args, out) -> int:
    started = time.perf_counter()
    system, label = load_system(path)
    dec = ife_sectors(system, args.tol)
    code = EXIT_OK if dec.n_sectors > 0 else EXIT_NO_SECTORS
    report = _report(
        "sectors",
        sha256_digest(path),
        {"rel_tol": args.tol, "cluster_tol": CLUSTER_TOL},
        started,
        label=label,
        sectors=_sector_payload(dec, args.include_bases),
        commutator_kernel_dimension=dec.commutator_kernel.shape[1],
        exit_code=code,
    )
    _emit(report, out)
    return code


def cmd_sectors(args) -> int:
    path = Path(args.input)
    if not args.batch:
        return _sectors_single(path, args, args.out)
    if not path.is_dir():
        raise CliInputError(f"--batch expects a directory, got {path}")
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    worst = EXIT_OK
    for item in sorted(path.glob("*.json")):
        target = out_dir / (item.stem + ".report.json") if out_dir else None
        try:
            code = _sectors_single(item, args, target)
        except (ValueError, OSError) as exc:
            print(f"error: {item}: {exc}", file=sys.stderr)
            code = EXIT_INPUT_ERROR
        worst = max(worst, code)
    return worst


# ----------------------------------------------------------------------
# verify


def _verify_vectors(system, vectors, times, tol, labels) -> tuple[list, list, float]:
    claims, traces = [], []
    overall = 0.0
    for j, psi in enumerate(vectors):
        alpha = float(np.vdot(psi, system.h_i @ psi).real)
        dev = ife_deviation_trace(system, psi, alpha, times)
        energy = energy_trace(system, psi, times)
        cov = covariance_trace(system, psi, system.h_a, system.h_b, times)
        merged = EvolutionReport(
            times=dev.times,
            deviation=dev.deviation,
            energy_a=energy.energy_a,
            energy_b=energy.energy_b,
            covariance=cov.covariance,
            max_deviation=dev.max_deviation,
        )
        traces.append(_trace_lists(merged, {"vector": j, "alpha": alpha, "label": labels[j]}))
        claims.append(_claim(f"ife_evolution_{labels[j]}", dev.max_deviation, tol))
        overall = max(overall, dev.max_deviation)
    return claims, traces, overall


def cmd_verify(args) -> int:
    started = time.perf_counter()
    path = Path(args.input)
    system, label = load_system(path)
    times = time_grid(args.t_max, args.steps)
    digest = sha256_digest(path)
    tolerances = {"t_max": args.t_max, "steps": args.steps}

    if args.state:
        state = load_state(args.state)
        digest += "," + sha256_digest(args.state)
        if state["kind"] == "vector":
            psi = state["value"]
            if psi.shape[0] != system.dim:
                raise CliInputError(
                    f"state dimension {psi.shape[0]} does not match system dimension {system.dim}"
                )
            nrm = float(np.linalg.norm(psi))
            if abs(nrm - 1.0) > 1e-10:
                raise CliInputError(f"state vector is not normalized: ||psi|| = {nrm!r}")
            tol = args.tol if args.tol is not None else 1e-9 * np.sqrt(system.dim)
            claims, traces, _ = _verify_vectors(system, [psi], times, tol, ["state"])
        else:
            rho = check_density_matrix(state["value"])
            if rho.shape[0] != system.dim:
                raise CliInputError(
                    f"state dimension {rho.shape[0]} does not match system dimension {system.dim}"
                )
            tol = args.tol if args.tol is not None else 1e-8 * system.dim
            dev = mixed_deviation_trace(rho, system, times)
            e_a, e_b = mixed_energy_trace(rho, system, times)
            traces = [{
                "vector": 0,
                "label": "density_matrix",
                "times": [float(t) for t in times],
                "deviation": [float(v) for v in dev],
                "energy_a": [float(v) for v in e_a],
                "energy_b": [float(v) for v in e_b],
            }]
            claims = [_claim("ife_evolution_density_matrix", float(dev.max()), tol)]
    elif args.sector is not None:
        dec = ife_sectors(system, DEFAULT_REL_TOL)
        if not 0 <= args.sector < dec.n_sectors:
            raise CliInputError(
                f"sector index {args.sector} out of range ({dec.n_sectors} sectors)"
            )
        basis = dec.sectors[args.sector].basis
        tol = args.tol if args.tol is not None else 1e-9 * np.sqrt(system.dim)
        labels = [f"sector{args.sector}_vector{j}" for j in range(basis.shape[1])]
        claims, traces, _ = _verify_vectors(
            system, [basis[:, j] for j in range(basis.shape[1])], times, tol, labels,
        )
    else:
        raise CliInputError("one of --state or --sector is required")

    tolerances["max_deviation_tol"] = tol
    code = EXIT_OK if all(c["pass"] for c in claims) else EXIT_NOT_IFE
    report = _report(
        "verify", digest, tolerances, started,
        label=label, claims=claims, traces=traces, exit_code=code,
    )
    _emit(report, args.out)
    if args.csv:
        _write_traces_csv(args.csv, traces)
    return code


# ----------------------------------------------------------------------
# spin-star


def _params_digest(params: SpinStarParams) -> str:
    doc = canonical_dumps({
        "n_spins": params.n_spins,
        "omega0": params.omega0,
        "omega": params.omega,
        "gammas": list(params.gammas),
    })
    return "sha256:" + hashlib.sha256(doc.encode("utf-8")).hexdigest()


def cmd_spin_star(args) -> int:
    started = time.perf_counter()
    try:
        gammas = tuple(float(g) for g in args.gammas.split(","))
    except ValueError as exc:
        raise CliInputError(f"--gammas must be a comma-separated float list: {exc}") from exc
    params = SpinStarParams(args.n, args.omega0, args.omega, gammas)
    dec = spin_star_ife_basis(params)

    claims = None
    code = EXIT_OK
    if args.check_all:
        results = verify_spin_star_claims(params, args.tol)
        claims = [_claim(r.name, r.residual, r.tolerance) for r in results]
        if not all(c["pass"] for c in claims):
            code = EXIT_MISMATCH

    report = _report(
        "spin-star", _params_digest(params),
        {"rel_tol": args.tol, "subspace_angle_tol": SUBSPACE_ANGLE_TOL},
        started,
        parameters={
            "n_spins": params.n_spins,
            "omega0": params.omega0,
            "omega": params.omega,
            "gammas": list(params.gammas),
        },
        sectors=_sector_payload(dec, include_bases=True),
        claims=claims,
        exit_code=code,
    )
    _emit(report, args.out)
    return code


# ----------------------------------------------------------------------
# oracle-diff


def cmd_oracle_diff(args) -> int:
    started = time.perf_counter()
    path = Path(args.input)
    system, label = load_system(path)
    direct = ife_sectors(system, args.tol)
    oracle = ife_sectors_oracle(system, args.tol)

    claims = [_claim(
        "sector_count_match",
        abs(direct.n_sectors - oracle.n_sectors),
        0.0,
    )]
    alpha_tol = CLUSTER_TOL * max(1.0, spectral_norm(system.h_i))
    for k in range(min(direct.n_sectors, oracle.n_sectors)):
        s1, s2 = direct.sectors[k], oracle.sectors[k]
        claims.append(_claim(f"sector_{k}_alpha_match", abs(s1.alpha - s2.alpha), alpha_tol))
        if s1.dimension == s2.dimension:
            angle = max_principal_angle(s1.basis, s2.basis)
        else:
            angle = 1.0
        claims.append(_claim(f"sector_{k}_subspace_match", angle, SUBSPACE_ANGLE_TOL))

    code = EXIT_OK if all(c["pass"] for c in claims) else EXIT_MISMATCH
    report = _report(
        "oracle-diff", sha256_digest(path),
        {"rel_tol": args.tol, "subspace_angle_tol": SUBSPACE_ANGLE_TOL},
        started,
        label=label,
        sectors=_sector_payload(direct, include_bases=False),
        claims=claims,
        exit_code=code,
    )
    _emit(report, args.out)
    return code


# ----------------------------------------------------------------------
# mixed


def cmd_mixed(args) -> int:
    started = time.perf_counter()
    path = Path(args.input)
    system, label = load_system(path)
    dec = ife_sectors(system, DEFAULT_REL_TOL)
    times = time_grid(args.t_max, args.steps)
    digest = sha256_digest(path)
    deviation_tol = 1e-8 * system.dim

    if args.state:
        state = load_state(args.state)
        if state["kind"] != "rho":
            raise CliInputError(f"{args.state}: 'rho' field required for mixed checks")
        rho = check_density_matrix(state["value"])
        if rho.shape[0] != system.dim:
            raise CliInputError(
                f"state dimension {rho.shape[0]} does not match system dimension {system.dim}"
            )
        digest += "," + sha256_digest(args.state)
        block_tol = args.tol if args.tol is not None else 1e-8 * float(np.linalg.norm(rho))
        outside, cross = block_structure_residuals(rho, dec)
        dev = mixed_deviation_trace(rho, system, times)
        e_a, e_b = mixed_energy_trace(rho, system, times)
        claims = [
            _claim("sector_support", outside, block_tol),
            _claim("cross_sector_coherence", cross, block_tol),
            _claim("dynamical_deviation", float(dev.max()), deviation_tol),
        ]
        traces = [{
            "vector": 0,
            "label": "density_matrix",
            "times": [float(t) for t in times],
            "deviation": [float(v) for v in dev],
            "energy_a": [float(v) for v in e_a],
            "energy_b": [float(v) for v in e_b],
        }]
        code = EXIT_OK if all(c["pass"] for c in claims) else EXIT_NOT_IFE
        report = _report(
            "mixed", digest,
            {"block_tol": block_tol, "deviation_tol": deviation_tol,
             "t_max": args.t_max, "steps": args.steps},
            started,
            label=label, claims=claims, traces=traces,
            sectors=_sector_payload(dec, include_bases=False),
            exit_code=code,
        )
        _emit(report, args.out)
        if args.csv:
            _write_traces_csv(args.csv, traces)
        return code

    # sampling mode: draw seeded random sector-block states and self-check
    if dec.n_sectors == 0:
        report = _report(
            "mixed", digest,
            {"deviation_tol": deviation_tol, "t_max": args.t_max, "steps": args.steps},
            started,
            label=label, sectors=[], samples=[], exit_code=EXIT_NO_SECTORS,
        )
        _emit(report, args.out)
        return EXIT_NO_SECTORS

    weights = np.full(dec.n_sectors, 1.0 / dec.n_sectors)
    block_tol = args.tol if args.tol is not None else 1e-9
    claims, samples = [], []
    for i in range(args.samples):
        rho = random_ife_mixed(dec, weights, args.seed + i)
        outside, cross = block_structure_residuals(rho, dec)
        dev_max = float(mixed_deviation_trace(rho, system, times).max())
        claims.append(_claim(f"sample_{i}_block_structure", max(outside, cross), block_tol))
        claims.append(_claim(f"sample_{i}_dynamical_deviation", dev_max, deviation_tol))
        samples.append({"seed": args.seed + i, "max_deviation": dev_max,
                        "outside_norm": outside, "cross_norm": cross})
    code = EXIT_OK if all(c["pass"] for c in claims) else EXIT_NOT_IFE
    report = _report(
        "mixed", digest,
        {"block_tol": block_tol, "deviation_tol": deviation_tol,
         "t_max": args.t_max, "steps": args.steps},
        started,
        label=label, claims=claims, samples=samples,
        sectors=_sector_payload(dec, include_bases=False),
        exit_code=code,
    )
    _emit(report, args.out)
    return code


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ifestates",
        description="Interaction-free evolving states of bipartite quantum systems.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sectors", help="compute IFE sectors of a system file")
    p.add_argument("input", help="system JSON file (or directory with --batch)")
    p.add_argument("--tol", type=float, default=DEFAULT_REL_TOL, help="relative kernel cutoff")
    p.add_argument("--include-bases", action="store_true", help="embed sector bases in the report")
    p.add_argument("--batch", action="store_true", help="process every *.json file in a directory")
    p.add_argument("--out", help="report path (directory in batch mode); default stdout")
    p.set_defaults(func=cmd_sectors)

    p = sub.add_parser("verify", help="check the IFE evolution identity for a state")
    p.add_argument("input", help="system JSON file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--state", help="state JSON file (vector or density matrix)")
    group.add_argument("--sector", type=int, help="verify every basis vector of this sector index")
    p.add_argument("--t-max", type=float, default=10.0, help="end of the time grid")
    p.add_argument("--steps", type=int, default=101, help="number of grid points")
    p.add_argument("--tol", type=float, default=None,
                   help="deviation threshold (default 1e-9*sqrt(dim), or 1e-8*dim for density matrices)")
    p.add_argument("--out", help="report path; default stdout")
    p.add_argument("--csv", help="also write traces as CSV to this path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spin-star", help="closed-form spin-star IFE basis and claim checks")
    p.add_argument("--n", type=int, required=True, help="number of bath spins")
    p.add_argument("--omega0", type=float, required=True, help="central-spin splitting")
    p.add_argument("--omega", type=float, required=True, help="bath-spin splitting")
    p.add_argument("--gammas", required=True, help="comma-separated couplings, e.g. 3,4")
    p.add_argument("--check-all", action="store_true", help="verify all structural claims")
    p.add_argument("--tol", type=float, default=DEFAULT_REL_TOL, help="relative kernel cutoff")
    p.add_argument("--out", help="report path; default stdout")
    p.set_defaults(func=cmd_spin_star)

    p = sub.add_parser("oracle-diff", help="compare both IFE sector computations")
    p.add_argument("input", help="system JSON file")
    p.add_argument("--tol", type=float, default=DEFAULT_REL_TOL, help="relative kernel cutoff")
    p.add_argument("--out", help="report path; default stdout")
    p.set_defaults(func=cmd_oracle_diff)

    p = sub.add_parser("mixed", help="sector-block checks for density matrices")
    p.add_argument("input", help="system JSON file")
    p.add_argument("--state", help="density-matrix JSON file; omit to run the sampling self-check")
    p.add_argument("--samples", type=int, default=10, help="number of sampled states")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"seed for the sampling mode (default {DEFAULT_SEED})")
    p.add_argument("--t-max", type=float, default=10.0, help="end of the time grid")
    p.add_argument("--steps", type=int, default=101, help="number of grid points")
    p.add_argument("--tol", type=float, default=None, help="block-structure tolerance")
    p.add_argument("--out", help="report path; default stdout")
    p.add_argument("--csv", help="also write traces as CSV to this path")
    p.set_defaults(func=cmd_mixed)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        return args.func(args)
    except ResonanceError as exc:
        print(f"error: resonance: {exc}", file=sys.stderr)
        return EXIT_RESONANCE
    except np.linalg.LinAlgError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except FloatingPointError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
