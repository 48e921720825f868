"""Fast self-check of the operator identities, run by ``helicalns verify``."""
from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .helical import (
    abs_curl_pow,
    decompose,
    mirror,
    negative_part,
    positive_part,
    recompose,
)
from .monitor import (
    band_inequality_suite,
    cancellation_residual,
    criterion_integrands,
    holder_chain_check,
)
from .solver import SolverConfig, SolverState, abc_flow, random_divfree, simulate, taylor_green
from .spectral import GridSpec, curl, inner_product, l2_norm, neg_laplacian_pow


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _fields(grid, count, seed):
    return [random_divfree(-2.0, 0.3 + 0.4 * (i % 2), 1, (grid.n - 1) // 3, seed + i, grid=grid)
            for i in range(count)]


def _curl_symmetric(grid, fields):
    worst = 0.0
    kmax = float(grid.kmag.max())
    for f, g in zip(fields, fields[1:]):
        gap = abs(inner_product(curl(f), g) - inner_product(f, curl(g)))
        worst = max(worst, gap / (l2_norm(f) * l2_norm(g) * kmax))
    return worst <= 1e-12, f"max scaled gap {worst:.2e}"


def _a_squared(grid, fields):
    worst = 0.0
    for f in fields:
        lap = neg_laplacian_pow(f, 1.0)
        worst = max(worst, l2_norm(abs_curl_pow(f, 2.0) - lap) / l2_norm(lap))
    return worst <= 1e-12, f"max relative gap {worst:.2e}"


def _projections(grid, fields):
    for f in fields:
        d = decompose(f)
        if not np.array_equal((positive_part(f) + negative_part(f)).coeffs, recompose(d).coeffs):
            return False, "P+ + P- differs from the identity"
        pm = l2_norm(positive_part(negative_part(f)))
        if pm > 1e-14 * l2_norm(f):
            return False, f"|P+ P- f| = {pm:.2e}"
    return True, "P+ + P- = I, P+ P- = 0"


def _commutation(grid, fields):
    worst = 0.0
    for f in fields:
        w = curl(f)
        worst = max(worst, l2_norm(curl(positive_part(f)) - positive_part(w)) / l2_norm(w))
    return worst <= 1e-12, f"max relative gap {worst:.2e}"


def _beltrami(grid, fields):
    v = abc_flow(grid=grid)
    same = np.array_equal(curl(v).coeffs, v.coeffs)
    empty = not np.any(decompose(v).minus)
    return same and empty, f"curl v == v: {same}; P- v == 0: {empty}"


def _cancellation(grid, fields):
    worst = max(cancellation_residual(f) for f in fields)
    return worst <= 1e-8, f"max residual {worst:.2e}"


def _bands(grid, fields):
    for f in fields:
        c5 = l2_norm(f) ** 2
        for a in (-3.0, -1.0, 0.0, 1.0, 3.0):
            report = band_inequality_suite(f, a, c5)
            if not report.ok:
                return False, f"a={a}: {report.checks()}"
    return True, "all band inequalities hold"


def _holder(grid, fields):
    for f in fields:
        lhs, rhs = holder_chain_check(f)
        if lhs > rhs * (1 + 1e-10):
            return False, f"{lhs:.3e} > {rhs:.3e}"
    return True, "lhs <= rhs"


def _mirror_and_reduction(grid, fields):
    for f in fields:
        d = decompose(f)
        for a in (-2.0, 0.0, 1.5, -math.inf):
            if criterion_integrands(d, a, t=0.0) != criterion_integrands(mirror(d), a, t=0.0,
                                                                          mirror=True):
                return False, f"mirror mismatch at a={a}"
        full = criterion_integrands(d, -math.inf).cond_iii
        ref = l2_norm(neg_laplacian_pow(curl(f), 0.25)) ** 2
        if abs(full - ref) > 1e-12 * max(1.0, ref):
            return False, f"a=-inf: {full!r} vs {ref!r}"
    return True, "mirror exact, a=-inf reduces to whole vorticity"


def _snapshot(grid, fields):
    from .io import load_snapshot, write_snapshot

    with tempfile.TemporaryDirectory() as tmp:
        a, b = Path(tmp, "a.bin"), Path(tmp, "b.bin")
        write_snapshot(a, SolverState(fields[0], 0.25), 0.5)
        snap = load_snapshot(a)
        write_snapshot(b, snap.state, snap.nu)
        same = a.read_bytes() == b.read_bytes()
    return same and not snap.reprojected, f"byte-identical rewrite: {same}"


def _abc_decay(grid, fields):
    t_end = 0.1
    traj = simulate(SolverConfig(nu=1.0, t_end=t_end, dt_max=0.01), abc_flow(grid=grid))
    e = traj.column("energy")
    err = abs(e[-1] / e[0] - math.exp(-2 * t_end))
    return err <= 1e-10, f"energy ratio error {err:.2e}"


def _energy_balance(grid, fields):
    traj = simulate(SolverConfig(nu=1.0, t_end=0.1, dt_max=0.01), taylor_green(grid=grid))
    e = traj.column("energy")
    err = abs(e[-1] + traj[-1].dissipation - e[0]) / e[0]
    return err <= 1e-6, f"relative imbalance {err:.2e}"


CHECKS: dict[str, Callable] = {
    "curl symmetric": _curl_symmetric,
    "A^2 = -Laplacian": _a_squared,
    "helical projections": _projections,
    "curl commutes with P+": _commutation,
    "ABC is Beltrami": _beltrami,
    "cancellation identity": _cancellation,
    "band inequalities": _bands,
    "Holder chain": _holder,
    "mirror and a=-inf": _mirror_and_reduction,
    "snapshot round trip": _snapshot,
    "ABC viscous decay": _abc_decay,
    "energy balance": _energy_balance,
}


def run_checks(n: int = 16, count: int = 4, seed: int = 0) -> list[CheckResult]:
    grid = GridSpec(n)
    fields = _fields(grid, count, seed)
    out = []
    for name, check in CHECKS.items():
        try:
            ok, detail = check(grid, fields)
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail))
    return out
