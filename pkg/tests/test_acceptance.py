"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also repeated in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from qbattery import models
from qbattery.bounds import bound_report
from qbattery.decomp import decompose, verify_decomposition
from qbattery.dynamics import charging_trajectory, time_grid
from qbattery.harness import Experiment, bundled_configs, load_config
from qbattery.oracle import oracle_check
from qbattery.pauli import HamiltonianSpec, LocalTerm, OperatorMatrix, operator_norm, realize
from qbattery.spectral import aklh_audit, bin_spectrum
from qbattery.zoo import model_zoo, xxz, xy_alltoall

RESULTS: dict[int, tuple[bool, str]] = {}

EPSILONS = (0.25, 0.5, 1.0)
# frozen from the dense reference run of the boundary config (N=10, GHZ, t* = 0.2)
BOUNDARY_RESPONSE = 0.0197347514993
BULK_RESPONSE_CEIL = 1e-12
# frozen from the golden-coupling decomposition sweep: observed c_err in [0.61, 0.72]
DECOMP_C = 1.0


def report(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def zoo_reports():
    t0 = time.perf_counter()
    out = {}
    for m in model_zoo():
        b, c, psi = m.build()
        out[m.name] = bound_report(b, c, psi, m.times(), model=m.name)
    return out, time.perf_counter() - t0


def test_criterion_1_commutator_chain(zoo_reports):
    reps, elapsed = zoo_reports
    bad = []
    for name, r in reps.items():
        if r.measured_max_power > r.commutator_norm_bound + 1e-8:
            bad.append(f"{name}: P {r.measured_max_power} > comm {r.commutator_norm_bound}")
        if r.commutator_norm_bound > r.trivial_bound + 1e-8:
            bad.append(f"{name}: comm {r.commutator_norm_bound} > trivial {r.trivial_bound}")
    ok = len(reps) >= 6 and not bad and elapsed < 120
    report(1, ok, f"{len(reps)} models, {elapsed:.1f}s" + ("" if not bad else f"; {bad}"))


def test_criterion_2_power_bounds(zoo_reports):
    reps, _ = zoo_reports
    bad, lines, n_prop1 = [], [], 0
    for name, r in reps.items():
        if r.measured_max_power > r.prop2_bound:
            bad.append(f"{name} prop2")
        if r.q == 1:
            n_prop1 += 1
            if r.prop1_bound is None or r.measured_max_power > r.prop1_bound:
                bad.append(f"{name} prop1")
        lines.append(f"{name} margin {r.margins['prop2']:.4g}")
    print("\n".join("  " + s for s in lines))
    report(2, not bad and n_prop1 > 0, f"{len(reps)} models, {n_prop1} with q=1, violations {bad}")


def test_criterion_3_sandwich_audit():
    t0 = time.perf_counter()
    n_entries, bad = 0, []
    for n in (4, 6, 8):
        for mode in ("nearest-neighbor", "uniform-all-to-all"):
            bat = models.build(xxz(n, mode))
            for chg in (models.build(models.ModelConfig("transverse_charger", n, {"omega": 1.0})),
                        models.build(xy_alltoall(n, B=0.5))):
                for eps in EPSILONS:
                    table = aklh_audit(bat, chg, eps)
                    for e in table.entries:
                        n_entries += 1
                        cap = min(table.term_norms[e.term_index], e.bound)
                        if e.measured > cap + 1e-9:
                            bad.append((n, mode, chg.label, eps, e.term_index, e.m, e.m_prime, e.measured, cap))
    elapsed = time.perf_counter() - t0
    report(3, not bad and elapsed < 300, f"{n_entries} sandwich entries, {len(bad)} above bound, {elapsed:.1f}s")


def test_criterion_4_discretization():
    worst, checked = -np.inf, 0
    for m in model_zoo():
        hb = realize(models.build(m.battery), backend="dense")
        for eps in (0.1,) + EPSILONS:
            b = bin_spectrum(hb, eps)
            err = operator_norm(OperatorMatrix(hb.dense() - b.discretized_hamiltonian(), hermitian=True))
            worst = max(worst, err - eps / 2)
            checked += 1
    report(4, worst <= 1e-9, f"{checked} (battery, eps) pairs, max(||dH|| - eps/2) = {worst:.3e}")


def test_criterion_5_rabi():
    b, c = models.parallel_zeeman(1, 1.0), models.transverse_charger(1, 1.0)
    psi = models.initial_state("all_down", 1)
    t = time_grid(np.pi, 400)
    tr = charging_trajectory(b, c, psi, t)
    e_err = float(np.max(np.abs(tr.energies + np.cos(2 * t))))
    p_err = float(np.max(np.abs(tr.powers - 2 * np.sin(2 * t))))
    avg = charging_trajectory(b, c, psi, time_grid(np.pi / 4, 400)).average_power()
    a_err = abs(avg - 4 / np.pi)
    ok = e_err <= 1e-10 and p_err <= 1e-10 and a_err <= 1e-10
    report(5, ok, f"|dE| {e_err:.2e}, |dP| {p_err:.2e}, |<P> - 4/pi| {a_err:.2e}")


def test_criterion_6_locality_of_energy(tmp_path):
    cfg = load_config(bundled_configs()["boundary_locality_n10"])
    res = Experiment(cfg, tmp_path).locality_of_energy()
    edge, bulk = res["boundary_response"], res["bulk_response"]
    ok = (
        bulk <= 0.1 * edge
        and bulk <= BULK_RESPONSE_CEIL
        and math.isclose(edge, BOUNDARY_RESPONSE, rel_tol=1e-9)
        and res["entropy_t_star"] > 0.1
        and res["entropy_initial"] > 0.1
    )
    report(6, ok, f"edge {edge:.6g}, bulk {bulk:.2e}, ratio {res['ratio']:.2e}, "
                  f"S(0) {res['entropy_initial']:.6g}, S(t*) {res['entropy_t_star']:.6g}")


def test_criterion_7_commuting_decomposition():
    chain = HamiltonianSpec(6, [LocalTerm.from_strings([i, i + 1], [("ZZ", 1.0)]) for i in range(5)])
    zz = decompose(chain, 1.0)
    parts = [f"ZZ chain: {zz.k_bar} groups, err {zz.reconstruction_error:.1e}"]
    ok = zz.k_bar == 2 and zz.reconstruction_error <= 1e-12

    cfg = load_config(bundled_configs()["decomp_alltoall_n6"])
    bat, chg = models.build(cfg.battery), models.build(cfg.charger)
    psi = models.initial_state("product_bitstring", 6, bits="101010")
    times = time_grid(cfg.t_max, cfg.n_steps)
    errs = []
    for eps in (0.2, 0.1, 0.05):
        res = decompose(chg, eps)
        cert = verify_decomposition(res, chg, bat, psi, times)
        errs.append(res.reconstruction_error)
        ok &= res.reconstruction_error <= DECOMP_C * eps * 6 and cert["passed"]
        parts.append(f"eps {eps}: err {res.reconstruction_error:.4g}, dP {cert['power']['difference']:.3g} "
                     f"<= {cert['power']['tolerance']:.3g}")
    ratios = [errs[i] / errs[i + 1] for i in range(2)]
    ok &= all(abs(r - 2) <= 0.4 for r in ratios)
    parts.append("ratios " + ", ".join(f"{r:.3f}" for r in ratios))
    report(7, ok, "; ".join(parts))


def test_criterion_8_oracle():
    s = oracle_check(n_max=8)
    report(8, s.passed, f"{s.checks} checks, {len(s.mismatches)} mismatches, max dev {s.max_deviation}")


def test_criterion_9_determinism(tmp_path):
    from qbattery import harness

    differing = []
    for name, path in bundled_configs().items():
        dirs = []
        for rep in ("a", "b"):
            out = tmp_path / name / rep
            harness.run(load_config(path), out)
            dirs.append(out)
        files = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.is_file())
        for f in files:
            if (dirs[0] / f).read_bytes() != (dirs[1] / f).read_bytes():
                differing.append(f"{name}/{f}")
        other = sorted(p.relative_to(dirs[1]) for p in dirs[1].rglob("*") if p.is_file())
        if files != other:
            differing.append(f"{name}: file sets differ")
    report(9, not differing, f"{len(bundled_configs())} configs run twice, differing {differing}")
