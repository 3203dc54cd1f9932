"""Exit criteria. Each test records one PASS/FAIL line, shown in the terminal summary."""
import numpy as np
import pytest

from coventa import measures as ms
from coventa import states
from coventa.estimation import estimate_g, plan_settings
from coventa.generators import gell_mann_set, mub_generator_set, validate_generator_set
from coventa.mub import build_mub, certify_unbiasedness
from conftest import ACCEPTANCE_LINES, projector

PRIMES = [2, 3, 5, 7, 11, 13]


def record(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {number}. [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
    assert ok, detail


def all_routes(psi, n):
    out = {"hilbert_schmidt": ms.g_hilbert_schmidt(psi).g,
           "covariance_gellmann": ms.g_covariance(psi, gell_mann_set(n), gell_mann_set(n)).g,
           "pure_schmidt": ms.g_pure_schmidt(states.schmidt_decompose(psi)).g,
           "invariants": ms.invariants(psi).g_predicted}
    if n in PRIMES:
        out["covariance_mub"] = ms.g_covariance(psi, mub_generator_set(n), mub_generator_set(n)).g
    return out


def test_01_bell_maximum():
    vals = all_routes(states.bell_state(2), 2)
    worst = max(abs(v - 0.75) for v in vals.values())
    record(1, "Bell-state maximum 3/4", worst < 1e-9, f"max |G - 3/4| = {worst:.2e} over {len(vals)} routes")


def test_02_qutrit_maximum():
    vals = all_routes(states.bell_state(3), 3)
    worst = max(abs(v - 8 / 9) for v in vals.values())
    record(2, "qutrit maximum 8/9", worst < 1e-9, f"max |G - 8/9| = {worst:.2e} over {len(vals)} routes")


def test_03_route_equivalence():
    worst, checked = 0.0, 0
    for da in (2, 3, 4, 5):
        for db in (2, 3, 4, 5):
            sets = [(gell_mann_set(da), gell_mann_set(db))]
            if da in PRIMES and db in PRIMES:
                sets.append((mub_generator_set(da), mub_generator_set(db)))
            rng = np.random.default_rng(1000 + 10 * da + db)
            for _ in range(100):
                rho = states.random_mixed_state(da, db, rng)
                g_hs = ms.g_hilbert_schmidt(rho).g
                for sa, sb in sets:
                    worst = max(worst, abs(ms.g_covariance(rho, sa, sb).g - g_hs))
                    checked += 1
    record(3, "covariance sum vs Hilbert-Schmidt", worst < 1e-9,
           f"max deviation {worst:.2e} over {checked} comparisons")


def test_04_invariant_identity():
    worst = 0.0
    for n in (3, 4):
        rng = np.random.default_rng(4000 + n)
        for _ in range(10_000):
            psi = states.random_pure_state(n, n, rng)
            spec = states.schmidt_decompose(psi)
            c2 = ms.i_concurrence_squared(spec)
            c3 = ms.three_concurrence(spec)
            worst = max(worst, abs(ms.g_hilbert_schmidt(psi).g - (c2**2 + c2 - 6 * c3)))
    record(4, "G = C_I^4 + C_I^2 - 6 C_3 on pure states", worst < 1e-9,
           f"max residual {worst:.2e} over 2x10^4 states")


def test_05_correlated_separable_maximum():
    devs = {}
    for n in range(2, 9):
        devs[n] = abs(ms.maximize_correlated_g(n)[1] - 0.25)
    ok = all(devs[n] < 1e-6 for n in (2, 3, 4)) and all(devs[n] < 1e-4 for n in range(5, 9))
    two = states.make_density(2, 2, 0.5 * (projector([1, 0, 0, 0]) + projector([0, 0, 0, 1])))
    exact = abs(ms.g_hilbert_schmidt(two).g - 0.25)
    ok = ok and exact < 1e-10
    record(5, "correlated separable maximum 1/4", ok,
           f"max |max G - 1/4| N=2..4: {max(devs[n] for n in (2, 3, 4)):.2e}, "
           f"N=5..8: {max(devs[n] for n in range(5, 9)):.2e}; two-term state {exact:.2e}")


def test_06_isotropic_family():
    alphas = [-1 / 8] + [0.05 * i for i in range(21)]
    worst = max(abs(ms.g_hilbert_schmidt(ms.isotropic_state(a)).g - 8 * a * a / 9) for a in alphas)
    t = ms.ISOTROPIC_THRESHOLD

    def verdict(a):
        return ms.separability_verdict(ms.g_hilbert_schmidt(ms.isotropic_state(a)))

    flips_ok = all((verdict(a) == ms.ENTANGLED) == (a > t) for a in alphas)
    flips_ok &= verdict(t) == ms.INCONCLUSIVE and verdict(t + 1e-9) == ms.ENTANGLED
    ok = worst < 1e-10 and flips_ok
    record(6, "isotropic G = 8 alpha^2 / 9 and verdict flip", ok,
           f"max deviation {worst:.2e}; flip strictly above {t:.6f}: {flips_ok}")


def test_07_criterion_soundness():
    g_max = 0.0
    for da, db in ((2, 2), (2, 3), (3, 3)):
        rng = np.random.default_rng(7000 + 10 * da + db)
        for _ in range(10_000):
            terms = int(rng.integers(1, da * db + 1))
            g_max = max(g_max, ms.g_hilbert_schmidt(states.random_separable_mixed(da, db, terms, rng)).g)
    record(7, "separable states satisfy G <= 1/4", g_max <= 0.25 + 1e-9,
           f"max G = {g_max:.6f} over 3x10^4 states")


def test_08_mub_certification():
    reps = [certify_unbiasedness(build_mub(n)) for n in PRIMES]
    cross = max(r["max_cross_deviation"] for r in reps)
    gram = max(r["max_gram_deviation"] for r in reps)
    record(8, "MUB certification N in {2,3,5,7,11,13}", cross < 1e-9 and gram < 1e-10,
           f"max cross deviation {cross:.2e}, max Gram deviation {gram:.2e}")


def test_09_generator_certification():
    reps = [validate_generator_set(gell_mann_set(n)) for n in range(2, 17)]
    reps += [validate_generator_set(mub_generator_set(n)) for n in PRIMES]
    trace = max(r["max_trace_deviation"] for r in reps)
    ortho = max(r["max_orthonormality_deviation"] for r in reps)
    counts = all(r["count_ok"] for r in reps)
    record(9, "generator certification", trace < 1e-10 and ortho < 1e-10 and counts,
           f"{len(reps)} sets; max |Tr| {trace:.2e}, max orthonormality deviation {ortho:.2e}")


def test_10_local_unitary_invariance():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(100):
        da, db = (int(x) for x in rng.integers(2, 6, size=2))
        rho = states.random_mixed_state(da, db, rng)
        ua, ub = states.random_local_unitary(da, db, rng)
        worst = max(worst, abs(ms.g_hilbert_schmidt(rho).g
                               - ms.g_hilbert_schmidt(states.apply_local_unitaries(rho, ua, ub)).g))
    record(10, "local-unitary invariance", worst < 1e-9, f"max |dG| = {worst:.2e} over 100 triples")


def test_11_setting_economy():
    detail, ok = [], True
    for name, gset, expected in (("MUB", mub_generator_set(3), 16), ("Gell-Mann", gell_mann_set(3), 49)):
        plan = plan_settings(gset, gset)
        pairs = [p for s in plan for p in s.covered_pairs]
        exact = len(pairs) == 64 and set(pairs) == {(k, l) for k in range(8) for l in range(8)}
        ok &= len(plan) == expected and exact
        detail.append(f"{name} {len(plan)} settings, {len(set(pairs))}/{len(pairs)} pairs")
    record(11, "setting economy at 3x3", ok, "; ".join(detail))


def test_12_estimator_behavior():
    p = mub_generator_set(2)
    bell = states.bell_state(2)
    rep = estimate_g(bell, p, p, 10**5, 100, seed=12)
    mean_dev = abs(rep.mean - 0.75)
    # spread scaling on a state where the linear error term does not vanish
    psi = states.make_pure(2, 2, [np.sqrt(0.8), 0, 0, np.sqrt(0.2)])
    ladder = [10**2, 10**3, 10**4, 10**5]
    se = [estimate_g(psi, p, p, s, 200, seed=120).std_error for s in ladder]
    slope = float(np.polyfit(np.log10(ladder), np.log10(se), 1)[0])
    record(12, "estimator mean and CLT scaling", mean_dev < 0.01 and abs(slope + 0.5) <= 0.1,
           f"Bell mean |G - 3/4| = {mean_dev:.2e}; std-error slope {slope:.3f}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
