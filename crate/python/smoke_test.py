"""Smoke test for the geoqm Python bindings.

Build and install first, e.g.
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/geoqm-*.whl
"""

import math

import numpy as np

import geoqm


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    c = {(m, n, r): v for m, n, r, v in geoqm.structure_constants("u3")}
    assert close(c[(1, 2, 3)], 1.0)
    assert close(c[(4, 5, 8)], math.sqrt(3) / 2)

    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    rho = np.outer(bell, bell.conj())
    assert close(geoqm.concurrence(rho.tolist()), 1.0)
    assert close(geoqm.von_neumann_entropy((np.eye(4) / 4).tolist()), math.log(4))

    a, b, cc, phi = 0.4, 0.35, 0.3, 0.7
    m = np.array(geoqm.rho_t(a, b, cc, phi))
    assert close(np.trace(m).real, 1.0) and np.allclose(m, m.conj().T)
    rec = geoqm.witness_record(a, b, cc, phi)
    assert close(rec["concurrence"], cc, 1e-9)
    lam = np.linalg.eigvalsh(m)
    lam = lam[lam > 1e-15]
    assert close(rec["entropy"], float(-(lam * np.log(lam)).sum()))
    assert abs(rec["bracket_sc"]) < 1e-6

    for a_, _, c_, wedge in geoqm.independence_locus([0.36, 0.42, 0.48]):
        assert close(c_, math.sqrt(-4 + 16 * a_ - 12 * a_ * a_), 1e-6)
        assert wedge < 1e-6

    rng = np.random.default_rng(0)
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    ha = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    hb = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    ha, hb = ha + ha.conj().T, hb + hb.conj().T
    star = geoqm.star_hilbert(ha.tolist(), hb.tolist(), psi.tolist())
    assert close(star, psi.conj() @ ha @ hb @ psi, 1e-9)
    assert np.allclose(np.array(geoqm.momentum_map(psi.tolist())), np.outer(psi, psi.conj()))

    n = 5
    w1 = np.array(geoqm.weyl_operator(n, 1, 2))
    w2 = np.array(geoqm.weyl_operator(n, 3, 1))
    w12 = np.array(geoqm.weyl_operator(n, 4, 3))
    omega = 1 * 1 - 3 * 2
    assert np.allclose(w1 @ w2, np.exp(1j * math.pi * omega / n) * w12)
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    back = np.array(geoqm.weyl_quantize(n, geoqm.weyl_symbol(x.tolist())))
    assert np.allclose(back, x)

    assert close(geoqm.oscillator_wigner(0, 0.0, 0.0), 2.0)
    assert close(geoqm.oscillator_wigner(1, 0.0, 0.0), -2.0)

    results = geoqm.run_acceptance()
    for r in results:
        print(f"criterion {r['id']} {'PASS' if r['passed'] else 'FAIL'} {r['name']}: {r['value']:.3e}")
    assert len(results) == 8 and all(r["passed"] for r in results)

    try:
        geoqm.rho_t(0.8, 0.8, 0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid rho_t accepted")

    print(f"geoqm {geoqm.__version__} smoke test ok")


if __name__ == "__main__":
    main()
