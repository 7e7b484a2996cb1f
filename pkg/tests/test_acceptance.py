"""Acceptance suite: one test per release criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is fixed here, nothing is calibrated at runtime.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from clifract import (
    CliffordGridFunction,
    CliffordRBParams,
    Multivector,
    Paravector,
    RBParams,
    SpaceSpec,
    clifford_empirical_gamma,
    clifford_fif_from_data,
    clifford_fixed_point,
    empirical_gamma,
    fif_from_data,
    fixed_point,
    gamma_gate,
    mv_mul,
    pointwise_conj,
    pointwise_product,
    pv_restrict,
    rb_apply,
    uniform_partition,
)
from clifract.algebra import _sign_table

from oracles import blade_mul_oracle, series_exp, series_sin


def _report(criterion: int, label: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {criterion} {label}: PASS{suffix}")


def test_criterion_1_blade_oracle_equivalence_and_algebra_laws():
    started = time.perf_counter()

    # every blade pair up to n = 8 through the real product path
    for n in range(1, 9):
        basis = [Multivector.basis(mask, n) for mask in range(1 << n)]
        signs = _sign_table(n)
        for a in range(1 << n):
            for b in range(1 << n):
                want_sign, want_mask = blade_mul_oracle(a, b)
                assert signs[a, b] == want_sign
                product = mv_mul(basis[a], basis[b])
                nonzero = np.flatnonzero(product.coeffs)
                assert list(nonzero) == [want_mask]
                assert product.coeffs[want_mask] == want_sign

    # associativity and the conjugation anti-automorphism on 1000 random
    # multivectors spread over n = 1..5
    rng = np.random.default_rng(101)
    for n in range(1, 6):
        draws = [Multivector(n, rng.standard_normal(1 << n)) for _ in range(200)]
        for i in range(0, 198, 3):
            x, y, z = draws[i], draws[i + 1], draws[i + 2]
            left = mv_mul(mv_mul(x, y), z)
            right = mv_mul(x, mv_mul(y, z))
            assert np.max(np.abs(left.coeffs - right.coeffs)) < 1e-12
        for i in range(0, 200, 2):
            x, y = draws[i], draws[i + 1]
            flipped = mv_mul(x, y).conj()
            swapped = mv_mul(y.conj(), x.conj())
            assert np.max(np.abs(flipped.coeffs - swapped.coeffs)) < 1e-12

    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    _report(1, "blade oracle + algebra laws", f"{elapsed:.2f}s < 10s")


def test_criterion_2_paravector_identities_and_series():
    rng = np.random.default_rng(202)
    count = 0
    while count < 1000:
        n = 1 + count % 6
        pv = Paravector(rng.standard_normal(), rng.standard_normal(n))
        if pv.norm() < 1e-3:
            continue
        count += 1
        embedded = pv.embed()
        conj_product = mv_mul(embedded, pv.conj().embed())
        expected = Multivector.scalar(pv.norm() ** 2, n)
        assert np.max(np.abs(conj_product.coeffs - expected.coeffs)) < 1e-12

        inverse_product = mv_mul(embedded, pv.inverse().embed())
        one = Multivector.scalar(1.0, n)
        assert np.max(np.abs(inverse_product.coeffs - one.coeffs)) < 1e-12

    for trial in range(200):
        n = 1 + trial % 6
        direction = Paravector(rng.standard_normal(), rng.standard_normal(n))
        pv = direction * (rng.uniform(0.05, 3.0) / max(direction.norm(), 1e-12))
        assert pv.norm() <= 3.0 + 1e-12
        exp_err = np.abs(pv.exp().embed().coeffs - series_exp(pv.embed(), 30).coeffs)
        sin_err = np.abs(pv.sin().embed().coeffs - series_sin(pv.embed(), 30).coeffs)
        assert np.max(exp_err) < 1e-10
        assert np.max(sin_err) < 1e-10

    _report(2, "paravector identities + series oracles")


def test_criterion_3_contraction_factors_scalar_and_lifted():
    grid_m = 1024
    for n_maps, seed in ((2, 31), (3, 32), (4, 33)):
        rng = np.random.default_rng(seed)
        s = tuple(float(v) for v in rng.uniform(-0.9, 0.9, n_maps))
        part = uniform_partition(0.0, 1.0, n_maps)
        lifted_params = CliffordRBParams(2, part, ({},) * n_maps, s)
        scalar_params = lifted_params.component_params(0)
        bound = max(abs(v) for v in s) + 1e-9

        scalar = empirical_gamma(scalar_params, grid_m, trials=100, seed=seed)
        lifted = clifford_empirical_gamma(lifted_params, grid_m, trials=100, seed=seed)
        assert scalar <= bound
        assert lifted <= bound
        assert abs(lifted - scalar) <= 1e-9

    _report(3, "empirical contraction, scalar == lifted", "N in {2,3,4}, M=1024")


def test_criterion_4_constant_fixed_points_and_uniqueness():
    tol = 1e-12
    rng = np.random.default_rng(404)
    for c, s in ((3.7, 0.6), (-1.2, -0.8), (0.25, 0.0)):
        part = uniform_partition(0.0, 1.0, 2)
        params = RBParams(part, (c, c), (s, s))
        result = fixed_point(params, 256, tol=tol, gamma=abs(s))
        expected = c / (1.0 - s)
        assert np.max(np.abs(result.function.values - expected)) <= tol

        from clifract import GridFunction

        warm = GridFunction(part, rng.standard_normal(257))
        rerun = fixed_point(params, 256, tol=tol, gamma=abs(s), initial=warm)
        agreement = np.max(np.abs(result.function.values - rerun.function.values))
        assert agreement <= 2 * tol

    _report(4, "constant problems hit c/(1-s), unique fixed point")


def test_criterion_5_self_referential_equation():
    started = time.perf_counter()
    tol = 1e-12
    params = fif_from_data([0.0, 0.5, 1.0], [0.0, 1.0, 0.0], [0.3, 0.3])
    result = fixed_point(params, 1024, tol=tol, gamma=0.3)
    psi = result.function

    # residual of the functional equation at every aligned grid point
    residual_sup = float(np.max(np.abs(rb_apply(params, psi).values - psi.values)))
    assert residual_sup <= 1e-10

    for index, expected in ((0, 0.0), (512, 1.0), (1024, 0.0)):
        assert abs(psi.values[index] - expected) <= 1e-10

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(5, "interpolation residual + knots", f"{elapsed:.3f}s < 1s")


def test_criterion_6_lift_components_bitwise_equal():
    knots = [0.0, 0.5, 1.0]
    datasets = {
        "": [0.0, 1.0, 0.0],
        "1": [1.0, 0.0, 2.0],
        "2": [-0.5, 0.75, 0.25],
        "12": [2.0, -1.0, 0.5],
    }
    s = [0.3, -0.25]
    lifted = clifford_fixed_point(
        clifford_fif_from_data(2, knots, datasets, s), 1024, tol=1e-12, gamma=0.3
    )
    for blade, data in datasets.items():
        scalar = fixed_point(fif_from_data(knots, data, s), 1024, tol=1e-12, gamma=0.3)
        assert np.array_equal(
            lifted.function.component(blade).values, scalar.function.values
        )
    _report(6, "lifted components bitwise equal to scalar solves", "n=2, 4 datasets")


def test_criterion_7_gate_formulas_reproduce_hand_values():
    half = RBParams(uniform_partition(0.0, 1.0, 2), (0.0, 0.0), (0.5, 0.5))
    assert gamma_gate(SpaceSpec.lp(1.0), half) == 0.5
    four_tenths = RBParams(uniform_partition(0.0, 1.0, 2), (0.0, 0.0), (0.4, 0.4))
    assert gamma_gate(SpaceSpec.ck(0), four_tenths) == 0.8
    # remaining four formulas at exactly representable substitutions
    quarters = RBParams(uniform_partition(0.0, 1.0, 4), (0.0,) * 4, (0.25,) * 4)
    assert gamma_gate(SpaceSpec.ck_alpha(0, 0.5), quarters) == 0.5  # (1/4)^(-1/2) * 1/4
    assert gamma_gate(SpaceSpec.sobolev(1.0, 1.0), half) == 1.0  # 2 * (1/2)^0 * 1/2
    assert gamma_gate(SpaceSpec.triebel_lizorkin(1.0, 1.0, 2.0), half) == 1.0
    assert gamma_gate(SpaceSpec.besov(1.0, 1.0, 2.0), half) == 0.5  # exponent (1/p - s)q = 0
    _report(7, "six gate formulas match hand substitution")


def test_criterion_8_holistic_closure_of_conjugate_product():
    datasets = {
        "": [0.5, 1.0, -0.25],
        "1": [1.0, 0.0, 2.0],
        "2": [0.0, -1.0, 0.5],
    }
    params = clifford_fif_from_data(2, [0.0, 0.5, 1.0], datasets, [0.35, -0.3])
    psi = clifford_fixed_point(params, 1024, tol=1e-12, gamma=0.35).function
    assert pv_restrict(psi).support == psi.support  # paravector-valued

    product = pointwise_product(psi, pointwise_conj(psi))
    for mask in (1, 2, 3):
        assert np.max(np.abs(product.component(mask).values)) < 1e-12

    scalar_blade = product.component(0).values
    for j in range(1025):
        value = psi.value_at(j)
        via_mv_mul = mv_mul(value, value.conj())
        assert abs(scalar_blade[j] - via_mv_mul.scalar_part()) < 1e-12
        assert abs(scalar_blade[j] - value.norm() ** 2) < 1e-12

    _report(8, "conjugate product equals pointwise squared norm")


def test_criterion_9_cli_determinism(tmp_path):
    config = {
        "schema_version": 1,
        "n": 2,
        "grid_M": 512,
        "fif": {
            "x": [0.0, 0.25, 1.0],
            "y": {"": [0.0, 1.0, 0.0], "12": [1.0, -0.5, 0.25]},
        },
        "s": [0.45, -0.2],
        "tol": 1e-12,
        "seed": 99,
        "space": {"tag": "Lp", "p": 2.0},
    }
    cfg_path = tmp_path / "problem.json"
    cfg_path.write_text(json.dumps(config))
    outputs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "clifract",
                "solve",
                str(cfg_path),
                "--output",
                str(out),
                "--quiet",
            ],
            cwd=tmp_path,
        )
        assert proc.returncode == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    _report(9, "identical config + seed give byte-identical CSV")
