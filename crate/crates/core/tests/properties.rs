use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use shiftcodes::capacity::{capacity_bounds, css_rate};
use shiftcodes::channels::RotationError;
use shiftcodes::clifford::{w_gate_exponent, AffineSymplectic, DisplacementLabel, GateKind};
use shiftcodes::lattice::{skew_standardize, Sublattice};
use shiftcodes::linalg::{omega, to_f64, IntMatrix};
use shiftcodes::qudit::{PauliLabel, QuditCode};
use shiftcodes::squeezing::{coherent_comb, comb_grid, GaussianCodeword};
use shiftcodes::{centered_mod, Complex64, LatticeCode, ShiftVector, SQRT_2PI};

/// Square codes on each mode, mixed by a symplectic shear, then rebased by a unimodular matrix.
#[derive(Debug, Clone)]
struct RandomLattice {
    dims: Vec<u64>,
    m: DMatrix<f64>,
}

fn unimodular(size: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut u = IntMatrix::identity(size, size);
    for &(i, j, k) in ops {
        let (i, j) = (i % size, j % size);
        if i == j {
            continue;
        }
        let rj = u.row(j).clone_owned();
        let mut ri = u.row_mut(i);
        ri += rj * k;
    }
    u
}

fn random_lattice(max_modes: usize) -> impl Strategy<Value = RandomLattice> {
    (1..=max_modes).prop_flat_map(|n| {
        (
            prop::collection::vec((1u64..=4, 0.6f64..2.5), n),
            prop::collection::vec(-0.5f64..0.5, n * n),
            prop::collection::vec((0..2 * n, 0..2 * n, -2i64..=2), 0..8),
        )
            .prop_map(move |(modes, b, ops)| {
                let dim = 2 * n;
                let mut m0 = DMatrix::zeros(dim, dim);
                for (i, &(d, alpha)) in modes.iter().enumerate() {
                    m0[(i, i)] = d as f64 * alpha / SQRT_2PI;
                    m0[(n + i, n + i)] = SQRT_2PI / alpha;
                }
                let mut shear = DMatrix::identity(dim, dim);
                for i in 0..n {
                    for j in 0..n {
                        let s = 0.5 * (b[i * n + j] + b[j * n + i]);
                        shear[(i, n + j)] = s;
                    }
                }
                let m = to_f64(&unimodular(dim, &ops)) * m0 * shear;
                RandomLattice { dims: modes.iter().map(|x| x.0).collect(), m }
            })
    })
}

fn shift_for(modes: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.6f64..0.6, 2 * modes)
}

fn gate_kind(modes: usize) -> impl Strategy<Value = GateKind> {
    let m = modes;
    prop_oneof![
        (0..m, 0..m).prop_filter("distinct modes", |(c, t)| c != t).prop_map(|(control, target)| GateKind::Sum { control, target }),
        (0..m).prop_map(|mode| GateKind::Fourier { mode }),
        (0..m, 1u64..6).prop_map(|(mode, n)| GateKind::Phase { mode, n }),
        (0..m, 0.3f64..4.0).prop_map(|(mode, r)| GateKind::Squeeze { mode, r }),
    ]
}

fn circuit() -> impl Strategy<Value = (usize, Vec<(GateKind, bool)>)> {
    (1usize..=3).prop_flat_map(|m| {
        let kinds = if m == 1 {
            prop_oneof![
                (0..1usize).prop_map(|mode| GateKind::Fourier { mode }),
                (0..1usize, 1u64..6).prop_map(|(mode, n)| GateKind::Phase { mode, n }),
                (0..1usize, 0.3f64..4.0).prop_map(|(mode, r)| GateKind::Squeeze { mode, r }),
            ]
            .boxed()
        } else {
            gate_kind(m).boxed()
        };
        (Just(m), prop::collection::vec((kinds, any::<bool>()), 1..8))
    })
}

fn compose(modes: usize, gates: &[(GateKind, bool)]) -> AffineSymplectic {
    gates.iter().fold(AffineSymplectic::identity(modes), |acc, (k, inv)| {
        let g = AffineSymplectic::build(k, modes).unwrap();
        acc.then(&if *inv { g.inverse() } else { g })
    })
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dual_basis_identity(l in random_lattice(3)) {
        let code = LatticeCode::new(l.m.clone()).unwrap();
        let prod = code.dual() * omega(code.modes()) * code.generator().transpose();
        let err = (prod - DMatrix::<f64>::identity(2 * code.modes(), 2 * code.modes())).abs().max();
        prop_assert!(err < 1e-9, "{err}");
        prop_assert_eq!(code.code_dimension(), l.dims.iter().product::<u64>());
    }

    #[test]
    fn skew_form_round_trip(l in random_lattice(3)) {
        let code = LatticeCode::new(l.m).unwrap();
        let f = skew_standardize(code.gram()).unwrap();
        prop_assert_eq!(&f.r * code.gram() * f.r.transpose(), f.block());
        for w in f.d.windows(2) {
            prop_assert_eq!(w[1] % w[0], 0);
        }
    }

    #[test]
    fn unimodular_invariance(
        l in random_lattice(2),
        ops in prop::collection::vec((0usize..4, 0usize..4, -2i64..=2), 1..6),
        x in shift_for(2),
    ) {
        let code = LatticeCode::new(l.m).unwrap();
        let n = code.modes();
        let u = unimodular(2 * n, &ops);
        let other = code.with_basis_change(&u).unwrap();
        prop_assert_eq!(code.code_dimension(), other.code_dimension());
        for which in [Sublattice::Stabilizer, Sublattice::Dual] {
            let (a, b) = (code.shortest_nonzero(which).unwrap(), other.shortest_nonzero(which).unwrap());
            prop_assert!((a - b).abs() < 1e-9 * a.max(1.0));
        }
        let s = ShiftVector::new(x[..2 * n].to_vec()).unwrap();
        let (d1, d2) = (code.decode_shift(&s).unwrap(), other.decode_shift(&s).unwrap());
        let gap = (&d1.correction - &d2.correction).norm_inf();
        prop_assert!(gap < 1e-9, "{gap}");
        prop_assert_eq!(d1.logical.is_identity(), d2.logical.is_identity());
    }

    #[test]
    fn cosets_ignore_stabilizers(
        l in random_lattice(3),
        coeffs in prop::collection::vec(-2i64..=2, 6),
        x in shift_for(3),
    ) {
        let code = LatticeCode::new(l.m).unwrap();
        let dim = 2 * code.modes();
        let s = ShiftVector::new(x[..dim].to_vec()).unwrap();
        let stab: Vec<f64> = (0..dim)
            .map(|j| SQRT_2PI * (0..dim).map(|i| coeffs[i] as f64 * code.generator()[(i, j)]).sum::<f64>())
            .collect();
        let moved = &s + &ShiftVector::new(stab.clone()).unwrap();
        let (a, b) = (code.decode_shift(&s).unwrap(), code.decode_shift(&moved).unwrap());
        prop_assert_eq!(&a.logical, &b.logical);
        let expect = &a.correction + &ShiftVector::new(stab).unwrap();
        prop_assert!((&b.correction - &expect).norm_inf() < 1e-8);

        // dual points decode to themselves
        let k: Vec<i64> = coeffs[..dim].to_vec();
        let w: Vec<f64> = (0..dim)
            .map(|j| SQRT_2PI * (0..dim).map(|i| k[i] as f64 * code.dual()[(i, j)]).sum::<f64>())
            .collect();
        let d = code.decode_shift(&ShiftVector::new(w.clone()).unwrap()).unwrap();
        prop_assert!((&d.correction - &ShiftVector::new(w).unwrap()).norm_inf() < 1e-8);
        prop_assert_eq!(d.logical, code.logical_coset(&k));
    }

    #[test]
    fn qudit_decode_is_idempotent(n in 1u64..6, r1 in 1u64..7, r2 in 1u64..7, a in -200i64..200, b in -200i64..200) {
        let c = QuditCode::new(n, r1, r2).unwrap();
        let e = c.label(a, b);
        let out = c.decode(e);
        let residual = c.label(e.a - out.correction.a, e.b - out.correction.b);
        let again = c.decode(residual);
        prop_assert_eq!(again.correction, PauliLabel { a: 0, b: 0 });
        prop_assert_eq!(again.logical, out.logical);
        let (p1, p2) = c.commutation_phase(e);
        prop_assert_eq!(p1.is_zero() && p2.is_zero(), out.correction == PauliLabel { a: 0, b: 0 });
    }

    #[test]
    fn odd_radii_give_perfect_codes(n in 1u64..6, h1 in 0u64..4, h2 in 0u64..4) {
        let (r1, r2) = (2 * h1 + 1, 2 * h2 + 1);
        let c = QuditCode::new(n, r1, r2).unwrap();
        prop_assert!(c.is_perfect());
        prop_assert_eq!(r1 * r2 * n, c.d());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn compositions_stay_symplectic((modes, gates) in circuit()) {
        let g = compose(modes, &gates);
        prop_assert!(g.symplectic_defect() < 1e-12 * g.matrix().norm().max(1.0).powi(2), "{}", g.symplectic_defect());
        let back = g.then(&g.inverse());
        let id_err = (back.matrix() - DMatrix::<f64>::identity(2 * modes, 2 * modes)).abs().max();
        prop_assert!(id_err < 1e-10);
        prop_assert!(back.shift().norm() < 1e-10);
    }

    #[test]
    fn conjugation_is_a_group_action(
        (modes, first) in circuit(),
        second in prop::collection::vec(any::<bool>(), 1..4),
        label in prop::collection::vec(-2.0f64..2.0, 6),
    ) {
        let g1 = compose(modes, &first);
        let g2 = compose(modes, &first.iter().rev().zip(second.iter().cycle()).map(|(g, i)| (g.0.clone(), *i)).collect::<Vec<_>>());
        let l = DisplacementLabel(label[..2 * modes].to_vec());
        let step1 = g1.conjugate_displacement(&l).unwrap();
        let step2 = g2.conjugate_displacement(&step1.label).unwrap();
        let both = g1.then(&g2).conjugate_displacement(&l).unwrap();
        let scale = 1.0 + l.0.iter().map(|x| x.abs()).sum::<f64>() * g1.matrix().norm() * g2.matrix().norm();
        for (a, b) in step2.label.0.iter().zip(&both.label.0) {
            prop_assert!((a - b).abs() < 1e-10 * scale);
        }
        prop_assert!(circle_distance(step1.phase + step2.phase, both.phase) < 1e-9 * scale);
    }

    #[test]
    fn clifford_gates_keep_shifts_small(kind in gate_kind(2), x in shift_for(2)) {
        prop_assume!(!matches!(kind, GateKind::Squeeze { .. }));
        let g = AffineSymplectic::build(&kind, 2).unwrap();
        let s = ShiftVector::new(x).unwrap();
        let out = g.propagate_shift(&s).unwrap();
        prop_assert!(out.norm_inf() <= 2.0 * s.norm_inf() + 1e-15);
    }

    #[test]
    fn squeeze_amplification_is_top_singular_value(r in 0.05f64..20.0) {
        let g = AffineSymplectic::build(&GateKind::Squeeze { mode: 0, r }, 1).unwrap();
        let expect = r.cbrt().max(1.0 / r.cbrt());
        prop_assert!((g.max_amplification() - expect).abs() < 1e-12 * expect);
        let q = g.propagate_shift(&ShiftVector::single(1.0, 0.0)).unwrap();
        prop_assert!((q.norm() - r.cbrt()).abs() < 1e-12 * r.cbrt());
    }

    #[test]
    fn css_rate_decreases(p in 0.0f64..0.5, dp in 1e-6f64..0.1) {
        let q = (p + dp).min(0.5);
        prop_assume!(q > p);
        prop_assert!(css_rate(q).unwrap() < css_rate(p).unwrap());
    }

    #[test]
    fn coherent_information_below_holevo(s2 in 1e-4f64..(1.0 / std::f64::consts::E)) {
        let b = capacity_bounds(s2.sqrt()).unwrap();
        if let Some(ci) = b.coherent_info {
            prop_assert!(ci < b.holevo_upper);
        }
    }

    #[test]
    fn rotation_modulus_ignores_displacement(theta in 0.1f64..6.1, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let r = RotationError::new(theta);
        let c = r.coefficient(Complex64::new(re, im)).unwrap();
        prop_assert!((c.norm() - r.coefficient(Complex64::new(0.0, 0.0)).unwrap().norm()).abs() < 1e-12 * c.norm());
    }

    #[test]
    fn centered_mod_decomposes(x in -1e3f64..1e3, m in 0.01f64..10.0) {
        let (r, k) = centered_mod(x, m);
        prop_assert!(r > -m / 2.0 - 1e-9 && r <= m / 2.0 + 1e-9);
        prop_assert!((r + k * m - x).abs() < 1e-9 * x.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn grid_states_are_normalized(d in 0.2f64..0.5, k in 0.2f64..0.5, window in 1u32..6, alpha in 1.5f64..3.0) {
        let w = GaussianCodeword::plus(2, PI.sqrt(), d, k).unwrap();
        prop_assert!((w.position_wavefunction(w.default_position_grid()).norm() - 1.0).abs() < 1e-10);
        let comb = coherent_comb(window, alpha, (0.0, 0.0), comb_grid(window, alpha).unwrap()).unwrap();
        prop_assert!((comb.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn w_gate_parity() {
    for x in -100..=100i64 {
        assert_eq!(w_gate_exponent(x), x.rem_euclid(2), "x={x}");
    }
}

#[test]
fn symplectic_gates_built_directly() {
    let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
    assert!(AffineSymplectic::from_heisenberg(h, DVector::zeros(2)).unwrap().is_symplectic());
    let bad = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
    assert!(AffineSymplectic::from_heisenberg(bad, DVector::zeros(2)).is_err());
}
