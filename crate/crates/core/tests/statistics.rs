use std::f64::consts::PI;

use shiftcodes::channels::GaussianShiftChannel;
use shiftcodes::lattice::LatticeKind;
use shiftcodes::mc::{analytic_pe_hex, analytic_pe_square, run_mc, McConfig};

const SIGMAS: [f64; 4] = [0.2, 0.3, 0.4, 0.555];
const TRIALS: u64 = 200_000;

#[test]
fn square_code_tracks_the_tail_bound() {
    let code = LatticeKind::SymmetricSquare { n: 2 }.build().unwrap();
    let mut last = 0.0;
    for (i, &sigma) in SIGMAS.iter().enumerate() {
        let res = run_mc(&McConfig::new(code.clone(), sigma, TRIALS, 100 + i as u64)).unwrap();
        let pe = analytic_pe_square(sigma, PI.sqrt()).unwrap();
        for rate in [res.rate_where(|c| c.x_power(0) != 0), res.rate_where(|c| c.z_power(0) != 0)] {
            let tol = 3.0 * rate.stderr.max((pe * (1.0 - pe) / TRIALS as f64).sqrt());
            assert!((rate.estimate - pe).abs() < tol, "σ={sigma}: {rate:?} vs {pe}");
        }
        let total = res.logical_error_rate().estimate;
        assert!(total >= last, "σ={sigma}");
        last = total;
    }
}

#[test]
fn hexagonal_code_tracks_the_cell_integral() {
    let code = LatticeKind::Hexagonal { n: 2 }.build().unwrap();
    let mut last = 0.0;
    for (i, &sigma) in SIGMAS.iter().enumerate() {
        let rate = run_mc(&McConfig::new(code.clone(), sigma, TRIALS, 200 + i as u64)).unwrap().logical_error_rate();
        let pe = analytic_pe_hex(sigma).unwrap();
        let tol = 3.0 * rate.stderr.max((pe * (1.0 - pe) / TRIALS as f64).sqrt());
        assert!((rate.estimate - pe).abs() < tol, "σ={sigma}: {rate:?} vs {pe}");
        assert!(rate.estimate >= last);
        last = rate.estimate;
    }
}

#[test]
fn same_seed_same_counts() {
    let code = LatticeKind::Hexagonal { n: 3 }.build().unwrap();
    let mut cfg = McConfig::new(code, 0.35, 40_000, 2024);
    cfg.workers = 2;
    let a = run_mc(&cfg).unwrap();
    let b = run_mc(&cfg).unwrap();
    assert_eq!(a.counts, b.counts);
    cfg.workers = 1;
    assert_eq!(run_mc(&cfg).unwrap().counts, a.counts);
    cfg.seed = 2025;
    assert_ne!(run_mc(&cfg).unwrap().counts, a.counts);
}

#[test]
fn sampled_covariance_is_isotropic() {
    let sigma = 0.4;
    let xs = GaussianShiftChannel::new(sigma).unwrap().sample_shifts(2, 5, 1_000_000, 0).unwrap();
    let n = xs.len() as f64;
    let s2 = sigma * sigma;
    for i in 0..4 {
        for j in 0..=i {
            let c = xs.iter().map(|x| x.as_slice()[i] * x.as_slice()[j]).sum::<f64>() / n;
            let (expect, stderr) = if i == j { (s2, s2 * (2.0 / n).sqrt()) } else { (0.0, s2 / n.sqrt()) };
            assert!((c - expect).abs() < 4.0 * stderr, "({i},{j}) {c}");
        }
    }
}
