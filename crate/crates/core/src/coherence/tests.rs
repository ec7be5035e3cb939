use num_complex::Complex64 as C64;

use super::*;
use crate::linalg::{haar_unitary, sandwiched_renyi, renyi_divergence, RandomStream};
use crate::states::{from_bloch, pure, random_density};

fn plus() -> DensityMatrix {
    pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap()
}

fn h2(p: f64) -> f64 {
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

fn rho_max_09() -> DensityMatrix {
    mcms(&Spectrum::new(&[0.9, 0.1]).unwrap(), 2).unwrap()
}

/// Grid-search oracle for `inf over diagonal sigma of f(diag q)`.
fn grid_oracle(d: usize, resolution: f64, f: impl Fn(&DensityMatrix) -> f64 + Sync) -> f64 {
    grid_minimize(d, resolution, |q| f(&diagonal(q).unwrap())).0
}

#[test]
fn dephase_examples() {
    assert!(dephase(&plus()).matrix().max_abs_diff(maximally_mixed(2).matrix()) < 1e-15);
    let diag = diagonal(&[0.2, 0.3, 0.5]).unwrap();
    assert_eq!(dephase(&diag), diag);
    let rho = random_density(4, 3, &mut RandomStream::new(1)).unwrap();
    let once = dephase(&rho);
    assert!(dephase(&once).matrix().max_abs_diff(once.matrix()) <= 1e-14);
}

#[test]
fn c_rel_entropy_examples() {
    assert!((c_rel_entropy(&plus()) - 1.0).abs() < 1e-12);
    assert_eq!(c_rel_entropy(&diagonal(&[0.3, 0.7]).unwrap()), 0.0);
    let v = c_rel_entropy(&rho_max_09());
    assert!((v - (1.0 - h2(0.9))).abs() < 1e-12);
    assert!((v - 0.531004).abs() < 1e-6);
}

#[test]
fn c_rel_entropy_matches_simplex_minimum() {
    let mut rng = RandomStream::new(2);
    for _ in 0..10 {
        let d = 2 + rng.below(3);
        let rho = random_density(d, d, &mut rng).unwrap();
        let obj = distance_objective(&rho, Distance::RelEntropy).unwrap();
        let r = simplex_minimize(d, obj.as_ref(), &[vec![1.0 / d as f64; d]], &SimplexOptConfig::light(3)).unwrap();
        assert!((r.value - c_rel_entropy(&rho)).abs() < 1e-8, "{} vs {}", r.value, c_rel_entropy(&rho));
    }
}

#[test]
fn c_l1_examples() {
    for d in 2..6 {
        let v = vec![C64::new(1.0, 0.0); d];
        assert!((c_l1(&pure(&v).unwrap()) - (d as f64 - 1.0)).abs() < 1e-12);
    }
    assert_eq!(c_l1(&diagonal(&[0.5, 0.5]).unwrap()), 0.0);
    assert!((c_l1(&from_bloch([0.8, 0.0, 0.0]).unwrap()) - 0.8).abs() < 1e-15);
}

#[test]
fn c_distance_diagonal_is_zero() {
    let rho = diagonal(&[0.6, 0.3, 0.1]).unwrap();
    for dist in Distance::MENU {
        assert!(c_distance(&rho, dist, &SimplexOptConfig::light(1)).unwrap().value < 1e-9, "{dist}");
    }
}

#[test]
fn c_distance_qubit_examples() {
    let opt = SimplexOptConfig::default();
    let bloch = from_bloch([0.8, 0.0, 0.0]).unwrap();
    let tn = c_distance(&bloch, Distance::TraceNorm, &opt).unwrap();
    let oracle = grid_oracle(2, 1e-4, |s| Distance::TraceNorm.eval(&bloch, s).unwrap());
    assert!((tn.value - 0.8).abs() < 1e-6, "{}", tn.value);
    assert!((oracle - 0.8).abs() < 1e-6);
    assert!(tn.value <= oracle + 1e-9);
    let fid = c_distance(&plus(), Distance::OneMinusFidelity, &opt).unwrap();
    assert!((fid.value - 0.5).abs() < 1e-9);
    let oracle = grid_oracle(2, 1e-3, |s| Distance::OneMinusFidelity.eval(&plus(), s).unwrap());
    assert!((oracle - 0.5).abs() < 1e-9);
}

#[test]
fn c_distance_matches_grid_oracle_qutrit() {
    let mut rng = RandomStream::new(4);
    let rho = random_density(3, 2, &mut rng).unwrap();
    let opt = SimplexOptConfig::light(5);
    for dist in [Distance::TraceNorm, Distance::Schatten(2.0), Distance::Schatten(3.0), Distance::OneMinusFidelity] {
        let r = c_distance(&rho, dist, &opt).unwrap();
        let oracle = grid_oracle(3, 1e-3, |s| dist.eval(&rho, s).unwrap());
        assert!(r.value <= oracle + 1e-9, "{dist}: {} > {oracle}", r.value);
        assert!(oracle - r.value < 5e-3, "{dist}: {} vs {oracle}", r.value);
    }
}

#[test]
fn c_distance_never_exceeds_maximally_mixed_distance() {
    let mut rng = RandomStream::new(6);
    for _ in 0..30 {
        let d = 2 + rng.below(4);
        let rho = random_density(d, 1 + rng.below(d), &mut rng).unwrap();
        for dist in Distance::MENU {
            let r = c_distance(&rho, dist, &SimplexOptConfig::light(rng.below(100) as u64)).unwrap();
            assert!(r.value <= c_max_closed(&rho, dist).unwrap() + 1e-9);
        }
    }
}

fn finite_difference_check(obj: &dyn SimplexObjective, q: &[f64], tol: f64) {
    // Directional derivatives along simplex-preserving directions e_i - e_j.
    let (_, g) = obj.eval(q).unwrap();
    let h = 1e-6;
    for i in 0..q.len() {
        for j in 0..q.len() {
            if i == j {
                continue;
            }
            let mut a = q.to_vec();
            let mut b = q.to_vec();
            a[i] += h;
            a[j] -= h;
            b[i] -= h;
            b[j] += h;
            let numeric = (obj.eval(&a).unwrap().0 - obj.eval(&b).unwrap().0) / (2.0 * h);
            let analytic = g[i] - g[j];
            assert!((numeric - analytic).abs() < tol * (1.0 + analytic.abs()), "{i},{j}: {numeric} vs {analytic}");
        }
    }
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = RandomStream::new(7);
    for _ in 0..5 {
        let d = 2 + rng.below(3);
        let rho = random_density(d, d, &mut rng).unwrap();
        let q = rng.dirichlet(d);
        for dist in [Distance::RelEntropy, Distance::TraceNorm, Distance::Schatten(2.0), Distance::Schatten(3.5), Distance::OneMinusFidelity] {
            finite_difference_check(distance_objective(&rho, dist).unwrap().as_ref(), &q, 1e-5);
        }
        finite_difference_check(sandwiched_objective(&rho, 2.0).as_ref(), &q, 1e-5);
        finite_difference_check(sandwiched_objective(&rho, 3.0).as_ref(), &q, 1e-5);
    }
}

#[test]
fn c_alpha_examples() {
    let opt = SimplexOptConfig::light(1);
    let diag = diagonal(&[0.7, 0.2, 0.1]).unwrap();
    for alpha in [0.5, 2.0] {
        assert!(c_alpha(&diag, alpha, &opt).unwrap().value < 1e-9);
    }
    let half = c_alpha(&plus(), 0.5, &opt).unwrap().value;
    let oracle = grid_oracle(2, 1e-3, |s| renyi_divergence(&plus(), s, 0.5).unwrap());
    assert!((half - 1.0).abs() < 1e-9 && (oracle - 1.0).abs() < 1e-9);
    let two = c_alpha(&rho_max_09(), 2.0, &opt).unwrap().value;
    assert!((two - (2.0f64 * 0.82).log2()).abs() < 1e-6, "{two}");
    assert!((two - 0.713695).abs() < 1e-6);
    assert!(c_alpha(&plus(), 0.0, &opt).is_err());
    assert!(c_alpha(&plus(), f64::INFINITY, &opt).is_err());
    assert_eq!(c_alpha(&plus(), 1.0, &opt).unwrap().value, c_rel_entropy(&plus()));
}

#[test]
fn c_alpha_agrees_with_closed_form_and_grid() {
    let mut rng = RandomStream::new(8);
    for _ in 0..3 {
        let rho = random_density(3, 3, &mut rng).unwrap();
        for alpha in [0.3, 0.5, 0.8] {
            let opt = c_alpha(&rho, alpha, &SimplexOptConfig::light(2)).unwrap().value;
            let closed = c_alpha_petz_closed(&rho, alpha).unwrap();
            assert!((opt - closed).abs() < 1e-9, "{opt} vs {closed}");
        }
        let oracle = grid_oracle(3, 2e-3, |s| renyi_divergence(&rho, s, 0.5).unwrap());
        let closed = c_alpha_petz_closed(&rho, 0.5).unwrap();
        assert!(closed <= oracle + 1e-9 && oracle - closed < 5e-3);
        let sand = c_alpha(&rho, 2.0, &SimplexOptConfig::light(2)).unwrap().value;
        let oracle = grid_oracle(3, 2e-3, |s| sandwiched_renyi(&rho, s, 2.0).unwrap());
        assert!(sand <= oracle + 1e-9 && oracle - sand < 5e-3, "{sand} vs {oracle}");
    }
}

#[test]
fn c_alpha_limits_at_one() {
    let mut rng = RandomStream::new(9);
    for _ in 0..5 {
        let d = 2 + rng.below(3);
        let rho = random_density(d, d, &mut rng).unwrap();
        let cr = c_rel_entropy(&rho);
        for alpha in [1.0 - 1e-3, 1.0 + 1e-3] {
            let v = c_alpha(&rho, alpha, &SimplexOptConfig::light(1)).unwrap().value;
            assert!((v - cr).abs() < 5e-3, "alpha={alpha}: {v} vs {cr}");
        }
    }
}

#[test]
fn c_geometric_examples() {
    let opt = SimplexOptConfig::light(1);
    assert!((c_geometric(&plus(), &opt).unwrap().value - 0.5).abs() < 1e-9);
    assert!(c_geometric(&diagonal(&[0.4, 0.6]).unwrap(), &opt).unwrap().value < 1e-9);
    let bloch = from_bloch([0.8, 0.0, 0.0]).unwrap();
    let cg = c_geometric(&bloch, &opt).unwrap().value;
    assert!((cg - 0.2).abs() < 1e-6, "{cg}");
    let mut rng = RandomStream::new(10);
    for _ in 0..20 {
        let rho = random_density(2, 1 + rng.below(2), &mut rng).unwrap();
        let cl1 = c_l1(&rho);
        let cg = c_geometric(&rho, &opt).unwrap().value;
        assert!((cg - (1.0 - (1.0 - cl1 * cl1).sqrt()) / 2.0).abs() < 1e-6);
    }
}

#[test]
fn mcms_examples() {
    let uniform = mcms(&Spectrum::new(&[0.25; 4]).unwrap(), 4).unwrap();
    assert!(uniform.matrix().max_abs_diff(maximally_mixed(4).matrix()) < 1e-15);
    assert!(c_rel_entropy(&uniform) < 1e-12);
    let pure_max = mcms(&Spectrum::new(&[1.0]).unwrap(), 2).unwrap();
    assert!(pure_max.matrix().max_abs_diff(plus().matrix()) < 1e-15);
    let r = rho_max_09();
    assert!(r.populations().iter().all(|p| (p - 0.5).abs() < 1e-15));
    assert!((r.matrix()[(0, 1)].norm() - 0.4).abs() < 1e-15);
    let s = r.spectrum().values();
    assert!((s[0] - 0.9).abs() < 1e-12 && (s[1] - 0.1).abs() < 1e-12);
    assert!(mcms(&Spectrum::new(&[0.5, 0.3, 0.2]).unwrap(), 2).is_err());
}

#[test]
fn optimal_unitary_examples() {
    let f = fourier_basis(3);
    let v = optimal_unitary(&diagonal(&[0.5, 0.3, 0.2]).unwrap());
    assert!(v.max_abs_diff(f.matrix()) < 1e-15);
    let mut rng = RandomStream::new(11);
    let any = optimal_unitary(&maximally_mixed(3));
    assert!(any.unitarity_defect() < 1e-12);
    assert!(maximally_mixed(3).conjugate_by(&any).unwrap().matrix().max_abs_diff(maximally_mixed(3).matrix()) < 1e-15);
    let r = diagonal(&[0.9, 0.1]).unwrap();
    let rv = r.conjugate_by(&optimal_unitary(&r)).unwrap();
    assert!((c_rel_entropy(&rv) - 0.531004).abs() < 1e-6);
    for _ in 0..20 {
        let d = 2 + rng.below(5);
        let rho = random_density(d, 1 + rng.below(d), &mut rng).unwrap();
        let v = optimal_unitary(&rho);
        assert!(v.unitarity_defect() <= 1e-9);
        let target = mcms(rho.spectrum(), d).unwrap();
        assert!(rho.conjugate_by(&v).unwrap().matrix().max_abs_diff(target.matrix()) <= 1e-9);
    }
}

#[test]
fn optimal_unitary_ties_give_same_value() {
    // Degenerate spectrum: the tie order must not change any coherence value.
    let mut rng = RandomStream::new(12);
    let u = haar_unitary(3, &mut rng);
    let rho = diagonal(&[0.4, 0.4, 0.2]).unwrap().conjugate_by(&u).unwrap();
    let v = optimal_unitary(&rho);
    let rv = rho.conjugate_by(&v).unwrap();
    let reference = mcms(rho.spectrum(), 3).unwrap();
    assert!((c_rel_entropy(&rv) - c_rel_entropy(&reference)).abs() < 1e-9);
    assert!((c_l1(&rv) - c_l1(&reference)).abs() < 1e-9);
}

#[test]
fn c_max_closed_examples() {
    for dist in Distance::MENU {
        assert!(c_max_closed(&maximally_mixed(3), dist).unwrap().abs() < 1e-12);
    }
    let r = diagonal(&[0.9, 0.1]).unwrap();
    assert!((c_max_closed(&r, Distance::RelEntropy).unwrap() - 0.531004).abs() < 1e-6);
    let z = from_bloch([0.0, 0.0, 0.8]).unwrap();
    assert!((c_max_closed(&z, Distance::TraceNorm).unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn optimal_unitary_attains_distance_to_center() {
    let mut rng = RandomStream::new(13);
    for _ in 0..10 {
        let d = 2 + rng.below(3);
        let rho = random_density(d, 1 + rng.below(d), &mut rng).unwrap();
        let rv = rho.conjugate_by(&optimal_unitary(&rho)).unwrap();
        for dist in Distance::MENU {
            let c = c_distance(&rv, dist, &SimplexOptConfig::light(1)).unwrap().value;
            let ceiling = c_max_closed(&rho, dist).unwrap();
            assert!((c - ceiling).abs() < 1e-6, "{dist}: {c} vs {ceiling}");
        }
    }
}

#[test]
fn distance_names_round_trip() {
    for dist in [Distance::RelEntropy, Distance::TraceNorm, Distance::Schatten(2.0), Distance::Schatten(f64::INFINITY), Distance::OneMinusFidelity] {
        assert_eq!(dist.to_string().parse::<Distance>().unwrap(), dist);
    }
    assert!("schatten_0.5".parse::<Distance>().is_err());
    assert!("bures".parse::<Distance>().is_err());
}

#[test]
fn l1_monotone_under_incoherent_channels() {
    let mut rng = RandomStream::new(14);
    for _ in 0..200 {
        let d = 2 + rng.below(3);
        let rho = random_density(d, 1 + rng.below(d), &mut rng).unwrap();
        let kind = [FreeChannelKind::IncoherentUnitary, FreeChannelKind::DephasingMixture][rng.below(2)];
        let ch = random_free_channel(kind, d, &mut rng).unwrap();
        assert!(c_l1(&ch.apply(&rho).unwrap()) <= c_l1(&rho) + 1e-9);
    }
}

#[test]
fn l1_increases_under_mio_construction() {
    // Rho_max is not the l1 maximizer of its unitary orbit for d >= 4, so the
    // channel built from a better unitary raises c_l1.
    let rho = mcms(&Spectrum::new(&[0.6, 0.4, 0.0, 0.0]).unwrap(), 4).unwrap();
    let obj = |r: &DensityMatrix| Ok(c_l1(r));
    let mut rng = RandomStream::new(7);
    let budget = crate::correlations::Budget { restarts: 32, refine_iters: 100 };
    let best = crate::correlations::unitary_maximize(&obj, &rho, budget, &mut rng, crate::correlations::Structure::Global)
        .unwrap();
    let out = mio_channel_from_unitary(&best.best_unitary).unwrap().apply(&rho).unwrap();
    let gain = c_l1(&out) - c_l1(&rho);
    assert!(gain >= 0.1, "gain {gain}");
    assert!(out.matrix().max_abs_diff(rho.conjugate_by(&best.best_unitary).unwrap().matrix()) <= 1e-9);
}
