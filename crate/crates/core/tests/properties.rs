use proptest::prelude::*;
use ret_visco::fractional::{caputo_l1, CaputoMesh};
use ret_visco::{ml_relax, MLConfig, MaterialParams, Model};

fn model(alpha: f64) -> Model {
    Model::new(MaterialParams::with_alpha(alpha))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stress_inversion_round_trip(alpha in 0.52f64..1.0, ln_s in -6.0f64..5.0) {
        let m = model(alpha);
        let s = ln_s.exp();
        let sigma = m.sigma_of_s(s).unwrap();
        let back = m.s_of_sigma(sigma).unwrap();
        prop_assert!(((back - s) / s).abs() < 1e-9, "s = {}, back = {}", s, back);
    }

    #[test]
    fn relaxation_function_decreases(alpha in 0.3f64..=1.0, x in 0.0f64..200.0, dx in 1e-3f64..5.0) {
        let cfg = MLConfig::default();
        let a = ml_relax(alpha, x, &cfg).unwrap();
        let b = ml_relax(alpha, x + dx, &cfg).unwrap();
        prop_assert!(b < a && b > 0.0 || (alpha == 1.0 && b >= 0.0 && b <= a));
    }

    #[test]
    fn relaxation_time_and_energy_are_monotone(alpha in 0.52f64..0.99, r1 in 0.01f64..0.99, r2 in 0.01f64..0.99) {
        prop_assume!((r1 - r2).abs() > 1e-6);
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        let m = model(alpha);
        let t_lo = m.relaxation_time_of_sigma(lo).unwrap().tau;
        let t_hi = m.relaxation_time_of_sigma(hi).unwrap().tau;
        prop_assert!(t_lo > t_hi && t_hi > 0.0);
        let law = m.viscous_energy_law().unwrap();
        prop_assert!(law.at_sigma(lo).unwrap() < law.at_sigma(hi).unwrap());
    }

    #[test]
    fn l1_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, alpha in 0.1f64..1.0, w in 0.1f64..5.0) {
        let mesh = CaputoMesh::graded(4.0, 64, 2.0).unwrap();
        let f: Vec<f64> = mesh.nodes.iter().map(|t| (w * t).sin()).collect();
        let g: Vec<f64> = mesh.nodes.iter().map(|t| t * t).collect();
        let h: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let (df, dg, dh) = (
            caputo_l1(&f, &mesh, alpha).unwrap(),
            caputo_l1(&g, &mesh, alpha).unwrap(),
            caputo_l1(&h, &mesh, alpha).unwrap(),
        );
        for i in 0..dh.len() {
            let lin = a * df[i] + b * dg[i];
            prop_assert!((dh[i] - lin).abs() <= 1e-12 * (1.0 + lin.abs() + (a * df[i]).abs() + (b * dg[i]).abs()));
        }
    }

    /// The nonlinear law is autonomous: restarting from sigma_R(t1) and
    /// running for t2 lands on sigma_R(t1 + t2). The fractional modulus has
    /// memory and does not share this.
    #[test]
    fn ret_relaxation_is_a_semigroup(alpha in 0.55f64..1.0, r in 0.1f64..0.95, t1 in 0.01f64..5.0, t2 in 0.01f64..5.0) {
        let m = model(alpha);
        let mid = m.sigma_ret_closed(t1, r).unwrap();
        let restarted = m.sigma_ret_closed(t2, mid).unwrap();
        let direct = m.sigma_ret_closed(t1 + t2, r).unwrap();
        prop_assert!(((restarted - direct) / direct).abs() < 1e-9);
    }

    #[test]
    fn ret_stays_between_bounds(alpha in 0.55f64..0.99, r in 0.05f64..0.95, t in 0.01f64..50.0) {
        let m = model(alpha);
        let f = m.sigma_fractional(t, r).unwrap();
        let ret = m.sigma_ret_closed(t, r).unwrap();
        prop_assert!(f < ret && ret < f / r);
    }
}

#[test]
fn fractional_modulus_is_not_a_semigroup() {
    let m = model(0.6);
    let mid = m.sigma_fractional(1.0, 0.5).unwrap();
    let restarted = m.sigma_fractional(1.0, mid).unwrap();
    let direct = m.sigma_fractional(2.0, 0.5).unwrap();
    assert!(((restarted - direct) / direct).abs() > 1e-2);
}

#[test]
fn energy_law_builds_across_the_integrable_range() {
    for i in 1..200 {
        let alpha = 0.5 + 0.0025 * i as f64;
        let law = model(alpha).viscous_energy_law();
        assert!(law.is_ok(), "alpha = {alpha}: {:?}", law.err());
    }
}
