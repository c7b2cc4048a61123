//! Property tests over randomized inputs.

use hipnex::ergodic::{ergodic_direct, ErgodicAccumulator};
use hipnex::linalg;
use hipnex::params::{budget_ergodic, budget_pointwise, derive_params};
use hipnex::problem::check_normal_cone;
use hipnex::problems::{gen_box, BoxVipSpec};
use proptest::prelude::*;

proptest! {
    /// Any admissible `(sigma_hat, L)` yields a pack whose internal
    /// relations all hold and whose homotopy rate is a genuine root.
    #[test]
    fn derived_packs_are_always_consistent(
        sigma_hat in 0.0..0.499f64,
        log_l in -4.0..4.0f64,
    ) {
        let l = 10f64.powf(log_l);
        let p = derive_params(sigma_hat, l, None, None).unwrap();
        prop_assert!(p.max_invariant_violation() <= 0.0);
        prop_assert!(p.q(p.tau).abs() <= 1e-12 * p.q_scale());
    }

    /// Budgets shrink (weakly) as the tolerance loosens and grow with the
    /// start distance.
    #[test]
    fn budgets_are_monotone(
        d0 in 0.0..50.0f64,
        rho in 1e-8..1e-1f64,
    ) {
        let p = derive_params(0.25, 1.0, None, None).unwrap();
        prop_assert!(budget_pointwise(&p, d0, rho) >= budget_pointwise(&p, d0, rho * 2.0));
        prop_assert!(budget_pointwise(&p, d0 + 1.0, rho) >= budget_pointwise(&p, d0, rho));
        prop_assert!(budget_ergodic(&p, d0, rho) >= budget_ergodic(&p, d0, rho * 2.0));
    }

    /// Streaming averaged certificates agree with the two-pass definition on
    /// arbitrary weighted traces.
    #[test]
    fn streaming_certificate_matches_direct(
        trace in prop::collection::vec(
            (0.01..10.0f64,
             prop::array::uniform4(-5.0..5.0f64),
             prop::array::uniform4(-5.0..5.0f64)),
            1..60,
        )
    ) {
        let mut acc = ErgodicAccumulator::new(4);
        let mut triples = Vec::new();
        for (l, y, w) in &trace {
            acc.ingest(*l, y, w);
            triples.push((*l, y.to_vec(), w.to_vec()));
        }
        let streamed = acc.certificate().unwrap();
        let direct = ergodic_direct(&triples).unwrap();
        let scale = 1.0 + direct.eps_a.abs();
        prop_assert!((streamed.eps_a - direct.eps_a).abs() <= 1e-9 * scale);
        prop_assert!(linalg::dist(&streamed.y_a, &direct.y_a) <= 1e-10 * (1.0 + linalg::norm(&direct.y_a)));
    }

    /// Box projections are idempotent and nonexpansive, and shifting a
    /// feasible point by its own normal vector projects straight back.
    #[test]
    fn box_projection_properties(
        seed in 0u64..50,
        a in prop::array::uniform8(-4.0..4.0f64),
        b in prop::array::uniform8(-4.0..4.0f64),
    ) {
        use hipnex::problem::VIProblem;
        let p = gen_box(&BoxVipSpec::new(8, seed));
        let pa = p.project(&a);
        let pb = p.project(&b);
        prop_assert!(linalg::dist(&p.project(&pa), &pa) == 0.0);
        prop_assert!(linalg::dist(&pa, &pb) <= linalg::dist(&a, &b) + 1e-12);
        let (z, nu) = p.known_certificate();
        prop_assert!(check_normal_cone(&p, z, nu, 1e-10));
    }
}
