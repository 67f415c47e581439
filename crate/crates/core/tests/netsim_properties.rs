use ddoec::netsim::{
    inject_position_error, path_loss_db, sample_ppp, schedule_in_order, snapshot_kpis, CopPoint, Deployment, Flavor,
    Point2D, RadioParams, SimParams,
};
use ddoec::rng::SeedTree;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn deployment(seed: u64, n_dbs: f64, n_ue: f64, r_er: f64) -> Deployment {
    let mut rng = SeedTree::root(seed).rng();
    let area = 250_000.0;
    let dbs = sample_ppp(n_dbs / area, area, &mut rng).unwrap();
    let ues = sample_ppp(n_ue / area, area, &mut rng).unwrap();
    Deployment {
        dbs: inject_position_error(&dbs, r_er, &mut rng).unwrap(),
        ues: inject_position_error(&ues, r_er, &mut rng).unwrap(),
        area_m2: area,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schedule_invariants(seed in 0u64..10_000, r_sz in 5.0f64..60.0, n_dbs in 5.0f64..400.0) {
        let dep = deployment(seed, n_dbs, 150.0, 15.0);
        let mut order: Vec<usize> = (0..dep.ues.len()).collect();
        order.shuffle(&mut SeedTree::root(seed ^ 1).rng());
        let s = schedule_in_order(&dep, r_sz, 1.0, &order);
        let served: Vec<usize> = s.served.iter().map(|p| p.0).collect();
        for (i, &a) in served.iter().enumerate() {
            for &b in &served[i + 1..] {
                prop_assert!(dep.ues[a].perceived.dist(&dep.ues[b].perceived) > 2.0 * r_sz);
            }
        }
        let mut used: Vec<usize> = s.served.iter().map(|p| p.1).collect();
        used.sort_unstable();
        used.dedup();
        prop_assert_eq!(used.len(), s.served.len());
        for &(u, d) in &s.served {
            prop_assert!(dep.ues[u].perceived.dist(&dep.dbs[d].perceived) <= r_sz);
        }
        prop_assert_eq!(s.scheduled() + s.deferred, dep.ues.len());
    }

    #[test]
    fn scheduled_count_shrinks_with_zone_radius(seed in 0u64..10_000, r in 5.0f64..40.0, dr in 0.0f64..30.0) {
        let dep = deployment(seed, 100.0, 200.0, 0.0);
        let mut order: Vec<usize> = (0..dep.ues.len()).collect();
        order.shuffle(&mut SeedTree::root(seed).rng());
        let small = schedule_in_order(&dep, r, 1.0, &order).scheduled();
        let large = schedule_in_order(&dep, r + dr, 1.0, &order).scheduled();
        prop_assert!(large <= small);
    }

    #[test]
    fn ee_identity_on_random_snapshots(seed in 0u64..100_000, l in 0.0005f64..0.0125, r in 10.0f64..50.0, p in 15.0f64..30.0) {
        let sim = SimParams { area_m2: 160_000.0, ..Default::default() };
        let cop = CopPoint::new(l, r, p);
        let streams = SeedTree::root(seed);
        let dep = Deployment::sample(&cop, &sim, Flavor::Erroneous, &streams).unwrap();
        let k = snapshot_kpis(&dep, &cop, &sim, &streams).unwrap();
        prop_assert!(k.ase >= 0.0 && k.ee >= 0.0);
        let rhs = sim.area_m2 * k.ase;
        prop_assert!((k.ee * k.total_power_w - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn path_gain_monotone(d1 in 0.01f64..5_000.0, f in 1.0001f64..10.0) {
        let rp = RadioParams::default();
        prop_assert!(path_loss_db(d1 * f, &rp).unwrap() < path_loss_db(d1, &rp).unwrap());
    }

    #[test]
    fn error_offsets_bounded(seed in 0u64..10_000, r_er in 0.0f64..50.0) {
        let pts: Vec<Point2D> = (0..50).map(|i| Point2D { x: i as f64, y: 2.0 * i as f64 }).collect();
        let nodes = inject_position_error(&pts, r_er, &mut SeedTree::root(seed).rng()).unwrap();
        for (n, p) in nodes.iter().zip(&pts) {
            prop_assert_eq!(n.perceived, *p);
            prop_assert!(n.actual.dist(&n.perceived) <= r_er + 1e-12);
        }
    }
}
