use lightcone::analyzer::{
    fit_cone_vertex, induced_sphere_map, sample_coherent_pair, SphereMesh, VertexFitConfig,
};
use lightcone::degenerate::build_default;
use lightcone::hermitian::{
    event_to_herm, herm_to_event, rank2, standard_preserver, trace_degenerate_preserver,
    Complex2x2, Herm2, Sign, StandardPreserver,
};
use lightcone::quadratic::{collinear, is_coherent, project_to_section, CoherentLine};
use lightcone::seeds::{random_direction, uniform, uniform_event, SeedStream};
use lightcone::transforms::{
    decompose_similarity, fit_affine, random_similarity, SimilarityBounds,
};
use lightcone::{
    Direction, Event32, Event64, PoincareSimilarity32, TolerancePolicy32, TolerancePolicy64,
};
use proptest::prelude::*;

fn event4(range: f64) -> impl Strategy<Value = Event64> {
    prop::array::uniform4(-range..range).prop_map(|c| Event64::new(&c).unwrap())
}

fn direction4() -> impl Strategy<Value = Direction<f64>> {
    prop::array::uniform3(-1.0..1.0f64)
        .prop_filter("nonzero spatial part", |s| {
            s.iter().map(|x| x * x).sum::<f64>() > 1e-6
        })
        .prop_map(|s| Direction::from_spatial(&s).unwrap())
}

proptest! {
    #[test]
    fn q_is_even_and_coherence_symmetric(x in event4(50.0), y in event4(50.0)) {
        let tol = TolerancePolicy64::default();
        prop_assert_eq!((x - y).q(), (y - x).q());
        prop_assert_eq!(is_coherent(&x, &y, &tol), is_coherent(&y, &x, &tol));
        prop_assert!(is_coherent(&x, &x, &tol));
    }

    #[test]
    fn projection_inverts_line_construction(a in event4(20.0), p in direction4(), t in -20.0..20.0f64) {
        prop_assume!(t.abs() > 1e-3);
        let m = a + *p.as_event() * t;
        let back = project_to_section(&a, &m, &TolerancePolicy64::default()).unwrap();
        for (x, y) in back.as_event().coords().iter().zip(p.as_event().coords()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn points_on_a_coherent_line_are_collinear(a in event4(20.0), p in direction4(), s in -5.0..5.0f64, t in -5.0..5.0f64) {
        let line = CoherentLine::new(a, p).unwrap();
        prop_assert!(collinear(&line.point(0.0), &line.point(s), &line.point(t), &TolerancePolicy64::default()));
    }

    #[test]
    fn herm_round_trip(r in event4(100.0)) {
        let h = event_to_herm(&r).unwrap();
        let back = herm_to_event(&h);
        for (x, y) in back.coords().iter().zip(r.coords()) {
            prop_assert!((x - y).abs() <= 1e-13 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn similarity_scales_q(seed in any::<u64>(), r1 in event4(10.0), r2 in event4(10.0)) {
        let ps = random_similarity::<f64>(seed, 4, &SimilarityBounds::default()).unwrap();
        let lhs = (ps.apply(&r1) - ps.apply(&r2)).q();
        let rhs = ps.k * ps.k * (r1 - r2).q();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + (r1 - r2).norm_sq()) * ps.k * ps.k);
    }

    #[test]
    fn composition_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), r in event4(10.0)) {
        let b = SimilarityBounds::default();
        let (f, g, h) = (
            random_similarity::<f64>(s1, 4, &b).unwrap(),
            random_similarity::<f64>(s2, 4, &b).unwrap(),
            random_similarity::<f64>(s3, 4, &b).unwrap(),
        );
        let left = f.compose(&g).compose(&h).apply(&r);
        let right = f.compose(&g.compose(&h)).apply(&r);
        prop_assert!((left - right).norm() <= 1e-9 * (1.0 + left.norm()));
        let id = f.compose(&f.invert()).apply(&r);
        prop_assert!((id - r).norm() <= 1e-9 * (1.0 + r.norm()));
    }
}

#[test]
fn pairwise_coherent_triples_from_two_directions_are_collinear() {
    // a, b = a + s p1, c = a + t p2: b and c are coherent only when p1 = p2
    let tol = TolerancePolicy64::default();
    let stream = SeedStream::new(21);
    let mut found = 0;
    for i in 0..100_000 {
        let mut rng = stream.rng(i);
        let a = uniform_event::<f64, _>(&mut rng, 4, 10.0).unwrap();
        let p1 = random_direction::<f64, _>(&mut rng, 4).unwrap();
        let p2 = random_direction::<f64, _>(&mut rng, 4).unwrap();
        let s: f64 = uniform(&mut rng, -5.0, 5.0);
        let t: f64 = uniform(&mut rng, -5.0, 5.0);
        let (b, c) = (a + *p1.as_event() * s, a + *p2.as_event() * t);
        if is_coherent(&b, &c, &tol) && !collinear(&a, &b, &c, &tol) {
            found += 1;
        }
    }
    assert_eq!(found, 0);
}

#[test]
fn sampled_pairs_meet_the_construction_bound() {
    let stream = SeedStream::new(22);
    let scale = 10.0;
    for i in 0..100_000 {
        let (r1, r2) = sample_coherent_pair::<f64, _>(&mut stream.rng(i), 4, scale).unwrap();
        assert!((r1 - r2).q().abs() <= 1e-10 * scale * scale);
    }
}

#[test]
fn adjacency_matches_rank_one() {
    let tol = TolerancePolicy64::default();
    let stream = SeedStream::new(23);
    for i in 0..10_000 {
        let mut rng = stream.rng(i);
        let (a, b) = sample_coherent_pair::<f64, _>(&mut rng, 4, 10.0).unwrap();
        let c = uniform_event::<f64, _>(&mut rng, 4, 10.0).unwrap();
        let rank = |x: &Event64, y: &Event64| {
            rank2(
                &(event_to_herm(x).unwrap() - event_to_herm(y).unwrap()),
                &tol,
            )
        };
        assert_eq!(rank(&a, &b), 1);
        assert_eq!(rank(&a, &c), 2);
        assert_eq!(rank(&a, &a), 0);
    }
}

fn random_complex(rng: &mut impl rand::Rng) -> Complex2x2<f64> {
    let mut re = [0.0; 8];
    for x in &mut re {
        *x = uniform(rng, -2.0, 2.0);
    }
    Complex2x2::from_reals(re)
}

fn random_herm(rng: &mut impl rand::Rng) -> Herm2<f64> {
    event_to_herm(&uniform_event::<f64, _>(rng, 4, 3.0).unwrap()).unwrap()
}

#[test]
fn standard_preservers_keep_adjacency() {
    let stream = SeedStream::new(24);
    for i in 0..10_000 {
        let mut rng = stream.rng(i);
        let t = random_complex(&mut rng);
        if t.det().norm_sq() < 1e-2 {
            continue;
        }
        let s = random_herm(&mut rng);
        let sign = if i % 2 == 0 { Sign::Plus } else { Sign::Minus };
        let (a, b) = sample_coherent_pair::<f64, _>(&mut rng, 4, 5.0).unwrap();
        let (ha, hb) = (event_to_herm(&a).unwrap(), event_to_herm(&b).unwrap());
        let fa = standard_preserver(sign, &t, &s, i % 3 == 0, &ha).unwrap();
        let fb = standard_preserver(sign, &t, &s, i % 3 == 0, &hb).unwrap();
        // the image scale grows with |T|^2, so compare relative to the image size
        let d = fa - fb;
        let big = d.max_abs_entry().max(1.0);
        let rel = TolerancePolicy64::new(1e-9 * big).unwrap();
        assert_eq!(rank2(&d, &rel), 1, "pair {i}");
    }
}

#[test]
fn trace_preserver_keeps_adjacency() {
    let tol = TolerancePolicy64::default();
    let stream = SeedStream::new(25);
    let r = Herm2::diag(1.0, 0.0);
    for i in 0..10_000 {
        let mut rng = stream.rng(i);
        let s = random_herm(&mut rng);
        let (a, b) = sample_coherent_pair::<f64, _>(&mut rng, 4, 5.0).unwrap();
        let fa = trace_degenerate_preserver(&r, &s, &event_to_herm(&a).unwrap(), &tol).unwrap();
        let fb = trace_degenerate_preserver(&r, &s, &event_to_herm(&b).unwrap(), &tol).unwrap();
        assert_eq!(rank2(&(fa - fb), &tol), 1, "pair {i}");
    }
}

#[test]
fn standard_preservers_pull_back_to_similarities() {
    let stream = SeedStream::new(26);
    for i in 0..100 {
        let mut rng = stream.rng(i);
        let t = random_complex(&mut rng);
        if t.det().norm_sq() < 1e-2 {
            continue;
        }
        let sign = if i % 2 == 0 { Sign::Plus } else { Sign::Minus };
        let sp = StandardPreserver::new(sign, t, random_herm(&mut rng), i % 3 == 0).unwrap();
        let am = sp.to_affine();
        let ps = decompose_similarity(&am, 1e-9).expect("pullback is a similarity");
        let r = uniform_event::<f64, _>(&mut rng, 4, 5.0).unwrap();
        let direct = herm_to_event(&sp.apply(&event_to_herm(&r).unwrap()));
        assert!((ps.apply(&r) - direct).norm() <= 1e-9 * (1.0 + direct.norm()));
    }
}

#[test]
fn degenerate_eval_stays_in_the_cone_and_is_lipschitz() {
    let tol = TolerancePolicy64::default();
    let vertex = Event64::new(&[1.0, 2.0, -1.0, 0.5]).unwrap();
    let spec = build_default(6, 0.2, vertex, 27).unwrap();
    let lip = spec.lipschitz_bound();
    let stream = SeedStream::new(27);
    for i in 0..100_000 {
        let mut rng = stream.rng(i);
        // half the samples land near a patch so the bumps are exercised
        let r = if i % 2 == 0 {
            let j = (i / 2) as usize % 6;
            spec.patches[j].center + uniform_event::<f64, _>(&mut rng, 4, 0.15).unwrap()
        } else {
            uniform_event::<f64, _>(&mut rng, 4, 10.0).unwrap()
        };
        let y = spec.eval(&r).unwrap();
        assert!(tol.is_null(&(y - vertex)));
        let delta = uniform_event::<f64, _>(&mut rng, 4, 0.01).unwrap();
        let y2 = spec.eval(&(r + delta)).unwrap();
        assert!((y2 - y).norm() <= lip * delta.norm() * (1.0 + 1e-12) + 1e-15);
    }
}

#[test]
fn degenerate_outputs_are_not_affine() {
    let spec = build_default(3, 0.2, Event64::zero(4).unwrap(), 28).unwrap();
    let stream = SeedStream::new(28);
    let samples: Vec<_> = (0..512)
        .map(|i| {
            let j = i as usize % 3;
            let r = spec.patches[j].center
                + uniform_event::<f64, _>(&mut stream.rng(i), 4, 0.2).unwrap();
            (r, spec.eval(&r).unwrap())
        })
        .collect();
    let (_, residual) = fit_affine(&samples).unwrap();
    assert!(residual > 1e-6, "residual {residual}");
}

#[test]
fn cone_fit_on_patch_outputs_recovers_vertex() {
    let vertex = Event64::new(&[-3.0, 1.0, 2.0, 4.0]).unwrap();
    let spec = build_default(5, 0.2, vertex, 29).unwrap();
    let stream = SeedStream::new(29);
    let outputs: Vec<Event64> = (0..400)
        .map(|i| {
            let j = i as usize % 5;
            let r = spec.patches[j].center
                + uniform_event::<f64, _>(&mut stream.rng(i), 4, 0.1).unwrap();
            spec.eval(&r).unwrap()
        })
        .collect();
    let (v, residual) = fit_cone_vertex(&outputs, &VertexFitConfig::default()).unwrap();
    assert!(v.distance(&vertex) <= 1e-6, "{v:?}");
    assert!(residual <= 1e-9);

    let ps = random_similarity::<f64>(30, 4, &SimilarityBounds::default()).unwrap();
    let images: Vec<Event64> = (0..400)
        .map(|i| ps.apply(&uniform_event::<f64, _>(&mut stream.rng(1000 + i), 4, 10.0).unwrap()))
        .collect();
    if let Ok((_, residual)) = fit_cone_vertex(&images, &VertexFitConfig::default()) {
        assert!(residual > 1e-6);
    }
}

#[test]
fn induced_map_of_a_similarity_ignores_the_base_point() {
    let tol = TolerancePolicy64::default();
    let mesh = SphereMesh::icosphere(3);
    let ps = random_similarity::<f64>(31, 4, &SimilarityBounds::default()).unwrap();
    let stream = SeedStream::new(31);
    let origin = Event64::zero(4).unwrap();
    let dirs: Vec<Direction<f64>> = mesh
        .vertices
        .iter()
        .map(|v| Direction::from_spatial(v).unwrap())
        .collect();
    let reference: Vec<_> = dirs
        .iter()
        .map(|p| induced_sphere_map(&ps, &origin, p, &tol).unwrap())
        .collect();
    for k in 0..10 {
        let a = uniform_event::<f64, _>(&mut stream.rng(k), 4, 10.0).unwrap();
        for (p, want) in dirs.iter().zip(&reference) {
            let got = induced_sphere_map(&ps, &a, p, &tol).unwrap();
            assert!(got.as_event().distance(want.as_event()) <= 1e-9);
        }
    }
}

#[test]
fn single_precision_similarity() {
    let tol = TolerancePolicy32::default();
    let ps: PoincareSimilarity32 = random_similarity(32, 4, &SimilarityBounds::default()).unwrap();
    let stream = SeedStream::new(32);
    for i in 0..1000 {
        let (r1, r2): (Event32, Event32) =
            sample_coherent_pair(&mut stream.rng(i), 4, 10.0).unwrap();
        assert!(tol.is_null(&(ps.apply(&r1) - ps.apply(&r2))));
    }
}
