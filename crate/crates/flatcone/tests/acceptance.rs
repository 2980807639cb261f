//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its runtime. Run with `cargo test -p flatcone --test acceptance --
//! --nocapture` to see the lines.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};

use flatcone::chains::{cone_angle_bounds, Chain, ChainAngle, ChainInvariants};
use flatcone::fixtures;
use flatcone::geodesic::{density_profile, trace, DirectedPoint};
use flatcone::holonomy::{cone_loop, generating_loops, is_quadratic_differential_metric, transport};
use flatcone::saddle::{enumerate_saddle_connections, SaddleOptions};
use flatcone::spectrum::{compare_spectra, geodesic_length, CurveWord};
use flatcone::surface::Crossing;
use flatcone::{BuildOptions, FlatConeSurface, PlanePoint};

fn fixture_surface(name: &str, options: BuildOptions) -> FlatConeSurface {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    let text = std::fs::read_to_string(&path).expect("fixture file");
    FlatConeSurface::from_json(&text, options).expect("fixture builds")
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    start: Instant,
}

impl Criterion {
    fn new(name: &'static str, limit_secs: f64) -> Criterion {
        Criterion {
            name,
            limit: Duration::from_secs_f64(limit_secs),
            start: Instant::now(),
        }
    }

    fn pass(self) {
        let elapsed = self.start.elapsed();
        println!(
            "acceptance {}: PASS in {:.1} ms (limit {:?})",
            self.name,
            elapsed.as_secs_f64() * 1e3,
            self.limit
        );
        assert!(
            elapsed <= self.limit,
            "{} exceeded its runtime limit: {:?} > {:?}",
            self.name,
            elapsed,
            self.limit
        );
    }
}

/// 1. For theta = 5 pi/2 the sweep count matches R(n) = 5n/2 (n even),
///    (5n+1)/2 (n odd) exactly for n = 1..200, and the periodic invariants
///    are k = 5, n = 3.
#[test]
fn criterion_1_chain_example_fidelity() {
    let c = Criterion::new("1 (chain example fidelity)", 1.0);
    let chain = Chain::rational(5, 2, 0.37).unwrap();
    for n in 1..=200u64 {
        // Deliberately spelled as the independent formula, not div_ceil.
        #[allow(clippy::manual_div_ceil)]
        let want = if n % 2 == 0 { 5 * n / 2 } else { (5 * n + 1) / 2 };
        assert_eq!(chain.sweep_count(n), want, "R({n})");
    }
    assert_eq!(chain.invariants(), ChainInvariants::Periodic { k: 5, n: 3 });
    c.pass();
}

/// 2. For 10^3 sampled theta in [2 pi, 10 pi] the interval
///    [R(n) pi/n - pi/n, R(n) pi/n] contains theta for all n <= 100, with
///    width exactly pi/n (exact rational arithmetic).
#[test]
fn criterion_2_cone_angle_bound_convergence() {
    let c = Criterion::new("2 (cone-angle bound convergence)", 5.0);
    for i in 0..1000i64 {
        let theta = Ratio::new(2000 + 8 * i, 1000);
        let chain = Chain::new(ChainAngle::RationalPi(theta), 0.0).unwrap();
        for n in 1..=100u64 {
            let b = cone_angle_bounds(chain.sweep_count(n), n);
            assert!(b.contains_exact(theta), "theta = {theta} pi, n = {n}");
            assert_eq!(
                b.upper_pi.ratio() - b.lower_pi.ratio(),
                Ratio::new(1, n as i64),
                "width at n = {n}"
            );
        }
    }
    c.pass();
}

/// 3. Gauss-Bonnet: the octagon fixture has one cone point of angle exactly
///    6 pi and satisfies sum(2 pi - theta) = 2 pi chi with chi = -2 in exact
///    arithmetic; the torus fixture has no cone points and chi = 0.
#[test]
fn criterion_3_gauss_bonnet() {
    let c = Criterion::new("3 (Gauss-Bonnet)", 1.0);
    let octagon = fixture_surface("octagon.json", BuildOptions::default());
    assert_eq!(octagon.euler_characteristic(), -2);
    let angles = octagon.cone_angles();
    assert_eq!(angles.len(), 1);
    assert_eq!(angles[0].1.ratio(), Ratio::from_integer(6));
    let mut curvature = Ratio::<i64>::from_integer(0);
    for class in octagon.vertex_classes() {
        curvature += Ratio::from_integer(2) - class.angle.ratio();
    }
    assert_eq!(
        curvature,
        Ratio::from_integer(2 * octagon.euler_characteristic())
    );

    let torus = fixture_surface("torus.json", BuildOptions::default());
    assert_eq!(torus.euler_characteristic(), 0);
    assert!(torus.cone_angles().is_empty());
    c.pass();
}

/// 4. Characterization decision: octagon yes, halftrans yes, badangle no
///    with both an angle witness and a holonomy witness; decisions stable
///    under chart relabeling.
#[test]
fn criterion_4_characterization_decision() {
    let c = Criterion::new("4 (characterization decision)", 1.0);
    let octagon = fixture_surface("octagon.json", BuildOptions::default());
    assert!(is_quadratic_differential_metric(&octagon).is_quadratic_differential);

    let halftrans = fixture_surface("halftrans.json", BuildOptions::default());
    assert!(is_quadratic_differential_metric(&halftrans).is_quadratic_differential);

    let bad = fixture_surface("badangle.json", BuildOptions::default());
    let decision = is_quadratic_differential_metric(&bad);
    assert!(!decision.is_quadratic_differential);
    assert!(!decision.angle.witnesses.is_empty(), "angle witness");
    assert!(!decision.holonomy.witnesses.is_empty(), "holonomy witness");

    // Relabel charts and reorder gluings: same decisions.
    for (surface, expected) in [("octagon.json", true), ("badangle.json", false)] {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("../../fixtures")
            .join(surface);
        let mut file: flatcone::SurfaceFile =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        for p in &mut file.polygons {
            p.id = 1000 - p.id;
        }
        for g in &mut file.gluings {
            g.from.0 = 1000 - g.from.0;
            g.to.0 = 1000 - g.to.0;
        }
        file.polygons.reverse();
        file.gluings.reverse();
        let relabeled = file.build(BuildOptions::default()).unwrap();
        assert_eq!(
            is_quadratic_differential_metric(&relabeled).is_quadratic_differential,
            expected,
            "{surface} relabeled"
        );
    }
    c.pass();
}

/// 5. Saddle-connection oracle: enumeration on the marked torus up to
///    length 10 equals the brute-force primitive-lattice-vector oracle
///    exactly (count and multiset of lengths).
#[test]
fn criterion_5_saddle_connection_oracle() {
    let c = Criterion::new("5 (saddle-connection oracle)", 10.0);
    let torus = fixture_surface("torus.json", BuildOptions::with_marked_points());
    let conns = enumerate_saddle_connections(&torus, 10.0, &SaddleOptions::default()).unwrap();

    let mut oracle: Vec<(i64, i64)> = Vec::new();
    for p in -10i64..=10 {
        for q in -10i64..=10 {
            if (p, q) == (0, 0) || num_integer::gcd(p.abs(), q.abs()) != 1 {
                continue;
            }
            if ((p * p + q * q) as f64).sqrt() > 10.0 {
                continue;
            }
            if (p, q) <= (-p, -q) {
                oracle.push((p, q));
            }
        }
    }
    assert_eq!(conns.len(), oracle.len(), "connection count");

    let mut got: Vec<(i64, i64)> = conns
        .iter()
        .map(|conn| {
            let p = conn.displacement.x.round() as i64;
            let q = conn.displacement.y.round() as i64;
            assert!((conn.displacement.x - p as f64).abs() < 1e-9);
            assert!((conn.displacement.y - q as f64).abs() < 1e-9);
            assert!((conn.length - ((p * p + q * q) as f64).sqrt()).abs() < 1e-9);
            if (p, q) <= (-p, -q) {
                (p, q)
            } else {
                (-p, -q)
            }
        })
        .collect();
    got.sort();
    oracle.sort();
    assert_eq!(got, oracle, "displacement multiset");
    c.pass();
}

/// 6. Spectrum oracle: flat-torus lengths equal sqrt(p^2 + q^2) for all
///    winding pairs |p|, |q| <= 5 within relative 1e-9; scaling the octagon
///    by 1.5 scales every spectrum entry by 1.5 within relative 1e-9.
#[test]
fn criterion_6_spectrum_oracle() {
    let c = Criterion::new("6 (spectrum oracle)", 10.0);
    let torus = fixture_surface("torus.json", BuildOptions::default());
    for p in -5i64..=5 {
        for q in -5i64..=5 {
            if p == 0 && q == 0 {
                continue;
            }
            let mut crossings = Vec::new();
            for _ in 0..p.abs() {
                crossings.push(Crossing::new(1, p > 0));
            }
            for _ in 0..q.abs() {
                crossings.push(Crossing::new(0, q < 0));
            }
            let entry = geodesic_length(&torus, &CurveWord::new(crossings)).unwrap();
            let want = ((p * p + q * q) as f64).sqrt();
            assert!(
                (entry.length - want).abs() <= 1e-9 * want,
                "({p},{q}): {} vs {want}",
                entry.length
            );
        }
    }

    let octagon = fixture_surface("octagon.json", BuildOptions::default());
    let scaled = fixtures::build_octagon_scaled(1.5);
    let words: Vec<CurveWord> = (0..4)
        .map(|g| CurveWord::new(vec![Crossing::new(g, true)]))
        .chain([
            CurveWord::new(vec![Crossing::new(0, true), Crossing::new(1, true)]),
            CurveWord::new(vec![Crossing::new(0, true), Crossing::new(2, false)]),
        ])
        .collect();
    let report = compare_spectra(&octagon, &scaled, &words).unwrap();
    for entry in &report.entries {
        let ratio = entry.length_b / entry.length_a;
        assert!(
            (ratio - 1.5).abs() <= 1.5 * 1e-9,
            "word {}: ratio {ratio}",
            entry.word
        );
    }
    c.pass();
}

/// 7. Geodesic-flow reversibility: 10^3 seeded random traces on the octagon
///    return to the start within 10 epsilon in position with the reflected
///    direction when traced backwards.
#[test]
fn criterion_7_reversibility() {
    let c = Criterion::new("7 (geodesic-flow reversibility)", 10.0);
    let octagon = fixture_surface("octagon.json", BuildOptions::default());
    let eps = 10.0 * octagon.epsilon();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let radius = octagon.chart_vertices(0)[0].norm();
    let mut done = 0;
    while done < 1000 {
        let x = rng.random_range(-radius..radius);
        let y = rng.random_range(-radius..radius);
        let p = PlanePoint::new(x, y);
        if !octagon.point_in_chart(0, p) {
            continue;
        }
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let start = DirectedPoint::new(0, p, PlanePoint::from_angle(angle));
        let forward = trace(&octagon, start, 5.0).expect("forward trace");
        let back = trace(&octagon, forward.end().reversed(), forward.length)
            .expect("backward trace");
        let end = back.end();
        assert_eq!(end.chart, start.chart);
        assert!(
            end.position.dist(start.position) <= eps,
            "position drift {}",
            end.position.dist(start.position)
        );
        assert!(
            (end.direction + start.direction).norm() <= eps,
            "direction drift"
        );
        done += 1;
    }
    c.pass();
}

/// 8. Density statistic: the golden-ratio direction covers 100% of a 32x32
///    grid on the torus within total length 10^4; slope 0 covers exactly one
///    row.
#[test]
fn criterion_8_density_statistic() {
    let c = Criterion::new("8 (density statistic)", 5.0);
    let torus = fixture_surface("torus.json", BuildOptions::default());
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    let start = DirectedPoint::new(
        0,
        PlanePoint::new(0.123, 0.456),
        PlanePoint::new(1.0, golden),
    );
    let coverage = density_profile(&torus, start, 1e4, 32).unwrap();
    assert_eq!(coverage, 1.0, "golden-ratio coverage");

    let start = DirectedPoint::new(
        0,
        PlanePoint::new(0.123, 0.456),
        PlanePoint::new(1.0, 0.0),
    );
    let coverage = density_profile(&torus, start, 1e4, 32).unwrap();
    assert!(
        (coverage - 1.0 / 32.0).abs() < 1e-12,
        "horizontal coverage {coverage}"
    );
    c.pass();
}

/// 9. Holonomy algebra: transport of loop·loop^{-1} is 0 and cone-encircling
///    loops return theta mod 2 pi exactly, over all fixtures.
#[test]
fn criterion_9_holonomy_algebra() {
    let c = Criterion::new("9 (holonomy algebra)", 1.0);
    let names = [
        "torus.json",
        "octagon.json",
        "l_shape.json",
        "halftrans.json",
        "badangle.json",
    ];
    for name in names {
        let surface = fixture_surface(name, BuildOptions::default());
        for lp in generating_loops(&surface) {
            let prod = lp.concat(&lp.inverse());
            assert!(
                transport(&surface, &prod).unwrap().is_zero(),
                "{name}: loop . loop^-1"
            );
        }
        for cone in surface.cone_points() {
            let lp = cone_loop(&surface, cone.id);
            assert_eq!(
                transport(&surface, &lp).unwrap(),
                cone.angle.mod_two_pi(),
                "{name}: cone {} encircling loop",
                cone.id
            );
        }
    }
    c.pass();
}
