//! Property tests over randomized inputs.

use proptest::prelude::*;

use flatcone::chains::{cone_angle_bounds, Chain};
use flatcone::fixtures;
use flatcone::geodesic::{trace, DirectedPoint, Terminal};
use flatcone::rotation::{RationalAngle, RotationClass};
use flatcone::saddle::{enumerate_saddle_connections, SaddleOptions};
use flatcone::spectrum::{geodesic_length, CurveWord};
use flatcone::surface::Crossing;
use flatcone::{Isometry, PlanePoint};

proptest! {
    #[test]
    fn rotation_class_normalizes_into_zero_two_pi(num in -1000i64..1000, den in 1i64..60) {
        let r = RotationClass::new(num, den);
        let x = r.numer() as f64 / r.denom() as f64;
        prop_assert!((0.0..2.0).contains(&x));
        prop_assert_eq!(num_integer::gcd(r.numer().abs(), r.denom()), 1);
        // Composing with the inverse is always the identity rotation.
        prop_assert!(r.compose(r.inverse()).is_zero());
    }

    #[test]
    fn isometries_invert_exactly(
        num in -8i64..8, den in 1i64..6,
        tx in -5.0f64..5.0, ty in -5.0f64..5.0,
        px in -5.0f64..5.0, py in -5.0f64..5.0,
    ) {
        let g = Isometry::new(RationalAngle::new(num, den), PlanePoint::new(tx, ty));
        let p = PlanePoint::new(px, py);
        prop_assert!(g.inverse().apply(g.apply(p)).dist(p) < 1e-10);
        prop_assert!(g.compose(&g.inverse()).is_identity(1e-10));
    }

    #[test]
    fn sweep_counts_dominate_two_n_and_bracket_theta(p in 2i64..40, q in 1i64..12, n in 1u64..80) {
        prop_assume!(p >= 2 * q);
        let chain = Chain::rational(p, q, 0.3).unwrap();
        let r = chain.sweep_count(n);
        prop_assert!(r >= 2 * n);
        prop_assert!(chain.sweep_count(n + 1) >= r);
        let b = cone_angle_bounds(r, n);
        prop_assert!(b.contains_exact(num_rational::Ratio::new(p, q)));
    }

    #[test]
    fn torus_traces_reverse_to_start(
        x in 0.05f64..0.95, y in 0.05f64..0.95,
        angle in 0.0f64..std::f64::consts::TAU,
        length in 0.1f64..30.0,
    ) {
        let s = fixtures::build_torus();
        let start = DirectedPoint::new(0, PlanePoint::new(x, y), PlanePoint::from_angle(angle));
        let fwd = trace(&s, start, length).unwrap();
        prop_assert!(matches!(fwd.terminal, Terminal::LengthReached));
        let back = trace(&s, fwd.end().reversed(), fwd.length).unwrap();
        let end = back.end();
        prop_assert!(end.position.dist(start.position) <= 10.0 * s.epsilon());
        prop_assert!((end.direction + start.direction).norm() <= 10.0 * s.epsilon());
    }

    #[test]
    fn split_traces_compose(
        x in 0.05f64..0.95, y in 0.05f64..0.95,
        angle in 0.0f64..std::f64::consts::TAU,
        length in 0.2f64..20.0, cut in 0.05f64..0.95,
    ) {
        // Tracing in one go and tracing in two pieces agree: length is
        // chart-independent bookkeeping.
        let s = fixtures::build_torus();
        let start = DirectedPoint::new(0, PlanePoint::new(x, y), PlanePoint::from_angle(angle));
        let whole = trace(&s, start, length).unwrap();
        let first = trace(&s, start, length * cut).unwrap();
        let rest = trace(&s, first.end(), length * (1.0 - cut)).unwrap();
        prop_assert!((first.length + rest.length - whole.length).abs() <= 10.0 * s.epsilon());
        let a = whole.end();
        let b = rest.end();
        prop_assert!(a.position.dist(b.position) <= 10.0 * s.epsilon());
        prop_assert!((a.direction - b.direction).norm() <= 10.0 * s.epsilon());
    }

    #[test]
    fn torus_word_length_invariant_under_rotation(
        p in -4i64..=4, q in -4i64..=4, k in 0usize..8,
    ) {
        prop_assume!(p != 0 || q != 0);
        let s = fixtures::build_torus();
        let mut crossings = Vec::new();
        for _ in 0..p.abs() {
            crossings.push(Crossing::new(1, p > 0));
        }
        for _ in 0..q.abs() {
            crossings.push(Crossing::new(0, q < 0));
        }
        let w = CurveWord::new(crossings);
        let base = geodesic_length(&s, &w).unwrap().length;
        let rotated = geodesic_length(&s, &w.rotated(k)).unwrap().length;
        let reversed = geodesic_length(&s, &w.inverse()).unwrap().length;
        prop_assert!((base - rotated).abs() <= 1e-9 * base.max(1.0));
        prop_assert!((base - reversed).abs() <= 1e-9 * base.max(1.0));
        let want = ((p * p + q * q) as f64).sqrt();
        prop_assert!((base - want).abs() <= 1e-9 * want);
    }
}

#[test]
fn saddle_enumeration_matches_lattice_oracle_for_small_bounds() {
    let s = fixtures::build_marked_torus();
    for bound in [1.0, 1.5, 2.2, 3.0, 4.5] {
        let conns = enumerate_saddle_connections(&s, bound, &SaddleOptions::default()).unwrap();
        let mut count = 0;
        let m = bound.ceil() as i64;
        for p in -m..=m {
            for q in -m..=m {
                if (p, q) == (0, 0) || num_integer::gcd(p.abs(), q.abs()) != 1 {
                    continue;
                }
                if ((p * p + q * q) as f64).sqrt() <= bound && (p, q) <= (-p, -q) {
                    count += 1;
                }
            }
        }
        assert_eq!(conns.len(), count, "bound {bound}");
    }
}
