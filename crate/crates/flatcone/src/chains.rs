//! Chains at a cone point: sweep counts, cone-angle bounds, and periodic
//! invariants.
//!
//! A chain at a cone point of total angle theta is the sequence of
//! directions `phi_i = (phi_0 + i pi) mod theta`. A point sweeping
//! counterclockwise meets the chain's m-th direction at cumulative sweep
//! `m pi`, and passes the base direction at every multiple of theta; the
//! sweep count `R(n)` is the index of the first chain direction met at or
//! after the n-th pass, which works out to `ceil(n theta / pi)`. The bounds
//! `R(n) pi / n - pi / n <= theta <= R(n) pi / n` recover the cone angle.

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::rotation::RationalAngle;
use crate::surface::FlatConeSurface;

/// Tolerance for the approximate (aperiodic) interlacing decision, radians.
pub const DELTA_CHAIN: f64 = 1e-3;
/// Window length for the approximate interlacing decision.
pub const N_CHAIN: usize = 10_000;

/// The cone angle of a chain: exact rational multiple of pi when available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainAngle {
    RationalPi(Ratio<i64>),
    Radians(f64),
}

impl ChainAngle {
    pub fn radians(&self) -> f64 {
        match self {
            ChainAngle::RationalPi(r) => {
                (*r.numer() as f64 / *r.denom() as f64) * std::f64::consts::PI
            }
            ChainAngle::Radians(t) => *t,
        }
    }

    pub fn rational(&self) -> Option<Ratio<i64>> {
        match self {
            ChainAngle::RationalPi(r) => Some(*r),
            ChainAngle::Radians(_) => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("cone angle {0} is below 2 pi; chains require a nonpositively curved cone")]
    ThetaTooSmall(f64),
    #[error("cone angle must be finite and positive, got {0}")]
    BadTheta(f64),
    #[error("cone point {0} does not exist")]
    NoSuchConePoint(usize),
}

/// A chain of directions at a cone point: `phi_i = (phi_0 + i pi) mod theta`.
#[derive(Debug, Clone)]
pub struct Chain {
    pub theta: ChainAngle,
    pub phi0: f64,
}

impl Chain {
    pub fn new(theta: ChainAngle, phi0: f64) -> Result<Chain, ChainError> {
        let t = theta.radians();
        if !t.is_finite() || t <= 0.0 {
            return Err(ChainError::BadTheta(t));
        }
        if t < 2.0 * std::f64::consts::PI - 1e-12 {
            return Err(ChainError::ThetaTooSmall(t));
        }
        Ok(Chain {
            theta,
            phi0: phi0.rem_euclid(t),
        })
    }

    pub fn rational(num: i64, den: i64, phi0: f64) -> Result<Chain, ChainError> {
        Chain::new(ChainAngle::RationalPi(Ratio::new(num, den)), phi0)
    }

    pub fn radians(theta: f64, phi0: f64) -> Result<Chain, ChainError> {
        Chain::new(ChainAngle::Radians(theta), phi0)
    }

    /// Direction of the i-th chain point, in `[0, theta)`.
    pub fn direction(&self, i: u64) -> f64 {
        let t = self.theta.radians();
        (self.phi0 + i as f64 * std::f64::consts::PI).rem_euclid(t)
    }

    /// `R(n)`: the index of the first chain point met at or after the n-th
    /// counterclockwise pass through the base direction, `ceil(n theta/pi)`.
    pub fn sweep_count(&self, n: u64) -> u64 {
        assert!(n >= 1, "sweep count needs n >= 1");
        match self.theta {
            ChainAngle::RationalPi(r) => {
                let num = *r.numer() as i128 * n as i128;
                let den = *r.denom() as i128;
                Integer::div_ceil(&num, &den) as u64
            }
            ChainAngle::Radians(t) => {
                let x = n as f64 * t / std::f64::consts::PI;
                // Snap ties that are only float noise.
                let r = x.round();
                if (x - r).abs() < 1e-9 * (n as f64).max(1.0) {
                    r as u64
                } else {
                    x.ceil() as u64
                }
            }
        }
    }

    /// `R(n)` for `n = 1..=n_max`.
    pub fn sweep_counts(&self, n_max: u64) -> SweepCount {
        SweepCount {
            values: (1..=n_max).map(|n| (n, self.sweep_count(n))).collect(),
        }
    }

    pub fn invariants(&self) -> ChainInvariants {
        chain_invariants(self)
    }
}

/// The sweep-count function `n -> R(n)`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCount {
    pub values: Vec<(u64, u64)>,
}

impl SweepCount {
    pub fn get(&self, n: u64) -> Option<u64> {
        self.values
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, r)| *r)
    }
}

/// The interval `[R(n) pi/n - pi/n, R(n) pi/n]` of width exactly pi/n that
/// contains theta.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AngleInterval {
    pub lower: f64,
    pub upper: f64,
    /// Exact endpoints as fractions of pi.
    pub lower_pi: RationalAngle,
    pub upper_pi: RationalAngle,
}

impl AngleInterval {
    pub fn contains(&self, theta: f64) -> bool {
        self.lower - 1e-12 <= theta && theta <= self.upper + 1e-12
    }

    pub fn contains_exact(&self, theta: Ratio<i64>) -> bool {
        self.lower_pi.ratio() <= theta && theta <= self.upper_pi.ratio()
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Bounds from one sweep count: `(R(n) - 1) pi / n <= theta <= R(n) pi / n`.
pub fn cone_angle_bounds(r_n: u64, n: u64) -> AngleInterval {
    assert!(n >= 1);
    let upper = RationalAngle::new(r_n as i64, n as i64);
    let lower = RationalAngle::new(r_n as i64 - 1, n as i64);
    AngleInterval {
        lower: lower.radians(),
        upper: upper.radians(),
        lower_pi: lower,
        upper_pi: upper,
    }
}

/// Periodicity invariants of a chain. A chain is periodic iff theta is a
/// rational multiple of pi; for `theta = (p/q) pi` in lowest terms it visits
/// `k = p` distinct directions and the counterclockwise neighbor of the base
/// direction is reached after `n = q^{-1} mod p` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainInvariants {
    Periodic { k: u64, n: u64 },
    Aperiodic,
}

impl ChainInvariants {
    pub fn is_periodic(&self) -> bool {
        matches!(self, ChainInvariants::Periodic { .. })
    }
}

pub fn chain_invariants(chain: &Chain) -> ChainInvariants {
    match chain.theta.rational() {
        Some(r) => {
            let p = *r.numer();
            let q = *r.denom();
            ChainInvariants::Periodic {
                k: p as u64,
                n: mod_inverse(q, p) as u64,
            }
        }
        None => ChainInvariants::Aperiodic,
    }
}

/// Multiplicative inverse of `a` mod `m` (gcd(a, m) = 1, m >= 2).
fn mod_inverse(a: i64, m: i64) -> i64 {
    let e = i64::extended_gcd(&a.rem_euclid(m), &m);
    debug_assert_eq!(e.gcd, 1, "inverse needs gcd({a}, {m}) = 1");
    e.x.rem_euclid(m)
}

/// Whether two chains give the same cone point. Periodic chains are
/// perfectly interlaced iff their `(k, n)` invariants agree; a periodic and
/// an aperiodic chain never are; two aperiodic chains are compared by an
/// approximate direction-density test over a finite window.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InterlaceDecision {
    pub interlaced: bool,
    /// True for the aperiodic case, which is decided only to tolerance
    /// `DELTA_CHAIN` over `N_CHAIN` terms.
    pub approximate: bool,
}

pub fn perfectly_interlaced(a: &Chain, b: &Chain) -> InterlaceDecision {
    match (chain_invariants(a), chain_invariants(b)) {
        (
            ChainInvariants::Periodic { k: ka, n: na },
            ChainInvariants::Periodic { k: kb, n: nb },
        ) => InterlaceDecision {
            interlaced: ka == kb && na == nb,
            approximate: false,
        },
        (ChainInvariants::Aperiodic, ChainInvariants::Aperiodic) => {
            let ta = a.theta.radians();
            let tb = b.theta.radians();
            if (ta - tb).abs() > DELTA_CHAIN {
                return InterlaceDecision {
                    interlaced: false,
                    approximate: true,
                };
            }
            // Every direction pair of b must be approximated by consecutive
            // directions of a. Steps agree (both are pi), so it is enough to
            // approximate the base directions of b within the window.
            let mut dirs: Vec<f64> = (0..N_CHAIN as u64).map(|i| a.direction(i)).collect();
            dirs.sort_by(f64::total_cmp);
            let close = |x: f64| -> bool {
                let idx = dirs.partition_point(|&d| d < x);
                let mut best = f64::INFINITY;
                for j in [idx.wrapping_sub(1), idx, idx + 1] {
                    if let Some(&d) = dirs.get(j) {
                        best = best.min((d - x).abs());
                    }
                }
                // Wrap-around neighbors.
                best = best.min((dirs[0] + ta - x).abs());
                best = best.min((x + ta - dirs[dirs.len() - 1]).abs());
                best < DELTA_CHAIN
            };
            let interlaced = (0..64u64).all(|i| close(b.direction(i)));
            InterlaceDecision {
                interlaced,
                approximate: true,
            }
        }
        // Mixed periodicity: never interlaced, by the dichotomy.
        _ => InterlaceDecision {
            interlaced: false,
            approximate: false,
        },
    }
}

/// Build the chain at a concrete cone point and return the bound intervals
/// for `n = 1..=n_max`; every interval brackets the exact cone angle.
pub fn estimate_cone_angle_from_surface(
    surface: &FlatConeSurface,
    cone: usize,
    n_max: u64,
) -> Result<Vec<AngleInterval>, ChainError> {
    if cone >= surface.cone_points().len() {
        return Err(ChainError::NoSuchConePoint(cone));
    }
    let angle = surface.cone_point(cone).angle;
    // Generic base direction; the sweep count does not depend on it.
    let phi0 = 0.137;
    let chain = Chain::new(
        ChainAngle::RationalPi(angle.ratio()),
        phi0,
    )?;
    Ok((1..=n_max)
        .map(|n| cone_angle_bounds(chain.sweep_count(n), n))
        .collect())
}
