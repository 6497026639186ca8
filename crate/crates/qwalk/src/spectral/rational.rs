use std::f64::consts::PI;

use serde::Serialize;

use super::DEGENERACY_TOL;

/// Tolerance on the integer relation |q·x − p|.
pub const RATIONAL_TOL: f64 = 1e-9;
pub const MAX_DENOMINATOR: u64 = 1_000_000;

/// Eigenvalues written as base + span·n_j/Q with integers n_j.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralLattice {
    pub base: f64,
    pub span: f64,
    pub numerators: Vec<u64>,
    pub denominator: u64,
}

impl SpectralLattice {
    /// π divided by the lattice step: the first time all phase differences are ±1.
    pub fn half_period(&self) -> Option<f64> {
        let g = self.numerators.iter().fold(0, |acc, &n| gcd(acc, n));
        if g == 0 || self.span <= 0.0 {
            return None;
        }
        Some(PI * self.denominator as f64 / (self.span * g as f64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rationality {
    pub rational: bool,
    pub lattice: Option<SpectralLattice>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// First continued-fraction convergent p/q of `x` with |q·x − p| ≤ tol and
/// q ≤ max_den.
///
/// The tolerance bounds the integer relation rather than |x − p/q|: with a
/// denominator budget of 10⁶, every real number has a convergent within 10⁻¹²
/// of it, so a bound on |x − p/q| alone would accept any input.
pub fn best_rational(x: f64, tol: f64, max_den: u64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h1, mut h2) = (1i128, 0i128);
    let (mut k1, mut k2) = (0i128, 1i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i128;
        let (h, k) = (a * h1 + h2, a * k1 + k2);
        if k > max_den as i128 {
            return None;
        }
        if (k as f64 * x - h as f64).abs() <= tol {
            return Some((h as i64, k as u64));
        }
        let frac = r - r.floor();
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
    }
    None
}

/// Whether every ratio of eigenvalue differences is rational. Values within
/// the degeneracy tolerance are merged first.
pub fn rationality_check(eigs: &[f64], tol: f64, max_den: u64) -> Rationality {
    let mut vals: Vec<f64> = eigs.to_vec();
    vals.sort_by(f64::total_cmp);
    let mut distinct: Vec<f64> = Vec::new();
    for v in vals {
        match distinct.last() {
            Some(&last) if v - last <= DEGENERACY_TOL * v.abs().max(1.0) => {}
            _ => distinct.push(v),
        }
    }
    if distinct.len() < 2 {
        return Rationality {
            rational: true,
            lattice: None,
        };
    }
    let base = distinct[0];
    let span = distinct[distinct.len() - 1] - base;
    let mut fracs = Vec::with_capacity(distinct.len());
    for &v in &distinct {
        match best_rational((v - base) / span, tol, max_den) {
            Some(pq) => fracs.push(pq),
            None => {
                return Rationality {
                    rational: false,
                    lattice: None,
                }
            }
        }
    }
    let mut denominator = 1u64;
    for &(_, q) in &fracs {
        denominator = denominator / gcd(denominator, q) * q;
        if denominator > max_den {
            return Rationality {
                rational: false,
                lattice: None,
            };
        }
    }
    let numerators = fracs
        .iter()
        .map(|&(p, q)| p.max(0) as u64 * (denominator / q))
        .collect();
    Rationality {
        rational: true,
        lattice: Some(SpectralLattice {
            base,
            span,
            numerators,
            denominator,
        }),
    }
}
