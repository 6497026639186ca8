//! Effective qubit-qubit coupling through a tunable transmon coupler.
//!
//! Frequencies are angular and written in GHz, so 1 GHz here means 1 rad/ns
//! and times come out in ns. Capacitances only enter through ratios; the
//! config file gives them in fF.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::spectral::{SpectralError, Spectrum, C64};

/// Bisection stops once |g̃| is below this (GHz).
pub const CUTOFF_TOL: f64 = 1e-12;
const BRACKET_STEPS: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransmonError {
    #[error("capacitance {name} must be positive and finite, got {value} fF")]
    Capacitance { name: &'static str, value: f64 },
    #[error("frequency {name} must be positive and finite, got {value} GHz")]
    Frequency { name: &'static str, value: f64 },
    #[error("singular effective detuning: Δ_i + Δ_j = 0")]
    SingularDetuning,
    #[error("coupler is resonant with qubit {0}")]
    Resonant(&'static str),
    #[error("no cutoff in range [{0}, {1}] GHz")]
    NoCutoff(f64, f64),
    #[error("bad range [{0}, {1}] with step {2}")]
    BadRange(f64, f64, f64),
    #[error("zero coupling gives no transfer time")]
    ZeroCoupling,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Capacitance in femtofarads.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Femtofarads(pub f64);

/// Angular frequency in GHz (rad/ns).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Gigahertz(pub f64);

impl Gigahertz {
    /// From an ordinary frequency in GHz.
    pub fn from_ordinary(f: f64) -> Self {
        Gigahertz(2.0 * std::f64::consts::PI * f)
    }

    pub fn to_ordinary(self) -> f64 {
        self.0 / (2.0 * std::f64::consts::PI)
    }
}

/// Two qubits i, j joined directly and through one coupler c.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplerConfig {
    pub c_i: Femtofarads,
    pub c_j: Femtofarads,
    pub c_c: Femtofarads,
    pub c_ic: Femtofarads,
    pub c_jc: Femtofarads,
    pub c_ij: Femtofarads,
    pub w_i: Gigahertz,
    pub w_j: Gigahertz,
    pub w_c: Gigahertz,
    /// Carried for reference; the two-level formulas do not use it.
    pub anharmonicity: Option<Gigahertz>,
}

impl CouplerConfig {
    /// Parameter set with 4 GHz qubits and the coupler at `w_c`.
    pub fn reference(w_c: f64) -> Self {
        CouplerConfig {
            c_i: Femtofarads(70.0),
            c_j: Femtofarads(72.0),
            c_c: Femtofarads(200.0),
            c_ic: Femtofarads(4.0),
            c_jc: Femtofarads(4.2),
            c_ij: Femtofarads(0.1),
            w_i: Gigahertz(4.0),
            w_j: Gigahertz(4.0),
            w_c: Gigahertz(w_c),
            anharmonicity: None,
        }
    }

    pub fn with_coupler(&self, w_c: f64) -> Self {
        CouplerConfig {
            w_c: Gigahertz(w_c),
            ..self.clone()
        }
    }

    /// Node capacitances and the direct one must be positive; the two
    /// qubit-coupler capacitances may be zero.
    pub fn validate(&self) -> Result<(), TransmonError> {
        let caps = [
            ("c_i", self.c_i, false),
            ("c_j", self.c_j, false),
            ("c_c", self.c_c, false),
            ("c_ij", self.c_ij, false),
            ("c_ic", self.c_ic, true),
            ("c_jc", self.c_jc, true),
        ];
        for (name, Femtofarads(value), zero_ok) in caps {
            let ok = value.is_finite() && (value > 0.0 || (zero_ok && value == 0.0));
            if !ok {
                return Err(TransmonError::Capacitance { name, value });
            }
        }
        for (name, Gigahertz(value)) in [("w_i", self.w_i), ("w_j", self.w_j), ("w_c", self.w_c)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(TransmonError::Frequency { name, value });
            }
        }
        Ok(())
    }

    /// η = C_ic·C_jc / (C_ij·C_c)
    pub fn eta(&self) -> f64 {
        self.c_ic.0 * self.c_jc.0 / (self.c_ij.0 * self.c_c.0)
    }

    fn qubit_coupler(c_qc: f64, c_q: f64, c_c: f64, w_q: f64, w_c: f64) -> f64 {
        0.5 * c_qc / (c_q * c_c).sqrt() * (w_q * w_c).sqrt()
    }

    pub fn g_i(&self) -> f64 {
        Self::qubit_coupler(self.c_ic.0, self.c_i.0, self.c_c.0, self.w_i.0, self.w_c.0)
    }

    pub fn g_j(&self) -> f64 {
        Self::qubit_coupler(self.c_jc.0, self.c_j.0, self.c_c.0, self.w_j.0, self.w_c.0)
    }

    /// Direct coupling, including the part mediated by the coupler capacitance.
    pub fn g_ij(&self) -> f64 {
        0.5 * (1.0 + self.eta()) * self.c_ij.0 / (self.c_i.0 * self.c_j.0).sqrt()
            * (self.w_i.0 * self.w_j.0).sqrt()
    }

    /// Single-excitation matrix in the order (qubit i, coupler, qubit j).
    pub fn three_body_matrix(&self) -> Matrix3<f64> {
        let (gi, gj, gij) = (self.g_i(), self.g_j(), self.g_ij());
        Matrix3::new(
            self.w_i.0, gi, gij, //
            gi, self.w_c.0, gj, //
            gij, gj, self.w_j.0,
        )
    }
}

impl fmt::Display for CouplerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in [
            ("c_i", self.c_i.0),
            ("c_j", self.c_j.0),
            ("c_c", self.c_c.0),
            ("c_ic", self.c_ic.0),
            ("c_jc", self.c_jc.0),
            ("c_ij", self.c_ij.0),
            ("w_i", self.w_i.0),
            ("w_j", self.w_j.0),
            ("w_c", self.w_c.0),
        ] {
            writeln!(f, "{k} = {v}")?;
        }
        if let Some(a) = self.anharmonicity {
            writeln!(f, "alpha = {}", a.0)?;
        }
        Ok(())
    }
}

/// Parses `key = value` lines. Keys: c_i c_j c_c c_ic c_jc c_ij (fF),
/// w_i w_j w_c (GHz, angular) and optional alpha. `#` starts a comment.
/// A missing w_c defaults to the 8 GHz operating point.
pub fn parse_config(text: &str) -> Result<CouplerConfig, TransmonError> {
    let mut values: [Option<f64>; 10] = [None; 10];
    const KEYS: [&str; 10] = [
        "c_i", "c_j", "c_c", "c_ic", "c_jc", "c_ij", "w_i", "w_j", "w_c", "alpha",
    ];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |reason: String| TransmonError::Parse { line, reason };
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err("expected `key = value`".into()))?;
        let key = key.trim();
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| err(format!("unknown key {key:?}")))?;
        if values[slot].is_some() {
            return Err(err(format!("duplicate key {key:?}")));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| err(format!("invalid number {:?}", value.trim())))?;
        values[slot] = Some(value);
    }
    let need = |slot: usize| {
        values[slot].ok_or_else(|| TransmonError::Parse {
            line: 0,
            reason: format!("missing key {:?}", KEYS[slot]),
        })
    };
    let cfg = CouplerConfig {
        c_i: Femtofarads(need(0)?),
        c_j: Femtofarads(need(1)?),
        c_c: Femtofarads(need(2)?),
        c_ic: Femtofarads(need(3)?),
        c_jc: Femtofarads(need(4)?),
        c_ij: Femtofarads(need(5)?),
        w_i: Gigahertz(need(6)?),
        w_j: Gigahertz(need(7)?),
        w_c: Gigahertz(values[8].unwrap_or(8.0)),
        anharmonicity: values[9].map(Gigahertz),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// All couplings in GHz (angular).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub w_c: f64,
    pub g_i: f64,
    pub g_j: f64,
    pub g_ij: f64,
    pub eta: f64,
    pub delta_i: f64,
    pub delta_j: f64,
    pub sigma_i: f64,
    pub sigma_j: f64,
    /// 2Δ_iΔ_j/(Δ_i + Δ_j)
    pub delta_ij: f64,
    pub g_rwa: f64,
    pub g_brwa: f64,
    /// Lamb-shifted qubit frequencies.
    pub w_i_shifted: f64,
    pub w_j_shifted: f64,
    /// g_i < |Δ_i| and g_j < |Δ_j|.
    pub dispersive: bool,
}

/// Indirect plus direct coupling with counter-rotating corrections.
fn brwa(g_i: f64, g_j: f64, g_ij: f64, d: (f64, f64), s: (f64, f64)) -> f64 {
    0.5 * g_i * g_j * (1.0 / d.0 + 1.0 / d.1 - 1.0 / s.0 - 1.0 / s.1) + g_ij
}

pub fn coupling_report(cfg: &CouplerConfig) -> Result<CouplingReport, TransmonError> {
    cfg.validate()?;
    let (wi, wj, wc) = (cfg.w_i.0, cfg.w_j.0, cfg.w_c.0);
    let (delta_i, delta_j) = (wi - wc, wj - wc);
    if delta_i == 0.0 {
        return Err(TransmonError::Resonant("i"));
    }
    if delta_j == 0.0 {
        return Err(TransmonError::Resonant("j"));
    }
    if delta_i + delta_j == 0.0 {
        return Err(TransmonError::SingularDetuning);
    }
    let (sigma_i, sigma_j) = (wi + wc, wj + wc);
    let (g_i, g_j, g_ij) = (cfg.g_i(), cfg.g_j(), cfg.g_ij());
    let delta_ij = 2.0 * delta_i * delta_j / (delta_i + delta_j);
    let shift = |g: f64, d: f64, s: f64| g * g * (1.0 / d + 1.0 / s);
    Ok(CouplingReport {
        w_c: wc,
        g_i,
        g_j,
        g_ij,
        eta: cfg.eta(),
        delta_i,
        delta_j,
        sigma_i,
        sigma_j,
        delta_ij,
        g_rwa: g_i * g_j / delta_ij + g_ij,
        g_brwa: brwa(g_i, g_j, g_ij, (delta_i, delta_j), (sigma_i, sigma_j)),
        w_i_shifted: wi + shift(g_i, delta_i, sigma_i),
        w_j_shifted: wj + shift(g_j, delta_j, sigma_j),
        dispersive: g_i < delta_i.abs() && g_j < delta_j.abs(),
    })
}

/// Closed form for identical qubits at frequency ω:
/// ½[ω_c²η/(ΔΣ) + η + 1]·C_ij/√(C_iC_j)·ω.
pub fn identical_qubit_coupling(cfg: &CouplerConfig) -> Result<f64, TransmonError> {
    cfg.validate()?;
    let (w, wc) = (cfg.w_i.0, cfg.w_c.0);
    let (d, s) = (w - wc, w + wc);
    if d == 0.0 {
        return Err(TransmonError::Resonant("i"));
    }
    let eta = cfg.eta();
    Ok(
        0.5 * (wc * wc * eta / (d * s) + eta + 1.0) * cfg.c_ij.0 / (cfg.c_i.0 * cfg.c_j.0).sqrt()
            * w,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    pub w_c: f64,
    pub delta_i: f64,
    pub delta_j: f64,
    pub residual: f64,
}

fn check_range(lo: f64, hi: f64, step: f64) -> Result<(), TransmonError> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && lo > 0.0 && lo < hi && step > 0.0)
    {
        return Err(TransmonError::BadRange(lo, hi, step));
    }
    Ok(())
}

/// Lowest coupler frequency in [lo, hi] where g̃ (beyond RWA) vanishes.
/// Brackets that straddle a qubit resonance are poles, not roots, and are
/// skipped.
pub fn find_cutoff(cfg: &CouplerConfig, lo: f64, hi: f64) -> Result<Cutoff, TransmonError> {
    check_range(lo, hi, (hi - lo) / BRACKET_STEPS as f64)?;
    cfg.validate()?;
    let g = |wc: f64| {
        coupling_report(&cfg.with_coupler(wc))
            .map(|r| r.g_brwa)
            .ok()
    };
    let poles = [cfg.w_i.0, cfg.w_j.0];
    let h = (hi - lo) / BRACKET_STEPS as f64;
    let mut a = lo;
    let mut ga = g(a);
    for k in 1..=BRACKET_STEPS {
        let b = if k == BRACKET_STEPS {
            hi
        } else {
            lo + k as f64 * h
        };
        let gb = g(b);
        let pole = poles.iter().any(|&p| a <= p && p <= b);
        if let (Some(fa), Some(fb), false) = (ga, gb, pole) {
            if fa == 0.0 {
                return cutoff_at(cfg, a);
            }
            if fa.signum() != fb.signum() {
                return bisect(cfg, a, b, fa, &g);
            }
        }
        a = b;
        ga = gb;
    }
    if ga == Some(0.0) {
        return cutoff_at(cfg, hi);
    }
    Err(TransmonError::NoCutoff(lo, hi))
}

fn bisect(
    cfg: &CouplerConfig,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    g: &impl Fn(f64) -> Option<f64>,
) -> Result<Cutoff, TransmonError> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = g(m).ok_or(TransmonError::NoCutoff(a, b))?;
        if fm.abs() <= CUTOFF_TOL || m == a || m == b {
            return cutoff_at(cfg, m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    cutoff_at(cfg, 0.5 * (a + b))
}

fn cutoff_at(cfg: &CouplerConfig, wc: f64) -> Result<Cutoff, TransmonError> {
    let r = coupling_report(&cfg.with_coupler(wc))?;
    Ok(Cutoff {
        w_c: wc,
        delta_i: r.delta_i,
        delta_j: r.delta_j,
        residual: r.g_brwa.abs(),
    })
}

/// Transfer time across `hops` uniform edges of weight g̃, under both readings
/// of the GHz unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PstTime {
    /// g̃ read as angular (rad/ns): hops·π/(2|g̃|).
    pub angular_ns: f64,
    /// g̃ read as ordinary frequency: hops/(4|g̃|).
    pub ordinary_ns: f64,
}

pub fn pst_time(coupling: f64, hops: u32) -> Result<PstTime, TransmonError> {
    if coupling == 0.0 || !coupling.is_finite() {
        return Err(TransmonError::ZeroCoupling);
    }
    let t0 = FRAC_PI_2 / coupling.abs();
    Ok(PstTime {
        angular_ns: hops as f64 * t0,
        ordinary_ns: hops as f64 * t0 / (2.0 * std::f64::consts::PI),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeBodyCheck {
    /// Signed half splitting of the two qubit-like dressed states.
    pub numeric: f64,
    pub analytic: f64,
    pub relative_error: f64,
    pub dispersive: bool,
    /// The splitting is an exchange rate only when this holds.
    pub identical_qubits: bool,
}

/// Diagonalises the 3×3 single-excitation block and compares the qubit
/// exchange rate with g̃ in the rotating-wave form.
pub fn three_body_oracle(cfg: &CouplerConfig) -> Result<ThreeBodyCheck, TransmonError> {
    let report = coupling_report(cfg)?;
    let eig = SymmetricEigen::new(cfg.three_body_matrix());
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let wa = eig.eigenvectors[(1, a)].abs();
        let wb = eig.eigenvectors[(1, b)].abs();
        wa.total_cmp(&wb).then(a.cmp(&b))
    });
    let (p, q) = (order[0], order[1]);
    let bonding = |k: usize| eig.eigenvectors[(0, k)] * eig.eigenvectors[(2, k)] > 0.0;
    let (sym, anti) = if bonding(p) || !bonding(q) {
        (p, q)
    } else {
        (q, p)
    };
    let numeric = 0.5 * (eig.eigenvalues[sym] - eig.eigenvalues[anti]);
    let analytic = report.g_rwa;
    Ok(ThreeBodyCheck {
        numeric,
        analytic,
        relative_error: ((numeric - analytic) / analytic).abs(),
        dispersive: report.dispersive,
        identical_qubits: cfg.w_i == cfg.w_j,
    })
}

/// Single-excitation amplitudes (i, coupler, j) at time t, starting on qubit i.
pub fn three_body_evolution(cfg: &CouplerConfig, t: f64) -> Result<[C64; 3], TransmonError> {
    cfg.validate()?;
    let m = cfg.three_body_matrix();
    let spectrum = Spectrum::new(&DMatrix::from_iterator(3, 3, m.iter().copied()))?;
    let start = DVector::from_vec(vec![
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ]);
    let out = spectrum.evolve(&start, t)?;
    Ok([out[0], out[1], out[2]])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub w_c: f64,
    pub delta_i: f64,
    pub g_rwa: f64,
    pub g_brwa: f64,
    /// Angular reading; None where g̃ vanishes.
    pub t_pst: Option<f64>,
}

/// Coupler-frequency sweep on lo, lo + step, … ≤ hi. Resonant points are
/// skipped.
pub fn sweep(
    cfg: &CouplerConfig,
    lo: f64,
    hi: f64,
    step: f64,
    hops: u32,
) -> Result<Vec<SweepRow>, TransmonError> {
    check_range(lo, hi, step)?;
    cfg.validate()?;
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut rows = Vec::with_capacity(count + 1);
    for k in 0..=count {
        let wc = lo + k as f64 * step;
        let Ok(r) = coupling_report(&cfg.with_coupler(wc)) else {
            continue;
        };
        rows.push(SweepRow {
            w_c: wc,
            delta_i: r.delta_i,
            g_rwa: r.g_rwa,
            g_brwa: r.g_brwa,
            t_pst: pst_time(r.g_brwa, hops).ok().map(|t| t.angular_ns),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg8() -> CouplerConfig {
        CouplerConfig::reference(8.0)
    }

    #[test]
    fn reference_couplings() {
        let r = coupling_report(&cfg8()).unwrap();
        assert!((r.eta - 0.84).abs() < 1e-15);
        let g_i = 0.5 * 4.0 / (70.0f64 * 200.0).sqrt() * 32f64.sqrt();
        assert!((r.g_i - g_i).abs() < 1e-15);
        assert_eq!((r.delta_i, r.sigma_i, r.delta_ij), (-4.0, 12.0, -4.0));
        assert!(r.dispersive);
        let closed = identical_qubit_coupling(&cfg8()).unwrap();
        assert!((closed - r.g_brwa).abs() < 1e-15);
        assert!((r.g_brwa - 0.002028).abs() < 1e-5);
        assert!(r.w_i_shifted < 4.0);
    }

    #[test]
    fn no_coupler_leg_leaves_direct_coupling() {
        let mut cfg = cfg8();
        cfg.c_ic = Femtofarads(0.0);
        let r = coupling_report(&cfg).unwrap();
        assert_eq!(r.g_i, 0.0);
        assert_eq!((r.g_rwa, r.g_brwa), (r.g_ij, r.g_ij));
        assert!(matches!(
            find_cutoff(&cfg, 4.5, 9.0),
            Err(TransmonError::NoCutoff(..))
        ));
    }

    #[test]
    fn indirect_only_is_one_signed() {
        let cfg = cfg8();
        for k in 0..=450 {
            let wc = 4.5 + 0.01 * k as f64;
            let r = coupling_report(&cfg.with_coupler(wc)).unwrap();
            let s = (r.delta_i, r.delta_j);
            assert!(brwa(r.g_i, r.g_j, 0.0, s, (r.sigma_i, r.sigma_j)) < 0.0);
        }
    }

    #[test]
    fn reference_cutoff() {
        let c = find_cutoff(&cfg8(), 4.5, 9.0).unwrap();
        assert!(c.residual <= CUTOFF_TOL);
        assert!((c.delta_i + 1.426).abs() < 0.05);
        assert!((c.w_c - 29.44f64.sqrt()).abs() < 1e-9);
        let below = coupling_report(&cfg8().with_coupler(c.w_c - 0.1)).unwrap();
        let above = coupling_report(&cfg8().with_coupler(c.w_c + 0.1)).unwrap();
        assert!(below.g_brwa < 0.0 && above.g_brwa > 0.0);
    }

    #[test]
    fn stronger_direct_capacitance_moves_cutoff_toward_qubits() {
        let mut cfg = cfg8();
        let base = find_cutoff(&cfg, 4.5, 9.0).unwrap();
        cfg.c_ij = Femtofarads(0.2);
        let doubled = find_cutoff(&cfg, 4.5, 9.0).unwrap();
        assert!(doubled.delta_i.abs() < base.delta_i.abs());
        assert!((doubled.w_c - 22.72f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn rwa_limit_at_large_frequencies() {
        let mut gaps = Vec::new();
        for scale in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let mut cfg = cfg8();
            cfg.w_i = Gigahertz(4.0 * scale);
            cfg.w_j = Gigahertz(4.0 * scale);
            cfg.w_c = Gigahertz(4.0 * scale + 4.0);
            let r = coupling_report(&cfg).unwrap();
            // Measured against the indirect part: g̃_rwa itself crosses zero
            // along this path.
            let indirect = r.g_i * r.g_j / r.delta_ij;
            gaps.push(((r.g_brwa - r.g_rwa) / indirect).abs());
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn pst_time_scaling() {
        let g = 0.37;
        let one = pst_time(g, 1).unwrap();
        let two = pst_time(g, 2).unwrap();
        assert!((two.angular_ns - 2.0 * one.angular_ns).abs() < 1e-12);
        let doubled = pst_time(2.0 * g, 2).unwrap();
        assert!((doubled.angular_ns - two.angular_ns / 2.0).abs() < 1e-12);
        let g15 = std::f64::consts::PI / 1.5;
        assert!((pst_time(g15, 2).unwrap().angular_ns - 1.5).abs() < 1e-12);
        assert!(matches!(pst_time(0.0, 1), Err(TransmonError::ZeroCoupling)));
        let r = coupling_report(&cfg8()).unwrap();
        let t = pst_time(r.g_brwa, 2).unwrap();
        assert!(t.angular_ns > 1000.0 && t.ordinary_ns > 200.0);
    }

    #[test]
    fn three_body_matches_effective_coupling() {
        let check = three_body_oracle(&cfg8()).unwrap();
        assert!(check.dispersive && check.identical_qubits);
        assert!(check.relative_error <= 0.15, "{check:?}");

        let mut bare = cfg8();
        bare.c_ic = Femtofarads(0.0);
        bare.c_jc = Femtofarads(0.0);
        let check = three_body_oracle(&bare).unwrap();
        assert!((check.numeric - bare.g_ij()).abs() < 1e-15);

        // g_ij = 0 is not reachable through capacitances, so drop it by hand.
        let mut deep = cfg8().with_coupler(40.0);
        deep.c_ij = Femtofarads(1e-9);
        deep.c_ic = Femtofarads(1e-5);
        deep.c_jc = Femtofarads(1e-5);
        let r = coupling_report(&deep).unwrap();
        let mut m = deep.three_body_matrix();
        m[(0, 2)] = 0.0;
        m[(2, 0)] = 0.0;
        let eig = SymmetricEigen::new(m);
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        let numeric = 0.5 * (v[0] - v[1]);
        let indirect = r.g_i * r.g_j / r.delta_ij;
        assert!(((numeric - indirect) / indirect).abs() < 0.05);
    }

    #[test]
    fn three_body_conserves_probability() {
        for t in [0.0, 0.3, 17.0, 450.0, 1548.0] {
            let a = three_body_evolution(&cfg8(), t).unwrap();
            let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn config_text() {
        let text = "# coupler\nc_i = 70\nc_j = 72\nc_c = 200\nc_ic = 4\nc_jc = 4.2\nc_ij = 0.1\nw_i = 4\nw_j = 4 # GHz\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg, cfg8());
        assert_eq!(parse_config(&cfg.to_string()).unwrap(), cfg);
        assert!(matches!(
            parse_config("c_i = 70\nc_i = 1\n"),
            Err(TransmonError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("w_x = 1\n"),
            Err(TransmonError::Parse { line: 1, .. })
        ));
        assert!(parse_config(&text.replace("c_c = 200", "c_c = -1")).is_err());
        assert!(parse_config("c_i = 70\n").is_err());
    }

    #[test]
    fn sweep_rows() {
        let rows = sweep(&cfg8(), 4.5, 9.0, 0.01, 1).unwrap();
        assert_eq!(rows.len(), 451);
        assert!((rows[450].w_c - 9.0).abs() < 1e-9);
        let flips = rows
            .windows(2)
            .filter(|w| w[0].g_brwa.signum() != w[1].g_brwa.signum())
            .count();
        assert_eq!(flips, 1);
        let resonant = sweep(&cfg8(), 3.5, 4.5, 0.25, 1).unwrap();
        assert_eq!(resonant.len(), 4);
        assert!(singular_detuning_reported());
    }

    fn singular_detuning_reported() -> bool {
        let mut cfg = cfg8().with_coupler(4.0);
        cfg.w_i = Gigahertz(3.0);
        cfg.w_j = Gigahertz(5.0);
        matches!(coupling_report(&cfg), Err(TransmonError::SingularDetuning))
    }
}
