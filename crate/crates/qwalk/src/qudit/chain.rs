//! SU(d) generators and the weighted qudit XY chain.

use nalgebra::DMatrix;

use super::QuditError;
use crate::spectral::C64;

pub const MAX_LEVELS: usize = 8;
/// Largest single-particle sector handled.
pub const MAX_SECTOR_DIM: usize = 1024;
/// Largest full product space built explicitly.
pub const MAX_FULL_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// |k⟩⟨j| + |j⟩⟨k|
    Symmetric { k: usize, j: usize },
    /// −i(|k⟩⟨j| − |j⟩⟨k|)
    Antisymmetric { k: usize, j: usize },
    /// Normalised diagonal built from the first r + 1 levels.
    Diagonal { r: usize },
}

#[derive(Debug, Clone)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub matrix: DMatrix<C64>,
}

/// d² − 1 traceless Hermitian generators: off-diagonal pairs for k < j, then
/// the d − 1 diagonal ones. Levels are 0-based.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    dim: usize,
    generators: Vec<Generator>,
}

fn unit(d: usize, row: usize, col: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(d, d);
    m[(row, col)] = C64::new(1.0, 0.0);
    m
}

pub fn su_d_generators(d: usize) -> Result<GeneratorSet, QuditError> {
    if !(2..=MAX_LEVELS).contains(&d) {
        return Err(QuditError::Levels(d));
    }
    let mut generators = Vec::with_capacity(d * d - 1);
    for k in 0..d {
        for j in k + 1..d {
            let (a, b) = (unit(d, k, j), unit(d, j, k));
            generators.push(Generator {
                kind: GeneratorKind::Symmetric { k, j },
                matrix: &a + &b,
            });
            generators.push(Generator {
                kind: GeneratorKind::Antisymmetric { k, j },
                matrix: (a - b) * C64::new(0.0, -1.0),
            });
        }
    }
    for r in 1..d {
        let scale = (2.0 / (r * (r + 1)) as f64).sqrt();
        let mut m = DMatrix::zeros(d, d);
        for l in 0..r {
            m[(l, l)] = C64::new(scale, 0.0);
        }
        m[(r, r)] = C64::new(-(r as f64) * scale, 0.0);
        generators.push(Generator {
            kind: GeneratorKind::Diagonal { r },
            matrix: m,
        });
    }
    Ok(GeneratorSet { dim: d, generators })
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    fn find(&self, kind: GeneratorKind) -> &DMatrix<C64> {
        &self
            .generators
            .iter()
            .find(|g| g.kind == kind)
            .expect("generator present")
            .matrix
    }

    /// Σ over the pairs k < j of Θ⊗Θ + β⊗β, as a two-site operator.
    fn exchange(&self) -> DMatrix<C64> {
        let d = self.dim;
        let mut out = DMatrix::zeros(d * d, d * d);
        for k in 0..d {
            for j in k + 1..d {
                let th = self.find(GeneratorKind::Symmetric { k, j });
                let be = self.find(GeneratorKind::Antisymmetric { k, j });
                out += th.kronecker(th) + be.kronecker(be);
            }
        }
        out
    }
}

/// Coupling on bond i (1-based) of an n-site qudit chain: √(i(n − i))/2.
pub fn qudit_coupling(n: usize, i: usize) -> f64 {
    ((i * (n - i)) as f64).sqrt() / 2.0
}

/// Qudit chain H = Σ_i (J_i/2) Σ_{k<j} (Θ_i Θ_{i+1} + β_i β_{i+1}).
#[derive(Debug, Clone)]
pub struct QuditChain {
    sites: usize,
    levels: usize,
    generators: GeneratorSet,
    exchange: DMatrix<C64>,
}

impl QuditChain {
    pub fn new(n: usize, d: usize) -> Result<Self, QuditError> {
        if n < 2 {
            return Err(QuditError::Sites(n));
        }
        let generators = su_d_generators(d)?;
        if n * (d - 1) > MAX_SECTOR_DIM {
            return Err(QuditError::TooLarge(n * (d - 1)));
        }
        let exchange = generators.exchange();
        Ok(QuditChain {
            sites: n,
            levels: d,
            generators,
            exchange,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.sites];
        for slot in out.iter_mut().rev() {
            *slot = index % self.levels;
            index /= self.levels;
        }
        out
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.levels + x)
    }

    /// H applied to a product basis state (site 0 is the leading digit).
    fn apply_basis(&self, index: usize) -> Vec<(usize, C64)> {
        let d = self.levels;
        let digits = self.digits(index);
        let mut out: Vec<(usize, C64)> = Vec::new();
        for bond in 0..self.sites - 1 {
            let coeff = qudit_coupling(self.sites, bond + 1) / 2.0;
            let col = digits[bond] * d + digits[bond + 1];
            for row in 0..d * d {
                let val = self.exchange[(row, col)];
                if val.norm() == 0.0 {
                    continue;
                }
                let mut next = digits.clone();
                next[bond] = row / d;
                next[bond + 1] = row % d;
                out.push((self.index(&next), val * coeff));
            }
        }
        out
    }

    /// Full d^n matrix.
    pub fn full_hamiltonian(&self) -> Result<DMatrix<C64>, QuditError> {
        let dim = self
            .levels
            .checked_pow(self.sites as u32)
            .filter(|&x| x <= MAX_FULL_DIM)
            .ok_or(QuditError::TooLarge(usize::MAX))?;
        let mut h = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            for (row, val) in self.apply_basis(col) {
                h[(row, col)] += val;
            }
        }
        Ok(h)
    }

    /// Product basis index of one site at `level`, all others at 0.
    fn sector_state(&self, site: usize, level: usize) -> usize {
        let mut digits = vec![0; self.sites];
        digits[site] = level;
        self.index(&digits)
    }

    /// Sector position of (site, level ≥ 1): level-major blocks of n sites.
    pub fn sector_position(&self, site: usize, level: usize) -> usize {
        (level - 1) * self.sites + site
    }

    /// H restricted to states with exactly one site excited. Fails if H
    /// leaks out of that sector.
    pub fn sector_hamiltonian(&self) -> Result<DMatrix<C64>, QuditError> {
        let dim = self.sites * (self.levels - 1);
        let lookup: Vec<(usize, usize)> = (1..self.levels)
            .flat_map(|l| (0..self.sites).map(move |s| (s, l)))
            .map(|(s, l)| (self.sector_state(s, l), self.sector_position(s, l)))
            .collect();
        let mut h = DMatrix::zeros(dim, dim);
        for &(state, col) in &lookup {
            for (target, val) in self.apply_basis(state) {
                let row = lookup
                    .iter()
                    .find(|(s, _)| *s == target)
                    .map(|&(_, p)| p)
                    .ok_or(QuditError::SectorLeak)?;
                h[(row, col)] += val;
            }
        }
        Ok(h)
    }

    /// Σ_j η^{r}_(j) on the full space.
    pub fn conserved_charge(&self, r: usize) -> Result<DMatrix<C64>, QuditError> {
        let eta = self.generators.find(GeneratorKind::Diagonal { r }).clone();
        let dim = self.levels.pow(self.sites as u32);
        if dim > MAX_FULL_DIM {
            return Err(QuditError::TooLarge(dim));
        }
        Ok(DMatrix::from_fn(dim, dim, |row, col| {
            if row != col {
                return C64::new(0.0, 0.0);
            }
            self.digits(row).iter().map(|&x| eta[(x, x)]).sum()
        }))
    }

    /// Largest ‖[H, Σ_j η^{r}_(j)]‖ entry over all r.
    pub fn conservation_defect(&self) -> Result<f64, QuditError> {
        let h = self.full_hamiltonian()?;
        let mut worst: f64 = 0.0;
        for r in 1..self.levels {
            let q = self.conserved_charge(r)?;
            let c = &h * &q - &q * &h;
            worst = worst.max(c.iter().map(|x| x.norm()).fold(0.0, f64::max));
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::pst_chain;
    use crate::spectral::max_norm;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn generator_invariants() {
        for d in 2..=MAX_LEVELS {
            let set = su_d_generators(d).unwrap();
            assert_eq!(set.len(), d * d - 1);
            for g in set.generators() {
                assert!(g.matrix.trace().norm() < 1e-12);
                assert!(max_norm((&g.matrix - g.matrix.adjoint()).iter()) < 1e-12);
            }
            for (a, ga) in set.generators().iter().enumerate() {
                for gb in &set.generators()[a + 1..] {
                    assert!((&ga.matrix * &gb.matrix).trace().norm() < 1e-10);
                }
                assert!(((&ga.matrix * &ga.matrix).trace() - c(2.0, 0.0)).norm() < 1e-12);
            }
        }
        assert!(su_d_generators(1).is_err());
        assert!(su_d_generators(9).is_err());
    }

    #[test]
    fn qubit_generators_are_pauli() {
        let set = su_d_generators(2).unwrap();
        let m: Vec<&DMatrix<C64>> = set.generators().iter().map(|g| &g.matrix).collect();
        let x = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let y = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let z = DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        assert_eq!(m, vec![&x, &y, &z]);
    }

    #[test]
    fn qutrit_generators_are_gell_mann() {
        let set = su_d_generators(3).unwrap();
        let g = |kind| set.find(kind).clone();
        let l2 = g(GeneratorKind::Antisymmetric { k: 0, j: 1 });
        assert_eq!(l2[(0, 1)], c(0., -1.));
        assert_eq!(l2[(1, 0)], c(0., 1.));
        let l8 = g(GeneratorKind::Diagonal { r: 2 });
        let s = 1.0 / 3f64.sqrt();
        for (i, v) in [s, s, -2.0 * s].iter().enumerate() {
            assert!((l8[(i, i)].re - v).abs() < 1e-15);
        }
        let l3 = g(GeneratorKind::Diagonal { r: 1 });
        assert_eq!(l3[(0, 0)], c(1., 0.));
        assert_eq!(l3[(1, 1)], c(-1., 0.));
    }

    #[test]
    fn qubit_chain_is_half_the_weighted_chain() {
        for n in 2..=7 {
            let h = QuditChain::new(n, 2).unwrap().sector_hamiltonian().unwrap();
            let w = pst_chain(n).unwrap().matrix();
            for r in 0..n {
                for col in 0..n {
                    assert!((h[(r, col)] - c(w[(r, col)] / 2.0, 0.0)).norm() < 1e-12);
                }
            }
        }
        let h = QuditChain::new(2, 2).unwrap().sector_hamiltonian().unwrap();
        assert!((h[(0, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn every_level_hops_independently() {
        let chain = QuditChain::new(5, 4).unwrap();
        let h = chain.sector_hamiltonian().unwrap();
        let w = pst_chain(5).unwrap().matrix() / 2.0;
        for l1 in 1..4 {
            for l2 in 1..4 {
                for a in 0..5 {
                    for b in 0..5 {
                        let v = h[(chain.sector_position(a, l1), chain.sector_position(b, l2))];
                        let expect = if l1 == l2 { w[(a, b)] } else { 0.0 };
                        assert!((v - c(expect, 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn charges_are_conserved() {
        for (n, d) in [(4, 3), (3, 4), (5, 2), (3, 3)] {
            let chain = QuditChain::new(n, d).unwrap();
            assert!(chain.conservation_defect().unwrap() <= 1e-9);
            let h = chain.full_hamiltonian().unwrap();
            assert!(max_norm((&h - h.adjoint()).iter()) < 1e-12);
        }
        assert!(QuditChain::new(1, 3).is_err());
        assert!(QuditChain::new(8, 8).unwrap().full_hamiltonian().is_err());
    }
}
