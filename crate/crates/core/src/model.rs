//! The Jaynes-Cummings Hamiltonian in excitation blocks and its exact
//! closed-form block spectra.
//!
//! Energies are in units of the coupling `y`. Block `k >= 1` has
//! off-diagonal `sqrt(k) y`; its dressed pair is split by
//! `sqrt(alpha^2 + 4k)` with `alpha = Delta / y`, `beta = omega_a / y`.
//! Block `k = 0` is the one-dimensional vacuum with energy 0.

use std::fmt;

use nalgebra::Matrix2;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::exact::{parse_rational, Rational};
use crate::surd::ExactEnergy;

/// Physical knobs in units of the coupling `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Detuning over coupling.
    pub alpha: ExactEnergy,
    /// Atomic frequency over coupling.
    pub beta: ExactEnergy,
    /// Coupling in physical frequency units; only scales reported values.
    pub y: f64,
}

impl ModelParams {
    pub fn new(alpha: ExactEnergy, beta: ExactEnergy) -> Self {
        ModelParams { alpha, beta, y: 1.0 }
    }

    pub fn with_scale(mut self, y: f64) -> Result<Self> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::domain(format!("coupling scale must be positive, got {y}")));
        }
        self.y = y;
        Ok(self)
    }

    /// From physical `(omega_a, delta, y)` given exactly in a common unit.
    pub fn from_physical(omega_a: &Rational, delta: &Rational, y: &Rational) -> Result<Self> {
        if !y.is_positive() {
            return Err(Error::domain("coupling y must be positive"));
        }
        Ok(ModelParams::new(
            ExactEnergy::from_rational(delta / y),
            ExactEnergy::from_rational(omega_a / y),
        ))
    }

    pub fn omega_a(&self) -> f64 {
        self.beta.to_f64() * self.y
    }

    pub fn delta(&self) -> f64 {
        self.alpha.to_f64() * self.y
    }

    /// `alpha + beta`, the cavity frequency over coupling.
    pub fn rho(&self) -> ExactEnergy {
        &self.alpha + &self.beta
    }

    /// Notes on parameters outside the small-detuning regime the model is
    /// meant for. The mathematics holds regardless.
    pub fn physicality_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let beta = self.beta.to_f64();
        if beta <= 0.0 {
            out.push(format!("beta = {} is not positive (atomic frequency <= 0)", self.beta));
        }
        if self.alpha.to_f64().abs() >= 0.1 * beta.abs() {
            out.push(format!(
                "|alpha| = |{}| is not small against beta; the rotating-wave regime assumes small detuning",
                self.alpha
            ));
        }
        out
    }
}

/// A diagonal block of the Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    /// Photon number 0, atom in the ground state: the 1x1 zero block.
    Vacuum,
    Pair(Matrix2<f64>),
}

/// Block `k` in the physical units of `p.y`:
/// `[[k w_a + (k-1) D, sqrt(k) y], [sqrt(k) y, k (w_a + D)]]`.
pub fn block_matrix(k: u64, p: &ModelParams) -> Block {
    if k == 0 {
        return Block::Vacuum;
    }
    let (w, d, y) = (p.omega_a(), p.delta(), p.y);
    let kf = k as f64;
    let off = kf.sqrt() * y;
    Block::Pair(Matrix2::new(kf * w + (kf - 1.0) * d, off, off, kf * (w + d)))
}

/// Closed-form eigenvalues `(lower, upper)` of block `k` in floating point,
/// for arbitrary real parameters.
pub fn block_spectrum_f64(k: u64, omega_a: f64, delta: f64, y: f64) -> (f64, f64) {
    let kf = k as f64;
    let center = 0.5 * (2.0 * omega_a + delta + 2.0 * (kf - 1.0) * (omega_a + delta));
    let half_gap = 0.5 * (delta * delta + 4.0 * kf * y * y).sqrt();
    (center - half_gap, center + half_gap)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpectrum {
    pub k: u64,
    pub lower: ExactEnergy,
    pub upper: ExactEnergy,
}

impl BlockSpectrum {
    pub fn gap(&self) -> ExactEnergy {
        &self.upper - &self.lower
    }

    pub fn center_sum(&self) -> ExactEnergy {
        &self.upper + &self.lower
    }
}

/// `alpha^2` as a rational, or an unsupported-parameter error.
pub fn alpha_squared(alpha: &ExactEnergy) -> Result<Rational> {
    alpha.rational_square().ok_or_else(|| {
        Error::UnsupportedParameter(format!("alpha = {alpha} does not have a rational square"))
    })
}

/// Exact dressed pair of block `k`:
/// `(2 beta + alpha + 2 (k-1)(beta + alpha))/2 -+ sqrt(alpha^2 + 4k)/2`.
pub fn block_spectrum_exact(k: u64, alpha: &ExactEnergy, beta: &ExactEnergy) -> Result<BlockSpectrum> {
    if k == 0 {
        return Err(Error::domain("block index must be >= 1; the vacuum block is 1x1"));
    }
    let radicand = alpha_squared(alpha)? + Rational::from_integer((4 * k).into());
    let half = Rational::new(1.into(), 2.into());
    let half_gap = ExactEnergy::sqrt_of(&radicand)?.scale(&half);
    let km1 = Rational::from_integer((k - 1).into());
    let trace = &(&beta.scale(&Rational::from_integer(2.into())) + alpha)
        + &(beta + alpha).scale(&(km1 * Rational::from_integer(2.into())));
    let center = trace.scale(&half);
    Ok(BlockSpectrum {
        k,
        lower: &center - &half_gap,
        upper: &center + &half_gap,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub energy: ExactEnergy,
    pub block: u64,
    pub branch: Branch,
}

/// The four levels of two adjacent blocks `n` and `n + 1`, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSpectrum {
    pub n: u64,
    pub levels: Vec<Level>,
    /// Two levels coincide exactly.
    pub degenerate: bool,
}

impl PairSpectrum {
    pub fn energies(&self) -> Vec<ExactEnergy> {
        self.levels.iter().map(|l| l.energy.clone()).collect()
    }
}

pub fn pair_spectrum(n: u64, alpha: &ExactEnergy, beta: &ExactEnergy) -> Result<PairSpectrum> {
    if n == 0 {
        return Err(Error::domain("pair index n must be >= 1"));
    }
    let mut levels = Vec::with_capacity(4);
    for k in [n, n + 1] {
        let s = block_spectrum_exact(k, alpha, beta)?;
        levels.push(Level { energy: s.lower, block: k, branch: Branch::Lower });
        levels.push(Level { energy: s.upper, block: k, branch: Branch::Upper });
    }
    levels.sort_by(|a, b| a.energy.cmp(&b.energy).then(a.block.cmp(&b.block)));
    let degenerate = levels.windows(2).any(|w| w[0].energy == w[1].energy);
    Ok(PairSpectrum { n, levels, degenerate })
}

/// Parameters as read from a `key = value` file.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamSource {
    /// `alpha`, `beta` given directly (or `alpha` with `rho = alpha + beta`).
    Direct { alpha: ExactEnergy, beta: ExactEnergy },
    /// A unit-hyperbola parameter `t` with `rho = alpha + beta`.
    Hyperbola { t: Rational, rho: Rational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamFile {
    pub source: ParamSource,
    pub n: Option<u64>,
    pub y_hz: Option<f64>,
}

impl ParamFile {
    /// Parses lines `key = value`; `#` starts a comment. Keys: `alpha`,
    /// `beta`, `rho`, `t`, `n`, `y_hz`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut alpha = None;
        let mut beta = None;
        let mut rho = None;
        let mut t = None;
        let mut n = None;
        let mut y_hz = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            let value = value.trim();
            match key.trim() {
                "alpha" => alpha = Some(value.parse::<ExactEnergy>()?),
                "beta" => beta = Some(value.parse::<ExactEnergy>()?),
                "rho" => rho = Some(parse_rational(value)?),
                "t" => t = Some(parse_rational(value)?),
                "n" => {
                    n = Some(value.parse::<u64>().map_err(|_| {
                        Error::parse(format!("line {}: invalid n `{value}`", lineno + 1))
                    })?)
                }
                "y_hz" => {
                    let y: f64 = value.parse().map_err(|_| {
                        Error::parse(format!("line {}: invalid y_hz `{value}`", lineno + 1))
                    })?;
                    if !(y > 0.0 && y.is_finite()) {
                        return Err(Error::domain("y_hz must be positive"));
                    }
                    y_hz = Some(y);
                }
                other => {
                    return Err(Error::parse(format!("line {}: unknown key `{other}`", lineno + 1)))
                }
            }
        }
        let source = match (alpha, beta, rho, t) {
            (None, None, Some(rho), Some(t)) => ParamSource::Hyperbola { t, rho },
            (Some(alpha), Some(beta), None, None) => ParamSource::Direct { alpha, beta },
            (Some(alpha), None, Some(rho), None) => {
                let beta = &ExactEnergy::from_rational(rho) - &alpha;
                ParamSource::Direct { alpha, beta }
            }
            _ => {
                return Err(Error::parse(
                    "parameter file needs (alpha, beta), (alpha, rho) or (t, rho)",
                ))
            }
        };
        Ok(ParamFile { source, n, y_hz })
    }
}

impl fmt::Display for BlockSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block {}: {{{}, {}}}", self.k, self.lower, self.upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{integer, rational};

    fn e(text: &str) -> ExactEnergy {
        text.parse().unwrap()
    }

    fn unit(alpha: f64, beta: f64) -> ModelParams {
        // only the floating projection matters for block_matrix
        let a = ExactEnergy::from_rational(Rational::from_float(alpha).unwrap());
        let b = ExactEnergy::from_rational(Rational::from_float(beta).unwrap());
        ModelParams::new(a, b)
    }

    #[test]
    fn block_matrix_examples() {
        let p = unit(0.0, 1.0);
        assert_eq!(block_matrix(1, &p), Block::Pair(Matrix2::new(1.0, 1.0, 1.0, 1.0)));
        let s2 = 2f64.sqrt();
        assert_eq!(block_matrix(2, &p), Block::Pair(Matrix2::new(2.0, s2, s2, 2.0)));
        assert_eq!(block_matrix(0, &p), Block::Vacuum);

        let scaled = unit(0.5, 3.0).with_scale(2.0).unwrap();
        // w_a = 6, D = 1, y = 2, k = 3
        let s3 = 3f64.sqrt();
        assert_eq!(block_matrix(3, &scaled), Block::Pair(Matrix2::new(20.0, 2.0 * s3, 2.0 * s3, 21.0)));
        assert!(unit(0.0, 1.0).with_scale(0.0).is_err());
    }

    #[test]
    fn resonant_block_spectra() {
        let s = block_spectrum_exact(1, &ExactEnergy::zero(), &ExactEnergy::from_integer(1)).unwrap();
        assert_eq!((s.lower, s.upper), (e("0"), e("2")));
        let s = block_spectrum_exact(2, &ExactEnergy::zero(), &ExactEnergy::from_integer(1)).unwrap();
        assert_eq!((s.lower, s.upper), (e("2 - sqrt(2)"), e("2 + sqrt(2)")));
    }

    #[test]
    fn detuned_block_spectra() {
        let alpha = e("2*sqrt(7)/3");
        let beta = e("2 - 2*sqrt(7)/3");
        let s1 = block_spectrum_exact(1, &alpha, &beta).unwrap();
        assert_eq!(s1.lower, e("2 - sqrt(7)/3 - 4/3"));
        assert_eq!(s1.upper, e("2 - sqrt(7)/3 + 4/3"));
        let s2 = block_spectrum_exact(2, &alpha, &beta).unwrap();
        assert_eq!(s2.lower, e("4 - sqrt(7)/3 - 5/3"));
        assert_eq!(s2.upper, e("4 - sqrt(7)/3 + 5/3"));
        assert_eq!(s2.gap(), e("10/3"));
    }

    #[test]
    fn block_spectrum_errors() {
        let one = ExactEnergy::from_integer(1);
        assert!(matches!(block_spectrum_exact(0, &one, &one), Err(Error::Domain(_))));
        assert!(matches!(
            block_spectrum_exact(1, &e("sqrt(2) + sqrt(3)"), &one),
            Err(Error::UnsupportedParameter(_))
        ));
        // alpha = 1 + sqrt(2) has an irrational square
        assert!(block_spectrum_exact(1, &e("1 + sqrt(2)"), &one).is_err());
    }

    #[test]
    fn pair_spectrum_examples() {
        let alpha = e("2*sqrt(7)/3");
        let beta = e("2 - 2*sqrt(7)/3");
        let p = pair_spectrum(1, &alpha, &beta).unwrap();
        let energies = p.energies();
        assert_eq!(
            energies,
            vec![
                e("2 - sqrt(7)/3 - 4/3"),
                e("4 - sqrt(7)/3 - 5/3"),
                e("2 - sqrt(7)/3 + 4/3"),
                e("4 - sqrt(7)/3 + 5/3"),
            ]
        );
        let diffs: Vec<_> = energies[1..].iter().map(|x| x - &energies[0]).collect();
        assert_eq!(diffs, vec![e("5/3"), e("8/3"), e("5")]);
        assert!(!p.degenerate);
        assert_eq!(
            p.levels.iter().map(|l| (l.block, l.branch)).collect::<Vec<_>>(),
            vec![(1, Branch::Lower), (2, Branch::Lower), (1, Branch::Upper), (2, Branch::Upper)]
        );

        let p = pair_spectrum(1, &ExactEnergy::zero(), &ExactEnergy::from_integer(1)).unwrap();
        assert_eq!(p.energies(), vec![e("0"), e("2 - sqrt(2)"), e("2"), e("2 + sqrt(2)")]);
    }

    #[test]
    fn pair_spectrum_flags_degeneracy() {
        let alpha = e("2*sqrt(7)/3");
        let beta = &ExactEnergy::from_integer(3) - &alpha;
        let p = pair_spectrum(1, &alpha, &beta).unwrap();
        assert!(p.degenerate);
        assert_eq!(p.levels.len(), 4);
        let collided = e("13/3 - sqrt(7)/3");
        assert_eq!(p.levels.iter().filter(|l| l.energy == collided).count(), 2);
    }

    #[test]
    fn trace_identity_exact() {
        let alpha = e("-3/7");
        let beta = e("5/2");
        for k in 1..30u64 {
            let s = block_spectrum_exact(k, &alpha, &beta).unwrap();
            // trace of block k: k beta + (k-1) alpha + k (beta + alpha)
            let kr = integer(k as i64);
            let trace = beta.scale(&(&kr * integer(2))) + alpha.scale(&(kr * integer(2) - integer(1)));
            assert_eq!(s.center_sum(), trace);
            assert_eq!(s.gap().rational_square(), Some(rational(9, 49) + integer(4 * k as i64)));
        }
    }

    #[test]
    fn warnings() {
        assert!(unit(0.01, 5.0).physicality_warnings().is_empty());
        assert_eq!(unit(1.0, 2.0).physicality_warnings().len(), 1);
        assert_eq!(unit(0.0, -1.0).physicality_warnings().len(), 1);
    }

    #[test]
    fn param_file_forms() {
        let f = ParamFile::parse("# synthesized\nt = 1/2\nrho = 2\nn = 1\ny_hz = 1e6\n").unwrap();
        assert_eq!(f.source, ParamSource::Hyperbola { t: rational(1, 2), rho: integer(2) });
        assert_eq!(f.n, Some(1));
        assert_eq!(f.y_hz, Some(1e6));

        let f = ParamFile::parse("alpha = 2*sqrt(7)/3\nrho = 2").unwrap();
        assert_eq!(
            f.source,
            ParamSource::Direct { alpha: e("2*sqrt(7)/3"), beta: e("2 - 2*sqrt(7)/3") }
        );
        let f = ParamFile::parse("alpha = 0\nbeta = 1\n").unwrap();
        assert_eq!(f.source, ParamSource::Direct { alpha: e("0"), beta: e("1") });

        assert!(ParamFile::parse("alpha = 0").is_err());
        assert!(ParamFile::parse("alpha = 0\nbeta = 1\nt = 1/2").is_err());
        assert!(ParamFile::parse("gamma = 1").is_err());
        assert!(ParamFile::parse("alpha 0").is_err());
    }
}
