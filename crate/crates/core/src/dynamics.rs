//! Floating-point evolution on finite spans of excitation blocks.
//!
//! Each 2x2 block is diagonalized in closed form, so evolution is a phase per
//! eigenvector with no integrator error at any horizon. States, times and
//! energies are in units of the coupling (`y = 1`, `hbar = 1`).

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::block_spectrum_exact;
use crate::surd::ExactEnergy;

/// Squared-norm tolerance accepted by [`QuantumState::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Amplitudes over the basis of a span of blocks. Block `k >= 1` contributes
/// two basis vectors: index 0 is the `k w_a + (k-1) D` diagonal entry
/// (atom excited, `k-1` photons), index 1 the `k (w_a + D)` entry (atom
/// ground, `k` photons). Block 0 contributes the single vacuum vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    blocks: Vec<u64>,
    amplitudes: Vec<Complex64>,
}

fn block_dim(k: u64) -> usize {
    if k == 0 {
        1
    } else {
        2
    }
}

fn span_dim(blocks: &[u64]) -> usize {
    blocks.iter().map(|&k| block_dim(k)).sum()
}

fn check_blocks(blocks: &[u64]) -> Result<()> {
    if blocks.is_empty() {
        return Err(Error::domain("a state needs at least one block"));
    }
    let mut sorted = blocks.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != blocks.len() {
        return Err(Error::domain("repeated block index"));
    }
    Ok(())
}

impl QuantumState {
    pub fn new(blocks: Vec<u64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_blocks(&blocks)?;
        if amplitudes.len() != span_dim(&blocks) {
            return Err(Error::domain(format!(
                "expected {} amplitudes, got {}",
                span_dim(&blocks),
                amplitudes.len()
            )));
        }
        let state = QuantumState { blocks, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!("state is not normalized: |psi|^2 = {norm}")));
        }
        Ok(state)
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(blocks: Vec<u64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::domain("cannot normalize a zero state"));
        }
        QuantumState::new(blocks, amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// The `index`-th basis vector of the span.
    pub fn basis(blocks: Vec<u64>, index: usize) -> Result<Self> {
        let dim = span_dim(&blocks);
        if index >= dim {
            return Err(Error::domain(format!("basis index {index} out of range {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        QuantumState::new(blocks, amplitudes)
    }

    /// Independent standard normal real and imaginary parts, normalized;
    /// this is the unitarily invariant (Haar) distribution on the sphere.
    pub fn random<R: Rng + ?Sized>(blocks: Vec<u64>, rng: &mut R) -> Result<Self> {
        let amplitudes = (0..span_dim(&blocks))
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        QuantumState::normalized(blocks, amplitudes)
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn labels(&self) -> Vec<(u64, usize)> {
        self.blocks
            .iter()
            .flat_map(|&k| (0..block_dim(k)).map(move |i| (k, i)))
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.blocks != other.blocks {
            return Err(Error::domain("states live on different spans"));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &QuantumState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// One `re,im` line per amplitude, in basis order.
    pub fn to_csv(&self) -> String {
        self.amplitudes
            .iter()
            .map(|a| format!("{:e},{:e}\n", a.re, a.im))
            .collect()
    }

    /// Reads `re,im` lines (blank lines and `#` comments skipped) and
    /// normalizes.
    pub fn from_csv(blocks: Vec<u64>, text: &str) -> Result<Self> {
        let mut amplitudes = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::parse(format!("state line {}: expected `re,im`", i + 1));
            let (re, im) = line.split_once(',').ok_or_else(bad)?;
            let re: f64 = re.trim().parse().map_err(|_| bad())?;
            let im: f64 = im.trim().parse().map_err(|_| bad())?;
            amplitudes.push(Complex64::new(re, im));
        }
        QuantumState::normalized(blocks, amplitudes)
    }
}

#[derive(Clone, Debug)]
struct BlockEigen {
    k: u64,
    lower: f64,
    upper: f64,
    // upper eigenvector (cos, sin); lower eigenvector (-sin, cos)
    cos: f64,
    sin: f64,
    // Hamiltonian entries [[a, b], [b, d]]
    a: f64,
    b: f64,
    d: f64,
}

/// Closed-form spectral data for a span of blocks at fixed parameters.
#[derive(Clone, Debug)]
pub struct SubspaceDynamics {
    blocks: Vec<BlockEigen>,
}

impl SubspaceDynamics {
    pub fn new(blocks: &[u64], alpha: &ExactEnergy, beta: &ExactEnergy) -> Result<Self> {
        check_blocks(blocks)?;
        let (af, bf) = (alpha.to_f64(), beta.to_f64());
        let data = blocks
            .iter()
            .map(|&k| {
                if k == 0 {
                    return Ok(BlockEigen { k, lower: 0.0, upper: 0.0, cos: 1.0, sin: 0.0, a: 0.0, b: 0.0, d: 0.0 });
                }
                let s = block_spectrum_exact(k, alpha, beta)?;
                let kf = k as f64;
                let a = kf * bf + (kf - 1.0) * af;
                let b = kf.sqrt();
                let d = kf * (bf + af);
                // tan(2 theta) = 2b / (a - d), and a - d = -alpha
                let theta = 0.5 * (2.0 * b).atan2(-af);
                Ok(BlockEigen {
                    k,
                    lower: s.lower.to_f64(),
                    upper: s.upper.to_f64(),
                    cos: theta.cos(),
                    sin: theta.sin(),
                    a,
                    b,
                    d,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubspaceDynamics { blocks: data })
    }

    /// The span of blocks `n` and `n + 1`.
    pub fn pair(n: u64, alpha: &ExactEnergy, beta: &ExactEnergy) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("pair index n must be >= 1"));
        }
        SubspaceDynamics::new(&[n, n + 1], alpha, beta)
    }

    pub fn block_indices(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b.k).collect()
    }

    pub fn dimension(&self) -> usize {
        span_dim(&self.block_indices())
    }

    fn check_state(&self, state: &QuantumState) -> Result<()> {
        if state.blocks != self.block_indices() {
            return Err(Error::domain("state span does not match the dynamics span"));
        }
        Ok(())
    }

    /// `sum_j lambda_j exp(-i E_j t) |psi_j>`.
    pub fn evolve(&self, state: &QuantumState, t: f64) -> Result<QuantumState> {
        self.check_state(state)?;
        let mut out = Vec::with_capacity(state.amplitudes.len());
        let mut offset = 0;
        for blk in &self.blocks {
            if blk.k == 0 {
                out.push(state.amplitudes[offset]);
                offset += 1;
                continue;
            }
            let (x, y) = (state.amplitudes[offset], state.amplitudes[offset + 1]);
            let up = x * blk.cos + y * blk.sin;
            let lo = -x * blk.sin + y * blk.cos;
            let up = up * Complex64::from_polar(1.0, -blk.upper * t);
            let lo = lo * Complex64::from_polar(1.0, -blk.lower * t);
            out.push(up * blk.cos - lo * blk.sin);
            out.push(up * blk.sin + lo * blk.cos);
            offset += 2;
        }
        Ok(QuantumState { blocks: state.blocks.clone(), amplitudes: out })
    }

    /// The Hamiltonian restricted to the span, in units of `y`.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let dim = self.dimension();
        let mut h = DMatrix::zeros(dim, dim);
        let mut offset = 0;
        for blk in &self.blocks {
            if blk.k == 0 {
                offset += 1;
                continue;
            }
            h[(offset, offset)] = blk.a;
            h[(offset, offset + 1)] = blk.b;
            h[(offset + 1, offset)] = blk.b;
            h[(offset + 1, offset + 1)] = blk.d;
            offset += 2;
        }
        h
    }

    /// `<psi|H|psi>`.
    pub fn energy_expectation(&self, state: &QuantumState) -> Result<f64> {
        self.check_state(state)?;
        let h = self.hamiltonian().map(|x| Complex64::new(x, 0.0));
        let psi = DVector::from_column_slice(&state.amplitudes);
        Ok((psi.adjoint() * h * &psi)[(0, 0)].re)
    }

    /// The propagator `U(t)` as a matrix; column `j` is the evolved `j`-th
    /// basis vector.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let blocks = self.block_indices();
        let dim = self.dimension();
        let mut u = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let e = QuantumState::basis(blocks.clone(), j).expect("basis index in range");
            let col = self.evolve(&e, t).expect("matching span");
            for (i, a) in col.amplitudes.iter().enumerate() {
                u[(i, j)] = *a;
            }
        }
        u
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| if b.k == 0 { vec![0.0] } else { vec![b.lower, b.upper] })
            .collect()
    }
}

/// `min over phi of max_j |exp(-i theta_j) - exp(i phi)|` for the phases
/// `theta_j = gap_j * t`; with the zero gap included this is the distance of
/// `diag(exp(-i gap_j t))` from the nearest multiple of the identity.
pub fn phase_spread_distance(gaps: &[f64], t: f64) -> f64 {
    let mut angles: Vec<f64> = std::iter::once(0.0)
        .chain(gaps.iter().map(|g| (g * t).rem_euclid(TAU)))
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut widest = TAU - angles[angles.len() - 1] + angles[0];
    for w in angles.windows(2) {
        widest = widest.max(w[1] - w[0]);
    }
    // smallest arc covering all phases; the best phi sits at its midpoint
    let arc = (TAU - widest).max(0.0);
    2.0 * (arc / 4.0).sin()
}

/// Checks full revival of the span of blocks `n`, `n + 1` at chosen times.
#[derive(Clone, Debug)]
pub struct RevivalProbe {
    gaps: Vec<f64>,
}

impl RevivalProbe {
    pub fn pair(n: u64, alpha: &ExactEnergy, beta: &ExactEnergy) -> Result<Self> {
        let spectrum = crate::model::pair_spectrum(n, alpha, beta)?;
        let energies = spectrum.energies();
        // exact differences keep the phases accurate at long times
        let gaps = energies[1..].iter().map(|e| (e - &energies[0]).to_f64()).collect();
        Ok(RevivalProbe { gaps })
    }

    pub fn distance(&self, t: f64) -> f64 {
        phase_spread_distance(&self.gaps, t)
    }
}

/// `min_phi ||U(t) - exp(i phi) I||` on the span of blocks `n`, `n + 1`;
/// zero exactly when every state of the span revives at `t`.
pub fn propagator_identity_distance(
    n: u64,
    t: f64,
    alpha: &ExactEnergy,
    beta: &ExactEnergy,
) -> Result<f64> {
    Ok(RevivalProbe::pair(n, alpha, beta)?.distance(t))
}

/// Convenience wrapper building the dynamics for the state's span.
pub fn evolve(
    state: &QuantumState,
    t: f64,
    alpha: &ExactEnergy,
    beta: &ExactEnergy,
) -> Result<QuantumState> {
    SubspaceDynamics::new(state.blocks(), alpha, beta)?.evolve(state, t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelitySweep {
    pub states: usize,
    pub min_fidelity: f64,
    pub mean_fidelity: f64,
    pub max_norm_error: f64,
}

/// Evolves `count` seeded random states to `t` and records
/// `|<psi(0)|psi(t)>|^2`. States are drawn sequentially from one seeded
/// stream, so the result does not depend on the worker count.
pub fn fidelity_sweep(dynamics: &SubspaceDynamics, t: f64, count: usize, seed: u64) -> Result<FidelitySweep> {
    if count == 0 {
        return Err(Error::Usage("fidelity sweep needs at least one state".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = dynamics.block_indices();
    let states = (0..count)
        .map(|_| QuantumState::random(blocks.clone(), &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let results = states
        .par_iter()
        .map(|psi| {
            let out = dynamics.evolve(psi, t)?;
            Ok((psi.fidelity(&out)?, (out.norm_sqr() - 1.0).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let min_fidelity = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let mean_fidelity = results.iter().map(|r| r.0).sum::<f64>() / count as f64;
    let max_norm_error = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(FidelitySweep { states: count, min_fidelity, mean_fidelity, max_norm_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    fn e(text: &str) -> ExactEnergy {
        text.parse().unwrap()
    }

    fn synthesized() -> (ExactEnergy, ExactEnergy) {
        (e("2*sqrt(7)/3"), e("2 - 2*sqrt(7)/3"))
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn state_validation() {
        assert!(QuantumState::new(vec![1, 2], vec![c(1.0, 0.0); 4]).is_err());
        assert!(QuantumState::new(vec![1], vec![c(1.0, 0.0)]).is_err());
        assert!(QuantumState::new(vec![1, 1], vec![c(0.5, 0.0); 4]).is_err());
        assert!(QuantumState::normalized(vec![1], vec![c(0.0, 0.0); 2]).is_err());
        let s = QuantumState::new(vec![0, 1], vec![c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert_eq!(s.labels(), vec![(0, 0), (1, 0), (1, 1)]);
    }

    #[test]
    fn csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = QuantumState::random(vec![3, 4], &mut rng).unwrap();
        let back = QuantumState::from_csv(vec![3, 4], &s.to_csv()).unwrap();
        for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(QuantumState::from_csv(vec![1], "1;0\n0,0").is_err());
        assert!(QuantumState::from_csv(vec![1], "# header\n3,0\n\n0,4\n").is_ok());
    }

    #[test]
    fn zero_time_is_identity() {
        let (a, b) = synthesized();
        let dynamics = SubspaceDynamics::pair(1, &a, &b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = QuantumState::random(vec![1, 2], &mut rng).unwrap();
        let out = dynamics.evolve(&s, 0.0).unwrap();
        for (x, y) in out.amplitudes().iter().zip(s.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
        assert_eq!(propagator_identity_distance(1, 0.0, &a, &b).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_diagonalizes_blocks() {
        for (alpha, beta) in [("0", "1"), ("2*sqrt(7)/3", "2 - 2*sqrt(7)/3"), ("-3/2", "5")] {
            let dynamics = SubspaceDynamics::new(&[0, 1, 2, 7], &e(alpha), &e(beta)).unwrap();
            let h = dynamics.hamiltonian();
            let mut oracle: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
            oracle.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mut closed = dynamics.eigenvalues();
            closed.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (x, y) in oracle.iter().zip(&closed) {
                assert!((x - y).abs() < 1e-10, "{alpha} {beta}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn eigenstates_only_pick_up_a_phase() {
        let (a, b) = synthesized();
        let dynamics = SubspaceDynamics::new(&[1, 2], &a, &b).unwrap();
        let blk = &dynamics.blocks[1];
        // upper eigenvector of block 2
        let psi = QuantumState::new(vec![1, 2], vec![c(0.0, 0.0), c(0.0, 0.0), c(blk.cos, 0.0), c(blk.sin, 0.0)])
            .unwrap();
        for t in [0.3, 17.0, 1234.5] {
            let out = dynamics.evolve(&psi, t).unwrap();
            assert!((psi.fidelity(&out).unwrap() - 1.0).abs() < 1e-12);
            let phase = psi.inner(&out).unwrap();
            let expected = Complex64::from_polar(1.0, -blk.upper * t);
            assert!((phase - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn synthesized_pair_revives_at_six_pi() {
        let (a, b) = synthesized();
        let t = 6.0 * std::f64::consts::PI;
        assert!(propagator_identity_distance(1, t, &a, &b).unwrap() <= 1e-6);
        let dynamics = SubspaceDynamics::pair(1, &a, &b).unwrap();
        let sweep = fidelity_sweep(&dynamics, t, 50, 11).unwrap();
        assert!(sweep.min_fidelity >= 1.0 - 1e-6);
    }

    #[test]
    fn resonant_pair_never_revives_on_grid() {
        let (a, b) = (ExactEnergy::zero(), ExactEnergy::from_integer(1));
        let probe = RevivalProbe::pair(1, &a, &b).unwrap();
        let worst = (1..=1000).map(|k| probe.distance(k as f64 / 10.0)).fold(f64::INFINITY, f64::min);
        assert!(worst > 1e-3, "{worst}");
    }

    /// Brute-force oracle: scan phi and take the operator norm by SVD.
    fn distance_oracle(u: &DMatrix<Complex64>) -> f64 {
        let dim = u.nrows();
        let eye = DMatrix::<Complex64>::identity(dim, dim);
        let norm_at = |phi: f64| {
            let m = u - &eye * Complex64::from_polar(1.0, phi);
            m.singular_values().max()
        };
        let steps = 2_000;
        let mut best = (f64::INFINITY, 0.0);
        for s in 0..steps {
            let phi = TAU * s as f64 / steps as f64;
            let v = norm_at(phi);
            if v < best.0 {
                best = (v, phi);
            }
        }
        // golden-section refinement around the grid minimum
        let (mut lo, mut hi) = (best.1 - TAU / steps as f64, best.1 + TAU / steps as f64);
        for _ in 0..100 {
            let m1 = lo + (hi - lo) * 0.382;
            let m2 = lo + (hi - lo) * 0.618;
            if norm_at(m1) < norm_at(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        norm_at(0.5 * (lo + hi)).min(best.0)
    }

    #[test]
    fn distance_matches_svd_oracle() {
        let cases = [("2*sqrt(7)/3", "2 - 2*sqrt(7)/3"), ("0", "1"), ("1/2", "3")];
        for (alpha, beta) in cases {
            let (a, b) = (e(alpha), e(beta));
            let dynamics = SubspaceDynamics::pair(2, &a, &b).unwrap();
            for t in [0.1, 1.0, 2.5, 9.42, 40.0] {
                let fast = propagator_identity_distance(2, t, &a, &b).unwrap();
                let slow = distance_oracle(&dynamics.propagator(t));
                assert!((fast - slow).abs() < 1e-7, "{alpha} t={t}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn propagator_is_unitary() {
        let (a, b) = synthesized();
        let dynamics = SubspaceDynamics::new(&[0, 1, 2, 5], &a, &b).unwrap();
        let u = dynamics.propagator(3.7);
        let err = (u.adjoint() * &u - DMatrix::identity(7, 7)).norm();
        assert!(err < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn composition_and_conservation(
            seed in any::<u64>(),
            s in 0.0f64..50.0,
            t in 0.0f64..50.0,
            alpha in -20i64..20,
            beta in 1i64..40,
            n in 1u64..20,
        ) {
            let a = ExactEnergy::from_rational(crate::exact::rational(alpha, 7));
            let b = ExactEnergy::from_rational(crate::exact::rational(beta, 3));
            let dynamics = SubspaceDynamics::pair(n, &a, &b).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = QuantumState::random(vec![n, n + 1], &mut rng).unwrap();
            let two_step = dynamics.evolve(&dynamics.evolve(&psi, s).unwrap(), t).unwrap();
            let one_step = dynamics.evolve(&psi, s + t).unwrap();
            for (x, y) in two_step.amplitudes().iter().zip(one_step.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-10);
            }
            prop_assert!((one_step.norm_sqr() - 1.0).abs() < 1e-12);
            let e0 = dynamics.energy_expectation(&psi).unwrap();
            let e1 = dynamics.energy_expectation(&one_step).unwrap();
            prop_assert!((e0 - e1).abs() < 1e-10 * (1.0 + e0.abs()));
        }
    }
}
