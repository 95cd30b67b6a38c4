//! Truncated-Fock-space linear algebra.
//!
//! Every mode lives in the first `D` Fock levels. Operators are dense complex
//! matrices over that basis (or its two-mode tensor square), states are flat
//! amplitude tensors with mode 0 as the slowest-varying index. Gates are
//! applied by contracting the gate matrix against the target-mode indices
//! only, so the full `D^N x D^N` matrix of a circuit is never materialized.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for the Hermiticity contract on generators.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance for unitarity of constructed gates.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance for state-norm preservation under gate application.
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance on the imaginary residue of Hermitian expectation values.
pub const EXPECT_IMAG_TOL: f64 = 1e-9;

/// Dense operator over a truncated Fock basis.
///
/// `dim` is `D` for single-mode operators and `D^arity` otherwise. The `hbar`
/// tag records the quadrature convention the operator was built with; ladder
/// and number operators are convention-free and carry `None`. Combining
/// operators with conflicting tags is a contract error.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    dim: usize,
    arity: usize,
    hbar: Option<f64>,
    entries: DMatrix<Complex64>,
}

pub(crate) fn merge_hbar(a: Option<f64>, b: Option<f64>) -> Result<Option<f64>> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(Error::HbarMismatch(x, y)),
        (Some(x), _) => Ok(Some(x)),
        (_, y) => Ok(y),
    }
}

impl TruncatedOperator {
    pub(crate) fn from_matrix(
        entries: DMatrix<Complex64>,
        arity: usize,
        hbar: Option<f64>,
    ) -> Self {
        debug_assert_eq!(entries.nrows(), entries.ncols());
        TruncatedOperator {
            dim: entries.nrows(),
            arity,
            hbar,
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn hbar(&self) -> Option<f64> {
        self.hbar
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// Identity on a `dim`-dimensional truncated space.
    pub fn identity_of_dim(dim: usize, arity: usize) -> Self {
        TruncatedOperator::from_matrix(DMatrix::identity(dim, dim), arity, None)
    }

    /// Single-mode identity at cutoff `d`.
    pub fn identity(d: usize) -> Result<Self> {
        check_cutoff(d)?;
        Ok(Self::identity_of_dim(d, 1))
    }

    /// Annihilation operator: `<n-1| a |n> = sqrt(n)`.
    pub fn annihilation(d: usize) -> Result<Self> {
        check_cutoff(d)?;
        let mut m = DMatrix::zeros(d, d);
        for n in 1..d {
            m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        Ok(TruncatedOperator::from_matrix(m, 1, None))
    }

    /// Creation operator, the adjoint of [`Self::annihilation`].
    pub fn creation(d: usize) -> Result<Self> {
        Ok(Self::annihilation(d)?.adjoint())
    }

    /// Photon-number operator `diag(0, 1, ..., d-1)`.
    pub fn number(d: usize) -> Result<Self> {
        check_cutoff(d)?;
        let m = DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::new(r as f64, 0.0)
            } else {
                Complex64::ZERO
            }
        });
        Ok(TruncatedOperator::from_matrix(m, 1, None))
    }

    /// Position and momentum quadratures:
    /// `x = sqrt(hbar/2) (a + a^dag)`, `p = i sqrt(hbar/2) (a^dag - a)`.
    pub fn quadratures(d: usize, hbar: f64) -> Result<(Self, Self)> {
        check_cutoff(d)?;
        let a = Self::annihilation(d)?;
        let ad = a.adjoint();
        let s = (hbar / 2.0).sqrt();
        let x = (&a.entries + &ad.entries) * Complex64::new(s, 0.0);
        let p = (&ad.entries - &a.entries) * Complex64::new(0.0, s);
        Ok((
            TruncatedOperator::from_matrix(x, 1, Some(hbar)),
            TruncatedOperator::from_matrix(p, 1, Some(hbar)),
        ))
    }

    pub fn position(d: usize, hbar: f64) -> Result<Self> {
        Ok(Self::quadratures(d, hbar)?.0)
    }

    pub fn momentum(d: usize, hbar: f64) -> Result<Self> {
        Ok(Self::quadratures(d, hbar)?.1)
    }

    pub fn adjoint(&self) -> Self {
        TruncatedOperator::from_matrix(self.entries.adjoint(), self.arity, self.hbar)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TruncatedOperator::from_matrix(&self.entries * c, self.arity, self.hbar)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(TruncatedOperator::from_matrix(
            &self.entries + &other.entries,
            self.arity,
            merge_hbar(self.hbar, other.hbar)?,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(TruncatedOperator::from_matrix(
            &self.entries - &other.entries,
            self.arity,
            merge_hbar(self.hbar, other.hbar)?,
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(TruncatedOperator::from_matrix(
            &self.entries * &other.entries,
            self.arity,
            merge_hbar(self.hbar, other.hbar)?,
        ))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        ab.sub(&ba)
    }

    /// Tensor product with `self` on the slower-varying factor.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let hbar = merge_hbar(self.hbar, other.hbar)?;
        Ok(TruncatedOperator::from_matrix(
            self.entries.kronecker(&other.entries),
            self.arity + other.arity,
            hbar,
        ))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator dims {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// Max-norm deviation from `M = M^dag`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                let d = (self.entries[(r, c)] - self.entries[(c, r)].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Max-norm of `U^dag U - I`.
    pub fn unitary_deviation(&self) -> f64 {
        let prod = self.entries.adjoint() * &self.entries;
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let expected = if r == c {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                dev = dev.max((prod[(r, c)] - expected).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_deviation() <= tol
    }

    /// `exp(i s G)` of a Hermitian generator `G`, via eigendecomposition.
    ///
    /// The result is unitary to machine precision in the truncated space
    /// regardless of how the generator is distorted near the cutoff edge.
    pub fn hermitian_exp(&self, s: f64) -> Result<Self> {
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let eig = self.entries.clone().symmetric_eigen();
        let phases: Vec<Complex64> = eig
            .eigenvalues
            .iter()
            .map(|&v| Complex64::cis(s * v))
            .collect();
        let mut scaled = eig.eigenvectors.clone();
        for (c, ph) in phases.iter().enumerate() {
            for r in 0..self.dim {
                scaled[(r, c)] *= ph;
            }
        }
        let u = scaled * eig.eigenvectors.adjoint();
        Ok(TruncatedOperator::from_matrix(u, self.arity, self.hbar))
    }
}

/// Pure state of `N` modes at cutoff `D`.
///
/// Amplitudes are stored flat with mode 0 slowest: the basis index of a
/// pattern `(n_0, ..., n_{N-1})` is `sum_i n_i * D^(N-1-i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    modes: usize,
    cutoff: usize,
    amps: Vec<Complex64>,
}

fn check_cutoff(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidCutoff(d));
    }
    Ok(())
}

impl ModeState {
    /// All modes in the vacuum state `|0,...,0>`.
    pub fn vacuum(modes: usize, cutoff: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::NoModes);
        }
        check_cutoff(cutoff)?;
        let len = cutoff.pow(modes as u32);
        let mut amps = vec![Complex64::ZERO; len];
        amps[0] = Complex64::ONE;
        Ok(ModeState {
            modes,
            cutoff,
            amps,
        })
    }

    /// Basis state `|pattern>`.
    pub fn fock_basis(pattern: &[usize], cutoff: usize) -> Result<Self> {
        let mut st = Self::vacuum(pattern.len(), cutoff)?;
        for (&n, _) in pattern.iter().zip(0..) {
            if n >= cutoff {
                return Err(Error::DimensionMismatch(format!(
                    "pattern level {n} exceeds cutoff {cutoff}"
                )));
            }
        }
        st.amps[0] = Complex64::ZERO;
        let idx = st.index_of(pattern);
        st.amps[idx] = Complex64::ONE;
        Ok(st)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn index_of(&self, pattern: &[usize]) -> usize {
        debug_assert_eq!(pattern.len(), self.modes);
        pattern.iter().fold(0, |acc, &n| acc * self.cutoff + n)
    }

    pub fn pattern_of(&self, mut index: usize) -> Vec<usize> {
        let mut pattern = vec![0usize; self.modes];
        for m in (0..self.modes).rev() {
            pattern[m] = index % self.cutoff;
            index /= self.cutoff;
        }
        pattern
    }

    pub fn amplitude(&self, pattern: &[usize]) -> Complex64 {
        self.amps[self.index_of(pattern)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_targets(&self, targets: &[usize], arity: usize) -> Result<()> {
        if targets.len() != arity {
            return Err(Error::DimensionMismatch(format!(
                "operator arity {} but {} targets given",
                arity,
                targets.len()
            )));
        }
        for &t in targets {
            if t >= self.modes {
                return Err(Error::ModeOutOfRange {
                    index: t,
                    modes: self.modes,
                });
            }
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::DuplicateTarget(targets[0]));
        }
        Ok(())
    }

    /// Apply a unitary gate to the listed target modes.
    ///
    /// For two-mode gates the first listed target is the slower-varying index
    /// of the gate's `D^2`-dimensional basis. Norm preservation is enforced
    /// to [`NORM_TOL`] after the contraction.
    pub fn apply_gate(&self, u: &TruncatedOperator, targets: &[usize]) -> Result<ModeState> {
        let mut out = self.clone();
        out.apply_gate_mut(u, targets)?;
        Ok(out)
    }

    pub fn apply_gate_mut(&mut self, u: &TruncatedOperator, targets: &[usize]) -> Result<()> {
        self.apply_operator_mut(u, targets)?;
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NormDrift(norm));
        }
        Ok(())
    }

    /// Contract an arbitrary (not necessarily unitary) operator against the
    /// target modes, without the norm check.
    pub(crate) fn apply_operator_mut(
        &mut self,
        u: &TruncatedOperator,
        targets: &[usize],
    ) -> Result<()> {
        if u.arity > 2 {
            return Err(Error::DimensionMismatch(format!(
                "gate application supports 1 or 2 modes, got arity {}",
                u.arity
            )));
        }
        self.check_targets(targets, u.arity)?;
        let expected = self.cutoff.pow(u.arity as u32);
        if u.dim != expected {
            return Err(Error::DimensionMismatch(format!(
                "gate dim {} does not match cutoff {} at arity {}",
                u.dim, self.cutoff, u.arity
            )));
        }
        match u.arity {
            1 => self.contract_single(u.entries.as_slice(), targets[0], false),
            _ => self.contract_pair(u.entries.as_slice(), targets[0], targets[1], false),
        }
        Ok(())
    }

    pub(crate) fn contract_single_checked(
        &mut self,
        matrix: &DMatrix<Complex64>,
        target: usize,
        adjoint: bool,
    ) {
        self.contract_single(matrix.as_slice(), target, adjoint);
    }

    pub(crate) fn contract_pair_checked(
        &mut self,
        matrix: &DMatrix<Complex64>,
        t_slow: usize,
        t_fast: usize,
        adjoint: bool,
    ) {
        self.contract_pair(matrix.as_slice(), t_slow, t_fast, adjoint);
    }

    /// `data` is the column-major `d x d` matrix.
    fn contract_single(&mut self, data: &[Complex64], target: usize, adjoint: bool) {
        let d = self.cutoff;
        let inner = d.pow((self.modes - 1 - target) as u32);
        let block = d * inner;
        let len = self.amps.len();
        let mut x = vec![Complex64::ZERO; d];
        let mut y = vec![Complex64::ZERO; d];
        let mut base0 = 0;
        while base0 < len {
            for k in 0..inner {
                let base = base0 + k;
                for n in 0..d {
                    x[n] = self.amps[base + n * inner];
                }
                matvec(data, d, &x, &mut y, adjoint);
                for n in 0..d {
                    self.amps[base + n * inner] = y[n];
                }
            }
            base0 += block;
        }
    }

    /// `data` is the column-major `d^2 x d^2` matrix; `t_slow` indexes the
    /// slower-varying factor of the gate basis.
    fn contract_pair(&mut self, data: &[Complex64], t_slow: usize, t_fast: usize, adjoint: bool) {
        let d = self.cutoff;
        let d2 = d * d;
        let s1 = d.pow((self.modes - 1 - t_slow) as u32);
        let s2 = d.pow((self.modes - 1 - t_fast) as u32);
        let mut x = vec![Complex64::ZERO; d2];
        let mut y = vec![Complex64::ZERO; d2];
        let mut free = FreeIndexIter::new(self.modes, self.cutoff, &[t_slow, t_fast]);
        while let Some(base) = free.next() {
            for a in 0..d {
                let row = base + a * s1;
                for b in 0..d {
                    x[a * d + b] = self.amps[row + b * s2];
                }
            }
            matvec(data, d2, &x, &mut y, adjoint);
            for a in 0..d {
                let row = base + a * s1;
                for b in 0..d {
                    self.amps[row + b * s2] = y[a * d + b];
                }
            }
        }
    }

    /// Multiply target-mode levels by per-level phases (diagonal gate).
    pub(crate) fn apply_phases_single(&mut self, phases: &[Complex64], target: usize) {
        let d = self.cutoff;
        let inner = d.pow((self.modes - 1 - target) as u32);
        let block = d * inner;
        let len = self.amps.len();
        let mut base0 = 0;
        while base0 < len {
            for n in 0..d {
                let ph = phases[n];
                let start = base0 + n * inner;
                for amp in &mut self.amps[start..start + inner] {
                    *amp *= ph;
                }
            }
            base0 += block;
        }
    }

    /// Diagonal two-mode gate: phases indexed by `a*d + b` over the pair.
    pub(crate) fn apply_phases_pair(&mut self, phases: &[Complex64], t_slow: usize, t_fast: usize) {
        let d = self.cutoff;
        let s1 = d.pow((self.modes - 1 - t_slow) as u32);
        let s2 = d.pow((self.modes - 1 - t_fast) as u32);
        let mut free = FreeIndexIter::new(self.modes, self.cutoff, &[t_slow, t_fast]);
        while let Some(base) = free.next() {
            for a in 0..d {
                let row = base + a * s1;
                for b in 0..d {
                    self.amps[row + b * s2] *= phases[a * d + b];
                }
            }
        }
    }

    /// `<psi| O_mode |psi>` for a single-mode Hermitian observable.
    pub fn expect(&self, o: &TruncatedOperator, mode: usize) -> Result<f64> {
        if o.arity != 1 {
            return Err(Error::DimensionMismatch(format!(
                "expectation requires a single-mode operator, got arity {}",
                o.arity
            )));
        }
        let dev = o.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let mut transformed = self.clone();
        transformed.apply_operator_mut(o, &[mode])?;
        let mut acc = Complex64::ZERO;
        for (a, b) in self.amps.iter().zip(transformed.amps.iter()) {
            acc += a.conj() * b;
        }
        if acc.im.abs() >= EXPECT_IMAG_TOL {
            return Err(Error::ImaginaryResidue(acc.im));
        }
        Ok(acc.re)
    }

    /// Mean photon number of one mode.
    pub fn mean_photon(&self, mode: usize) -> Result<f64> {
        self.expect(&TruncatedOperator::number(self.cutoff)?, mode)
    }

    /// Mean position quadrature of one mode.
    pub fn mean_position(&self, mode: usize, hbar: f64) -> Result<f64> {
        self.expect(&TruncatedOperator::position(self.cutoff, hbar)?, mode)
    }

    /// All Fock patterns with probability strictly above `threshold`.
    pub fn fock_probabilities(&self, threshold: f64) -> Result<BTreeMap<Vec<usize>, f64>> {
        if threshold < 0.0 {
            return Err(Error::NegativeThreshold(threshold));
        }
        let mut out = BTreeMap::new();
        for (idx, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if p > threshold {
                out.insert(self.pattern_of(idx), p);
            }
        }
        Ok(out)
    }

    /// Marginal photon-number distribution of one mode.
    pub fn fock_marginal(&self, mode: usize) -> Result<Vec<f64>> {
        if mode >= self.modes {
            return Err(Error::ModeOutOfRange {
                index: mode,
                modes: self.modes,
            });
        }
        let d = self.cutoff;
        let inner = d.pow((self.modes - 1 - mode) as u32);
        let block = d * inner;
        let mut marginal = vec![0.0; d];
        let len = self.amps.len();
        let mut base0 = 0;
        while base0 < len {
            for n in 0..d {
                let start = base0 + n * inner;
                marginal[n] += self.amps[start..start + inner]
                    .iter()
                    .map(|a| a.norm_sqr())
                    .sum::<f64>();
            }
            base0 += block;
        }
        Ok(marginal)
    }

    /// Total probability of patterns with any mode at the top retained level.
    ///
    /// This is the cutoff-validity diagnostic: runs are flagged when it
    /// exceeds the truncation-safety threshold.
    pub fn edge_population(&self) -> f64 {
        let d = self.cutoff;
        let mut total = 0.0;
        for (idx, amp) in self.amps.iter().enumerate() {
            let mut rem = idx;
            let mut at_edge = false;
            for _ in 0..self.modes {
                if rem % d == d - 1 {
                    at_edge = true;
                    break;
                }
                rem /= d;
            }
            if at_edge {
                total += amp.norm_sqr();
            }
        }
        total
    }
}

/// y = M x or y = M^dag x for a column-major `dim x dim` matrix.
fn matvec(data: &[Complex64], dim: usize, x: &[Complex64], y: &mut [Complex64], adjoint: bool) {
    if adjoint {
        for r in 0..dim {
            let row = &data[r * dim..(r + 1) * dim];
            let mut acc = Complex64::ZERO;
            for c in 0..dim {
                acc += row[c].conj() * x[c];
            }
            y[r] = acc;
        }
    } else {
        y.fill(Complex64::ZERO);
        for c in 0..dim {
            let xc = x[c];
            if xc.re == 0.0 && xc.im == 0.0 {
                continue;
            }
            let col = &data[c * dim..(c + 1) * dim];
            for r in 0..dim {
                y[r] += col[r] * xc;
            }
        }
    }
}

/// Iterates base offsets over all configurations of the non-target modes.
struct FreeIndexIter {
    strides: Vec<usize>,
    digits: Vec<usize>,
    cutoff: usize,
    base: usize,
    done: bool,
}

impl FreeIndexIter {
    fn new(modes: usize, cutoff: usize, targets: &[usize]) -> Self {
        let strides: Vec<usize> = (0..modes)
            .filter(|m| !targets.contains(m))
            .map(|m| cutoff.pow((modes - 1 - m) as u32))
            .collect();
        let digits = vec![0usize; strides.len()];
        FreeIndexIter {
            strides,
            digits,
            cutoff,
            base: 0,
            done: false,
        }
    }

    fn next(&mut self) -> Option<usize> {
        if self.done {
            return None;
        }
        let current = self.base;
        let mut i = self.strides.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            self.base += self.strides[i];
            if self.digits[i] < self.cutoff {
                break;
            }
            self.base -= self.cutoff * self.strides[i];
            self.digits[i] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn annihilation_rows() {
        let a = TruncatedOperator::annihilation(3).unwrap();
        // a|1> = |0>, a|2> = sqrt(2)|1>, a|0> = 0
        assert_eq!(a.entry(0, 1), c(1.0));
        assert_eq!(a.entry(1, 2), c(2.0_f64.sqrt()));
        for r in 0..3 {
            assert_eq!(a.entry(r, 0), c(0.0));
        }
    }

    #[test]
    fn annihilation_minimal_cutoff() {
        let a = TruncatedOperator::annihilation(2).unwrap();
        let mut nonzero = 0;
        for r in 0..2 {
            for col in 0..2 {
                if a.entry(r, col).norm() > 0.0 {
                    nonzero += 1;
                    assert_eq!((r, col), (0, 1));
                    assert_eq!(a.entry(r, col), c(1.0));
                }
            }
        }
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn annihilation_rejects_small_cutoff() {
        assert!(matches!(
            TruncatedOperator::annihilation(1),
            Err(Error::InvalidCutoff(1))
        ));
    }

    #[test]
    fn number_operator_identity() {
        let d = 5;
        let a = TruncatedOperator::annihilation(d).unwrap();
        let n = a.adjoint().mul(&a).unwrap();
        for k in 0..d {
            assert!((n.entry(k, k) - c(k as f64)).norm() < 1e-14);
        }
        assert!(
            n.sub(&TruncatedOperator::number(d).unwrap())
                .unwrap()
                .entries()
                .norm()
                < 1e-14
        );
    }

    #[test]
    fn vacuum_quadrature_variance() {
        let (x, _) = TruncatedOperator::quadratures(10, 2.0).unwrap();
        let st = ModeState::vacuum(1, 10).unwrap();
        let x2 = x.mul(&x).unwrap();
        let var = st.expect(&x2, 0).unwrap();
        assert!(
            (var - 1.0).abs() < 1e-12,
            "vacuum <x^2> = hbar/2, got {var}"
        );
    }

    #[test]
    fn canonical_commutator_away_from_edge() {
        let d = 10;
        let hbar = 2.0;
        let (x, p) = TruncatedOperator::quadratures(d, hbar).unwrap();
        let comm = x.commutator(&p).unwrap();
        // [x, p] |n> = i hbar |n> for n <= D-2; the top level carries the
        // truncation artifact.
        for n in 0..d {
            let mut col_ok = true;
            for r in 0..d {
                let expected = if r == n {
                    Complex64::new(0.0, hbar)
                } else {
                    Complex64::ZERO
                };
                if (comm.entry(r, n) - expected).norm() > 1e-12 {
                    col_ok = false;
                }
            }
            if n <= d - 2 - 1 {
                // exact below the last two levels
                assert!(col_ok, "commutator violated at interior level {n}");
            }
        }
        // violation is confined to n in {D-2, D-1}
        let mut violating: Vec<usize> = Vec::new();
        for n in 0..d {
            for r in 0..d {
                let expected = if r == n {
                    Complex64::new(0.0, hbar)
                } else {
                    Complex64::ZERO
                };
                if (comm.entry(r, n) - expected).norm() > 1e-12 {
                    violating.push(n);
                    break;
                }
            }
        }
        assert!(
            violating.iter().all(|&n| n >= d - 2),
            "violations outside the truncation edge: {violating:?}"
        );
        assert!(!violating.is_empty());
    }

    #[test]
    fn hermitian_exp_diagonal_generator() {
        let d = 4;
        let n = TruncatedOperator::number(d).unwrap();
        let phi = 0.37;
        let u = n.hermitian_exp(phi).unwrap();
        for k in 0..d {
            assert!((u.entry(k, k) - Complex64::cis(phi * k as f64)).norm() < 1e-12);
        }
        assert!(u.unitary_deviation() < 1e-12);
    }

    #[test]
    fn hermitian_exp_zero_is_identity() {
        let (x, _) = TruncatedOperator::quadratures(8, 2.0).unwrap();
        let u = x.hermitian_exp(0.0).unwrap();
        let id = TruncatedOperator::identity(8).unwrap();
        assert!(u.sub(&id).unwrap().entries().norm() < 1e-12);
    }

    #[test]
    fn hermitian_exp_rejects_non_hermitian() {
        let a = TruncatedOperator::annihilation(5).unwrap();
        assert!(matches!(a.hermitian_exp(1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn vacuum_state_layout() {
        let st = ModeState::vacuum(1, 3).unwrap();
        assert_eq!(st.amplitudes(), &[c(1.0), c(0.0), c(0.0)]);
        let st2 = ModeState::vacuum(2, 2).unwrap();
        assert_eq!(st2.amplitude(&[0, 0]), c(1.0));
        assert_eq!(st2.norm_sqr(), 1.0);
    }

    #[test]
    fn identity_gate_is_noop() {
        let d = 4;
        let mut st = ModeState::vacuum(2, d).unwrap();
        let (x, _) = TruncatedOperator::quadratures(d, 2.0).unwrap();
        let disp = x.hermitian_exp(0.4).unwrap();
        st.apply_gate_mut(&disp, &[1]).unwrap();
        let before = st.clone();
        st.apply_gate_mut(&TruncatedOperator::identity(d).unwrap(), &[0])
            .unwrap();
        for (a, b) in st.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn expectation_of_vacuum() {
        let st = ModeState::vacuum(2, 6).unwrap();
        assert_eq!(st.mean_photon(0).unwrap(), 0.0);
        assert_eq!(st.mean_position(1, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn index_pattern_roundtrip() {
        let st = ModeState::vacuum(3, 4).unwrap();
        for idx in 0..st.amplitudes().len() {
            let pat = st.pattern_of(idx);
            assert_eq!(st.index_of(&pat), idx);
        }
        // mode 0 is the slowest index
        assert_eq!(st.index_of(&[1, 0, 0]), 16);
        assert_eq!(st.index_of(&[0, 0, 1]), 1);
    }

    #[test]
    fn fock_probabilities_vacuum() {
        let st = ModeState::vacuum(3, 3).unwrap();
        let probs = st.fock_probabilities(0.0).unwrap();
        assert_eq!(probs.len(), 1);
        assert!((probs[&vec![0, 0, 0]] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fock_probabilities_rejects_negative_threshold() {
        let st = ModeState::vacuum(1, 3).unwrap();
        assert!(st.fock_probabilities(-0.1).is_err());
    }

    #[test]
    fn edge_population_counts_top_level() {
        let st = ModeState::fock_basis(&[2, 0], 3).unwrap();
        assert!((st.edge_population() - 1.0).abs() < 1e-15);
        let st = ModeState::fock_basis(&[1, 0], 3).unwrap();
        assert_eq!(st.edge_population(), 0.0);
    }

    #[test]
    fn two_mode_contraction_matches_kron() {
        // Contract a random-ish two-mode unitary against a 3-mode state and
        // compare with the explicit kron-product action on the full space.
        let d = 3;
        let hbar = 2.0;
        let (x, p) = TruncatedOperator::quadratures(d, hbar).unwrap();
        let gen = x.kron(&p).unwrap();
        let sym = gen.add(&gen.adjoint()).unwrap().scale(c(0.5));
        let u = sym.hermitian_exp(0.7).unwrap();

        let mut st = ModeState::vacuum(3, d).unwrap();
        let disp = x.hermitian_exp(0.3).unwrap();
        st.apply_gate_mut(&disp, &[0]).unwrap();
        st.apply_gate_mut(&disp, &[2]).unwrap();

        // direct contraction on modes (2, 0): slower index is mode 2
        let direct = st.apply_gate(&u, &[2, 0]).unwrap();

        // dense reference: permute into (mode2, mode0) pair explicitly
        let n = st.amplitudes().len();
        let mut reference = vec![Complex64::ZERO; n];
        for idx in 0..n {
            let pat = st.pattern_of(idx);
            let mut acc = Complex64::ZERO;
            for a in 0..d {
                for b in 0..d {
                    let mut src = pat.clone();
                    src[2] = a;
                    src[0] = b;
                    let col = a * d + b;
                    let row = pat[2] * d + pat[0];
                    acc += u.entry(row, col) * st.amplitude(&src);
                }
            }
            reference[idx] = acc;
        }
        for (got, want) in direct.amplitudes().iter().zip(reference.iter()) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn expectation_is_linear_and_phase_invariant() {
        let d = 8;
        let hbar = 2.0;
        let (x, p) = TruncatedOperator::quadratures(d, hbar).unwrap();
        let n = TruncatedOperator::number(d).unwrap();
        let mut st = ModeState::vacuum(2, d).unwrap();
        let disp = x.hermitian_exp(0.35).unwrap();
        st.apply_gate_mut(&disp, &[0]).unwrap();
        st.apply_gate_mut(&p.hermitian_exp(0.2).unwrap(), &[1])
            .unwrap();

        // linearity in the observable
        let combo = x.scale(c(1.7)).add(&n.scale(c(-0.6))).unwrap();
        let lhs = st.expect(&combo, 0).unwrap();
        let rhs = 1.7 * st.expect(&x, 0).unwrap() - 0.6 * st.expect(&n, 0).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);

        // global phase of the state
        let mut phased = st.clone();
        for amp in phased.amps.iter_mut() {
            *amp *= Complex64::cis(1.234);
        }
        assert!((phased.expect(&x, 0).unwrap() - st.expect(&x, 0).unwrap()).abs() < 1e-12);
        assert!((phased.expect(&n, 1).unwrap() - st.expect(&n, 1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn marginal_sums_to_one() {
        let d = 4;
        let mut st = ModeState::vacuum(2, d).unwrap();
        let (x, _) = TruncatedOperator::quadratures(d, 2.0).unwrap();
        st.apply_gate_mut(&x.hermitian_exp(0.5).unwrap(), &[0])
            .unwrap();
        let m = st.fock_marginal(0).unwrap();
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
