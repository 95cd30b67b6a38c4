//! Symbolic normal-ordered polynomials in per-mode ladder operators.
//!
//! A monomial is stored as one `(creation, annihilation)` exponent pair per
//! mode, always normal-ordered (all creation operators to the left within
//! each mode). Products are reordered with `[a_i, a_j^dag] = delta_ij`, which
//! for a single mode gives
//!
//! `a^m a^dag^n = sum_k k! C(m,k) C(n,k) a^dag^(n-k) a^(m-k)`.
//!
//! Coefficients are complex doubles; terms with magnitude below
//! [`PRUNE_TOL`] are dropped.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{merge_hbar, TruncatedOperator};

/// Coefficients below this magnitude are pruned after every operation.
pub const PRUNE_TOL: f64 = 1e-12;

/// Per-mode `(creation, annihilation)` exponents of a normal-ordered monomial.
pub type MonomialKey = Vec<(u8, u8)>;

/// Normal-ordered polynomial in the ladder operators of `modes` qumodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonPolynomial {
    modes: usize,
    hbar: Option<f64>,
    terms: BTreeMap<MonomialKey, Complex64>,
}

fn factorial(k: u8) -> f64 {
    (1..=k as u64).map(|v| v as f64).product()
}

fn binomial(n: u8, k: u8) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// Normal-ordered expansion of the single-mode product
/// `(a^dag^c1 a^a1) (a^dag^c2 a^a2)`.
fn mode_product(lhs: (u8, u8), rhs: (u8, u8)) -> Vec<((u8, u8), f64)> {
    let (c1, a1) = lhs;
    let (c2, a2) = rhs;
    let kmax = a1.min(c2);
    (0..=kmax)
        .map(|k| {
            let w = factorial(k) * binomial(a1, k) * binomial(c2, k);
            ((c1 + c2 - k, a1 + a2 - k), w)
        })
        .collect()
}

pub(crate) fn key_dagger(key: &MonomialKey) -> MonomialKey {
    key.iter().map(|&(c, a)| (a, c)).collect()
}

pub(crate) fn key_degree(key: &MonomialKey) -> usize {
    key.iter().map(|&(c, a)| (c + a) as usize).sum()
}

pub(crate) fn key_arity(key: &MonomialKey) -> usize {
    key.iter().filter(|&&(c, a)| c != 0 || a != 0).count()
}

impl BosonPolynomial {
    pub fn zero(modes: usize) -> Self {
        BosonPolynomial {
            modes,
            hbar: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(modes: usize, value: Complex64) -> Self {
        let mut p = Self::zero(modes);
        if value.norm() > PRUNE_TOL {
            p.terms.insert(vec![(0, 0); modes], value);
        }
        p
    }

    /// A single normal-ordered monomial given as `(mode, creation, annihilation)`
    /// factors; unlisted modes carry the identity.
    pub fn monomial(modes: usize, factors: &[(usize, u8, u8)], coeff: Complex64) -> Self {
        let mut key = vec![(0u8, 0u8); modes];
        for &(m, c, a) in factors {
            key[m] = (key[m].0 + c, key[m].1 + a);
        }
        let mut p = Self::zero(modes);
        if coeff.norm() > PRUNE_TOL {
            p.terms.insert(key, coeff);
        }
        p
    }

    /// The number operator `a_m^dag a_m`.
    pub fn number(modes: usize, mode: usize) -> Self {
        Self::monomial(modes, &[(mode, 1, 1)], Complex64::ONE)
    }

    /// Position quadrature of one mode: `sqrt(hbar/2) (a + a^dag)`.
    pub fn position(modes: usize, mode: usize, hbar: f64) -> Self {
        let s = Complex64::new((hbar / 2.0).sqrt(), 0.0);
        let mut p = Self::monomial(modes, &[(mode, 0, 1)], s);
        p.accumulate(Self::monomial(modes, &[(mode, 1, 0)], s));
        p.hbar = Some(hbar);
        p
    }

    /// Momentum quadrature of one mode: `i sqrt(hbar/2) (a^dag - a)`.
    pub fn momentum(modes: usize, mode: usize, hbar: f64) -> Self {
        let s = Complex64::new(0.0, (hbar / 2.0).sqrt());
        let mut p = Self::monomial(modes, &[(mode, 1, 0)], s);
        p.accumulate(Self::monomial(modes, &[(mode, 0, 1)], -s));
        p.hbar = Some(hbar);
        p
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn hbar(&self) -> Option<f64> {
        self.hbar
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &MonomialKey) -> Complex64 {
        self.terms.get(key).copied().unwrap_or(Complex64::ZERO)
    }

    /// Max total degree over all monomials.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(key_degree).max().unwrap_or(0)
    }

    fn accumulate(&mut self, other: Self) {
        for (k, c) in other.terms {
            let entry = self.terms.entry(k).or_insert(Complex64::ZERO);
            *entry += c;
        }
        self.prune();
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > PRUNE_TOL);
    }

    fn check_modes(&self, other: &Self) -> Result<()> {
        if self.modes != other.modes {
            return Err(Error::ModeCountMismatch(self.modes, other.modes));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_modes(other)?;
        let hbar = merge_hbar(self.hbar, other.hbar)?;
        let mut out = self.clone();
        out.hbar = hbar;
        out.accumulate(other.clone());
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-Complex64::ONE))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_modes(other)?;
        let hbar = merge_hbar(self.hbar, other.hbar)?;
        let modes = self.modes;
        let mut terms: BTreeMap<MonomialKey, Complex64> = BTreeMap::new();
        let mut key_buf: MonomialKey = vec![(0, 0); modes];
        for (k1, &c1) in &self.terms {
            for (k2, &c2) in &other.terms {
                let coeff = c1 * c2;
                // fast path: no reordering needed on any mode
                let needs_expansion = (0..modes).any(|m| k1[m].1 > 0 && k2[m].0 > 0);
                if !needs_expansion {
                    for m in 0..modes {
                        key_buf[m] = (k1[m].0 + k2[m].0, k1[m].1 + k2[m].1);
                    }
                    let entry = terms.entry(key_buf.clone()).or_insert(Complex64::ZERO);
                    *entry += coeff;
                    continue;
                }
                let factors: Vec<Vec<((u8, u8), f64)>> =
                    (0..modes).map(|m| mode_product(k1[m], k2[m])).collect();
                cartesian_accumulate(&factors, coeff, &mut terms);
            }
        }
        terms.retain(|_, c| c.norm() > PRUNE_TOL);
        Ok(BosonPolynomial { modes, hbar, terms })
    }

    /// `A B - B A`, fully normal-ordered.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        ab.sub(&ba)
    }

    pub fn dagger(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (key_dagger(k), c.conj()))
            .collect();
        BosonPolynomial {
            modes: self.modes,
            hbar: self.hbar,
            terms,
        }
    }

    /// Hermiticity check: `coeff(m^dag) = conj(coeff(m))` for every monomial.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (k, c) in &self.terms {
            let other = self.coeff(&key_dagger(k));
            dev = dev.max((other - c.conj()).norm());
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Dense realization: each monomial becomes a product of truncated
    /// ladder matrices (annihilation applied first), summed with its
    /// coefficient. The result acts on all `modes` modes, mode 0 slowest.
    pub fn to_matrix(&self, d: usize) -> Result<TruncatedOperator> {
        if d < 2 {
            return Err(Error::InvalidCutoff(d));
        }
        let a = TruncatedOperator::annihilation(d)?;
        let ad = a.adjoint();
        let max_exp = self
            .terms
            .keys()
            .flat_map(|k| k.iter().flat_map(|&(c, ann)| [c, ann]))
            .max()
            .unwrap_or(0) as usize;
        // power tables
        let mut a_pow = vec![TruncatedOperator::identity(d)?];
        let mut ad_pow = vec![TruncatedOperator::identity(d)?];
        for k in 1..=max_exp {
            a_pow.push(a_pow[k - 1].mul(&a)?);
            ad_pow.push(ad_pow[k - 1].mul(&ad)?);
        }
        let dim = d.pow(self.modes as u32);
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        for (key, &coeff) in &self.terms {
            let mut factor: Option<TruncatedOperator> = None;
            for &(c, ann) in key {
                let mode_matrix = ad_pow[c as usize].mul(&a_pow[ann as usize])?;
                factor = Some(match factor {
                    None => mode_matrix,
                    Some(f) => f.kron(&mode_matrix)?,
                });
            }
            let m = factor.expect("at least one mode");
            acc += m.entries() * coeff;
        }
        Ok(TruncatedOperator::from_matrix(acc, self.modes, self.hbar))
    }

    /// `<n|P|n>` for a Fock basis pattern, without materializing a matrix.
    /// Only diagonal monomials (equal creation and annihilation exponents)
    /// contribute; each gives a product of falling factorials.
    pub fn fock_diagonal(&self, pattern: &[usize]) -> Complex64 {
        let mut acc = Complex64::ZERO;
        'terms: for (key, &coeff) in &self.terms {
            let mut weight = 1.0;
            for (m, &(c, a)) in key.iter().enumerate() {
                if c != a {
                    continue 'terms;
                }
                let n = pattern[m];
                let k = c as usize;
                if k > n {
                    weight = 0.0;
                    break;
                }
                for j in 0..k {
                    weight *= (n - j) as f64;
                }
            }
            acc += coeff * weight;
        }
        acc
    }

    /// Compare term maps up to `tol` on the union of keys.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.modes != other.modes {
            return false;
        }
        for (k, c) in &self.terms {
            if (other.coeff(k) - c).norm() > tol {
                return false;
            }
        }
        for (k, c) in &other.terms {
            if (self.coeff(k) - c).norm() > tol {
                return false;
            }
        }
        true
    }
}

fn cartesian_accumulate(
    factors: &[Vec<((u8, u8), f64)>],
    coeff: Complex64,
    terms: &mut BTreeMap<MonomialKey, Complex64>,
) {
    let modes = factors.len();
    let mut idx = vec![0usize; modes];
    let mut key: MonomialKey = vec![(0, 0); modes];
    'outer: loop {
        let mut weight = 1.0;
        for m in 0..modes {
            let (pair, w) = factors[m][idx[m]];
            key[m] = pair;
            weight *= w;
        }
        let entry = terms.entry(key.clone()).or_insert(Complex64::ZERO);
        *entry += coeff * weight;
        // odometer
        let mut m = modes;
        loop {
            if m == 0 {
                break 'outer;
            }
            m -= 1;
            idx[m] += 1;
            if idx[m] < factors[m].len() {
                break;
            }
            idx[m] = 0;
        }
    }
}

/// One term of a quadrature polynomial: per-mode `x` exponents, per-mode `p`
/// exponents, and a real coefficient. Within each mode the `x` factors sit to
/// the left of the `p` factors.
pub type XpTerm = (Vec<u32>, Vec<u32>, f64);

/// Expands a polynomial in the quadratures into normal-ordered ladder form,
/// substituting `x = sqrt(hbar/2)(a + a^dag)` and
/// `p = i sqrt(hbar/2)(a^dag - a)`.
pub fn from_xp(terms: &[XpTerm], modes: usize, hbar: f64) -> Result<BosonPolynomial> {
    let mut total = BosonPolynomial::zero(modes);
    total.hbar = Some(hbar);
    for (x_exps, p_exps, coeff) in terms {
        if !coeff.is_finite() {
            return Err(Error::NonFiniteParam);
        }
        if x_exps.len() != modes || p_exps.len() != modes {
            return Err(Error::ModeCountMismatch(
                x_exps.len().max(p_exps.len()),
                modes,
            ));
        }
        let mut term = BosonPolynomial::constant(modes, Complex64::new(*coeff, 0.0));
        term.hbar = Some(hbar);
        for mode in 0..modes {
            for _ in 0..x_exps[mode] {
                term = term.mul(&BosonPolynomial::position(modes, mode, hbar))?;
            }
            for _ in 0..p_exps[mode] {
                term = term.mul(&BosonPolynomial::momentum(modes, mode, hbar))?;
            }
        }
        total = total.add(&term)?;
    }
    Ok(total)
}

impl fmt::Display for BosonPolynomial {
    /// Stable text rendering: one `coeff · a†^j a^k ⊗ …` line per monomial,
    /// in key order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (key, coeff) in &self.terms {
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "({:+.6}{:+.6}i) · ", coeff.re, coeff.im)?;
            let mut first_mode = true;
            for &(c, a) in key {
                if !first_mode {
                    write!(f, " ⊗ ")?;
                }
                first_mode = false;
                match (c, a) {
                    (0, 0) => write!(f, "1")?,
                    (0, a) => write!(f, "a^{a}")?,
                    (c, 0) => write!(f, "a†^{c}")?,
                    (c, a) => write!(f, "a†^{c} a^{a}")?,
                }
            }
        }
        Ok(())
    }
}
