//! Linear operators on the lattice Hilbert space, stored as shift bands.

mod eigen;
mod observable;

pub use eigen::{eigenvalues_hermitian, EIGEN_DIM_CAP};
pub use observable::{diagonal_op, quantize_observable, ObservableExpr};

use crate::error::{Error, Result};
use crate::lattice::StateSpace;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `O σ_m = Σ_d c_d[m] σ_{m+d}`; `bands[d][i]` is `c_d` at the state with
/// index `i`. Coefficients whose target is not a state are kept at zero.
#[derive(Debug, Clone)]
pub struct LatticeOperator {
    space: Arc<StateSpace>,
    bands: BTreeMap<Vec<i64>, Vec<Complex64>>,
}

fn same_space(a: &Arc<StateSpace>, b: &Arc<StateSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::MixedSpaces)
    }
}

impl LatticeOperator {
    pub fn zero(space: Arc<StateSpace>) -> Self {
        LatticeOperator {
            space,
            bands: BTreeMap::new(),
        }
    }

    pub fn identity(space: Arc<StateSpace>) -> Self {
        let n = space.dim();
        Self::diagonal(space, vec![Complex64::new(1.0, 0.0); n]).expect("length matches")
    }

    pub fn diagonal(space: Arc<StateSpace>, values: Vec<Complex64>) -> Result<Self> {
        let dof = space.dof();
        Self::from_band(space, vec![0; dof], values)
    }

    /// Single band; entries whose target falls outside the space are zeroed.
    pub fn from_band(space: Arc<StateSpace>, offset: Vec<i64>, coeffs: Vec<Complex64>) -> Result<Self> {
        let mut op = Self::zero(space);
        op.insert_band(offset, coeffs)?;
        Ok(op)
    }

    pub fn from_bands(
        space: Arc<StateSpace>,
        bands: impl IntoIterator<Item = (Vec<i64>, Vec<Complex64>)>,
    ) -> Result<Self> {
        let mut op = Self::zero(space);
        for (d, c) in bands {
            op.insert_band(d, c)?;
        }
        Ok(op)
    }

    fn insert_band(&mut self, offset: Vec<i64>, mut coeffs: Vec<Complex64>) -> Result<()> {
        if offset.len() != self.space.dof() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dof(),
                found: offset.len(),
            });
        }
        if coeffs.len() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: coeffs.len(),
            });
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::at_state(
                self.space.point_of(i).as_slice(),
                Error::Evaluation("non-finite operator coefficient".into()),
            ));
        }
        for (i, c) in coeffs.iter_mut().enumerate() {
            if self.space.shifted(i, &offset).is_none() {
                *c = ZERO;
            }
        }
        match self.bands.get_mut(&offset) {
            Some(existing) => existing.iter_mut().zip(&coeffs).for_each(|(a, b)| *a += b),
            None => {
                self.bands.insert(offset, coeffs);
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn bands(&self) -> &BTreeMap<Vec<i64>, Vec<Complex64>> {
        &self.bands
    }

    pub fn band(&self, offset: &[i64]) -> Option<&[Complex64]> {
        self.bands.get(offset).map(Vec::as_slice)
    }

    /// Drop bands that are identically zero.
    pub fn pruned(mut self) -> Self {
        self.bands.retain(|_, c| c.iter().any(|z| *z != ZERO));
        self
    }

    pub fn is_zero(&self) -> bool {
        self.bands.values().all(|c| c.iter().all(|z| *z == ZERO))
    }

    pub fn max_abs(&self) -> f64 {
        self.bands
            .values()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        LatticeOperator {
            space: self.space.clone(),
            bands: self
                .bands
                .iter()
                .map(|(d, c)| (d.clone(), c.iter().map(|z| z * s).collect()))
                .collect(),
        }
    }

    pub fn add(&self, other: &LatticeOperator) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &LatticeOperator) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// `self + s·other`
    pub fn axpy(&self, s: Complex64, other: &LatticeOperator) -> Result<Self> {
        same_space(&self.space, &other.space)?;
        let mut out = self.clone();
        for (d, c) in &other.bands {
            let dst = out
                .bands
                .entry(d.clone())
                .or_insert_with(|| vec![ZERO; c.len()]);
            dst.iter_mut().zip(c).for_each(|(a, b)| *a += s * b);
        }
        Ok(out)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LatticeOperator) -> Result<Self> {
        same_space(&self.space, &other.space)?;
        let n = self.dim();
        let mut out: BTreeMap<Vec<i64>, Vec<Complex64>> = BTreeMap::new();
        for (e, cb) in &other.bands {
            for (d, ca) in &self.bands {
                let offset: Vec<i64> = d.iter().zip(e).map(|(x, y)| x + y).collect();
                let mut acc = vec![ZERO; n];
                let mut any = false;
                for (i, b) in cb.iter().enumerate() {
                    if *b == ZERO {
                        continue;
                    }
                    if let Some(mid) = self.space.shifted(i, e) {
                        acc[i] = b * ca[mid];
                        any = true;
                    }
                }
                if any {
                    match out.get_mut(&offset) {
                        Some(dst) => dst.iter_mut().zip(&acc).for_each(|(a, b)| *a += b),
                        None => {
                            out.insert(offset, acc);
                        }
                    }
                }
            }
        }
        Ok(LatticeOperator {
            space: self.space.clone(),
            bands: out,
        })
    }

    /// `[self, other] = self∘other − other∘self`
    pub fn commutator(&self, other: &LatticeOperator) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// `c'_d[m] = conj(c_{−d}[m+d])`
    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        let mut bands = BTreeMap::new();
        for (d, c) in &self.bands {
            let neg: Vec<i64> = d.iter().map(|x| -x).collect();
            let mut out = vec![ZERO; n];
            for (i, slot) in out.iter_mut().enumerate() {
                if let Some(j) = self.space.shifted(i, &neg) {
                    *slot = c[j].conj();
                }
            }
            bands.insert(neg, out);
        }
        LatticeOperator {
            space: self.space.clone(),
            bands,
        }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        same_space(&self.space, &v.space)?;
        let mut out = vec![ZERO; self.dim()];
        for (d, c) in &self.bands {
            for (i, a) in v.amplitudes.iter().enumerate() {
                if let Some(j) = self.space.shifted(i, d) {
                    out[j] += c[i] * a;
                }
            }
        }
        Ok(StateVector {
            space: self.space.clone(),
            amplitudes: out,
        })
    }

    /// Dense matrix, `m[row][col] = ⟨σ_row, O σ_col⟩`.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        let mut m = vec![vec![ZERO; n]; n];
        for (d, c) in &self.bands {
            for (i, z) in c.iter().enumerate() {
                if let Some(j) = self.space.shifted(i, d) {
                    m[j][i] += z;
                }
            }
        }
        m
    }

    /// Diagonal entries when the operator has no off-diagonal bands.
    pub fn as_diagonal(&self) -> Option<Vec<Complex64>> {
        let zero = vec![0; self.space.dof()];
        if self
            .bands
            .iter()
            .any(|(d, c)| *d != zero && c.iter().any(|z| *z != ZERO))
        {
            return None;
        }
        Some(
            self.bands
                .get(&zero)
                .cloned()
                .unwrap_or_else(|| vec![ZERO; self.dim()]),
        )
    }

    /// Largest coefficient difference over source states where `mask` holds.
    pub fn max_diff_masked(&self, other: &LatticeOperator, mask: &[bool]) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff
            .bands
            .values()
            .flat_map(|c| c.iter().zip(mask).filter(|(_, m)| **m).map(|(z, _)| z.norm()))
            .fold(0.0, f64::max))
    }

    pub fn max_diff(&self, other: &LatticeOperator) -> Result<f64> {
        self.max_diff_masked(other, &vec![true; self.dim()])
    }
}

/// Linear combination of ordered products: `Σ s_i · (O_i1 ∘ O_i2 ∘ …)`.
pub fn combine(space: Arc<StateSpace>, terms: &[(Complex64, Vec<&LatticeOperator>)]) -> Result<LatticeOperator> {
    let mut out = LatticeOperator::zero(space);
    for (s, factors) in terms {
        let mut it = factors.iter();
        let Some(first) = it.next() else {
            return Err(Error::InvalidArgument("empty operator product".into()));
        };
        let mut prod = (*first).clone();
        for f in it {
            prod = prod.compose(f)?;
        }
        out = out.axpy(*s, &prod)?;
    }
    Ok(out)
}

/// One band `−e_k` carrying the lowering coefficients for axis `k` (1-based).
pub fn shift_op(space: Arc<StateSpace>, axis: usize, coeffs: Vec<Complex64>) -> Result<LatticeOperator> {
    if !(1..=space.dof()).contains(&axis) {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
    }
    let mut d = vec![0; space.dof()];
    d[axis - 1] = -1;
    LatticeOperator::from_band(space, d, coeffs)
}

/// A vector in the lattice Hilbert space, in the `σ_m` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: Arc<StateSpace>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(space: Arc<StateSpace>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(StateVector { space, amplitudes })
    }

    pub fn zero(space: Arc<StateSpace>) -> Self {
        let n = space.dim();
        StateVector {
            space,
            amplitudes: vec![ZERO; n],
        }
    }

    /// `σ_m` for the state with the given index.
    pub fn basis(space: Arc<StateSpace>, index: usize) -> Self {
        let mut v = Self::zero(space);
        v.amplitudes[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        same_space(&self.space, &other.space)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        StateVector {
            space: self.space.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * s).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|a| *a == ZERO)
    }
}
