//! Finite measure spaces and the pairing between cone vectors and dual vectors.
//!
//! Every integral is a weighted sum over the atoms of a [`MeasureSpace`]:
//! `p·f = Σ_i p_i f_i μ_i`. Sums are compensated (Neumaier) so identities
//! hold to ~1e-12 for spaces of up to 10⁴ atoms.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`Density`].
pub const DENSITY_MASS_TOL: f64 = 1e-9;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    if sum.is_finite() {
        sum + comp
    } else {
        sum
    }
}

/// A finite outcome set `{1, …, n}` with strictly positive atom weights.
#[derive(Clone, PartialEq)]
pub struct MeasureSpace {
    weights: Arc<[f64]>,
}

impl MeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("measure space needs at least one atom".into()));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weight {i} is {}, weights must be finite and positive",
                weights[i]
            )));
        }
        Ok(Self { weights: weights.into() })
    }

    /// Counting measure on `n` atoms.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    pub(crate) fn same_as(&self, other: &MeasureSpace) -> bool {
        Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights
    }

    pub(crate) fn check_same(&self, other: &MeasureSpace) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::Dimension { expected: self.size(), found: other.size() });
        }
        if !self.same_as(other) {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// The all-ones dual vector.
    pub fn ones(&self) -> DualVector {
        DualVector { values: vec![1.0; self.size()], space: self.clone() }
    }

    pub fn zeros(&self) -> ConeVector {
        ConeVector { values: vec![0.0; self.size()], space: self.clone() }
    }

    /// Uniform density `1 / μ(Ω)`.
    pub fn uniform_density(&self) -> Density {
        let c = 1.0 / self.total_weight();
        Density(ConeVector { values: vec![c; self.size()], space: self.clone() })
    }
}

impl fmt::Debug for MeasureSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureSpace").field("weights", &&*self.weights).finish()
    }
}

/// A (possibly signed) function on the atoms: an element of the span of the densities.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeVector {
    values: Vec<f64>,
    space: MeasureSpace,
}

/// A function on the atoms used as a score; pairs against a [`ConeVector`].
///
/// Entries may be `-inf` (or `+inf`) to mark an infinite score at an atom.
#[derive(Clone, Debug, PartialEq)]
pub struct DualVector {
    values: Vec<f64>,
    space: MeasureSpace,
}

macro_rules! vector_common {
    ($t:ident) => {
        impl $t {
            pub fn new(space: &MeasureSpace, values: Vec<f64>) -> Result<Self> {
                if values.len() != space.size() {
                    return Err(Error::Dimension { expected: space.size(), found: values.len() });
                }
                Ok(Self { values, space: space.clone() })
            }

            pub fn values(&self) -> &[f64] {
                &self.values
            }

            pub fn into_values(self) -> Vec<f64> {
                self.values
            }

            pub fn space(&self) -> &MeasureSpace {
                &self.space
            }

            pub fn len(&self) -> usize {
                self.values.len()
            }

            pub fn is_empty(&self) -> bool {
                self.values.is_empty()
            }

            pub fn scaled(&self, lambda: f64) -> Self {
                self.map(|x| lambda * x)
            }

            pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
                Self { values: self.values.iter().map(|&x| f(x)).collect(), space: self.space.clone() }
            }

            /// `a·self + b·other`.
            pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
                self.space.check_same(&other.space)?;
                let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
                Ok(Self { values, space: self.space.clone() })
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.combine(1.0, other, 1.0)
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.combine(1.0, other, -1.0)
            }

            pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
                self.space.check_same(&other.space)?;
                Ok(self.values.iter().zip(&other.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
            }
        }

        impl serde::Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                self.values.serialize(serializer)
            }
        }
    };
}

vector_common!(ConeVector);
vector_common!(DualVector);

impl ConeVector {
    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&x| x >= 0.0)
    }

    /// Reinterpret the entries as a dual vector on the same space.
    pub fn to_dual(&self) -> DualVector {
        DualVector { values: self.values.clone(), space: self.space.clone() }
    }
}

impl DualVector {
    pub fn constant(space: &MeasureSpace, c: f64) -> Self {
        Self { values: vec![c; space.size()], space: space.clone() }
    }

    pub fn has_infinite(&self) -> bool {
        self.values.iter().any(|x| x.is_infinite())
    }
}

/// A nonnegative [`ConeVector`] of unit total mass.
#[derive(Clone, Debug, PartialEq)]
pub struct Density(ConeVector);

impl Density {
    /// Validates nonnegativity and `|Σ q_i μ_i − 1| ≤ 1e-9`; never renormalizes.
    pub fn new(space: &MeasureSpace, values: Vec<f64>) -> Result<Self> {
        Self::try_from_cone(ConeVector::new(space, values)?)
    }

    pub fn try_from_cone(q: ConeVector) -> Result<Self> {
        if let Some(i) = q.values.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::domain(format!("density entry {i} is {}", q.values[i])));
        }
        let mass = total_mass(&q);
        if (mass - 1.0).abs() > DENSITY_MASS_TOL {
            return Err(Error::domain(format!("density has total mass {mass}")));
        }
        Ok(Density(q))
    }

    pub fn as_cone(&self) -> &ConeVector {
        &self.0
    }

    pub fn into_cone(self) -> ConeVector {
        self.0
    }
}

impl std::ops::Deref for Density {
    type Target = ConeVector;
    fn deref(&self) -> &ConeVector {
        &self.0
    }
}

/// `p·f = Σ p_i f_i μ_i`.
///
/// Atoms where `p_i = 0` contribute nothing even if `f_i` is infinite, so an
/// infinite score only counts where the measure puts mass.
pub fn pair(p: &ConeVector, f: &DualVector) -> Result<f64> {
    p.space.check_same(&f.space)?;
    Ok(compensated_sum(
        p.values
            .iter()
            .zip(&f.values)
            .zip(p.space.weights.iter())
            .filter(|((pi, _), _)| **pi != 0.0)
            .map(|((pi, fi), w)| pi * fi * w),
    ))
}

/// `q·1`.
pub fn total_mass(q: &ConeVector) -> f64 {
    compensated_sum(q.values.iter().zip(q.space.weights.iter()).map(|(x, w)| x * w))
}

/// `q / (q·1)` for a nonnegative vector of positive mass.
pub fn normalize(q: &ConeVector) -> Result<Density> {
    if let Some(i) = q.values.iter().position(|x| x.is_nan() || *x < 0.0) {
        return Err(Error::domain(format!("cannot normalize: entry {i} is {}", q.values[i])));
    }
    let mass = total_mass(q);
    if mass.is_nan() || mass <= 0.0 || !mass.is_finite() {
        return Err(Error::domain(format!("cannot normalize: total mass {mass}")));
    }
    if mass == 1.0 {
        return Ok(Density(q.clone()));
    }
    Ok(Density(q.map(|x| x / mass)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(s: &MeasureSpace, v: &[f64]) -> ConeVector {
        ConeVector::new(s, v.to_vec()).unwrap()
    }
    fn dv(s: &MeasureSpace, v: &[f64]) -> DualVector {
        DualVector::new(s, v.to_vec()).unwrap()
    }

    #[test]
    fn pair_examples() {
        let s = MeasureSpace::uniform(2).unwrap();
        assert_eq!(pair(&cv(&s, &[0.5, 0.5]), &dv(&s, &[1.0, 2.0])).unwrap(), 1.5);
        assert_eq!(pair(&cv(&s, &[1.0, 0.0]), &dv(&s, &[0.5, 0.5])).unwrap(), 0.5);
        let s2 = MeasureSpace::new(vec![2.0, 2.0]).unwrap();
        assert_eq!(pair(&cv(&s2, &[0.25, 0.25]), &dv(&s2, &[1.0, 1.0])).unwrap(), 1.0);
    }

    #[test]
    fn pair_rejects_mismatch() {
        let s2 = MeasureSpace::uniform(2).unwrap();
        let s3 = MeasureSpace::uniform(3).unwrap();
        let err = pair(&cv(&s2, &[1.0, 0.0]), &dv(&s3, &[1.0, 1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
        let other = MeasureSpace::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(pair(&cv(&s2, &[1.0, 0.0]), &dv(&other, &[1.0, 1.0])), Err(Error::SpaceMismatch));
        assert!(ConeVector::new(&s2, vec![1.0]).is_err());
    }

    #[test]
    fn infinite_score_only_counts_on_support() {
        let s = MeasureSpace::uniform(2).unwrap();
        let f = dv(&s, &[0.0, f64::NEG_INFINITY]);
        assert_eq!(pair(&cv(&s, &[1.0, 0.0]), &f).unwrap(), 0.0);
        assert_eq!(pair(&cv(&s, &[0.5, 0.5]), &f).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn total_mass_examples() {
        let s = MeasureSpace::uniform(2).unwrap();
        assert_eq!(total_mass(&cv(&s, &[2.0, 2.0])), 4.0);
        assert_eq!(total_mass(&cv(&s, &[0.5, 0.5])), 1.0);
        assert_eq!(total_mass(&cv(&s, &[1.0, -1.0])), 0.0);
    }

    #[test]
    fn normalize_examples() {
        let s = MeasureSpace::uniform(2).unwrap();
        assert_eq!(normalize(&cv(&s, &[2.0, 2.0])).unwrap().values(), &[0.5, 0.5]);
        assert_eq!(normalize(&cv(&s, &[3.0, 1.0])).unwrap().values(), &[0.75, 0.25]);
        assert!(matches!(normalize(&cv(&s, &[0.0, 0.0])), Err(Error::Domain(_))));
        assert!(matches!(normalize(&cv(&s, &[2.0, -1.0])), Err(Error::Domain(_))));
    }

    #[test]
    fn density_validation() {
        let s = MeasureSpace::uniform(2).unwrap();
        assert!(Density::new(&s, vec![0.5, 0.5]).is_ok());
        assert!(Density::new(&s, vec![0.5, 0.5 + 2e-9]).is_err());
        assert!(Density::new(&s, vec![1.5, -0.5]).is_err());
        assert!(MeasureSpace::new(vec![]).is_err());
        assert!(MeasureSpace::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let terms: Vec<f64> = (0..10_000).map(|i| if i % 2 == 0 { 1e16 } else { 1.0 }).chain([-5e19]).collect();
        assert_eq!(compensated_sum(terms), 5000.0);
    }
}
