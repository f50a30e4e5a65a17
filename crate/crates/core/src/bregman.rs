//! Functional Bregman divergences, affine scores, and symmetry classification.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::entropy::{rebase, Entropy};
use crate::error::{Error, Result};
use crate::measure::{compensated_sum, pair, ConeVector, DualVector, MeasureSpace};
use crate::sampling::{box_point, sample_rng, OFF_SIMPLEX_BOX};

/// Defects at or below this count as symmetric.
pub const SYMMETRIC_DEFECT_TOL: f64 = 1e-10;
/// Defects above this are reported as asymmetric.
pub const ASYMMETRIC_DEFECT_TOL: f64 = 1e-8;
/// Maximum relative residual for the quadratic-form fit.
pub const FIT_RESIDUAL_TOL: f64 = 1e-10;

/// `D(p, q) = Φ(p) − (p−q)·Φ*(q) − Φ(q)`.
pub fn bregman_divergence(entropy: &Entropy, p: &ConeVector, q: &ConeVector) -> Result<f64> {
    let grad = entropy.subgradient(q)?;
    Ok(entropy.value(p)? - pair(&p.sub(q)?, &grad)? - entropy.value(q)?)
}

/// The affine functional `p ↦ p·f + α` supporting `Φ` at `basepoint`.
#[derive(Clone, Debug, Serialize)]
pub struct AffineScore {
    pub gradient_part: DualVector,
    pub offset: f64,
    pub basepoint: ConeVector,
}

impl AffineScore {
    pub fn eval(&self, p: &ConeVector) -> Result<f64> {
        Ok(pair(p, &self.gradient_part)? + self.offset)
    }
}

/// `s(·, q) = (· − q)·Φ*(q) + Φ(q)`, stored as `f = Φ*(q)`, `α = Φ(q) − q·Φ*(q)`.
pub fn affine_score_at(entropy: &Entropy, q: &ConeVector) -> Result<AffineScore> {
    let gradient_part = entropy.subgradient(q)?;
    let offset = entropy.value(q)? - pair(q, &gradient_part)?;
    Ok(AffineScore { gradient_part, offset, basepoint: q.clone() })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LinearityEvidence {
    /// Every sampled offset `α` vanished.
    pub offsets_vanish: bool,
    /// `s(p₁+p₂, q) = s(p₁, q) + s(p₂, q)` on every sample.
    pub additive: bool,
    /// `Φ(λq) = λΦ(q)` for `λ ∈ {0.5, 2, 10}`, checked on values alone.
    pub one_homogeneous: bool,
}

/// Sampled evidence for whether the affine scores of `entropy` are linear maps.
pub fn linearity_evidence(entropy: &Entropy, space: &MeasureSpace, seed: u64, samples: usize) -> Result<LinearityEvidence> {
    let mut ev = LinearityEvidence { offsets_vanish: true, additive: true, one_homogeneous: true };
    for i in 0..samples {
        let mut rng = sample_rng(seed, i as u64);
        let q = box_point(&mut rng, space, OFF_SIMPLEX_BOX.0, OFF_SIMPLEX_BOX.1);
        let p1 = box_point(&mut rng, space, OFF_SIMPLEX_BOX.0, OFF_SIMPLEX_BOX.1);
        let p2 = box_point(&mut rng, space, OFF_SIMPLEX_BOX.0, OFF_SIMPLEX_BOX.1);
        let phi = entropy.value(&q)?;
        let s = affine_score_at(entropy, &q)?;
        if s.offset.abs() > 1e-10 * (1.0 + phi.abs()) {
            ev.offsets_vanish = false;
        }
        let (a, b, sum) = (s.eval(&p1)?, s.eval(&p2)?, s.eval(&p1.add(&p2)?)?);
        if (sum - a - b).abs() > 1e-10 * (1.0 + a.abs() + b.abs()) {
            ev.additive = false;
        }
        for lambda in [0.5, 2.0, 10.0] {
            if (entropy.value(&q.scaled(lambda))? - lambda * phi).abs() > 1e-10 * lambda * (1.0 + phi.abs()) {
                ev.one_homogeneous = false;
            }
        }
    }
    Ok(ev)
}

/// True iff the sampled affine scores are linear (vanishing offsets, additive in `p`).
pub fn linearity_check(entropy: &Entropy, space: &MeasureSpace, seed: u64, samples: usize) -> Result<bool> {
    let ev = linearity_evidence(entropy, space, seed, samples)?;
    Ok(ev.offsets_vanish && ev.additive)
}

/// `Ψ(p) = D(p, a)` with `Ψ*(p) = Φ*(p) − Φ*(a)`; generates the same divergence as `entropy`.
pub fn rebase_entropy(entropy: &Entropy, anchor: &ConeVector) -> Result<Entropy> {
    rebase(entropy, anchor)
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    SymmetricGeneralizedQuadratic,
    AsymmetricWithWitness,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DivergenceReport {
    pub entropy: String,
    pub dimension: usize,
    pub seed: u64,
    pub pair_count: usize,
    /// Largest `|D(p,q) − D(q,p)|` seen.
    pub max_symmetry_defect: f64,
    pub witness_p: Vec<f64>,
    pub witness_q: Vec<f64>,
    /// Relative residual of the least-squares fit of `Φ` on `{q_i q_j, q_i, 1}`.
    pub fit_residual: f64,
    pub classification: SymmetryClass,
}

impl DivergenceReport {
    /// Symmetric divergences must come from generalized quadratic forms; anything undecided fails.
    pub fn pass(&self) -> bool {
        self.classification != SymmetryClass::Inconclusive
    }
}

/// `D(q, p) − D(p, q)`.
pub fn pair_symmetry_defect(entropy: &Entropy, p: &ConeVector, q: &ConeVector) -> Result<f64> {
    Ok(bregman_divergence(entropy, q, p)? - bregman_divergence(entropy, p, q)?)
}

/// Sample off-simplex pairs, measure the symmetry defect, and classify the divergence.
pub fn symmetry_defect(entropy: &Entropy, space: &MeasureSpace, seed: u64, samples: usize) -> Result<DivergenceReport> {
    if samples == 0 {
        return Err(Error::Precondition("symmetry check needs at least one sample".into()));
    }
    let mut worst = (0.0_f64, Vec::new(), Vec::new());
    for i in 0..samples {
        let mut rng = sample_rng(seed, i as u64);
        let p = box_point(&mut rng, space, OFF_SIMPLEX_BOX.0, OFF_SIMPLEX_BOX.1);
        let q = box_point(&mut rng, space, OFF_SIMPLEX_BOX.0, OFF_SIMPLEX_BOX.1);
        let defect = pair_symmetry_defect(entropy, &p, &q)?.abs();
        if defect > worst.0 || defect.is_nan() {
            worst = (defect, p.values().to_vec(), q.values().to_vec());
        }
    }
    let fit_residual = quadratic_form_fit_residual(entropy, space, seed)?;
    let classification = if worst.0 > ASYMMETRIC_DEFECT_TOL {
        SymmetryClass::AsymmetricWithWitness
    } else if worst.0 <= SYMMETRIC_DEFECT_TOL && fit_residual <= FIT_RESIDUAL_TOL {
        SymmetryClass::SymmetricGeneralizedQuadratic
    } else {
        SymmetryClass::Inconclusive
    };
    Ok(DivergenceReport {
        entropy: entropy.name().to_string(),
        dimension: space.size(),
        seed,
        pair_count: samples,
        max_symmetry_defect: worst.0,
        witness_p: worst.1,
        witness_q: worst.2,
        fit_residual,
        classification,
    })
}

/// Least-squares fit of `Φ(q) ≈ Σ_{i≤j} c_ij q_i q_j + Σ b_i q_i + γ` on sampled points;
/// returns `max |residual| / (1 + max |Φ|)`.
pub fn quadratic_form_fit_residual(entropy: &Entropy, space: &MeasureSpace, seed: u64) -> Result<f64> {
    let n = space.size();
    let basis_len = n * (n + 1) / 2 + n + 1;
    let rows = 2 * basis_len + 10;
    let mut features: Vec<Vec<f64>> = Vec::with_capacity(rows);
    let mut targets: Vec<f64> = Vec::with_capacity(rows);
    for i in 0..rows {
        let q = box_point(&mut sample_rng(seed ^ 0xF17, i as u64), space, OFF_SIMPLEX_BOX.0, OFF_SIMPLEX_BOX.1);
        let v = q.values();
        let mut row = Vec::with_capacity(basis_len);
        for a in 0..n {
            for b in a..n {
                row.push(v[a] * v[b]);
            }
        }
        row.extend_from_slice(v);
        row.push(1.0);
        features.push(row);
        targets.push(entropy.value(&q)?);
    }
    let a = DMatrix::from_fn(rows, basis_len, |i, j| features[i][j]);
    let b = DVector::from_vec(targets.clone());
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-13)
        .map_err(|e| Error::Construction(format!("least-squares solve failed: {e}")))?;
    let fitted = &a * coef;
    let scale = targets.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let resid = fitted.iter().zip(&targets).fold(0.0_f64, |m, (f, t)| m.max((f - t).abs()));
    Ok(resid / (1.0 + scale))
}

/// `(D₁, (Σν) D₂)` with `D₁ = (Σ(p−q)ν)²`, `D₂ = Σ(p−q)²ν`; the first never exceeds the second.
pub fn quadratic_discrimination_bound(p: &ConeVector, q: &ConeVector, nu: &[f64]) -> Result<(f64, f64)> {
    p.space().check_same(q.space())?;
    if nu.len() != p.len() {
        return Err(Error::Dimension { expected: p.len(), found: nu.len() });
    }
    if nu.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidParameter("ν weights must be positive".into()));
    }
    let diff: Vec<f64> = p.values().iter().zip(q.values()).map(|(a, b)| a - b).collect();
    let d1 = compensated_sum(diff.iter().zip(nu).map(|(d, w)| d * w)).powi(2);
    let d2 = compensated_sum(diff.iter().zip(nu).map(|(d, w)| d * d * w));
    let total = compensated_sum(nu.iter().copied());
    let bound = total * d2;
    if d1 > bound * (1.0 + 1e-12) + 1e-300 {
        return Err(Error::Construction(format!("Cauchy-Schwarz bound violated: {d1} > {bound}")));
    }
    Ok((d1, bound))
}
