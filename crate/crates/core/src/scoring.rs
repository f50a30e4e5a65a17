//! Proper scoring rules built from entropies, their 0-homogeneous extension,
//! and sampled propriety / Euler-identity verification.

use serde::Serialize;

use crate::entropy::{canonical_extension_value, Entropy};
use crate::error::{Error, Result};
use crate::measure::{normalize, pair, total_mass, ConeVector, Density, DualVector, MeasureSpace};
use crate::sampling::{cone_point, dirichlet_density, sample_rng};

/// Pairs closer than this in max-norm are treated as ties by the strictness check.
pub const STRICT_SEPARATION: f64 = 1e-6;
/// Margins below this on separated pairs count as strictness violations.
pub const STRICT_MARGIN: f64 = 1e-12;

#[derive(Clone, Debug)]
enum Oracle {
    /// `S(q) = Φ*(q) + Φ(q) − q·Φ*(q)`.
    Entropy(Box<Entropy>),
    /// `S(q) = q`; improper, kept as a negative control.
    Linear,
}

/// A map from densities to dual vectors (scores indexed by outcome).
#[derive(Clone, Debug)]
pub struct ScoringRule {
    name: String,
    oracle: Oracle,
}

/// The proper scoring rule associated with `entropy`.
pub fn make_psr(entropy: &Entropy) -> ScoringRule {
    ScoringRule { name: entropy.name().to_string(), oracle: Oracle::Entropy(Box::new(entropy.clone())) }
}

impl ScoringRule {
    /// The linear score `S(q) = q`, which is not proper.
    pub fn linear() -> Self {
        ScoringRule { name: "linear".into(), oracle: Oracle::Linear }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entropy(&self) -> Option<&Entropy> {
        match &self.oracle {
            Oracle::Entropy(e) => Some(e),
            Oracle::Linear => None,
        }
    }

    /// Whether the raw score oracle is itself invariant under rescaling its argument.
    pub fn is_zero_homogeneous(&self) -> bool {
        matches!(&self.oracle, Oracle::Entropy(e) if e.homogeneity_degree() == Some(1.0))
    }

    /// `S(q)`. The logarithmic rule yields `-inf` at atoms where `q` vanishes.
    pub fn score(&self, q: &Density) -> Result<DualVector> {
        match &self.oracle {
            Oracle::Linear => Ok(q.to_dual()),
            // ln q: the +1 and −q·(ln q + 1) terms cancel on densities
            Oracle::Entropy(e) if e.is_shannon() => Ok(q.to_dual().map(f64::ln)),
            Oracle::Entropy(e) => {
                let grad = e.subgradient(q)?;
                // Φ − q·Φ* vanishes identically for 1-homogeneous Φ
                let offset = if e.homogeneity_degree() == Some(1.0) { 0.0 } else { e.value(q)? - pair(q, &grad)? };
                Ok(grad.map(|g| g + offset))
            }
        }
    }

    /// `Φ(p) = p·S(p)` on densities.
    pub fn entropy_value(&self, p: &Density) -> Result<f64> {
        match &self.oracle {
            Oracle::Entropy(e) => e.value(p),
            Oracle::Linear => pair(p, &p.to_dual()),
        }
    }

    /// `(q·1) Φ(q/(q·1))`.
    pub fn extended_entropy_value(&self, q: &ConeVector) -> Result<f64> {
        match &self.oracle {
            Oracle::Entropy(e) => canonical_extension_value(e, q),
            Oracle::Linear => Ok(total_mass(q) * self.entropy_value(&normalize(q)?)?),
        }
    }
}

/// `S(q / (q·1))`.
pub fn zero_homog_extend(rule: &ScoringRule, q: &ConeVector) -> Result<DualVector> {
    rule.score(&normalize(q)?)
}

/// `p·S(q)`; `-inf` when `S(q)` is `-inf` somewhere `p` has mass.
pub fn expected_score(rule: &ScoringRule, p: &Density, q: &Density) -> Result<f64> {
    p.space().check_same(q.space())?;
    pair(p, &rule.score(q)?)
}

/// `D(p, q) = p·S(p) − p·S(q)`; `+inf` when the forecast scores `-inf` on the support of `p`.
pub fn score_divergence(rule: &ScoringRule, p: &Density, q: &Density) -> Result<f64> {
    let own = expected_score(rule, p, p)?;
    let other = expected_score(rule, p, q)?;
    if other == f64::NEG_INFINITY && own.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(own - other)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ProprietyReport {
    pub rule: String,
    pub dimension: usize,
    pub seed: u64,
    pub samples: usize,
    /// Smallest observed `p·S(p) − p·S(q)` among finite margins.
    pub min_margin: f64,
    pub witness_p: Vec<f64>,
    pub witness_q: Vec<f64>,
    /// Separated pairs whose margin is below [`STRICT_MARGIN`].
    pub strict_violations: usize,
    pub infinite_favorable: usize,
    pub infinite_unfavorable: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Sample Dirichlet(1) density pairs and record the worst propriety margin.
pub fn verify_propriety(rule: &ScoringRule, space: &MeasureSpace, seed: u64, samples: usize, tol: f64) -> Result<ProprietyReport> {
    if samples == 0 {
        return Err(Error::Precondition("propriety check needs at least one sample".into()));
    }
    let mut min_margin = f64::INFINITY;
    let mut witness: Option<(Density, Density)> = None;
    let mut strict_violations = 0;
    let mut infinite_favorable = 0;
    let mut infinite_unfavorable = 0;
    for i in 0..samples {
        let mut rng = sample_rng(seed, i as u64);
        let p = dirichlet_density(&mut rng, space);
        let q = dirichlet_density(&mut rng, space);
        let margin = score_divergence(rule, &p, &q)?;
        if margin == f64::INFINITY {
            infinite_favorable += 1;
            continue;
        }
        if !margin.is_finite() {
            infinite_unfavorable += 1;
            if witness.is_none() || min_margin.is_finite() {
                witness = Some((p, q));
                min_margin = f64::NEG_INFINITY;
            }
            continue;
        }
        if p.max_abs_diff(&q)? > STRICT_SEPARATION && margin < STRICT_MARGIN {
            strict_violations += 1;
        }
        if margin < min_margin {
            min_margin = margin;
            witness = Some((p, q));
        }
    }
    let (witness_p, witness_q) = witness.map_or((vec![], vec![]), |(p, q)| (p.values().to_vec(), q.values().to_vec()));
    Ok(ProprietyReport {
        rule: rule.name().to_string(),
        dimension: space.size(),
        seed,
        samples,
        min_margin,
        witness_p,
        witness_q,
        strict_violations,
        infinite_favorable,
        infinite_unfavorable,
        tolerance: tol,
        pass: min_margin >= -tol && infinite_unfavorable == 0,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct EulerReport {
    pub rule: String,
    pub dimension: usize,
    pub seed: u64,
    pub samples: usize,
    /// Largest `|q·S̃(q) − Φ̃(q)| / (1 + |Φ̃(q)|)`.
    pub max_relative_defect: f64,
    pub witness_q: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Check `q·S̃(q) = Φ̃(q)` on random cone points with masses in `[0.1, 10]`.
pub fn verify_euler(rule: &ScoringRule, space: &MeasureSpace, seed: u64, samples: usize, tol: f64) -> Result<EulerReport> {
    if samples == 0 {
        return Err(Error::Precondition("Euler check needs at least one sample".into()));
    }
    let mut worst = (0.0_f64, Vec::new());
    for i in 0..samples {
        let q = cone_point(&mut sample_rng(seed, i as u64), space);
        let defect = euler_defect(rule, &q)?;
        if defect > worst.0 || defect.is_nan() {
            worst = (defect, q.values().to_vec());
        }
    }
    Ok(EulerReport {
        rule: rule.name().to_string(),
        dimension: space.size(),
        seed,
        samples,
        max_relative_defect: worst.0,
        witness_q: worst.1,
        tolerance: tol,
        pass: worst.0 <= tol,
    })
}

/// `|q·S̃(q) − Φ̃(q)| / (1 + |Φ̃(q)|)` at one cone point.
pub fn euler_defect(rule: &ScoringRule, q: &ConeVector) -> Result<f64> {
    let lhs = pair(q, &zero_homog_extend(rule, q)?)?;
    let rhs = rule.extended_entropy_value(q)?;
    Ok((lhs - rhs).abs() / (1.0 + rhs.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::catalog_entropy;

    fn s(n: usize) -> MeasureSpace {
        MeasureSpace::uniform(n).unwrap()
    }
    fn d(sp: &MeasureSpace, v: &[f64]) -> Density {
        Density::new(sp, v.to_vec()).unwrap()
    }

    #[test]
    fn psr_examples() {
        let sp = s(2);
        let half = d(&sp, &[0.5, 0.5]);
        let quad = make_psr(&Entropy::quadratic());
        assert_eq!(quad.score(&half).unwrap().values(), &[0.5, 0.5]);

        let sph = make_psr(&Entropy::spherical());
        let q = d(&sp, &[0.25, 0.75]);
        let norm = (0.25f64 * 0.25 + 0.75 * 0.75).sqrt();
        let sc = sph.score(&q).unwrap();
        assert!((sc.values()[0] - 0.25 / norm).abs() < 1e-15 && (sc.values()[1] - 0.75 / norm).abs() < 1e-15);
        assert!(sph.is_zero_homogeneous());
        assert!(!quad.is_zero_homogeneous());

        let log = make_psr(&Entropy::shannon());
        let sc = log.score(&q).unwrap();
        assert_eq!(sc.values(), &[0.25f64.ln(), 0.75f64.ln()]);
    }

    #[test]
    fn shannon_generic_formula_agrees_in_interior() {
        let sp = s(3);
        let e = Entropy::shannon();
        for i in 0..50 {
            let q = dirichlet_density(&mut sample_rng(4, i), &sp);
            let grad = e.subgradient(&q).unwrap();
            let offset = e.value(&q).unwrap() - pair(&q, &grad).unwrap();
            let generic = grad.map(|g| g + offset);
            assert!(generic.max_abs_diff(&make_psr(&e).score(&q).unwrap()).unwrap() < 1e-13);
        }
    }

    #[test]
    fn power_rule_matches_closed_form() {
        let sp = s(3);
        let gamma = 3.0;
        let rule = make_psr(&Entropy::power(gamma).unwrap());
        let q = d(&sp, &[0.2, 0.3, 0.5]);
        let sum: f64 = q.values().iter().map(|x| x.powf(gamma)).sum();
        let closed: Vec<f64> = q.values().iter().map(|x| gamma * x.powf(gamma - 1.0) - (gamma - 1.0) * sum).collect();
        let got = rule.score(&q).unwrap();
        for (a, b) in got.values().iter().zip(&closed) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_homog_examples() {
        let sp = s(2);
        let quad = make_psr(&Entropy::quadratic());
        let one = ConeVector::new(&sp, vec![1.0, 1.0]).unwrap();
        let five = ConeVector::new(&sp, vec![5.0, 5.0]).unwrap();
        assert_eq!(zero_homog_extend(&quad, &one).unwrap().values(), &[0.5, 0.5]);
        assert_eq!(zero_homog_extend(&quad, &five).unwrap(), zero_homog_extend(&quad, &one).unwrap());
        let zero = ConeVector::new(&sp, vec![0.0, 0.0]).unwrap();
        assert!(matches!(zero_homog_extend(&quad, &zero), Err(Error::Domain(_))));
    }

    #[test]
    fn expected_score_examples() {
        let sp = s(2);
        let quad = make_psr(&Entropy::quadratic());
        let p = d(&sp, &[1.0, 0.0]);
        let half = d(&sp, &[0.5, 0.5]);
        assert_eq!(expected_score(&quad, &p, &half).unwrap(), 0.5);
        for e in ["quadratic", "spherical", "shannon"] {
            let r = make_psr(&catalog_entropy(e, &[]).unwrap());
            let q = d(&sp, &[0.3, 0.7]);
            let lhs = expected_score(&r, &q, &q).unwrap();
            assert!((lhs - r.entropy_value(&q).unwrap()).abs() < 1e-14);
        }
        let log = make_psr(&Entropy::shannon());
        assert_eq!(expected_score(&log, &p, &p).unwrap(), 0.0);
        assert_eq!(expected_score(&log, &half, &p).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn divergence_examples() {
        let sp = s(2);
        let p = d(&sp, &[1.0, 0.0]);
        let half = d(&sp, &[0.5, 0.5]);
        assert!((score_divergence(&make_psr(&Entropy::quadratic()), &p, &half).unwrap() - 0.5).abs() < 1e-15);
        let kl = score_divergence(&make_psr(&Entropy::shannon()), &p, &half).unwrap();
        assert!((kl - 2f64.ln()).abs() < 1e-15);
        assert_eq!(score_divergence(&make_psr(&Entropy::shannon()), &half, &p).unwrap(), f64::INFINITY);
        for e in ["quadratic", "spherical", "shannon"] {
            let r = make_psr(&catalog_entropy(e, &[]).unwrap());
            assert_eq!(score_divergence(&r, &half, &half).unwrap(), 0.0);
        }
    }

    #[test]
    fn propriety_catalog_and_linear() {
        let sp = s(3);
        let rep = verify_propriety(&make_psr(&Entropy::quadratic()), &sp, 1, 1000, 1e-10).unwrap();
        assert!(rep.pass && rep.min_margin >= 0.0 && rep.strict_violations == 0);

        let lin = verify_propriety(&ScoringRule::linear(), &s(2), 1, 1000, 1e-10).unwrap();
        assert!(!lin.pass);
        assert!(lin.strict_violations > 0);
        // the witness reproduces the reported margin
        let p = d(&s(2), &lin.witness_p);
        let q = d(&s(2), &lin.witness_q);
        assert_eq!(score_divergence(&ScoringRule::linear(), &p, &q).unwrap(), lin.min_margin);

        assert!(matches!(verify_propriety(&ScoringRule::linear(), &sp, 1, 0, 1e-10), Err(Error::Precondition(_))));
    }

    #[test]
    fn euler_examples() {
        let sp = s(4);
        let quad = verify_euler(&make_psr(&Entropy::quadratic()), &sp, 3, 1000, 1e-10).unwrap();
        assert!(quad.pass, "{quad:?}");
        let sph = verify_euler(&make_psr(&Entropy::spherical()), &sp, 3, 1000, 1e-10).unwrap();
        assert!(sph.max_relative_defect < 1e-14);
        let q = cone_point(&mut sample_rng(9, 0), &sp);
        let r = make_psr(&Entropy::quadratic());
        let a = euler_defect(&r, &q).unwrap();
        let b = euler_defect(&r, &q.scaled(10.0)).unwrap();
        assert!(a < 1e-14 && b < 1e-14);
    }
}
