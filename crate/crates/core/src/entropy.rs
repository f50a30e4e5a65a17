//! Convex entropy functions with analytic subgradient oracles.
//!
//! All integrals are μ-weighted sums, so a subgradient `g` is the dual vector
//! with `ξ·g = Σ ξ_i g_i μ_i` equal to the directional derivative along `ξ`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::ConvexDomainSpec;
use crate::measure::{compensated_sum, normalize, pair, total_mass, ConeVector, DualVector, MeasureSpace};
use crate::sampling::sample_rng;
use crate::scoring::make_psr;

/// Default finite-difference step for [`directional_derivative_fd`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function with its first (and optionally second) derivative.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    value: ScalarMap,
    first: ScalarMap,
    second: Option<ScalarMap>,
}

impl ScalarFunction {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        first: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second: Option<ScalarMap>,
    ) -> Self {
        Self { name: name.into(), value: Arc::new(value), first: Arc::new(first), second }
    }

    pub fn identity() -> Self {
        Self::new("x", |x| x, |_| 1.0, Some(Arc::new(|_| 0.0)))
    }

    pub fn square() -> Self {
        Self::new("x^2", |x| x * x, |x| 2.0 * x, Some(Arc::new(|_| 2.0)))
    }

    pub fn sqrt() -> Self {
        Self::new("sqrt(x)", f64::sqrt, |x| 0.5 / x.sqrt(), Some(Arc::new(|x: f64| -0.25 / (x * x.sqrt()))))
    }

    /// `x ↦ x^k`.
    pub fn power(k: f64) -> Self {
        Self::new(
            format!("x^{k}"),
            move |x| x.powf(k),
            move |x| k * x.powf(k - 1.0),
            Some(Arc::new(move |x: f64| k * (k - 1.0) * x.powf(k - 2.0))),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.first)(x)
    }

    pub fn second_derivative(&self, x: f64) -> Option<f64> {
        self.second.as_ref().map(|f| f(x))
    }
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `Φ(p) = φ(Σ f(p_i) ν_i)`.
#[derive(Clone, Debug)]
pub struct CompositeEntropySpec {
    pub outer: ScalarFunction,
    pub inner: ScalarFunction,
    pub nu_weights: Vec<f64>,
}

impl CompositeEntropySpec {
    fn inner_integral(&self, q: &ConeVector) -> Result<f64> {
        if q.len() != self.nu_weights.len() {
            return Err(Error::Dimension { expected: self.nu_weights.len(), found: q.len() });
        }
        Ok(compensated_sum(q.values().iter().zip(&self.nu_weights).map(|(x, nu)| self.inner.eval(*x) * nu)))
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Quadratic,
    Spherical,
    Power(f64),
    Shannon,
    Pseudospherical(f64),
    WeightedQuadratic(Arc<DMatrix<f64>>),
    Composite(CompositeEntropySpec),
    Rebased { base: Box<Entropy>, anchor: ConeVector, anchor_value: f64, anchor_gradient: DualVector },
}

#[derive(Clone, Debug)]
enum EntropyDomain {
    WholeSpace,
    Orthant,
    Explicit(ConvexDomainSpec),
}

/// A convex function with value and subgradient oracles.
#[derive(Clone, Debug)]
pub struct Entropy {
    name: String,
    kind: Kind,
    domain: EntropyDomain,
    homogeneity_degree: Option<f64>,
    strict: bool,
}

impl Entropy {
    /// `Φ(q) = q·q`, `Φ*(q) = 2q`.
    pub fn quadratic() -> Self {
        Self {
            name: "quadratic".into(),
            kind: Kind::Quadratic,
            domain: EntropyDomain::WholeSpace,
            homogeneity_degree: Some(2.0),
            strict: true,
        }
    }

    /// `Φ(q) = (q·q)^{1/2}`, `Φ*(q) = q / (q·q)^{1/2}`.
    pub fn spherical() -> Self {
        Self {
            name: "spherical".into(),
            kind: Kind::Spherical,
            domain: EntropyDomain::WholeSpace,
            homogeneity_degree: Some(1.0),
            strict: false,
        }
    }

    /// `Φ(q) = Σ q^γ μ`, `Φ*(q) = γ q^{γ−1}`, for `γ > 1`.
    pub fn power(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            name: format!("power({gamma})"),
            kind: Kind::Power(gamma),
            domain: EntropyDomain::Orthant,
            homogeneity_degree: Some(gamma),
            strict: true,
        })
    }

    /// `Φ(q) = Σ q ln q μ` with `0 ln 0 = 0`; subgradient `ln q + 1` only where every `q_i > 0`.
    pub fn shannon() -> Self {
        Self {
            name: "shannon".into(),
            kind: Kind::Shannon,
            domain: EntropyDomain::Orthant,
            homogeneity_degree: None,
            strict: true,
        }
    }

    /// `Φ(q) = (Σ q^γ μ)^{1/γ}`, for `γ > 1`.
    pub fn pseudospherical(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            name: format!("pseudospherical({gamma})"),
            kind: Kind::Pseudospherical(gamma),
            domain: EntropyDomain::Orthant,
            homogeneity_degree: Some(1.0),
            strict: false,
        })
    }

    /// `Φ(p) = pᵀQp` in plain coordinates (the weights are folded into `Q`).
    pub fn weighted_quadratic(q: DMatrix<f64>) -> Result<Self> {
        if !q.is_square() || q.nrows() == 0 {
            return Err(Error::InvalidParameter("Q must be a non-empty square matrix".into()));
        }
        let n = q.nrows();
        for i in 0..n {
            for j in 0..i {
                if (q[(i, j)] - q[(j, i)]).abs() > 1e-12 * (1.0 + q[(i, j)].abs()) {
                    return Err(Error::InvalidParameter("Q must be symmetric".into()));
                }
            }
        }
        if q.iter().any(|x| !x.is_finite()) || q.clone().cholesky().is_none() {
            return Err(Error::InvalidParameter("Q must be positive-definite".into()));
        }
        Ok(Self {
            name: format!("weighted_quadratic({n})"),
            kind: Kind::WeightedQuadratic(Arc::new(q)),
            domain: EntropyDomain::WholeSpace,
            homogeneity_degree: Some(2.0),
            strict: true,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn homogeneity_degree(&self) -> Option<f64> {
        self.homogeneity_degree
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub(crate) fn is_shannon(&self) -> bool {
        matches!(self.kind, Kind::Shannon)
    }

    /// The domain of `Φ` over a given space.
    pub fn domain_on(&self, space: &MeasureSpace) -> ConvexDomainSpec {
        match &self.domain {
            EntropyDomain::WholeSpace => ConvexDomainSpec::whole_space(space),
            EntropyDomain::Orthant => ConvexDomainSpec::orthant(space),
            EntropyDomain::Explicit(k) => k.clone(),
        }
    }

    fn check_domain(&self, q: &ConeVector) -> Result<()> {
        if let Some(i) = q.values().iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!("{}: entry {i} is not finite", self.name)));
        }
        match &self.domain {
            EntropyDomain::WholeSpace => Ok(()),
            EntropyDomain::Orthant => match q.values().iter().position(|&x| x < 0.0) {
                Some(i) => Err(Error::domain(format!("{}: entry {i} is negative", self.name))),
                None => Ok(()),
            },
            EntropyDomain::Explicit(k) => {
                k.space().check_same(q.space())?;
                if k.contains(q) {
                    Ok(())
                } else {
                    Err(Error::domain(format!("{}: point outside the declared domain", self.name)))
                }
            }
        }
    }

    /// `Φ(q)`.
    pub fn value(&self, q: &ConeVector) -> Result<f64> {
        self.check_domain(q)?;
        let w = q.space().weights();
        let v = q.values();
        let weighted = |f: &dyn Fn(f64) -> f64| compensated_sum(v.iter().zip(w).map(|(x, m)| f(*x) * m));
        Ok(match &self.kind {
            Kind::Quadratic => weighted(&|x| x * x),
            Kind::Spherical => weighted(&|x| x * x).sqrt(),
            Kind::Power(g) => weighted(&|x| x.powf(*g)),
            Kind::Shannon => weighted(&|x| if x == 0.0 { 0.0 } else { x * x.ln() }),
            Kind::Pseudospherical(g) => weighted(&|x| x.powf(*g)).powf(1.0 / g),
            Kind::WeightedQuadratic(m) => {
                check_matrix_dim(m, q)?;
                let x = nalgebra::DVector::from_column_slice(v);
                compensated_sum((0..x.len()).map(|i| x[i] * (m.row(i) * &x)[0]))
            }
            Kind::Composite(spec) => spec.outer.eval(spec.inner_integral(q)?),
            Kind::Rebased { base, anchor, anchor_value, anchor_gradient } => {
                base.value(q)? - pair(&q.sub(anchor)?, anchor_gradient)? - anchor_value
            }
        })
    }

    /// A subgradient `Φ*(q)`; errors where none exists in the dual.
    pub fn subgradient(&self, q: &ConeVector) -> Result<DualVector> {
        self.check_domain(q)?;
        let space = q.space();
        let v = q.values();
        let out = |values: Vec<f64>| DualVector::new(space, values);
        match &self.kind {
            Kind::Quadratic => out(v.iter().map(|x| 2.0 * x).collect()),
            Kind::Spherical => {
                let norm = self.value(q)?;
                if norm == 0.0 {
                    return Err(Error::domain("spherical: no unique subgradient at the origin"));
                }
                out(v.iter().map(|x| x / norm).collect())
            }
            Kind::Power(g) => out(v.iter().map(|x| g * x.powf(g - 1.0)).collect()),
            Kind::Shannon => {
                if let Some(i) = v.iter().position(|&x| x <= 0.0) {
                    return Err(Error::domain(format!("shannon: no subgradient at boundary point (entry {i} is 0)")));
                }
                out(v.iter().map(|x| x.ln() + 1.0).collect())
            }
            Kind::Pseudospherical(g) => {
                let s = compensated_sum(v.iter().zip(space.weights()).map(|(x, m)| x.powf(*g) * m));
                if s == 0.0 {
                    return Err(Error::domain("pseudospherical: no subgradient at the origin"));
                }
                let denom = s.powf((g - 1.0) / g);
                out(v.iter().map(|x| x.powf(g - 1.0) / denom).collect())
            }
            Kind::WeightedQuadratic(m) => {
                check_matrix_dim(m, q)?;
                let x = nalgebra::DVector::from_column_slice(v);
                let qx = m.as_ref() * x;
                out(qx.iter().zip(space.weights()).map(|(y, w)| 2.0 * y / w).collect())
            }
            Kind::Composite(spec) => {
                let s = spec.inner_integral(q)?;
                let outer = spec.outer.derivative(s);
                let values: Vec<f64> = v
                    .iter()
                    .zip(&spec.nu_weights)
                    .zip(space.weights())
                    .map(|((x, nu), mu)| outer * spec.inner.derivative(*x) * nu / mu)
                    .collect();
                if values.iter().any(|x| !x.is_finite()) {
                    return Err(Error::domain(format!("{}: subgradient not finite at this point", self.name)));
                }
                out(values)
            }
            Kind::Rebased { base, anchor_gradient, .. } => base.subgradient(q)?.sub(anchor_gradient),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 1.0) {
        return Err(Error::InvalidParameter(format!("exponent must satisfy γ > 1, got {gamma}")));
    }
    Ok(())
}

fn check_matrix_dim(m: &DMatrix<f64>, q: &ConeVector) -> Result<()> {
    if m.nrows() != q.len() {
        return Err(Error::Dimension { expected: m.nrows(), found: q.len() });
    }
    Ok(())
}

/// Look up a catalog entropy by name.
///
/// `power` and `pseudospherical` take one parameter `γ > 1`;
/// `weighted_quadratic` takes the `n²` entries of `Q` in row-major order.
pub fn catalog_entropy(name: &str, params: &[f64]) -> Result<Entropy> {
    let expect = |k: usize| {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("`{name}` takes {k} parameter(s), got {}", params.len())))
        }
    };
    match name {
        "quadratic" => expect(0).map(|_| Entropy::quadratic()),
        "spherical" => expect(0).map(|_| Entropy::spherical()),
        "shannon" => expect(0).map(|_| Entropy::shannon()),
        "power" => expect(1).and_then(|_| Entropy::power(params[0])),
        "pseudospherical" => expect(1).and_then(|_| Entropy::pseudospherical(params[0])),
        "weighted_quadratic" => {
            let n = (params.len() as f64).sqrt().round() as usize;
            if n == 0 || n * n != params.len() {
                return Err(Error::InvalidParameter("weighted_quadratic needs n² matrix entries".into()));
            }
            Entropy::weighted_quadratic(DMatrix::from_row_slice(n, n, params))
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}

/// `(q·1) Φ(q / (q·1))`, the 1-homogeneous extension to the positive cone.
pub fn canonical_extension_value(entropy: &Entropy, q: &ConeVector) -> Result<f64> {
    let density = normalize(q)?;
    Ok(total_mass(q) * entropy.value(&density)?)
}

/// The 0-homogeneous extension of the proper scoring rule built from `entropy`.
pub fn extended_subgradient(entropy: &Entropy, q: &ConeVector) -> Result<DualVector> {
    make_psr(entropy).score(&normalize(q)?)
}

/// One-sided estimate of `Φ′₊(p, q) = lim_{t→0⁺} (Φ(q+tp) − Φ(q)) / t`.
///
/// Uses a Richardson-extrapolated forward difference over steps `h` and `h/2`.
/// Returns `-inf` when the difference quotients keep decreasing without settling.
pub fn directional_derivative_fd(entropy: &Entropy, q: &ConeVector, p: &ConeVector, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    q.space().check_same(p.space())?;
    let phi_q = entropy.value(q)?;
    entropy
        .value(&q.combine(1.0, p, h)?)
        .map_err(|e| Error::domain(format!("q + h·p leaves the domain: {e}")))?;
    let quotient = |t: f64| -> Result<f64> { Ok((entropy.value(&q.combine(1.0, p, t)?)? - phi_q) / t) };
    let q1 = quotient(h)?;
    let q2 = quotient(h / 2.0)?;
    let q4 = quotient(h / 4.0)?;
    let d1 = q2 - q1;
    let d2 = q4 - q2;
    // a finite limit shrinks successive differences by ~1/2; a log-type blow-up does not
    if d1 < 0.0 && d2 < 0.0 && d2.abs() > 1e-4 && d2 / d1 >= 0.75 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(2.0 * q2 - q1)
}

const COMPOSITE_CHECK_SAMPLES: u64 = 200;
const COMPOSITE_CHECK_SEED: u64 = 0x000C_0440_517E;

/// Build `Φ(p) = φ(Σ f(p_i) ν_i)` on `domain`, rejecting non-convex compositions.
pub fn composite_entropy(spec: CompositeEntropySpec, domain: ConvexDomainSpec) -> Result<Entropy> {
    let space = domain.space().clone();
    if spec.nu_weights.len() != space.size() {
        return Err(Error::Dimension { expected: space.size(), found: spec.nu_weights.len() });
    }
    if spec.nu_weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidParameter("ν weights must be positive".into()));
    }
    let entropy = Entropy {
        name: format!("composite({}, {})", spec.outer.name(), spec.inner.name()),
        kind: Kind::Composite(spec.clone()),
        domain: EntropyDomain::Explicit(domain.clone()),
        homogeneity_degree: None,
        strict: false,
    };

    let mut points = Vec::new();
    for i in 0..COMPOSITE_CHECK_SAMPLES {
        if let Some(p) = domain.sample_point(&mut sample_rng(COMPOSITE_CHECK_SEED, i)) {
            points.push(p);
        }
    }
    if points.len() < 2 {
        return Err(Error::Construction("could not sample the domain".into()));
    }

    let mut inner: Vec<f64> = points.iter().map(|p| spec.inner_integral(p)).collect::<Result<_>>()?;
    inner.sort_by(f64::total_cmp);
    for w in inner.windows(2) {
        let (a, b) = (spec.outer.eval(w[0]), spec.outer.eval(w[1]));
        if b < a - 1e-12 * (1.0 + a.abs()) || spec.outer.derivative(w[0]) < 0.0 {
            return Err(Error::Construction(format!("outer function {} is not increasing near {}", spec.outer.name(), w[0])));
        }
    }

    for pq in points.chunks_exact(2) {
        let (p, q) = (&pq[0], &pq[1]);
        let mid = p.combine(0.5, q, 0.5)?;
        let (fp, fq, fm) = (entropy.value(p)?, entropy.value(q)?, entropy.value(&mid)?);
        let chord = 0.5 * (fp + fq);
        if fm > chord + 1e-10 * (1.0 + chord.abs()) {
            return Err(Error::Construction(format!(
                "{} fails the midpoint convexity check ({fm} > {chord})",
                entropy.name
            )));
        }
    }
    Ok(entropy)
}

/// `Ψ(p) = D(p, a)`: the entropy minus its supporting hyperplane at `a`.
pub(crate) fn rebase(entropy: &Entropy, anchor: &ConeVector) -> Result<Entropy> {
    let anchor_value = entropy.value(anchor)?;
    let anchor_gradient = entropy.subgradient(anchor)?;
    Ok(Entropy {
        name: format!("rebased({})", entropy.name),
        kind: Kind::Rebased { base: Box::new(entropy.clone()), anchor: anchor.clone(), anchor_value, anchor_gradient },
        domain: entropy.domain.clone(),
        homogeneity_degree: None,
        strict: entropy.strict,
    })
}
