//! Polyhedral convex domains and their local geometry.
//!
//! Every [`ConvexDomainSpec`] is reduced to an H-representation
//! (`a·x ≤ b` rows plus `a·x = b` rows in plain coordinates). From that we can
//! decide feasible directions exactly, compute the two-sided direction space
//! `O(q) = Cone(K−q) ∩ −Cone(K−q)`, and test algebraic quasi-interiority by
//! comparing annihilators.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::entropy::{directional_derivative_fd, Entropy, DEFAULT_FD_STEP};
use crate::error::{Error, Result};
use crate::measure::{pair, ConeVector, DualVector, MeasureSpace};
use crate::sampling::{dirichlet_density, sample_rng};

/// Singular values below this (relative to the largest, floored at 1) count as zero.
pub const RANK_TOL: f64 = 1e-10;

const MEMBERSHIP_TOL: f64 = 1e-9;
const ACTIVE_TOL: f64 = 1e-12;
const DIRECTION_TOL: f64 = 1e-12;

/// `normal·x ≤ offset` (or `=` when used as an equality), in plain coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    fn dot(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn scale(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| (a * b).abs()).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind {
    Simplex,
    NonnegativeOrthant,
    /// Conical hull of linearly independent generators.
    ConeHull { generators: Vec<Vec<f64>> },
    HalfspaceIntersection { inequalities: Vec<Halfspace>, equalities: Vec<Halfspace> },
}

/// A finite-dimensional polyhedral convex set over a measure space.
#[derive(Clone, Debug)]
pub struct ConvexDomainSpec {
    kind: DomainKind,
    space: MeasureSpace,
    inequalities: Vec<Halfspace>,
    equalities: Vec<Halfspace>,
}

impl ConvexDomainSpec {
    /// Probability densities: `q ≥ 0`, `Σ q_i μ_i = 1`.
    pub fn simplex(space: &MeasureSpace) -> Self {
        Self {
            kind: DomainKind::Simplex,
            space: space.clone(),
            inequalities: nonneg_rows(space.size()),
            equalities: vec![Halfspace::new(space.weights().to_vec(), 1.0)],
        }
    }

    pub fn orthant(space: &MeasureSpace) -> Self {
        Self {
            kind: DomainKind::NonnegativeOrthant,
            space: space.clone(),
            inequalities: nonneg_rows(space.size()),
            equalities: vec![],
        }
    }

    /// The whole vector space (no constraints).
    pub fn whole_space(space: &MeasureSpace) -> Self {
        Self::halfspaces(space, vec![], vec![]).expect("no constraints to validate")
    }

    /// `Cone{g_1, …, g_k}`. Generators must be linearly independent so the
    /// H-representation follows from a pseudo-inverse.
    pub fn cone_hull(space: &MeasureSpace, generators: Vec<Vec<f64>>) -> Result<Self> {
        let n = space.size();
        if generators.is_empty() {
            return Err(Error::InvalidParameter("cone hull needs at least one generator".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.len() != n) {
            return Err(Error::Dimension { expected: n, found: g.len() });
        }
        let k = generators.len();
        let g = DMatrix::from_fn(n, k, |i, j| generators[j][i]);
        if rank(&g) < k {
            return Err(Error::InvalidParameter("cone hull generators must be linearly independent".into()));
        }
        let pinv = g
            .clone()
            .pseudo_inverse(RANK_TOL)
            .map_err(|e| Error::Construction(format!("pseudo-inverse failed: {e}")))?;
        // λ = G⁺x ≥ 0
        let inequalities = (0..k)
            .map(|r| Halfspace::new((0..n).map(|c| -pinv[(r, c)]).collect(), 0.0))
            .collect();
        // x ∈ span(G): orthogonal complement rows vanish
        let rows: Vec<Vec<f64>> = generators.clone();
        let equalities = null_space(&rows, n).into_iter().map(|v| Halfspace::new(v, 0.0)).collect();
        Ok(Self { kind: DomainKind::ConeHull { generators }, space: space.clone(), inequalities, equalities })
    }

    /// `{x : a·x ≤ b for inequalities, a·x = b for equalities}`.
    ///
    /// Opposite inequality pairs (`a·x ≤ b`, `−a·x ≤ −b`) are folded into equalities.
    pub fn halfspaces(space: &MeasureSpace, inequalities: Vec<Halfspace>, equalities: Vec<Halfspace>) -> Result<Self> {
        let n = space.size();
        for h in inequalities.iter().chain(&equalities) {
            if h.normal.len() != n {
                return Err(Error::Dimension { expected: n, found: h.normal.len() });
            }
        }
        let mut ineq = Vec::new();
        let mut eq = equalities.clone();
        let mut paired = vec![false; inequalities.len()];
        for i in 0..inequalities.len() {
            if paired[i] {
                continue;
            }
            let a = &inequalities[i];
            let opposite = (i + 1..inequalities.len()).find(|&j| {
                !paired[j]
                    && (a.offset + inequalities[j].offset).abs() <= 1e-14 * (1.0 + a.offset.abs())
                    && a.normal.iter().zip(&inequalities[j].normal).all(|(x, y)| (x + y).abs() <= 1e-14 * (1.0 + x.abs()))
            });
            match opposite {
                Some(j) => {
                    paired[j] = true;
                    eq.push(a.clone());
                }
                None => ineq.push(a.clone()),
            }
        }
        Ok(Self {
            kind: DomainKind::HalfspaceIntersection { inequalities, equalities },
            space: space.clone(),
            inequalities: ineq,
            equalities: eq,
        })
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn inequalities(&self) -> &[Halfspace] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[Halfspace] {
        &self.equalities
    }

    pub fn contains(&self, q: &ConeVector) -> bool {
        if q.len() != self.space.size() || q.values().iter().any(|x| !x.is_finite()) {
            return false;
        }
        let x = q.values();
        self.inequalities
            .iter()
            .all(|h| h.dot(x) - h.offset <= MEMBERSHIP_TOL * (1.0 + h.scale(x) + h.offset.abs()))
            && self
                .equalities
                .iter()
                .all(|h| (h.dot(x) - h.offset).abs() <= MEMBERSHIP_TOL * (1.0 + h.scale(x) + h.offset.abs()))
    }

    fn require_member(&self, q: &ConeVector) -> Result<()> {
        self.space.check_same(q.space())?;
        if !self.contains(q) {
            return Err(Error::Precondition("point is not in the domain".into()));
        }
        Ok(())
    }

    fn is_active(&self, h: &Halfspace, x: &[f64]) -> bool {
        h.offset - h.dot(x) <= ACTIVE_TOL * (1.0 + h.scale(x) + h.offset.abs())
    }

    fn active_rows(&self, q: &ConeVector) -> Vec<&Halfspace> {
        self.inequalities.iter().filter(|h| self.is_active(h, q.values())).collect()
    }

    /// Largest `λ` with `q + λd ∈ K` (infinite when the ray stays inside).
    pub fn max_step(&self, q: &ConeVector, d: &ConeVector) -> Result<f64> {
        if !direction_cone_membership(self, q, d)? {
            return Ok(0.0);
        }
        let x = q.values();
        let mut step = f64::INFINITY;
        for h in &self.inequalities {
            if self.is_active(h, x) {
                continue;
            }
            let ad = h.dot(d.values());
            if ad > DIRECTION_TOL * (1.0 + h.scale(d.values())) {
                step = step.min((h.offset - h.dot(x)) / ad);
            }
        }
        Ok(step)
    }

    /// Draw a point of `K`; `None` when rejection sampling fails.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<ConeVector> {
        let n = self.space.size();
        let point = |v: Vec<f64>| ConeVector::new(&self.space, v).expect("length matches space");
        match &self.kind {
            DomainKind::Simplex => Some(dirichlet_density(rng, &self.space).into_cone()),
            DomainKind::NonnegativeOrthant => Some(point((0..n).map(|_| rng.gen_range(0.0..2.0)).collect())),
            DomainKind::ConeHull { generators } => {
                let mut v = vec![0.0; n];
                for g in generators {
                    let w: f64 = rng.gen_range(0.0..1.0);
                    for (vi, gi) in v.iter_mut().zip(g) {
                        *vi += w * gi;
                    }
                }
                Some(point(v))
            }
            DomainKind::HalfspaceIntersection { .. } => (0..256).find_map(|_| {
                let q = point((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect());
                self.contains(&q).then_some(q)
            }),
        }
    }

    /// A random direction `d` with `q + λd ∈ K` for small `λ > 0`, scaled to unit max-norm.
    pub fn sample_feasible_direction<R: Rng + ?Sized>(&self, rng: &mut R, q: &ConeVector) -> Option<ConeVector> {
        let n = self.space.size();
        let eq_rows: Vec<Vec<f64>> = self.equalities.iter().map(|h| h.normal.clone()).collect();
        let eq_null = null_space(&eq_rows, n);
        let active = self.active_rows(q);
        for _ in 0..64 {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut d = project(&raw, &eq_null);
            // reflect across violated active constraints
            for h in &active {
                let ad: f64 = h.dot(&d);
                if ad > 0.0 {
                    let nn: f64 = h.normal.iter().map(|a| a * a).sum();
                    let reflected: Vec<f64> = d.iter().zip(&h.normal).map(|(di, ai)| di - 2.0 * ad / nn * ai).collect();
                    d = project(&reflected, &eq_null);
                }
            }
            let scale = d.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if scale < 1e-8 {
                continue;
            }
            let d = ConeVector::new(&self.space, d.iter().map(|x| x / scale).collect()).ok()?;
            if direction_cone_membership(self, q, &d).unwrap_or(false) {
                return Some(d);
            }
        }
        None
    }
}

fn nonneg_rows(n: usize) -> Vec<Halfspace> {
    (0..n)
        .map(|i| {
            let mut a = vec![0.0; n];
            a[i] = -1.0;
            Halfspace::new(a, 0.0)
        })
        .collect()
}

fn rank(m: &DMatrix<f64>) -> usize {
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &b| a.max(b));
    let thresh = RANK_TOL * smax.max(1.0);
    svd.singular_values.iter().filter(|&&s| s > thresh).count()
}

/// Orthonormal basis of `{x : r·x = 0 for every row r}`.
pub(crate) fn null_space(rows: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let m = rows.len().max(n);
    let a = DMatrix::from_fn(m, n, |i, j| rows.get(i).map_or(0.0, |r| r[j]));
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &b| a.max(b));
    let thresh = RANK_TOL * smax.max(1.0);
    let mut basis: Vec<Vec<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= thresh)
        .map(|(k, _)| canonical_sign(v_t.row(k).iter().copied().collect()))
        .collect();
    basis.sort_by(|x, y| y.iter().map(|v| v.abs()).partial_cmp(x.iter().map(|v| v.abs())).unwrap_or(std::cmp::Ordering::Equal));
    basis
}

fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    for x in v.iter_mut() {
        if x.abs() < 1e-15 {
            *x = 0.0;
        }
    }
    v
}

/// Orthogonal projection onto the span of an orthonormal basis.
fn project(x: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for b in basis {
        let c: f64 = b.iter().zip(x).map(|(u, v)| u * v).sum();
        for (o, bi) in out.iter_mut().zip(b) {
            *o += c * bi;
        }
    }
    out
}

/// Is `d` a non-exterior direction at `q`, i.e. `q + λd ∈ K` for some `λ > 0`?
pub fn direction_cone_membership(k: &ConvexDomainSpec, q: &ConeVector, d: &ConeVector) -> Result<bool> {
    k.require_member(q)?;
    k.space.check_same(d.space())?;
    let dv = d.values();
    let eq_ok = k
        .equalities
        .iter()
        .all(|h| h.dot(dv).abs() <= DIRECTION_TOL * (1.0 + h.scale(dv)));
    let ineq_ok = k.active_rows(q).iter().all(|h| h.dot(dv) <= DIRECTION_TOL * h.scale(dv));
    Ok(eq_ok && ineq_ok)
}

/// Orthonormal basis of `O(q)`, the directions feasible both ways at `q`.
pub fn lineality_space(k: &ConvexDomainSpec, q: &ConeVector) -> Result<Vec<ConeVector>> {
    k.require_member(q)?;
    let rows: Vec<Vec<f64>> = k
        .equalities
        .iter()
        .chain(k.active_rows(q))
        .map(|h| h.normal.clone())
        .collect();
    null_space(&rows, k.space.size())
        .into_iter()
        .map(|v| ConeVector::new(&k.space, v))
        .collect()
}

/// Orthonormal basis of `{f : v·f = 0 for every input v}` under the μ-weighted pairing.
pub fn annihilator_basis(space: &MeasureSpace, vectors: &[ConeVector]) -> Result<Vec<DualVector>> {
    let mut rows = Vec::with_capacity(vectors.len());
    for v in vectors {
        space.check_same(v.space())?;
        rows.push(v.values().iter().zip(space.weights()).map(|(x, w)| x * w).collect::<Vec<_>>());
    }
    null_space(&rows, space.size())
        .into_iter()
        .map(|f| DualVector::new(space, f))
        .collect()
}

/// Direction space of the affine hull of `K`.
fn affine_directions(k: &ConvexDomainSpec) -> Result<Vec<ConeVector>> {
    let rows: Vec<Vec<f64>> = k.equalities.iter().map(|h| h.normal.clone()).collect();
    null_space(&rows, k.space.size())
        .into_iter()
        .map(|v| ConeVector::new(&k.space, v))
        .collect()
}

/// Algebraic quasi-interiority, relative to the affine hull of `K`.
///
/// `q` qualifies when the annihilator of `O(q)` is no larger than the
/// annihilator of the affine hull's direction space; for full-dimensional `K`
/// that means `O(q)` has trivial annihilator.
pub fn is_quasi_interior(k: &ConvexDomainSpec, q: &ConeVector) -> Result<bool> {
    let lineality = lineality_space(k, q)?;
    let own = annihilator_basis(&k.space, &lineality)?.len();
    let hull = annihilator_basis(&k.space, &affine_directions(k)?)?.len();
    Ok(own == hull)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RejectionReason {
    /// `Φ(p) < (p−q)·q* + Φ(q)` at the witness point.
    SubgradientInequality,
    /// `d·q* > Φ′₊(d, q)` along the witness direction.
    DirectionalDerivative,
}

#[derive(Clone, Debug, Serialize)]
pub struct RejectedCandidate {
    pub candidate: DualVector,
    pub reason: RejectionReason,
    /// Violating point `p` (inequality) or direction `d` (derivative).
    pub witness: ConeVector,
    /// Size of the violation (positive).
    pub violation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgradientProbeResult {
    pub verified: Vec<DualVector>,
    pub rejected: Vec<RejectedCandidate>,
    pub quasi_interior: bool,
    pub unique_claim: bool,
}

/// Sampling budget for [`subdifferential_probe`].
#[derive(Clone, Copy, Debug)]
pub struct ProbeSampler {
    pub seed: u64,
    pub points: usize,
    pub directions: usize,
}

impl Default for ProbeSampler {
    fn default() -> Self {
        Self { seed: 42, points: 500, directions: 64 }
    }
}

const PROBE_DERIVATIVE_TOL: f64 = 1e-6;

/// Check candidate subgradients of `E` at `q` relative to `K` against sampled evidence.
pub fn subdifferential_probe(
    entropy: &Entropy,
    k: &ConvexDomainSpec,
    q: &ConeVector,
    candidates: &[DualVector],
    sampler: ProbeSampler,
) -> Result<SubgradientProbeResult> {
    k.require_member(q)?;
    let phi_q = entropy.value(q)?;
    let n = k.space.size();

    // feasible directions: projected coordinate axes (both signs) plus random draws
    let mut directions: Vec<ConeVector> = Vec::new();
    let eq_rows: Vec<Vec<f64>> = k.equalities.iter().map(|h| h.normal.clone()).collect();
    let eq_null = null_space(&eq_rows, n);
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = sign;
            let d = project(&e, &eq_null);
            let scale = d.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if scale < 1e-8 {
                continue;
            }
            let d = ConeVector::new(&k.space, d.iter().map(|x| x / scale).collect())?;
            if direction_cone_membership(k, q, &d)? {
                directions.push(d);
            }
        }
    }
    for j in 0..sampler.directions {
        let mut rng = sample_rng(sampler.seed, j as u64);
        if let Some(d) = k.sample_feasible_direction(&mut rng, q) {
            directions.push(d);
        }
    }

    // probe points: domain samples plus short steps along feasible directions
    let mut points: Vec<ConeVector> = Vec::new();
    for j in 0..sampler.points {
        let mut rng = sample_rng(sampler.seed ^ 0x0005_eed0_f9e0, j as u64);
        if let Some(p) = k.sample_point(&mut rng) {
            points.push(p);
        }
    }
    let mut steps: Vec<(ConeVector, f64)> = Vec::with_capacity(directions.len());
    for d in &directions {
        let max = k.max_step(q, d)?;
        steps.push((d.clone(), max));
        for t in [1e-1, 1e-2, 1e-3] {
            let step = t * max.min(1.0);
            if step > 0.0 {
                points.push(q.combine(1.0, d, step)?);
            }
        }
    }
    let evaluated: Vec<(ConeVector, f64)> = points
        .into_iter()
        .filter_map(|p| entropy.value(&p).ok().map(|v| (p, v)))
        .collect();

    // one-sided derivatives along every feasible direction
    let mut derivatives: Vec<(ConeVector, f64)> = Vec::new();
    for (d, max) in &steps {
        let h = DEFAULT_FD_STEP.min(0.5 * max);
        if h <= 0.0 {
            continue;
        }
        if let Ok(v) = directional_derivative_fd(entropy, q, d, h) {
            derivatives.push((d.clone(), v));
        }
    }

    let mut verified = Vec::new();
    let mut rejected = Vec::new();
    for c in candidates {
        k.space.check_same(c.space())?;
        let mut worst: Option<(ConeVector, f64, RejectionReason)> = None;
        for (p, phi_p) in &evaluated {
            let gap = phi_p - phi_q - pair(&p.sub(q)?, c)?;
            let tol = 1e-10 * (1.0 + phi_p.abs() + phi_q.abs());
            if gap < -tol && worst.as_ref().is_none_or(|w| -gap > w.1) {
                worst = Some((p.clone(), -gap, RejectionReason::SubgradientInequality));
            }
        }
        if worst.is_none() {
            for (d, fd) in &derivatives {
                let excess = pair(d, c)? - fd;
                if excess > PROBE_DERIVATIVE_TOL && worst.as_ref().is_none_or(|w| excess > w.1) {
                    worst = Some((d.clone(), excess, RejectionReason::DirectionalDerivative));
                }
            }
        }
        match worst {
            Some((witness, violation, reason)) => {
                rejected.push(RejectedCandidate { candidate: c.clone(), reason, witness, violation })
            }
            None => verified.push(c.clone()),
        }
    }

    let quasi_interior = is_quasi_interior(k, q)?;
    let mut unique_claim = false;
    if quasi_interior && !verified.is_empty() {
        let basis = lineality_space(k, q)?;
        let mut two_sided = basis.clone();
        for j in 0..sampler.directions.min(16) {
            let mut rng = sample_rng(sampler.seed ^ 0x2_51de, j as u64);
            let mut v = vec![0.0; n];
            for b in &basis {
                let w: f64 = rng.gen_range(-1.0..1.0);
                for (vi, bi) in v.iter_mut().zip(b.values()) {
                    *vi += w * bi;
                }
            }
            let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if scale > 1e-8 {
                two_sided.push(ConeVector::new(&k.space, v.iter().map(|x| x / scale).collect())?);
            }
        }
        let mut slopes = Vec::with_capacity(two_sided.len());
        for d in &two_sided {
            let max = k.max_step(q, d)?.min(k.max_step(q, &d.scaled(-1.0))?);
            let h = DEFAULT_FD_STEP.min(0.5 * max);
            let fwd = directional_derivative_fd(entropy, q, d, h);
            let bwd = directional_derivative_fd(entropy, q, &d.scaled(-1.0), h);
            slopes.push((d.clone(), fwd, bwd));
        }
        unique_claim = verified.iter().any(|c| {
            slopes.iter().all(|(d, fwd, bwd)| match (fwd, bwd) {
                (Ok(f), Ok(b)) => {
                    let s = pair(d, c).unwrap_or(f64::NAN);
                    (s - f).abs() <= PROBE_DERIVATIVE_TOL && (-s - b).abs() <= PROBE_DERIVATIVE_TOL
                }
                _ => false,
            })
        });
    }

    Ok(SubgradientProbeResult { verified, rejected, quasi_interior, unique_claim })
}
