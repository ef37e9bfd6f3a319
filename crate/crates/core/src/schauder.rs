//! Closed-form cone fields, sampled Hölder norms in the cone metric and the probes built on
//! them: gradient bounds, interior estimates and the uniformity of the Schauder constant in β.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::ConeDisk;
use crate::error::{ConeError, Result};

use std::f64::consts::{PI, TAU};

/// A point of the cone times `ℂ ≅ ℝ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub r: f64,
    pub theta: f64,
    pub y: [f64; 2],
}

impl ConePoint {
    pub fn new(r: f64, theta: f64) -> Self {
        ConePoint { r, theta, y: [0.0; 2] }
    }
}

fn wrap_angle(d: f64) -> f64 {
    let w = d.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Angle between the developed frames of `a` and `b`; the geodesic stays off the apex
/// because `β|Δθ| ≤ βπ < π/2`.
fn developed_angle(beta: f64, a: &ConePoint, b: &ConePoint) -> f64 {
    beta * wrap_angle(b.theta - a.theta)
}

pub fn cone_distance(beta: f64, a: &ConePoint, b: &ConePoint) -> f64 {
    let phi = developed_angle(beta, a, b);
    let planar = a.r * a.r + b.r * b.r - 2.0 * a.r * b.r * phi.cos();
    let dy = (a.y[0] - b.y[0]).powi(2) + (a.y[1] - b.y[1]).powi(2);
    (planar.max(0.0) + dy).sqrt()
}

/// Value, gradient and covariant Hessian in the orthonormal frame `(e_r, e_θ/(βr), ∂_{y1}, ∂_{y2})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 4],
    pub hess: [[f64; 4]; 4],
}

impl Jet {
    pub fn laplacian(&self) -> f64 {
        (0..4).map(|i| self.hess[i][i]).sum()
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad.iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    /// The frame at this point expressed in the frame of a point `phi` radians behind it.
    fn rotated(&self, phi: f64) -> Jet {
        let (s, c) = phi.sin_cos();
        let rot = [[c, -s, 0.0, 0.0], [s, c, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
        let mut grad = [0.0; 4];
        for i in 0..4 {
            grad[i] = (0..4).map(|k| rot[i][k] * self.grad[k]).sum();
        }
        let mut hess = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    for l in 0..4 {
                        acc += rot[i][k] * self.hess[k][l] * rot[j][l];
                    }
                }
                hess[i][j] = acc;
            }
        }
        Jet { value: self.value, grad, hess }
    }
}

/// A scalar field on the cone with exact jets.
pub trait ConeField: Sync {
    fn jet(&self, beta: f64, p: &ConePoint) -> Jet;
}

/// `amp·r^power·cos(kθ + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTerm {
    pub k: u32,
    pub power: f64,
    pub amp: f64,
    pub phase: f64,
}

/// Finite sum of [`ModeTerm`]s plus a quadratic polynomial in the flat factor.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigRadialPoly {
    pub terms: Vec<ModeTerm>,
    /// `y ↦ yᵀAy + b·y` with `A` symmetric.
    pub tangential: Option<([[f64; 2]; 2], [f64; 2])>,
}

impl TrigRadialPoly {
    pub fn new(terms: Vec<ModeTerm>) -> Self {
        TrigRadialPoly { terms, tangential: None }
    }

    pub fn value(&self, r: f64, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let rp = if t.power == 0.0 { 1.0 } else { r.powf(t.power) };
                t.amp * rp * (f64::from(t.k) * theta + t.phase).cos()
            })
            .sum()
    }

    /// Largest absolute value of the cone part for `r ≤ radius`, bounded by the sum of term maxima.
    pub fn sup_bound(&self, radius: f64) -> f64 {
        self.terms.iter().map(|t| t.amp.abs() * radius.powf(t.power)).sum()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        TrigRadialPoly {
            terms: self.terms.iter().map(|t| ModeTerm { amp: lambda * t.amp, ..*t }).collect(),
            tangential: self.tangential.map(|(a, b)| {
                ([[lambda * a[0][0], lambda * a[0][1]], [lambda * a[1][0], lambda * a[1][1]]], [lambda * b[0], lambda * b[1]])
            }),
        }
    }
}

impl ConeField for TrigRadialPoly {
    fn jet(&self, beta: f64, p: &ConePoint) -> Jet {
        let r = p.r;
        let mut j = Jet { value: 0.0, grad: [0.0; 4], hess: [[0.0; 4]; 4] };
        for t in &self.terms {
            let k = f64::from(t.k);
            let (s, c) = (k * p.theta + t.phase).sin_cos();
            let pw = t.power;
            let rp = if pw == 0.0 { 1.0 } else { r.powf(pw) };
            let a = t.amp;
            let u = a * rp * c;
            let ur = if pw == 0.0 { 0.0 } else { a * pw * rp / r * c };
            let ut = -a * k * rp * s;
            let urr = if pw == 0.0 { 0.0 } else { a * pw * (pw - 1.0) * rp / (r * r) * c };
            let urt = if pw == 0.0 { 0.0 } else { -a * k * pw * rp / r * s };
            let utt = -a * k * k * rp * c;
            j.value += u;
            j.grad[0] += ur;
            j.grad[1] += ut / (beta * r);
            j.hess[0][0] += urr;
            let mixed = (urt - ut / r) / (beta * r);
            j.hess[0][1] += mixed;
            j.hess[1][0] += mixed;
            j.hess[1][1] += utt / (beta * beta * r * r) + ur / r;
        }
        if let Some((m, b)) = self.tangential {
            let y = p.y;
            j.value += m[0][0] * y[0] * y[0] + 2.0 * m[0][1] * y[0] * y[1] + m[1][1] * y[1] * y[1] + b[0] * y[0] + b[1] * y[1];
            j.grad[2] += 2.0 * (m[0][0] * y[0] + m[0][1] * y[1]) + b[0];
            j.grad[3] += 2.0 * (m[1][0] * y[0] + m[1][1] * y[1]) + b[1];
            for a in 0..2 {
                for c in 0..2 {
                    j.hess[2 + a][2 + c] += 2.0 * m[a][c];
                }
            }
        }
        j
    }
}

/// Boundary datum `amp·cos(kθ + phase)` on `r = R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTerm {
    pub k: u32,
    pub amp: f64,
    pub phase: f64,
}

/// Exact solution of `Δu = f` on the disk with trigonometric boundary data, itself a
/// [`TrigRadialPoly`]: `r^p cos` sources give `r^{p+2}/((p+2)² − ν²)` plus a multiple of `r^ν`,
/// `ν = k/β`, fixed by the boundary value.
pub fn solve_closed_form(disk: &ConeDisk, source: &TrigRadialPoly, boundary: &[BoundaryTerm]) -> Result<TrigRadialPoly> {
    if source.tangential.is_some() {
        return Err(ConeError::param("source", "tangential sources are not handled in closed form"));
    }
    let rr = disk.radius;
    let mut terms = Vec::new();
    for t in &source.terms {
        let nu = f64::from(t.k) / disk.beta;
        let q = t.power + 2.0;
        let denom = q * q - nu * nu;
        if denom.abs() < 1e-6 * q * q {
            return Err(ConeError::param("source", format!("power {} resonates with mode k = {}", t.power, t.k)));
        }
        let c = t.amp / denom;
        terms.push(ModeTerm { k: t.k, power: q, amp: c, phase: t.phase });
        if t.k > 0 {
            terms.push(ModeTerm { k: t.k, power: nu, amp: -c * rr.powf(q - nu), phase: t.phase });
        } else {
            terms.push(ModeTerm { k: 0, power: 0.0, amp: -c * rr.powf(q), phase: 0.0 });
        }
    }
    for b in boundary {
        let nu = f64::from(b.k) / disk.beta;
        terms.push(ModeTerm { k: b.k, power: nu, amp: b.amp * rr.powf(-nu), phase: b.phase });
    }
    Ok(TrigRadialPoly::new(terms))
}

/// One problem of a seeded corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusProblem {
    pub source: TrigRadialPoly,
    pub boundary: Vec<BoundaryTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub problems: usize,
    pub max_k: u32,
    pub max_terms: usize,
    pub with_boundary: bool,
    /// Only `k ≥ 1` source terms.
    pub zero_mean: bool,
    /// Adds a constant making the source positive.
    pub positive: bool,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { seed: 7, problems: 20, max_k: 4, max_terms: 4, with_boundary: true, zero_mean: false, positive: false }
    }
}

/// Generates the corpus. Problem `i` draws from its own stream seeded by `(seed, i)`, so
/// corpora of different sizes share their prefixes. Sources are trigonometric-radial
/// polynomials with powers in `{0, 1, 3/2, 2, 5/2, 3}` plus, for every third problem, an `r^α` radial profile.
pub fn corpus(spec: &CorpusSpec, alpha: f64) -> Vec<CorpusProblem> {
    (0..spec.problems)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64 + 1);
            let count = rng.gen_range(1..=spec.max_terms.max(1));
            let mut terms = Vec::with_capacity(count + 1);
            for _ in 0..count {
                let k = if spec.zero_mean { rng.gen_range(1..=spec.max_k.max(1)) } else { rng.gen_range(0..=spec.max_k) };
                // Half-integer powers keep p + 2 off the resonances k/β of the sweep.
                let power = if k == 0 { [0.0, 1.0, 2.0][rng.gen_range(0..3)] } else { [1.0, 1.5, 2.5, 3.0][rng.gen_range(0..4)] };
                let amp = rng.gen_range(-1.0..1.0);
                let phase = if k == 0 { 0.0 } else { rng.gen_range(0.0..TAU) };
                terms.push(ModeTerm { k, power, amp, phase });
            }
            if !spec.zero_mean && i % 3 == 2 {
                terms.push(ModeTerm { k: 0, power: alpha, amp: rng.gen_range(-1.0..1.0), phase: 0.0 });
            }
            if spec.positive {
                let bound: f64 = terms.iter().map(|t| t.amp.abs()).sum();
                terms.push(ModeTerm { k: 0, power: 0.0, amp: bound + 0.1, phase: 0.0 });
            }
            let boundary = if spec.with_boundary {
                (0..rng.gen_range(1..=3))
                    .map(|_| BoundaryTerm { k: rng.gen_range(0..=spec.max_k), amp: rng.gen_range(-1.0..1.0), phase: rng.gen_range(0.0..TAU) })
                    .collect()
            } else {
                Vec::new()
            };
            CorpusProblem { source: TrigRadialPoly::new(terms), boundary }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    /// `C⁰ + C^α(∇u) + C^α(D''∇u) + C^α(Δu)`, without the `D₁², D₁D₂, D₂²` block.
    Donaldson2Alpha,
    /// All of `∇²u`, seminorm over pairs with `|r(x) − r(y)| < r(x)/2`.
    Full2Alpha,
    CAlpha,
}

/// Sampling budget for [`holder_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingBudget {
    pub n_r: usize,
    pub n_theta: usize,
    /// Number of `y` layers (1 samples `y = 0` only).
    pub n_y: usize,
    pub random_pairs: usize,
    /// Smallest sampled radius relative to the region radius.
    pub r_min: f64,
    pub seed: u64,
}

impl Default for SamplingBudget {
    fn default() -> Self {
        SamplingBudget { n_r: 40, n_theta: 48, n_y: 1, random_pairs: 20_000, r_min: 1e-3, seed: 11 }
    }
}

/// Sampled lower bound of a Hölder norm, split into its pieces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderNormEstimate {
    pub kind: NormKind,
    pub c0: f64,
    pub value_semi: f64,
    pub grad_c0: f64,
    pub grad_semi: f64,
    pub tangential_c0: f64,
    pub tangential_semi: f64,
    pub hessian_c0: f64,
    pub hessian_semi: f64,
    pub laplacian_c0: f64,
    pub laplacian_semi: f64,
    pub total: f64,
    pub points: usize,
    pub pairs: usize,
    pub constrained_pairs: usize,
}

fn sample_points(region: f64, budget: &SamplingBudget) -> Vec<ConePoint> {
    let mut pts = Vec::with_capacity(budget.n_r * budget.n_theta * budget.n_y);
    let ys: Vec<[f64; 2]> = (0..budget.n_y)
        .map(|l| if l == 0 { [0.0, 0.0] } else { let a = TAU * l as f64 / budget.n_y as f64; [0.1 * region * a.cos(), 0.1 * region * a.sin()] })
        .collect();
    for y in &ys {
        for i in 0..budget.n_r {
            let r = region * budget.r_min.powf(1.0 - i as f64 / (budget.n_r - 1) as f64);
            for j in 0..budget.n_theta {
                pts.push(ConePoint { r, theta: TAU * j as f64 / budget.n_theta as f64, y: *y });
            }
        }
    }
    pts
}

#[derive(Default, Clone, Copy)]
struct Accum {
    value: f64,
    grad: f64,
    tangential: f64,
    hessian: f64,
    laplacian: f64,
    pairs: usize,
    constrained: usize,
}

impl Accum {
    fn merge(mut self, o: Accum) -> Accum {
        self.value = self.value.max(o.value);
        self.grad = self.grad.max(o.grad);
        self.tangential = self.tangential.max(o.tangential);
        self.hessian = self.hessian.max(o.hessian);
        self.laplacian = self.laplacian.max(o.laplacian);
        self.pairs += o.pairs;
        self.constrained += o.constrained;
        self
    }
}

fn pair_quotients(beta: f64, alpha: f64, a: (&ConePoint, &Jet), b: (&ConePoint, &Jet), acc: &mut Accum) {
    let d = cone_distance(beta, a.0, b.0);
    if !(d > 0.0) {
        return;
    }
    let jb = b.1.rotated(developed_angle(beta, a.0, b.0));
    let ja = a.1;
    let da = d.powf(alpha);
    let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
    acc.value = acc.value.max((ja.value - jb.value).abs() / da);
    acc.grad = acc.grad.max(norm(&mut (0..4).map(|i| ja.grad[i] - jb.grad[i])) / da);
    acc.tangential = acc.tangential.max(norm(&mut (2..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| ja.hess[i][j] - jb.hess[i][j])) / da);
    acc.laplacian = acc.laplacian.max((ja.laplacian() - jb.laplacian()).abs() / da);
    acc.pairs += 1;
    if (a.0.r - b.0.r).abs() < 0.5 * a.0.r {
        acc.hessian = acc.hessian.max(norm(&mut (0..16).map(|q| ja.hess[q / 4][q % 4] - jb.hess[q / 4][q % 4])) / da);
        acc.constrained += 1;
    }
}

/// Estimates the norm of `field` on the region `r ≤ region` by sampling: radially and
/// angularly aligned pairs, pairs on opposite sides of the apex, `y`-aligned pairs and
/// seeded random close pairs. Every quotient is an actual value, so the result is a lower bound.
pub fn holder_norm(disk: &ConeDisk, field: &dyn ConeField, region: f64, kind: NormKind, budget: &SamplingBudget) -> Result<HolderNormEstimate> {
    if budget.n_r < 8 || budget.n_theta < 8 || budget.n_y == 0 || budget.random_pairs < 100 {
        return Err(ConeError::param("budget", "insufficient sampling budget (need n_r, n_θ ≥ 8, n_y ≥ 1, ≥ 100 random pairs)"));
    }
    if !(budget.r_min > 0.0 && budget.r_min < 1.0) || !(region > 0.0 && region <= disk.radius) {
        return Err(ConeError::param("region", "need 0 < region ≤ R and 0 < r_min < 1"));
    }
    let beta = disk.beta;
    let alpha = disk.alpha;
    let pts = sample_points(region, budget);
    let jets: Vec<Jet> = pts.iter().map(|p| field.jet(beta, p)).collect();
    if jets.iter().any(|j| !j.value.is_finite() || j.grad.iter().any(|g| !g.is_finite())) {
        return Err(ConeError::NonFinite("field jet on the sample set".into()));
    }
    let (nr, nt, ny) = (budget.n_r, budget.n_theta, budget.n_y);
    let idx = |l: usize, i: usize, j: usize| (l * nr + i) * nt + j;
    let mut c0 = 0.0_f64;
    let mut grad_c0 = 0.0_f64;
    let mut tangential_c0 = 0.0_f64;
    let mut hessian_c0 = 0.0_f64;
    let mut laplacian_c0 = 0.0_f64;
    for j in &jets {
        c0 = c0.max(j.value.abs());
        grad_c0 = grad_c0.max(j.grad_norm());
        let t: f64 = (2..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| j.hess[a][b].powi(2)).sum();
        tangential_c0 = tangential_c0.max(t.sqrt());
        hessian_c0 = hessian_c0.max(j.hess.iter().flatten().map(|x| x * x).sum::<f64>().sqrt());
        laplacian_c0 = laplacian_c0.max(j.laplacian().abs());
    }
    // Structured pairs, one task per (layer, radius).
    let structured = (0..ny * nr)
        .into_par_iter()
        .map(|li| {
            let (l, i) = (li / nr, li % nr);
            let mut acc = Accum::default();
            for j in 0..nt {
                let a = idx(l, i, j);
                for i2 in i + 1..nr {
                    let b = idx(l, i2, j);
                    pair_quotients(beta, alpha, (&pts[a], &jets[a]), (&pts[b], &jets[b]), &mut acc);
                }
                for j2 in j + 1..nt {
                    let b = idx(l, i, j2);
                    pair_quotients(beta, alpha, (&pts[a], &jets[a]), (&pts[b], &jets[b]), &mut acc);
                }
                if j % 4 == 0 {
                    let opposite = (j + nt / 2) % nt;
                    for i2 in 0..nr {
                        let b = idx(l, i2, opposite);
                        pair_quotients(beta, alpha, (&pts[a], &jets[a]), (&pts[b], &jets[b]), &mut acc);
                    }
                }
                for l2 in l + 1..ny {
                    let b = idx(l2, i, j);
                    pair_quotients(beta, alpha, (&pts[a], &jets[a]), (&pts[b], &jets[b]), &mut acc);
                }
            }
            acc
        })
        .reduce(Accum::default, Accum::merge);
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut random = Accum::default();
    for _ in 0..budget.random_pairs {
        let r = region * rng.gen::<f64>().sqrt();
        let theta = rng.gen_range(0.0..TAU);
        let y = if ny > 1 { pts[idx(rng.gen_range(0..ny), 0, 0)].y } else { [0.0; 2] };
        let a = ConePoint { r, theta, y };
        let delta = region * 10f64.powf(-4.0 * rng.gen::<f64>());
        let dir = rng.gen_range(0.0..TAU);
        // Partner in the developed chart of `a`.
        let (px, py) = (r + delta * dir.cos(), delta * dir.sin());
        let r2 = px.hypot(py);
        if !(r2 > 0.0 && r2 <= region) {
            continue;
        }
        let b = ConePoint { r: r2, theta: theta + py.atan2(px) / beta, y };
        let (ja, jb) = (field.jet(beta, &a), field.jet(beta, &b));
        pair_quotients(beta, alpha, (&a, &ja), (&b, &jb), &mut random);
    }
    let acc = structured.merge(random);
    let mut est = HolderNormEstimate {
        kind,
        c0,
        value_semi: acc.value,
        grad_c0,
        grad_semi: acc.grad,
        tangential_c0,
        tangential_semi: acc.tangential,
        hessian_c0,
        hessian_semi: acc.hessian,
        laplacian_c0,
        laplacian_semi: acc.laplacian,
        total: 0.0,
        points: pts.len(),
        pairs: acc.pairs,
        constrained_pairs: acc.constrained,
    };
    est.total = match kind {
        NormKind::CAlpha => c0 + acc.value,
        NormKind::Donaldson2Alpha => c0 + grad_c0 + acc.grad + tangential_c0 + acc.tangential + laplacian_c0 + acc.laplacian,
        NormKind::Full2Alpha => c0 + grad_c0 + acc.grad + hessian_c0 + acc.hessian + laplacian_c0 + acc.laplacian,
    };
    Ok(est)
}

/// Per-β row of [`schauder_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchauderRow {
    pub beta: f64,
    pub donaldson_max: f64,
    pub full_max: f64,
    /// `sup|u|/r^{2+α}` over `‖f‖_{C^α}` for the zero-mean corpus with zero boundary values.
    pub decay_max: f64,
    pub problems: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchauderTable {
    pub alpha: f64,
    pub rows: Vec<SchauderRow>,
    pub donaldson_variation: f64,
    pub full_variation: f64,
    pub decay_variation: f64,
}

fn variation(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let hi = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    let lo = xs.fold(f64::INFINITY, f64::min);
    hi / lo
}

/// `‖u‖_{C^{2,α}(B')}/(‖f‖_{C^α(B)} + ‖u‖_{C⁰(B)})` for both `C^{2,α}` norms, maximized over the
/// corpus, for each `β`. `B` is the disk of radius `1/2` and `B'` the concentric one of radius `1/4`.
pub fn schauder_probe(betas: &[f64], alpha: f64, spec: &CorpusSpec, budget: &SamplingBudget) -> Result<SchauderTable> {
    if betas.is_empty() {
        return Err(ConeError::param("beta", "empty β list"));
    }
    let problems = corpus(&CorpusSpec { with_boundary: false, zero_mean: false, ..*spec }, alpha);
    let zero_mean = corpus(&CorpusSpec { with_boundary: false, zero_mean: true, ..*spec }, alpha);
    let rows = betas
        .iter()
        .map(|&beta| -> Result<SchauderRow> {
            let disk = ConeDisk::new(beta, 0.5, alpha)?;
            let ratios = problems
                .par_iter()
                .map(|p| -> Result<(f64, f64)> {
                    let u = solve_closed_form(&disk, &p.source, &p.boundary)?;
                    let f_norm = holder_norm(&disk, &p.source, disk.radius, NormKind::CAlpha, budget)?.total;
                    let u0 = holder_norm(&disk, &u, disk.radius, NormKind::CAlpha, budget)?.c0;
                    let d = holder_norm(&disk, &u, 0.5 * disk.radius, NormKind::Donaldson2Alpha, budget)?.total;
                    let full = holder_norm(&disk, &u, 0.5 * disk.radius, NormKind::Full2Alpha, budget)?.total;
                    Ok((d / (f_norm + u0), full / (f_norm + u0)))
                })
                .collect::<Result<Vec<_>>>()?;
            let decay = zero_mean
                .par_iter()
                .map(|p| -> Result<f64> { decay_ratio(&disk, p, budget) })
                .collect::<Result<Vec<_>>>()?;
            Ok(SchauderRow {
                beta,
                donaldson_max: ratios.iter().map(|r| r.0).fold(0.0, f64::max),
                full_max: ratios.iter().map(|r| r.1).fold(0.0, f64::max),
                decay_max: decay.iter().copied().fold(0.0, f64::max),
                problems: problems.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SchauderTable {
        alpha,
        donaldson_variation: variation(rows.iter().map(|r| r.donaldson_max)),
        full_variation: variation(rows.iter().map(|r| r.full_max)),
        decay_variation: variation(rows.iter().map(|r| r.decay_max)),
        rows,
    })
}

/// `sup_B |u|/r^{2+α}` over `‖f‖_{C^α(B)}` for a zero-circle-mean source with `u = 0` on `∂B`.
pub fn decay_ratio(disk: &ConeDisk, p: &CorpusProblem, budget: &SamplingBudget) -> Result<f64> {
    let u = solve_closed_form(disk, &p.source, &[])?;
    let f_norm = holder_norm(disk, &p.source, disk.radius, NormKind::CAlpha, budget)?.total;
    let mut sup = 0.0_f64;
    for i in 0..budget.n_r {
        let r = disk.radius * budget.r_min.powf(1.0 - i as f64 / (budget.n_r - 1) as f64);
        for j in 0..budget.n_theta {
            let v = u.value(r, TAU * j as f64 / budget.n_theta as f64);
            sup = sup.max(v.abs() / r.powf(2.0 + disk.alpha));
        }
    }
    Ok(sup / f_norm)
}

/// Tightest constant of the gradient bound at one `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientBoundRow {
    pub beta: f64,
    pub constant: f64,
    pub samples: usize,
}

/// `|∇u| ≤ C[(1/β)(r/ρ)^{1/β}r^{−1} sup|u| + r sup|f|]` on `B_ρ`, `ρ = R`, over the corpus;
/// reports the smallest `C` consistent with the samples.
pub fn gradient_bound_probe(betas: &[f64], spec: &CorpusSpec, r_samples: &[f64]) -> Result<Vec<GradientBoundRow>> {
    betas
        .iter()
        .map(|&beta| {
            let disk = ConeDisk::standard(beta)?;
            let rho = disk.radius;
            let mut constant = 0.0_f64;
            let mut samples = 0;
            for p in corpus(spec, disk.alpha) {
                let u = solve_closed_form(&disk, &p.source, &p.boundary)?;
                let (su, sf) = sampled_sups(&disk, &u, &p.source);
                for &r in r_samples {
                    if !(r > 0.0 && r < rho) {
                        return Err(ConeError::param("r_samples", "radii must lie in (0, ρ)"));
                    }
                    let bound = (r / rho).powf(1.0 / beta) / (beta * r) * su + r * sf;
                    for j in 0..32 {
                        let g = u.jet(beta, &ConePoint::new(r, TAU * j as f64 / 32.0)).grad_norm();
                        constant = constant.max(g / bound);
                        samples += 1;
                    }
                }
            }
            Ok(GradientBoundRow { beta, constant, samples })
        })
        .collect()
}

fn sampled_sups(disk: &ConeDisk, u: &TrigRadialPoly, f: &TrigRadialPoly) -> (f64, f64) {
    let mut su = 0.0_f64;
    let mut sf = 0.0_f64;
    for i in 0..=64 {
        let r = disk.radius * i as f64 / 64.0;
        for j in 0..64 {
            let t = TAU * j as f64 / 64.0;
            su = su.max(u.value(r, t).abs());
            sf = sf.max(f.value(r, t).abs());
        }
    }
    (su, sf)
}

/// `ρ·sup_{B(ρ/2)}|∇u| / sup_{B(ρ)}|u|` for the harmonic extension of `boundary` from `r = ρ`.
pub fn interior_gradient_constant(beta: f64, rho: f64, boundary: &[BoundaryTerm]) -> Result<f64> {
    let disk = ConeDisk::new(beta, rho, 0.5)?;
    let u = solve_closed_form(&disk, &TrigRadialPoly::default(), boundary)?;
    let mut grad = 0.0_f64;
    let mut sup = 0.0_f64;
    for i in 1..=48 {
        let r = rho * i as f64 / 48.0;
        for j in 0..64 {
            let p = ConePoint::new(r, TAU * j as f64 / 64.0);
            let jet = u.jet(beta, &p);
            sup = sup.max(jet.value.abs());
            if r <= 0.5 * rho {
                grad = grad.max(jet.grad_norm());
            }
        }
    }
    Ok(rho * grad / sup)
}

/// For `u = (r/ρ)^{1/β}cos θ + c(r² − |y|²)/ρ²`, harmonic on the cone times `ℂ`, the largest
/// value of `ρ|∇u|(r)/(sup|u|·[(1/β)(r/ρ)^{1/β−1} + r/ρ])` over `r < ρ` at `y = 0`.
pub fn divisor_gradient_constant(beta: f64, rho: f64, c: f64) -> Result<f64> {
    let disk = ConeDisk::new(beta, rho, 0.5)?;
    let mut u = solve_closed_form(&disk, &TrigRadialPoly::default(), &[BoundaryTerm { k: 1, amp: 1.0, phase: 0.0 }])?;
    u.terms.push(ModeTerm { k: 0, power: 2.0, amp: c / (rho * rho), phase: 0.0 });
    // −|y|² in the real plane y ∈ ℝ² balances Δr² = 4.
    u.tangential = Some(([[-c / (rho * rho), 0.0], [0.0, -c / (rho * rho)]], [0.0, 0.0]));
    let sup = 1.0 + c.abs();
    let mut worst = 0.0_f64;
    for i in 1..=200 {
        let r = rho * i as f64 / 201.0;
        let scale = (r / rho).powf(1.0 / beta - 1.0) / beta + r / rho;
        for j in 0..16 {
            let g = u.jet(beta, &ConePoint::new(r, TAU * j as f64 / 16.0)).grad_norm();
            worst = worst.max(rho * g / (sup * scale));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_solution_has_the_source_as_laplacian() {
        let disk = ConeDisk::standard(0.2).unwrap();
        let p = &corpus(&CorpusSpec::default(), 0.5)[3];
        let u = solve_closed_form(&disk, &p.source, &p.boundary).unwrap();
        for &(r, t) in &[(0.1, 0.3), (0.3, 2.0), (0.45, 5.0)] {
            let lap = u.jet(0.2, &ConePoint::new(r, t)).laplacian();
            assert!((lap - p.source.value(r, t)).abs() < 1e-10);
        }
        let bd: f64 = p.boundary.iter().map(|b| b.amp * (f64::from(b.k) * 1.0 + b.phase).cos()).sum();
        assert!((u.value(0.5, 1.0) - bd).abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_laplacian() {
        let f = TrigRadialPoly::new(vec![ModeTerm { k: 2, power: 3.0, amp: 1.0, phase: 0.1 }]);
        let j = f.jet(0.3, &ConePoint::new(0.2, 1.0));
        let r = j.rotated(0.7);
        assert!((r.laplacian() - j.laplacian()).abs() < 1e-12);
        assert!((r.grad_norm() - j.grad_norm()).abs() < 1e-12);
    }

    #[test]
    fn quadratic_has_vanishing_seminorms() {
        let disk = ConeDisk::standard(0.25).unwrap();
        let u = TrigRadialPoly::new(vec![ModeTerm { k: 0, power: 2.0, amp: 1.0, phase: 0.0 }]);
        let est = holder_norm(&disk, &u, 0.25, NormKind::Full2Alpha, &SamplingBudget { n_r: 12, n_theta: 16, random_pairs: 500, ..Default::default() }).unwrap();
        assert!(est.laplacian_semi < 1e-9 && est.hessian_semi < 1e-9);
        assert!((est.laplacian_c0 - 4.0).abs() < 1e-12);
    }
}
