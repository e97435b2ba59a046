//! Supported compact Lie groups: unitary duals, elliptic weights, spectral
//! counting envelopes and probability-normalized Haar quadrature.
//!
//! Torus(n) has dual ℤⁿ with d_ξ = 1 and λ = |ξ|². SU(2) has one class per
//! ℓ ∈ ℕ₀ with d = ℓ+1 and Casimir eigenvalue λ = ℓ(ℓ+2), so ⟨ξ⟩ = ℓ+1.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a class in the unitary dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DualLabel {
    /// Lattice point of ℤⁿ, `rank` leading coordinates used.
    Lattice { coords: [i64; 3], rank: u8 },
    /// Highest weight ℓ of SU(2) (dimension ℓ+1).
    Spin(u32),
}

impl DualLabel {
    pub fn lattice(&self) -> Option<&[i64]> {
        match self {
            DualLabel::Lattice { coords, rank } => Some(&coords[..*rank as usize]),
            DualLabel::Spin(_) => None,
        }
    }

    pub fn spin(&self) -> Option<u32> {
        match *self {
            DualLabel::Spin(l) => Some(l),
            DualLabel::Lattice { .. } => None,
        }
    }
}

impl fmt::Display for DualLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualLabel::Lattice { .. } => write!(f, "{:?}", self.lattice().unwrap()),
            DualLabel::Spin(l) => write!(f, "l={l}"),
        }
    }
}

/// One equivalence class [ξ] of irreducible unitary representations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualElement {
    pub label: DualLabel,
    /// d_ξ
    pub dim: usize,
    /// Laplace eigenvalue λ_[ξ]
    pub eigenvalue: f64,
    /// Elliptic weight ⟨ξ⟩ = (1 + λ)^{1/2}
    pub weight: f64,
}

/// A supported compact Lie group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupModel {
    Torus { n: usize },
    Su2,
}

/// Contiguous block of the canonical dual order: a range of first lattice
/// coordinates on the torus, or a range of ℓ on SU(2). Chunk boundaries
/// depend only on the group and the cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualChunk {
    pub start: i64,
    pub end: i64,
}

const LINE_CHUNK: i64 = 1 << 14;
const SPIN_CHUNK: i64 = 1 << 10;

#[inline]
fn lattice_weight(sq: i64) -> f64 {
    (1.0 + sq as f64).sqrt()
}

/// Largest k ≥ 0 with ⟨base + k²⟩ ≤ cutoff, or `None` when even k = 0 fails.
fn max_radius(base: i64, cutoff: f64) -> Option<i64> {
    if lattice_weight(base) > cutoff {
        return None;
    }
    let room = (cutoff * cutoff - 1.0 - base as f64).max(0.0);
    let mut k = room.sqrt().floor() as i64;
    while lattice_weight(base + (k + 1) * (k + 1)) <= cutoff {
        k += 1;
    }
    while k > 0 && lattice_weight(base + k * k) > cutoff {
        k -= 1;
    }
    Some(k)
}

impl GroupModel {
    pub fn torus(n: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::invalid(format!("Torus(n) supported for n in 1..=3, got {n}")));
        }
        Ok(GroupModel::Torus { n })
    }

    pub fn su2() -> Self {
        GroupModel::Su2
    }

    pub fn name(&self) -> String {
        match self {
            GroupModel::Torus { n } => format!("T^{n}"),
            GroupModel::Su2 => "SU(2)".to_string(),
        }
    }

    /// Manifold dimension n.
    pub fn manifold_dim(&self) -> usize {
        match *self {
            GroupModel::Torus { n } => n,
            GroupModel::Su2 => 3,
        }
    }

    /// Every class with ⟨ξ⟩ ≤ cutoff, in canonical order (lexicographic on
    /// the lattice label for tori, increasing ℓ for SU(2)).
    pub fn enumerate_dual(&self, cutoff: f64) -> Result<Vec<DualElement>> {
        check_cutoff(cutoff)?;
        let mut out = Vec::new();
        for chunk in self.dual_chunks(cutoff) {
            self.visit_chunk(&chunk, None, cutoff, |xi| out.push(*xi));
        }
        Ok(out)
    }

    /// Upper bound on Σ_{⟨ξ⟩≤t} d_ξ².
    pub fn counting_envelope(&self, t: f64) -> f64 {
        match *self {
            GroupModel::Torus { n } => {
                let ball = unit_sphere_volume(n) / n as f64;
                ball * (t + (n as f64).sqrt()).powi(n as i32)
            }
            GroupModel::Su2 => t.powi(3),
        }
    }

    pub(crate) fn dual_chunks(&self, hi: f64) -> Vec<DualChunk> {
        match *self {
            GroupModel::Torus { n } => {
                let Some(r) = max_radius(0, hi) else {
                    return Vec::new();
                };
                if n == 1 {
                    let mut chunks = Vec::new();
                    let mut a = -r;
                    while a <= r {
                        let b = (a + LINE_CHUNK - 1).min(r);
                        chunks.push(DualChunk { start: a, end: b });
                        a = b + 1;
                    }
                    chunks
                } else {
                    (-r..=r).map(|x| DualChunk { start: x, end: x }).collect()
                }
            }
            GroupModel::Su2 => {
                if hi < 1.0 {
                    return Vec::new();
                }
                let lmax = hi.floor() as i64 - 1;
                let mut chunks = Vec::new();
                let mut a = 0;
                while a <= lmax {
                    let b = (a + SPIN_CHUNK - 1).min(lmax);
                    chunks.push(DualChunk { start: a, end: b });
                    a = b + 1;
                }
                chunks
            }
        }
    }

    /// Visits the classes of `chunk` with `lo < ⟨ξ⟩ ≤ hi` in canonical order.
    pub(crate) fn visit_chunk<F: FnMut(&DualElement)>(
        &self,
        chunk: &DualChunk,
        lo: Option<f64>,
        hi: f64,
        mut f: F,
    ) {
        match *self {
            GroupModel::Su2 => {
                for l in chunk.start..=chunk.end {
                    let weight = (l + 1) as f64;
                    if weight > hi || lo.is_some_and(|lo| weight <= lo) {
                        continue;
                    }
                    f(&DualElement {
                        label: DualLabel::Spin(l as u32),
                        dim: (l + 1) as usize,
                        eigenvalue: (l * (l + 2)) as f64,
                        weight,
                    });
                }
            }
            GroupModel::Torus { n } => {
                let rank = n as u8;
                let emit = |coords: [i64; 3], sq: i64, f: &mut F| {
                    f(&DualElement {
                        label: DualLabel::Lattice { coords, rank },
                        dim: 1,
                        eigenvalue: sq as f64,
                        weight: lattice_weight(sq),
                    })
                };
                // Innermost coordinate: the shell lo < ⟨ξ⟩ ≤ hi is one or two runs.
                let line = |prefix: [i64; 3], axis: usize, base: i64, f: &mut F| {
                    let Some(khi) = max_radius(base, hi) else {
                        return;
                    };
                    let klo = lo.and_then(|lo| max_radius(base, lo));
                    let visit = |k: i64, f: &mut F| {
                        let mut c = prefix;
                        c[axis] = k;
                        emit(c, base + k * k, f);
                    };
                    match klo {
                        None => (-khi..=khi).for_each(|k| visit(k, f)),
                        Some(klo) => {
                            (-khi..=-(klo + 1)).for_each(|k| visit(k, f));
                            (klo + 1..=khi).for_each(|k| visit(k, f));
                        }
                    }
                };
                match n {
                    1 => {
                        for k in chunk.start..=chunk.end {
                            let sq = k * k;
                            let w = lattice_weight(sq);
                            if w > hi || lo.is_some_and(|lo| w <= lo) {
                                continue;
                            }
                            emit([k, 0, 0], sq, &mut f);
                        }
                    }
                    2 => {
                        for x in chunk.start..=chunk.end {
                            line([x, 0, 0], 1, x * x, &mut f);
                        }
                    }
                    _ => {
                        for x in chunk.start..=chunk.end {
                            let Some(r) = max_radius(x * x, hi) else {
                                continue;
                            };
                            for y in -r..=r {
                                line([x, y, 0], 2, x * x + y * y, &mut f);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Haar quadrature with `resolution` points per coordinate axis.
    pub fn haar_quadrature(&self, resolution: usize) -> Result<QuadratureRule> {
        if resolution == 0 {
            return Err(Error::invalid("quadrature resolution must be at least 1"));
        }
        let m = resolution;
        match *self {
            GroupModel::Torus { n } => {
                let total = m.pow(n as u32);
                let w = 1.0 / total as f64;
                let step = 2.0 * PI / m as f64;
                let nodes = (0..total)
                    .map(|mut idx| {
                        let mut angles = vec![0.0; n];
                        for a in angles.iter_mut().rev() {
                            *a = step * (idx % m) as f64;
                            idx /= m;
                        }
                        GroupPoint::Torus(angles)
                    })
                    .collect();
                Ok(QuadratureRule {
                    group: *self,
                    resolution,
                    nodes,
                    weights: vec![w; total],
                })
            }
            GroupModel::Su2 => {
                let (us, ws) = gauss_legendre(m);
                let uniform = 1.0 / (m * m) as f64;
                let mut nodes = Vec::with_capacity(m * m * m);
                let mut weights = Vec::with_capacity(m * m * m);
                for ia in 0..m {
                    let alpha = 2.0 * PI * ia as f64 / m as f64;
                    for (u, wu) in us.iter().zip(&ws) {
                        let beta = u.clamp(-1.0, 1.0).acos();
                        for ig in 0..m {
                            let gamma = 4.0 * PI * ig as f64 / m as f64;
                            nodes.push(GroupPoint::Su2 { alpha, beta, gamma });
                            weights.push(uniform * wu / 2.0);
                        }
                    }
                }
                Ok(QuadratureRule {
                    group: *self,
                    resolution,
                    nodes,
                    weights,
                })
            }
        }
    }
}

pub(crate) fn check_cutoff(cutoff: f64) -> Result<()> {
    if !(cutoff >= 1.0) || !cutoff.is_finite() {
        return Err(Error::invalid(format!("dual cutoff must be a finite value >= 1, got {cutoff}")));
    }
    Ok(())
}

/// vol(S^{n-1}) = 2π^{n/2} / Γ(n/2).
pub fn unit_sphere_volume(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 2.0) * unit_sphere_volume(n - 2),
    }
}

/// A point of the group manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupPoint {
    /// Angles in [0, 2π)ⁿ.
    Torus(Vec<f64>),
    /// Euler angles g = e^{αZ} e^{βY} e^{γZ}, α ∈ [0,2π), β ∈ [0,π], γ ∈ [0,4π).
    Su2 { alpha: f64, beta: f64, gamma: f64 },
}

impl GroupPoint {
    /// cos(θ/2) for the conjugacy angle θ ∈ [0, 2π], i.e. Tr(g)/2 in the
    /// defining representation. `None` on the torus.
    pub fn su2_half_trace(&self) -> Option<f64> {
        match *self {
            GroupPoint::Su2 { alpha, beta, gamma } => {
                Some((beta / 2.0).cos() * ((alpha + gamma) / 2.0).cos())
            }
            GroupPoint::Torus(_) => None,
        }
    }
}

/// Character of the (ℓ+1)-dimensional representation of SU(2) in terms of
/// t = cos(θ/2): the Chebyshev polynomial of the second kind U_ℓ(t).
pub fn su2_character(l: u32, half_trace: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * half_trace);
    if l == 0 {
        return prev;
    }
    for _ in 1..l {
        let next = 2.0 * half_trace * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Nodes and positive weights for the probability Haar measure.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub group: GroupModel,
    pub resolution: usize,
    pub nodes: Vec<GroupPoint>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(&GroupPoint) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .collect::<crate::summation::CompensatedSum>()
            .value()
    }
}

/// Gauss–Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
