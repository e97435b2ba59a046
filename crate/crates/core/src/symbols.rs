//! Global matrix-valued symbols σ(ξ) ∈ ℂ^{d_ξ×d_ξ}, x-dependent symbol
//! fields and asymptotic expansions.
//!
//! Symbols are evaluators, not tables: the dual is unbounded. A structure
//! tag lets the reductions skip the eigensolver when σ(ξ) is scalar or
//! diagonal.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flags::Flag;
use crate::groups::{DualElement, GroupModel, GroupPoint, QuadratureRule};
use crate::matcalc::{self, CMatrix, SignSplit};

pub type ScalarFn = Arc<dyn Fn(&DualElement) -> Complex64 + Send + Sync>;
/// Fills the d_ξ diagonal entries.
pub type DiagonalFn = Arc<dyn Fn(&DualElement, &mut [Complex64]) + Send + Sync>;
/// Fills a zeroed d_ξ × d_ξ matrix.
pub type DenseFn = Arc<dyn Fn(&DualElement, &mut CMatrix) + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    /// c(ξ)·I
    Scalar,
    Diagonal,
    Dense,
}

/// Declared decay ‖σ(ξ)‖_op ≤ constant · ⟨ξ⟩^order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub constant: f64,
    pub order: f64,
}

impl Envelope {
    pub fn new(constant: f64, order: f64) -> Result<Self> {
        if !(constant >= 0.0) || !constant.is_finite() || !order.is_finite() {
            return Err(Error::invalid(format!("bad decay envelope ({constant}, {order})")));
        }
        Ok(Envelope { constant, order })
    }

    pub fn bound(&self, xi: &DualElement) -> f64 {
        self.constant * xi.weight.powf(self.order)
    }
}

#[derive(Clone)]
enum Evaluator {
    Zero,
    Scalar(ScalarFn),
    Diagonal(DiagonalFn),
    Dense(DenseFn),
}

/// An x-independent matrix-valued symbol on the unitary dual of a group.
#[derive(Clone)]
pub struct MatrixSymbol {
    group: GroupModel,
    eval: Evaluator,
    envelope: Envelope,
}

impl fmt::Debug for MatrixSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixSymbol")
            .field("group", &self.group)
            .field("structure", &self.structure())
            .field("envelope", &self.envelope)
            .finish()
    }
}

/// d_ξ-weighted traces of the four sign parts and of Re/Im themselves.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PartTraces {
    pub re_pos: f64,
    pub re_neg: f64,
    pub im_pos: f64,
    pub im_neg: f64,
    pub re: f64,
    pub im: f64,
}

impl PartTraces {
    pub fn as_array(&self) -> [f64; 6] {
        [self.re_pos, self.re_neg, self.im_pos, self.im_neg, self.re, self.im]
    }
}

fn split_real(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    // Zero threshold relative to the Frobenius norm of the diagonal.
    let norm = values.clone().map(|v| v * v).sum::<f64>().sqrt();
    let thr = matcalc::SPECTRAL_ZERO * norm;
    let mut pos = 0.0;
    let mut neg = 0.0;
    for v in values {
        if v > thr {
            pos += v;
        } else if v < -thr {
            neg -= v;
        }
    }
    (pos, neg)
}

// Envelope spot check: first classes in canonical order of a small ball,
// capped by count and by total matrix size.
const SPOT_CHECK_CLASSES: usize = 1000;
const SPOT_CHECK_ENTRIES: usize = 1 << 18;
const SPOT_CHECK_SLACK: f64 = 1e-9;

fn spot_check_cutoff(group: &GroupModel) -> f64 {
    match *group {
        GroupModel::Torus { n: 1 } => 500.0,
        GroupModel::Torus { n: 2 } => 18.0,
        GroupModel::Torus { .. } => 7.0,
        GroupModel::Su2 => SPOT_CHECK_CLASSES as f64,
    }
}

/// Lower bound on ‖m‖_op by power iteration on m*m.
fn op_norm_lower_bound(m: &CMatrix) -> f64 {
    let n = m.size();
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.01 * i as f64, 0.0)).collect();
    let mut estimate = 0.0;
    for _ in 0..40 {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return estimate;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        let mv: Vec<Complex64> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] * v[j]).sum()).collect();
        estimate = mv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = (0..n).map(|j| (0..n).map(|i| m[(i, j)].conj() * mv[i]).sum()).collect();
    }
    estimate
}

impl MatrixSymbol {
    fn checked(group: GroupModel, eval: Evaluator, envelope: Envelope) -> Result<Self> {
        let sym = MatrixSymbol { group, eval, envelope };
        sym.spot_check()?;
        Ok(sym)
    }

    fn spot_check(&self) -> Result<()> {
        if matches!(self.eval, Evaluator::Zero) {
            return Ok(());
        }
        let mut entries = 0usize;
        for xi in self.group.enumerate_dual(spot_check_cutoff(&self.group))?.iter().take(SPOT_CHECK_CLASSES) {
            entries += xi.dim * xi.dim;
            if entries > SPOT_CHECK_ENTRIES {
                break;
            }
            let norm = match &self.eval {
                Evaluator::Zero => 0.0,
                Evaluator::Scalar(f) => f(xi).norm(),
                Evaluator::Diagonal(f) => {
                    let mut d = vec![Complex64::new(0.0, 0.0); xi.dim];
                    f(xi, &mut d);
                    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
                }
                Evaluator::Dense(_) => op_norm_lower_bound(&self.evaluate(xi)),
            };
            if !norm.is_finite() {
                return Err(Error::invalid(format!("symbol is not finite at {}", xi.label)));
            }
            let bound = self.envelope.bound(xi);
            if norm > bound * (1.0 + SPOT_CHECK_SLACK) + f64::MIN_POSITIVE {
                return Err(Error::invalid(format!(
                    "symbol violates its envelope at {}: ‖σ‖ = {norm:.6e} > {bound:.6e}",
                    xi.label
                )));
            }
        }
        Ok(())
    }

    pub fn zero(group: GroupModel, order: f64) -> Self {
        MatrixSymbol {
            group,
            eval: Evaluator::Zero,
            envelope: Envelope { constant: 0.0, order },
        }
    }

    /// σ(ξ) = coeff · ⟨ξ⟩^alpha · I
    pub fn weight_power(group: GroupModel, coeff: Complex64, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !coeff.re.is_finite() || !coeff.im.is_finite() {
            return Err(Error::invalid("weight power parameters must be finite"));
        }
        let f: ScalarFn = Arc::new(move |xi: &DualElement| coeff * xi.weight.powf(alpha));
        Ok(MatrixSymbol {
            group,
            eval: Evaluator::Scalar(f),
            envelope: Envelope { constant: coeff.norm(), order: alpha },
        })
    }

    /// ±⟨ξ⟩^alpha test symbol. On SU(2) the diagonal alternates in sign,
    /// (−1)^j ⟨ξ⟩^alpha for j = 0..d_ξ. On a torus d_ξ = 1 and the sign is
    /// that of the first lattice coordinate (+ at 0).
    pub fn diag_signed(group: GroupModel, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha must be finite"));
        }
        let envelope = Envelope::new(1.0, alpha)?;
        match group {
            GroupModel::Su2 => {
                let f: DiagonalFn = Arc::new(move |xi: &DualElement, out: &mut [Complex64]| {
                    let w = xi.weight.powf(alpha);
                    for (j, z) in out.iter_mut().enumerate() {
                        *z = Complex64::new(if j % 2 == 0 { w } else { -w }, 0.0);
                    }
                });
                Self::diagonal(group, f, envelope)
            }
            GroupModel::Torus { .. } => {
                let f: ScalarFn = Arc::new(move |xi: &DualElement| {
                    let first = xi.label.lattice().map_or(0, |c| c[0]);
                    let w = xi.weight.powf(alpha);
                    Complex64::new(if first >= 0 { w } else { -w }, 0.0)
                });
                Self::scalar(group, f, envelope)
            }
        }
    }

    pub fn scalar(group: GroupModel, f: ScalarFn, envelope: Envelope) -> Result<Self> {
        Self::checked(group, Evaluator::Scalar(f), envelope)
    }

    pub fn diagonal(group: GroupModel, f: DiagonalFn, envelope: Envelope) -> Result<Self> {
        Self::checked(group, Evaluator::Diagonal(f), envelope)
    }

    pub fn dense(group: GroupModel, f: DenseFn, envelope: Envelope) -> Result<Self> {
        Self::checked(group, Evaluator::Dense(f), envelope)
    }

    pub fn group(&self) -> GroupModel {
        self.group
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    pub fn structure(&self) -> Structure {
        match self.eval {
            Evaluator::Zero | Evaluator::Scalar(_) => Structure::Scalar,
            Evaluator::Diagonal(_) => Structure::Diagonal,
            Evaluator::Dense(_) => Structure::Dense,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.eval, Evaluator::Zero)
    }

    /// True when both handles share one evaluator (cheap identity test used
    /// to avoid recomputing identical quadrature nodes).
    pub fn same_evaluator(&self, other: &MatrixSymbol) -> bool {
        if self.group != other.group || self.envelope != other.envelope {
            return false;
        }
        match (&self.eval, &other.eval) {
            (Evaluator::Zero, Evaluator::Zero) => true,
            (Evaluator::Scalar(a), Evaluator::Scalar(b)) => Arc::ptr_eq(a, b),
            (Evaluator::Diagonal(a), Evaluator::Diagonal(b)) => Arc::ptr_eq(a, b),
            (Evaluator::Dense(a), Evaluator::Dense(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    pub fn evaluate(&self, xi: &DualElement) -> CMatrix {
        let d = xi.dim;
        match &self.eval {
            Evaluator::Zero => CMatrix::zeros(d),
            Evaluator::Scalar(f) => CMatrix::identity(d).scale(f(xi)),
            Evaluator::Diagonal(f) => {
                let mut diag = vec![Complex64::new(0.0, 0.0); d];
                f(xi, &mut diag);
                CMatrix::from_diag(&diag)
            }
            Evaluator::Dense(f) => {
                let mut m = CMatrix::zeros(d);
                f(xi, &mut m);
                m
            }
        }
    }

    fn diagonal_values(&self, xi: &DualElement) -> Vec<Complex64> {
        let mut diag = vec![Complex64::new(0.0, 0.0); xi.dim];
        match &self.eval {
            Evaluator::Zero => {}
            Evaluator::Scalar(f) => diag.fill(f(xi)),
            Evaluator::Diagonal(f) => f(xi, &mut diag),
            Evaluator::Dense(_) => unreachable!("dense symbol has no diagonal fast path"),
        }
        diag
    }

    /// d_ξ · Tr|σ(ξ)|
    pub fn abs_trace(&self, xi: &DualElement) -> Result<f64> {
        let d = xi.dim as f64;
        Ok(match &self.eval {
            Evaluator::Zero => 0.0,
            Evaluator::Scalar(f) => d * d * f(xi).norm(),
            Evaluator::Diagonal(_) => d * self.diagonal_values(xi).iter().map(|z| z.norm()).sum::<f64>(),
            Evaluator::Dense(_) => d * matcalc::trace_abs(&self.evaluate(xi))?,
        })
    }

    /// d_ξ · Tr σ(ξ)
    pub fn trace(&self, xi: &DualElement) -> Complex64 {
        let d = xi.dim as f64;
        match &self.eval {
            Evaluator::Zero => Complex64::new(0.0, 0.0),
            Evaluator::Scalar(f) => f(xi) * (d * d),
            Evaluator::Diagonal(_) => self.diagonal_values(xi).iter().sum::<Complex64>() * d,
            Evaluator::Dense(_) => self.evaluate(xi).trace() * d,
        }
    }

    /// d_ξ-weighted traces of Re(σ)^±, Im(σ)^±, Re σ and Im σ. One
    /// eigendecomposition of Re σ and one of Im σ serve all six values.
    pub fn part_traces(&self, xi: &DualElement) -> Result<PartTraces> {
        let d = xi.dim as f64;
        let t = match &self.eval {
            Evaluator::Zero => PartTraces::default(),
            Evaluator::Scalar(f) => {
                let c = f(xi);
                let (re_pos, re_neg) = split_real(std::iter::once(c.re));
                let (im_pos, im_neg) = split_real(std::iter::once(c.im));
                PartTraces {
                    re_pos: d * re_pos,
                    re_neg: d * re_neg,
                    im_pos: d * im_pos,
                    im_neg: d * im_neg,
                    re: d * c.re,
                    im: d * c.im,
                }
            }
            Evaluator::Diagonal(_) => {
                let diag = self.diagonal_values(xi);
                let (re_pos, re_neg) = split_real(diag.iter().map(|z| z.re));
                let (im_pos, im_neg) = split_real(diag.iter().map(|z| z.im));
                let tr: Complex64 = diag.iter().sum();
                PartTraces { re_pos, re_neg, im_pos, im_neg, re: tr.re, im: tr.im }
            }
            Evaluator::Dense(_) => {
                let m = self.evaluate(xi);
                let (re_pos, re_neg) = SignSplit::new(&matcalc::real_part(&m))?.traces();
                let (im_pos, im_neg) = SignSplit::new(&matcalc::imag_part(&m))?.traces();
                let tr = m.trace();
                PartTraces { re_pos, re_neg, im_pos, im_neg, re: tr.re, im: tr.im }
            }
        };
        // d_ξ weighting; the scalar arm already holds Tr(c·I) = d·c.
        Ok(PartTraces {
            re_pos: d * t.re_pos,
            re_neg: d * t.re_neg,
            im_pos: d * t.im_pos,
            im_neg: d * t.im_neg,
            re: d * t.re,
            im: d * t.im,
        })
    }

    fn promote_diagonal(&self) -> DiagonalFn {
        match &self.eval {
            Evaluator::Zero => Arc::new(|_: &DualElement, out: &mut [Complex64]| out.fill(Complex64::new(0.0, 0.0))),
            Evaluator::Scalar(f) => {
                let f = f.clone();
                Arc::new(move |xi: &DualElement, out: &mut [Complex64]| out.fill(f(xi)))
            }
            Evaluator::Diagonal(f) => f.clone(),
            Evaluator::Dense(_) => unreachable!(),
        }
    }

    fn promote_dense(&self) -> DenseFn {
        match &self.eval {
            Evaluator::Dense(f) => f.clone(),
            _ => {
                let f = self.promote_diagonal();
                Arc::new(move |xi: &DualElement, out: &mut CMatrix| {
                    let mut diag = vec![Complex64::new(0.0, 0.0); xi.dim];
                    f(xi, &mut diag);
                    for (i, z) in diag.into_iter().enumerate() {
                        out[(i, i)] = z;
                    }
                })
            }
        }
    }

    /// Pointwise a + b. Envelopes combine as (c_a + c_b, max(α_a, α_b)).
    pub fn add(&self, other: &MatrixSymbol) -> Result<MatrixSymbol> {
        if self.group != other.group {
            return Err(Error::invalid(format!(
                "cannot add symbols on {} and {}",
                self.group.name(),
                other.group.name()
            )));
        }
        let envelope = Envelope {
            constant: self.envelope.constant + other.envelope.constant,
            order: self.envelope.order.max(other.envelope.order),
        };
        let eval = match (&self.eval, &other.eval) {
            (Evaluator::Zero, e) | (e, Evaluator::Zero) => e.clone(),
            (Evaluator::Scalar(a), Evaluator::Scalar(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Evaluator::Scalar(Arc::new(move |xi: &DualElement| a(xi) + b(xi)))
            }
            _ if self.structure() != Structure::Dense && other.structure() != Structure::Dense => {
                let (a, b) = (self.promote_diagonal(), other.promote_diagonal());
                Evaluator::Diagonal(Arc::new(move |xi: &DualElement, out: &mut [Complex64]| {
                    a(xi, out);
                    let mut tmp = vec![Complex64::new(0.0, 0.0); out.len()];
                    b(xi, &mut tmp);
                    out.iter_mut().zip(tmp).for_each(|(o, t)| *o += t);
                }))
            }
            _ => {
                let (a, b) = (self.promote_dense(), other.promote_dense());
                Evaluator::Dense(Arc::new(move |xi: &DualElement, out: &mut CMatrix| {
                    a(xi, out);
                    let mut tmp = CMatrix::zeros(xi.dim);
                    b(xi, &mut tmp);
                    *out = out.add(&tmp);
                }))
            }
        };
        Ok(MatrixSymbol { group: self.group, eval, envelope })
    }

    /// Pointwise c · a.
    pub fn scale(&self, c: Complex64) -> MatrixSymbol {
        let envelope = Envelope {
            constant: c.norm() * self.envelope.constant,
            order: self.envelope.order,
        };
        let eval = match &self.eval {
            Evaluator::Zero => Evaluator::Zero,
            Evaluator::Scalar(f) => {
                let f = f.clone();
                Evaluator::Scalar(Arc::new(move |xi: &DualElement| c * f(xi)))
            }
            Evaluator::Diagonal(f) => {
                let f = f.clone();
                Evaluator::Diagonal(Arc::new(move |xi: &DualElement, out: &mut [Complex64]| {
                    f(xi, out);
                    out.iter_mut().for_each(|z| *z *= c);
                }))
            }
            Evaluator::Dense(f) => {
                let f = f.clone();
                Evaluator::Dense(Arc::new(move |xi: &DualElement, out: &mut CMatrix| {
                    f(xi, out);
                    *out = out.scale(c);
                }))
            }
        };
        MatrixSymbol { group: self.group, eval, envelope }
    }
}

const DEGREE_TOL: f64 = 1e-9;

/// x-dependent symbol component: one frozen symbol per quadrature node.
#[derive(Clone, Debug)]
pub struct SymbolField {
    quadrature: Arc<QuadratureRule>,
    nodes: Vec<MatrixSymbol>,
    degree: f64,
    invariant: bool,
}

impl SymbolField {
    pub fn from_nodes(quadrature: Arc<QuadratureRule>, nodes: Vec<MatrixSymbol>, degree: f64) -> Result<Self> {
        if nodes.len() != quadrature.len() {
            return Err(Error::invalid(format!(
                "field has {} node symbols for {} quadrature nodes",
                nodes.len(),
                quadrature.len()
            )));
        }
        for s in &nodes {
            if s.group() != quadrature.group {
                return Err(Error::invalid("node symbol group differs from quadrature group"));
            }
            if (s.envelope().order - degree).abs() > DEGREE_TOL {
                return Err(Error::invalid(format!(
                    "node symbol order {} differs from field degree {degree}",
                    s.envelope().order
                )));
            }
        }
        let invariant = nodes.windows(2).all(|w| w[0].same_evaluator(&w[1]));
        Ok(SymbolField { quadrature, nodes, degree, invariant })
    }

    /// The same symbol at every node.
    pub fn invariant(sym: MatrixSymbol, quadrature: Arc<QuadratureRule>) -> Result<Self> {
        let degree = sym.envelope().order;
        let nodes = vec![sym; quadrature.len()];
        Self::from_nodes(quadrature, nodes, degree)
    }

    pub fn zero(quadrature: Arc<QuadratureRule>, degree: f64) -> Self {
        let nodes = vec![MatrixSymbol::zero(quadrature.group, degree); quadrature.len()];
        SymbolField { quadrature, nodes, degree, invariant: true }
    }

    /// σ(x, ξ) = a(x) · sym(ξ). Nodes sharing a value of a share one symbol.
    pub fn modulated<A>(a: A, sym: &MatrixSymbol, quadrature: Arc<QuadratureRule>, degree: f64) -> Result<Self>
    where
        A: Fn(&GroupPoint) -> f64,
    {
        let mut cache: HashMap<u64, MatrixSymbol> = HashMap::new();
        let mut nodes = Vec::with_capacity(quadrature.len());
        for x in &quadrature.nodes {
            let v = a(x);
            if !v.is_finite() {
                return Err(Error::invalid("modulation is not finite at a quadrature node"));
            }
            let s = cache
                .entry(v.to_bits())
                .or_insert_with(|| sym.scale(Complex64::new(v, 0.0)))
                .clone();
            nodes.push(s);
        }
        Self::from_nodes(quadrature, nodes, degree)
    }

    pub fn group(&self) -> GroupModel {
        self.quadrature.group
    }

    pub fn quadrature(&self) -> &Arc<QuadratureRule> {
        &self.quadrature
    }

    pub fn nodes(&self) -> &[MatrixSymbol] {
        &self.nodes
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    fn check_compatible(&self, other: &SymbolField) -> Result<()> {
        if *self.quadrature != *other.quadrature {
            return Err(Error::invalid("fields live on different quadrature rules"));
        }
        if (self.degree - other.degree).abs() > DEGREE_TOL {
            return Err(Error::invalid("fields have different degrees"));
        }
        Ok(())
    }

    /// Node-wise a + b.
    pub fn add(&self, other: &SymbolField) -> Result<SymbolField> {
        self.check_compatible(other)?;
        let nodes = if self.invariant && other.invariant {
            vec![self.nodes[0].add(&other.nodes[0])?; self.nodes.len()]
        } else {
            self.nodes
                .iter()
                .zip(&other.nodes)
                .map(|(a, b)| a.add(b))
                .collect::<Result<Vec<_>>>()?
        };
        Self::from_nodes(self.quadrature.clone(), nodes, self.degree)
    }

    /// Node-wise c · a.
    pub fn scale(&self, c: Complex64) -> SymbolField {
        let nodes = if self.invariant {
            vec![self.nodes[0].scale(c); self.nodes.len()]
        } else {
            self.nodes.iter().map(|s| s.scale(c)).collect()
        };
        SymbolField {
            quadrature: self.quadrature.clone(),
            nodes,
            degree: self.degree,
            invariant: self.invariant,
        }
    }
}

/// σ ∼ Σ_k σ_{m−k}: components in strictly decreasing degree m, m−1, …
#[derive(Clone, Debug)]
pub struct Expansion {
    quadrature: Arc<QuadratureRule>,
    order: f64,
    components: Vec<SymbolField>,
}

impl Expansion {
    pub fn new(quadrature: Arc<QuadratureRule>, order: f64) -> Result<Self> {
        if !order.is_finite() {
            return Err(Error::invalid("expansion order must be finite"));
        }
        Ok(Expansion { quadrature, order, components: Vec::new() })
    }

    /// Appends the next component; its degree must be order − k.
    pub fn push(&mut self, field: SymbolField) -> Result<()> {
        let expected = self.order - self.components.len() as f64;
        if (field.degree() - expected).abs() > DEGREE_TOL {
            return Err(Error::invalid(format!(
                "expected a component of degree {expected}, got {}",
                field.degree()
            )));
        }
        if *field.quadrature() != self.quadrature {
            return Err(Error::invalid("component quadrature differs from expansion quadrature"));
        }
        self.components.push(field);
        Ok(())
    }

    pub fn with(mut self, field: SymbolField) -> Result<Self> {
        self.push(field)?;
        Ok(self)
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn quadrature(&self) -> &Arc<QuadratureRule> {
        &self.quadrature
    }

    pub fn components(&self) -> &[SymbolField] {
        &self.components
    }
}

/// Result of selecting the degree −n component.
#[derive(Clone, Debug)]
pub struct ResidueComponent {
    pub field: SymbolField,
    /// k₀ when a component was selected.
    pub index: Option<usize>,
    pub flags: Vec<Flag>,
}

/// Picks σ_{−n}: zero when m < −n; otherwise component k₀ = ⌊n + m⌋, which
/// is the degree −n one exactly when m − k₀ = −n. A missing slot yields the
/// zero field with [`Flag::ComponentMissing`].
pub fn extract_residue_component(exp: &Expansion, n: usize) -> ResidueComponent {
    let target = -(n as f64);
    let zero = || SymbolField::zero(exp.quadrature.clone(), target);
    if exp.order < target - DEGREE_TOL {
        return ResidueComponent { field: zero(), index: None, flags: Vec::new() };
    }
    let k0 = (n as f64 + exp.order + DEGREE_TOL).floor() as usize;
    let exact = (exp.order - k0 as f64 - target).abs() <= DEGREE_TOL;
    match exp.components.get(k0) {
        Some(field) if exact => ResidueComponent { field: field.clone(), index: Some(k0), flags: Vec::new() },
        _ => ResidueComponent {
            field: zero(),
            index: None,
            flags: vec![Flag::ComponentMissing],
        },
    }
}
