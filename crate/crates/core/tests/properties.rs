use num_complex::Complex64;
use proptest::prelude::*;
use wodzicki::groups::GroupModel;
use wodzicki::matcalc::{hermitian_eig, imag_part, real_part, trace_abs, SignSplit};
use wodzicki::symbols::{extract_residue_component, Expansion, SymbolField};
use wodzicki::weakl1::{sum_series, TraceMode};
use wodzicki::{CMatrix, GroupPoint, MatrixSymbol};
use std::sync::Arc;

fn complex_matrix(max_n: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), n * n).prop_map(move |v| {
            let rows: Vec<Vec<Complex64>> = v
                .chunks(n)
                .map(|r| r.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
                .collect();
            CMatrix::from_rows(&rows).unwrap()
        })
    })
}

fn hermitian(max_n: usize) -> impl Strategy<Value = CMatrix> {
    complex_matrix(max_n).prop_map(|t| real_part(&t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sign_parts_recombine(h in hermitian(8)) {
        let split = SignSplit::new(&h).unwrap();
        let (p, m) = (split.pos(), split.neg());
        let scale = 1.0 + h.frobenius_norm();
        prop_assert!(p.sub(&m).max_abs_diff(&h) <= 1e-10 * scale);
        prop_assert!(p.add(&m).max_abs_diff(&split.abs()) <= 1e-10 * scale);
        prop_assert!(p.matmul(&m).frobenius_norm() <= 1e-9 * scale * scale);
        let (tp, tm) = split.traces();
        prop_assert!((tp - tm - h.trace().re).abs() <= 1e-10 * scale);
    }

    #[test]
    fn real_imag_recombine(t in complex_matrix(8)) {
        let back = real_part(&t).add(&imag_part(&t).scale(Complex64::new(0.0, 1.0)));
        prop_assert!(back.max_abs_diff(&t) <= 1e-14 * (1.0 + t.frobenius_norm()));
        prop_assert!(real_part(&t).is_hermitian() && imag_part(&t).is_hermitian());
    }

    #[test]
    fn trace_abs_is_unitarily_invariant(h in hermitian(6), g in hermitian(6)) {
        prop_assume!(h.size() == g.size());
        let u = hermitian_eig(&g).unwrap().vectors;
        let conj = u.matmul(&h).matmul(&u.adjoint());
        let a = trace_abs(&h).unwrap();
        let b = trace_abs(&conj).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }

    #[test]
    fn abs_trace_series_homogeneous(re in -3.0f64..3.0, im in -3.0f64..3.0, alpha in -4.0f64..-1.0) {
        let g = GroupModel::su2();
        let c = Complex64::new(re, im);
        let base = MatrixSymbol::diag_signed(g, alpha).unwrap();
        let scaled = base.scale(c);
        let sched = [2.0, 8.0, 32.0];
        let s1 = sum_series(&base, &sched, TraceMode::AbsTrace).unwrap().sums();
        let s2 = sum_series(&scaled, &sched, TraceMode::AbsTrace).unwrap().sums();
        for (a, b) in s1.iter().zip(&s2) {
            prop_assert!((a * c.norm() - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn abs_trace_series_subadditive(c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        let g = GroupModel::su2();
        let a = MatrixSymbol::diag_signed(g, -3.0).unwrap().scale(Complex64::new(c1, 0.0));
        let b = MatrixSymbol::weight_power(g, Complex64::new(c2, 0.5), -3.0).unwrap();
        let sum = a.add(&b).unwrap();
        let sched = [4.0, 16.0, 64.0];
        let sa = sum_series(&a, &sched, TraceMode::AbsTrace).unwrap().sums();
        let sb = sum_series(&b, &sched, TraceMode::AbsTrace).unwrap().sums();
        let ss = sum_series(&sum, &sched, TraceMode::AbsTrace).unwrap().sums();
        for i in 0..3 {
            prop_assert!(ss[i] <= sa[i] + sb[i] + 1e-10);
        }
    }

    #[test]
    fn symbol_algebra_is_pointwise(c in -3.0f64..3.0, l in 0u32..12) {
        let g = GroupModel::su2();
        let a = MatrixSymbol::diag_signed(g, -2.0).unwrap();
        let b = MatrixSymbol::weight_power(g, Complex64::new(0.0, 1.0), -1.0).unwrap();
        let xi = g.enumerate_dual(200.0).unwrap()[l as usize];
        let lhs = a.scale(Complex64::new(c, 0.0)).add(&b).unwrap().evaluate(&xi);
        let rhs = a.evaluate(&xi).scale(Complex64::new(c, 0.0)).add(&b.evaluate(&xi));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-15 * (1.0 + rhs.frobenius_norm()));
    }

    #[test]
    fn torus_quadrature_exact_on_trig_polys(
        coeffs in prop::collection::vec((-5i64..=5, -5i64..=5, -1.0f64..1.0, -1.0f64..1.0), 1..8),
        c0 in -2.0f64..2.0,
    ) {
        let q = GroupModel::torus(2).unwrap().haar_quadrature(6).unwrap();
        let f = |p: &GroupPoint| -> f64 {
            let GroupPoint::Torus(x) = p else { unreachable!() };
            c0 + coeffs
                .iter()
                .filter(|(k1, k2, _, _)| (*k1, *k2) != (0, 0))
                .map(|&(k1, k2, a, b)| {
                    let ph = k1 as f64 * x[0] + k2 as f64 * x[1];
                    a * ph.cos() + b * ph.sin()
                })
                .sum::<f64>()
        };
        prop_assert!((q.integrate(f) - c0).abs() <= 1e-12);
    }

    #[test]
    fn modulation_by_constant_is_scaling(c in -3.0f64..3.0) {
        let g = GroupModel::torus(1).unwrap();
        let q = Arc::new(g.haar_quadrature(4).unwrap());
        let sym = MatrixSymbol::weight_power(g, Complex64::new(1.0, 0.0), -1.0).unwrap();
        let field = SymbolField::modulated(|_| c, &sym, q, -1.0).unwrap();
        let xi = g.enumerate_dual(3.0).unwrap()[1];
        let want = sym.scale(Complex64::new(c, 0.0)).evaluate(&xi);
        for node in field.nodes() {
            prop_assert!(node.evaluate(&xi).max_abs_diff(&want) == 0.0);
        }
    }
}

#[test]
fn residue_extraction_is_idempotent() {
    let g = GroupModel::su2();
    let q = Arc::new(g.haar_quadrature(1).unwrap());
    let field = |deg: f64| {
        SymbolField::invariant(MatrixSymbol::weight_power(g, Complex64::new(1.0, 0.0), deg).unwrap(), q.clone())
            .unwrap()
    };
    let mut exp = Expansion::new(q.clone(), -1.0).unwrap();
    exp.push(field(-1.0)).unwrap();
    exp.push(field(-2.0)).unwrap();
    exp.push(field(-3.0)).unwrap();
    let once = extract_residue_component(&exp, 3);
    let rewrapped = Expansion::new(q.clone(), -3.0).unwrap().with(once.field.clone()).unwrap();
    let twice = extract_residue_component(&rewrapped, 3);
    let xi = g.enumerate_dual(10.0).unwrap()[4];
    assert_eq!(
        once.field.nodes()[0].evaluate(&xi).as_slice(),
        twice.field.nodes()[0].evaluate(&xi).as_slice()
    );
    assert_eq!(once.field.degree(), twice.field.degree());
}
