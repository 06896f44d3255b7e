use nalgebra::DMatrix;

use super::form::Form;
use super::linmap::{LinMap, Metric};
use super::multi_index::MultiIndex;
use super::ExteriorError;

/// Wedge product `a ∧ b`.
pub fn wedge(a: &Form, b: &Form) -> Result<Form, ExteriorError> {
    if a.dim() != b.dim() {
        return Err(ExteriorError::DimensionMismatch(a.dim(), b.dim()));
    }
    let degree = a.degree() + b.degree();
    if degree > a.dim() {
        return Err(ExteriorError::DegreeOverflow(a.degree(), b.degree(), a.dim()));
    }
    let mut out = Form::zero(a.dim(), degree)?;
    for (mi_a, ca) in a.terms() {
        if ca == 0.0 {
            continue;
        }
        for (mi_b, cb) in b.terms() {
            if cb == 0.0 {
                continue;
            }
            if let Some((merged, sign)) = mi_a.merge(&mi_b) {
                out.coeffs_mut()[merged.rank()] += sign * ca * cb;
            }
        }
    }
    Ok(out)
}

/// Interior product `x ⌟ a` of a vector (components in the standard basis)
/// with a form; an antiderivation lowering the degree by one.
pub fn contract(x: &[f64], a: &Form) -> Result<Form, ExteriorError> {
    if x.len() != a.dim() {
        return Err(ExteriorError::VectorLength {
            expected: a.dim(),
            got: x.len(),
        });
    }
    if a.degree() == 0 {
        return Err(ExteriorError::DegreeOutOfRange {
            dim: a.dim(),
            degree: 0,
        });
    }
    let mut out = Form::zero(a.dim(), a.degree() - 1)?;
    for (mi, c) in a.terms() {
        if c == 0.0 {
            continue;
        }
        let idx = mi.indices();
        for (pos, &i) in idx.iter().enumerate() {
            let xi = x[(i - 1) as usize];
            if xi == 0.0 {
                continue;
            }
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            let rest: Vec<u8> = idx
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != pos)
                .map(|(_, &v)| v)
                .collect();
            let sub = MultiIndex::new(a.dim(), &rest)?;
            out.coeffs_mut()[sub.rank()] += sign * xi * c;
        }
    }
    Ok(out)
}

/// Pullback `(B*ρ)(v₁,…,v_k) = ρ(Bv₁,…,Bv_k)`, in coefficients
/// `(B*ρ)_J = Σ_I ρ_I det(B[I,J])` over row set `I`, column set `J`.
pub(crate) fn pullback(b: &LinMap, rho: &Form) -> Result<Form, ExteriorError> {
    if b.dim() != rho.dim() {
        return Err(ExteriorError::DimensionMismatch(b.dim(), rho.dim()));
    }
    let k = rho.degree();
    let mut out = Form::zero(rho.dim(), k)?;
    let mat = b.matrix();
    for r in 0..super::multi_index::binomial(rho.dim(), k) {
        let mi_j = MultiIndex::from_rank(rho.dim(), k, r)?;
        let mut acc = 0.0;
        for (mi_i, c) in rho.terms() {
            if c == 0.0 {
                continue;
            }
            acc += c * minor(mat, mi_i.indices(), mi_j.indices());
        }
        out.coeffs_mut()[r] = acc;
    }
    Ok(out)
}

/// Linear action `A.ρ := ρ(A⁻¹·, …, A⁻¹·)`; in particular
/// `(t·Id).ρ = t^{-k} ρ` on degree `k`.
pub fn act(a: &LinMap, rho: &Form) -> Result<Form, ExteriorError> {
    let inv = a.inverse()?;
    pullback(&inv, rho)
}

/// Determinant of the submatrix with rows `rows`, columns `cols` (1-based).
fn minor(mat: &DMatrix<f64>, rows: &[u8], cols: &[u8]) -> f64 {
    let k = rows.len();
    match k {
        0 => 1.0,
        1 => mat[(rows[0] as usize - 1, cols[0] as usize - 1)],
        2 => {
            let m = |r: usize, c: usize| mat[(rows[r] as usize - 1, cols[c] as usize - 1)];
            m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)
        }
        _ => {
            let sub = DMatrix::from_fn(k, k, |r, c| {
                mat[(rows[r] as usize - 1, cols[c] as usize - 1)]
            });
            sub.determinant()
        }
    }
}

/// Coefficient of the top basis form `e^{1…n}`; the input must have top degree.
pub fn top_scalar(a: &Form) -> Result<f64, ExteriorError> {
    if a.degree() != a.dim() {
        return Err(ExteriorError::NotTopDegree {
            dim: a.dim(),
            degree: a.degree(),
        });
    }
    Ok(a.coeffs()[0])
}

/// Inner product of two forms of equal degree induced by `g`,
/// `⟨e^I, e^J⟩ = det(g⁻¹[I,J])`.
pub fn metric_pairing(a: &Form, b: &Form, g: &Metric) -> Result<f64, ExteriorError> {
    if a.dim() != b.dim() || a.dim() != g.dim() {
        return Err(ExteriorError::DimensionMismatch(a.dim(), b.dim().max(g.dim())));
    }
    if a.degree() != b.degree() {
        return Err(ExteriorError::DegreeMismatch(a.degree(), b.degree()));
    }
    let chol = g
        .matrix()
        .clone()
        .cholesky()
        .ok_or(ExteriorError::NotPositiveDefinite)?;
    let ginv = chol.inverse();
    let mut acc = 0.0;
    for (mi_a, ca) in a.terms() {
        if ca == 0.0 {
            continue;
        }
        for (mi_b, cb) in b.terms() {
            if cb == 0.0 {
                continue;
            }
            acc += ca * cb * minor(&ginv, mi_a.indices(), mi_b.indices());
        }
    }
    Ok(acc)
}

/// Hodge star for the metric `g` and the standard orientation `e^{1…n}`,
/// defined by `b ∧ ∗a = ⟨b, a⟩_g vol_g` with `vol_g = √(det g) e^{1…n}`.
pub fn hodge_star(a: &Form, g: &Metric) -> Result<Form, ExteriorError> {
    hodge_star_signed(a, g, 1.0)
}

/// Hodge star with the orientation chosen by the sign of the top coefficient
/// of `orientation` (any top-degree form with nonzero top coefficient).
pub fn hodge_star_oriented(
    a: &Form,
    g: &Metric,
    orientation: &Form,
) -> Result<Form, ExteriorError> {
    let top = top_scalar(orientation)?;
    if top == 0.0 {
        return Err(ExteriorError::BadOrientation);
    }
    hodge_star_signed(a, g, top.signum())
}

fn hodge_star_signed(a: &Form, g: &Metric, s_or: f64) -> Result<Form, ExteriorError> {
    if a.dim() != g.dim() {
        return Err(ExteriorError::DimensionMismatch(a.dim(), g.dim()));
    }
    let chol = g
        .matrix()
        .clone()
        .cholesky()
        .ok_or(ExteriorError::NotPositiveDefinite)?;
    let sqrt_det: f64 = chol.l().diagonal().iter().product();
    let ginv = chol.inverse();

    let n = a.dim();
    let k = a.degree();
    let mut out = Form::zero(n, n - k)?;
    for r in 0..super::multi_index::binomial(n, k) {
        let mi = MultiIndex::from_rank(n, k, r)?;
        // ⟨e^I, a⟩_g
        let mut pairing = 0.0;
        for (mi_j, c) in a.terms() {
            if c == 0.0 {
                continue;
            }
            pairing += c * minor(&ginv, mi.indices(), mi_j.indices());
        }
        if pairing == 0.0 {
            continue;
        }
        let comp = mi.complement();
        let s_i = mi.complement_sign();
        out.coeffs_mut()[comp.rank()] += s_i * s_or * sqrt_det * pairing;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn omega0() -> Form {
        Form::from_terms(6, 2, &[(&[1, 4], 1.0), (&[2, 5], 1.0), (&[3, 6], 1.0)]).unwrap()
    }

    fn phi0() -> Form {
        Form::from_terms(
            6,
            3,
            &[
                (&[1, 2, 3], 1.0),
                (&[1, 5, 6], -1.0),
                (&[2, 4, 6], 1.0),
                (&[3, 4, 5], -1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn omega0_squared_and_cubed() {
        let w = omega0();
        let w2 = wedge(&w, &w).unwrap();
        let expect = Form::from_terms(
            6,
            4,
            &[
                (&[1, 4, 2, 5], 2.0),
                (&[1, 4, 3, 6], 2.0),
                (&[2, 5, 3, 6], 2.0),
            ],
        )
        .unwrap();
        assert_eq!(w2, expect);
        assert_eq!(w2.component(&[1, 2, 4, 5]).unwrap(), -2.0);

        let w3 = wedge(&w2, &w).unwrap();
        assert_eq!(top_scalar(&w3).unwrap(), -6.0);
    }

    #[test]
    fn wedge_anticommutes_by_degree() {
        let a = Form::basis(6, &[1, 2]).unwrap();
        let b = Form::basis(6, &[3, 4, 5]).unwrap();
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        assert_eq!(ab, ba); // (-1)^{2*3} = +1
        let c = Form::basis(6, &[6]).unwrap();
        let bc = wedge(&b, &c).unwrap();
        let cb = wedge(&c, &b).unwrap();
        assert_eq!(bc, -&cb); // (-1)^{3*1} = -1
    }

    #[test]
    fn wedge_shape_errors() {
        let a = Form::zero(6, 2).unwrap();
        let b = Form::zero(7, 2).unwrap();
        assert!(matches!(
            wedge(&a, &b),
            Err(ExteriorError::DimensionMismatch(6, 7))
        ));
        let c = Form::zero(6, 5).unwrap();
        assert!(matches!(
            wedge(&a, &c),
            Err(ExteriorError::DegreeOverflow(2, 5, 6))
        ));
    }

    #[test]
    fn contract_is_an_antiderivation() {
        let phi = phi0();
        let e1 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let got = contract(&e1, &phi).unwrap();
        let expect = Form::from_terms(6, 2, &[(&[2, 3], 1.0), (&[5, 6], -1.0)]).unwrap();
        assert_eq!(got, expect);

        // x ⌟ (a ∧ b) = (x ⌟ a) ∧ b + (-1)^{deg a} a ∧ (x ⌟ b)
        let a = omega0();
        let b = phi0();
        let x = [0.3, -1.0, 0.7, 2.0, 0.0, -0.5];
        let lhs = contract(&x, &wedge(&a, &b).unwrap()).unwrap();
        let rhs = &wedge(&contract(&x, &a).unwrap(), &b).unwrap()
            + &wedge(&a, &contract(&x, &b).unwrap()).unwrap();
        assert!((&lhs - &rhs).norm() < 1e-12);
    }

    #[test]
    fn act_by_scaling_is_homogeneous() {
        let phi = phi0();
        let t = 1.7;
        let a = LinMap::scaling(6, t).unwrap();
        let got = act(&a, &phi).unwrap();
        let expect = phi.scaled(t.powi(-3));
        assert!((&got - &expect).norm() < 1e-12);
    }

    #[test]
    fn act_composes_and_respects_inverse() {
        let phi = phi0();
        let a = LinMap::from_rows(
            6,
            &[
                1.0, 0.5, 0.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 2.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 0.0, 1.0, 0.0, 0.0, //
                0.0, -1.0, 0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        let b = LinMap::diagonal(&[1.0, 2.0, 1.0, 0.5, 1.0, 1.0]).unwrap();
        let lhs = act(&a.compose(&b).unwrap(), &phi).unwrap();
        let rhs = act(&a, &act(&b, &phi).unwrap()).unwrap();
        assert!((&lhs - &rhs).norm() < 1e-10);

        let back = act(&a.inverse().unwrap(), &act(&a, &phi).unwrap()).unwrap();
        assert!((&back - &phi).norm() < 1e-10);
    }

    #[test]
    fn top_scalar_signs() {
        let t = Form::basis(6, &[1, 4, 2, 5, 3, 6]).unwrap();
        assert_eq!(top_scalar(&t).unwrap(), -1.0);
        assert!(top_scalar(&omega0()).is_err());
    }

    #[test]
    fn hodge_star_euclidean() {
        let g = Metric::euclidean(6).unwrap();
        let a = Form::basis(6, &[1, 2, 3]).unwrap();
        assert_eq!(hodge_star(&a, &g).unwrap(), Form::basis(6, &[4, 5, 6]).unwrap());

        // ∗∗ = (-1)^{k(n-k)}
        let w = omega0();
        let ssw = hodge_star(&hodge_star(&w, &g).unwrap(), &g).unwrap();
        assert!((&ssw - &w).norm() < 1e-12);
        let phi = phi0();
        let ssphi = hodge_star(&hodge_star(&phi, &g).unwrap(), &g).unwrap();
        assert!((&ssphi + &phi).norm() < 1e-12);
    }

    #[test]
    fn hodge_star_weighted_metric() {
        let mut m = nalgebra::DMatrix::<f64>::identity(6, 6);
        m[(0, 0)] = 4.0;
        let g = Metric::from_matrix(m).unwrap();
        let a = Form::basis(6, &[1]).unwrap();
        let got = hodge_star(&a, &g).unwrap();
        let expect = Form::basis(6, &[2, 3, 4, 5, 6]).unwrap().scaled(0.5);
        assert!((&got - &expect).norm() < 1e-12);

        // defining identity b ∧ ∗a = ⟨b, a⟩ vol_g with b = a
        let pair = metric_pairing(&a, &a, &g).unwrap();
        assert_relative_eq!(pair, 0.25);
        let lhs = top_scalar(&wedge(&a, &got).unwrap()).unwrap();
        assert_relative_eq!(lhs, pair * 2.0); // √det g = 2
    }

    #[test]
    fn hodge_star_orientation_flip() {
        let g = Metric::euclidean(6).unwrap();
        let a = Form::basis(6, &[1, 2, 3]).unwrap();
        let rev = Form::basis(6, &[2, 1, 3, 4, 5, 6]).unwrap();
        let flipped = hodge_star_oriented(&a, &g, &rev).unwrap();
        assert_eq!(flipped, -&Form::basis(6, &[4, 5, 6]).unwrap());
        let zero_top = Form::zero(6, 6).unwrap();
        assert!(matches!(
            hodge_star_oriented(&a, &g, &zero_top),
            Err(ExteriorError::BadOrientation)
        ));
    }

    #[test]
    fn metric_pairing_counts_terms() {
        let g = Metric::euclidean(6).unwrap();
        assert_relative_eq!(metric_pairing(&omega0(), &omega0(), &g).unwrap(), 3.0);
        assert_relative_eq!(metric_pairing(&phi0(), &phi0(), &g).unwrap(), 4.0);
    }
}
