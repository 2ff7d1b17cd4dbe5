//! Determinants, resultants and characteristic polynomials.

use crate::error::{Error, Result};
use crate::poly_core::field::{Field, Ring};
use crate::poly_core::poly::Poly;

/// Dense square matrix stored row-major as nested vectors.
pub type Matrix<R> = Vec<Vec<R>>;

/// Determinant by fraction-free (Bareiss) elimination with pivoting.
///
/// Every intermediate division is exact in the ring, so the routine works over
/// integral domains such as polynomial rings as well as over fields.
pub fn det_bareiss<R: Ring>(mut m: Matrix<R>) -> Result<R> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("determinant of a non-square matrix".into()));
    }
    if n == 0 {
        return Ok(R::one());
    }
    let mut negate = false;
    let mut prev = R::one();
    for k in 0..n {
        let pivot = (k..n)
            .filter_map(|i| m[i][k].pivot_weight().map(|w| (i, w)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        let Some((p, _)) = pivot else {
            return Ok(R::zero());
        };
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev)?;
            }
            m[i][k] = R::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

/// Sylvester matrix of two coefficient lists (low-to-high, trimmed).
pub fn sylvester<R: Ring>(p: &[R], q: &[R]) -> Matrix<R> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut s = vec![vec![R::zero(); size]; size];
    for r in 0..n {
        for (j, c) in p.iter().rev().enumerate() {
            s[r][r + j] = c.clone();
        }
    }
    for r in 0..m {
        for (j, c) in q.iter().rev().enumerate() {
            s[n + r][r + j] = c.clone();
        }
    }
    s
}

/// Resultant `res(P, Q) = lc(P)^{deg Q} · ∏_{P(r)=0} Q(r)` as a Sylvester
/// determinant.
pub fn resultant<R: Ring>(p: &Poly<R>, q: &Poly<R>) -> Result<R> {
    let (Some(dp), Some(dq)) = (p.degree(), q.degree()) else {
        return Ok(R::zero());
    };
    if dp == 0 && dq == 0 {
        return Err(Error::InvalidInput("resultant of two constants".into()));
    }
    if dp == 0 {
        return Err(Error::InvalidInput("resultant needs deg P ≥ 1".into()));
    }
    det_bareiss(sylvester(p.coeffs(), q.coeffs()))
}

/// Characteristic polynomial `det(λI − M)` by reduction to upper Hessenberg
/// form followed by the Hessenberg determinant recurrence.
///
/// Pivots are chosen by [`Ring::pivot_weight`], which gives partial pivoting
/// on the float backend and largest-absolute-value pivoting on valued fields.
pub fn charpoly<F: Field>(mut h: Matrix<F>) -> Result<Poly<F>> {
    let n = h.len();
    if h.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("characteristic polynomial of a non-square matrix".into()));
    }
    // Similarity transforms H ← L⁻¹ P H P L column by column.
    for j in 0..n.saturating_sub(2) {
        let pivot = (j + 1..n)
            .filter_map(|i| h[i][j].pivot_weight().map(|w| (i, w)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        let Some((p, _)) = pivot else { continue };
        if p != j + 1 {
            h.swap(p, j + 1);
            for row in h.iter_mut() {
                row.swap(p, j + 1);
            }
        }
        let inv = h[j + 1][j].inv()?;
        for i in j + 2..n {
            if h[i][j].is_zero() {
                continue;
            }
            let t = h[i][j].mul(&inv);
            for k in j..n {
                let v = h[i][k].sub(&t.mul(&h[j + 1][k]));
                h[i][k] = v;
            }
            h[i][j] = F::zero();
            for row in h.iter_mut() {
                let v = row[j + 1].add(&t.mul(&row[i]));
                row[j + 1] = v;
            }
        }
    }
    // p_k = (λ − h_kk) p_{k−1} − Σ_{i<k} h_ik (∏_{m=i+1}^{k} h_{m,m−1}) p_{i−1}.
    let mut polys: Vec<Poly<F>> = Vec::with_capacity(n + 1);
    polys.push(Poly::one());
    for k in 0..n {
        let lam_minus = Poly::new(vec![h[k][k].neg(), F::one()]);
        let mut pk = lam_minus.mul(&polys[k]);
        let mut prod = F::one();
        for i in (0..k).rev() {
            prod = prod.mul(&h[i + 1][i]);
            if prod.is_zero() {
                break;
            }
            let coef = h[i][k].mul(&prod);
            if !coef.is_zero() {
                pk = pk.sub(&polys[i].scale(&coef));
            }
        }
        polys.push(pk);
    }
    Ok(polys.pop().expect("nonempty"))
}

/// Matrix of multiplication by `h` on `F[z]/(modulus)` in the monomial basis.
///
/// Column `j` holds the coefficients of `z^j · h mod modulus`.
pub fn multiplication_matrix<F: Field>(h: &Poly<F>, modulus: &Poly<F>) -> Result<Matrix<F>> {
    let monic = modulus.monic()?;
    let n = monic.deg();
    let mut col = h.rem(&monic)?;
    let mut m = vec![vec![F::zero(); n]; n];
    for j in 0..n {
        for (i, row) in m.iter_mut().enumerate() {
            row[j] = col.coeff(i);
        }
        if j + 1 < n {
            // z·col reduced by the monic modulus.
            let shifted = col.shift(1);
            let top = shifted.coeff(n);
            col = if top.is_zero() {
                shifted
            } else {
                shifted.sub(&monic.scale(&top))
            };
        }
    }
    Ok(m)
}

/// `∏_{P(r)=0} (λ − h(r))`, the monic norm polynomial of `h` modulo `P`.
///
/// This equals `res_z(P, λ − h(z)) / lc(P)^{deg_z(λ − h)}` and is computed as
/// the characteristic polynomial of multiplication by `h`.
pub fn norm_polynomial<F: Field>(p: &Poly<F>, h: &Poly<F>) -> Result<Poly<F>> {
    charpoly(multiplication_matrix(h, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_core::field::{rat, Rational};

    fn qp(v: &[i64]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&x| Rational::from_i64(x)).collect())
    }

    #[test]
    fn resultant_linear_factors() {
        let (a, b) = (rat(3, 2), rat(-5, 7));
        let p = Poly::new(vec![-a.clone(), Rational::one()]);
        let q = Poly::new(vec![-b.clone(), Rational::one()]);
        assert_eq!(resultant(&p, &q).unwrap(), &a - &b);
        assert_eq!(resultant(&qp(&[-1, 0, 1]), &qp(&[-1, 1])).unwrap(), Rational::zero());
    }

    #[test]
    fn resultant_over_polynomial_ring() {
        // res_z(z^2 − z, λ − 2z) = λ(λ − 2).
        let c = |v: &[i64]| qp(v);
        let p: Poly<Poly<Rational>> = Poly::new(vec![c(&[]), c(&[-1]), c(&[1])]);
        let q: Poly<Poly<Rational>> = Poly::new(vec![c(&[0, 1]), c(&[-2])]);
        assert_eq!(resultant(&p, &q).unwrap(), qp(&[0, -2, 1]));
    }

    #[test]
    fn resultant_of_constants_is_error() {
        assert!(resultant(&qp(&[2]), &qp(&[3])).is_err());
    }

    #[test]
    fn charpoly_matches_bareiss_determinant() {
        let m: Matrix<Rational> = vec![
            vec![rat(1, 2), rat(3, 1), rat(0, 1), rat(-1, 3)],
            vec![rat(2, 1), rat(0, 1), rat(5, 4), rat(1, 1)],
            vec![rat(0, 1), rat(7, 3), rat(-2, 1), rat(0, 1)],
            vec![rat(4, 5), rat(1, 1), rat(1, 1), rat(3, 1)],
        ];
        let cp = charpoly(m.clone()).unwrap();
        let lam: Matrix<Poly<Rational>> = m
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let c = Poly::constant(x.neg());
                        if i == j {
                            c.add(&Poly::identity())
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();
        assert_eq!(det_bareiss(lam).unwrap(), cp);
    }

    #[test]
    fn norm_polynomial_matches_resultant() {
        // P = 2z^3 − z + 5, h = z^2 + 3z; res_z(P, λ − h) = lc(P)^2 · norm.
        let p = qp(&[5, -1, 0, 2]);
        let h = qp(&[0, 3, 1]);
        let norm = norm_polynomial(&p, &h).unwrap();
        let pl: Poly<Poly<Rational>> = p.map(|c| Poly::constant(c.clone()));
        let ql: Poly<Poly<Rational>> =
            Poly::new(vec![qp(&[0, 1]), qp(&[-3]), qp(&[-1])]);
        let res = resultant(&pl, &ql).unwrap();
        assert_eq!(res, norm.scale(&Rational::from_i64(4)));
    }
}
