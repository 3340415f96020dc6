use super::{fp_poly, Elem, Field};
use crate::error::{Error, Result};

/// F_{q^D} realised as F_{p^{kD}} together with an embedding of F_q and the
/// F_q-basis `1, b, .., b^{D-1}` where `b` is the generator of the big field.
///
/// `flatten` and `lift` convert between big-field elements and coordinate
/// vectors over F_q; both are F_q-linear and mutually inverse.
#[derive(Clone, Debug)]
pub struct Extension {
    base: Field,
    ext: Field,
    degree: usize,
    /// Image of `x^i` (the base field's polynomial basis) inside `ext`.
    embed_basis: Vec<Elem>,
    /// `lift_table[j * q + c] = embed(c) * b^j`, present when q is small.
    lift_table: Option<Vec<Elem>>,
    /// For each base-p digit position of an `ext` element, its flattened image.
    flatten_cols: Vec<Vec<Elem>>,
}

const LIFT_TABLE_MAX: u64 = 1 << 12;

impl Extension {
    pub fn new(base: &Field, degree: usize) -> Result<Extension> {
        if degree == 0 {
            return Err(Error::Param("extension degree must be positive".into()));
        }
        let p = base.p();
        let k = base.k() as usize;
        let ext = if degree == 1 {
            base.clone()
        } else {
            let total = u32::try_from(k * degree)
                .map_err(|_| Error::Param("extension degree too large".into()))?;
            Field::new(p, total)?
        };
        let embed_basis: Vec<Elem> = if degree == 1 {
            (0..k).map(|i| Elem(p.pow(i as u32))).collect()
        } else {
            let root = find_subfield_root(base, &ext)?;
            (0..k).map(|i| ext.pow(root, i as u64)).collect()
        };
        let mut ex = Extension {
            base: base.clone(),
            ext,
            degree,
            embed_basis,
            lift_table: None,
            flatten_cols: Vec::new(),
        };
        ex.flatten_cols = ex.invert_basis()?;
        if base.q() <= LIFT_TABLE_MAX {
            let mut table = Vec::with_capacity(degree * base.q() as usize);
            for j in 0..degree {
                let bj = ex.ext.pow(ex.ext.zeta(), j as u64);
                for c in base.elements() {
                    table.push(ex.ext.mul(ex.embed(c), bj));
                }
            }
            ex.lift_table = Some(table);
        }
        Ok(ex)
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn ext(&self) -> &Field {
        &self.ext
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Maps a base-field element to its image in the big field.
    pub fn embed(&self, c: Elem) -> Elem {
        if self.degree == 1 {
            return c;
        }
        let ext = &self.ext;
        self.base
            .digits(c)
            .iter()
            .zip(&self.embed_basis)
            .fold(Elem::ZERO, |acc, (&d, &img)| ext.add(acc, ext.mul(Elem(d), img)))
    }

    pub fn lift(&self, coords: &[Elem]) -> Elem {
        debug_assert_eq!(coords.len(), self.degree);
        if self.degree == 1 {
            return coords[0];
        }
        let ext = &self.ext;
        match &self.lift_table {
            Some(t) => {
                let q = self.base.q() as usize;
                coords
                    .iter()
                    .enumerate()
                    .fold(Elem::ZERO, |acc, (j, c)| ext.add(acc, t[j * q + c.0 as usize]))
            }
            None => coords.iter().enumerate().fold(Elem::ZERO, |acc, (j, &c)| {
                let bj = ext.pow(ext.zeta(), j as u64);
                ext.add(acc, ext.mul(self.embed(c), bj))
            }),
        }
    }

    pub fn try_lift(&self, coords: &[Elem]) -> Result<Elem> {
        if coords.len() != self.degree || coords.iter().any(|&c| !self.base.contains(c)) {
            return Err(Error::Dimension(format!(
                "lift expects {} coordinates over F_{}",
                self.degree,
                self.base.q()
            )));
        }
        Ok(self.lift(coords))
    }

    pub fn flatten_into(&self, e: Elem, out: &mut [Elem]) {
        debug_assert_eq!(out.len(), self.degree);
        if self.degree == 1 {
            out[0] = e;
            return;
        }
        out.iter_mut().for_each(|o| *o = Elem::ZERO);
        let p = self.ext.p();
        let mut v = e.0;
        let base = &self.base;
        for col in &self.flatten_cols {
            let d = v % p;
            v /= p;
            if d == 0 {
                continue;
            }
            for (o, &c) in out.iter_mut().zip(col) {
                *o = base.add(*o, base.mul(Elem(d), c));
            }
        }
    }

    pub fn flatten(&self, e: Elem) -> Vec<Elem> {
        let mut out = vec![Elem::ZERO; self.degree];
        self.flatten_into(e, &mut out);
        out
    }

    pub fn try_flatten(&self, e: Elem) -> Result<Vec<Elem>> {
        if !self.ext.contains(e) {
            return Err(Error::Param(format!("{} is not in F_{}", e.0, self.ext.q())));
        }
        Ok(self.flatten(e))
    }

    /// Columns of the inverse of the F_p-matrix whose column (j, i) is
    /// `embed(x^i) * b^j`, regrouped per output coordinate.
    fn invert_basis(&self) -> Result<Vec<Vec<Elem>>> {
        let p = self.ext.p();
        let k = self.base.k() as usize;
        let n = k * self.degree;
        let ext = &self.ext;
        // a[row][col]: row = digit of ext element, col = (j, i) -> j * k + i
        let mut a = vec![vec![0u64; 2 * n]; n];
        for j in 0..self.degree {
            let bj = ext.pow(ext.zeta(), j as u64);
            for i in 0..k {
                let v = ext.mul(self.embed_basis[i], bj);
                for (row, d) in ext.digits(v).into_iter().enumerate() {
                    a[row][j * k + i] = d;
                }
            }
        }
        for (r, row) in a.iter_mut().enumerate() {
            row[n + r] = 1;
        }
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a[r][col] != 0)
                .ok_or_else(|| Error::Internal("extension basis is singular".into()))?;
            a.swap(col, pivot);
            let inv = fp_poly::inv_mod(a[col][col], p);
            for v in a[col].iter_mut() {
                *v = fp_poly::mulp(*v, inv, p);
            }
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    for c in 0..2 * n {
                        let sub = fp_poly::mulp(f, a[col][c], p);
                        a[r][c] = (a[r][c] + p - sub) % p;
                    }
                }
            }
        }
        // inverse[(j,i)][digit t] = a[j*k+i][n+t]; the flattened image of digit t
        // in coordinate j is the base element with digits inverse[(j, 0..k)][t].
        Ok((0..n)
            .map(|t| {
                (0..self.degree)
                    .map(|j| {
                        let digits: Vec<u64> = (0..k).map(|i| a[j * k + i][n + t]).collect();
                        self.base.from_digits(&digits)
                    })
                    .collect()
            })
            .collect())
    }
}

/// A root of the base field's modulus inside the big field, searched among
/// the subfield elements `0` and `g^(r*j)` with `r = (Q-1)/(q-1)`.
fn find_subfield_root(base: &Field, ext: &Field) -> Result<Elem> {
    let q = base.q();
    let r = (ext.q() - 1) / (q - 1);
    let step = ext.pow(ext.zeta(), r);
    let modulus = &base.spec().modulus;
    let mut cand = Elem::ONE;
    for _ in 0..q - 1 {
        let value = modulus
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| ext.add(ext.mul(acc, cand), Elem(c)));
        if value.is_zero() {
            return Ok(cand);
        }
        cand = ext.mul(cand, step);
    }
    if modulus[0] == 0 {
        return Ok(Elem::ZERO);
    }
    Err(Error::Internal(format!(
        "no root of the F_{q} modulus inside F_{}",
        ext.q()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_over_f2_coordinates() {
        let base = Field::new(2, 1).unwrap();
        let ex = Extension::new(&base, 2).unwrap();
        // b + a x with (b, a) as coordinates
        for b in 0..2 {
            for a in 0..2 {
                let e = Elem(b + 2 * a);
                assert_eq!(ex.flatten(e), vec![Elem(b), Elem(a)]);
            }
        }
        assert_eq!(ex.flatten(Elem::ZERO), vec![Elem::ZERO; 2]);
    }

    #[test]
    fn f4_times_generator() {
        // zeta = x; x (b + a x) = a + (a + b) x modulo x^2 + x + 1
        let base = Field::new(2, 1).unwrap();
        let ex = Extension::new(&base, 2).unwrap();
        let ext = ex.ext();
        assert_eq!(ext.zeta(), Elem(2));
        for b in 0..2u64 {
            for a in 0..2u64 {
                let e = ext.mul(ext.zeta(), Elem(b + 2 * a));
                assert_eq!(ex.flatten(e), vec![Elem(a), Elem(a ^ b)]);
            }
        }
    }

    #[test]
    fn roundtrip_exhaustive() {
        for (p, k, d) in [(2, 1, 2), (2, 2, 2), (3, 1, 3), (2, 2, 3), (5, 1, 2), (2, 4, 3), (3, 2, 2), (2, 3, 4)] {
            let base = Field::new(p, k).unwrap();
            let ex = Extension::new(&base, d).unwrap();
            assert!(ex.ext().q() <= 4096);
            for e in ex.ext().elements() {
                assert_eq!(ex.lift(&ex.flatten(e)), e);
            }
        }
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let base = Field::new(2, 4).unwrap();
        let ex = Extension::new(&base, 2).unwrap();
        let ext = ex.ext();
        for a in base.elements() {
            for b in base.elements() {
                assert_eq!(ex.embed(base.mul(a, b)), ext.mul(ex.embed(a), ex.embed(b)));
                assert_eq!(ex.embed(base.add(a, b)), ext.add(ex.embed(a), ex.embed(b)));
            }
            // embedded element flattens to (a, 0)
            assert_eq!(ex.flatten(ex.embed(a)), vec![a, Elem::ZERO]);
        }
    }

    #[test]
    fn flatten_is_base_linear() {
        let base = Field::new(3, 1).unwrap();
        let ex = Extension::new(&base, 3).unwrap();
        let ext = ex.ext();
        for e in ext.elements().step_by(5) {
            for f in ext.elements().step_by(7) {
                for c in base.elements() {
                    let lhs = ex.flatten(ext.add(ext.mul(ex.embed(c), e), f));
                    let fe = ex.flatten(e);
                    let ff = ex.flatten(f);
                    let rhs: Vec<Elem> = fe
                        .iter()
                        .zip(&ff)
                        .map(|(&x, &y)| base.add(base.mul(c, x), y))
                        .collect();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn degree_one_is_identity() {
        let base = Field::new(7, 1).unwrap();
        let ex = Extension::new(&base, 1).unwrap();
        for e in base.elements() {
            assert_eq!(ex.flatten(e), vec![e]);
            assert_eq!(ex.lift(&[e]), e);
        }
    }

    #[test]
    fn checked_forms_reject_mismatch() {
        let base = Field::new(2, 1).unwrap();
        let ex = Extension::new(&base, 2).unwrap();
        assert!(ex.try_lift(&[Elem(1)]).is_err());
        assert!(ex.try_lift(&[Elem(1), Elem(2)]).is_err());
        assert!(ex.try_flatten(Elem(4)).is_err());
    }
}
