//! Incrementally built echelon bases.
//!
//! An [`Echelon`] stores vectors whose leading (first nonzero) coordinates
//! are pairwise distinct and normalized to one. Every stored vector may
//! carry a payload that follows it through the same linear combinations;
//! the spectral-sequence code uses payloads to keep chain-level lifts in
//! step with their leading terms.

use super::matrix::{axpy, is_zero_vector, Vector};
use super::scalar::{Field, Scalar};

#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    width: usize,
    payload_width: usize,
    vectors: Vec<Vector>,
    payloads: Vec<Vector>,
    pivots: Vec<usize>,
    pivot_of: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(field: Field, width: usize) -> Echelon {
        Echelon::with_payload(field, width, 0)
    }

    pub fn with_payload(field: Field, width: usize, payload_width: usize) -> Echelon {
        Echelon {
            field,
            width,
            payload_width,
            vectors: Vec::new(),
            payloads: Vec::new(),
            pivots: Vec::new(),
            pivot_of: vec![None; width],
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn payloads(&self) -> &[Vector] {
        &self.payloads
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Subtracts stored vectors until no coordinate of `v` sits on a pivot.
    /// Returns the coefficients used, indexed like [`Self::vectors`].
    pub fn reduce(&self, v: &mut [Scalar], payload: Option<&mut [Scalar]>) -> Vec<Scalar> {
        debug_assert_eq!(v.len(), self.width);
        let mut coeffs = vec![self.field.zero(); self.vectors.len()];
        let mut payload = payload;
        for j in 0..self.width {
            if v[j].is_zero() {
                continue;
            }
            if let Some(k) = self.pivot_of[j] {
                let c = v[j].clone();
                let minus = -&c;
                axpy(&mut v[j..], &minus, &self.vectors[k][j..]);
                if let Some(p) = payload.as_deref_mut() {
                    axpy(p, &minus, &self.payloads[k]);
                }
                coeffs[k] = c;
            }
        }
        coeffs
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w, None);
        is_zero_vector(&w)
    }

    /// Inserts `v` (with its payload). Returns the index of the new basis
    /// vector, or `None` if `v` was already in the span.
    pub fn insert(&mut self, v: Vector, payload: Vector) -> Option<usize> {
        debug_assert_eq!(payload.len(), self.payload_width);
        let mut v = v;
        let mut payload = payload;
        self.reduce(&mut v, Some(&mut payload));
        let lead = v.iter().position(|x| !x.is_zero())?;
        let inv = v[lead].inv();
        if !inv.is_one() {
            for x in v.iter_mut().chain(payload.iter_mut()) {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let k = self.vectors.len();
        self.vectors.push(v);
        self.payloads.push(payload);
        self.pivots.push(lead);
        self.pivot_of[lead] = Some(k);
        Some(k)
    }

    pub fn insert_plain(&mut self, v: Vector) -> Option<usize> {
        self.insert(v, Vec::new())
    }

    /// Expresses `v` in terms of the stored vectors, if it lies in the span.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let mut w = v.to_vec();
        let c = self.reduce(&mut w, None);
        is_zero_vector(&w).then_some(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payload_follows_combinations() {
        let f = Field::Rationals;
        let v = |xs: &[i64]| xs.iter().map(|&x| f.from_i64(x)).collect::<Vec<_>>();
        let mut e = Echelon::with_payload(f, 3, 2);
        assert_eq!(e.insert(v(&[2, 0, 2]), v(&[1, 0])), Some(0));
        assert_eq!(e.insert(v(&[1, 1, 0]), v(&[0, 1])), Some(1));
        assert_eq!(e.insert(v(&[3, 1, 2]), v(&[1, 1])), None);
        // stored[0] = (1,0,1) with payload (1/2, 0)
        assert_eq!(e.payloads()[0], vec![f.parse_scalar("1/2").unwrap(), f.zero()]);
        let mut w = v(&[4, 2, 2]);
        let mut p = v(&[0, 0]);
        let c = e.reduce(&mut w, Some(&mut p));
        assert!(is_zero_vector(&w));
        // w = 2*(2,0,2)/... check payload is minus the matching combination
        let expect: Vec<Scalar> = {
            let mut acc = v(&[0, 0]);
            axpy(&mut acc, &-&c[0], &e.payloads()[0]);
            axpy(&mut acc, &-&c[1], &e.payloads()[1]);
            acc
        };
        assert_eq!(p, expect);
        assert!(e.contains(&v(&[0, 2, -2])));
        assert!(!e.contains(&v(&[0, 0, 1])));
    }
}
