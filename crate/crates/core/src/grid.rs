//! Mixed-radix addressing of `F_q^d`: coordinate `j` has weight `q^j`.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::FiniteField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub q: u32,
    pub d: usize,
}

impl Grid {
    pub fn new(q: u32, d: usize) -> Self {
        Grid { q, d }
    }

    /// `q^d`, or `None` on overflow.
    pub fn checked_len(&self) -> Option<usize> {
        (self.q as usize).checked_pow(self.d as u32)
    }

    pub fn len(&self) -> usize {
        (self.q as usize).pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.d == 0
    }

    pub fn coords(&self, mut index: usize) -> Vec<u32> {
        let q = self.q as usize;
        let mut out = vec![0; self.d];
        for c in out.iter_mut() {
            *c = (index % q) as u32;
            index /= q;
        }
        out
    }

    pub fn coords_into(&self, mut index: usize, out: &mut [u32]) {
        let q = self.q as usize;
        for c in out.iter_mut() {
            *c = (index % q) as u32;
            index /= q;
        }
    }

    pub fn index(&self, coords: &[u32]) -> usize {
        coords.iter().rev().fold(0, |acc, &c| acc * self.q as usize + c as usize)
    }

    pub fn add(&self, field: &FiniteField, a: usize, b: usize) -> usize {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let sum: Vec<u32> = ca.iter().zip(&cb).map(|(&x, &y)| field.add(x, y)).collect();
        self.index(&sum)
    }

    pub fn neg(&self, field: &FiniteField, a: usize) -> usize {
        let c: Vec<u32> = self.coords(a).iter().map(|&x| field.neg(x)).collect();
        self.index(&c)
    }

    /// Table `t[a * len + b] = a - b` for small grids.
    pub fn difference_table(&self, field: &FiniteField) -> Vec<u32> {
        let n = self.len();
        let mut out = vec![0u32; n * n];
        let coords: Vec<Vec<u32>> = (0..n).map(|i| self.coords(i)).collect();
        for a in 0..n {
            for b in 0..n {
                let diff: Vec<u32> = coords[a].iter().zip(&coords[b]).map(|(&x, &y)| field.sub(x, y)).collect();
                out[a * n + b] = self.index(&diff) as u32;
            }
        }
        out
    }

    /// `x . m` in `F_q`.
    pub fn dot(&self, field: &FiniteField, a: usize, b: usize) -> u32 {
        let (ca, cb) = (self.coords(a), self.coords(b));
        ca.iter().zip(&cb).fold(0, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
    }

    /// Values of `sum_j table_j[x_j]` at every point, where each table maps
    /// `F_q -> F_q`. Built one axis at a time.
    pub fn separable_values(&self, field: &FiniteField, tables: &[Vec<u32>]) -> Vec<u32> {
        debug_assert_eq!(tables.len(), self.d);
        let q = self.q as usize;
        let mut values = vec![0u32];
        for table in tables {
            let prev = values.len();
            let mut next = vec![0u32; prev * q];
            for x in 0..q {
                let add = table[x];
                for (slot, &v) in next[x * prev..(x + 1) * prev].iter_mut().zip(&values) {
                    *slot = field.add(v, add);
                }
            }
            values = next;
        }
        values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_round_trips() {
        let g = Grid::new(5, 3);
        assert_eq!(g.len(), 125);
        for i in 0..g.len() {
            assert_eq!(g.index(&g.coords(i)), i);
        }
        assert_eq!(g.index(&[1, 0, 0]), 1);
        assert_eq!(g.index(&[0, 1, 0]), 5);
    }

    #[test]
    fn separable_values_match_pointwise() {
        let f = FiniteField::of_order(7).unwrap();
        let g = Grid::new(7, 3);
        let coeffs = [1u32, 3, 5];
        let tables: Vec<Vec<u32>> = coeffs.iter().map(|&a| (0..7).map(|x| f.mul(a, f.square(x))).collect()).collect();
        let vals = g.separable_values(&f, &tables);
        for i in 0..g.len() {
            let c = g.coords(i);
            let direct = c.iter().zip(&coeffs).fold(0, |acc, (&x, &a)| f.add(acc, f.mul(a, f.square(x))));
            assert_eq!(vals[i], direct);
        }
    }
}
