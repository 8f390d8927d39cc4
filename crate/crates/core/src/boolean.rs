//! Dense Boolean matrices and interchangeable multiplication backends.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '.' })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl BoolMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BoolMatrix {
            rows,
            cols,
            words,
            bits: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Sets a bit and reports whether it was previously clear.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize) -> bool {
        let w = &mut self.bits[i * self.words + j / 64];
        let m = 1u64 << (j % 64);
        let fresh = *w & m == 0;
        *w |= m;
        fresh
    }

    #[inline]
    pub fn clear(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] &= !(1u64 << (j % 64));
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(|&w| w == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Column indices of the set bits in row `i`.
    pub fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |i| self.row_ones(i).map(move |j| (i, j)))
    }

    /// In-place union; returns true if any bit was added.
    pub fn or_assign(&mut self, other: &BoolMatrix) -> bool {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut changed = false;
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            let n = *a | b;
            changed |= n != *a;
            *a = n;
        }
        changed
    }

    /// Clears every bit set in `other`.
    pub fn and_not_assign(&mut self, other: &BoolMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= !b;
        }
    }

    /// True if any bit is set in rows `r` and columns `c`.
    pub fn any_in(&self, r: std::ops::Range<usize>, c: std::ops::Range<usize>) -> bool {
        if c.is_empty() {
            return false;
        }
        let (w0, w1) = (c.start / 64, (c.end - 1) / 64);
        for i in r {
            let row = self.row(i);
            for (w, &word) in row.iter().enumerate().take(w1 + 1).skip(w0) {
                let mut m = word;
                if w == w0 {
                    m &= u64::MAX << (c.start % 64);
                }
                if w == w1 && c.end % 64 != 0 {
                    m &= u64::MAX >> (64 - c.end % 64);
                }
                if m != 0 {
                    return true;
                }
            }
        }
        false
    }

    /// Keeps only bits also set in `mask`.
    pub fn and_assign(&mut self, mask: &BoolMatrix) {
        assert_eq!((self.rows, self.cols), (mask.rows, mask.cols));
        for (a, &b) in self.bits.iter_mut().zip(&mask.bits) {
            *a &= b;
        }
    }

    /// Copies rows `r0..r1` and columns `c0..c1` into a new matrix.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> BoolMatrix {
        let mut out = BoolMatrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in self.row_ones(i) {
                if j >= c0 && j < c1 {
                    out.set(i - r0, j - c0);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> BoolMatrix {
        let mut t = BoolMatrix::zeros(self.cols, self.rows);
        for (i, j) in self.ones() {
            t.set(j, i);
        }
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Naive,
    Bitset,
    Strassen { cutoff: usize },
}

impl Backend {
    pub const STRASSEN: Backend = Backend::Strassen { cutoff: 64 };

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Naive => "naive",
            Backend::Bitset => "bitset",
            Backend::Strassen { .. } => "strassen",
        }
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(Backend::Naive),
            "bitset" => Ok(Backend::Bitset),
            "strassen" => Ok(Backend::STRASSEN),
            _ => Err(format!("unknown backend `{s}` (naive, bitset, strassen)")),
        }
    }
}

pub fn multiply(a: &BoolMatrix, b: &BoolMatrix, backend: Backend) -> BoolMatrix {
    assert_eq!(a.cols, b.rows, "inner dimensions differ");
    match backend {
        Backend::Naive => multiply_naive(a, b),
        Backend::Bitset => multiply_bitset(a, b),
        Backend::Strassen { cutoff } => multiply_strassen(a, b, cutoff.max(1)),
    }
}

pub fn multiply_naive(a: &BoolMatrix, b: &BoolMatrix) -> BoolMatrix {
    let mut c = BoolMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            if (0..a.cols).any(|k| a.get(i, k) && b.get(k, j)) {
                c.set(i, j);
            }
        }
    }
    c
}

pub fn multiply_bitset(a: &BoolMatrix, b: &BoolMatrix) -> BoolMatrix {
    let mut c = BoolMatrix::zeros(a.rows, b.cols);
    let w = c.words;
    for i in 0..a.rows {
        let (lo, hi) = (i * w, (i + 1) * w);
        for k in a.row_ones(i) {
            let src = b.row(k);
            for (d, &s) in c.bits[lo..hi].iter_mut().zip(src) {
                *d |= s;
            }
        }
    }
    c
}

/// Square integer matrix of side `n` stored row-major.
#[derive(Clone)]
struct IntMat {
    n: usize,
    v: Vec<i64>,
}

impl IntMat {
    fn zeros(n: usize) -> Self {
        IntMat {
            n,
            v: vec![0; n * n],
        }
    }

    fn quad(&self, qi: usize, qj: usize) -> IntMat {
        let h = self.n / 2;
        let mut out = IntMat::zeros(h);
        for i in 0..h {
            let src = (qi * h + i) * self.n + qj * h;
            out.v[i * h..(i + 1) * h].copy_from_slice(&self.v[src..src + h]);
        }
        out
    }

    fn add(&self, o: &IntMat) -> IntMat {
        IntMat {
            n: self.n,
            v: self.v.iter().zip(&o.v).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub(&self, o: &IntMat) -> IntMat {
        IntMat {
            n: self.n,
            v: self.v.iter().zip(&o.v).map(|(a, b)| a - b).collect(),
        }
    }

    fn mul_dense(&self, o: &IntMat) -> IntMat {
        let n = self.n;
        let mut out = IntMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.v[i * n + k];
                if a == 0 {
                    continue;
                }
                let row = &o.v[k * n..(k + 1) * n];
                for (d, &b) in out.v[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    fn strassen(&self, o: &IntMat, cutoff: usize) -> IntMat {
        let n = self.n;
        if n <= cutoff {
            return self.mul_dense(o);
        }
        let (a11, a12, a21, a22) = (self.quad(0, 0), self.quad(0, 1), self.quad(1, 0), self.quad(1, 1));
        let (b11, b12, b21, b22) = (o.quad(0, 0), o.quad(0, 1), o.quad(1, 0), o.quad(1, 1));
        let m1 = a11.add(&a22).strassen(&b11.add(&b22), cutoff);
        let m2 = a21.add(&a22).strassen(&b11, cutoff);
        let m3 = a11.strassen(&b12.sub(&b22), cutoff);
        let m4 = a22.strassen(&b21.sub(&b11), cutoff);
        let m5 = a11.add(&a12).strassen(&b22, cutoff);
        let m6 = a21.sub(&a11).strassen(&b11.add(&b12), cutoff);
        let m7 = a12.sub(&a22).strassen(&b21.add(&b22), cutoff);
        let c11 = m1.add(&m4).sub(&m5).add(&m7);
        let c12 = m3.add(&m5);
        let c21 = m2.add(&m4);
        let c22 = m1.sub(&m2).add(&m3).add(&m6);
        let h = n / 2;
        let mut out = IntMat::zeros(n);
        for (q, (qi, qj)) in [(&c11, (0, 0)), (&c12, (0, 1)), (&c21, (1, 0)), (&c22, (1, 1))] {
            for i in 0..h {
                let dst = (qi * h + i) * n + qj * h;
                out.v[dst..dst + h].copy_from_slice(&q.v[i * h..(i + 1) * h]);
            }
        }
        out
    }
}

/// Strassen over the integers on zero-padded power-of-two blocks; any
/// positive entry of the integer product is a true bit.
pub fn multiply_strassen(a: &BoolMatrix, b: &BoolMatrix, cutoff: usize) -> BoolMatrix {
    let dim = a.rows.max(a.cols).max(b.cols);
    if dim <= cutoff {
        return multiply_bitset(a, b);
    }
    let n = dim.next_power_of_two();
    let mut ia = IntMat::zeros(n);
    let mut ib = IntMat::zeros(n);
    for (i, j) in a.ones() {
        ia.v[i * n + j] = 1;
    }
    for (i, j) in b.ones() {
        ib.v[i * n + j] = 1;
    }
    let p = ia.strassen(&ib, cutoff);
    let mut c = BoolMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            if p.v[i * n + j] > 0 {
                c.set(i, j);
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = BoolMatrix> {
        proptest::collection::vec(any::<bool>(), rows * cols).prop_map(move |v| {
            let mut m = BoolMatrix::zeros(rows, cols);
            for (k, b) in v.into_iter().enumerate() {
                if b {
                    m.set(k / cols, k % cols);
                }
            }
            m
        })
    }

    #[test]
    fn identity_is_neutral() {
        let mut a = BoolMatrix::zeros(70, 70);
        for k in 0..70 {
            a.set(k, (k * 7 + 3) % 70);
        }
        for be in [Backend::Naive, Backend::Bitset, Backend::Strassen { cutoff: 4 }] {
            assert_eq!(multiply(&a, &BoolMatrix::identity(70), be), a);
            assert_eq!(multiply(&BoolMatrix::identity(70), &a, be), a);
        }
    }

    #[test]
    fn any_in_block() {
        let mut a = BoolMatrix::zeros(3, 200);
        a.set(1, 130);
        assert!(a.any_in(0..3, 130..131));
        assert!(a.any_in(1..2, 64..200));
        assert!(!a.any_in(0..1, 0..200));
        assert!(!a.any_in(0..3, 0..130));
        assert!(!a.any_in(0..3, 131..200));
        assert!(!a.any_in(0..3, 5..5));
    }

    #[test]
    fn rectangular() {
        let mut a = BoolMatrix::zeros(2, 3);
        a.set(0, 2);
        a.set(1, 0);
        let mut b = BoolMatrix::zeros(3, 1);
        b.set(2, 0);
        let c = multiply(&a, &b, Backend::Strassen { cutoff: 1 });
        assert!(c.get(0, 0));
        assert!(!c.get(1, 0));
    }

    proptest! {
        #[test]
        fn backends_agree(
            (a, b) in (1usize..40, 1usize..40, 1usize..40)
                .prop_flat_map(|(r, k, c)| (arb_matrix(r, k), arb_matrix(k, c)))
        ) {
            let n = multiply_naive(&a, &b);
            prop_assert_eq!(&multiply_bitset(&a, &b), &n);
            prop_assert_eq!(&multiply_strassen(&a, &b, 4), &n);
        }

        #[test]
        fn distributes_over_union(
            (a, b, c) in (1usize..20, 1usize..20, 1usize..20)
                .prop_flat_map(|(r, k, m)| (arb_matrix(r, k), arb_matrix(k, m), arb_matrix(k, m)))
        ) {
            let mut bc = b.clone();
            bc.or_assign(&c);
            let lhs = multiply_bitset(&a, &bc);
            let mut rhs = multiply_bitset(&a, &b);
            rhs.or_assign(&multiply_bitset(&a, &c));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
