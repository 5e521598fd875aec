//! Smith normal form over the integers.
//!
//! [`sparse_invariants`] handles the large, very sparse boundary matrices:
//! it eliminates pivots of smallest absolute value (units first), preferring
//! short rows to keep fill-in low, and runs on `i64` until an operation
//! overflows, at which point it restarts on big integers.
//!
//! [`smith_normal_form`] is the dense version that also returns the
//! unimodular transforms; it is meant for small matrices.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Column-major sparse integer matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, ncols: usize) -> Self {
        SparseMatrix {
            rows,
            cols: vec![Vec::new(); ncols],
        }
    }

    /// Builds a matrix from columns; entries are sorted and merged.
    pub fn from_columns(rows: usize, cols: Vec<Vec<(u32, i64)>>) -> Self {
        let cols = cols.into_iter().map(normalize).collect::<Vec<_>>();
        debug_assert!(cols.iter().flatten().all(|&(r, _)| (r as usize) < rows));
        SparseMatrix { rows, cols }
    }

    pub fn from_dense(m: &[Vec<i64>]) -> Self {
        let rows = m.len();
        let ncols = m.first().map_or(0, Vec::len);
        let cols = (0..ncols)
            .map(|j| (0..rows).filter(|&i| m[i][j] != 0).map(|i| (i as u32, m[i][j])).collect())
            .collect();
        SparseMatrix { rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(u32, i64)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.ncols()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m[i as usize][j] = v;
            }
        }
        m
    }

    /// `self * x` for a dense vector `x`.
    pub fn mul_vec(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.ncols());
        let mut out = vec![0i64; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            if x[j] == 0 {
                continue;
            }
            for &(i, v) in col {
                out[i as usize] += v * x[j];
            }
        }
        out
    }

    /// `self * other`, both sparse.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), other.rows);
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut acc: Vec<(u32, i64)> = Vec::new();
                for &(k, w) in col {
                    for &(i, v) in &self.cols[k as usize] {
                        acc.push((i, v * w));
                    }
                }
                normalize(acc)
            })
            .collect();
        SparseMatrix { rows: self.rows, cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }
}

fn normalize(mut v: Vec<(u32, i64)>) -> Vec<(u32, i64)> {
    v.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(u32, i64)> = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

/// Rank and nontrivial invariant factors of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithInvariants {
    pub rank: usize,
    /// Invariant factors greater than one, each dividing the next.
    pub torsion: Vec<BigInt>,
}

trait Coef: Clone + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn is_nil(&self) -> bool;
    /// Saturating absolute value, used only to rank pivots.
    fn key(&self) -> u64;
    /// `a - q * b`, `None` on overflow.
    fn sub_mul(a: &Self, q: &Self, b: &Self) -> Option<Self>;
    /// Quotient truncated toward zero.
    fn quot(a: &Self, b: &Self) -> Self;
    fn divides(&self, a: &Self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl Coef for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn key(&self) -> u64 {
        self.unsigned_abs()
    }
    fn sub_mul(a: &Self, q: &Self, b: &Self) -> Option<Self> {
        a.checked_sub(q.checked_mul(*b)?)
    }
    fn quot(a: &Self, b: &Self) -> Self {
        a / b
    }
    fn divides(&self, a: &Self) -> bool {
        a % self == 0
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coef for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn key(&self) -> u64 {
        self.abs().to_u64().unwrap_or(u64::MAX)
    }
    fn sub_mul(a: &Self, q: &Self, b: &Self) -> Option<Self> {
        Some(a - q * b)
    }
    fn quot(a: &Self, b: &Self) -> Self {
        a / b
    }
    fn divides(&self, a: &Self) -> bool {
        (a % self).is_zero()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Overflow;

/// Row-oriented elimination state. Rows here are the columns of the input,
/// which leaves the invariants unchanged.
struct Eliminator<C> {
    rows: Vec<Vec<(u32, C)>>,
    alive: Vec<bool>,
    version: Vec<u32>,
    col_rows: Vec<Vec<u32>>,
    heap: BinaryHeap<Reverse<(u64, u32, u32, u32)>>,
    stamp: Vec<u32>,
    clock: u32,
    pivots: Vec<BigInt>,
}

impl<C: Coef> Eliminator<C> {
    fn new(m: &SparseMatrix) -> Self {
        let rows: Vec<Vec<(u32, C)>> = m
            .cols
            .iter()
            .map(|c| c.iter().map(|&(i, v)| (i, C::from_i64(v))).collect())
            .collect();
        let mut col_rows = vec![Vec::new(); m.rows];
        for (r, row) in rows.iter().enumerate() {
            for &(c, _) in row {
                col_rows[c as usize].push(r as u32);
            }
        }
        let n = rows.len();
        let mut e = Eliminator {
            rows,
            alive: vec![true; n],
            version: vec![0; n],
            col_rows,
            heap: BinaryHeap::new(),
            stamp: vec![0; n],
            clock: 0,
            pivots: Vec::new(),
        };
        for r in 0..n {
            e.push(r);
        }
        e
    }

    fn push(&mut self, r: usize) {
        self.version[r] += 1;
        let row = &self.rows[r];
        if row.is_empty() {
            return;
        }
        let min = row.iter().map(|e| e.1.key()).min().unwrap();
        self.heap
            .push(Reverse((min, row.len() as u32, r as u32, self.version[r])));
    }

    fn pop(&mut self) -> Option<usize> {
        while let Some(Reverse((_, _, r, ver))) = self.heap.pop() {
            let r = r as usize;
            if self.alive[r] && self.version[r] == ver && !self.rows[r].is_empty() {
                return Some(r);
            }
        }
        None
    }

    fn entry(&self, r: usize, c: u32) -> Option<&C> {
        let row = &self.rows[r];
        row.binary_search_by_key(&c, |e| e.0).ok().map(|k| &row[k].1)
    }

    /// Column with the smallest entry in row `r`; ties go to the column
    /// touching the fewest rows.
    fn pick_column(&self, r: usize) -> u32 {
        self.rows[r]
            .iter()
            .min_by_key(|(c, v)| (v.key(), self.col_rows[*c as usize].len()))
            .map(|e| e.0)
            .expect("non-empty row")
    }

    /// Other live rows with a nonzero entry in column `c`.
    fn rows_in_column(&mut self, c: u32, except: usize) -> Vec<usize> {
        self.clock += 1;
        let clock = self.clock;
        let mut out = Vec::new();
        let list = std::mem::take(&mut self.col_rows[c as usize]);
        let mut kept = Vec::with_capacity(list.len());
        for r2 in list {
            let r2u = r2 as usize;
            if !self.alive[r2u] || self.stamp[r2u] == clock {
                continue;
            }
            if self.entry(r2u, c).is_none() {
                continue;
            }
            self.stamp[r2u] = clock;
            kept.push(r2);
            if r2u != except {
                out.push(r2u);
            }
        }
        self.col_rows[c as usize] = kept;
        out
    }

    /// `row[target] -= q * row[src]`.
    fn sub_row(&mut self, target: usize, q: &C, src: usize) -> Result<(), Overflow> {
        let a = std::mem::take(&mut self.rows[target]);
        let b = &self.rows[src];
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let zero = C::from_i64(0);
        while i < a.len() || j < b.len() {
            let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i].clone());
                i += 1;
            } else if take_b {
                let v = C::sub_mul(&zero, q, &b[j].1).ok_or(Overflow)?;
                if !v.is_nil() {
                    self.col_rows[b[j].0 as usize].push(target as u32);
                    out.push((b[j].0, v));
                }
                j += 1;
            } else {
                let v = C::sub_mul(&a[i].1, q, &b[j].1).ok_or(Overflow)?;
                if !v.is_nil() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        self.rows[target] = out;
        Ok(())
    }

    fn run(mut self) -> Result<SmithInvariants, Overflow> {
        while let Some(mut r) = self.pop() {
            let mut c = self.pick_column(r);
            loop {
                // clear column c below the pivot, Euclid style
                loop {
                    let p = self.entry(r, c).expect("pivot present").clone();
                    let others = self.rows_in_column(c, r);
                    let mut best: Option<(u64, usize)> = None;
                    for r2 in others {
                        let a = self.entry(r2, c).expect("listed").clone();
                        let q = C::quot(&a, &p);
                        if !q.is_nil() {
                            self.sub_row(r2, &q, r)?;
                        }
                        if let Some(rem) = self.entry(r2, c) {
                            let k = rem.key();
                            if best.is_none_or(|(bk, _)| k < bk) {
                                best = Some((k, r2));
                            }
                        }
                        self.push(r2);
                    }
                    match best {
                        Some((_, r2)) => r = r2,
                        None => break,
                    }
                }
                // column c is now the pivot alone; reduce the rest of row r
                let p = self.entry(r, c).expect("pivot present").clone();
                if self.rows[r].iter().all(|(_, v)| p.divides(v)) {
                    self.pivots.push(p.to_big());
                    self.alive[r] = false;
                    break;
                }
                let row = std::mem::take(&mut self.rows[r]);
                let mut reduced = Vec::with_capacity(row.len());
                for (col, v) in row {
                    if col == c {
                        reduced.push((col, v));
                        continue;
                    }
                    let q = C::quot(&v, &p);
                    let rem = C::sub_mul(&v, &q, &p).ok_or(Overflow)?;
                    if !rem.is_nil() {
                        reduced.push((col, rem));
                    }
                }
                self.rows[r] = reduced;
                c = self.rows[r]
                    .iter()
                    .filter(|e| e.0 != c)
                    .min_by_key(|e| e.1.key())
                    .map(|e| e.0)
                    .expect("a remainder is left");
            }
        }
        Ok(SmithInvariants {
            rank: self.pivots.len(),
            torsion: invariant_factors(self.pivots),
        })
    }
}

/// Rank and torsion coefficients of `m`.
pub fn sparse_invariants(m: &SparseMatrix) -> SmithInvariants {
    match Eliminator::<i64>::new(m).run() {
        Ok(inv) => inv,
        Err(Overflow) => match Eliminator::<BigInt>::new(m).run() {
            Ok(inv) => inv,
            Err(Overflow) => unreachable!("big integers do not overflow"),
        },
    }
}

/// Turns the nonzero diagonal of an equivalent diagonal matrix into the
/// divisibility chain of invariant factors, dropping units.
pub fn invariant_factors(diag: Vec<BigInt>) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = diag.into_iter().map(|x| x.abs()).filter(|x| !x.is_one() && !x.is_zero()).collect();
    d.sort();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if !(&d[j] % &d[i]).is_zero() {
                let g = d[i].gcd(&d[j]);
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d.retain(|x| !x.is_one());
    d.sort();
    d
}

/// `S = U * M * V` with `S` diagonal, the diagonal a divisibility chain of
/// nonnegative entries, and `U`, `V` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn smith_normal_form(m: &[Vec<i64>]) -> SmithForm {
    let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    smith_normal_form_big(big, ncols)
}

pub fn smith_normal_form_big(mut a: Vec<Vec<BigInt>>, ncols: usize) -> SmithForm {
    let rows = a.len();
    let mut u = identity(rows);
    let mut v = identity(ncols);
    let mut rank = 0;

    fn row_sub(x: &mut [Vec<BigInt>], target: usize, q: &BigInt, src: usize) {
        let (t, s) = if target < src {
            let (lo, hi) = x.split_at_mut(src);
            (&mut lo[target], &hi[0])
        } else {
            let (lo, hi) = x.split_at_mut(target);
            (&mut hi[0], &lo[src])
        };
        for (tv, sv) in t.iter_mut().zip(s.iter()) {
            if !sv.is_zero() {
                *tv -= q * sv;
            }
        }
    }
    fn col_sub(x: &mut [Vec<BigInt>], target: usize, q: &BigInt, src: usize) {
        for row in x.iter_mut() {
            if !row[src].is_zero() {
                let d = q * &row[src];
                row[target] -= d;
            }
        }
    }
    fn col_swap(x: &mut [Vec<BigInt>], i: usize, j: usize) {
        for row in x.iter_mut() {
            row.swap(i, j);
        }
    }

    for t in 0..rows.min(ncols) {
        loop {
            let mut best: Option<(BigInt, usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero() && best.as_ref().is_none_or(|b| x.abs() < b.0) {
                        best = Some((x.abs(), i, j));
                    }
                }
            }
            let Some((_, pi, pj)) = best else {
                return finish(a, u, v, rank, rows, ncols);
            };
            a.swap(t, pi);
            u.swap(t, pi);
            col_swap(&mut a, t, pj);
            col_swap(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = &a[i][t] / &a[t][t];
                    row_sub(&mut a, i, &q, t);
                    row_sub(&mut u, i, &q, t);
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..ncols {
                if !a[t][j].is_zero() {
                    let q = &a[t][j] / &a[t][t];
                    col_sub(&mut a, j, &q, t);
                    col_sub(&mut v, j, &q, t);
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let p = a[t][t].clone();
            let offender = (t + 1..rows).find(|&i| a[i][t + 1..].iter().any(|x| !(x % &p).is_zero()));
            match offender {
                Some(i) => {
                    let minus_one = BigInt::from(-1);
                    row_sub(&mut a, t, &minus_one, i);
                    row_sub(&mut u, t, &minus_one, i);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        rank += 1;
    }
    finish(a, u, v, rank, rows, ncols)
}

fn finish(a: Vec<Vec<BigInt>>, u: Vec<Vec<BigInt>>, v: Vec<Vec<BigInt>>, rank: usize, rows: usize, ncols: usize) -> SmithForm {
    let diagonal = (0..rows.min(ncols)).map(|i| a[i][i].clone()).collect();
    SmithForm { diagonal, rank, u, v }
}
