use std::fmt;

use crate::ambient::{Ambient, AmbientCoproduct, AmbientPushout, Factorizing, Graded};
use crate::error::{Error, ParseError, Result};

use super::codec::{self, Cursor};
use super::MorphismCodec;

/// A `rows × cols` matrix over `F_p`, row-major; as a linear map it goes from
/// dimension `cols` to dimension `rows`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: u8,
    cols: u8,
    data: Vec<u8>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if rows > u8::MAX as usize || cols > u8::MAX as usize {
            return Err(Error::Invalid("dimensions are limited to 255".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Invalid(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows: rows as u8, cols: cols as u8, data })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows: rows as u8, cols: cols as u8, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows as usize
    }

    pub fn cols(&self) -> usize {
        self.cols as usize
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        let cols = self.cols();
        self.data[r * cols + c] = v;
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows()).map(|r| self.get(r, c)).collect()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&encode(self))
    }
}

pub(crate) fn encode(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m.get(r, c).to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    if m.rows() == 0 || m.cols() == 0 {
        format!("{}:{} []", m.cols, m.rows)
    } else {
        format!("{}:{} [{}]", m.cols, m.rows, rows.join(" / "))
    }
}

pub(crate) fn decode(text: &str, p: u8) -> std::result::Result<Matrix, ParseError> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    let dims = codec::optional_dims(&mut cur)?;
    cur.skip_ws();
    let bracketed = cur.eat('[');
    if dims.is_some() && !bracketed {
        return Err(cur.error("expected '['"));
    }
    let mut rows: Vec<Vec<u8>> = vec![Vec::new()];
    loop {
        cur.skip_ws();
        match cur.peek() {
            None if !bracketed => break,
            None => return Err(cur.error("expected ']'")),
            Some(']') if bracketed => {
                cur.eat(']');
                break;
            }
            Some('/') => {
                cur.eat('/');
                rows.push(Vec::new());
            }
            Some(c) if c.is_ascii_digit() => {
                let col = cur.column();
                let v = cur.number()?;
                if v >= p as usize {
                    return Err(ParseError::new(1, col, format!("entry {v} is not reduced modulo {p}")));
                }
                rows.last_mut().expect("at least one row").push(v as u8);
            }
            Some(_) => return Err(cur.error("unexpected character in matrix")),
        }
    }
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.error("trailing input"));
    }
    if rows.len() == 1 && rows[0].is_empty() {
        let (src, tgt) = dims.ok_or_else(|| ParseError::new(1, 1, "an empty matrix needs a 'src:tgt' prefix"))?;
        if src != 0 && tgt != 0 {
            return Err(ParseError::new(1, 1, format!("empty entry list for a {tgt}x{src} matrix")));
        }
        return Matrix::new(tgt, src, vec![]).map_err(|e| ParseError::new(1, 1, e.to_string()));
    }
    let width = rows[0].len();
    if let Some(bad) = rows.iter().position(|r| r.len() != width) {
        return Err(ParseError::new(1, 1, format!("row {} has {} entries, expected {width}", bad + 1, rows[bad].len())));
    }
    if let Some((src, tgt)) = dims {
        if src != width || tgt != rows.len() {
            return Err(ParseError::new(1, 1, format!("entries form a {}x{width} matrix, not {tgt}x{src}", rows.len())));
        }
    }
    let height = rows.len();
    let data: Vec<u8> = rows.into_iter().flatten().collect();
    Matrix::new(height, width, data).map_err(|e| ParseError::new(1, 1, e.to_string()))
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Finite-dimensional vector spaces over `F_p`, skeletal: the object `d` is
/// `F_p^d`.
#[derive(Clone, Debug)]
pub struct FpVect {
    p: u8,
    inverse: Vec<u8>,
}

impl FpVect {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) || p > 251 {
            return Err(Error::Invalid(format!("{p} is not a supported prime (need a prime below 256)")));
        }
        let p8 = p as u8;
        let inverse = (0..p8)
            .map(|a| if a == 0 { 0 } else { (1..p8).find(|&b| (a as u32 * b as u32) % p as u32 == 1).unwrap() })
            .collect();
        Ok(FpVect { p: p8, inverse })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    fn add(&self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.p as u16) as u8
    }

    fn mul(&self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    fn neg(&self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn multiply(&self, g: &Matrix, f: &Matrix) -> Matrix {
        assert_eq!(g.cols(), f.rows(), "matrices are not composable");
        let mut out = Matrix::zero(g.rows(), f.cols());
        for r in 0..g.rows() {
            for c in 0..f.cols() {
                let mut acc = 0u8;
                for k in 0..g.cols() {
                    acc = self.add(acc, self.mul(g.get(r, k), f.get(k, c)));
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Reduced row echelon form of the given rows; returns the nonzero rows
    /// and their pivot columns.
    pub fn rref(&self, mut rows: Vec<Vec<u8>>, width: usize) -> (Vec<Vec<u8>>, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..width {
            let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
            rows.swap(r, pr);
            let inv = self.inverse[rows[r][c] as usize];
            for x in rows[r].iter_mut() {
                *x = self.mul(*x, inv);
            }
            for i in 0..rows.len() {
                if i != r && rows[i][c] != 0 {
                    let factor = rows[i][c];
                    for k in 0..width {
                        let sub = self.mul(factor, rows[r][k]);
                        rows[i][k] = self.add(rows[i][k], self.neg(sub));
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        (rows, pivots)
    }

    pub fn rank(&self, m: &Matrix) -> usize {
        let rows: Vec<Vec<u8>> = (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c)).collect()).collect();
        self.rref(rows, m.cols()).1.len()
    }

    pub fn is_injective(&self, m: &Matrix) -> bool {
        self.rank(m) == m.cols()
    }

    pub fn is_surjective(&self, m: &Matrix) -> bool {
        self.rank(m) == m.rows()
    }

    pub fn is_invertible(&self, m: &Matrix) -> bool {
        m.rows() == m.cols() && self.is_injective(m)
    }

    fn horizontal(&self, parts: &[&Matrix], rows: usize) -> Matrix {
        let cols: usize = parts.iter().map(|m| m.cols()).sum();
        let mut out = Matrix::zero(rows, cols);
        let mut offset = 0;
        for m in parts {
            for r in 0..rows {
                for c in 0..m.cols() {
                    out.set(r, offset + c, m.get(r, c));
                }
            }
            offset += m.cols();
        }
        out
    }
}

impl Ambient for FpVect {
    type Obj = usize;
    type Mor = Matrix;

    fn name(&self) -> String {
        format!("Vect(F_{})", self.p)
    }

    fn source(&self, f: &Matrix) -> usize {
        f.cols()
    }

    fn target(&self, f: &Matrix) -> usize {
        f.rows()
    }

    fn identity(&self, x: &usize) -> Matrix {
        Matrix::identity(*x)
    }

    fn compose(&self, g: &Matrix, f: &Matrix) -> Matrix {
        self.multiply(g, f)
    }

    fn hom(&self, a: &usize, b: &usize) -> Vec<Matrix> {
        let n = a * b;
        let p = self.p as usize;
        let total = p.pow(n as u32);
        let mut out = Vec::with_capacity(total);
        let mut data = vec![0u8; n];
        for _ in 0..total {
            out.push(Matrix { rows: *b as u8, cols: *a as u8, data: data.clone() });
            for k in (0..n).rev() {
                if (data[k] as usize) < p - 1 {
                    data[k] += 1;
                    break;
                }
                data[k] = 0;
            }
        }
        out
    }

    fn initial(&self) -> usize {
        0
    }

    fn initial_map(&self, x: &usize) -> Matrix {
        Matrix::zero(*x, 0)
    }

    fn coproduct(&self, objs: &[usize]) -> Option<AmbientCoproduct<usize, Matrix>> {
        let apex: usize = objs.iter().sum();
        let mut offset = 0;
        let injections = objs
            .iter()
            .map(|&d| {
                let mut m = Matrix::zero(apex, d);
                for i in 0..d {
                    m.set(offset + i, i, 1);
                }
                offset += d;
                m
            })
            .collect();
        Some(AmbientCoproduct { apex, injections })
    }

    /// Cokernel of `[f; -g]`: the free columns of the reduced relation rows
    /// form the basis of the apex, `B`'s coordinates first.
    fn pushout(&self, f: &Matrix, g: &Matrix) -> Option<AmbientPushout<usize, Matrix>> {
        let (a, b, c) = (f.cols(), f.rows(), g.rows());
        let width = b + c;
        let relations: Vec<Vec<u8>> = (0..a)
            .map(|j| {
                let mut row = f.column(j);
                row.extend(g.column(j).into_iter().map(|v| self.neg(v)));
                row
            })
            .collect();
        let (reduced, pivots) = self.rref(relations, width);
        let free: Vec<usize> = (0..width).filter(|k| !pivots.contains(k)).collect();
        let apex = free.len();
        let mut q = Matrix::zero(apex, width);
        for (pos, &k) in free.iter().enumerate() {
            q.set(pos, k, 1);
        }
        for (row, &pc) in reduced.iter().zip(&pivots) {
            for (pos, &k) in free.iter().enumerate() {
                q.set(pos, pc, self.neg(row[k]));
            }
        }
        let mut leg_b = Matrix::zero(apex, b);
        let mut leg_c = Matrix::zero(apex, c);
        for r in 0..apex {
            for k in 0..b {
                leg_b.set(r, k, q.get(r, k));
            }
            for k in 0..c {
                leg_c.set(r, k, q.get(r, b + k));
            }
        }
        Some(AmbientPushout { apex, leg_from_b: leg_b, leg_from_c: leg_c })
    }

    fn copair(&self, po: &AmbientPushout<usize, Matrix>, b: &Matrix, c: &Matrix) -> Option<Matrix> {
        let q = self.horizontal(&[&po.leg_from_b, &po.leg_from_c], po.apex);
        let cocone = self.horizontal(&[b, c], b.rows());
        let mut h = Matrix::zero(b.rows(), po.apex);
        for pos in 0..po.apex {
            let k = (0..q.cols()).find(|&k| (0..po.apex).all(|r| q.get(r, k) == (r == pos) as u8))?;
            for r in 0..b.rows() {
                h.set(r, pos, cocone.get(r, k));
            }
        }
        (self.multiply(&h, &po.leg_from_b) == *b && self.multiply(&h, &po.leg_from_c) == *c).then_some(h)
    }

    fn copair_coproduct(&self, cp: &AmbientCoproduct<usize, Matrix>, legs: &[Matrix]) -> Option<Matrix> {
        let rows = legs.first()?.rows();
        let parts: Vec<&Matrix> = legs.iter().collect();
        let h = self.horizontal(&parts, rows);
        (h.cols() == cp.apex).then_some(h)
    }

    fn is_cofibration(&self, f: &Matrix) -> bool {
        self.is_injective(f)
    }

    fn is_weak_equivalence(&self, f: &Matrix) -> bool {
        self.is_invertible(f)
    }

    fn describe_object(&self, x: &usize) -> String {
        x.to_string()
    }

    fn describe_morphism(&self, f: &Matrix) -> String {
        encode(f)
    }
}

impl Graded for FpVect {
    fn rank(&self, x: &usize) -> usize {
        *x
    }

    fn objects_of_rank(&self, r: usize) -> Vec<usize> {
        vec![r]
    }
}

impl Factorizing for FpVect {
    fn in_right_class(&self, f: &Matrix) -> bool {
        self.is_surjective(f)
    }

    /// `F^x → F^x ⊕ F^z → F^z` by `[I; 0]` then `[f | I]`.
    fn factor(&self, f: &Matrix) -> (Matrix, Matrix) {
        let (x, z) = (f.cols(), f.rows());
        let mut c = Matrix::zero(x + z, x);
        for i in 0..x {
            c.set(i, i, 1);
        }
        let r = self.horizontal(&[f, &Matrix::identity(z)], z);
        (c, r)
    }
}

impl MorphismCodec for FpVect {
    fn encode(&self, f: &Matrix) -> String {
        encode(f)
    }

    fn decode(&self, text: &str) -> std::result::Result<Matrix, ParseError> {
        decode(text, self.p)
    }

    fn encode_object(&self, x: &usize) -> String {
        x.to_string()
    }

    fn decode_object(&self, text: &str) -> std::result::Result<usize, ParseError> {
        super::decode_size(text)
    }
}
