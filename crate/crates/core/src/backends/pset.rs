use std::fmt;

use crate::ambient::{Ambient, AmbientCoproduct, AmbientPushout, Factorizing, Graded};
use crate::error::{Error, ParseError, Result};

use super::codec::{self, Cursor};
use super::MorphismCodec;

/// A basepoint-preserving map `{*, 1..src} → {*, 1..tgt}`; `table[i - 1]` is
/// the image of `i`, with 0 standing for `*`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointedMap {
    src: u8,
    tgt: u8,
    table: Vec<u8>,
}

impl PointedMap {
    pub fn new(src: usize, tgt: usize, table: Vec<u8>) -> Result<Self> {
        if src > u8::MAX as usize || tgt > u8::MAX as usize {
            return Err(Error::Invalid("pointed sets are limited to 255 elements".into()));
        }
        if table.len() != src {
            return Err(Error::Invalid(format!("table of length {} for a source of size {src}", table.len())));
        }
        if let Some(&bad) = table.iter().find(|&&v| v as usize > tgt) {
            return Err(Error::Invalid(format!("image {bad} outside a target of size {tgt}")));
        }
        Ok(PointedMap { src: src as u8, tgt: tgt as u8, table })
    }

    pub fn identity(n: usize) -> Self {
        PointedMap { src: n as u8, tgt: n as u8, table: (1..=n as u8).collect() }
    }

    pub fn src(&self) -> usize {
        self.src as usize
    }

    pub fn tgt(&self) -> usize {
        self.tgt as usize
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// Image of `i`, where 0 is the basepoint.
    pub fn apply(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.table[i - 1] as usize
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.tgt() + 1];
        for &v in &self.table {
            if v == 0 || seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        true
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.tgt() + 1];
        for &v in &self.table {
            seen[v as usize] = true;
        }
        seen[1..].iter().all(|&b| b)
    }

    pub fn is_bijective(&self) -> bool {
        self.src == self.tgt && self.is_injective()
    }

    pub fn then(&self, g: &PointedMap) -> PointedMap {
        assert_eq!(self.tgt, g.src, "pointed maps are not composable");
        let table = self.table.iter().map(|&v| if v == 0 { 0 } else { g.table[v as usize - 1] }).collect();
        PointedMap { src: self.src, tgt: g.tgt, table }
    }
}

impl fmt::Debug for PointedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&encode(self))
    }
}

pub(crate) fn encode(m: &PointedMap) -> String {
    let pairs: Vec<String> = m
        .table
        .iter()
        .enumerate()
        .map(|(i, &v)| if v == 0 { format!("{}->*", i + 1) } else { format!("{}->{}", i + 1, v) })
        .collect();
    format!("{}:{} [{}]", m.src, m.tgt, pairs.join(","))
}

pub(crate) fn decode(text: &str) -> std::result::Result<PointedMap, ParseError> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    let dims = codec::optional_dims(&mut cur)?;
    cur.skip_ws();
    cur.expect('[')?;
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    cur.skip_ws();
    if !cur.eat(']') {
        loop {
            cur.skip_ws();
            let col = cur.column();
            let from = codec::point(&mut cur)?;
            cur.skip_ws();
            if !cur.eat_str("->") && !cur.eat('↦') {
                return Err(cur.error("expected '->'"));
            }
            cur.skip_ws();
            let to = codec::point(&mut cur)?;
            match from {
                None if to.is_some() => return Err(ParseError::new(1, col, "the basepoint must map to the basepoint")),
                None => {}
                Some(i) => pairs.push((i, to.unwrap_or(0), col)),
            }
            cur.skip_ws();
            if cur.eat(',') {
                continue;
            }
            if cur.eat(']') {
                break;
            }
            return Err(cur.error("expected ',' or ']'"));
        }
    }
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.error("trailing input"));
    }
    let inferred_src = pairs.len();
    let (src, tgt) = match dims {
        Some(d) => d,
        None => (inferred_src, pairs.iter().map(|p| p.1).max().unwrap_or(0)),
    };
    let mut table = vec![None; src];
    for &(i, j, col) in &pairs {
        if i == 0 || i > src {
            return Err(ParseError::new(1, col, format!("element {i} outside a source of size {src}")));
        }
        if j > tgt {
            return Err(ParseError::new(1, col, format!("image {j} outside a target of size {tgt}")));
        }
        if table[i - 1].replace(j as u8).is_some() {
            return Err(ParseError::new(1, col, format!("element {i} assigned twice")));
        }
    }
    let table: Option<Vec<u8>> = table.into_iter().collect();
    let table = table.ok_or_else(|| ParseError::new(1, 1, "every element of the source needs an image"))?;
    PointedMap::new(src, tgt, table).map_err(|e| ParseError::new(1, 1, e.to_string()))
}

/// Finite pointed sets, skeletal: the object `k` is `{*, 1..k}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct PointedSets;

impl Ambient for PointedSets {
    type Obj = usize;
    type Mor = PointedMap;

    fn name(&self) -> String {
        "PSet".into()
    }

    fn source(&self, f: &PointedMap) -> usize {
        f.src()
    }

    fn target(&self, f: &PointedMap) -> usize {
        f.tgt()
    }

    fn identity(&self, x: &usize) -> PointedMap {
        PointedMap::identity(*x)
    }

    fn compose(&self, g: &PointedMap, f: &PointedMap) -> PointedMap {
        f.then(g)
    }

    fn hom(&self, a: &usize, b: &usize) -> Vec<PointedMap> {
        let (a, b) = (*a, *b);
        let total = (b + 1).pow(a as u32);
        let mut out = Vec::with_capacity(total);
        let mut table = vec![0u8; a];
        for _ in 0..total {
            out.push(PointedMap { src: a as u8, tgt: b as u8, table: table.clone() });
            for k in (0..a).rev() {
                if (table[k] as usize) < b {
                    table[k] += 1;
                    break;
                }
                table[k] = 0;
            }
        }
        out
    }

    fn initial(&self) -> usize {
        0
    }

    fn initial_map(&self, x: &usize) -> PointedMap {
        PointedMap { src: 0, tgt: *x as u8, table: vec![] }
    }

    fn coproduct(&self, objs: &[usize]) -> Option<AmbientCoproduct<usize, PointedMap>> {
        let apex: usize = objs.iter().sum();
        let mut offset = 0u8;
        let injections = objs
            .iter()
            .map(|&k| {
                let table = (1..=k as u8).map(|i| i + offset).collect();
                offset += k as u8;
                PointedMap { src: k as u8, tgt: apex as u8, table }
            })
            .collect();
        Some(AmbientCoproduct { apex, injections })
    }

    fn pushout(&self, f: &PointedMap, g: &PointedMap) -> Option<AmbientPushout<usize, PointedMap>> {
        let (b, c) = (f.tgt(), g.tgt());
        // nodes: 0 basepoint, 1..=b for B, b+1..=b+c for C
        let mut parent: Vec<usize> = (0..=b + c).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        for a in 1..=f.src() {
            let x = f.apply(a);
            let y = match g.apply(a) {
                0 => 0,
                j => b + j,
            };
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            if rx != ry {
                let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
                parent[hi] = lo;
            }
        }
        let mut label = vec![usize::MAX; b + c + 1];
        let base = find(&mut parent, 0);
        label[base] = 0;
        let mut next = 0usize;
        let order = (b + 1..=b + c).chain(1..=b);
        for node in order {
            let r = find(&mut parent, node);
            if label[r] == usize::MAX {
                next += 1;
                label[r] = next;
            }
        }
        let mut leg = |range: std::ops::RangeInclusive<usize>| -> Vec<u8> {
            range.map(|node| label[find(&mut parent, node)] as u8).collect()
        };
        let leg_b = leg(1..=b);
        let leg_c = leg(b + 1..=b + c);
        Some(AmbientPushout {
            apex: next,
            leg_from_b: PointedMap { src: b as u8, tgt: next as u8, table: leg_b },
            leg_from_c: PointedMap { src: c as u8, tgt: next as u8, table: leg_c },
        })
    }

    fn copair(&self, po: &AmbientPushout<usize, PointedMap>, b: &PointedMap, c: &PointedMap) -> Option<PointedMap> {
        let mut table = vec![0u8; po.apex];
        for (leg, map) in [(&po.leg_from_b, b), (&po.leg_from_c, c)] {
            for i in 1..=leg.src() {
                let l = leg.apply(i);
                if l > 0 {
                    table[l - 1] = map.apply(i) as u8;
                }
            }
        }
        let h = PointedMap { src: po.apex as u8, tgt: b.tgt as u8, table };
        (po.leg_from_b.then(&h) == *b && po.leg_from_c.then(&h) == *c).then_some(h)
    }

    fn copair_coproduct(&self, cp: &AmbientCoproduct<usize, PointedMap>, legs: &[PointedMap]) -> Option<PointedMap> {
        let tgt = legs.first()?.tgt;
        let mut table = vec![0u8; cp.apex];
        for (inj, leg) in cp.injections.iter().zip(legs) {
            for i in 1..=inj.src() {
                table[inj.apply(i) - 1] = leg.apply(i) as u8;
            }
        }
        Some(PointedMap { src: cp.apex as u8, tgt, table })
    }

    fn is_cofibration(&self, f: &PointedMap) -> bool {
        f.is_injective()
    }

    fn is_weak_equivalence(&self, f: &PointedMap) -> bool {
        f.is_bijective()
    }

    fn describe_object(&self, x: &usize) -> String {
        x.to_string()
    }

    fn describe_morphism(&self, f: &PointedMap) -> String {
        encode(f)
    }
}

impl Graded for PointedSets {
    fn rank(&self, x: &usize) -> usize {
        *x
    }

    fn objects_of_rank(&self, r: usize) -> Vec<usize> {
        vec![r]
    }
}

impl Factorizing for PointedSets {
    fn in_right_class(&self, f: &PointedMap) -> bool {
        f.is_surjective()
    }

    /// `X → X ∨ Z → Z`: include `X`, then map `X` by `f` and `Z` identically.
    fn factor(&self, f: &PointedMap) -> (PointedMap, PointedMap) {
        let (x, z) = (f.src(), f.tgt());
        let c = PointedMap { src: x as u8, tgt: (x + z) as u8, table: (1..=x as u8).collect() };
        let mut table = f.table.clone();
        table.extend(1..=z as u8);
        let r = PointedMap { src: (x + z) as u8, tgt: z as u8, table };
        (c, r)
    }
}

impl MorphismCodec for PointedSets {
    fn encode(&self, f: &PointedMap) -> String {
        encode(f)
    }

    fn decode(&self, text: &str) -> std::result::Result<PointedMap, ParseError> {
        decode(text)
    }

    fn encode_object(&self, x: &usize) -> String {
        x.to_string()
    }

    fn decode_object(&self, text: &str) -> std::result::Result<usize, ParseError> {
        super::decode_size(text)
    }
}
