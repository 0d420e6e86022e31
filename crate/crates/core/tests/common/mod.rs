//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's own universality or lifting checks.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use waldcheck::backends::{Matrix, PointedMap};
use waldcheck::classes::MorphismClass;
use waldcheck::fincat;
use waldcheck::quiver::{Quiver, Vertex};
use waldcheck::{FinCategory, MorId, ObjId};

pub fn pm(src: usize, tgt: usize, table: &[u8]) -> PointedMap {
    PointedMap::new(src, tgt, table.to_vec()).expect("valid pointed map")
}

pub fn mat(rows: usize, cols: usize, data: &[u8]) -> Matrix {
    Matrix::new(rows, cols, data.to_vec()).expect("valid matrix")
}

/// Every cocone `(b, c)` under `(f, g)` factors through `(lb, lc)` exactly
/// once.
pub fn is_universal_cocone(cat: &FinCategory, f: MorId, g: MorId, lb: MorId, lc: MorId) -> bool {
    if cat.compose(lb, f) != cat.compose(lc, g) {
        return false;
    }
    let apex = cat.target(lb);
    let (b_obj, c_obj) = (cat.target(f), cat.target(g));
    for q in cat.objects() {
        for &b in cat.hom(b_obj, q) {
            for &c in cat.hom(c_obj, q) {
                if cat.compose(b, f) != cat.compose(c, g) {
                    continue;
                }
                let through = cat
                    .hom(apex, q)
                    .iter()
                    .filter(|&&h| cat.compose(h, lb) == b && cat.compose(h, lc) == c)
                    .count();
                if through != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Every family of maps out of the summands factors through the injections
/// exactly once.
pub fn is_universal_coproduct(cat: &FinCategory, summands: &[ObjId], injections: &[MorId]) -> bool {
    let apex = match injections.first() {
        Some(&i) => cat.target(i),
        None => return summands.is_empty(),
    };
    for q in cat.objects() {
        let choices: Vec<&[MorId]> = summands.iter().map(|&x| cat.hom(x, q)).collect();
        let mut idx = vec![0usize; choices.len()];
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        loop {
            let legs: Vec<MorId> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            let through = cat
                .hom(apex, q)
                .iter()
                .filter(|&&h| injections.iter().zip(&legs).all(|(&inj, &l)| cat.compose(h, inj) == l))
                .count();
            if through != 1 {
                return false;
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    true
}

/// Some morphism in both directions composes to the identities.
pub fn isomorphic(cat: &FinCategory, x: ObjId, y: ObjId) -> bool {
    cat.hom(x, y).iter().any(|&f| {
        cat.hom(y, x)
            .iter()
            .any(|&g| cat.compose(g, f) == cat.identity(x) && cat.compose(f, g) == cat.identity(y))
    })
}

pub fn is_invertible(cat: &FinCategory, f: MorId) -> bool {
    let (x, y) = (cat.source(f), cat.target(f));
    cat.hom(y, x)
        .iter()
        .any(|&g| cat.compose(g, f) == cat.identity(x) && cat.compose(f, g) == cat.identity(y))
}

/// Every square `r∘u = v∘l` has a diagonal.
pub fn lifts(cat: &FinCategory, l: MorId, r: MorId) -> bool {
    let (a, b) = (cat.source(l), cat.target(l));
    let (x, y) = (cat.source(r), cat.target(r));
    cat.hom(a, x).iter().all(|&u| {
        cat.hom(b, y).iter().all(|&v| {
            cat.compose(r, u) != cat.compose(v, l)
                || cat.hom(b, x).iter().any(|&t| cat.compose(t, l) == u && cat.compose(r, t) == v)
        })
    })
}

/// Number of elements other than `*` in the pushout of pointed maps
/// `f: A → B`, `g: A → C`, by union-find on `B ⊔ C`.
pub fn pset_pushout_size(f: &PointedMap, g: &PointedMap) -> usize {
    let (nb, nc) = (f.tgt(), g.tgt());
    // 0 is the shared basepoint, 1..=nb is B, nb+1..=nb+nc is C.
    let mut parent: Vec<usize> = (0..=nb + nc).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let embed_c = |v: usize| if v == 0 { 0 } else { nb + v };
    for a in 1..=f.src() {
        let (x, y) = (f.apply(a), embed_c(g.apply(a)));
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        parent[rx.max(ry)] = rx.min(ry);
    }
    let roots: BTreeSet<usize> = (0..=nb + nc).map(|x| find(&mut parent, x)).collect();
    roots.len() - 1
}

/// Rank over `F_p` by elimination on a row-major copy.
pub fn rank_mod(p: u64, rows: usize, cols: usize, data: &[u8]) -> usize {
    let p = p as u32;
    let mut m: Vec<Vec<u32>> = (0..rows).map(|r| (0..cols).map(|c| data[r * cols + c] as u32 % p).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, pivot);
        let inv = (1..p).find(|&k| m[rank][c] * k % p == 1).expect("nonzero entries are invertible");
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let k = m[r][c];
                for j in 0..cols {
                    m[r][j] = (m[r][j] + p * p - k * m[rank][j]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Kahn's algorithm: a quiver is acyclic when every vertex can be removed
/// after all of its predecessors.
pub fn kahn_acyclic(q: &Quiver) -> bool {
    let mut indegree: HashMap<Vertex, usize> = q.vertices().iter().map(|&v| (v, 0)).collect();
    for a in q.arrows() {
        *indegree.get_mut(&a.target).unwrap() += 1;
    }
    let mut ready: Vec<Vertex> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let mut removed = 0;
    while let Some(v) = ready.pop() {
        removed += 1;
        for a in q.arrows().iter().filter(|a| a.source == v) {
            let d = indegree.get_mut(&a.target).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(a.target);
            }
        }
    }
    removed == q.vertices().len()
}

/// `V_0 = ∅`, `V_{μ+1}` the vertices all of whose incoming arrows start in
/// `V_μ`, until the sequence stops growing.
pub fn stages_by_definition(q: &Quiver) -> Vec<BTreeSet<Vertex>> {
    let mut stages = vec![BTreeSet::new()];
    loop {
        let last = stages.last().unwrap();
        let next: BTreeSet<Vertex> = q
            .vertices()
            .iter()
            .copied()
            .filter(|&v| q.arrows().iter().filter(|a| a.target == v).all(|a| last.contains(&a.source)))
            .collect();
        if &next == last {
            return stages;
        }
        stages.push(next);
    }
}

/// Quiver with vertices `1..=n` and one arrow per `(source, target)` pair.
pub fn quiver_from_pairs(n: u32, pairs: &[(u32, u32)]) -> Quiver {
    let arrows: Vec<(u32, u32, u32)> = pairs.iter().enumerate().map(|(k, &(s, t))| (k as u32 + 1, s, t)).collect();
    Quiver::new(1..=n, arrows).expect("endpoints are vertices")
}

/// Pushouts of members along `along` (every morphism when `None`) that exist
/// in the window have a member as opposite leg, and coproducts of two members
/// are members.
pub fn assert_closed(cat: &FinCategory, class: &MorphismClass, along: Option<&MorphismClass>) {
    for m in class.iter() {
        for &g in cat.outgoing(cat.source(m)) {
            if along.is_some_and(|a| !a.contains(g)) {
                continue;
            }
            if let Some(po) = fincat::pushout(cat, m, g) {
                assert!(class.contains(po.leg_from_c), "pushout of {m} along {g}");
            }
        }
    }
    for m1 in class.iter() {
        for m2 in class.iter() {
            let (Some(src), Some(tgt)) = (
                fincat::coproduct(cat, &[cat.source(m1), cat.source(m2)]),
                fincat::coproduct(cat, &[cat.target(m1), cat.target(m2)]),
            ) else {
                continue;
            };
            let legs = [cat.compose(tgt.injections[0], m1), cat.compose(tgt.injections[1], m2)];
            let sum: Vec<MorId> = cat
                .hom(src.apex, tgt.apex)
                .iter()
                .copied()
                .filter(|&h| src.injections.iter().zip(&legs).all(|(&i, &l)| cat.compose(h, i) == l))
                .collect();
            assert_eq!(sum.len(), 1);
            assert!(class.contains(sum[0]), "coproduct of {m1} and {m2}");
        }
    }
}
