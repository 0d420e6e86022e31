use crate::ambient::{Ambient, AmbientCoproduct, AmbientPushout};

use super::cartesian;

/// A finite product of ambients of one type, structured componentwise. The
/// empty product is the terminal category.
pub struct Product<B: Ambient> {
    pub factors: Vec<B>,
}

impl<B: Ambient> Product<B> {
    pub fn new(factors: Vec<B>) -> Self {
        Product { factors }
    }

    fn zip<'a, T>(&'a self, xs: &'a [T]) -> impl Iterator<Item = (&'a B, &'a T)> + 'a {
        self.factors.iter().zip(xs)
    }
}

impl<B: Ambient> Ambient for Product<B> {
    type Obj = Vec<B::Obj>;
    type Mor = Vec<B::Mor>;

    fn name(&self) -> String {
        let names: Vec<String> = self.factors.iter().map(|b| b.name()).collect();
        format!("∏[{}]", names.join(", "))
    }

    fn source(&self, f: &Self::Mor) -> Self::Obj {
        self.zip(f).map(|(b, m)| b.source(m)).collect()
    }

    fn target(&self, f: &Self::Mor) -> Self::Obj {
        self.zip(f).map(|(b, m)| b.target(m)).collect()
    }

    fn identity(&self, x: &Self::Obj) -> Self::Mor {
        self.zip(x).map(|(b, o)| b.identity(o)).collect()
    }

    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor {
        self.factors.iter().zip(g.iter().zip(f)).map(|(b, (gi, fi))| b.compose(gi, fi)).collect()
    }

    fn hom(&self, x: &Self::Obj, y: &Self::Obj) -> Vec<Self::Mor> {
        let lists: Vec<Vec<B::Mor>> = self.factors.iter().zip(x.iter().zip(y)).map(|(b, (xi, yi))| b.hom(xi, yi)).collect();
        cartesian(&lists)
    }

    fn is_object(&self, x: &Self::Obj) -> bool {
        x.len() == self.factors.len() && self.zip(x).all(|(b, o)| b.is_object(o))
    }

    fn initial(&self) -> Self::Obj {
        self.factors.iter().map(|b| b.initial()).collect()
    }

    fn initial_map(&self, x: &Self::Obj) -> Self::Mor {
        self.zip(x).map(|(b, o)| b.initial_map(o)).collect()
    }

    fn coproduct(&self, objs: &[Self::Obj]) -> Option<AmbientCoproduct<Self::Obj, Self::Mor>> {
        let parts: Vec<AmbientCoproduct<B::Obj, B::Mor>> = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, b)| b.coproduct(&objs.iter().map(|x| x[i].clone()).collect::<Vec<_>>()))
            .collect::<Option<_>>()?;
        let injections = (0..objs.len()).map(|j| parts.iter().map(|p| p.injections[j].clone()).collect()).collect();
        Some(AmbientCoproduct { apex: parts.iter().map(|p| p.apex.clone()).collect(), injections })
    }

    fn pushout(&self, f: &Self::Mor, g: &Self::Mor) -> Option<AmbientPushout<Self::Obj, Self::Mor>> {
        let parts: Vec<AmbientPushout<B::Obj, B::Mor>> =
            self.factors.iter().zip(f.iter().zip(g)).map(|(b, (fi, gi))| b.pushout(fi, gi)).collect::<Option<_>>()?;
        Some(AmbientPushout {
            apex: parts.iter().map(|p| p.apex.clone()).collect(),
            leg_from_b: parts.iter().map(|p| p.leg_from_b.clone()).collect(),
            leg_from_c: parts.iter().map(|p| p.leg_from_c.clone()).collect(),
        })
    }

    fn copair(&self, po: &AmbientPushout<Self::Obj, Self::Mor>, b: &Self::Mor, c: &Self::Mor) -> Option<Self::Mor> {
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let part = AmbientPushout {
                    apex: po.apex[i].clone(),
                    leg_from_b: po.leg_from_b[i].clone(),
                    leg_from_c: po.leg_from_c[i].clone(),
                };
                f.copair(&part, &b[i], &c[i])
            })
            .collect()
    }

    fn is_cofibration(&self, f: &Self::Mor) -> bool {
        self.zip(f).all(|(b, m)| b.is_cofibration(m))
    }

    fn is_weak_equivalence(&self, f: &Self::Mor) -> bool {
        self.zip(f).all(|(b, m)| b.is_weak_equivalence(m))
    }

    fn describe_object(&self, x: &Self::Obj) -> String {
        let parts: Vec<String> = self.zip(x).map(|(b, o)| b.describe_object(o)).collect();
        format!("({})", parts.join(", "))
    }

    fn describe_morphism(&self, f: &Self::Mor) -> String {
        let parts: Vec<String> = self.zip(f).map(|(b, m)| b.describe_morphism(m)).collect();
        format!("({})", parts.join(", "))
    }
}
