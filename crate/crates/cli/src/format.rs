//! Line-oriented documents: a `key: value` header followed by sections. A
//! section starts with an upper-case name on a line of its own; each later
//! line is one row. Blank lines and lines starting with `#` are ignored.
//!
//! The canonical rendering is the header, then for every section a blank
//! line, the section name and its rows. Canonical text round-trips byte for
//! byte through [`Document::parse`] and [`Document::emit`].

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::Arc;

use waldcheck::backends::MorphismCodec;
use waldcheck::classes::MorphismClass;
use waldcheck::opfib::{Lift, OpfibrationData};
use waldcheck::quiver::Quiver;
use waldcheck::repcat::{Rep, RepCat, RepMor, Representation};
use waldcheck::waldhausen::WaldhausenStructure;
use waldcheck::{FinCategory, Functor, MorId, ObjId, ParseError};

type Parsed<T> = std::result::Result<T, ParseError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub line: usize,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub rows: Vec<Row>,
}

impl Section {
    pub fn new(name: &str, rows: impl IntoIterator<Item = String>) -> Self {
        Section { name: name.into(), line: 0, rows: rows.into_iter().map(|text| Row { line: 0, text }).collect() }
    }

    pub fn marker(name: &str) -> Self {
        Section::new(name, [])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub header: Vec<(String, String)>,
    pub sections: Vec<Section>,
}

fn is_section_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

impl Document {
    pub fn new(kind: &str, name: &str) -> Self {
        Document { header: vec![("kind".into(), kind.into()), ("name".into(), name.into())], sections: Vec::new() }
    }

    pub fn parse(text: &str) -> Parsed<Self> {
        let mut doc = Document { header: Vec::new(), sections: Vec::new() };
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if is_section_name(trimmed) {
                doc.sections.push(Section { name: trimmed.into(), line, rows: Vec::new() });
                continue;
            }
            match doc.sections.last_mut() {
                Some(s) => s.rows.push(Row { line, text: trimmed.into() }),
                None => {
                    let (key, value) = trimmed
                        .split_once(':')
                        .ok_or_else(|| ParseError::new(line, 1, "expected 'key: value' in the header"))?;
                    let key = key.trim();
                    if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c == '_') {
                        return Err(ParseError::new(line, 1, format!("'{key}' is not a header key")));
                    }
                    if doc.field(key).is_some() {
                        return Err(ParseError::new(line, 1, format!("header key '{key}' repeats")));
                    }
                    doc.header.push((key.into(), value.trim().into()));
                }
            }
        }
        if doc.field("kind").is_none() {
            return Err(ParseError::new(1, 1, "missing 'kind' header"));
        }
        Ok(doc)
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(v);
            out.push('\n');
        }
        for s in &self.sections {
            out.push('\n');
            out.push_str(&s.name);
            out.push('\n');
            for r in &s.rows {
                out.push_str(&r.text);
                out.push('\n');
            }
        }
        out
    }

    pub fn field(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.header.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.header.push((key.into(), value)),
        }
    }

    pub fn kind(&self) -> &str {
        self.field("kind").unwrap_or("")
    }

    pub fn name(&self) -> &str {
        self.field("name").unwrap_or("")
    }

    pub fn bounds(&self) -> Option<&str> {
        self.field("bounds")
    }

    pub fn expect_kind(&self, kind: &str) -> Parsed<()> {
        if self.kind() == kind {
            Ok(())
        } else {
            Err(ParseError::new(1, 1, format!("expected a {kind} document, found kind '{}'", self.kind())))
        }
    }

    pub fn number_field<T: FromStr>(&self, key: &str) -> Parsed<Option<T>> {
        self.field(key)
            .map(|v| v.parse().map_err(|_| ParseError::new(self.header_line(key), 1, format!("'{v}' is not a valid {key}"))))
            .transpose()
    }

    fn header_line(&self, key: &str) -> usize {
        self.header.iter().position(|(k, _)| k == key).map_or(1, |i| i + 1)
    }
}

/// Locates named sections in order, so that a section name can repeat under
/// different markers.
struct Sections<'a> {
    all: &'a [Section],
    pos: usize,
}

impl<'a> Sections<'a> {
    fn new(all: &'a [Section]) -> Self {
        Sections { all, pos: 0 }
    }

    fn take(&mut self, name: &str) -> Parsed<&'a Section> {
        match self.all.get(self.pos) {
            Some(s) if s.name == name => {
                self.pos += 1;
                Ok(s)
            }
            Some(s) => Err(ParseError::new(s.line, 1, format!("expected section {name}, found {}", s.name))),
            None => {
                let line = self.all.last().map_or(1, |s| s.rows.last().map_or(s.line, |r| r.line) + 1);
                Err(ParseError::new(line, 1, format!("missing section {name}")))
            }
        }
    }

    fn marker(&mut self, name: &str) -> Parsed<()> {
        let s = self.take(name)?;
        match s.rows.first() {
            Some(r) => Err(ParseError::new(r.line, 1, format!("{name} takes no rows"))),
            None => Ok(()),
        }
    }

    fn finish(&self) -> Parsed<()> {
        match self.all.get(self.pos) {
            Some(s) => Err(ParseError::new(s.line, 1, format!("unexpected section {}", s.name))),
            None => Ok(()),
        }
    }
}

/// Whitespace-separated fields of a row, tracking columns.
pub struct Fields<'a> {
    row: &'a Row,
    pos: usize,
}

impl<'a> Fields<'a> {
    pub fn new(row: &'a Row) -> Self {
        Fields { row, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let rest = &self.row.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    pub fn column(&self) -> usize {
        self.row.text[..self.pos].chars().count() + 1
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.row.line, self.column(), message)
    }

    pub fn word(&mut self, what: &str) -> Parsed<&'a str> {
        self.skip_ws();
        let rest = &self.row.text[self.pos..];
        let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error(format!("missing {what}")));
        }
        let w = &rest[..len];
        self.pos += len;
        Ok(w)
    }

    pub fn number<T: FromStr>(&mut self, what: &str) -> Parsed<T> {
        self.skip_ws();
        let col = self.column();
        let w = self.word(what)?;
        w.parse().map_err(|_| ParseError::new(self.row.line, col, format!("'{w}' is not a valid {what}")))
    }

    /// The remainder of the row and its starting column.
    pub fn rest(&mut self) -> (&'a str, usize) {
        self.skip_ws();
        let col = self.column();
        let r = &self.row.text[self.pos..];
        self.pos = self.row.text.len();
        (r, col)
    }

    pub fn finish(&mut self) -> Parsed<()> {
        self.skip_ws();
        if self.pos < self.row.text.len() {
            Err(self.error("unexpected trailing text"))
        } else {
            Ok(())
        }
    }

    /// Runs a single-line decoder on the rest of the row, shifting its error
    /// position into the document.
    pub fn decode<T>(&mut self, what: &str, f: impl FnOnce(&str) -> Parsed<T>) -> Parsed<T> {
        let (text, col) = self.rest();
        if text.is_empty() {
            return Err(self.error(format!("missing {what}")));
        }
        f(text).map_err(|e| ParseError::new(self.row.line, col + e.column.saturating_sub(1), e.message))
    }
}

fn ids_line(ids: &[u32]) -> String {
    ids.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn check_sequential(row: &Row, got: u32, want: usize, what: &str) -> Parsed<()> {
    if got as usize == want {
        Ok(())
    } else {
        Err(ParseError::new(row.line, 1, format!("{what} ids must be 0, 1, 2, ... in order; expected {want}, found {got}")))
    }
}

fn with_label(mut s: String, label: &str) -> String {
    if !label.is_empty() {
        s.push(' ');
        s.push_str(label);
    }
    s
}

/// A finite category with two morphism classes, as tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryDoc {
    pub name: String,
    /// A backend (`pset:n` or `vect:p:d`) whose window the tables describe.
    pub bounds: Option<String>,
    /// Caps the verification budget.
    pub budget: Option<u64>,
    /// `(identity, label)` per object.
    pub objects: Vec<(u32, String)>,
    /// `(source, target, label)` per morphism.
    pub morphisms: Vec<(u32, u32, String)>,
    /// `(g, f, g∘f)` for every composable pair of non-identities.
    pub compose: Vec<(u32, u32, u32)>,
    pub cofibrations: Vec<u32>,
    pub weak_equivalences: Vec<u32>,
}

impl CategoryDoc {
    pub fn from_structure(name: &str, bounds: Option<String>, e: &WaldhausenStructure) -> Self {
        let cat = &*e.category;
        let objects = cat.objects().map(|o| (cat.identity(o).0, cat.object_label(o).to_string())).collect();
        let morphisms = cat.morphisms().map(|m| (cat.source(m).0, cat.target(m).0, cat.morphism_label(m))).collect();
        let mut compose = Vec::new();
        for f in cat.morphisms().filter(|&f| !cat.is_identity(f)) {
            for &g in cat.outgoing(cat.target(f)) {
                if !cat.is_identity(g) {
                    compose.push((g.0, f.0, cat.compose(g, f).0));
                }
            }
        }
        compose.sort_unstable();
        CategoryDoc {
            name: name.into(),
            bounds,
            budget: None,
            objects,
            morphisms,
            compose,
            cofibrations: e.cof.iter().map(|m| m.0).collect(),
            weak_equivalences: e.we.iter().map(|m| m.0).collect(),
        }
    }

    pub fn sections(&self) -> Vec<Section> {
        vec![
            Section::new(
                "OBJECTS",
                self.objects.iter().enumerate().map(|(i, (id, label))| with_label(format!("{i} {id}"), label)),
            ),
            Section::new(
                "MORPHISMS",
                self.morphisms.iter().enumerate().map(|(i, (s, t, label))| with_label(format!("{i} {s} {t}"), label)),
            ),
            Section::new("COMPOSE", self.compose.iter().map(|(g, f, h)| format!("{g} {f} {h}"))),
            Section::new(
                "CLASSES",
                [
                    format!("cofibrations: {}", ids_line(&self.cofibrations)),
                    format!("weak_equivalences: {}", ids_line(&self.weak_equivalences)),
                ]
                .map(|s| s.trim_end().to_string()),
            ),
        ]
    }

    pub fn to_document(&self) -> Document {
        let mut doc = Document::new("category", &self.name);
        if let Some(b) = &self.bounds {
            doc.set("bounds", b.clone());
        }
        if let Some(b) = self.budget {
            doc.set("budget", b.to_string());
        }
        doc.sections = self.sections();
        doc
    }

    pub fn from_document(doc: &Document) -> Parsed<Self> {
        doc.expect_kind("category")?;
        let mut secs = Sections::new(&doc.sections);
        let mut out = Self::read_sections(&mut secs, doc.name())?;
        secs.finish()?;
        out.bounds = doc.bounds().map(str::to_string);
        out.budget = doc.number_field("budget")?;
        Ok(out)
    }

    fn read_sections(secs: &mut Sections<'_>, name: &str) -> Parsed<Self> {
        let mut objects = Vec::new();
        for row in &secs.take("OBJECTS")?.rows {
            let mut f = Fields::new(row);
            check_sequential(row, f.number("object id")?, objects.len(), "object")?;
            let identity = f.number("identity id")?;
            objects.push((identity, f.rest().0.to_string()));
        }
        let mut morphisms = Vec::new();
        for row in &secs.take("MORPHISMS")?.rows {
            let mut f = Fields::new(row);
            check_sequential(row, f.number("morphism id")?, morphisms.len(), "morphism")?;
            let s = f.number("source id")?;
            let t = f.number("target id")?;
            morphisms.push((s, t, f.rest().0.to_string()));
        }
        let mut compose = Vec::new();
        for row in &secs.take("COMPOSE")?.rows {
            let mut f = Fields::new(row);
            let entry = (f.number("morphism id")?, f.number("morphism id")?, f.number("morphism id")?);
            f.finish()?;
            compose.push(entry);
        }
        let classes = secs.take("CLASSES")?;
        let mut found: HashMap<&str, Vec<u32>> = HashMap::new();
        for row in &classes.rows {
            let (key, ids) = row
                .text
                .split_once(':')
                .ok_or_else(|| ParseError::new(row.line, 1, "expected 'cofibrations: ids' or 'weak_equivalences: ids'"))?;
            let key = key.trim();
            if key != "cofibrations" && key != "weak_equivalences" {
                return Err(ParseError::new(row.line, 1, format!("unknown class '{key}'")));
            }
            let offset = key.len() + 1;
            let sub = Row { line: row.line, text: ids.to_string() };
            let mut f = Fields::new(&sub);
            let mut list = Vec::new();
            loop {
                f.skip_ws();
                if f.pos >= sub.text.len() {
                    break;
                }
                list.push(f.number("morphism id").map_err(|e| ParseError::new(e.line, e.column + offset, e.message))?);
            }
            if found.insert(if key == "cofibrations" { "cofibrations" } else { "weak_equivalences" }, list).is_some() {
                return Err(ParseError::new(row.line, 1, format!("class '{key}' repeats")));
            }
        }
        let mut class = |key: &str| {
            found.remove(key).ok_or_else(|| ParseError::new(classes.line, 1, format!("CLASSES lacks '{key}'")))
        };
        Ok(CategoryDoc {
            name: name.into(),
            bounds: None,
            budget: None,
            objects,
            morphisms,
            compose,
            cofibrations: class("cofibrations")?,
            weak_equivalences: class("weak_equivalences")?,
        })
    }

    /// The category the tables describe, validated.
    pub fn category(&self) -> waldcheck::Result<FinCategory> {
        let labels = self.objects.iter().map(|(_, l)| l.clone()).collect();
        let identities: Vec<MorId> = self.objects.iter().map(|&(id, _)| MorId(id)).collect();
        let ends: Vec<(ObjId, ObjId)> = self.morphisms.iter().map(|&(s, t, _)| (ObjId(s), ObjId(t))).collect();
        let is_identity = |m: MorId| identities.get(ends.get(m.index()).map_or(usize::MAX, |e| e.0.index())) == Some(&m);
        let table: HashMap<(u32, u32), u32> = self.compose.iter().map(|&(g, f, h)| ((g, f), h)).collect();
        let cat = FinCategory::from_table(labels, identities.clone(), &ends, |g, f| {
            if is_identity(f) {
                Some(g)
            } else if is_identity(g) {
                Some(f)
            } else {
                table.get(&(g.0, f.0)).map(|&h| MorId(h))
            }
        })?
        .with_morphism_labels(self.morphisms.iter().map(|(_, _, l)| l.clone()).collect())?;
        for &(g, f, _) in &self.compose {
            let (g, f) = (MorId(g), MorId(f));
            if g.index() >= cat.num_morphisms() || f.index() >= cat.num_morphisms() || cat.target(f) != cat.source(g) {
                return Err(waldcheck::Error::Malformed(format!("COMPOSE lists {}∘{}, which is not composable", g.0, f.0)));
            }
        }
        let report = waldcheck::fincat::validate_category(&cat);
        if !report.is_valid() {
            return Err(waldcheck::Error::Malformed(describe_invalid(&report)));
        }
        Ok(cat)
    }

    pub fn classes(&self, cat: &Arc<FinCategory>) -> waldcheck::Result<(MorphismClass, MorphismClass)> {
        let ids = |v: &[u32]| v.iter().map(|&m| MorId(m)).collect::<Vec<_>>();
        Ok((
            MorphismClass::from_ids(cat.clone(), ids(&self.cofibrations))?,
            MorphismClass::from_ids(cat.clone(), ids(&self.weak_equivalences))?,
        ))
    }
}

fn describe_invalid(r: &waldcheck::fincat::ValidationReport) -> String {
    if let Some((g, f)) = r.missing.first() {
        format!("composite {}∘{} is not listed", g.0, f.0)
    } else if let Some((g, f)) = r.out_of_range.first() {
        format!("composite {}∘{} is not a morphism", g.0, f.0)
    } else if let Some((g, f)) = r.wrong_endpoints.first() {
        format!("composite {}∘{} has the wrong endpoints", g.0, f.0)
    } else if let Some(f) = r.identity_violations.first() {
        format!("identities are not neutral for morphism {}", f.0)
    } else if let Some((h, g, f)) = r.associativity.first() {
        format!("composition is not associative at ({}, {}, {})", h.0, g.0, f.0)
    } else {
        "valid".into()
    }
}

/// A quiver as VERTICES and ARROWS (`id source target`) tables.
pub fn quiver_document(name: &str, q: &Quiver) -> Document {
    let mut doc = Document::new("quiver", name);
    doc.sections = vec![
        Section::new("VERTICES", q.vertices().iter().map(u32::to_string)),
        Section::new("ARROWS", q.arrows().iter().map(|a| format!("{} {} {}", a.id, a.source, a.target))),
    ];
    doc
}

pub fn parse_quiver(doc: &Document) -> Parsed<Quiver> {
    doc.expect_kind("quiver")?;
    let mut secs = Sections::new(&doc.sections);
    let vs = secs.take("VERTICES")?;
    let arrows = secs.take("ARROWS")?;
    secs.finish()?;
    let mut vertices = Vec::new();
    for row in &vs.rows {
        let mut f = Fields::new(row);
        vertices.push(f.number("vertex")?);
        f.finish()?;
    }
    let mut list = Vec::new();
    for row in &arrows.rows {
        let mut f = Fields::new(row);
        list.push((f.number("arrow id")?, f.number("source vertex")?, f.number("target vertex")?));
        f.finish()?;
    }
    let line = arrows.line.max(vs.line);
    Quiver::new(vertices, list).map_err(|e| ParseError::new(line, 1, e.to_string()))
}

fn rep_sections<A: MorphismCodec>(amb: &A, q: &Quiver, x: &Rep<A>) -> [Section; 2] {
    [
        Section::new(
            "ON_VERTICES",
            q.vertices().iter().zip(&x.on_vertices).map(|(v, o)| format!("{v} {}", amb.encode_object(o))),
        ),
        Section::new("ON_ARROWS", q.arrows().iter().zip(&x.on_arrows).map(|(a, m)| format!("{} {}", a.id, amb.encode(m)))),
    ]
}

/// Reads `id value` rows keyed by the given ids, in that order.
fn keyed<T>(section: &Section, keys: &[u32], what: &str, mut read: impl FnMut(&mut Fields<'_>) -> Parsed<T>) -> Parsed<Vec<T>> {
    let mut found: Vec<Option<T>> = keys.iter().map(|_| None).collect();
    for row in &section.rows {
        let mut f = Fields::new(row);
        let col = f.column();
        let k: u32 = f.number(what)?;
        let slot = keys
            .iter()
            .position(|&x| x == k)
            .ok_or_else(|| ParseError::new(row.line, col, format!("{what} {k} is not in the quiver")))?;
        if found[slot].is_some() {
            return Err(ParseError::new(row.line, col, format!("{what} {k} repeats")));
        }
        found[slot] = Some(read(&mut f)?);
    }
    found
        .into_iter()
        .zip(keys)
        .map(|(v, k)| v.ok_or_else(|| ParseError::new(section.line, 1, format!("{} has no row for {what} {k}", section.name))))
        .collect()
}

fn read_rep<A: MorphismCodec>(amb: &A, q: &Quiver, secs: &mut Sections<'_>) -> Parsed<Rep<A>> {
    let vs = secs.take("ON_VERTICES")?;
    let arrows = secs.take("ON_ARROWS")?;
    let on_vertices = keyed(vs, q.vertices(), "vertex", |f| f.decode("object", |t| amb.decode_object(t)))?;
    let ids: Vec<u32> = q.arrows().iter().map(|a| a.id).collect();
    let on_arrows = keyed(arrows, &ids, "arrow", |f| f.decode("morphism", |t| amb.decode(t)))?;
    Ok(Representation { on_vertices, on_arrows })
}

pub fn representation_document<A: MorphismCodec>(name: &str, bounds: &str, q: &Quiver, x: &Rep<A>, amb: &A) -> Document {
    let mut doc = Document::new("representation", name);
    doc.set("bounds", bounds);
    doc.sections = rep_sections(amb, q, x).into();
    doc
}

pub fn parse_representation<A: MorphismCodec>(doc: &Document, q: &Quiver, amb: &A) -> Parsed<Rep<A>> {
    doc.expect_kind("representation")?;
    let mut secs = Sections::new(&doc.sections);
    let x = read_rep(amb, q, &mut secs)?;
    secs.finish()?;
    Ok(x)
}

pub fn morphism_document<A: MorphismCodec>(name: &str, bounds: &str, q: &Quiver, f: &RepMor<A>, amb: &A) -> Document {
    let mut doc = Document::new("representation-morphism", name);
    doc.set("bounds", bounds);
    let mut sections = vec![Section::marker("SOURCE")];
    sections.extend(rep_sections(amb, q, &f.source));
    sections.push(Section::marker("TARGET"));
    sections.extend(rep_sections(amb, q, &f.target));
    sections.push(Section::new(
        "COMPONENTS",
        q.vertices().iter().zip(&f.components).map(|(v, m)| format!("{v} {}", amb.encode(m))),
    ));
    doc.sections = sections;
    doc
}

/// A morphism document's source, target and components, unchecked.
pub struct MorphismParts<A: MorphismCodec> {
    pub source: Rep<A>,
    pub target: Rep<A>,
    pub components: Vec<A::Mor>,
}

pub fn parse_morphism<A: MorphismCodec>(doc: &Document, q: &Quiver, amb: &A) -> Parsed<MorphismParts<A>> {
    doc.expect_kind("representation-morphism")?;
    let mut secs = Sections::new(&doc.sections);
    secs.marker("SOURCE")?;
    let source = read_rep(amb, q, &mut secs)?;
    secs.marker("TARGET")?;
    let target = read_rep(amb, q, &mut secs)?;
    let comps = secs.take("COMPONENTS")?;
    secs.finish()?;
    let components = keyed(comps, q.vertices(), "vertex", |f| f.decode("morphism", |t| amb.decode(t)))?;
    Ok(MorphismParts { source, target, components })
}

impl<A: MorphismCodec> MorphismParts<A> {
    /// Checks both representations and naturality.
    pub fn build(self, cat: &RepCat<A>) -> waldcheck::Result<RepMor<A>> {
        cat.check_representation(&self.source)?;
        cat.check_representation(&self.target)?;
        cat.morphism(Arc::new(self.source), Arc::new(self.target), self.components)
    }
}

/// A functor between two tabulated categories with a cleavage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpfibrationDoc {
    pub name: String,
    /// With `builtin`, names the backend whose builtin opfibration the
    /// tables describe.
    pub bounds: Option<String>,
    /// `codomain` or `domain`.
    pub builtin: Option<String>,
    pub total: CategoryDoc,
    pub base: CategoryDoc,
    pub p_objects: Vec<u32>,
    pub p_morphisms: Vec<u32>,
    /// `(u, x, lifting)`, sorted.
    pub cleavage: Vec<(u32, u32, u32)>,
}

impl OpfibrationDoc {
    pub fn from_data(name: &str, op: &OpfibrationData, total: &WaldhausenStructure, base: &WaldhausenStructure) -> Self {
        let p = op.functor();
        OpfibrationDoc {
            name: name.into(),
            bounds: None,
            builtin: None,
            total: CategoryDoc::from_structure("total", None, total),
            base: CategoryDoc::from_structure("base", None, base),
            p_objects: op.total().objects().map(|x| p.obj(x).0).collect(),
            p_morphisms: op.total().morphisms().map(|m| p.mor(m).0).collect(),
            cleavage: op.entries().into_iter().map(|((u, x), l)| (u.0, x.0, l.lifting.0)).collect(),
        }
    }

    pub fn to_document(&self) -> Document {
        let mut doc = Document::new("opfibration", &self.name);
        if let Some(b) = &self.bounds {
            doc.set("bounds", b.clone());
        }
        if let Some(b) = &self.builtin {
            doc.set("builtin", b.clone());
        }
        let mut s = vec![Section::marker("TOTAL")];
        s.extend(self.total.sections());
        s.push(Section::marker("BASE"));
        s.extend(self.base.sections());
        s.push(Section::new("P_OBJECTS", self.p_objects.iter().enumerate().map(|(t, b)| format!("{t} {b}"))));
        s.push(Section::new("P_MORPHISMS", self.p_morphisms.iter().enumerate().map(|(t, b)| format!("{t} {b}"))));
        s.push(Section::new("CLEAVAGE", self.cleavage.iter().map(|(u, x, l)| format!("{u} {x} {l}"))));
        doc.sections = s;
        doc
    }

    pub fn from_document(doc: &Document) -> Parsed<Self> {
        doc.expect_kind("opfibration")?;
        let mut secs = Sections::new(&doc.sections);
        secs.marker("TOTAL")?;
        let total = CategoryDoc::read_sections(&mut secs, "total")?;
        secs.marker("BASE")?;
        let base = CategoryDoc::read_sections(&mut secs, "base")?;
        let read_map = |s: &Section, what: &str| -> Parsed<Vec<u32>> {
            let mut out = Vec::new();
            for row in &s.rows {
                let mut f = Fields::new(row);
                check_sequential(row, f.number(what)?, out.len(), what)?;
                out.push(f.number("image id")?);
                f.finish()?;
            }
            Ok(out)
        };
        let p_objects = read_map(secs.take("P_OBJECTS")?, "object")?;
        let p_morphisms = read_map(secs.take("P_MORPHISMS")?, "morphism")?;
        let mut cleavage = Vec::new();
        for row in &secs.take("CLEAVAGE")?.rows {
            let mut f = Fields::new(row);
            cleavage.push((f.number("base morphism")?, f.number("total object")?, f.number("lifting")?));
            f.finish()?;
        }
        secs.finish()?;
        Ok(OpfibrationDoc {
            name: doc.name().into(),
            bounds: doc.bounds().map(str::to_string),
            builtin: doc.field("builtin").map(str::to_string),
            total,
            base,
            p_objects,
            p_morphisms,
            cleavage,
        })
    }

    /// The two structures and the opfibration, checked for functoriality and
    /// cleavage coverage.
    pub fn build(&self) -> waldcheck::Result<(WaldhausenStructure, WaldhausenStructure, OpfibrationData)> {
        let structure = |d: &CategoryDoc, which: &str| -> waldcheck::Result<WaldhausenStructure> {
            let cat = Arc::new(d.category().map_err(|e| waldcheck::Error::Malformed(format!("{which}: {e}")))?);
            let (cof, we) = d.classes(&cat)?;
            let initial = waldcheck::fincat::find_initial(&cat)
                .ok_or_else(|| waldcheck::Error::Invalid(format!("the {which} category has no initial object")))?;
            WaldhausenStructure::new(cat, cof, we, initial)
        };
        let total = structure(&self.total, "total")?;
        let base = structure(&self.base, "base")?;
        let p = Functor::new(
            total.category.clone(),
            base.category.clone(),
            self.p_objects.iter().map(|&b| ObjId(b)).collect(),
            self.p_morphisms.iter().map(|&b| MorId(b)).collect(),
        )?;
        if let Some(v) = p.violations().first() {
            return Err(waldcheck::Error::Malformed(format!("p is not a functor: {v:?}")));
        }
        let cleavage = self.cleavage_map(&total.category, &base.category)?;
        let op = OpfibrationData::new(p, cleavage)?;
        Ok((total, base, op))
    }
}

impl OpfibrationDoc {
    pub fn cleavage_map(&self, t: &FinCategory, b: &FinCategory) -> waldcheck::Result<HashMap<(MorId, ObjId), Lift>> {
        let mut cleavage = HashMap::new();
        for &(u, x, l) in &self.cleavage {
            if l as usize >= t.num_morphisms() || u as usize >= b.num_morphisms() || x as usize >= t.num_objects() {
                return Err(waldcheck::Error::Cleavage(format!("entry ({u}, {x}, {l}) refers to a missing id")));
            }
            let lifting = MorId(l);
            if cleavage.insert((MorId(u), ObjId(x)), Lift { target: t.target(lifting), lifting }).is_some() {
                return Err(waldcheck::Error::Cleavage(format!("entry ({u}, {x}) repeats")));
            }
        }
        Ok(cleavage)
    }
}

/// A set of morphism ids, one per MEMBERS row.
pub fn class_document(name: &str, class: &MorphismClass) -> Document {
    let mut doc = Document::new("morphism-class", name);
    doc.sections = vec![Section::new("MEMBERS", class.iter().map(|m| m.0.to_string()))];
    doc
}

pub fn parse_class(doc: &Document) -> Parsed<Vec<u32>> {
    doc.expect_kind("morphism-class")?;
    let mut secs = Sections::new(&doc.sections);
    let members = secs.take("MEMBERS")?;
    secs.finish()?;
    members
        .rows
        .iter()
        .map(|row| {
            let mut f = Fields::new(row);
            let m = f.number("morphism id")?;
            f.finish()?;
            Ok(m)
        })
        .collect()
}

/// A replacement lift for one cleavage entry, used to build defect fixtures:
/// the first morphism over `u` out of `x`, in id order, that differs from the
/// chosen lift and is not cocartesian.
pub fn non_cocartesian_lift(op: &OpfibrationData, u: MorId, x: ObjId) -> Option<MorId> {
    let current = op.lift(u, x).lifting;
    op.total()
        .outgoing(x)
        .iter()
        .copied()
        .find(|&m| m != current && op.functor().mor(m) == u && !op.is_cocartesian(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "kind: quiver\nname: fork\n\nVERTICES\n1\n2\n3\n\nARROWS\n1 1 3\n2 2 3\n";

    #[test]
    fn canonical_round_trip() {
        let doc = Document::parse(SAMPLE).unwrap();
        assert_eq!(doc.emit(), SAMPLE);
        assert_eq!(parse_quiver(&doc).unwrap(), Quiver::fork());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# a comment\nkind: quiver\nname: x\nVERTICES\n\n  1  \nARROWS\n";
        let doc = Document::parse(text).unwrap();
        assert_eq!(doc.sections[0].rows[0].text, "1");
        assert_eq!(doc.sections[0].rows[0].line, 6);
    }

    #[test]
    fn missing_kind() {
        let e = Document::parse("name: x\n").unwrap_err();
        assert!(e.message.contains("kind"));
    }

    #[test]
    fn bad_number_position() {
        let doc = Document::parse("kind: quiver\nname: q\n\nVERTICES\n1\n\nARROWS\n1 1 x\n").unwrap();
        let e = parse_quiver(&doc).unwrap_err();
        assert_eq!((e.line, e.column), (8, 5));
    }

    #[test]
    fn empty_label_stays_canonical() {
        let doc = CategoryDoc {
            name: "point".into(),
            bounds: None,
            budget: None,
            objects: vec![(0, String::new())],
            morphisms: vec![(0, 0, "id".into())],
            compose: vec![],
            cofibrations: vec![0],
            weak_equivalences: vec![],
        };
        let text = doc.to_document().emit();
        assert!(text.contains("\nOBJECTS\n0 0\n"));
        assert!(text.contains("weak_equivalences:\n"));
        let back = CategoryDoc::from_document(&Document::parse(&text).unwrap()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_document().emit(), text);
    }
}
