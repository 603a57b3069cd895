//! Presentations, abelian parabolic structure and word-problem oracles.

pub mod abelian;
pub mod oracle;
pub mod sensible;
pub mod snf;
pub mod word;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use abelian::{AbelianCoords, AbelianGroup};
pub use oracle::{
    infer_oracle, Element, Factor, FreeProductOracle, OracleKind, RewritingOracle, SubgroupOracle, Syllable,
    WordProblemOracle,
};
pub use sensible::{is_sensible, LatticePoint, SensibleGeneratingSet, SensibleLattice, TorsionTable};
pub use word::{commutator, Letter, Word};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinitePresentation {
    names: Vec<String>,
    relators: Vec<Word>,
}

impl FinitePresentation {
    /// Relators are freely reduced; trivial ones are dropped.
    pub fn new(names: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        word::validate_names(&names)?;
        let mut rels = Vec::with_capacity(relators.len());
        for r in relators {
            if r.max_generator().is_some_and(|g| g >= names.len()) {
                return Err(Error::validation("relator references an unknown generator"));
            }
            let r = r.free_reduce();
            if !r.is_empty() {
                rels.push(r);
            }
        }
        Ok(FinitePresentation { names, relators: rels })
    }

    pub fn parse(names: &[&str], relators: &[&str]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let rels = relators.iter().map(|r| Word::parse(r, &names)).collect::<Result<Vec<_>>>()?;
        Self::new(names, rels)
    }

    /// Generators named `x0, x1, ...`.
    pub fn anonymous(generator_count: usize, relators: Vec<Word>) -> Result<Self> {
        Self::new((0..generator_count).map(|i| format!("x{i}")).collect(), relators)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    /// Order-independent key: generator count and sorted canonical relators.
    pub fn canonical_key(&self) -> (usize, Vec<Word>) {
        let set: BTreeSet<Word> = self.relators.iter().map(|r| r.canonical_relator()).filter(|r| !r.is_empty()).collect();
        (self.generator_count(), set.into_iter().collect())
    }
}

impl fmt::Display for FinitePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| r.render(&self.names)).collect();
        write!(f, "<{} | {}>", self.names.join(", "), rels.join(", "))
    }
}

/// An abelian subgroup generated by ambient generators, with its sensible
/// generating set. Local generator `j` is ambient generator `generators[j]`.
#[derive(Clone, Debug)]
pub struct AbelianParabolic {
    pub generators: Vec<usize>,
    pub group: AbelianGroup,
    pub sensible: SensibleGeneratingSet,
    lattice: Arc<SensibleLattice>,
}

impl AbelianParabolic {
    pub fn new(generators: Vec<usize>, group: AbelianGroup, sensible: SensibleGeneratingSet) -> Result<Self> {
        if group.gen_count() != generators.len() {
            return Err(Error::validation("parabolic generator count mismatch"));
        }
        let lattice = Arc::new(SensibleLattice::new(&group, &sensible)?);
        Ok(AbelianParabolic { generators, group, sensible, lattice })
    }

    pub fn rank(&self) -> usize {
        self.group.free_rank()
    }

    pub fn lattice(&self) -> &SensibleLattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> Arc<SensibleLattice> {
        self.lattice.clone()
    }

    /// Image of each local generator as an ambient word.
    pub fn embedding(&self) -> Vec<Word> {
        self.generators.iter().map(|&g| Word(vec![Letter::pos(g)])).collect()
    }

    /// Rewrites an ambient word into local generators.
    pub fn localize(&self, w: &Word) -> Result<Word> {
        let pos: HashMap<usize, usize> = self.generators.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        w.letters()
            .iter()
            .map(|l| {
                pos.get(&l.gen)
                    .map(|&i| Letter::new(i, l.inv))
                    .ok_or_else(|| Error::validation(format!("letter x{} outside the parabolic", l.gen)))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Rewrites a local word into ambient generators.
    pub fn globalize(&self, w: &Word) -> Word {
        Word::from_letters(w.letters().iter().map(|l| Letter::new(self.generators[l.gen], l.inv)))
    }

    /// Ambient word of a lattice point.
    pub fn point_word(&self, p: &LatticePoint) -> Word {
        self.globalize(&self.lattice.word(p))
    }

    /// Lattice coordinates of an element of the parabolic, given by its key.
    pub fn locate(&self, oracle: &WordProblemOracle, e: &Element) -> Result<LatticePoint> {
        let w = oracle.root_word(e)?;
        let local = self.localize(&w).map_err(|_| {
            Error::Unsupported("element normal form is not written in the parabolic's generators".into())
        })?;
        self.lattice.locate(&self.group.coords_of(&local)?)
    }
}

/// Word in `p`'s generators to (free, torsion) coordinates with respect to
/// the sensible generating set. Torsion coordinates are exponents of `A2`
/// when `A2` is a cyclic basis, and invariant-factor coordinates otherwise.
pub fn normal_form_abelian(w: &Word, p: &AbelianParabolic) -> Result<(Vec<i64>, Vec<i64>)> {
    let c = p.group.coords_of(&p.localize(w)?)?;
    let pt = p.lattice().locate(&c)?;
    let t = p.lattice().torsion();
    let tors = match t.cyclic() {
        Some((_, tuples)) => tuples[pt.tors as usize].clone(),
        None => p.group.split(&c).1.to_vec(),
    };
    Ok((pt.free, tors))
}

/// Syllable decomposition; the ambient group must be a free product of
/// abelian groups.
pub fn free_product_normal_form(w: &Word, s: &RelativeStructure) -> Result<Vec<Syllable>> {
    s.oracle
        .as_free_product()
        .ok_or_else(|| Error::precondition("ambient group is not a declared free product"))?
        .normal_form(w)
}

pub fn validate_sensible(g: &SensibleGeneratingSet, p: &AbelianParabolic) -> bool {
    is_sensible(g, &p.group)
}

#[derive(Clone, Debug)]
pub struct RelativeStructure {
    pub ambient: FinitePresentation,
    pub parabolics: Vec<AbelianParabolic>,
    pub oracle: Arc<WordProblemOracle>,
    pub delta: Option<u64>,
    pub isoperimetric_k: Option<u64>,
}

impl RelativeStructure {
    /// Validates the structure against the oracle.
    pub fn new(
        ambient: FinitePresentation,
        parabolics: Vec<AbelianParabolic>,
        oracle: Arc<WordProblemOracle>,
        delta: Option<u64>,
        isoperimetric_k: Option<u64>,
    ) -> Result<Self> {
        if oracle.generator_count() != ambient.generator_count() {
            return Err(Error::validation("oracle and presentation disagree on generators"));
        }
        if delta == Some(0) || isoperimetric_k == Some(0) {
            return Err(Error::validation("delta and isoperimetric_K must be positive"));
        }
        for r in ambient.relators() {
            if !oracle.is_trivial(r)? {
                return Err(Error::validation(format!("relator {} is nontrivial under the oracle", r.render(ambient.names()))));
            }
        }
        for (i, p) in parabolics.iter().enumerate() {
            if p.generators.iter().any(|&g| g >= ambient.generator_count()) {
                return Err(Error::validation(format!("parabolics[{i}]: unknown generator")));
            }
            let set: BTreeSet<usize> = p.generators.iter().copied().collect();
            if set.len() != p.generators.len() {
                return Err(Error::validation(format!("parabolics[{i}]: repeated generator")));
            }
            let emb = p.embedding();
            for (a, x) in emb.iter().enumerate() {
                for y in &emb[a + 1..] {
                    let c = x.concat(y).concat(&x.inverse()).concat(&y.inverse());
                    if !oracle.is_trivial(&c)? {
                        return Err(Error::validation(format!("parabolics[{i}]: generators do not commute")));
                    }
                }
            }
            // relations of the local group must hold in the ambient group
            for (g, w) in local_relations(&p.group).iter().enumerate() {
                if !oracle.is_trivial(&p.globalize(w))? {
                    return Err(Error::validation(format!(
                        "parabolics[{i}]: relation {g} of the declared parabolic fails in the ambient group"
                    )));
                }
            }
            // sensible generators must be single parabolic generators covering the set
            let mut cover = BTreeSet::new();
            for w in p.sensible.a1.iter().chain(&p.sensible.a2) {
                match w.letters() {
                    [l] if !l.inv => {
                        cover.insert(l.gen);
                    }
                    _ => {
                        return Err(Error::validation(format!(
                            "parabolics[{i}]: A1 and A2 must be generator names"
                        )))
                    }
                }
            }
            if cover.len() != p.generators.len() {
                return Err(Error::validation(format!(
                    "parabolics[{i}]: A1 and A2 must together list every parabolic generator"
                )));
            }
        }
        Ok(RelativeStructure { ambient, parabolics, oracle, delta, isoperimetric_k })
    }

    /// Rejects structures that cannot be relatively hyperbolic: parabolics
    /// equal to the whole group, and abelian groups that are not virtually
    /// cyclic.
    pub fn check_admissible(&self) -> Result<()> {
        let n = self.ambient.generator_count();
        for (i, p) in self.parabolics.iter().enumerate() {
            if p.generators.len() == n {
                return Err(Error::validation(format!("parabolics[{i}]: a parabolic must be a proper subgroup")));
            }
        }
        if self.oracle.kind() == OracleKind::Abelian {
            if let Some(f) = self.oracle.as_free_product() {
                if !f.factors()[0].group.is_virtually_cyclic() {
                    return Err(Error::validation(
                        "a non-virtually-cyclic abelian group is not hyperbolic relative to proper subgroups",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Neither delta nor an isoperimetric constant was supplied.
    pub fn estimate_only(&self) -> bool {
        self.delta.is_none() && self.isoperimetric_k.is_none()
    }

    pub fn names(&self) -> &[String] {
        self.ambient.names()
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        Word::parse(s, self.names())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StructureDoc = serde_json::from_str(text).map_err(|e| Error::parse(format!("structure file: {e}")))?;
        doc.build()
    }

    pub fn to_doc(&self) -> StructureDoc {
        let names = self.names();
        StructureDoc {
            generators: names.to_vec(),
            relators: self.ambient.relators().iter().map(|r| r.render(names)).collect(),
            parabolics: self
                .parabolics
                .iter()
                .map(|p| ParabolicDoc {
                    generators: p.generators.iter().map(|&g| names[g].clone()).collect(),
                    a1: p.sensible.a1.iter().map(|w| p.globalize(w).render(names)).collect(),
                    a2: p.sensible.a2.iter().map(|w| p.globalize(w).render(names)).collect(),
                    relators: Some(local_relations(&p.group).iter().map(|w| p.globalize(w).render(names)).collect()),
                })
                .collect(),
            delta: self.delta,
            isoperimetric_k: self.isoperimetric_k,
            oracle: None,
        }
    }
}

/// Generating relations of an abelian group as local words: commutators and
/// the torsion relations in canonical coordinates.
fn local_relations(g: &AbelianGroup) -> Vec<Word> {
    let n = g.gen_count();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push(commutator(a, b));
        }
    }
    for (i, &d) in g.torsion_orders().iter().enumerate() {
        let mut c = g.zero();
        c.0[i] = 1;
        let w = g.word_of(&c);
        let mut p = Word::empty();
        for _ in 0..d {
            p = p.concat(&w);
        }
        out.push(p.free_reduce());
    }
    // each generator must equal the word of its own coordinates
    for a in 0..n {
        let w = g.word_of(&g.generator(a));
        out.push(Word(vec![Letter::pos(a)]).concat(&w.inverse()).free_reduce());
    }
    out.retain(|w| !w.is_empty());
    out
}

/// JSON input document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub generators: Vec<String>,
    #[serde(default)]
    pub relators: Vec<String>,
    #[serde(default)]
    pub parabolics: Vec<ParabolicDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<u64>,
    #[serde(default, rename = "isoperimetric_K", skip_serializing_if = "Option::is_none")]
    pub isoperimetric_k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParabolicDoc {
    pub generators: Vec<String>,
    #[serde(rename = "A1")]
    pub a1: Vec<String>,
    #[serde(rename = "A2", default)]
    pub a2: Vec<String>,
    /// Relations among the parabolic's generators; derived automatically for
    /// free-product oracles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relators: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleChoice {
    #[default]
    Auto,
    Abelian,
    Free,
    FreeProductOfAbelians,
    RewritingSystem,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDoc {
    pub kind: OracleChoice,
    /// Rewriting rules `[lhs, rhs]`.
    #[serde(default)]
    pub rules: Vec<[String; 2]>,
}

impl StructureDoc {
    pub fn build(&self) -> Result<RelativeStructure> {
        let names = self.generators.clone();
        let rels = self
            .relators
            .iter()
            .enumerate()
            .map(|(i, r)| Word::parse(r, &names).map_err(|e| e.at(format!("relators[{i}]"))))
            .collect::<Result<Vec<_>>>()?;
        let ambient = FinitePresentation::new(names.clone(), rels).map_err(|e| Error::validation(format!("generators: {e}")))?;
        let choice = self.oracle.as_ref().map_or(OracleChoice::Auto, |o| o.kind);
        let oracle = Arc::new(build_oracle(&ambient, choice, self.oracle.as_ref())?);
        let mut parabolics = Vec::with_capacity(self.parabolics.len());
        for (i, p) in self.parabolics.iter().enumerate() {
            parabolics.push(
                build_parabolic(&ambient, &oracle, p).map_err(|e| e.at(format!("parabolics[{i}]")))?,
            );
        }
        RelativeStructure::new(ambient, parabolics, oracle, self.delta, self.isoperimetric_k)
    }
}

fn build_oracle(p: &FinitePresentation, choice: OracleChoice, doc: Option<&OracleDoc>) -> Result<WordProblemOracle> {
    let n = p.generator_count();
    let recognized = || {
        FreeProductOracle::recognize(p)
            .ok_or_else(|| Error::validation("oracle.kind: presentation is not a visible free product of abelian groups"))
    };
    match choice {
        OracleChoice::Auto => infer_oracle(p),
        OracleChoice::Abelian => {
            let rels: Vec<Vec<i64>> = p.relators().iter().map(|r| r.exponent_vector(n)).collect();
            let group = AbelianGroup::from_relations(n, &rels)?;
            Ok(WordProblemOracle::FreeProduct(FreeProductOracle::new(n, vec![Factor { gens: (0..n).collect(), group }])?))
        }
        OracleChoice::Free => {
            if !p.relators().is_empty() {
                return Err(Error::validation("oracle.kind: a free group has no relators"));
            }
            Ok(WordProblemOracle::FreeProduct(recognized()?))
        }
        OracleChoice::FreeProductOfAbelians => Ok(WordProblemOracle::FreeProduct(recognized()?)),
        OracleChoice::RewritingSystem => {
            let rules = doc
                .map(|d| d.rules.as_slice())
                .unwrap_or_default()
                .iter()
                .enumerate()
                .map(|(i, [l, r])| {
                    Ok((
                        Word::parse(l, p.names()).map_err(|e| e.at(format!("oracle.rules[{i}]")))?,
                        Word::parse(r, p.names()).map_err(|e| e.at(format!("oracle.rules[{i}]")))?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(WordProblemOracle::Rewriting(RewritingOracle::new(n, rules)?))
        }
    }
}

fn build_parabolic(ambient: &FinitePresentation, oracle: &WordProblemOracle, p: &ParabolicDoc) -> Result<AbelianParabolic> {
    let names = ambient.names();
    let generators = p
        .generators
        .iter()
        .map(|g| {
            names
                .iter()
                .position(|n| n == g)
                .ok_or_else(|| Error::validation(format!("generators: unknown generator {g}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let local_names: Vec<String> = generators.iter().map(|&g| names[g].clone()).collect();
    let parse_local = |field: &str, ws: &[String]| -> Result<Vec<Word>> {
        ws.iter()
            .map(|s| Word::parse(s, &local_names).map_err(|e| Error::validation(format!("{field}: {e}"))))
            .collect()
    };
    let group = match (&p.relators, oracle.as_free_product()) {
        (Some(rels), _) => {
            let rels = parse_local("relators", rels)?;
            let vecs: Vec<Vec<i64>> = rels.iter().map(|r| r.exponent_vector(generators.len())).collect();
            AbelianGroup::from_relations(generators.len(), &vecs)?
        }
        (None, Some(f)) => derive_factor_subgroup(f, &generators)?,
        (None, None) => {
            return Err(Error::validation("relators: required when the oracle is not a free product"));
        }
    };
    let sensible = SensibleGeneratingSet { a1: parse_local("A1", &p.a1)?, a2: parse_local("A2", &p.a2)? };
    if !is_sensible(&sensible, &group) {
        return Err(Error::validation("A1/A2: not a sensible generating set"));
    }
    AbelianParabolic::new(generators, group, sensible)
}

/// Relation lattice of generators lying in one abelian free factor.
fn derive_factor_subgroup(f: &FreeProductOracle, gens: &[usize]) -> Result<AbelianGroup> {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    let Some(&first) = gens.first() else {
        return Ok(AbelianGroup::free(0));
    };
    let fi = f.factor_of(first);
    if gens.iter().any(|&g| f.factor_of(g) != fi) {
        return Err(Error::validation("generators: a parabolic must lie in one abelian free factor"));
    }
    let fac = &f.factors()[fi];
    let grp = &fac.group;
    let cols = grp.dim();
    let mut b: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|&g| {
            let local = fac.gens.iter().position(|&x| x == g).expect("generator in its factor");
            grp.generator(local).0.iter().map(|&x| BigInt::from(x)).collect()
        })
        .collect();
    for (i, &d) in grp.torsion_orders().iter().enumerate() {
        let mut row = vec![BigInt::from(0); cols];
        row[i] = BigInt::from(d);
        b.push(row);
    }
    let kernel = snf::left_kernel(&b, cols);
    let rels = kernel
        .iter()
        .map(|v| {
            v[..gens.len()]
                .iter()
                .map(|x| x.to_i64().ok_or_else(|| Error::Unsupported("relation overflow".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    AbelianGroup::from_relations(gens.len(), &rels)
}

/// Drops finite and virtually cyclic parabolics (free rank at most one).
pub fn drop_virtually_cyclic(s: &RelativeStructure) -> RelativeStructure {
    let mut out = s.clone();
    out.parabolics.retain(|p| p.rank() >= 2);
    out
}

/// A ball of the Cayley graph with generator-labelled edges.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub vertices: Vec<Element>,
    pub dist: Vec<u32>,
    /// `(u, v, generator)` with `v = u * generator`.
    pub edges: Vec<(usize, usize, usize)>,
}

impl CayleyBall {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Breadth-first ball around the identity, neighbours in generator order.
pub fn cayley_ball(s: &RelativeStructure, radius: u32) -> Result<CayleyBall> {
    let o = &s.oracle;
    let n = s.ambient.generator_count();
    let mut vertices = vec![o.identity()];
    let mut dist = vec![0u32];
    let mut index: HashMap<Element, usize> = HashMap::from([(o.identity(), 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        if dist[u] == radius {
            continue;
        }
        for g in 0..n {
            for inv in [false, true] {
                let v = o.mul_letter(&vertices[u], Letter::new(g, inv))?;
                if !index.contains_key(&v) {
                    index.insert(v.clone(), vertices.len());
                    queue.push_back(vertices.len());
                    vertices.push(v);
                    dist.push(dist[u] + 1);
                }
            }
        }
    }
    let mut edges = Vec::new();
    for u in 0..vertices.len() {
        for g in 0..n {
            let v = o.mul_letter(&vertices[u], Letter::pos(g))?;
            if let Some(&j) = index.get(&v) {
                edges.push((u, j, g));
            }
        }
    }
    Ok(CayleyBall { vertices, dist, edges })
}
