//! Splittings over finite groups: Tietze enumeration, shape recognition,
//! finite edge groups and the decomposition drivers.

mod drivers;
mod shape;
mod tietze;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use drivers::{
    check_multi_ended, connectivity_decision, dunwoody_decomposition, exists_finite_splitting,
    grushko_decomposition, recognize_peripheral, Budgets, Decomposition, Factor, Leaf, LeafStatus, Peripheral,
    SearchLog,
};
pub use shape::recognize_splitting_shape;
pub use tietze::{tietze_enumerate, TietzeBudget, TietzeItem, TietzeMove, TietzeStream};

use crate::error::{Error, Result};
use crate::presentations::{Element, FinitePresentation, Word, WordProblemOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Colour {
    Peripheral,
    NonPeripheral,
    Uncoloured,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexGroup {
    pub presentation: FinitePresentation,
    pub colour: Colour,
    /// Ambient word of each vertex generator.
    pub embedding: Vec<Word>,
}

/// An edge; for a loop the stable letter conjugates the source images onto
/// the target images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    /// Ambient words generating the edge group.
    pub generators: Vec<Word>,
    /// The same generators as words in the source and target vertex groups.
    pub source_images: Vec<Word>,
    pub target_images: Vec<Word>,
    pub stable_letter: Option<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GraphDoc", try_from = "GraphDoc")]
pub struct GraphOfGroups {
    pub ambient_names: Vec<String>,
    pub vertices: Vec<VertexGroup>,
    pub edges: Vec<Edge>,
}

impl GraphOfGroups {
    /// One vertex carrying the whole group.
    pub fn trivial(p: &FinitePresentation) -> Self {
        GraphOfGroups {
            ambient_names: p.names().to_vec(),
            vertices: vec![VertexGroup {
                presentation: p.clone(),
                colour: Colour::Uncoloured,
                embedding: (0..p.generator_count()).map(|g| Word::power(g, 1)).collect(),
            }],
            edges: Vec::new(),
        }
    }

    /// Rewrites every ambient word through `defs`, words in a new ambient
    /// presentation with generator names `names`.
    pub fn pull_back(&self, defs: &[Word], names: &[String]) -> Self {
        let mut out = self.clone();
        out.ambient_names = names.to_vec();
        for v in &mut out.vertices {
            v.embedding = v.embedding.iter().map(|w| w.substitute(defs).free_reduce()).collect();
        }
        for e in &mut out.edges {
            e.generators = e.generators.iter().map(|w| w.substitute(defs).free_reduce()).collect();
            e.stable_letter = e.stable_letter.as_ref().map(|w| w.substitute(defs).free_reduce());
        }
        out
    }

    pub fn is_trivial_edge_set(&self) -> bool {
        self.edges.iter().all(|e| e.generators.is_empty())
    }

    /// Vertex-group presentations, e.g. `<a, b | a b A B>`.
    pub fn summary(&self) -> String {
        let vs: Vec<String> = self.vertices.iter().map(|v| v.presentation.to_string()).collect();
        let es: Vec<String> = self
            .edges
            .iter()
            .map(|e| {
                let gens: Vec<String> = e.generators.iter().map(|w| w.render(&self.ambient_names)).collect();
                let kind = if e.stable_letter.is_some() { "loop" } else { "edge" };
                format!("{kind} {}-{} <{}>", e.source, e.target, gens.join(", "))
            })
            .collect();
        format!("vertices [{}]; edges [{}]", vs.join(", "), es.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    generators: Vec<String>,
    relators: Vec<String>,
    colour: Colour,
    embedding: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    source: usize,
    target: usize,
    generators: Vec<String>,
    source_images: Vec<String>,
    target_images: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stable_letter: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    ambient_generators: Vec<String>,
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

impl From<GraphOfGroups> for GraphDoc {
    fn from(g: GraphOfGroups) -> Self {
        let amb = &g.ambient_names;
        let render = |ws: &[Word], names: &[String]| ws.iter().map(|w| w.render(names)).collect::<Vec<_>>();
        GraphDoc {
            ambient_generators: amb.clone(),
            vertices: g
                .vertices
                .iter()
                .map(|v| VertexDoc {
                    generators: v.presentation.names().to_vec(),
                    relators: render(v.presentation.relators(), v.presentation.names()),
                    colour: v.colour,
                    embedding: render(&v.embedding, amb),
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    source: e.source,
                    target: e.target,
                    generators: render(&e.generators, amb),
                    source_images: render(&e.source_images, g.vertices[e.source].presentation.names()),
                    target_images: render(&e.target_images, g.vertices[e.target].presentation.names()),
                    stable_letter: e.stable_letter.as_ref().map(|w| w.render(amb)),
                })
                .collect(),
        }
    }
}

impl TryFrom<GraphDoc> for GraphOfGroups {
    type Error = Error;

    fn try_from(d: GraphDoc) -> Result<Self> {
        let amb = d.ambient_generators;
        let parse_all = |ws: &[String], names: &[String]| ws.iter().map(|w| Word::parse(w, names)).collect::<Result<Vec<_>>>();
        let mut vertices = Vec::new();
        for v in &d.vertices {
            let rels = parse_all(&v.relators, &v.generators)?;
            vertices.push(VertexGroup {
                presentation: FinitePresentation::new(v.generators.clone(), rels)?,
                colour: v.colour,
                embedding: parse_all(&v.embedding, &amb)?,
            });
        }
        let mut edges = Vec::new();
        for e in &d.edges {
            let (Some(s), Some(t)) = (vertices.get(e.source), vertices.get(e.target)) else {
                return Err(Error::validation("edge endpoint out of range"));
            };
            edges.push(Edge {
                source: e.source,
                target: e.target,
                generators: parse_all(&e.generators, &amb)?,
                source_images: parse_all(&e.source_images, s.presentation.names())?,
                target_images: parse_all(&e.target_images, t.presentation.names())?,
                stable_letter: e.stable_letter.as_ref().map(|w| Word::parse(w, &amb)).transpose()?,
            });
        }
        Ok(GraphOfGroups { ambient_names: amb, vertices, edges })
    }
}

/// A finite group given by representative words and its product table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicationTable {
    pub elements: Vec<Word>,
    /// `product[i][j]` is the index of `elements[i] * elements[j]`.
    pub product: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    #[serde(skip)]
    keys: Vec<Element>,
}

impl MultiplicationTable {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of the element equal to `w`, if any.
    pub fn position(&self, w: &Word, o: &WordProblemOracle) -> Result<Option<usize>> {
        let e = o.normalize(w)?;
        Ok(self.keys.iter().position(|k| *k == e))
    }

    pub fn identity(&self) -> usize {
        0
    }
}

/// Closes the generators under products. `None` once the group would exceed
/// `budget` elements.
pub fn edge_group_closure(gens: &[Word], o: &WordProblemOracle, budget: usize) -> Result<Option<MultiplicationTable>> {
    let mut steps: Vec<Word> = Vec::new();
    for g in gens {
        steps.push(g.clone());
        steps.push(g.inverse());
    }
    let mut elements = vec![Word::empty()];
    let mut keys = vec![o.identity()];
    let mut index: HashMap<Element, usize> = HashMap::from([(o.identity(), 0)]);
    let mut i = 0;
    while i < elements.len() {
        for s in &steps {
            let k = o.mul_word(&keys[i], s)?;
            if !index.contains_key(&k) {
                if elements.len() == budget {
                    return Ok(None);
                }
                index.insert(k.clone(), elements.len());
                elements.push(elements[i].concat(s).free_reduce());
                keys.push(k);
            }
        }
        i += 1;
    }
    let n = elements.len();
    let mut product = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            let k = o.mul(&keys[a], &keys[b])?;
            product[a][b] = *index.get(&k).ok_or_else(|| Error::Undecided("closure is not closed".into()))?;
        }
    }
    let inverse = (0..n).map(|a| product[a].iter().position(|&c| c == 0).expect("finite group")).collect();
    Ok(Some(MultiplicationTable { elements, product, inverse, keys }))
}

/// False when some vertex group is generated by the edge groups at it; loops
/// always split nontrivially.
pub fn is_nontrivial_splitting(g: &GraphOfGroups, tables: &[MultiplicationTable], o: &WordProblemOracle) -> Result<bool> {
    if g.edges.is_empty() {
        return Ok(false);
    }
    if g.edges.iter().any(|e| e.stable_letter.is_some()) {
        return Ok(true);
    }
    for (vi, v) in g.vertices.iter().enumerate() {
        let mut degenerate = true;
        'gens: for w in &v.embedding {
            for (e, t) in g.edges.iter().zip(tables) {
                if (e.source == vi || e.target == vi) && t.position(w, o)?.is_some() {
                    continue 'gens;
                }
            }
            degenerate = false;
            break;
        }
        if degenerate {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rechecks a witness splitting against the ambient oracle: vertex relators
/// hold, edge identifications hold and edge groups are finite.
pub fn validate_witness(g: &GraphOfGroups, o: &WordProblemOracle, closure_budget: usize) -> Result<bool> {
    for v in &g.vertices {
        if v.embedding.len() != v.presentation.generator_count() {
            return Ok(false);
        }
        for r in v.presentation.relators() {
            if !o.is_trivial(&r.substitute(&v.embedding))? {
                return Ok(false);
            }
        }
    }
    let mut tables = Vec::new();
    for e in &g.edges {
        let (s, t) = (&g.vertices[e.source], &g.vertices[e.target]);
        for ((gen, si), ti) in e.generators.iter().zip(&e.source_images).zip(&e.target_images) {
            let a = si.substitute(&s.embedding);
            let b = ti.substitute(&t.embedding);
            let lhs = match &e.stable_letter {
                Some(st) => st.concat(&a).concat(&st.inverse()),
                None => a.clone(),
            };
            if !o.equal(&lhs, &b)? || !o.equal(&a, gen)? {
                return Ok(false);
            }
        }
        match edge_group_closure(&e.generators, o, closure_budget)? {
            Some(t) => tables.push(t),
            None => return Ok(false),
        }
    }
    is_nontrivial_splitting(g, &tables, o)
}
