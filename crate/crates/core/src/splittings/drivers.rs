//! Budgeted drivers: splittings over finite groups and the decompositions.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    edge_group_closure, is_nontrivial_splitting, recognize_splitting_shape, tietze_enumerate, validate_witness,
    Colour, Edge, GraphOfGroups, TietzeBudget, TietzeStream,
};
use crate::bm::{check_connectivity, CheckOptions, RoundStats, Verdict};
use crate::cusped::{ConstantsLedger, CuspedSpace};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::presentations::{
    cayley_ball, drop_virtually_cyclic, Element, FinitePresentation, ParabolicDoc, RelativeStructure, StructureDoc,
    SubgroupOracle, Word, WordProblemOracle,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub tietze: TietzeBudget,
    /// Largest edge group accepted as finite.
    pub closure: usize,
    /// Longest conjugator tried.
    pub conjugator: u32,
    /// Word length explored for subgroup membership.
    pub membership: u32,
    /// First `n` of the connectivity check; the ledger's `K` when absent.
    pub n_start: Option<u64>,
    pub n_budget: u64,
    pub ball_vertices: usize,
    pub recursion: u32,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            tietze: TietzeBudget { moves: 1, word_length: 2, count: 200 },
            closure: 64,
            conjugator: 2,
            membership: 3,
            n_start: None,
            n_budget: 8,
            ball_vertices: 1_000_000,
            recursion: 4,
            exec: Exec::Parallel,
        }
    }
}

impl Budgets {
    pub fn zero() -> Self {
        Budgets {
            tietze: TietzeBudget { moves: 0, word_length: 0, count: 0 },
            closure: 0,
            conjugator: 0,
            membership: 0,
            n_start: None,
            n_budget: 0,
            ball_vertices: 0,
            recursion: 0,
            exec: Exec::Sequential,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLog {
    pub presentations: usize,
    pub shapes: usize,
    pub closures: usize,
    pub rounds: Vec<RoundStats>,
    pub notes: Vec<String>,
}

/// Elements of the subgroup generated by `gens`, by word length, with a
/// representative word in the generators.
fn subgroup_ball(gens: &[Word], o: &WordProblemOracle, radius: u32) -> Result<Vec<(Element, Word)>> {
    let steps: Vec<(Word, Word)> = (0..gens.len())
        .flat_map(|i| [(gens[i].clone(), Word::power(i, 1)), (gens[i].inverse(), Word::power(i, -1))])
        .collect();
    let mut out = vec![(o.identity(), Word::empty())];
    let mut seen: HashMap<Element, ()> = HashMap::from([(o.identity(), ())]);
    let mut start = 0;
    for _ in 0..radius {
        let end = out.len();
        for i in start..end {
            for (amb, local) in &steps {
                let e = o.mul_word(&out[i].0, amb)?;
                if seen.insert(e.clone(), ()).is_none() {
                    let w = out[i].1.concat(local).free_reduce();
                    out.push((e, w));
                }
            }
        }
        start = end;
    }
    Ok(out)
}

/// An item of the enumeration that splits nontrivially over a finite group,
/// validated against the oracle.
fn finite_splitting(
    item_p: &FinitePresentation,
    defs: &[Word],
    names: &[String],
    o: &WordProblemOracle,
    budgets: &Budgets,
    log: &mut SearchLog,
) -> Result<Option<GraphOfGroups>> {
    let Some(shape) = recognize_splitting_shape(item_p) else { return Ok(None) };
    log.shapes += 1;
    let g = shape.pull_back(defs, names);
    let mut tables = Vec::new();
    for e in &g.edges {
        log.closures += 1;
        match edge_group_closure(&e.generators, o, budgets.closure)? {
            Some(t) => tables.push(t),
            None => return Ok(None),
        }
    }
    if !is_nontrivial_splitting(&g, &tables, o)? || !validate_witness(&g, o, budgets.closure)? {
        return Ok(None);
    }
    Ok(Some(g))
}

/// Searches the Tietze stream for a nontrivial splitting over a finite group.
pub fn check_multi_ended(p: &FinitePresentation, o: &WordProblemOracle, budgets: &Budgets) -> Result<(Verdict, SearchLog)> {
    let mut log = SearchLog::default();
    for item in tietze_enumerate(p, budgets.tietze) {
        log.presentations += 1;
        if let Some(g) = finite_splitting(&item.presentation, &item.defs, p.names(), o, budgets, &mut log)? {
            return Ok((Verdict::Disconnected { witness: g }, log));
        }
    }
    let report = format!("no splitting over a finite group among {} presentations", log.presentations);
    Ok((Verdict::Unknown { report }, log))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Peripheral {
    True,
    False,
    Undetermined,
}

fn element_set(words: &[Word], conj: &Element, o: &WordProblemOracle) -> Result<BTreeSet<Element>> {
    let inv = o.inverse(conj)?;
    words.iter().map(|w| o.mul(&o.mul_word(conj, w)?, &inv)).collect()
}

/// Whether the peripheral vertices match the parabolics bijectively, up to
/// conjugators of length at most `conj_budget`.
pub fn recognize_peripheral(g: &GraphOfGroups, s: &RelativeStructure, conj_budget: u32) -> Result<Peripheral> {
    let o = &s.oracle;
    let bipartite = g.vertices.iter().all(|v| v.colour != Colour::Uncoloured)
        && g.edges.iter().all(|e| (g.vertices[e.source].colour == Colour::Peripheral) != (g.vertices[e.target].colour == Colour::Peripheral));
    let peripheral: Vec<usize> = (0..g.vertices.len()).filter(|&i| g.vertices[i].colour == Colour::Peripheral).collect();
    if !bipartite || peripheral.len() != s.parabolics.len() {
        return Ok(Peripheral::False);
    }
    let id = o.identity();
    let targets: Vec<BTreeSet<Element>> = s
        .parabolics
        .iter()
        .map(|p| element_set(&p.embedding(), &id, o))
        .collect::<Result<_>>()?;
    let conjugators = cayley_ball(s, conj_budget)?.vertices;
    let mut options: Vec<Vec<usize>> = Vec::new();
    let mut undetermined = false;
    for &v in &peripheral {
        let emb = &g.vertices[v].embedding;
        let plain = element_set(emb, &id, o)?;
        let sized: Vec<usize> = (0..targets.len()).filter(|&i| targets[i].len() == plain.len()).collect();
        if sized.is_empty() {
            return Ok(Peripheral::False);
        }
        let mut ok = Vec::new();
        for &i in &sized {
            for c in &conjugators {
                if element_set(emb, c, o)? == targets[i] {
                    ok.push(i);
                    break;
                }
            }
        }
        if ok.is_empty() {
            undetermined = true;
        }
        options.push(ok);
    }
    if undetermined {
        return Ok(Peripheral::Undetermined);
    }
    fn assign(k: usize, options: &[Vec<usize>], used: &mut Vec<bool>) -> bool {
        if k == options.len() {
            return true;
        }
        for &i in &options[k] {
            if !used[i] {
                used[i] = true;
                if assign(k + 1, options, used) {
                    return true;
                }
                used[i] = false;
            }
        }
        false
    }
    let mut used = vec![false; targets.len()];
    Ok(if assign(0, &options, &mut used) { Peripheral::True } else { Peripheral::False })
}

/// Every parabolic is conjugate, by a short conjugator, into some vertex.
fn parabolics_elliptic(g: &GraphOfGroups, s: &RelativeStructure, budgets: &Budgets) -> Result<bool> {
    let o = &s.oracle;
    let conjugators = cayley_ball(s, budgets.conjugator)?.vertices;
    let balls: Vec<BTreeSet<Element>> = g
        .vertices
        .iter()
        .map(|v| Ok(subgroup_ball(&v.embedding, o, budgets.membership)?.into_iter().map(|(e, _)| e).collect()))
        .collect::<Result<_>>()?;
    'parabolics: for p in &s.parabolics {
        for c in &conjugators {
            let set = element_set(&p.embedding(), c, o)?;
            if balls.iter().any(|b| set.is_subset(b)) {
                continue 'parabolics;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// The relative structure of a non-peripheral vertex: incident edges whose
/// images are generator letters become its parabolics.
fn vertex_structure(g: &GraphOfGroups, v: usize, s: &RelativeStructure) -> Result<RelativeStructure> {
    let vg = &g.vertices[v];
    let names = vg.presentation.names();
    let mut parabolics = Vec::new();
    for e in &g.edges {
        let images = if e.source == v {
            &e.source_images
        } else if e.target == v {
            &e.target_images
        } else {
            continue;
        };
        let letters: Option<Vec<String>> = images
            .iter()
            .map(|w| match w.letters() {
                [l] if !l.inv => Some(names[l.gen].clone()),
                _ => None,
            })
            .collect();
        let letters = letters.ok_or_else(|| Error::Unsupported("edge images are not generator letters".into()))?;
        if letters.len() >= 2 {
            parabolics.push(ParabolicDoc { generators: letters.clone(), a1: letters, a2: Vec::new(), relators: None });
        }
    }
    StructureDoc {
        generators: names.to_vec(),
        relators: vg.presentation.relators().iter().map(|r| r.render(names)).collect(),
        parabolics,
        delta: s.delta,
        isoperimetric_k: s.isoperimetric_k,
        oracle: None,
    }
    .build()
}

/// Peripheral colourings of a two-vertex splitting.
fn peripheral_candidates(g: &GraphOfGroups, s: &RelativeStructure, budgets: &Budgets) -> Result<Vec<GraphOfGroups>> {
    let mut out = Vec::new();
    if g.vertices.len() != 2 || g.edges.iter().any(|e| e.source == e.target) {
        return Ok(out);
    }
    for p in 0..2 {
        let mut c = g.clone();
        c.vertices[p].colour = Colour::Peripheral;
        c.vertices[1 - p].colour = Colour::NonPeripheral;
        if recognize_peripheral(&c, s, budgets.conjugator)? == Peripheral::True {
            out.push(c);
        }
    }
    Ok(out)
}

struct Candidate {
    graph: GraphOfGroups,
    /// Structures of the non-peripheral vertices still to pass.
    pending: VecDeque<RelativeStructure>,
    n: u64,
}

struct BranchB<'a> {
    ledger: &'a ConstantsLedger,
    budgets: &'a Budgets,
    queue: VecDeque<Candidate>,
    n_start: u64,
}

impl BranchB<'_> {
    /// One round of the connectivity check on the current candidate.
    fn step(&mut self, log: &mut SearchLog) -> Result<Option<Verdict>> {
        let Some(cand) = self.queue.front_mut() else { return Ok(None) };
        let Some(vs) = cand.pending.front() else {
            let n = cand.n;
            self.queue.pop_front();
            return Ok(Some(Verdict::Connected { n: Some(n), certified: self.ledger.certified && !self.ledger.toy }));
        };
        if cand.n > self.budgets.n_budget {
            log.notes.push(format!("candidate {} exhausted the n budget", cand.graph.summary()));
            self.queue.pop_front();
            return Ok(None);
        }
        let x = CuspedSpace::assemble(vs);
        let opts = CheckOptions { max_vertices: self.budgets.ball_vertices, exec: self.budgets.exec };
        let run = check_connectivity(&x, &x.origin(), self.ledger, cand.n, cand.n, opts)?;
        log.rounds.extend(run.rounds);
        match run.verdict {
            Verdict::Connected { .. } => {
                cand.pending.pop_front();
                if cand.pending.is_empty() {
                    let n = cand.n;
                    self.queue.pop_front();
                    return Ok(Some(Verdict::Connected {
                        n: Some(n),
                        certified: self.ledger.certified && !self.ledger.toy,
                    }));
                }
            }
            Verdict::Unknown { report } if report.starts_with("ball budget") || report.starts_with("ball radius") => {
                log.notes.push(report);
                self.queue.pop_front();
            }
            _ => cand.n += 1,
        }
        Ok(None)
    }
}

/// Interleaves the finite-splitting search with connectivity checks of
/// peripheral splittings, starting from the trivial splitting.
pub fn connectivity_decision(
    s: &RelativeStructure,
    ledger: &ConstantsLedger,
    budgets: &Budgets,
) -> Result<(Verdict, SearchLog)> {
    let p = &s.ambient;
    let o = s.oracle.clone();
    let mut log = SearchLog::default();
    let mut stream: Option<TietzeStream> = Some(tietze_enumerate(p, budgets.tietze));
    let n_start = budgets.n_start.unwrap_or_else(|| ledger.big_k_small().unwrap_or(u64::MAX));
    let mut trivial = GraphOfGroups::trivial(p);
    trivial.vertices[0].colour = Colour::NonPeripheral;
    let mut b = BranchB {
        ledger,
        budgets,
        queue: VecDeque::from([Candidate { graph: trivial, pending: VecDeque::from([s.clone()]), n: n_start }]),
        n_start,
    };
    loop {
        let mut progressed = false;
        if let Some(st) = stream.as_mut() {
            match st.next() {
                Some(item) => {
                    progressed = true;
                    log.presentations += 1;
                    if let Some(g) = finite_splitting(&item.presentation, &item.defs, p.names(), &o, budgets, &mut log)? {
                        if parabolics_elliptic(&g, s, budgets)? {
                            return Ok((Verdict::Disconnected { witness: g }, log));
                        }
                        log.notes.push("finite splitting found but a parabolic is not elliptic in it".into());
                    } else if let Some(shape) = recognize_splitting_shape(&item.presentation) {
                        let g = shape.pull_back(&item.defs, p.names());
                        for c in peripheral_candidates(&g, s, budgets)? {
                            let np: Vec<usize> =
                                (0..c.vertices.len()).filter(|&i| c.vertices[i].colour == Colour::NonPeripheral).collect();
                            match np.iter().map(|&v| vertex_structure(&c, v, s)).collect::<Result<VecDeque<_>>>() {
                                Ok(pending) => b.queue.push_back(Candidate { graph: c, pending, n: b.n_start }),
                                Err(e) => log.notes.push(format!("peripheral splitting skipped: {e}")),
                            }
                        }
                    }
                }
                None => stream = None,
            }
        }
        if !b.queue.is_empty() {
            progressed = true;
            if let Some(v) = b.step(&mut log)? {
                return Ok((v, log));
            }
        }
        if !progressed {
            let report = format!(
                "budgets exhausted after {} presentations and {} connectivity rounds",
                log.presentations,
                log.rounds.len()
            );
            return Ok((Verdict::Unknown { report }, log));
        }
    }
}

/// Validates the structure, drops virtually cyclic parabolics and decides
/// whether the group splits over a finite group relative to them.
pub fn exists_finite_splitting(
    s: &RelativeStructure,
    ledger: &ConstantsLedger,
    budgets: &Budgets,
) -> Result<(Verdict, SearchLog)> {
    s.check_admissible()?;
    connectivity_decision(&drop_virtually_cyclic(s), ledger, budgets)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafStatus {
    /// Cyclic vertex groups are not refined.
    Cyclic,
    Connected,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leaf {
    pub vertex: usize,
    pub status: LeafStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub presentation: FinitePresentation,
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    /// Ambient words of the factor's generators.
    pub embedding: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub graph: GraphOfGroups,
    pub leaves: Vec<Leaf>,
    /// Size of each edge group, in edge order.
    pub edge_orders: Vec<usize>,
    pub complete: bool,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<Factor>,
}

fn sub_oracle(o: &Arc<WordProblemOracle>, embedding: &[Word]) -> WordProblemOracle {
    WordProblemOracle::Subgroup(SubgroupOracle { parent: o.clone(), images: embedding.to_vec() })
}

/// Replaces vertex `v` by the splitting `w` of its group, reattaching the
/// other edges at `v` to a child vertex containing their edge groups.
fn splice(g: &mut GraphOfGroups, v: usize, w: &GraphOfGroups, o: &WordProblemOracle, budgets: &Budgets) -> Result<Vec<usize>> {
    let parent = g.vertices[v].clone();
    let w = w.pull_back(&parent.embedding, &g.ambient_names);
    let mut ids = vec![v];
    for _ in 1..w.vertices.len() {
        ids.push(g.vertices.len());
        g.vertices.push(w.vertices[0].clone());
    }
    for (i, child) in w.vertices.iter().enumerate() {
        g.vertices[ids[i]] = child.clone();
    }
    for e in g.edges.iter_mut() {
        for side in [true, false] {
            let (end, images) = if side { (&mut e.source, &mut e.source_images) } else { (&mut e.target, &mut e.target_images) };
            if *end != v {
                continue;
            }
            let ambient: Vec<Word> = images.iter().map(|im| im.substitute(&parent.embedding)).collect();
            let mut placed = false;
            for (i, child) in w.vertices.iter().enumerate() {
                let ball = subgroup_ball(&child.embedding, o, budgets.membership)?;
                let local: Option<Vec<Word>> = ambient
                    .iter()
                    .map(|a| {
                        let k = o.normalize(a).ok()?;
                        ball.iter().find(|(e, _)| *e == k).map(|(_, w)| w.clone())
                    })
                    .collect();
                if let Some(local) = local {
                    *end = ids[i];
                    *images = local;
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(Error::Construction("edge group not found in any refined vertex".into()));
            }
        }
    }
    for e in &w.edges {
        g.edges.push(Edge { source: ids[e.source], target: ids[e.target], ..e.clone() });
    }
    Ok(ids)
}

fn edge_orders(g: &GraphOfGroups, o: &WordProblemOracle, budget: usize) -> Result<Vec<usize>> {
    g.edges
        .iter()
        .map(|e| Ok(edge_group_closure(&e.generators, o, budget.max(1))?.map_or(0, |t| t.len())))
        .collect()
}

/// Refines the group by splittings over finite groups until every vertex is
/// cyclic, connected or out of budget.
pub fn dunwoody_decomposition(
    s: &RelativeStructure,
    ledger: &ConstantsLedger,
    budgets: &Budgets,
) -> Result<(Decomposition, SearchLog)> {
    let (verdict, mut log) = exists_finite_splitting(s, ledger, budgets)?;
    let o = &s.oracle;
    let mut g = GraphOfGroups::trivial(&s.ambient);
    let mut status = vec![LeafStatus::Unknown];
    match &verdict {
        Verdict::Connected { .. } => status[0] = LeafStatus::Connected,
        Verdict::Unknown { .. } => {}
        Verdict::Disconnected { witness } => {
            g = witness.clone();
            status = vec![LeafStatus::Unknown; g.vertices.len()];
            let mut work: VecDeque<(usize, u32)> = (0..g.vertices.len()).map(|v| (v, 1)).collect();
            while let Some((v, depth)) = work.pop_front() {
                let vg = g.vertices[v].clone();
                if vg.presentation.generator_count() <= 1 {
                    status[v] = LeafStatus::Cyclic;
                    continue;
                }
                if depth > budgets.recursion {
                    log.notes.push(format!("recursion budget reached at {}", vg.presentation));
                    continue;
                }
                let so = sub_oracle(o, &vg.embedding);
                let (sub, sub_log) = check_multi_ended(&vg.presentation, &so, budgets)?;
                log.presentations += sub_log.presentations;
                log.shapes += sub_log.shapes;
                log.closures += sub_log.closures;
                if let Verdict::Disconnected { witness } = sub {
                    let ids = splice(&mut g, v, &witness, o, budgets)?;
                    status.resize(g.vertices.len(), LeafStatus::Unknown);
                    for id in ids {
                        work.push_back((id, depth + 1));
                    }
                }
            }
        }
    }
    let orders = edge_orders(&g, o, budgets.closure)?;
    let leaves: Vec<Leaf> = status.iter().enumerate().map(|(vertex, &status)| Leaf { vertex, status }).collect();
    let complete = leaves.iter().all(|l| l.status != LeafStatus::Unknown);
    Ok((Decomposition { graph: g, leaves, edge_orders: orders, complete, verdict, factors: Vec::new() }, log))
}

fn unique_names(taken: &mut Vec<String>, names: &[String]) -> Vec<String> {
    names
        .iter()
        .map(|n| {
            let mut c = n.clone();
            let mut k = 1;
            while taken.iter().any(|t| t == &c || t.to_uppercase() == c.to_uppercase()) {
                c = format!("{n}_{k}");
                k += 1;
            }
            taken.push(c.clone());
            c
        })
        .collect()
}

/// The free factors: components of the graph joined by nontrivial edges,
/// plus one infinite cyclic factor per loop over the trivial group.
pub fn grushko_decomposition(
    s: &RelativeStructure,
    ledger: &ConstantsLedger,
    budgets: &Budgets,
) -> Result<(Decomposition, SearchLog)> {
    let (mut d, log) = dunwoody_decomposition(s, ledger, budgets)?;
    let g = &d.graph;
    let n = g.vertices.len();
    let mut comp: Vec<usize> = (0..n).collect();
    for (e, &ord) in g.edges.iter().zip(&d.edge_orders) {
        if ord != 1 && e.source != e.target {
            let (a, b) = (comp[e.source], comp[e.target]);
            let (lo, hi) = (a.min(b), a.max(b));
            comp.iter_mut().filter(|c| **c == hi).for_each(|c| *c = lo);
        }
    }
    let amb = &g.ambient_names;
    let mut factors = Vec::new();
    let roots: BTreeSet<usize> = comp.iter().copied().collect();
    for root in roots {
        let members: Vec<usize> = (0..n).filter(|&v| comp[v] == root).collect();
        let mut names = Vec::new();
        let mut taken = Vec::new();
        let mut offset = HashMap::new();
        let mut embedding = Vec::new();
        let mut rels = Vec::new();
        for &v in &members {
            let vg = &g.vertices[v];
            offset.insert(v, names.len());
            let shift: Vec<Word> = (0..vg.presentation.generator_count()).map(|i| Word::power(names.len() + i, 1)).collect();
            names.extend(unique_names(&mut taken, vg.presentation.names()));
            embedding.extend(vg.embedding.iter().cloned());
            rels.extend(vg.presentation.relators().iter().map(|r| r.substitute(&shift)));
        }
        for (e, &ord) in g.edges.iter().zip(&d.edge_orders) {
            if !members.contains(&e.source) || ord == 1 {
                continue;
            }
            let at = |v: usize, w: &Word| {
                let k = offset[&v];
                let gens = g.vertices[v].presentation.generator_count();
                w.substitute(&(0..gens).map(|i| Word::power(k + i, 1)).collect::<Vec<_>>())
            };
            let mut stable = None;
            if let Some(t) = &e.stable_letter {
                stable = Some(names.len());
                names.extend(unique_names(&mut taken, &["t".to_string()]));
                embedding.push(t.clone());
            }
            for (si, ti) in e.source_images.iter().zip(&e.target_images) {
                let a = at(e.source, si);
                let b = at(e.target, ti);
                let lhs = match stable {
                    Some(t) => Word::power(t, 1).concat(&a).concat(&Word::power(t, -1)),
                    None => a,
                };
                rels.push(lhs.concat(&b.inverse()));
            }
        }
        let trivial_group = embedding.iter().all(|w| s.oracle.is_trivial(w).unwrap_or(false));
        if trivial_group {
            continue;
        }
        let presentation = FinitePresentation::new(names.clone(), rels)?;
        factors.push(Factor {
            generators: names.clone(),
            relators: presentation.relators().iter().map(|r| r.render(&names)).collect(),
            embedding: embedding.iter().map(|w| w.render(amb)).collect(),
            presentation,
        });
    }
    for (e, &ord) in g.edges.iter().zip(&d.edge_orders) {
        if let (Some(t), 1) = (&e.stable_letter, ord) {
            let presentation = FinitePresentation::new(vec!["t".into()], Vec::new())?;
            factors.push(Factor {
                generators: vec!["t".into()],
                relators: Vec::new(),
                embedding: vec![t.render(amb)],
                presentation,
            });
        }
    }
    d.factors = factors;
    Ok((d, log))
}
