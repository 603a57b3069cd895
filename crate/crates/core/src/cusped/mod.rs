//! The cusped space: the Cayley graph with a combinatorial horoball on every
//! coset of every parabolic.

mod constants;
mod deep;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

pub use constants::{compute_constants, decimal, Affine, ConstantsLedger};
pub use deep::{cusped_ray_cover_check, deep_pair_path, horoball_profile, ray_cover_check, HoroballProfile};

use crate::error::{Error, Result};
use crate::graph::{BallGraph, ImplicitGraph};
use crate::horoball::{pow2, HoroballVertex};
use crate::presentations::{Element, LatticePoint, Letter, RelativeStructure, Word};

/// A vertex of the cusped space. Horoball vertices are keyed by the ambient
/// element under them; depth 0 is always the Cayley vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CuspedVertex {
    Cayley(Element),
    Horo { parabolic: usize, base: Element, depth: u32 },
}

impl CuspedVertex {
    pub fn horo(parabolic: usize, base: Element, depth: u32) -> Self {
        if depth == 0 {
            CuspedVertex::Cayley(base)
        } else {
            CuspedVertex::Horo { parabolic, base, depth }
        }
    }

    pub fn depth(&self) -> u32 {
        match self {
            CuspedVertex::Cayley(_) => 0,
            CuspedVertex::Horo { depth, .. } => *depth,
        }
    }

    pub fn base(&self) -> &Element {
        match self {
            CuspedVertex::Cayley(e) => e,
            CuspedVertex::Horo { base, .. } => base,
        }
    }
}

/// Membership in the `k`-thick part.
pub fn thick_part_member(v: &CuspedVertex, k: u32) -> bool {
    v.depth() <= k
}

const DEFAULT_MAX_OFFSETS: usize = 1 << 20;

pub struct CuspedSpace {
    s: RelativeStructure,
    /// Ambient words of the horizontal offsets per (parabolic, depth).
    offsets: Mutex<HashMap<(usize, u32), Arc<Vec<Word>>>>,
    max_offsets: usize,
}

impl CuspedSpace {
    pub fn assemble(s: &RelativeStructure) -> Self {
        CuspedSpace { s: s.clone(), offsets: Mutex::new(HashMap::new()), max_offsets: DEFAULT_MAX_OFFSETS }
    }

    pub fn with_max_offsets(mut self, n: usize) -> Self {
        self.max_offsets = n;
        self
    }

    pub fn structure(&self) -> &RelativeStructure {
        &self.s
    }

    pub fn origin(&self) -> CuspedVertex {
        CuspedVertex::Cayley(self.s.oracle.identity())
    }

    pub fn element(&self, w: &Word) -> Result<Element> {
        self.s.oracle.normalize(w)
    }

    pub fn cayley(&self, w: &Word) -> Result<CuspedVertex> {
        Ok(CuspedVertex::Cayley(self.element(w)?))
    }

    pub fn horo(&self, parabolic: usize, w: &Word, depth: u32) -> Result<CuspedVertex> {
        if parabolic >= self.s.parabolics.len() {
            return Err(Error::validation(format!("no parabolic {parabolic}")));
        }
        Ok(CuspedVertex::horo(parabolic, self.element(w)?, depth))
    }

    /// Parses `word` or `P<i>:word@depth`.
    pub fn parse_vertex(&self, text: &str) -> Result<CuspedVertex> {
        let t = text.trim();
        let Some(rest) = t.strip_prefix('P') else {
            return self.cayley(&self.s.parse_word(t)?);
        };
        let (i, rest) = rest.split_once(':').ok_or_else(|| Error::parse(format!("bad vertex {t:?}")))?;
        let (w, k) = rest.rsplit_once('@').ok_or_else(|| Error::parse(format!("bad vertex {t:?}")))?;
        let i: usize = i.parse().map_err(|_| Error::parse(format!("bad parabolic index in {t:?}")))?;
        let k: u32 = k.trim().parse().map_err(|_| Error::parse(format!("bad depth in {t:?}")))?;
        self.horo(i, &self.s.parse_word(w)?, k)
    }

    pub fn render(&self, v: &CuspedVertex) -> String {
        let word = |e: &Element| {
            let s = self.s.oracle.render(e, self.s.names());
            if s.is_empty() {
                "1".to_string()
            } else {
                s
            }
        };
        match v {
            CuspedVertex::Cayley(e) => word(e),
            CuspedVertex::Horo { parabolic, base, depth } => format!("P{parabolic}:{}@{depth}", word(base)),
        }
    }

    /// Lattice coordinates of `reference^-1 * e` when it lies in parabolic
    /// `i`, read off its normal form.
    pub fn coset_offset(&self, i: usize, reference: &Element, e: &Element) -> Result<Option<LatticePoint>> {
        let p = &self.s.parabolics[i];
        let o = &self.s.oracle;
        if matches!(**o, crate::presentations::WordProblemOracle::Subgroup(_)) {
            return Err(Error::Unsupported("coset membership through a subgroup oracle".into()));
        }
        let q = o.mul(&o.inverse(reference)?, e)?;
        let w = o.root_word(&q)?;
        let Ok(local) = p.localize(&w) else { return Ok(None) };
        Ok(Some(p.lattice().locate(&p.group.coords_of(&local)?)?))
    }

    /// `v` as a point of the horoball on `reference * P_i`, if it is one.
    pub fn horoball_coords(
        &self,
        i: usize,
        reference: &Element,
        v: &CuspedVertex,
    ) -> Result<Option<HoroballVertex<LatticePoint>>> {
        match v {
            CuspedVertex::Horo { parabolic, .. } if *parabolic != i => Ok(None),
            _ => Ok(self.coset_offset(i, reference, v.base())?.map(|p| HoroballVertex::new(p, v.depth()))),
        }
    }

    /// Inverse of [`Self::horoball_coords`].
    pub fn from_horoball(&self, i: usize, reference: &Element, h: &HoroballVertex<LatticePoint>) -> Result<CuspedVertex> {
        let w = self.s.parabolics[i].point_word(&h.base);
        Ok(CuspedVertex::horo(i, self.s.oracle.mul_word(reference, &w)?, h.depth))
    }

    fn offsets(&self, i: usize, k: u32) -> Result<Arc<Vec<Word>>> {
        if let Some(o) = self.offsets.lock().expect("offset cache").get(&(i, k)) {
            return Ok(o.clone());
        }
        let p = &self.s.parabolics[i];
        let l = p.lattice();
        let r = pow2(k);
        // the ball of radius r in Z^n x T has at least (r + 1)^n points
        if (r.saturating_add(1) as f64).powi(l.rank() as i32) * l.torsion().order() as f64 > self.max_offsets as f64 {
            return Err(Error::budget(format!("horizontal offsets at depth {k}"), self.max_offsets));
        }
        let words: Vec<Word> = l.sphere_ball(&l.zero(), r).iter().map(|q| p.point_word(q)).collect();
        let words = Arc::new(words);
        self.offsets.lock().expect("offset cache").insert((i, k), words.clone());
        Ok(words)
    }
}

impl ImplicitGraph for CuspedSpace {
    type V = CuspedVertex;

    fn neighbors(&self, v: &CuspedVertex) -> Result<Vec<CuspedVertex>> {
        let o = &self.s.oracle;
        match v {
            CuspedVertex::Cayley(g) => {
                let mut out = Vec::new();
                for gen in 0..self.s.ambient.generator_count() {
                    for inv in [false, true] {
                        let h = o.mul_letter(g, Letter::new(gen, inv))?;
                        if &h != g {
                            out.push(CuspedVertex::Cayley(h));
                        }
                    }
                }
                out.sort();
                out.dedup();
                for i in 0..self.s.parabolics.len() {
                    out.push(CuspedVertex::horo(i, g.clone(), 1));
                }
                Ok(out)
            }
            CuspedVertex::Horo { parabolic, base, depth } => {
                let offs = self.offsets(*parabolic, *depth)?;
                let mut out = offs
                    .iter()
                    .map(|w| Ok(CuspedVertex::horo(*parabolic, o.mul_word(base, w)?, *depth)))
                    .collect::<Result<Vec<_>>>()?;
                out.push(CuspedVertex::horo(*parabolic, base.clone(), depth - 1));
                out.push(CuspedVertex::horo(*parabolic, base.clone(), depth + 1));
                Ok(out)
            }
        }
    }
}

/// A ball in exportable form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallExport {
    pub center: String,
    pub radius: u32,
    pub vertices: Vec<String>,
    pub dist: Vec<u32>,
    pub adjacency: Vec<Vec<u32>>,
}

pub fn export_ball(x: &CuspedSpace, b: &BallGraph<CuspedVertex>) -> BallExport {
    BallExport {
        center: x.render(&b.center),
        radius: b.radius,
        vertices: b.vertices.iter().map(|v| x.render(v)).collect(),
        dist: b.dist.clone(),
        adjacency: b.adj.clone(),
    }
}
