//! Finitely generated abelian groups in canonical coordinates.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::snf::{smith, to_matrix};
use super::word::{Letter, Word};
use crate::error::{Error, Result};

/// Canonical coordinates: torsion coordinates (each reduced into `0..order`)
/// followed by free coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianCoords(pub Vec<i64>);

impl AbelianCoords {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

/// `Z^free_rank x Z/d_1 x ... x Z/d_t` presented on `gen_count` generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    gen_count: usize,
    /// Invariant factors > 1, in divisibility order.
    torsion: Vec<i64>,
    free_rank: usize,
    /// Canonical coordinates of each generator.
    gen_images: Vec<Vec<i64>>,
    /// Rows of `V^{-1}` for the kept coordinates: exponent vector of a word
    /// realizing each unit coordinate.
    coord_words: Vec<Vec<i64>>,
}

fn to_i64(x: &BigInt, what: &str) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Unsupported(format!("{what} {x} exceeds 64-bit coordinates")))
}

impl AbelianGroup {
    /// The abelian group `Z^gen_count / <relator exponent vectors>`.
    pub fn from_relations(gen_count: usize, relations: &[Vec<i64>]) -> Result<Self> {
        let s = smith(&to_matrix(relations), gen_count);
        let mut torsion = Vec::new();
        let mut torsion_cols = Vec::new();
        let mut free_cols = Vec::new();
        for (j, d) in s.invariants.iter().enumerate() {
            if d.is_zero() {
                free_cols.push(j);
            } else if !d.is_one() {
                torsion.push(to_i64(d, "torsion order")?);
                torsion_cols.push(j);
            }
        }
        let kept: Vec<usize> = torsion_cols.iter().chain(&free_cols).copied().collect();
        let mut gen_images = Vec::with_capacity(gen_count);
        for g in 0..gen_count {
            let mut img = Vec::with_capacity(kept.len());
            for (slot, &j) in kept.iter().enumerate() {
                let mut x = to_i64(&s.v[g][j], "coordinate")?;
                if slot < torsion.len() {
                    x = x.rem_euclid(torsion[slot]);
                }
                img.push(x);
            }
            gen_images.push(img);
        }
        let coord_words = kept
            .iter()
            .map(|&j| s.v_inv[j].iter().map(|x| to_i64(x, "coordinate")).collect())
            .collect::<Result<Vec<_>>>()?;
        Ok(AbelianGroup {
            gen_count,
            torsion,
            free_rank: free_cols.len(),
            gen_images,
            coord_words,
        })
    }

    /// Free abelian group on `n` generators.
    pub fn free(n: usize) -> Self {
        Self::from_relations(n, &[]).expect("no relations")
    }

    pub fn gen_count(&self) -> usize {
        self.gen_count
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_orders(&self) -> &[i64] {
        &self.torsion
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// For abelian groups, virtually cyclic is the same as free rank at most one.
    pub fn is_virtually_cyclic(&self) -> bool {
        self.free_rank <= 1
    }

    pub fn order(&self) -> Option<u128> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().map(|&d| d as u128).product())
    }

    pub fn dim(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    pub fn zero(&self) -> AbelianCoords {
        AbelianCoords(vec![0; self.dim()])
    }

    pub fn generator(&self, g: usize) -> AbelianCoords {
        AbelianCoords(self.gen_images[g].clone())
    }

    fn reduce(&self, c: &mut [i64]) {
        for (x, &d) in c.iter_mut().zip(&self.torsion) {
            *x = x.rem_euclid(d);
        }
    }

    /// `a + k * b`.
    pub fn add_scaled(&self, a: &AbelianCoords, b: &AbelianCoords, k: i64) -> Result<AbelianCoords> {
        let mut out = Vec::with_capacity(a.0.len());
        for (x, y) in a.0.iter().zip(&b.0) {
            let v = y
                .checked_mul(k)
                .and_then(|p| x.checked_add(p))
                .ok_or_else(|| Error::Unsupported("abelian coordinate overflow".into()))?;
            out.push(v);
        }
        self.reduce(&mut out);
        Ok(AbelianCoords(out))
    }

    pub fn add(&self, a: &AbelianCoords, b: &AbelianCoords) -> Result<AbelianCoords> {
        self.add_scaled(a, b, 1)
    }

    pub fn neg(&self, a: &AbelianCoords) -> AbelianCoords {
        let mut out: Vec<i64> = a.0.iter().map(|x| -x).collect();
        self.reduce(&mut out);
        AbelianCoords(out)
    }

    pub fn apply_letter(&self, a: &AbelianCoords, l: Letter) -> Result<AbelianCoords> {
        let img = &self.gen_images[l.gen];
        let mut out = a.0.clone();
        for (x, y) in out.iter_mut().zip(img) {
            *x = if l.inv { x.checked_sub(*y) } else { x.checked_add(*y) }
                .ok_or_else(|| Error::Unsupported("abelian coordinate overflow".into()))?;
        }
        self.reduce(&mut out);
        Ok(AbelianCoords(out))
    }

    /// Canonical coordinates of a word in this group's generators.
    pub fn coords_of(&self, w: &Word) -> Result<AbelianCoords> {
        let mut c = self.zero();
        for &l in w.letters() {
            if l.gen >= self.gen_count {
                return Err(Error::validation(format!("letter x{} outside the abelian group", l.gen)));
            }
            c = self.apply_letter(&c, l)?;
        }
        Ok(c)
    }

    /// Splits coordinates into (free, torsion).
    pub fn split<'a>(&self, c: &'a AbelianCoords) -> (&'a [i64], &'a [i64]) {
        let t = self.torsion.len();
        (&c.0[t..], &c.0[..t])
    }

    /// A word representing the given coordinates, generators in index order.
    pub fn word_of(&self, c: &AbelianCoords) -> Word {
        let mut exps = vec![0i64; self.gen_count];
        for (k, row) in c.0.iter().zip(&self.coord_words) {
            for (e, r) in exps.iter_mut().zip(row) {
                *e += k * r;
            }
        }
        let mut w = Word::empty();
        for (g, &e) in exps.iter().enumerate() {
            w = w.concat(&Word::power(g, e));
        }
        w
    }
}
