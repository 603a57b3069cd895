//! Smith normal form over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

/// Result of diagonalizing `A` (rows = relations, columns = generators).
///
/// `U * A * V = diag(invariants)` with `U`, `V` unimodular; only the column
/// transform `V` and its inverse are kept, since a row vector `x` of generator
/// exponents has canonical coordinates `x * V`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Diagonal entries, one per column; `0` marks a free coordinate. Nonzero
    /// entries are positive and each divides the next.
    pub invariants: Vec<BigInt>,
    pub v: Matrix,
    pub v_inv: Matrix,
}

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Column op on `m`: col[dst] += k * col[src].
fn col_axpy(m: &mut Matrix, dst: usize, src: usize, k: &BigInt) {
    for row in m.iter_mut() {
        let add = &row[src] * k;
        row[dst] += add;
    }
}

/// Row op on `m`: row[dst] += k * row[src].
fn row_axpy(m: &mut Matrix, dst: usize, src: usize, k: &BigInt) {
    let src_row = m[src].clone();
    for (d, s) in m[dst].iter_mut().zip(&src_row) {
        *d += s * k;
    }
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

pub fn smith(a: &Matrix, cols: usize) -> Smith {
    let mut m: Matrix = a.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let rows = m.len();
    let mut v = identity(cols);
    // V^{-1} receives the inverse row operations.
    let mut v_inv = identity(cols);

    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && pivot.is_none_or(|(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        if pj != t {
            swap_cols(&mut m, t, pj);
            swap_cols(&mut v, t, pj);
            v_inv.swap(t, pj);
        }

        let mut clean = true;
        for i in t + 1..rows {
            if !m[i][t].is_zero() {
                let q = m[i][t].div_floor(&m[t][t]);
                row_axpy(&mut m, i, t, &-q);
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..cols {
            if !m[t][j].is_zero() {
                let q = m[t][j].div_floor(&m[t][t]);
                let nq = -q.clone();
                col_axpy(&mut m, j, t, &nq);
                col_axpy(&mut v, j, t, &nq);
                // inverse: row[t] of V^{-1} += q * row[j]
                row_axpy(&mut v_inv, t, j, &q);
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // divisibility: the pivot must divide the rest of the block
        let mut fix = None;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&m[i][j] % &m[t][t]).is_zero() {
                    fix = Some(i);
                    break 'outer;
                }
            }
        }
        if let Some(i) = fix {
            row_axpy(&mut m, t, i, &BigInt::one());
            continue;
        }
        if m[t][t].is_negative() {
            for row in m.iter_mut() {
                row[t] = -row[t].clone();
            }
            for row in v.iter_mut() {
                row[t] = -row[t].clone();
            }
            for x in v_inv[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }

    let invariants = (0..cols)
        .map(|j| if j < rows { m[j][j].clone() } else { BigInt::zero() })
        .collect();
    Smith { invariants, v, v_inv }
}

/// A basis of the integer left kernel `{x : x * B = 0}`.
pub fn left_kernel(b: &Matrix, cols: usize) -> Matrix {
    let rows = b.len();
    // augmented [B | I], reduced with unimodular row operations
    let mut m: Matrix = b
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let mut lead = 0;
    for c in 0..cols {
        loop {
            let nz: Vec<usize> = (lead..rows).filter(|&i| !m[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&i) = nz.first() {
                    m.swap(lead, i);
                    lead += 1;
                }
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| m[i][c].abs()).expect("nonempty");
            for &i in &nz {
                if i != p {
                    let q = m[i][c].div_floor(&m[p][c]);
                    row_axpy(&mut m, i, p, &-q);
                }
            }
        }
        if lead == rows {
            break;
        }
    }
    m[lead..]
        .iter()
        .filter(|r| r[..cols].iter().all(|x| x.is_zero()))
        .map(|r| r[cols..].to_vec())
        .collect()
}

/// Inverse of a square integer matrix with determinant `±1`.
pub fn inverse_unimodular(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        loop {
            let nz: Vec<usize> = (c..n).filter(|&i| !m[i][c].is_zero()).collect();
            match nz.len() {
                0 => return None,
                1 => {
                    m.swap(c, nz[0]);
                    break;
                }
                _ => {
                    let p = *nz.iter().min_by_key(|&&i| m[i][c].abs()).expect("nonempty");
                    for &i in &nz {
                        if i != p {
                            let q = m[i][c].div_floor(&m[p][c]);
                            row_axpy(&mut m, i, p, &-q);
                        }
                    }
                }
            }
        }
        if !m[c][c].abs().is_one() {
            return None;
        }
        if m[c][c].is_negative() {
            for x in m[c].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let q = m[i][c].clone();
                row_axpy(&mut m, i, c, &-q);
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Multiplies row vector `x` by matrix `m`.
pub fn row_times(x: &[BigInt], m: &Matrix) -> Vec<BigInt> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![BigInt::zero(); cols];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += xi * r;
        }
    }
    out
}

pub fn to_matrix(rows: &[Vec<i64>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
        a.iter().map(|r| row_times(r, b)).collect()
    }

    #[test]
    fn cyclic_and_free() {
        let s = smith(&to_matrix(&[vec![0, 4]]), 2);
        assert_eq!(s.invariants, vec![BigInt::from(4), BigInt::zero()]);
        let s = smith(&to_matrix(&[vec![2, 0], vec![0, 3]]), 2);
        assert_eq!(s.invariants, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn kernel_of_torsion_map() {
        // x -> 2x in Z/4: kernel of [2] modulo [4] is generated by x = 2
        let b = to_matrix(&[vec![2], vec![4]]);
        let k = left_kernel(&b, 1);
        for v in &k {
            assert!((&v[0] * BigInt::from(2) + &v[1] * BigInt::from(4)).is_zero());
        }
        let g = smith(&k.iter().map(|v| vec![v[0].clone()]).collect::<Vec<_>>(), 1);
        assert_eq!(g.invariants, vec![BigInt::from(2)]);
    }

    #[test]
    fn unimodular_inverse() {
        let a = to_matrix(&[vec![1, 0], vec![1, 1]]);
        let inv = inverse_unimodular(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse_unimodular(&to_matrix(&[vec![2, 0], vec![0, 1]])).is_none());
        assert_eq!(inverse_unimodular(&Vec::new()), Some(Vec::new()));
    }

    #[test]
    fn no_relations() {
        let s = smith(&Vec::new(), 3);
        assert!(s.invariants.iter().all(|d| d.is_zero()));
    }

    proptest! {
        #[test]
        fn diagonalizes(entries in proptest::collection::vec(-9i64..10, 6)) {
            let a = to_matrix(&[entries[..3].to_vec(), entries[3..].to_vec()]);
            let s = smith(&a, 3);
            // V * V^{-1} = I
            prop_assert_eq!(mat_mul(&s.v, &s.v_inv), identity(3));
            // A V has rows in the row space of the diagonal: each column j is
            // divisible by the j-th invariant (and zero where it is zero).
            let av = mat_mul(&a, &s.v);
            for row in &av {
                for (j, x) in row.iter().enumerate() {
                    let d = &s.invariants[j];
                    if d.is_zero() { prop_assert!(x.is_zero()); }
                    else { prop_assert!((x % d).is_zero()); }
                }
            }
            // divisibility chain
            let nz: Vec<_> = s.invariants.iter().filter(|d| !d.is_zero()).collect();
            for w in nz.windows(2) { prop_assert!((w[1] % w[0]).is_zero()); }
        }
    }
}
