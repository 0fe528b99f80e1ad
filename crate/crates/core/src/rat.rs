//! Exact rational scalars, small rational matrices, and integer lattice
//! normal forms. Everything here is exact; floats never enter.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The scalar type used for every coordinate, endpoint, and measure.
pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from(BigInt::from(p))
}

/// Parse "p/q" or "p".
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let mk_err = || Error::InvalidRational(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| mk_err())?;
        let q: BigInt = q.trim().parse().map_err(|_| mk_err())?;
        if q.is_zero() {
            return Err(mk_err());
        }
        Ok(Rat::new(p, q))
    } else {
        let p: BigInt = s.parse().map_err(|_| mk_err())?;
        Ok(Rat::from(p))
    }
}

pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    num_traits::ToPrimitive::to_f64(r).expect("rational out of f64 range")
}

/// Largest integer n with n <= r.
pub fn rat_floor(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// Fractional part in [0, 1).
pub fn rat_fract(r: &Rat) -> Rat {
    r - Rat::from(rat_floor(r))
}

/// Square rational matrix with exact Gaussian elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    pub n: usize,
    pub rows: Vec<Vec<Rat>>,
}

impl RatMat {
    pub fn new(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("matrix is not square".into()));
        }
        Ok(RatMat { n, rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        RatMat { n, rows }
    }

    pub fn diagonal(diag: &[Rat]) -> Self {
        let n = diag.len();
        let mut m = Self::identity(n);
        for i in 0..n {
            m.rows[i][i] = diag[i].clone();
        }
        m
    }

    pub fn is_diagonal(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, v)| i == j || v.is_zero())
        })
    }

    pub fn det(&self) -> Rat {
        let mut m = self.rows.clone();
        let n = self.n;
        let mut det = Rat::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return Rat::zero();
            };
            if p != col {
                m.swap(p, col);
                det = -det;
            }
            let pivot = m[col][col].clone();
            det *= &pivot;
            for r in col + 1..n {
                let factor = &m[r][col] / &pivot;
                for c in col..n {
                    let sub = &factor * &m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<RatMat> {
        let n = self.n;
        let mut m = self.rows.clone();
        let mut inv = RatMat::identity(n).rows;
        for col in 0..n {
            let p = (col..n)
                .find(|&r| !m[r][col].is_zero())
                .ok_or_else(|| Error::InvalidMatrix("singular matrix".into()))?;
            m.swap(p, col);
            inv.swap(p, col);
            let pivot = m[col][col].clone();
            for c in 0..n {
                m[col][c] /= &pivot;
                inv[col][c] /= &pivot;
            }
            for r in 0..n {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].clone();
                for c in 0..n {
                    let sub = &factor * &m[col][c];
                    m[r][c] -= sub;
                    let sub = &factor * &inv[col][c];
                    inv[r][c] -= sub;
                }
            }
        }
        RatMat::new(inv)
    }

    pub fn transpose(&self) -> RatMat {
        let n = self.n;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect())
            .collect();
        RatMat { n, rows }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Square integer matrix (lattice basis, columns generate).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    pub n: usize,
    pub rows: Vec<Vec<BigInt>>,
}

impl IntMat {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("matrix is not square".into()));
        }
        Ok(IntMat { n, rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        IntMat { n, rows }
    }

    pub fn from_i64(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        )
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat {
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|v| Rat::from(v.clone())).collect())
                .collect(),
        }
    }

    pub fn det(&self) -> BigInt {
        let d = self.to_rat().det();
        debug_assert!(d.is_integer());
        d.to_integer()
    }
}

/// Column-style Hermite normal form of the lattice generated by the given
/// columns (vectors of length `dim`). Returns a lower-triangular basis with
/// positive diagonal, or an error if the generators do not span a full-rank
/// lattice.
pub fn hnf_basis(dim: usize, generators: &[Vec<BigInt>]) -> Result<IntMat> {
    // work on columns
    let mut cols: Vec<Vec<BigInt>> = generators.to_vec();
    for c in &cols {
        if c.len() != dim {
            return Err(Error::InvalidMatrix("generator length mismatch".into()));
        }
    }
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
    for row in 0..dim {
        // eliminate entries in `row` across remaining columns via gcd steps
        loop {
            let mut nonzero: Vec<usize> = (0..cols.len())
                .filter(|&i| !cols[i][row].is_zero())
                .collect();
            if nonzero.len() <= 1 {
                break;
            }
            nonzero.sort_by_key(|&i| cols[i][row].abs());
            let (small, other) = (nonzero[0], nonzero[1]);
            let q = &cols[other][row] / &cols[small][row];
            for r in 0..dim {
                let sub = &q * &cols[small][r];
                cols[other][r] -= sub;
            }
        }
        match (0..cols.len()).find(|&i| !cols[i][row].is_zero()) {
            Some(i) => {
                let mut col = cols.remove(i);
                if col[row].is_negative() {
                    for v in col.iter_mut() {
                        *v = -v.clone();
                    }
                }
                // reduce previously fixed columns against this pivot
                for b in basis.iter_mut() {
                    let q = b[row].div_euclid(&col[row]);
                    for r in 0..dim {
                        let sub = &q * &col[r];
                        b[r] -= sub;
                    }
                }
                basis.push(col);
            }
            None => {
                return Err(Error::InvalidMatrix(
                    "generators do not span a full-rank lattice".into(),
                ));
            }
        }
        // zero rows above the current one are preserved automatically:
        // remaining columns have zeros in all rows <= row
    }
    // assemble: basis[j] is the column with pivot in row j
    let rows = (0..dim)
        .map(|r| (0..dim).map(|c| basis[c][r].clone()).collect())
        .collect();
    IntMat::new(rows)
}

trait DivEuclid {
    fn div_euclid(&self, other: &Self) -> Self;
}

impl DivEuclid for BigInt {
    fn div_euclid(&self, other: &Self) -> Self {
        let (q, r) = num_integer::Integer::div_rem(self, other);
        if r.is_negative() {
            if other.is_positive() {
                q - 1
            } else {
                q + 1
            }
        } else {
            q
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("-7").unwrap(), rat_int(-7));
        assert_eq!(format_rat(&rat(6, 8)), "3/4");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn det_and_inverse() {
        let m = RatMat::new(vec![
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ])
        .unwrap();
        assert_eq!(m.det(), rat_int(1));
        let inv = m.inverse().unwrap();
        assert_eq!(inv.apply(&[rat_int(1), rat_int(0)]), vec![rat_int(1), rat_int(-1)]);
    }

    #[test]
    fn hnf_of_redundant_generators() {
        // lattice generated by (2,0),(0,2),(1,1) is {(a,b): a+b even}
        let gens = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(2)],
            vec![BigInt::from(1), BigInt::from(1)],
        ];
        let h = hnf_basis(2, &gens).unwrap();
        assert_eq!(h.det().magnitude().to_string(), "2");
    }
}
