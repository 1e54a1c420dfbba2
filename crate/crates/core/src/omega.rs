//! The completion `ℕ_ω` of the naturals and its finite powers.

use std::fmt;
use std::str::FromStr;

use crate::order::OrderedDomain;
use crate::ParseError;

/// A natural number or the top element `ω`.
///
/// The derived `Ord` is the tie-break order: naturals by value, `ω` above all.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OmegaNat {
    Fin(u64),
    Omega,
}

use OmegaNat::{Fin, Omega};

impl OmegaNat {
    pub fn is_omega(self) -> bool {
        matches!(self, Omega)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Fin(n) => Some(n),
            Omega => None,
        }
    }

    /// `self + delta`, or `None` if a finite value would go negative.
    /// `ω + delta = ω`.
    pub fn add_int(self, delta: i64) -> Option<OmegaNat> {
        match self {
            Omega => Some(Omega),
            Fin(n) => {
                let r = i128::from(n) + i128::from(delta);
                if r < 0 {
                    None
                } else {
                    Some(Fin(u64::try_from(r).expect("counter overflow")))
                }
            }
        }
    }

    /// Multiplication by a natural with `0 · ω = 0`.
    pub fn scale(self, c: u64) -> Option<OmegaNat> {
        match (self, c) {
            (_, 0) => Some(Fin(0)),
            (Omega, _) => Some(Omega),
            (Fin(n), c) => n.checked_mul(c).map(Fin),
        }
    }

    pub fn checked_add(self, other: OmegaNat) -> Option<OmegaNat> {
        match (self, other) {
            (Fin(a), Fin(b)) => a.checked_add(b).map(Fin),
            _ => Some(Omega),
        }
    }
}

impl fmt::Display for OmegaNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fin(n) => write!(f, "{n}"),
            Omega => f.write_str("w"),
        }
    }
}

impl FromStr for OmegaNat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "w" | "ω" => Ok(Omega),
            _ => s
                .parse::<u64>()
                .map(Fin)
                .map_err(|_| format!("expected a natural or `w`, found `{s}`")),
        }
    }
}

/// A point of `ℕ_ω^k`, ordered componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OmegaVec(Vec<OmegaNat>);

impl OmegaVec {
    pub fn new(coords: Vec<OmegaNat>) -> Self {
        assert!(!coords.is_empty(), "dimension must be at least 1");
        OmegaVec(coords)
    }

    /// The embedding of a concrete vector.
    pub fn from_naturals(values: &[u64]) -> Self {
        OmegaVec::new(values.iter().map(|&n| Fin(n)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[OmegaNat] {
        &self.0
    }

    pub fn get(&self, i: usize) -> OmegaNat {
        self.0[i]
    }

    /// Componentwise order. Panics on a dimension mismatch.
    pub fn leq(&self, other: &OmegaVec) -> bool {
        assert_eq!(
            self.dim(),
            other.dim(),
            "comparing vectors of different dimension"
        );
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Translation by an integer vector; `None` if a finite coordinate
    /// would become negative.
    pub fn add(&self, b: &[i64]) -> Option<OmegaVec> {
        assert_eq!(self.dim(), b.len(), "dimension mismatch");
        self.0
            .iter()
            .zip(b)
            .map(|(x, &d)| x.add_int(d))
            .collect::<Option<Vec<_>>>()
            .map(OmegaVec)
    }

    pub fn is_limit(&self) -> bool {
        self.0.iter().any(|x| x.is_omega())
    }

    /// The concrete vector, if there is no `ω` coordinate.
    pub fn to_naturals(&self) -> Option<Vec<u64>> {
        self.0.iter().map(|x| x.finite()).collect()
    }
}

impl OrderedDomain for OmegaVec {
    fn leq(&self, other: &Self) -> bool {
        OmegaVec::leq(self, other)
    }

    fn is_limit(&self) -> bool {
        OmegaVec::is_limit(self)
    }
}

impl fmt::Display for OmegaVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for OmegaVec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coords = s
            .split_whitespace()
            .map(|t| t.parse::<OmegaNat>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(ParseError::Value)?;
        if coords.is_empty() {
            return Err(ParseError::Value("empty vector".into()));
        }
        Ok(OmegaVec(coords))
    }
}

/// Lub of an ascending chain, given the coordinates known to diverge.
pub fn ovec_lub(chain: &[OmegaVec], diverging: &[usize]) -> OmegaVec {
    let last = chain.last().expect("chain must be nonempty");
    let mut coords = last.0.clone();
    for &i in diverging {
        coords[i] = Omega;
    }
    OmegaVec(coords)
}

/// A square matrix of naturals, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    dim: usize,
    entries: Vec<u64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Matrix { dim, entries }
    }

    /// Builds a matrix from its rows; `None` if they do not form a square.
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Option<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(Matrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.dim)
    }

    /// Every column holds at most one non-zero entry, and it equals 1.
    /// Resets and transfers fall in this class; it is closed under products
    /// and finite, so power sequences always cycle.
    pub fn is_reset_transfer(&self) -> bool {
        (0..self.dim).all(|j| {
            let col: Vec<u64> = (0..self.dim).map(|i| self.at(i, j)).collect();
            col.iter().all(|&e| e <= 1) && col.iter().filter(|&&e| e == 1).count() <= 1
        })
    }

    /// `self · other`, or `None` on overflow.
    pub fn checked_mul(&self, other: &Matrix) -> Option<Matrix> {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut entries = vec![0u64; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.at(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..d {
                    let p = a.checked_mul(other.at(k, j))?;
                    entries[i * d + j] = entries[i * d + j].checked_add(p)?;
                }
            }
        }
        Some(Matrix { dim: d, entries })
    }

    /// `self · v` over the integers, or `None` on overflow.
    pub fn checked_mul_int(&self, v: &[i64]) -> Option<Vec<i64>> {
        (0..self.dim)
            .map(|i| {
                self.row(i).iter().zip(v).try_fold(0i64, |acc, (&a, &x)| {
                    let a = i64::try_from(a).ok()?;
                    acc.checked_add(a.checked_mul(x)?)
                })
            })
            .collect()
    }
}

/// `A · x` over `ℕ_ω` with `0 · ω = 0`; `None` on overflow.
pub fn checked_mat_apply(a: &Matrix, x: &OmegaVec) -> Option<OmegaVec> {
    assert_eq!(a.dim(), x.dim(), "dimension mismatch");
    (0..a.dim())
        .map(|i| {
            a.row(i)
                .iter()
                .zip(x.coords())
                .try_fold(Fin(0), |acc, (&c, &v)| acc.checked_add(v.scale(c)?))
        })
        .collect::<Option<Vec<_>>>()
        .map(OmegaVec)
}

/// `A · x` over `ℕ_ω` with `0 · ω = 0`.
///
/// Panics if a finite coordinate overflows `u64`.
pub fn mat_apply(a: &Matrix, x: &OmegaVec) -> OmegaVec {
    checked_mat_apply(a, x).expect("counter overflow in matrix application")
}
