//! Affine counter systems: monotonic partial maps `x ↦ Ax + b` on `ℕ^k`
//! with upward-cone domains, extended continuously to `ℕ_ω^k`.
//!
//! Petri nets (identity matrices), reset nets and transfer nets are all
//! special cases.

use std::collections::HashMap;

use crate::engine::{Accelerated, Wsts};
use crate::omega::{checked_mat_apply, Matrix, OmegaNat, OmegaVec};
use crate::order::OrderedDomain;
use crate::ModelError;

/// Number of distinct matrix powers explored before falling back to
/// pointwise iteration.
pub const POWER_BUDGET: usize = 64;

/// Arithmetic left the range of `u64`/`i64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overflow;

pub type AccelResult = Accelerated<OmegaVec>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    name: String,
    matrix: Matrix,
    offset: Vec<i64>,
    guard: Vec<u64>,
}

impl AffineMap {
    /// Checks dimensions and that the guard cone is mapped into `ℕ^k`.
    pub fn new(
        name: impl Into<String>,
        matrix: Matrix,
        offset: Vec<i64>,
        guard: Vec<u64>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        let dim = matrix.dim();
        for found in [offset.len(), guard.len()] {
            if found != dim {
                return Err(ModelError::Dimension {
                    map: name,
                    expected: dim,
                    found,
                });
            }
        }
        let g = OmegaVec::from_naturals(&guard);
        let image = checked_mat_apply(&matrix, &g)
            .ok_or_else(|| ModelError::Other(format!("map `{name}`: overflow")))?;
        for (i, (x, &b)) in image.coords().iter().zip(&offset).enumerate() {
            if x.add_int(b).is_none() {
                return Err(ModelError::NegativeImage {
                    map: name,
                    coord: i,
                });
            }
        }
        Ok(AffineMap {
            name,
            matrix,
            offset,
            guard,
        })
    }

    /// A Petri transition `x ↦ x + delta` enabled on `x ≥ guard`.
    pub fn translation(
        name: impl Into<String>,
        delta: Vec<i64>,
        guard: Vec<u64>,
    ) -> Result<Self, ModelError> {
        let dim = delta.len();
        AffineMap::new(name, Matrix::identity(dim), delta, guard)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    pub fn guard(&self) -> &[u64] {
        &self.guard
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn enabled(&self, x: &OmegaVec) -> bool {
        x.coords()
            .iter()
            .zip(&self.guard)
            .all(|(v, &g)| *v >= OmegaNat::Fin(g))
    }

    /// The continuous extension, with overflow reported.
    pub fn checked_apply(&self, x: &OmegaVec) -> Result<Option<OmegaVec>, Overflow> {
        if !self.enabled(x) {
            return Ok(None);
        }
        let ax = checked_mat_apply(&self.matrix, x).ok_or(Overflow)?;
        Ok(Some(ax.add(&self.offset).expect(
            "well-definedness guarantees a nonnegative image on the domain",
        )))
    }

    /// The continuous extension of the map to `ℕ_ω^k`: defined iff
    /// `x ≥ guard`, computed as `Ax + b` with `0 · ω = 0`.
    pub fn sober_apply(&self, x: &OmegaVec) -> Option<OmegaVec> {
        self.checked_apply(x).expect("counter overflow")
    }
}

/// `x ↦ Ax + b` without domain information; used for composed words.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Affine {
    matrix: Matrix,
    offset: Vec<i64>,
}

impl Affine {
    fn identity(dim: usize) -> Self {
        Affine {
            matrix: Matrix::identity(dim),
            offset: vec![0; dim],
        }
    }

    /// `next ∘ self`.
    fn then(&self, next: &Matrix, next_offset: &[i64]) -> Option<Affine> {
        let matrix = next.checked_mul(&self.matrix)?;
        let moved = next.checked_mul_int(&self.offset)?;
        let offset = moved
            .iter()
            .zip(next_offset)
            .map(|(a, b)| a.checked_add(*b))
            .collect::<Option<Vec<_>>>()?;
        Some(Affine { matrix, offset })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcsModel {
    dim: usize,
    initial: Vec<u64>,
    maps: Vec<AffineMap>,
}

impl AcsModel {
    pub fn new(dim: usize, initial: Vec<u64>, maps: Vec<AffineMap>) -> Result<Self, ModelError> {
        if dim == 0 {
            return Err(ModelError::Other("dimension must be at least 1".into()));
        }
        if initial.len() != dim {
            return Err(ModelError::Dimension {
                map: "init".into(),
                expected: dim,
                found: initial.len(),
            });
        }
        for (i, m) in maps.iter().enumerate() {
            if m.dim() != dim {
                return Err(ModelError::Dimension {
                    map: m.name.clone(),
                    expected: dim,
                    found: m.dim(),
                });
            }
            if maps[..i].iter().any(|o| o.name == m.name) {
                return Err(ModelError::Duplicate {
                    kind: "map",
                    name: m.name.clone(),
                });
            }
        }
        Ok(AcsModel { dim, initial, maps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn initial(&self) -> &[u64] {
        &self.initial
    }

    pub fn initial_state(&self) -> OmegaVec {
        OmegaVec::from_naturals(&self.initial)
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    /// True when every map is a translation (a plain Petri net).
    pub fn is_petri(&self) -> bool {
        self.maps.iter().all(|m| m.matrix.is_identity())
    }

    pub fn map_index(&self, name: &str) -> Option<usize> {
        self.maps.iter().position(|m| m.name == name)
    }

    pub fn resolve(&self, names: &[&str]) -> Result<Vec<usize>, ModelError> {
        names
            .iter()
            .map(|n| {
                self.map_index(n).ok_or_else(|| ModelError::Unknown {
                    kind: "map",
                    name: n.to_string(),
                })
            })
            .collect()
    }

    /// Sequential application of the named maps, first name first.
    pub fn orbit_compose(
        &self,
        names: &[&str],
        x: &OmegaVec,
    ) -> Result<Option<OmegaVec>, ModelError> {
        let word = self.resolve(names)?;
        Ok(self.apply_word(&word, x))
    }

    fn checked_apply_word(
        &self,
        word: &[usize],
        x: &OmegaVec,
    ) -> Result<Option<OmegaVec>, Overflow> {
        let mut cur = x.clone();
        for &t in word {
            match self.maps[t].checked_apply(&cur)? {
                Some(next) => cur = next,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    fn compose(&self, word: &[usize]) -> Option<Affine> {
        word.iter().try_fold(Affine::identity(self.dim), |acc, &t| {
            acc.then(&self.maps[t].matrix, &self.maps[t].offset)
        })
    }

    /// Lub-acceleration of the word `g` at `x`.
    ///
    /// When `x < g(x)` the orbit `g^n(x)` is increasing. The composed matrix
    /// `A` is raised until a repeat `A^m = A^n` appears; `M = A^j` with `j` the
    /// multiple of the period reaching past `m` is then idempotent, so
    /// `(g^j)^n(x) = Mx + c + (n-1)Mc` where `c` is the offset of `g^j`. A
    /// coordinate diverges iff it is already `ω` or `(Mc)_i > 0`. If no repeat
    /// shows up within [`POWER_BUDGET`] powers the orbit is iterated up to
    /// `budget` times instead and the result may be inexact.
    pub fn accelerate(&self, word: &[usize], x: &OmegaVec, budget: usize) -> Option<AccelResult> {
        let y = self.apply_word(word, x)?;
        if !x.less(&y) {
            return Some(Accelerated {
                value: y,
                exact: true,
            });
        }
        if let Some(value) = self.accelerate_idempotent(word, x) {
            return Some(Accelerated { value, exact: true });
        }
        Some(self.accelerate_by_iteration(word, y, budget))
    }

    fn accelerate_idempotent(&self, word: &[usize], x: &OmegaVec) -> Option<OmegaVec> {
        let g = self.compose(word)?;
        let mut powers: Vec<Matrix> = vec![g.matrix.clone()];
        let mut seen: HashMap<Matrix, usize> = HashMap::new();
        seen.insert(g.matrix.clone(), 1);
        let (first, repeat) = loop {
            if powers.len() >= POWER_BUDGET {
                return None;
            }
            let next = powers.last().unwrap().checked_mul(&g.matrix)?;
            let n = powers.len() + 1;
            if let Some(&m) = seen.get(&next) {
                break (m, n);
            }
            seen.insert(next.clone(), n);
            powers.push(next);
        };
        let period = repeat - first;
        let j = period * first.div_ceil(period);
        let m = if j <= powers.len() {
            powers[j - 1].clone()
        } else {
            let mut p = powers.last().unwrap().clone();
            for _ in powers.len()..j {
                p = p.checked_mul(&g.matrix)?;
            }
            p
        };
        // offset of g^j
        let mut c = vec![0i64; self.dim];
        for _ in 0..j {
            c = g
                .matrix
                .checked_mul_int(&c)?
                .iter()
                .zip(&g.offset)
                .map(|(a, b)| a.checked_add(*b))
                .collect::<Option<Vec<_>>>()?;
        }
        let mc = m.checked_mul_int(&c)?;
        let base = checked_mat_apply(&m, x)?.add(&c)?;
        let coords = base
            .coords()
            .iter()
            .zip(&mc)
            .map(|(&v, &d)| {
                debug_assert!(v.is_omega() || d >= 0, "orbit must be increasing");
                if v.is_omega() || d > 0 {
                    OmegaNat::Omega
                } else {
                    v
                }
            })
            .collect();
        Some(OmegaVec::new(coords))
    }

    fn accelerate_by_iteration(
        &self,
        word: &[usize],
        first: OmegaVec,
        budget: usize,
    ) -> AccelResult {
        let mut cur = first;
        for _ in 0..budget {
            let next = match self.checked_apply_word(word, &cur) {
                Ok(Some(next)) => next,
                // the orbit is increasing, so it stays in the domain
                Ok(None) => unreachable!("increasing orbit left the domain"),
                Err(Overflow) => break,
            };
            if next == cur {
                return Accelerated {
                    value: cur,
                    exact: true,
                };
            }
            cur = next;
        }
        Accelerated {
            value: cur,
            exact: false,
        }
    }
}

impl Wsts for AcsModel {
    type State = OmegaVec;

    fn transition_count(&self) -> usize {
        self.maps.len()
    }

    fn transition_name(&self, t: usize) -> &str {
        &self.maps[t].name
    }

    fn apply(&self, t: usize, s: &OmegaVec) -> Option<OmegaVec> {
        self.maps[t].sober_apply(s)
    }

    fn accelerate(&self, word: &[usize], s: &OmegaVec, budget: usize) -> Option<AccelResult> {
        AcsModel::accelerate(self, word, s, budget)
    }
}

/// True iff some coordinate is `ω`.
pub fn is_limit_vec(x: &OmegaVec) -> bool {
    x.is_limit()
}
