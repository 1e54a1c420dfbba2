//! Coverability and boundedness verdicts read off a clover run.
//!
//! Every member of a run's antichain lies in the closure of the cover, even
//! when the run ran out of budget, so positive coverability answers and
//! negative boundedness answers are sound on partial runs. The converse
//! answers need a complete run with exact accelerations.

use std::fmt;

use thiserror::Error;

use crate::engine::{CloverRun, Wsts};
use crate::flcs::{FlcsConfig, FlcsModel};
use crate::omega::{OmegaNat, OmegaVec};
use crate::order::OrderedDomain;
use crate::words::contains_word;
use crate::AcsModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence<S> {
    /// A clover element supporting the answer.
    Witness(S),
    /// The whole clover.
    Clover(Vec<S>),
    /// The run stopped on its budget.
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict<S> {
    pub answer: Answer,
    pub evidence: Evidence<S>,
}

impl<S> Verdict<S> {
    fn yes(evidence: Evidence<S>) -> Self {
        Verdict {
            answer: Answer::Yes,
            evidence,
        }
    }

    fn no(evidence: Evidence<S>) -> Self {
        Verdict {
            answer: Answer::No,
            evidence,
        }
    }

    fn unknown() -> Self {
        Verdict {
            answer: Answer::Unknown,
            evidence: Evidence::Budget,
        }
    }
}

impl<S: fmt::Display> fmt::Display for Verdict<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.answer {
            Answer::Yes => "YES",
            Answer::No => "NO",
            Answer::Unknown => return f.write_str("UNKNOWN (budget)"),
        };
        match &self.evidence {
            Evidence::Witness(s) => write!(f, "{head} {s}"),
            Evidence::Clover(set) => {
                write!(f, "{head} {{")?;
                for (i, s) in set.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str("}")
            }
            Evidence::Budget => write!(f, "{head} (budget)"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("expected dimension {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },
    #[error("{0}")]
    Mismatch(String),
    #[error("the upward basis is empty")]
    EmptyBasis,
}

/// A completion with its concrete states.
///
/// For every concrete `p`, `↓p ∩ ↑u` must be finite; this holds for `ℕ^k`
/// and for words under the subword order, and lets boundedness questions be
/// answered from the closure of the cover.
pub trait Completion: Wsts {
    type Concrete;

    fn check_concrete(&self, c: &Self::Concrete) -> Result<(), AnalysisError>;

    /// The embedding `η`.
    fn embed(&self, c: &Self::Concrete) -> Self::State;

    /// Whether `{x concrete | u ≤ x ≤ c}` is infinite.
    fn infinite_section(&self, c: &Self::State, u: &Self::Concrete) -> bool;
}

impl Completion for AcsModel {
    type Concrete = Vec<u64>;

    fn check_concrete(&self, c: &Vec<u64>) -> Result<(), AnalysisError> {
        if c.len() == self.dim() {
            Ok(())
        } else {
            Err(AnalysisError::Dimension {
                expected: self.dim(),
                found: c.len(),
            })
        }
    }

    fn embed(&self, c: &Vec<u64>) -> OmegaVec {
        OmegaVec::from_naturals(c)
    }

    fn infinite_section(&self, c: &OmegaVec, u: &Vec<u64>) -> bool {
        OmegaVec::from_naturals(u).leq(c) && c.is_limit()
    }
}

impl Completion for FlcsModel {
    type Concrete = FlcsConfig;

    fn check_concrete(&self, c: &FlcsConfig) -> Result<(), AnalysisError> {
        if !self.controls().contains(&c.control) {
            return Err(AnalysisError::Mismatch(format!(
                "unknown control `{}`",
                c.control
            )));
        }
        if c.words.len() != self.channels().len() {
            return Err(AnalysisError::Mismatch(format!(
                "expected {} channel words, found {}",
                self.channels().len(),
                c.words.len()
            )));
        }
        match c
            .words
            .iter()
            .flatten()
            .find(|l| !self.alphabet().contains(l))
        {
            Some(l) => Err(AnalysisError::Mismatch(format!(
                "letter `{l}` not in the alphabet"
            ))),
            None => Ok(()),
        }
    }

    fn embed(&self, c: &FlcsConfig) -> crate::FlcsState {
        FlcsModel::embed(self, c)
    }

    fn infinite_section(&self, c: &crate::FlcsState, u: &FlcsConfig) -> bool {
        c.control == u.control
            && u.words
                .iter()
                .zip(&c.channels)
                .all(|(w, p)| contains_word(w, p))
            && c.channels.iter().any(|p| p.has_star())
    }
}

/// Whether some state reachable from `s0` dominates `t`.
pub fn coverability<W: Completion>(
    instance: &W,
    run: &CloverRun<W::State>,
    t: &W::Concrete,
) -> Result<Verdict<W::State>, AnalysisError> {
    instance.check_concrete(t)?;
    let target = instance.embed(t);
    if let Some(w) = run.result.iter().find(|c| target.leq(c)) {
        return Ok(Verdict::yes(Evidence::Witness(w.clone())));
    }
    Ok(if run.is_exact_clover() {
        Verdict::no(Evidence::Clover(run.result.clone()))
    } else {
        Verdict::unknown()
    })
}

/// Yes iff the reachability set is finite.
pub fn boundedness<S: OrderedDomain + Clone>(run: &CloverRun<S>) -> Verdict<S> {
    if let Some(w) = run.result.iter().find(|c| c.is_limit()) {
        return Verdict::no(Evidence::Witness(w.clone()));
    }
    if run.is_exact_clover() {
        Verdict::yes(Evidence::Clover(run.result.clone()))
    } else {
        Verdict::unknown()
    }
}

/// Yes iff coordinate `index` is bounded over the reachability set.
pub fn place_bounded(
    run: &CloverRun<OmegaVec>,
    index: usize,
) -> Result<Verdict<OmegaVec>, AnalysisError> {
    if let Some(first) = run.result.first() {
        if index >= first.dim() {
            return Err(AnalysisError::Index {
                index,
                dim: first.dim(),
            });
        }
    }
    if let Some(w) = run.result.iter().find(|c| c.get(index) == OmegaNat::Omega) {
        return Ok(Verdict::no(Evidence::Witness(w.clone())));
    }
    Ok(if run.is_exact_clover() {
        Verdict::yes(Evidence::Clover(run.result.clone()))
    } else {
        Verdict::unknown()
    })
}

/// Yes iff finitely many reachable states lie in `↑basis`.
pub fn u_bounded<W: Completion>(
    instance: &W,
    run: &CloverRun<W::State>,
    basis: &[W::Concrete],
) -> Result<Verdict<W::State>, AnalysisError> {
    if basis.is_empty() {
        return Err(AnalysisError::EmptyBasis);
    }
    for u in basis {
        instance.check_concrete(u)?;
    }
    for c in &run.result {
        if basis.iter().any(|u| instance.infinite_section(c, u)) {
            return Ok(Verdict::no(Evidence::Witness(c.clone())));
        }
    }
    Ok(if run.is_exact_clover() {
        Verdict::yes(Evidence::Clover(run.result.clone()))
    } else {
        Verdict::unknown()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_clover, Budgets, RunOptions};
    use crate::flcs::{Action, Rule};
    use crate::words::Letter;
    use crate::AffineMap;

    fn v(s: &str) -> OmegaVec {
        s.parse().unwrap()
    }

    fn shuttle() -> AcsModel {
        AcsModel::new(
            2,
            vec![1, 0],
            vec![
                AffineMap::translation("fwd", vec![-1, 1], vec![1, 0]).unwrap(),
                AffineMap::translation("back", vec![1, -1], vec![0, 1]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn pump() -> AcsModel {
        AcsModel::new(
            2,
            vec![0, 0],
            vec![AffineMap::translation("t", vec![0, 1], vec![0, 0]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn coverability_on_a_complete_run() {
        let net = shuttle();
        let run = run_clover(&net, net.initial_state(), &RunOptions::default());
        let yes = coverability(&net, &run, &vec![0, 1]).unwrap();
        assert_eq!(yes, Verdict::yes(Evidence::Witness(v("0 1"))));
        let no = coverability(&net, &run, &vec![1, 1]).unwrap();
        assert_eq!(no.answer, Answer::No);
        assert_eq!(no.to_string(), "NO {0 1 | 1 0}");
        assert_eq!(
            coverability(&net, &run, &vec![1]),
            Err(AnalysisError::Dimension {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn partial_runs_only_give_sound_answers() {
        let net = shuttle();
        let budgets = Budgets {
            rounds: 0,
            accel_steps: 1,
        };
        let run = run_clover(
            &net,
            net.initial_state(),
            &RunOptions::with_budgets(budgets),
        );
        assert!(!run.is_complete());
        assert_eq!(
            coverability(&net, &run, &vec![1, 0]).unwrap().answer,
            Answer::Yes
        );
        assert_eq!(
            coverability(&net, &run, &vec![5, 5]).unwrap().to_string(),
            "UNKNOWN (budget)"
        );
        assert_eq!(boundedness(&run).answer, Answer::Unknown);
    }

    #[test]
    fn boundedness_and_places() {
        let net = pump();
        let run = run_clover(&net, net.initial_state(), &RunOptions::default());
        assert_eq!(boundedness(&run).to_string(), "NO 0 w");
        assert_eq!(place_bounded(&run, 0).unwrap().answer, Answer::Yes);
        assert_eq!(place_bounded(&run, 1).unwrap().answer, Answer::No);
        assert_eq!(
            place_bounded(&run, 2),
            Err(AnalysisError::Index { index: 2, dim: 2 })
        );

        let net = shuttle();
        let run = run_clover(&net, net.initial_state(), &RunOptions::default());
        assert_eq!(boundedness(&run).answer, Answer::Yes);
    }

    #[test]
    fn u_boundedness_looks_above_the_basis() {
        let net = pump();
        let run = run_clover(&net, net.initial_state(), &RunOptions::default());
        assert_eq!(
            u_bounded(&net, &run, &[vec![0, 3]]).unwrap().answer,
            Answer::No
        );
        // ↑(1, 0) misses every reachable state
        assert_eq!(
            u_bounded(&net, &run, &[vec![1, 0]]).unwrap().answer,
            Answer::Yes
        );
        assert_eq!(u_bounded(&net, &run, &[]), Err(AnalysisError::EmptyBasis));
    }

    #[test]
    fn channel_queries() {
        let a = Letter::new('a').unwrap();
        let m = FlcsModel::new(
            vec!["q0".into()],
            vec!["c".into()],
            vec![a],
            FlcsConfig {
                control: "q0".into(),
                words: vec![vec![]],
            },
            vec![Rule {
                source: "q0".into(),
                target: "q0".into(),
                channel: 0,
                action: Action::Send(a),
            }],
        )
        .unwrap();
        let run = run_clover(&m, m.initial_state(), &RunOptions::default());
        let cfg = |q: &str, w: usize| FlcsConfig {
            control: q.into(),
            words: vec![vec![a; w]],
        };
        assert_eq!(
            coverability(&m, &run, &cfg("q0", 9)).unwrap().answer,
            Answer::Yes
        );
        assert_eq!(boundedness(&run).answer, Answer::No);
        assert_eq!(
            u_bounded(&m, &run, &[cfg("q0", 2)]).unwrap().answer,
            Answer::No
        );
        assert!(matches!(
            coverability(&m, &run, &cfg("q9", 0)),
            Err(AnalysisError::Mismatch(_))
        ));
    }
}
