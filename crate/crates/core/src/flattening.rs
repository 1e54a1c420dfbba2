//! rl-automata, synchronized products and the strong clover-flattening
//! check built from a completed run.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::engine::{run_clover, Accelerated, CloverRun, RunOptions, Wsts};
use crate::order::{max_of, OrderedDomain};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlattenError {
    #[error("component word {0} is empty")]
    EmptyWord(usize),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("the clover run did not complete")]
    Incomplete,
}

/// A DFA whose states are all accepting, recognizing `Pfx(w1* w2* … wk*)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RlAutomaton {
    alphabet: usize,
    words: Vec<Vec<usize>>,
    /// `delta[q][f]`
    delta: Vec<Vec<Option<usize>>>,
}

impl RlAutomaton {
    /// Determinizes the chain of cycles, one cycle per word, where the start
    /// of each cycle may silently advance to the start of the next.
    pub fn build(words: &[Vec<usize>], alphabet: usize) -> Result<Self, FlattenError> {
        if let Some(i) = words.iter().position(Vec::is_empty) {
            return Err(FlattenError::EmptyWord(i));
        }
        let closure = |mut set: BTreeSet<(usize, usize)>| {
            let starts: Vec<usize> = set
                .iter()
                .filter(|&&(_, p)| p == 0)
                .map(|&(i, _)| i)
                .collect();
            if let Some(&first) = starts.iter().min() {
                for i in first..words.len() {
                    set.insert((i, 0));
                }
            }
            set
        };
        let initial = if words.is_empty() {
            BTreeSet::new()
        } else {
            closure(BTreeSet::from([(0, 0)]))
        };
        let mut states = vec![initial.clone()];
        let mut index: HashMap<BTreeSet<(usize, usize)>, usize> = HashMap::from([(initial, 0)]);
        let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
        let mut q = 0;
        while q < states.len() {
            let mut row = vec![None; alphabet];
            for (f, slot) in row.iter_mut().enumerate() {
                let next: BTreeSet<(usize, usize)> = states[q]
                    .iter()
                    .filter(|&&(i, p)| words[i][p] == f)
                    .map(|&(i, p)| (i, (p + 1) % words[i].len()))
                    .collect();
                if next.is_empty() {
                    continue;
                }
                let next = closure(next);
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    states.len() - 1
                });
                *slot = Some(id);
            }
            delta.push(row);
            q += 1;
        }
        Ok(RlAutomaton {
            alphabet,
            words: words.to_vec(),
            delta,
        })
    }

    /// Parses `t1 ; t2 t3` against the transition names of `instance`.
    pub fn parse<W: Wsts>(text: &str, instance: &W) -> Result<Self, FlattenError> {
        let words = parse_rlre(text, instance)?;
        RlAutomaton::build(&words, instance.transition_count())
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn step(&self, q: usize, f: usize) -> Option<usize> {
        self.delta[q].get(f).copied().flatten()
    }

    pub fn run(&self, q: usize, word: &[usize]) -> Option<usize> {
        word.iter().try_fold(q, |q, &f| self.step(q, f))
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.run(self.initial(), word).is_some()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }
}

/// Parses words separated by `;`, names separated by spaces.
pub fn parse_rlre<W: Wsts>(text: &str, instance: &W) -> Result<Vec<Vec<usize>>, FlattenError> {
    let names: HashMap<&str, usize> = (0..instance.transition_count())
        .map(|t| (instance.transition_name(t), t))
        .collect();
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|w| {
            w.split_whitespace()
                .map(|n| {
                    names
                        .get(n)
                        .copied()
                        .ok_or_else(|| FlattenError::UnknownTransition(n.to_string()))
                })
                .collect()
        })
        .collect()
}

pub fn render_rlre<W: Wsts>(words: &[Vec<usize>], instance: &W) -> String {
    words
        .iter()
        .map(|w| instance.render_word(w))
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// A state of the synchronized product; comparable only at equal controls.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductState<S> {
    pub base: S,
    pub control: usize,
}

impl<S: OrderedDomain> OrderedDomain for ProductState<S> {
    fn leq(&self, other: &Self) -> bool {
        self.control == other.control && self.base.leq(&other.base)
    }

    fn is_limit(&self) -> bool {
        self.base.is_limit()
    }
}

impl<S: fmt::Display> fmt::Display for ProductState<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ q{}", self.base, self.control)
    }
}

/// `S × A`, with transitions `(s, q) ↦ (f(s), δ(q, f))`. Transitions of the
/// base whose `δ(·, f)` is nowhere defined are omitted.
pub struct SyncProduct<'a, W> {
    base: &'a W,
    automaton: &'a RlAutomaton,
    transitions: Vec<usize>,
}

impl<'a, W: Wsts> SyncProduct<'a, W> {
    pub fn new(base: &'a W, automaton: &'a RlAutomaton) -> Self {
        let transitions = (0..base.transition_count())
            .filter(|&f| (0..automaton.state_count()).any(|q| automaton.step(q, f).is_some()))
            .collect();
        SyncProduct {
            base,
            automaton,
            transitions,
        }
    }

    pub fn initial(&self, s0: W::State) -> ProductState<W::State> {
        ProductState {
            base: s0,
            control: self.automaton.initial(),
        }
    }

    /// The base transition behind product transition `t`.
    pub fn base_transition(&self, t: usize) -> usize {
        self.transitions[t]
    }

    fn base_word(&self, word: &[usize]) -> Vec<usize> {
        word.iter().map(|&t| self.transitions[t]).collect()
    }
}

impl<W: Wsts> Wsts for SyncProduct<'_, W> {
    type State = ProductState<W::State>;

    fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    fn transition_name(&self, t: usize) -> &str {
        self.base.transition_name(self.transitions[t])
    }

    fn apply(&self, t: usize, s: &Self::State) -> Option<Self::State> {
        let f = self.transitions[t];
        let control = self.automaton.step(s.control, f)?;
        let base = self.base.apply(f, &s.base)?;
        Some(ProductState { base, control })
    }

    fn accelerate(
        &self,
        word: &[usize],
        s: &Self::State,
        budget: usize,
    ) -> Option<Accelerated<Self::State>> {
        let word = self.base_word(word);
        let control = self.automaton.run(s.control, &word)?;
        let acc = if control == s.control {
            self.base.accelerate(&word, &s.base, budget)?
        } else {
            // different controls are incomparable, so the orbit is not increasing
            Accelerated {
                value: self.base.apply_word(&word, &s.base)?,
                exact: true,
            }
        };
        Some(Accelerated {
            value: ProductState {
                base: acc.value,
                control,
            },
            exact: acc.exact,
        })
    }
}

pub struct FlattenReport<S> {
    pub original: CloverRun<S>,
    pub automaton: RlAutomaton,
    pub product: CloverRun<ProductState<S>>,
    /// `Max π1⟨product clover⟩`.
    pub projected: Vec<S>,
    pub equal: bool,
}

/// Builds the rl-automaton from the words recorded by a complete run, runs
/// the Clover procedure on the synchronized product and compares the
/// projected clover with the original one.
pub fn flatten_check<W: Wsts>(
    instance: &W,
    s0: W::State,
    options: &RunOptions,
) -> Result<FlattenReport<W::State>, FlattenError> {
    let original = run_clover(instance, s0.clone(), options);
    flatten_check_run(instance, s0, original, options)
}

/// As [`flatten_check`], reusing an existing run.
pub fn flatten_check_run<W: Wsts>(
    instance: &W,
    s0: W::State,
    original: CloverRun<W::State>,
    options: &RunOptions,
) -> Result<FlattenReport<W::State>, FlattenError> {
    if !original.is_complete() {
        return Err(FlattenError::Incomplete);
    }
    let automaton = RlAutomaton::build(&original.accelerated_words, instance.transition_count())?;
    let product = SyncProduct::new(instance, &automaton);
    let product_run = run_clover(&product, product.initial(s0), options);
    let bases: Vec<W::State> = product_run.result.iter().map(|p| p.base.clone()).collect();
    let projected = max_of(&bases);
    let equal = product_run.is_complete() && projected == original.result;
    Ok(FlattenReport {
        original,
        automaton,
        product: product_run,
        projected,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acs::{AcsModel, AffineMap};

    fn names_model(names: &[&str]) -> AcsModel {
        let maps = names
            .iter()
            .map(|n| AffineMap::translation(*n, vec![0], vec![0]).unwrap())
            .collect();
        AcsModel::new(1, vec![0], maps).unwrap()
    }

    #[test]
    fn chain_of_cycles_language() {
        let m = names_model(&["t1", "t2", "t3"]);
        let aut = RlAutomaton::parse("t1 ; t2 t3", &m).unwrap();
        let w = |s: &str| -> Vec<usize> {
            s.split_whitespace()
                .map(|n| m.map_index(n).unwrap())
                .collect()
        };
        assert!(aut.accepts(&w("t1 t1 t2")));
        assert!(aut.accepts(&[]));
        assert!(!aut.accepts(&w("t3")));
        assert!(aut.accepts(&w("t2 t3 t2")));
        assert!(!aut.accepts(&w("t2 t3 t1")));
        assert!(!aut.accepts(&w("t2 t2")));
    }

    #[test]
    fn shared_prefixes_are_determinized() {
        let m = names_model(&["a", "b", "c"]);
        let aut = RlAutomaton::parse("a ; b c c ; b c a a", &m).unwrap();
        let w = |s: &str| -> Vec<usize> {
            s.split_whitespace()
                .map(|n| m.map_index(n).unwrap())
                .collect()
        };
        assert!(aut.accepts(&w("a a b c c b c a")));
        assert!(aut.accepts(&w("b c a a b c a")));
        assert!(!aut.accepts(&w("b c a a b c c")));
    }

    #[test]
    fn rejects_empty_words_and_unknown_names() {
        let m = names_model(&["t1"]);
        assert_eq!(
            RlAutomaton::build(&[vec![0], vec![]], 1),
            Err(FlattenError::EmptyWord(1))
        );
        assert_eq!(
            RlAutomaton::parse("t1 ; t9", &m),
            Err(FlattenError::UnknownTransition("t9".into()))
        );
        let empty = RlAutomaton::parse("", &m).unwrap();
        assert!(empty.accepts(&[]));
        assert!(!empty.accepts(&[0]));
    }

    #[test]
    fn product_steps() {
        let m = AcsModel::new(
            1,
            vec![0],
            vec![
                AffineMap::translation("f", vec![1], vec![0]).unwrap(),
                AffineMap::translation("g", vec![2], vec![0]).unwrap(),
            ],
        )
        .unwrap();
        let aut = RlAutomaton::parse("f", &m).unwrap();
        let p = SyncProduct::new(&m, &aut);
        assert_eq!(p.transition_count(), 1);
        let s = p.initial("3".parse().unwrap());
        let next = p.apply(0, &s).unwrap();
        assert_eq!(next.base, "4".parse().unwrap());
        assert_eq!(next.control, aut.step(0, 0).unwrap());
        let other = ProductState {
            base: s.base.clone(),
            control: 7,
        };
        assert!(!s.leq(&other));
    }
}
