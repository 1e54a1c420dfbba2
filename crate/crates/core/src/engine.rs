//! The Clover procedure over an ∞-effective complete WSTS.
//!
//! ```text
//! A ← {s0}
//! while Post(A) ≰♭ A:
//!     pick (g, a) ∈ F* × A fairly, with a ∈ dom g
//!     A ← A ∪ {accel g (a)}
//! return Max A
//! ```
//!
//! Fairness is realized by rounds: round `r` dispatches every word of length
//! at most `r` against every member of `A` present when the round starts,
//! skipping pairs dispatched earlier. Within a round members are visited in
//! tie-break order and words by length, then lexicographically by transition
//! name. `A` is kept as an antichain; all tests only observe `↓A`.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::ops::ControlFlow;

use crate::order::{hoare_leq, insert_reduced, is_dominated, OrderedDomain};

/// Result of a lub-acceleration. When `exact` is false, `value` is a finite
/// iterate of the orbit, hence still below the true lub.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accelerated<S> {
    pub value: S,
    pub exact: bool,
}

/// A complete WSTS with computable lub-accelerations.
///
/// Transitions are indexed `0..transition_count()`; words are sequences of
/// indices applied first to last.
pub trait Wsts {
    type State: OrderedDomain + Clone + Eq + Hash + Ord + fmt::Debug + fmt::Display;

    fn transition_count(&self) -> usize;

    fn transition_name(&self, t: usize) -> &str;

    /// The completed (continuous) transition; `None` outside its domain.
    fn apply(&self, t: usize, s: &Self::State) -> Option<Self::State>;

    /// `accel g (s)` for the composition `g` of `word`; `None` iff `g(s)` is
    /// undefined.
    fn accelerate(
        &self,
        word: &[usize],
        s: &Self::State,
        budget: usize,
    ) -> Option<Accelerated<Self::State>>;

    fn apply_word(&self, word: &[usize], s: &Self::State) -> Option<Self::State> {
        word.iter()
            .try_fold(s.clone(), |cur, &t| self.apply(t, &cur))
    }

    /// Names separated by spaces, `eps` for the empty word.
    fn render_word(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "eps".to_string();
        }
        word.iter()
            .map(|&t| self.transition_name(t))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Transition indices sorted by name.
    fn transitions_by_name(&self) -> Vec<usize> {
        let mut ts: Vec<usize> = (0..self.transition_count()).collect();
        ts.sort_by(|&a, &b| self.transition_name(a).cmp(self.transition_name(b)));
        ts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Number of scheduler rounds; round `r` uses words of length ≤ `r`.
    pub rounds: usize,
    /// Pointwise iteration budget for accelerations that need it.
    pub accel_steps: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            rounds: 12,
            accel_steps: 256,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub budgets: Budgets,
    /// Record every dispatched insertion in the transcript.
    pub trace: bool,
    /// Record `A` after every change.
    pub record_snapshots: bool,
}

impl RunOptions {
    pub fn with_budgets(budgets: Budgets) -> Self {
        RunOptions {
            budgets,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Complete,
    BudgetExhausted,
}

/// One dispatched pair `(g, a)` and the value inserted for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertion<S> {
    pub round: usize,
    pub word: Vec<usize>,
    pub source: S,
    pub result: S,
    pub exact: bool,
    /// Whether `↓A` strictly grew.
    pub grew: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CloverRun<S> {
    /// Final antichain, sorted by the tie-break order.
    pub result: Vec<S>,
    pub status: RunStatus,
    pub rounds: usize,
    /// Words whose insertion strictly enlarged `↓A`, in insertion order;
    /// consecutive repeats are collapsed.
    pub accelerated_words: Vec<Vec<usize>>,
    pub inexact_used: bool,
    /// Number of pairs dispatched, pruned ones excluded.
    pub dispatched: usize,
    pub transcript: Vec<Insertion<S>>,
    /// `A` initially and after each change, when requested.
    pub snapshots: Vec<Vec<S>>,
}

impl<S> CloverRun<S> {
    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Complete
    }

    /// Complete and every acceleration was exact.
    pub fn is_exact_clover(&self) -> bool {
        self.is_complete() && !self.inexact_used
    }
}

/// `Post(A) ≤♭ A`: every successor of every member is dominated by `A`.
pub fn post_flat_test<W: Wsts>(instance: &W, a: &[W::State]) -> bool {
    a.iter().all(|s| {
        (0..instance.transition_count())
            .filter_map(|t| instance.apply(t, s))
            .all(|succ| is_dominated(&succ, a))
    })
}

/// Whether the pair `(word, a)` can be skipped: `g(a)` is undefined, or
/// `a ≮ g(a)` and `g(a)` is already dominated by `set`.
pub fn prune_pair<W: Wsts>(instance: &W, word: &[usize], a: &W::State, set: &[W::State]) -> bool {
    match instance.apply_word(word, a) {
        None => true,
        Some(y) => !a.less(&y) && is_dominated(&y, set),
    }
}

/// Runs the Clover procedure from `s0`.
///
/// On `Complete`, the result passes the fixpoint test and dominates `s0`;
/// it is the clover whenever `inexact_used` is false. On `BudgetExhausted`
/// the result is an under-approximation: its downward closure lies inside
/// the closure of the cover.
pub fn run_clover<W: Wsts>(
    instance: &W,
    s0: W::State,
    options: &RunOptions,
) -> CloverRun<W::State> {
    let mut runner = Runner {
        instance,
        options,
        order: instance.transitions_by_name(),
        set: vec![s0],
        run: CloverRun {
            result: Vec::new(),
            status: RunStatus::BudgetExhausted,
            rounds: 0,
            accelerated_words: Vec::new(),
            inexact_used: false,
            dispatched: 0,
            transcript: Vec::new(),
            snapshots: Vec::new(),
        },
    };
    if options.record_snapshots {
        runner.run.snapshots.push(runner.set.clone());
    }
    if post_flat_test(instance, &runner.set) {
        return runner.finish(RunStatus::Complete);
    }
    let mut done_len: HashMap<W::State, usize> = HashMap::new();
    for round in 1..=options.budgets.rounds {
        runner.run.rounds = round;
        let members = runner.set.clone();
        for member in &members {
            let done = done_len.get(member).copied().unwrap_or(0);
            for len in done + 1..=round {
                let mut word = Vec::with_capacity(len);
                if runner
                    .explore(round, member, member, &mut word, len)
                    .is_break()
                {
                    return runner.finish(RunStatus::Complete);
                }
            }
            done_len.insert(member.clone(), round);
        }
    }
    runner.finish(RunStatus::BudgetExhausted)
}

struct Runner<'a, W: Wsts> {
    instance: &'a W,
    options: &'a RunOptions,
    order: Vec<usize>,
    set: Vec<W::State>,
    run: CloverRun<W::State>,
}

impl<W: Wsts> Runner<'_, W> {
    fn finish(mut self, status: RunStatus) -> CloverRun<W::State> {
        self.run.status = status;
        self.run.result = self.set;
        self.run
    }

    /// Enumerates words of length `remaining` more letters extending `word`,
    /// tracking the image of `source`. Breaks once the fixpoint test passes.
    fn explore(
        &mut self,
        round: usize,
        source: &W::State,
        current: &W::State,
        word: &mut Vec<usize>,
        remaining: usize,
    ) -> ControlFlow<()> {
        if remaining == 0 {
            return self.dispatch(round, source, word, current);
        }
        for i in 0..self.order.len() {
            let t = self.order[i];
            if let Some(next) = self.instance.apply(t, current) {
                word.push(t);
                let flow = self.explore(round, source, &next, word, remaining - 1);
                word.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    fn dispatch(
        &mut self,
        round: usize,
        source: &W::State,
        word: &[usize],
        image: &W::State,
    ) -> ControlFlow<()> {
        let acc = if source.less(image) {
            self.instance
                .accelerate(word, source, self.options.budgets.accel_steps)
                .expect("acceleration is defined wherever the word is")
        } else if is_dominated(image, &self.set) {
            return ControlFlow::Continue(());
        } else {
            Accelerated {
                value: image.clone(),
                exact: true,
            }
        };
        self.run.dispatched += 1;
        if !acc.exact {
            self.run.inexact_used = true;
        }
        let grew = insert_reduced(&mut self.set, acc.value.clone());
        if self.options.trace {
            self.run.transcript.push(Insertion {
                round,
                word: word.to_vec(),
                source: source.clone(),
                result: acc.value,
                exact: acc.exact,
                grew,
            });
        }
        if !grew {
            return ControlFlow::Continue(());
        }
        if self.run.accelerated_words.last().map(Vec::as_slice) != Some(word) {
            self.run.accelerated_words.push(word.to_vec());
        }
        if self.options.record_snapshots {
            self.run.snapshots.push(self.set.clone());
        }
        if post_flat_test(self.instance, &self.set) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }
}

/// `↓a ⊆ ↓b` for successive snapshots; used to audit recorded runs.
pub fn snapshots_grow<S: OrderedDomain>(snapshots: &[Vec<S>]) -> bool {
    snapshots.windows(2).all(|w| hoare_leq(&w[0], &w[1]))
}

/// Renders a transcript line `round, word, source, result`.
pub fn render_insertion<W: Wsts>(instance: &W, ins: &Insertion<W::State>) -> String {
    format!(
        "{}, {}, {}, {}",
        ins.round,
        instance.render_word(&ins.word),
        ins.source,
        ins.result
    )
}
