//! Functional-lossy channel systems and their completion over word-products.

use std::fmt;

use crate::engine::{Accelerated, Wsts};
use crate::order::OrderedDomain;
use crate::words::{sober_recv, sober_send, wp_leq, Atom, Letter, WordProduct};
use crate::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Send(Letter),
    Recv(Letter),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub source: String,
    pub target: String,
    pub channel: usize,
    pub action: Action,
}

/// A completed state: a control state and one word-product per channel.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlcsState {
    pub control: String,
    pub channels: Vec<WordProduct>,
}

impl OrderedDomain for FlcsState {
    fn leq(&self, other: &Self) -> bool {
        self.control == other.control
            && self.channels.len() == other.channels.len()
            && self
                .channels
                .iter()
                .zip(&other.channels)
                .all(|(p, q)| wp_leq(p, q))
    }

    fn is_limit(&self) -> bool {
        self.channels.iter().any(WordProduct::has_star)
    }
}

impl fmt::Display for FlcsState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.control)?;
        for p in &self.channels {
            write!(f, " ; {p}")?;
        }
        Ok(())
    }
}

/// A concrete configuration: control state and channel contents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlcsConfig {
    pub control: String,
    pub words: Vec<Vec<Letter>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlcsModel {
    controls: Vec<String>,
    channels: Vec<String>,
    alphabet: Vec<Letter>,
    initial: FlcsConfig,
    rules: Vec<Rule>,
    names: Vec<String>,
}

impl FlcsModel {
    pub fn new(
        controls: Vec<String>,
        channels: Vec<String>,
        alphabet: Vec<Letter>,
        initial: FlcsConfig,
        rules: Vec<Rule>,
    ) -> Result<Self, ModelError> {
        let unknown = |kind, name: &str| ModelError::Unknown {
            kind,
            name: name.to_string(),
        };
        for (kind, list) in [("control", &controls), ("channel", &channels)] {
            for (i, c) in list.iter().enumerate() {
                if list[..i].contains(c) {
                    return Err(ModelError::Duplicate {
                        kind,
                        name: c.clone(),
                    });
                }
            }
        }
        if controls.is_empty() {
            return Err(ModelError::Other(
                "at least one control state is required".into(),
            ));
        }
        if !controls.contains(&initial.control) {
            return Err(unknown("control", &initial.control));
        }
        if initial.words.len() != channels.len() {
            return Err(ModelError::Other(format!(
                "init lists {} words for {} channels",
                initial.words.len(),
                channels.len()
            )));
        }
        let letter_ok = |l: &Letter| alphabet.contains(l);
        if let Some(l) = initial.words.iter().flatten().find(|l| !letter_ok(l)) {
            return Err(unknown("letter", &l.to_string()));
        }
        for r in &rules {
            for c in [&r.source, &r.target] {
                if !controls.contains(c) {
                    return Err(unknown("control", c));
                }
            }
            if r.channel >= channels.len() {
                return Err(unknown("channel", &r.channel.to_string()));
            }
            let (Action::Send(l) | Action::Recv(l)) = r.action;
            if !letter_ok(&l) {
                return Err(unknown("letter", &l.to_string()));
            }
        }
        let names: Vec<String> = rules
            .iter()
            .map(|r| {
                let (op, l) = match r.action {
                    Action::Send(l) => ('!', l),
                    Action::Recv(l) => ('?', l),
                };
                format!(
                    "{}-{}{}{}->{}",
                    r.source, channels[r.channel], op, l, r.target
                )
            })
            .collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ModelError::Duplicate {
                    kind: "rule",
                    name: n.clone(),
                });
            }
        }
        Ok(FlcsModel {
            controls,
            channels,
            alphabet,
            initial,
            rules,
            names,
        })
    }

    pub fn controls(&self) -> &[String] {
        &self.controls
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn initial(&self) -> &FlcsConfig {
        &self.initial
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c == name)
    }

    pub fn rule_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn embed(&self, c: &FlcsConfig) -> FlcsState {
        FlcsState {
            control: c.control.clone(),
            channels: c
                .words
                .iter()
                .map(|w| crate::words::embed_word(w))
                .collect(),
        }
    }

    pub fn initial_state(&self) -> FlcsState {
        self.embed(&self.initial)
    }

    /// Applies `word` and, when the orbit is increasing, looks for a stable
    /// append pattern: the control returns each round and every channel
    /// grows by the same atom suffix `e` twice in a row. The candidate limit
    /// replaces each growing channel `P` by `P·(letters of e)*` and is accepted
    /// only if it dominates `s` and is a post-fixpoint of `g`.
    pub fn flcs_accelerate(
        &self,
        word: &[usize],
        s: &FlcsState,
        budget: usize,
    ) -> Option<Accelerated<FlcsState>> {
        let y = self.apply_word(word, s)?;
        if !s.less(&y) {
            return Some(Accelerated {
                value: y,
                exact: true,
            });
        }
        let mut prev = s.clone();
        let mut cur = y;
        for _ in 0..budget {
            let next = self
                .apply_word(word, &cur)
                .expect("increasing orbit stays in the domain");
            if next == cur {
                return Some(Accelerated {
                    value: cur,
                    exact: true,
                });
            }
            if let Some(limit) = self.append_limit(word, s, &prev, &cur, &next) {
                return Some(Accelerated {
                    value: limit,
                    exact: true,
                });
            }
            prev = cur;
            cur = next;
        }
        Some(Accelerated {
            value: cur,
            exact: false,
        })
    }

    fn append_limit(
        &self,
        word: &[usize],
        s: &FlcsState,
        prev: &FlcsState,
        cur: &FlcsState,
        next: &FlcsState,
    ) -> Option<FlcsState> {
        if prev.control != s.control || cur.control != s.control || next.control != s.control {
            return None;
        }
        let mut channels = Vec::with_capacity(cur.channels.len());
        for ((p0, p1), p2) in prev.channels.iter().zip(&cur.channels).zip(&next.channels) {
            let e1 = atom_suffix(p0, p1)?;
            let e2 = atom_suffix(p1, p2)?;
            if e1 != e2 {
                return None;
            }
            if e1.is_empty() {
                channels.push(p1.clone());
            } else {
                let letters = WordProduct::new(e1.to_vec()).letters();
                let mut atoms = p1.atoms().to_vec();
                atoms.push(Atom::Star(letters));
                channels.push(WordProduct::new(atoms));
            }
        }
        let limit = FlcsState {
            control: s.control.clone(),
            channels,
        };
        let image = self.apply_word(word, &limit)?;
        (image.leq(&limit) && s.leq(&limit)).then_some(limit)
    }
}

/// The atoms `e` with `longer = shorter · e`, if `shorter` is an atom prefix.
fn atom_suffix<'a>(shorter: &WordProduct, longer: &'a WordProduct) -> Option<&'a [Atom]> {
    let (a, b) = (shorter.atoms(), longer.atoms());
    (b.len() >= a.len() && b[..a.len()] == *a).then(|| &b[a.len()..])
}

/// One completed step of `rule` at `s`; `None` if the control differs or
/// the channel cannot supply the received letter.
pub fn flcs_sober_step(rule: &Rule, s: &FlcsState) -> Option<FlcsState> {
    if rule.source != s.control {
        return None;
    }
    let chan = &s.channels[rule.channel];
    let updated = match rule.action {
        Action::Send(a) => sober_send(a, chan),
        Action::Recv(a) => sober_recv(a, chan)?,
    };
    let mut channels = s.channels.clone();
    channels[rule.channel] = updated;
    Some(FlcsState {
        control: rule.target.clone(),
        channels,
    })
}

impl Wsts for FlcsModel {
    type State = FlcsState;

    fn transition_count(&self) -> usize {
        self.rules.len()
    }

    fn transition_name(&self, t: usize) -> &str {
        &self.names[t]
    }

    fn apply(&self, t: usize, s: &FlcsState) -> Option<FlcsState> {
        flcs_sober_step(&self.rules[t], s)
    }

    fn accelerate(
        &self,
        word: &[usize],
        s: &FlcsState,
        budget: usize,
    ) -> Option<Accelerated<FlcsState>> {
        self.flcs_accelerate(word, s, budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;

    fn l(c: char) -> Letter {
        Letter::new(c).unwrap()
    }

    fn st(control: &str, chans: &[&str]) -> FlcsState {
        FlcsState {
            control: control.into(),
            channels: chans.iter().map(|c| c.parse().unwrap()).collect(),
        }
    }

    fn rule(src: &str, tgt: &str, action: Action) -> Rule {
        Rule {
            source: src.into(),
            target: tgt.into(),
            channel: 0,
            action,
        }
    }

    fn model(rules: Vec<Rule>) -> FlcsModel {
        FlcsModel::new(
            vec!["q0".into(), "q1".into()],
            vec!["c".into()],
            vec![l('a'), l('b')],
            FlcsConfig {
                control: "q0".into(),
                words: vec![vec![]],
            },
            rules,
        )
        .unwrap()
    }

    #[test]
    fn sober_steps() {
        let send = rule("q0", "q0", Action::Send(l('a')));
        assert_eq!(
            flcs_sober_step(&send, &st("q0", &["eps"])),
            Some(st("q0", &["a?"]))
        );
        let recv = rule("q1", "q0", Action::Recv(l('a')));
        assert_eq!(
            flcs_sober_step(&recv, &st("q1", &["a?"])),
            Some(st("q0", &["eps"]))
        );
        assert_eq!(flcs_sober_step(&send, &st("q1", &["a?"])), None);
        assert_eq!(flcs_sober_step(&recv, &st("q1", &["b?"])), None);
    }

    #[test]
    fn send_loop_accelerates_to_star() {
        let m = model(vec![rule("q0", "q0", Action::Send(l('a')))]);
        let r = m.flcs_accelerate(&[0], &st("q0", &["eps"]), 256).unwrap();
        assert_eq!((r.value, r.exact), (st("q0", &["{a}*"]), true));
    }

    #[test]
    fn two_letter_send_loop() {
        let m = FlcsModel::new(
            vec!["q0".into()],
            vec!["c".into()],
            vec![l('a'), l('b')],
            FlcsConfig {
                control: "q0".into(),
                words: vec![parse_word("b").unwrap()],
            },
            vec![
                rule("q0", "q0", Action::Send(l('a'))),
                rule("q0", "q0", Action::Send(l('b'))),
            ],
        )
        .unwrap();
        let r = m.flcs_accelerate(&[0, 1], &m.initial_state(), 256).unwrap();
        assert_eq!((r.value, r.exact), (st("q0", &["{a,b}*"]), true));
    }

    #[test]
    fn send_receive_loop_is_a_fixpoint() {
        let m = model(vec![
            rule("q0", "q1", Action::Send(l('a'))),
            rule("q1", "q0", Action::Recv(l('a'))),
        ]);
        let r = m
            .flcs_accelerate(&[0, 1], &st("q0", &["eps"]), 256)
            .unwrap();
        assert_eq!((r.value, r.exact), (st("q0", &["eps"]), true));
        let r = m.flcs_accelerate(&[], &st("q0", &["a?"]), 256).unwrap();
        assert_eq!((r.value, r.exact), (st("q0", &["a?"]), true));
    }

    #[test]
    fn ordering_requires_equal_controls() {
        assert!(st("q0", &["a?"]).leq(&st("q0", &["{a}*"])));
        assert!(!st("q0", &["a?"]).leq(&st("q1", &["{a}*"])));
        assert!(st("q1", &["{a}*"]).is_limit());
        assert_eq!(st("q0", &["a?.b?"]).to_string(), "q0 ; a?.b?");
    }

    #[test]
    fn validation() {
        let bad = FlcsModel::new(
            vec!["q0".into()],
            vec!["c".into()],
            vec![l('a')],
            FlcsConfig {
                control: "q0".into(),
                words: vec![vec![]],
            },
            vec![rule("q0", "q9", Action::Send(l('a')))],
        );
        assert!(matches!(
            bad,
            Err(ModelError::Unknown {
                kind: "control",
                ..
            })
        ));
        let bad = FlcsModel::new(
            vec!["q0".into()],
            vec!["c".into()],
            vec![l('a')],
            FlcsConfig {
                control: "q0".into(),
                words: vec![vec![]],
            },
            vec![rule("q0", "q0", Action::Send(l('b')))],
        );
        assert!(matches!(
            bad,
            Err(ModelError::Unknown { kind: "letter", .. })
        ));
    }
}
