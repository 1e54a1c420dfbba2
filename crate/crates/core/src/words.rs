//! Word-products: the completion of `Σ*` under the subword ordering.
//!
//! A word-product is a sequence of atoms `a?` and `A*`; it denotes the
//! downward-closed language obtained by concatenating `{ε, a}` and `A*`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::order::OrderedDomain;
use crate::ParseError;

/// A channel letter: one ASCII alphanumeric character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(c: char) -> Option<Letter> {
        (c.is_ascii_alphanumeric()).then_some(Letter(c as u8))
    }

    pub fn as_char(self) -> char {
        self.0 as char
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Parses a concrete word; `eps` and the empty string are the empty word.
pub fn parse_word(s: &str) -> Result<Vec<Letter>, ParseError> {
    let s = s.trim();
    if s == "eps" {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| Letter::new(c).ok_or_else(|| ParseError::Value(format!("invalid letter `{c}`"))))
        .collect()
}

pub fn render_word(w: &[Letter]) -> String {
    if w.is_empty() {
        "eps".to_string()
    } else {
        w.iter().map(|l| l.as_char()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// `a?`, denoting `{ε, a}`.
    Single(Letter),
    /// `A*` for a nonempty letter set `A`.
    Star(BTreeSet<Letter>),
}

impl Atom {
    pub fn star<I: IntoIterator<Item = Letter>>(letters: I) -> Atom {
        let set: BTreeSet<Letter> = letters.into_iter().collect();
        assert!(!set.is_empty(), "star atoms need a nonempty letter set");
        Atom::Star(set)
    }

    fn admits(&self, l: Letter) -> bool {
        match self {
            Atom::Single(a) => *a == l,
            Atom::Star(set) => set.contains(&l),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Single(a) => write!(f, "{a}?"),
            Atom::Star(set) => {
                f.write_str("{")?;
                for (i, l) in set.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_str("}*")
            }
        }
    }
}

/// A word-product in normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordProduct(Vec<Atom>);

impl WordProduct {
    /// Normalizes `atoms`; the denoted language is unchanged.
    pub fn new(atoms: Vec<Atom>) -> Self {
        normalize(atoms)
    }

    pub fn epsilon() -> Self {
        WordProduct(Vec::new())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation, normalized.
    pub fn concat(&self, other: &WordProduct) -> WordProduct {
        let mut atoms = self.0.clone();
        atoms.extend(other.0.iter().cloned());
        normalize(atoms)
    }

    pub fn has_star(&self) -> bool {
        self.0.iter().any(|a| matches!(a, Atom::Star(_)))
    }

    /// Letters occurring anywhere in the product.
    pub fn letters(&self) -> BTreeSet<Letter> {
        self.0
            .iter()
            .flat_map(|a| match a {
                Atom::Single(l) => vec![*l],
                Atom::Star(set) => set.iter().copied().collect(),
            })
            .collect()
    }
}

/// Rewrites to a fixpoint: `A*·B* → B*` when `A ⊆ B` (and symmetrically),
/// and `a?` next to `A*` with `a ∈ A` disappears.
pub fn normalize(atoms: Vec<Atom>) -> WordProduct {
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        match atom {
            Atom::Single(a) => {
                if matches!(out.last(), Some(Atom::Star(set)) if set.contains(&a)) {
                    continue;
                }
                out.push(Atom::Single(a));
            }
            Atom::Star(b) => {
                loop {
                    match out.last() {
                        Some(Atom::Single(a)) if b.contains(a) => {
                            out.pop();
                        }
                        Some(Atom::Star(a)) if a.is_subset(&b) => {
                            out.pop();
                        }
                        _ => break,
                    }
                }
                if matches!(out.last(), Some(Atom::Star(a)) if b.is_subset(a)) {
                    continue;
                }
                out.push(Atom::Star(b));
            }
        }
    }
    WordProduct(out)
}

/// `↓L(p) ⊆ ↓L(q)`.
pub fn wp_leq(p: &WordProduct, q: &WordProduct) -> bool {
    let (n, m) = (p.0.len(), q.0.len());
    let mut memo: Vec<Option<bool>> = vec![None; (n + 1) * (m + 1)];
    entails(&p.0, &q.0, 0, 0, &mut memo)
}

fn entails(p: &[Atom], q: &[Atom], i: usize, j: usize, memo: &mut [Option<bool>]) -> bool {
    if i == p.len() {
        return true;
    }
    if j == q.len() {
        return false;
    }
    let key = i * (q.len() + 1) + j;
    if let Some(r) = memo[key] {
        return r;
    }
    let r = match (&p[i], &q[j]) {
        (Atom::Single(a), Atom::Single(b)) => {
            (a == b && entails(p, q, i + 1, j + 1, memo)) || entails(p, q, i, j + 1, memo)
        }
        (Atom::Single(a), Atom::Star(b)) => {
            if b.contains(a) {
                entails(p, q, i + 1, j, memo)
            } else {
                entails(p, q, i, j + 1, memo)
            }
        }
        (Atom::Star(_), Atom::Single(_)) => entails(p, q, i, j + 1, memo),
        (Atom::Star(a), Atom::Star(b)) => {
            if a.is_subset(b) {
                entails(p, q, i + 1, j, memo)
            } else {
                entails(p, q, i, j + 1, memo)
            }
        }
    };
    memo[key] = Some(r);
    r
}

/// Membership of a concrete word in `↓L(p)`, by greedy matching.
pub fn contains_word(w: &[Letter], p: &WordProduct) -> bool {
    let mut pos = 0;
    for atom in &p.0 {
        match atom {
            Atom::Single(_) => {
                if pos < w.len() && atom.admits(w[pos]) {
                    pos += 1;
                }
            }
            Atom::Star(_) => {
                while pos < w.len() && atom.admits(w[pos]) {
                    pos += 1;
                }
            }
        }
    }
    pos == w.len()
}

/// `η(w) = ↓w`, the product `w_1? … w_n?`.
pub fn embed_word(w: &[Letter]) -> WordProduct {
    normalize(w.iter().map(|&l| Atom::Single(l)).collect())
}

/// Completed `send a`: `P ↦ P·a?`.
pub fn sober_send(a: Letter, p: &WordProduct) -> WordProduct {
    let mut atoms = p.0.clone();
    atoms.push(Atom::Single(a));
    normalize(atoms)
}

/// Completed `recv a`:
///
/// ```text
/// recv a (a? P) = P
/// recv a (b? P) = recv a (P)      b ≠ a
/// recv a (A* P) = A* P            a ∈ A
/// recv a (A* P) = recv a (P)      a ∉ A
/// ```
///
/// `None` when no atom can supply `a`.
pub fn sober_recv(a: Letter, p: &WordProduct) -> Option<WordProduct> {
    for (i, atom) in p.0.iter().enumerate() {
        match atom {
            Atom::Single(b) if *b == a => return Some(WordProduct(p.0[i + 1..].to_vec())),
            Atom::Star(set) if set.contains(&a) => return Some(WordProduct(p.0[i..].to_vec())),
            _ => {}
        }
    }
    None
}

impl OrderedDomain for WordProduct {
    fn leq(&self, other: &Self) -> bool {
        wp_leq(self, other)
    }

    fn is_limit(&self) -> bool {
        self.has_star()
    }
}

impl fmt::Display for WordProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for WordProduct {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "eps" {
            return Ok(WordProduct::epsilon());
        }
        let bad = |msg: String| ParseError::Value(msg);
        let mut atoms = Vec::new();
        for tok in s.split('.') {
            let tok = tok.trim();
            if let Some(body) = tok.strip_suffix('?') {
                let mut cs = body.chars();
                match (cs.next().and_then(Letter::new), cs.next()) {
                    (Some(l), None) => atoms.push(Atom::Single(l)),
                    _ => return Err(bad(format!("invalid atom `{tok}`"))),
                }
            } else if let Some(body) = tok.strip_prefix('{').and_then(|t| t.strip_suffix("}*")) {
                let letters = body
                    .split(',')
                    .map(|l| {
                        let l = l.trim();
                        let mut cs = l.chars();
                        match (cs.next().and_then(Letter::new), cs.next()) {
                            (Some(x), None) => Ok(x),
                            _ => Err(bad(format!("invalid letter `{l}` in `{tok}`"))),
                        }
                    })
                    .collect::<Result<BTreeSet<_>, _>>()?;
                atoms.push(Atom::Star(letters));
            } else {
                return Err(bad(format!("invalid atom `{tok}`")));
            }
        }
        Ok(normalize(atoms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(s: &str) -> WordProduct {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Vec<Letter> {
        parse_word(s).unwrap()
    }

    fn l(c: char) -> Letter {
        Letter::new(c).unwrap()
    }

    #[test]
    fn normalization_rules() {
        assert_eq!(wp("a?.{a}*").atoms(), wp("{a}*").atoms());
        assert_eq!(wp("{a}*.{a,b}*"), wp("{a,b}*"));
        assert_eq!(wp("{a,b}*.{b}*"), wp("{a,b}*"));
        assert_eq!(wp("a?.b?").atoms().len(), 2);
        assert_eq!(wp("a?.b?.{a,b}*"), wp("{a,b}*"));
        assert_eq!(wp("{a}*.a?"), wp("{a}*"));
    }

    #[test]
    fn rendering() {
        assert_eq!(wp("a?.{b,a}*").to_string(), "{a,b}*");
        assert_eq!(wp("a?.b?").to_string(), "a?.b?");
        assert_eq!(WordProduct::epsilon().to_string(), "eps");
        assert!("a".parse::<WordProduct>().is_err());
        assert!("{}*".parse::<WordProduct>().is_err());
        assert!("ab?".parse::<WordProduct>().is_err());
    }

    #[test]
    fn inclusion_examples() {
        assert!(wp_leq(&wp("a?"), &wp("{a}*")));
        assert!(wp_leq(&wp("{a}*.b?"), &wp("{a,b}*")));
        assert!(!wp_leq(&wp("{a,b}*"), &wp("{a}*.{b}*")));
        assert!(wp_leq(&wp("eps"), &wp("eps")));
        assert!(!wp_leq(&wp("a?"), &wp("eps")));
    }

    #[test]
    fn word_membership() {
        assert!(contains_word(&w("aab"), &wp("{a}*.b?")));
        assert!(contains_word(&w(""), &wp("a?")));
        assert!(contains_word(&w(""), &wp("eps")));
        assert!(!contains_word(&w("ba"), &wp("{a}*.b?")));
        assert!(contains_word(&w("ba"), &wp("{a,b}*")));
    }

    #[test]
    fn embedding() {
        assert_eq!(embed_word(&w("ab")), wp("a?.b?"));
        assert_eq!(embed_word(&w("")), WordProduct::epsilon());
        assert_eq!(embed_word(&w("aa")).atoms().len(), 2);
    }

    #[test]
    fn send_equation() {
        assert_eq!(sober_send(l('a'), &WordProduct::epsilon()), wp("a?"));
        assert_eq!(sober_send(l('a'), &wp("{a}*")), wp("{a}*"));
        assert_eq!(sober_send(l('b'), &wp("a?")), wp("a?.b?"));
    }

    #[test]
    fn recv_equations() {
        let a = l('a');
        // recv a (a? P) = P
        assert_eq!(sober_recv(a, &wp("a?.{c}*.b?")), Some(wp("{c}*.b?")));
        // recv a (b? P) = recv a (P)
        assert_eq!(sober_recv(a, &wp("b?.a?.c?")), sober_recv(a, &wp("a?.c?")));
        // recv a (A* P) = A* P when a ∈ A
        assert_eq!(sober_recv(a, &wp("{a,b}*.c?")), Some(wp("{a,b}*.c?")));
        // recv a (A* P) = recv a (P) when a ∉ A
        assert_eq!(
            sober_recv(a, &wp("{b}*.a?.c?")),
            sober_recv(a, &wp("a?.c?"))
        );
        assert_eq!(sober_recv(a, &wp("b?.{c}*.a?.d?")), Some(wp("d?")));
        assert_eq!(sober_recv(a, &WordProduct::epsilon()), None);
        assert_eq!(sober_recv(a, &wp("b?.{c}*")), None);
    }

    #[test]
    fn star_detection() {
        assert!(!wp("a?.b?").has_star());
        assert!(wp("{a}*").has_star());
        assert!(!WordProduct::epsilon().has_star());
    }
}
