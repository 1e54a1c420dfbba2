use clover_core::acs::AffineMap;
use clover_core::engine::{post_flat_test, snapshots_grow};
use clover_core::omega::{mat_apply, Matrix};
use clover_core::order::{hoare_leq, is_antichain, max_of};
use clover_core::words::{contains_word, normalize, sober_recv, sober_send, wp_leq, Atom};
use clover_core::{
    run_clover, AcsModel, Budgets, Letter, OmegaNat, OmegaVec, RunOptions, WordProduct,
};
use proptest::prelude::*;

fn omega_nat() -> impl Strategy<Value = OmegaNat> {
    prop_oneof![4 => (0u64..5).prop_map(OmegaNat::Fin), 1 => Just(OmegaNat::Omega)]
}

fn omega_vec(dim: usize) -> impl Strategy<Value = OmegaVec> {
    prop::collection::vec(omega_nat(), dim).prop_map(OmegaVec::new)
}

fn vec_set(dim: usize) -> impl Strategy<Value = Vec<OmegaVec>> {
    prop::collection::vec(omega_vec(dim), 0..6)
}

fn matrix(dim: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(0u64..3, dim), dim)
        .prop_map(|r| Matrix::from_rows(r).unwrap())
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just('a'), Just('b')].prop_map(|c| Letter::new(c).unwrap())
}

fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        letter().prop_map(Atom::Single),
        prop::collection::btree_set(letter(), 1..3).prop_map(Atom::star),
    ]
}

fn product() -> impl Strategy<Value = WordProduct> {
    prop::collection::vec(atom(), 0..5).prop_map(WordProduct::new)
}

/// All words over {a, b} of length at most `n`.
fn short_words(n: usize) -> Vec<Vec<Letter>> {
    let ab = [Letter::new('a').unwrap(), Letter::new('b').unwrap()];
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<Letter>| {
                ab.iter().map(move |l| {
                    let mut w = w.clone();
                    w.push(*l);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn petri_net() -> impl Strategy<Value = AcsModel> {
    let map = (
        prop::collection::vec(0u64..3, 3),
        prop::collection::vec(-1i64..3, 3),
    );
    (
        prop::collection::vec(map, 1..4),
        prop::collection::vec(0u64..3, 3),
    )
        .prop_map(|(maps, init)| {
            let maps = maps
                .into_iter()
                .enumerate()
                .map(|(i, (pre, delta))| {
                    let guard: Vec<u64> = pre
                        .iter()
                        .zip(&delta)
                        .map(|(&g, &d)| g.max((-d).max(0) as u64))
                        .collect();
                    AffineMap::translation(format!("t{i}"), delta, guard).unwrap()
                })
                .collect();
            AcsModel::new(3, init, maps).unwrap()
        })
}

proptest! {
    #[test]
    fn hoare_is_a_preorder(a in vec_set(3), b in vec_set(3), c in vec_set(3)) {
        prop_assert!(hoare_leq(&a, &a));
        if hoare_leq(&a, &b) && hoare_leq(&b, &c) {
            prop_assert!(hoare_leq(&a, &c));
        }
    }

    #[test]
    fn max_of_is_an_equivalent_antichain(a in vec_set(3)) {
        let m = max_of(&a);
        prop_assert!(is_antichain(&m));
        prop_assert!(hoare_leq(&a, &m) && hoare_leq(&m, &a));
        prop_assert_eq!(max_of(&m), m.clone());
        let mut sorted = m.clone();
        sorted.sort();
        prop_assert_eq!(sorted, m);
    }

    #[test]
    fn mat_apply_is_monotone(a in matrix(3), x in omega_vec(3), y in omega_vec(3)) {
        let lo = OmegaVec::new(x.coords().iter().zip(y.coords()).map(|(p, q)| *p.min(q)).collect());
        prop_assert!(mat_apply(&a, &lo).leq(&mat_apply(&a, &x)));
    }

    #[test]
    fn mat_apply_is_continuous(a in matrix(3), x in omega_vec(3)) {
        let at = |n: u64| {
            let c: Vec<u64> = x.coords().iter().map(|v| v.finite().unwrap_or(n)).collect();
            mat_apply(&a, &OmegaVec::from_naturals(&c))
        };
        let (small, large) = (at(1000), at(2000));
        let lub = mat_apply(&a, &x);
        for j in 0..3 {
            match lub.get(j) {
                OmegaNat::Omega => prop_assert!(small.get(j) < large.get(j)),
                v => {
                    prop_assert_eq!(small.get(j), v);
                    prop_assert_eq!(large.get(j), v);
                }
            }
        }
    }

    #[test]
    fn wp_leq_is_sound_on_words(p in product(), q in product()) {
        if wp_leq(&p, &q) {
            for w in short_words(4) {
                if contains_word(&w, &p) {
                    prop_assert!(contains_word(&w, &q), "{w:?} in {p} but not in {q}");
                }
            }
        }
    }

    #[test]
    fn normal_forms_are_unique(p in product(), q in product()) {
        prop_assert_eq!(wp_leq(&p, &q) && wp_leq(&q, &p), p == q);
        prop_assert_eq!(normalize(p.atoms().to_vec()), p.clone());
    }

    #[test]
    fn send_is_exact(a in letter(), p in product()) {
        let s = sober_send(a, &p);
        for w in short_words(4) {
            let expected = contains_word(&w, &p)
                || (w.last() == Some(&a) && contains_word(&w[..w.len() - 1], &p));
            prop_assert_eq!(contains_word(&w, &s), expected, "{} ! {} on {:?}", p, a, w);
        }
    }

    #[test]
    fn recv_is_exact(a in letter(), p in product()) {
        let r = sober_recv(a, &p);
        for u in short_words(4) {
            let mut au = vec![a];
            au.extend(&u);
            let expected = contains_word(&au, &p);
            let got = r.as_ref().is_some_and(|r| contains_word(&u, r));
            prop_assert_eq!(got, expected, "{} ? {} on {:?}", p, a, u);
        }
    }

    #[test]
    fn sober_steps_are_monotone(a in letter(), p in product(), q in product()) {
        if wp_leq(&p, &q) {
            prop_assert!(wp_leq(&sober_send(a, &p), &sober_send(a, &q)));
            if let Some(rp) = sober_recv(a, &p) {
                let rq = sober_recv(a, &q);
                prop_assert!(rq.is_some_and(|rq| wp_leq(&rp, &rq)));
            }
        }
    }

    #[test]
    fn engine_runs_are_well_behaved(net in petri_net()) {
        let options = RunOptions {
            record_snapshots: true,
            trace: true,
            budgets: Budgets { rounds: 6, accel_steps: 64 },
        };
        let run = run_clover(&net, net.initial_state(), &options);
        prop_assert!(is_antichain(&run.result));
        prop_assert!(snapshots_grow(&run.snapshots));
        prop_assert!(run.snapshots.iter().all(|s| is_antichain(s)));
        prop_assert!(run.result.iter().any(|c| net.initial_state().leq(c)));
        if run.is_complete() {
            prop_assert!(post_flat_test(&net, &run.result));
        }
        let again = run_clover(&net, net.initial_state(), &options);
        prop_assert_eq!(again.transcript, run.transcript);
        prop_assert_eq!(again.result, run.result);
    }
}
