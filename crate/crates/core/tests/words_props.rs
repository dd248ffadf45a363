mod common;

use common::{canonical, free_reduce, from_raw, to_raw, word_from_raw, Raw};
use proptest::prelude::*;
use vhk_core::words::{parse_cyclic, parse_word, CyclicWord, Morphism, Word};

fn raw_letters(rank: i32, max: usize) -> impl Strategy<Value = Raw> {
    prop::collection::vec((1..=rank, any::<bool>()).prop_map(|(g, s)| if s { g } else { -g }), 0..max)
}

fn word_raw(w: &Word) -> Raw {
    w.letters().iter().map(|l| if l.is_pos() { l.gen as i32 + 1 } else { -(l.gen as i32 + 1) }).collect()
}

proptest! {
    #[test]
    fn reduction_is_confluent(u in raw_letters(3, 20), v in raw_letters(3, 20)) {
        let direct = Word::new(word_from_raw(&u).letters().iter().chain(word_from_raw(&v).letters()).copied());
        let whole: Raw = u.iter().chain(&v).copied().collect();
        prop_assert_eq!(word_raw(&direct), free_reduce(&whole));
        prop_assert_eq!(word_from_raw(&u).concat(&word_from_raw(&v)), direct);
    }

    #[test]
    fn reduction_preserves_parity(u in raw_letters(3, 30)) {
        let w = Word::new(common::letters_of(&u));
        prop_assert_eq!(w.len() % 2, u.len() % 2);
    }

    #[test]
    fn rotations_share_a_canonical_form(u in raw_letters(3, 16), k in 0usize..16) {
        let core = common::cyclic_core(&u);
        let base = from_raw(&core);
        if !core.is_empty() {
            let k = k % core.len();
            let rotated: Raw = core[k..].iter().chain(&core[..k]).copied().collect();
            prop_assert_eq!(&from_raw(&rotated), &base);
        }
        prop_assert_eq!(to_raw(&base), canonical(&core));
    }

    #[test]
    fn inverse_negates_exponents(u in raw_letters(3, 20)) {
        let w = word_from_raw(&u);
        let e = w.exponent_vector(3).unwrap().0;
        let inv = w.invert().exponent_vector(3).unwrap().0;
        prop_assert_eq!(inv, e.iter().map(|x| -x).collect::<Vec<_>>());
        prop_assert_eq!(w.invert().invert(), w);
    }

    #[test]
    fn exponents_are_additive(u in raw_letters(2, 20), v in raw_letters(2, 20)) {
        let (a, b) = (word_from_raw(&u), word_from_raw(&v));
        let sum: Vec<i64> = a.exponent_vector(2).unwrap().0.iter().zip(b.exponent_vector(2).unwrap().0).map(|(x, y)| x + y).collect();
        prop_assert_eq!(a.concat(&b).exponent_vector(2).unwrap().0, sum);
    }

    #[test]
    fn identity_substitution_is_identity(u in raw_letters(3, 20)) {
        let w = word_from_raw(&u);
        prop_assert_eq!(Morphism::identity(3).apply(&w).unwrap(), w.clone());
        let c = from_raw(&common::cyclic_core(&u));
        prop_assert_eq!(Morphism::identity(3).apply_cyclic(&c).unwrap(), c);
    }

    #[test]
    fn text_round_trips(u in raw_letters(3, 24)) {
        let a = common::alphabet(3);
        let w = word_from_raw(&u);
        prop_assert_eq!(parse_word(&w.to_text(&a), &a).unwrap(), w);
        let c = from_raw(&common::cyclic_core(&u));
        prop_assert_eq!(parse_cyclic(&c.to_text(&a), &a).unwrap(), c);
    }

    #[test]
    fn substitution_is_a_homomorphism(u in raw_letters(2, 12), v in raw_letters(2, 12), i0 in raw_letters(2, 4), i1 in raw_letters(2, 4)) {
        let images = vec![word_from_raw(&i0), word_from_raw(&i1)];
        let (a, b) = (word_from_raw(&u), word_from_raw(&v));
        let lhs = a.concat(&b).substitute(&images).unwrap();
        let rhs = a.substitute(&images).unwrap().concat(&b.substitute(&images).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cyclic_reduce_conjugates_back(u in raw_letters(2, 20)) {
        let w = word_from_raw(&u);
        let (core, conj) = w.cyclic_reduce();
        let back = conj.concat(&core.as_word()).concat(&conj.invert());
        // the core is a rotation of the cyclically reduced part, so compare cyclically
        prop_assert_eq!(CyclicWord::from(&back), core.clone());
        prop_assert_eq!(core.len(), common::cyclic_core(&u).len());
    }
}

#[test]
fn displayed_formats_parse() {
    let a = common::alphabet(2);
    assert_eq!(parse_word("x^3(yX)^-2", &a).unwrap().to_text(&a), "x^4YxY");
}
