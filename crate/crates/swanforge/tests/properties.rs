use std::sync::OnceLock;

use proptest::prelude::*;
use swanforge::charcalc::{character_table, ext2, psi2, sym2, CharTable};
use swanforge::cli::corpus::builtin_corpus;
use swanforge::conjlab::{enumerate_filtrations_with, CorpusEntry, EnumerateOptions};
use swanforge::dyadic::{builtin_tower_spec, tower_make, DyadicTower};
use swanforge::exactnum::{rat, CycNum, Rat};
use swanforge::g2case::jacobi_symbol;
use swanforge::ramfilt::{swan, FilteredGroup, ValidateOptions};

struct Fixture {
    entries: Vec<(CorpusEntry, CharTable)>,
    enumerated: Vec<(FilteredGroup, usize)>,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let entries: Vec<(CorpusEntry, CharTable)> = builtin_corpus(ValidateOptions::default())
            .unwrap()
            .into_iter()
            .filter(|e| e.group.order() <= 64 && !e.filtrations.is_empty())
            .map(|e| {
                let t = character_table(&e.group).unwrap();
                (e, t)
            })
            .collect();
        let mut enumerated = Vec::new();
        for (i, (e, _)) in entries.iter().enumerate() {
            if e.group.order() <= 16 {
                let opts = EnumerateOptions { max_depth: 4, wild_only: true, ..Default::default() };
                for f in enumerate_filtrations_with(&e.group, 2, &opts).unwrap_or_default() {
                    enumerated.push((f, i));
                }
            }
        }
        Fixture { entries, enumerated }
    })
}

fn q2i() -> &'static DyadicTower {
    static T: OnceLock<DyadicTower> = OnceLock::new();
    T.get_or_init(|| tower_make(&builtin_tower_spec("Q2(i,sqrt(pi))").unwrap(), 6).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn swan_is_additive_and_dual_invariant(e in any::<prop::sample::Index>(), f in any::<prop::sample::Index>(),
                                           i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let (entry, t) = &fixture().entries[e.index(fixture().entries.len())];
        let fg = &entry.filtrations[f.index(entry.filtrations.len())];
        let a = t.irr(i.index(t.len()));
        let b = t.irr(j.index(t.len()));
        prop_assert_eq!(swan(fg, &a.add(b)).unwrap(), swan(fg, a).unwrap() + swan(fg, b).unwrap());
        prop_assert_eq!(swan(fg, &a.dual()).unwrap(), swan(fg, a).unwrap());
    }

    #[test]
    fn squares_split_the_tensor_square(e in any::<prop::sample::Index>(), i in any::<prop::sample::Index>()) {
        let (_, t) = &fixture().entries[e.index(fixture().entries.len())];
        let a = t.irr(i.index(t.len()));
        prop_assert_eq!(sym2(a).add(&ext2(a)), a.tensor(a));
        prop_assert_eq!(sym2(a).sub(&ext2(a)), psi2(a));
    }

    #[test]
    fn herbrand_functions_are_inverse(k in any::<prop::sample::Index>(), num in 0i64..200, den in 1i64..12) {
        let fx = fixture();
        let (fg, _) = &fx.enumerated[k.index(fx.enumerated.len())];
        let h = fg.herbrand();
        let u = rat(num, den);
        prop_assert_eq!(h.phi(&h.psi(&u)), u.clone());
        prop_assert_eq!(h.psi(&h.phi(&u)), u.clone());
        prop_assert!(h.phi(&u) <= u);
    }

    #[test]
    fn weak_bounds_on_enumerated(k in any::<prop::sample::Index>(), i in any::<prop::sample::Index>()) {
        let fx = fixture();
        let (fg, ei) = &fx.enumerated[k.index(fx.enumerated.len())];
        let t = &fx.entries[*ei].1;
        let a = t.irr(i.index(t.len()));
        let sw = swan(fg, a).unwrap();
        let delta = swan(fg, &sym2(a)).unwrap() - swan(fg, &ext2(a)).unwrap();
        prop_assert!(delta >= Rat::from_integer(0.into()));
        prop_assert!(delta <= sw.clone() * rat(2, 1));
    }

    #[test]
    fn cyclotomic_descend_inverts_embed(n in prop::sample::select(vec![1usize, 2, 3, 4, 6, 8]), m in 1usize..4,
                                        coeffs in prop::collection::vec(-5i64..5, 1..8)) {
        let x = CycNum::from_int_power_coeffs(n, &coeffs);
        prop_assert_eq!(x.embed(n * m).unwrap().descend(n).unwrap(), x);
    }

    #[test]
    fn dyadic_units_invert(c in prop::collection::vec(0u64..512, 4)) {
        let t = q2i();
        let k = t.height();
        let mut x = c.clone();
        x[0] |= 1;
        let y = t.inv(k, &x).unwrap();
        prop_assert_eq!(t.reduce(k, &t.mul(k, &x, &y), 20), t.reduce(k, &t.from_int(k, 1), 20));
    }

    #[test]
    fn dyadic_norm_is_multiplicative(a in prop::collection::vec(0u64..512, 4), b in prop::collection::vec(0u64..512, 4)) {
        let t = q2i();
        let k = t.height();
        let lhs = t.norm(k, &t.mul(k, &a, &b)).unwrap();
        let rhs = t.mul(k - 1, &t.norm(k, &a).unwrap(), &t.norm(k, &b).unwrap());
        prop_assert_eq!(t.reduce(k - 1, &lhs, 12), t.reduce(k - 1, &rhs, 12));
    }

    #[test]
    fn dyadic_valuation_is_additive(a in prop::collection::vec(1u64..512, 4), b in prop::collection::vec(1u64..512, 4)) {
        let t = q2i();
        let k = t.height();
        let (va, vb) = (t.val(k, &a), t.val(k, &b));
        prop_assume!(va + vb < 20);
        prop_assert_eq!(t.val(k, &t.mul(k, &a, &b)), va + vb);
    }

    #[test]
    fn jacobi_is_multiplicative(a in -50i64..50, b in -50i64..50, n in (1i64..60).prop_map(|x| 2 * x + 1)) {
        prop_assert_eq!(jacobi_symbol(a * b, n).unwrap(), jacobi_symbol(a, n).unwrap() * jacobi_symbol(b, n).unwrap());
    }
}
