//! Independent recomputations of conductor, Herbrand and dyadic values, plus
//! frozen outputs for hand-checked cases.

use swanforge::charcalc::{character_table, ext2, fs_indicator, inner_rational, sym2, ClassFun};
use swanforge::cli::corpus::builtin_corpus;
use swanforge::dyadic::{builtin_tower_spec, norm_subgroup, tower_make, truncated_units, BUILTIN_TOWERS};
use swanforge::exactnum::{fmt_rat, rat, rint, CycNum, Rat};
use swanforge::g2case::jacobi_symbol;
use swanforge::ramfilt::{conductors, FilteredGroup, ValidateOptions};

/// Swan exponent straight from the lower-numbering sum, with fixed dimensions
/// obtained by averaging character values over each `G_i`.
fn swan_by_definition(fg: &FilteredGroup, chi: &ClassFun) -> Rat {
    let g0 = fg.order_at(0) as i64;
    let dim = chi.dim();
    let mut total = Rat::from_integer(0.into());
    let mut i = 1;
    while fg.order_at(i) > 1 {
        let gi = fg.at(i);
        let n = chi.group().ambient();
        let sum = gi.members().iter().fold(CycNum::zero(n), |acc, &x| &acc + chi.at(x));
        let fixed = sum.to_rational().expect("rational") / rint(gi.order() as i64);
        total += rat(gi.order() as i64, g0) * (rint(dim) - fixed);
        i += 1;
    }
    total
}

#[test]
fn swan_matches_lower_numbering_sum() {
    for e in builtin_corpus(ValidateOptions::default()).unwrap() {
        if e.group.order() > 64 {
            continue;
        }
        let t = character_table(&e.group).unwrap();
        for fg in &e.filtrations {
            for chi in t.irreducibles() {
                let c = conductors(fg, chi).unwrap();
                assert_eq!(c.swan, swan_by_definition(fg, chi), "{} {}", e.name, fg.label());
            }
        }
    }
}

/// `φ(u) = ∫₀ᵘ dt / [G₀ : G_t]` with `G_t = G_⌈t⌉`, summed over unit intervals.
fn phi_by_integral(fg: &FilteredGroup, u: &Rat) -> Rat {
    let g0 = fg.order_at(0) as i64;
    let mut acc = rint(0);
    let mut t = rint(0);
    let mut k = 1usize;
    while &t < u {
        let next = rint(k as i64).min(u.clone());
        acc += (next.clone() - t) * rat(fg.order_at(k) as i64, g0);
        t = next;
        k += 1;
    }
    acc
}

#[test]
fn herbrand_matches_integral() {
    for e in builtin_corpus(ValidateOptions::default()).unwrap() {
        for fg in &e.filtrations {
            let h = fg.herbrand();
            for num in 0..40 {
                let u = rat(num, 4);
                assert_eq!(h.phi(&u), phi_by_integral(fg, &u), "{} {} at {}", e.name, fg.label(), fmt_rat(&u));
            }
        }
    }
}

#[test]
fn fs_indicator_matches_invariant_multiplicities() {
    for e in builtin_corpus(ValidateOptions::default()).unwrap() {
        let t = character_table(&e.group).unwrap();
        let one = ClassFun::trivial(&e.group);
        for chi in t.irreducibles() {
            let m = inner_rational(&sym2(chi), &one).unwrap() - inner_rational(&ext2(chi), &one).unwrap();
            assert_eq!(rint(fs_indicator(chi).unwrap() as i64), m, "{}", e.name);
        }
    }
}

/// Frozen Swan exponents (sorted), checked by hand from the break lists.
#[test]
fn frozen_swan_values() {
    let corpus = builtin_corpus(ValidateOptions::default()).unwrap();
    let cases: [(&str, &str, &[&str]); 4] = [
        // φ(1) = 1, φ(3) = 3/2
        ("Q8", "breaks1,3", &["0", "1", "1", "1", "3"]),
        // φ(2) = 5/4 for the faithful plane
        ("D4", "breaks1,2", &["0", "1", "1", "1", "5/2"]),
        // chars of order 3 break at 1, faithful ones at φ(4) = 2
        ("C9", "breaks1,4", &["0", "1", "1", "2", "2", "2", "2", "2", "2"]),
        // I₀ tame of index 7 over J, break 1 in lower numbering: φ(1) = 1/7
        ("I0", "tame7,break1", &["0", "0", "0", "0", "0", "0", "0", "1"]),
    ];
    for (name, label, want) in cases {
        let e = corpus.iter().find(|e| e.name == name).unwrap();
        let fg = e.filtrations.iter().find(|f| f.label() == label).unwrap();
        let t = character_table(&e.group).unwrap();
        let mut got: Vec<Rat> = t.irreducibles().iter().map(|c| conductors(fg, c).unwrap().swan).collect();
        got.sort();
        let got: Vec<String> = got.iter().map(fmt_rat).collect();
        assert_eq!(got, want, "{name} {label}");
    }
}

/// `s = v_K(f'(π)) − 1` for an Eisenstein `f`, i.e. the different minus one.
#[test]
fn dyadic_s_from_different() {
    for name in BUILTIN_TOWERS {
        let t = tower_make(&builtin_tower_spec(name).unwrap(), 4).unwrap();
        let k = t.height();
        let st = &t.steps[k - 1];
        let two_pi = t.mul(k, &t.from_int(k, 2), &t.pi(k));
        let fprime = t.add(&two_pi, &t.embed(&st.beta));
        let (_, _, s) = norm_subgroup(&t).unwrap();
        assert_eq!(s, t.val(k, &fprime) - 1, "{name}");
    }
}

/// `U¹(Q₂) = {±1} × (1 + 4Z₂)`, so `U¹/U^N ≅ C₂ × C_{2^{N−2}}` for `N ≥ 3`.
#[test]
fn q2_unit_structure() {
    let t = tower_make(&builtin_tower_spec("Q2(i)").unwrap(), 10).unwrap();
    for n in 3..=8 {
        let u = truncated_units(&t, 0, n).unwrap();
        assert_eq!(u.invariants(), vec![1u64 << (n - 2), 2], "N = {n}");
    }
}

fn euler_criterion(a: i64, p: i64) -> i32 {
    let mut r = 1i64;
    let mut b = a.rem_euclid(p);
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    match r {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

#[test]
fn jacobi_matches_euler_on_primes() {
    let primes = [3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
    for &p in &primes {
        for a in -20..40 {
            assert_eq!(jacobi_symbol(a, p).unwrap(), euler_criterion(a, p), "({a}/{p})");
        }
    }
    // composite moduli via multiplicativity in n
    for &p in &primes {
        for &q in &primes {
            for a in 1..30 {
                assert_eq!(jacobi_symbol(a, p * q).unwrap(), euler_criterion(a, p) * euler_criterion(a, q));
            }
        }
    }
}
