//! The order-168 group `I = F₈ ⋊ (F₈^× ⋊ Gal)`, its index-3 subgroup `I₀`, and
//! the character-level facts about their 7-dimensional representations.

use serde::Serialize;
use serde_json::{json, Value};

use crate::charcalc::{character_table, fs_indicator, inner_rational, restrict, schur_op, ClassFun, SchurKind};
use crate::error::{Error, Result};
use crate::exactnum::{fmt_rat, Rat};
use crate::groupcore::{build_family, g2_translations};
use crate::ramfilt::fixed_dim;

#[derive(Clone, Debug, Serialize)]
pub struct G2Report {
    pub order_i: usize,
    pub order_i0: usize,
    pub order_j: usize,
    pub dims_i: Vec<usize>,
    pub dims_i0: Vec<usize>,
    pub sevens_i: usize,
    pub self_dual_sevens_i: usize,
    pub sevens_i0: usize,
    pub self_dual_sevens_i0: usize,
    pub faithful_i: bool,
    pub faithful_i0: bool,
    pub fs_i: i32,
    pub restriction_matches: bool,
    pub ext3_invariants_i: String,
    pub ext3_fixed_j: usize,
    /// multiplicities of the characters of `I₀/J` in the `J`-fixed part of ∧³V
    pub fixed_j_decomposition: Vec<String>,
    pub jacobi_2_7: i32,
    pub checks: Vec<(String, bool)>,
}

impl G2Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serialisable");
        v["checks"] = Value::Object(self.checks.iter().map(|(k, ok)| (k.clone(), json!(ok))).collect());
        v["type"] = json!("g2");
        v
    }
}

fn sevens(t: &crate::charcalc::CharTable) -> Vec<&ClassFun> {
    t.irreducibles().iter().filter(|c| c.dim() == 7).collect()
}

pub fn g2_verify() -> Result<G2Report> {
    let i = build_family("g2_I", &Value::Null)?;
    let i0 = build_family("g2_I0", &Value::Null)?;
    let j0 = g2_translations(&i0);
    let ti = character_table(&i)?;
    let ti0 = character_table(&i0)?;
    let mut dims_i = ti.dims().to_vec();
    dims_i.sort_unstable();
    let mut dims_i0 = ti0.dims().to_vec();
    dims_i0.sort_unstable();
    let s_i = sevens(&ti);
    let s_i0 = sevens(&ti0);
    let sd_i: Vec<&ClassFun> = s_i.iter().copied().filter(|c| &c.dual() == *c).collect();
    let sd_i0: Vec<&ClassFun> = s_i0.iter().copied().filter(|c| &c.dual() == *c).collect();
    let v = *sd_i.first().ok_or_else(|| Error::Theorem("I has no self-dual 7-dimensional irreducible".into()))?;
    let v0 = *sd_i0.first().ok_or_else(|| Error::Theorem("I₀ has no self-dual 7-dimensional irreducible".into()))?;
    let fs_i = fs_indicator(v)?;
    // I₀ inside I: same permutations of F₈
    let i0_in_i = i.closure(&i0.generators().iter().map(|p| i.index_of(p).expect("I₀ ⊆ I")).collect::<Vec<_>>());
    let res = restrict(v, &i0_in_i)?;
    let res = crate::charcalc::restrict_to(&res, &i0)?;
    let restriction_matches = &res == v0;
    let w = schur_op(SchurKind::Ext3, v);
    let inv = inner_rational(&w, &ClassFun::trivial(&i))?;
    let w0 = schur_op(SchurKind::Ext3, v0);
    let fixed_j = fixed_dim(&w0, &j0)?;
    // character of I₀ on the J-fixed part: average over the coset gJ
    let vals: Vec<Rat> = (0..i0.num_classes())
        .map(|c| {
            let g = i0.class_rep(c);
            let total = j0
                .members()
                .iter()
                .fold(crate::exactnum::CycNum::zero(i0.ambient()), |acc, &x| &acc + w0.at(i0.mul(g, x)));
            total.to_rational().map(|r| r / Rat::from_integer((j0.order() as i64).into()))
        })
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Theorem("J-fixed character is not rational".into()))?;
    let fixed_char = ClassFun::from_rationals(&i0, &vals)?;
    let quotient_chars: Vec<&ClassFun> =
        ti0.irreducibles().iter().filter(|c| j0.members().iter().all(|&x| c.at(x) == c.at(0))).collect();
    let decomposition: Vec<Rat> =
        quotient_chars.iter().map(|c| inner_rational(&fixed_char, c)).collect::<Result<_>>()?;
    let jac = jacobi_symbol(2, 7)?;
    let mut checks = vec![
        ("order_I_168".to_string(), i.order() == 168),
        ("order_I0_56".to_string(), i0.order() == 56),
        ("order_J_8".to_string(), j0.order() == 8),
        ("dims_I".to_string(), dims_i == vec![1, 1, 1, 3, 3, 7, 7, 7]),
        ("I_three_sevens_one_self_dual".to_string(), s_i.len() == 3 && sd_i.len() == 1),
        ("I_seven_faithful_orthogonal".to_string(), v.is_faithful() && fs_i == 1),
        ("I0_unique_seven_faithful_self_dual".to_string(), s_i0.len() == 1 && sd_i0.len() == 1 && v0.is_faithful()),
        ("restriction_to_I0".to_string(), restriction_matches),
        ("ext3_one_invariant_line".to_string(), inv == Rat::from_integer(1.into())),
        ("ext3_J_fixed_dim_7".to_string(), fixed_j == 7),
    ];
    let all_once = quotient_chars.len() == 7 && decomposition.iter().all(|m| *m == Rat::from_integer(1.into()));
    checks.push(("J_fixed_is_all_quotient_characters".to_string(), all_once && fixed_char.dim() == 7));
    checks.push(("jacobi_2_7".to_string(), jac == 1));
    Ok(G2Report {
        order_i: i.order(),
        order_i0: i0.order(),
        order_j: j0.order(),
        dims_i,
        dims_i0,
        sevens_i: s_i.len(),
        self_dual_sevens_i: sd_i.len(),
        sevens_i0: s_i0.len(),
        self_dual_sevens_i0: sd_i0.len(),
        faithful_i: v.is_faithful(),
        faithful_i0: v0.is_faithful(),
        fs_i,
        restriction_matches,
        ext3_invariants_i: fmt_rat(&inv),
        ext3_fixed_j: fixed_j,
        fixed_j_decomposition: decomposition.iter().map(fmt_rat).collect(),
        jacobi_2_7: jac,
        checks,
    })
}

/// Jacobi symbol `(a/n)` for odd positive `n`, by quadratic reciprocity.
pub fn jacobi_symbol(a: i64, n: i64) -> Result<i32> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::input(format!("Jacobi symbol needs an odd positive modulus, got {n}")));
    }
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    Ok(if n == 1 { t } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_values() {
        assert_eq!(jacobi_symbol(2, 7).unwrap(), 1);
        assert_eq!(jacobi_symbol(2, 3).unwrap(), -1);
        assert_eq!(jacobi_symbol(1, 15).unwrap(), 1);
        assert_eq!(jacobi_symbol(5, 15).unwrap(), 0);
        assert!(jacobi_symbol(3, 8).is_err());
    }

    #[test]
    fn report_passes() {
        let r = g2_verify().unwrap();
        for (name, ok) in &r.checks {
            assert!(ok, "{name}");
        }
        assert_eq!(r.fixed_j_decomposition.len(), 7);
    }
}
