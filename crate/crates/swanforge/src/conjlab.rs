//! Δ = Sw(Sym²ρ) − Sw(∧²ρ): per-character reports, structural analysis,
//! character identities, filtration enumeration and the suite runner.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::charcalc::{
    character_table, ext2, fs_indicator, index2_sign, induce, inner_rational, linear_characters, psi2, restrict,
    same_group, sym2, tau_extension, CharTable, ClassFun,
};
use crate::error::{Error, Result};
use crate::exactnum::{fmt_rat, rat, rint, Rat};
use crate::groupcore::{transfer, Group, Subgroup};
use crate::heisen;
use crate::ramfilt::{
    conductors, conductors_from, fixed_dim_virtual, local_invariants, slope_irreducible, slopes, swan,
    swan_class_function, swan_on_subgroup, CommutatorRule, FilteredGroup, ValidateOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Theorem,
    Conjecture,
    Measured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "na")]
    NotApplicable,
}

impl Outcome {
    fn of(ok: bool) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Flag {
    pub name: &'static str,
    pub kind: CheckKind,
    pub outcome: Outcome,
    pub detail: Value,
}

impl Flag {
    fn new(name: &'static str, kind: CheckKind, outcome: Outcome, detail: Value) -> Flag {
        Flag { name, kind, outcome, detail }
    }

    fn na(name: &'static str, kind: CheckKind) -> Flag {
        Flag::new(name, kind, Outcome::NotApplicable, Value::Null)
    }
}

// ---------------------------------------------------------------------------
// Per-group cache

/// Character table, Schur squares and fixed dimensions on every normal subgroup.
#[derive(Debug)]
pub struct GroupData {
    pub group: Arc<Group>,
    pub table: CharTable,
    pub sym2: Vec<ClassFun>,
    pub ext2: Vec<ClassFun>,
    pub fs: Vec<i32>,
    normals: Vec<Subgroup>,
    normal_index: HashMap<Vec<usize>, usize>,
    /// `[character][normal] -> (χ, Sym²χ, ∧²χ)` fixed dimensions
    fixed: Vec<Vec<[i64; 3]>>,
    /// `χ(g²) = χ(1)` for all `g` in the normal subgroup
    square_trivial: Vec<Vec<bool>>,
    /// `Ψ²χ` equals the Galois twist `ζ ↦ ζ²` of `χ` (only meaningful for odd exponent)
    psi2_galois: Vec<Option<bool>>,
}

impl GroupData {
    pub fn new(group: &Arc<Group>) -> Result<Arc<GroupData>> {
        let table = character_table(group)?;
        let normals = group.normal_subgroups();
        let normal_index = normals.iter().enumerate().map(|(i, s)| (s.members().to_vec(), i)).collect();
        let mut sym = Vec::new();
        let mut ext = Vec::new();
        let mut fs = Vec::new();
        let mut fixed = Vec::new();
        let mut sqt = Vec::new();
        let mut gal = Vec::new();
        let sq = group.power_map(2);
        for chi in table.irreducibles() {
            let s2 = sym2(chi);
            let e2 = ext2(chi);
            let mut row = Vec::with_capacity(normals.len());
            let mut trow = Vec::with_capacity(normals.len());
            for n in &normals {
                row.push([fixed_dim_virtual(chi, n)?, fixed_dim_virtual(&s2, n)?, fixed_dim_virtual(&e2, n)?]);
                let one = chi.at(0);
                trow.push(n.members().iter().all(|&x| chi.at(sq[x]) == one));
            }
            gal.push(if group.exponent() % 2 == 1 { Some(psi2(chi) == chi.galois(2)?) } else { None });
            fs.push(fs_indicator(chi)?);
            sym.push(s2);
            ext.push(e2);
            fixed.push(row);
            sqt.push(trow);
        }
        Ok(Arc::new(GroupData {
            group: group.clone(),
            table,
            sym2: sym,
            ext2: ext,
            fs,
            normals,
            normal_index,
            fixed,
            square_trivial: sqt,
            psi2_galois: gal,
        }))
    }

    pub fn normals(&self) -> &[Subgroup] {
        &self.normals
    }

    fn fixed(&self, k: usize, s: &Subgroup, which: usize) -> Result<i64> {
        if let Some(&i) = self.normal_index.get(s.members()) {
            return Ok(self.fixed[k][i][which]);
        }
        let f = match which {
            0 => self.table.irr(k),
            1 => &self.sym2[k],
            _ => &self.ext2[k],
        };
        fixed_dim_virtual(f, s)
    }

    fn square_trivial_on(&self, k: usize, s: &Subgroup) -> bool {
        match self.normal_index.get(s.members()) {
            Some(&i) => self.square_trivial[k][i],
            None => {
                let chi = self.table.irr(k);
                s.members().iter().all(|&x| chi.at(self.group.mul(x, x)) == chi.at(0))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Δ reports

#[derive(Clone, Debug, Serialize)]
pub struct DeltaReport {
    pub group: String,
    pub filtration: String,
    pub character: usize,
    pub dim: i64,
    pub fs: i32,
    #[serde(serialize_with = "ser_rat")]
    pub swan: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub swan_sym2: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub swan_ext2: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub delta: Rat,
    /// whether the filtration satisfies Hasse–Arf (filled by the suite runner)
    pub hasse_arf: Option<bool>,
    pub flags: Vec<Flag>,
}

impl DeltaReport {
    pub fn flag(&self, name: &str) -> Option<&Flag> {
        self.flags.iter().find(|f| f.name == name)
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serialisable");
        let flags: serde_json::Map<String, Value> = self
            .flags
            .iter()
            .map(|f| (f.name.to_string(), json!({"kind": f.kind, "outcome": f.outcome, "detail": f.detail})))
            .collect();
        v["flags"] = Value::Object(flags);
        v["type"] = json!("delta");
        v
    }
}

pub(crate) fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(r))
}

fn ser_opt_rat<S: serde::Serializer>(r: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&fmt_rat(r)),
        None => s.serialize_none(),
    }
}

/// Δ report for an irreducible character (built from scratch).
pub fn delta_classify(fg: &FilteredGroup, chi: &ClassFun) -> Result<DeltaReport> {
    if !same_group(chi.group(), fg.group()) {
        return Err(Error::input("character and filtration live on different groups"));
    }
    if inner_rational(chi, chi)? != Rat::one() || !chi.degree().is_positive() {
        return Err(Error::input("delta_classify needs an irreducible character"));
    }
    let data = GroupData::new(fg.group())?;
    let k = data.table.position(chi).ok_or_else(|| Error::input("character not found in the table"))?;
    delta_classify_cached(fg, &data, k)
}

/// Swan exponents of `χ_k`, `Sym²χ_k`, `∧²χ_k`.
pub fn swan_triple(fg: &FilteredGroup, data: &GroupData, k: usize) -> Result<(Rat, Rat, Rat)> {
    let d = data.table.dims()[k] as i64;
    let sw = conductors_from(fg, d, |s| data.fixed(k, s, 0))?.swan;
    let s2 = conductors_from(fg, d * (d + 1) / 2, |s| data.fixed(k, s, 1))?.swan;
    let e2 = conductors_from(fg, d * (d - 1) / 2, |s| data.fixed(k, s, 2))?.swan;
    Ok((sw, s2, e2))
}

pub fn delta_classify_cached(fg: &FilteredGroup, data: &GroupData, k: usize) -> Result<DeltaReport> {
    if !same_group(&data.group, fg.group()) {
        return Err(Error::input("group data for another group"));
    }
    let (sw, s2, e2) = swan_triple(fg, data, k)?;
    let delta = &s2 - &e2;
    let dim = data.table.dims()[k] as i64;
    let fs = data.fs[k];
    let flags = delta_flags(fg, data, k, &sw, &s2, &e2, &delta)?;
    Ok(DeltaReport {
        group: fg.group().name().to_string(),
        filtration: fg.label().to_string(),
        character: k,
        dim,
        fs,
        swan: sw,
        swan_sym2: s2,
        swan_ext2: e2,
        delta,
        hasse_arf: fg.hasse_arf_checked(),
        flags,
    })
}

fn delta_flags(fg: &FilteredGroup, data: &GroupData, k: usize, sw: &Rat, s2: &Rat, e2: &Rat, delta: &Rat) -> Result<Vec<Flag>> {
    use CheckKind::*;
    let p = fg.p();
    let dim = data.table.dims()[k] as i64;
    let fs = data.fs[k];
    let wild = sw.is_positive();
    let two_sw = sw * rint(2);
    let vals = || json!({"swan": fmt_rat(sw), "delta": fmt_rat(delta)});
    let mut flags = Vec::new();
    if p != 2 {
        flags.push(Flag::new("p_odd_equality", Theorem, Outcome::of(delta == sw), vals()));
        let whole_g1 = fg.order_at(1) == fg.group().order();
        flags.push(match (whole_g1, data.psi2_galois[k]) {
            (true, Some(ok)) => Flag::new("p_odd_galois_twist", Theorem, Outcome::of(ok), Value::Null),
            _ => Flag::na("p_odd_galois_twist", Theorem),
        });
        for name in ["weak_bounds", "weak_strict", "zero_iff_square_trivial", "odd_selfdual"] {
            flags.push(Flag::na(name, Theorem));
        }
    } else {
        flags.push(Flag::na("p_odd_equality", Theorem));
        flags.push(Flag::na("p_odd_galois_twist", Theorem));
        let ok = !delta.is_negative() && *delta <= two_sw;
        flags.push(Flag::new("weak_bounds", Theorem, Outcome::of(ok), vals()));
        flags.push(if wild {
            Flag::new("weak_strict", Theorem, Outcome::of(*delta < two_sw), vals())
        } else {
            Flag::na("weak_strict", Theorem)
        });
        let sqt = data.square_trivial_on(k, &fg.at(1));
        flags.push(Flag::new(
            "zero_iff_square_trivial",
            Theorem,
            Outcome::of(delta.is_zero() == sqt),
            json!({"delta": fmt_rat(delta), "square_trivial_on_g1": sqt}),
        ));
        flags.push(odd_selfdual_flag(fg, data, k, sw, s2, e2)?);
    }
    flags.push(Flag::new("conjecture", Conjecture, Outcome::of(delta <= sw), vals()));
    flags.push(if fs == 1 && wild {
        Flag::new("orthogonal_strict", Conjecture, Outcome::of(delta < sw), vals())
    } else {
        Flag::na("orthogonal_strict", Conjecture)
    });
    flags.push(if wild && delta == sw {
        Flag::new("equality_symplectic", Conjecture, Outcome::of(fs == -1), json!({"fs": fs, "dim": dim}))
    } else {
        Flag::na("equality_symplectic", Conjecture)
    });
    Ok(flags)
}

/// Odd-dimensional self-dual case at `p = 2`: `Sw(Sym²) = Sw(∧²) = n·Sw` when
/// `dim = 2n+1` and `Sw` is an integer prime to `dim`.
fn odd_selfdual_flag(fg: &FilteredGroup, data: &GroupData, k: usize, sw: &Rat, s2: &Rat, e2: &Rat) -> Result<Flag> {
    let dim = data.table.dims()[k] as i64;
    let fs = data.fs[k];
    let applicable = dim > 1
        && dim % 2 == 1
        && fs != 0
        && sw.is_positive()
        && sw.is_integer()
        && sw.to_integer().to_i64().map(|s| s.gcd(&dim) == 1).unwrap_or(false);
    if !applicable {
        return Ok(Flag::na("odd_selfdual", CheckKind::Theorem));
    }
    let n = rint((dim - 1) / 2);
    let target = &n * sw;
    let ok = *s2 == target && *e2 == target;
    let induced = induced_from_quadratic(fg, data.table.irr(k))?;
    Ok(Flag::new(
        "odd_selfdual",
        CheckKind::Theorem,
        Outcome::of(ok),
        json!({"n_sw": fmt_rat(&target), "induced_from_quadratic": induced.map(|h| h.order())}),
    ))
}

/// A subgroup `H ⊇ G₁` of index `dim χ` with a quadratic `λ` such that `Ind λ = χ`.
pub fn induced_from_quadratic(fg: &FilteredGroup, chi: &ClassFun) -> Result<Option<Subgroup>> {
    let g = fg.group();
    let d = chi.dim() as usize;
    let g1 = fg.at(1);
    for h in g.all_subgroups() {
        if h.index() != d || !g1.is_subgroup_of(&h) {
            continue;
        }
        let hg = h.as_group();
        let table = character_table(&hg.group)?;
        for lam in linear_characters(&table) {
            let quadratic = lam.rational_values().is_some();
            if quadratic && &induce(g, &h, &lam)? == chi {
                return Ok(Some(h));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Structure of faithful irreducibles with G = G₁

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StructureCase {
    #[serde(rename = "I_order_4")]
    IOrder4,
    #[serde(rename = "I_eq_Z_irred")]
    IEqZIrred,
    #[serde(rename = "I_eq_Z_reducible")]
    IEqZReducible,
    #[serde(rename = "not_applicable")]
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub group: String,
    pub filtration: String,
    pub character: usize,
    pub case: StructureCase,
    pub reason: Option<String>,
    pub n: i64,
    pub fs: i32,
    pub z: Vec<usize>,
    pub h: Vec<usize>,
    pub y: Vec<usize>,
    pub i: Vec<usize>,
    pub v_dim: usize,
    pub v0_dim: usize,
    pub w_dim: usize,
    pub q: Vec<usize>,
    pub b: Vec<Vec<usize>>,
    #[serde(serialize_with = "ser_rat")]
    pub alpha: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub alpha_prime: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub swan_sym2: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub swan_ext2: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub delta: Rat,
    /// Swan of the slope-deficient line in Sym² (non-self-dual branch)
    #[serde(serialize_with = "ser_opt_rat")]
    pub sym_defect: Option<Rat>,
    /// Swan of the slope-deficient line in ∧² (non-self-dual branch)
    #[serde(serialize_with = "ser_opt_rat")]
    pub ext_defect: Option<Rat>,
    pub checks: Vec<Flag>,
}

impl StructureReport {
    fn not_applicable(fg: &FilteredGroup, k: usize, reason: &str) -> StructureReport {
        StructureReport {
            group: fg.group().name().to_string(),
            filtration: fg.label().to_string(),
            character: k,
            case: StructureCase::NotApplicable,
            reason: Some(reason.to_string()),
            n: 0,
            fs: 0,
            z: vec![],
            h: vec![],
            y: vec![],
            i: vec![],
            v_dim: 0,
            v0_dim: 0,
            w_dim: 0,
            q: vec![],
            b: vec![],
            alpha: Rat::zero(),
            alpha_prime: Rat::zero(),
            swan_sym2: Rat::zero(),
            swan_ext2: Rat::zero(),
            delta: Rat::zero(),
            sym_defect: None,
            ext_defect: None,
            checks: vec![],
        }
    }

    pub fn check(&self, name: &str) -> Option<&Flag> {
        self.checks.iter().find(|f| f.name == name)
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serialisable");
        v["type"] = json!("structure");
        v
    }
}

pub fn structural_analysis(fg: &FilteredGroup, chi: &ClassFun) -> Result<StructureReport> {
    let data = GroupData::new(fg.group())?;
    let k = data.table.position(chi).ok_or_else(|| Error::input("structural analysis needs an irreducible"))?;
    structural_analysis_cached(fg, &data, k)
}

pub fn structural_analysis_cached(fg: &FilteredGroup, data: &GroupData, k: usize) -> Result<StructureReport> {
    use CheckKind::*;
    let g = fg.group();
    let chi = data.table.irr(k);
    let n = chi.dim();
    if fg.p() != 2 {
        return Ok(StructureReport::not_applicable(fg, k, "p ≠ 2"));
    }
    if n <= 1 {
        return Ok(StructureReport::not_applicable(fg, k, "dim 1"));
    }
    if fg.order_at(1) != g.order() {
        return Ok(StructureReport::not_applicable(fg, k, "G₁ ≠ G"));
    }
    if !chi.is_faithful() {
        return Ok(StructureReport::not_applicable(fg, k, "not faithful"));
    }
    let m = fg.depth().expect("G₁ = G nontrivial");
    let z = fg.at(m);
    let Some(jh) = (1..m).rev().find(|&j| fg.at(j) != z) else {
        return Ok(StructureReport::not_applicable(fg, k, "G₁ is the last nontrivial group"));
    };
    let h = fg.at(jh);
    let hb = fg.herbrand();
    let alpha = hb.phi(&rint(m as i64));
    let alpha_prime = hb.phi(&rint(jh as i64));
    let center = g.center();
    let mut checks = Vec::new();
    let z_ok = z.order() == 2 && z.is_subgroup_of(&center);
    checks.push(Flag::new("z_central_order_2", Theorem, Outcome::of(z_ok), json!({"order": z.order()})));
    if !z_ok {
        let mut r = StructureReport::not_applicable(fg, k, "Z is not central of order 2");
        r.checks = checks;
        return Ok(r);
    }
    let hs = h.as_group();
    let z_in_h = Subgroup::from_members(&hs.group, z.members().iter().map(|&x| hs.from_parent[x]).collect());
    let hp = heisen::pair_forms(&hs.group, &z_in_h, 2)?;
    let v0 = hp.radical();
    let y_h = hp.preimage(&v0);
    let to_g = |s: &Subgroup| -> Vec<usize> {
        let mut v: Vec<usize> = s.members().iter().map(|&x| hs.to_parent[x]).collect();
        v.sort_unstable();
        v
    };
    let y = Subgroup::from_members(g, to_g(&y_h));
    checks.push(Flag::new("y_is_center_of_h", Theorem, Outcome::of(y_h == hs.group.center()), Value::Null));
    // W: the part of V⁰ on which every φ_g vanishes
    let gens = g.generator_indices();
    let w: Vec<usize> = v0
        .iter()
        .copied()
        .filter(|&v| {
            let yv = hs.to_parent[hp.lift[v]];
            gens.iter().all(|&x| g.commutator(x, yv) == 0)
        })
        .collect();
    let i_h = hp.preimage(&w);
    let i = Subgroup::from_members(g, to_g(&i_h));
    checks.push(Flag::new("i_is_h_cap_center", Theorem, Outcome::of(i == h.intersect(&center)), Value::Null));
    let i_ok = (i.order() == 2 || i.order() == 4) && i.is_cyclic();
    checks.push(Flag::new("i_cyclic_order_le_4", Theorem, Outcome::of(i_ok), json!({"order": i.order()})));
    let (sw, s2, e2) = swan_triple(fg, data, k)?;
    let delta = &s2 - &e2;
    let fs = data.fs[k];
    let nr = rint(n);
    let sym_n = rint(n * (n + 1) / 2);
    let ext_n = rint(n * (n - 1) / 2);
    checks.push(Flag::new("slope_is_alpha", Theorem, Outcome::of(sw == &nr * &alpha), Value::Null));
    let mut sym_defect = None;
    let mut ext_defect = None;
    let res = restrict(chi, &h)?;
    let irreducible_on_h = inner_rational(&res, &res)? == Rat::one();
    let case = if i.order() == 4 {
        StructureCase::IOrder4
    } else if irreducible_on_h {
        StructureCase::IEqZIrred
    } else {
        StructureCase::IEqZReducible
    };
    let num = |r: &Rat| json!(fmt_rat(r));
    match case {
        StructureCase::IOrder4 => {
            let t2 = &sym_n * &alpha_prime;
            let te = &ext_n * &alpha_prime;
            checks.push(Flag::new("order4_sym2", Theorem, Outcome::of(s2 == t2), json!({"expected": num(&t2)})));
            checks.push(Flag::new("order4_ext2", Theorem, Outcome::of(e2 == te), json!({"expected": num(&te)})));
            let target = &nr * &alpha_prime;
            checks.push(Flag::new("order4_delta", Theorem, Outcome::of(delta == target), json!({"expected": num(&target)})));
            checks.push(Flag::new(
                "order4_strict",
                Theorem,
                Outcome::of(target < &nr * &alpha),
                json!({"n_alpha_prime": num(&target), "n_alpha": num(&(&nr * &alpha))}),
            ));
        }
        StructureCase::IEqZIrred => {
            checks.push(Flag::new("radical_trivial", Theorem, Outcome::of(v0.len() == 1), json!({"v0_dim": log_p(v0.len(), 2)})));
            let zh = center.join(&h);
            checks.push(Flag::new("center_times_h", Theorem, Outcome::of(zh.order() == g.order()), json!({"order": zh.order()})));
            let one = Rat::one();
            let (branch, expect) = match fs {
                1 => ("orthogonal", Some((&alpha_prime * (&sym_n - &one), &alpha_prime * &ext_n))),
                -1 => ("symplectic", Some((&alpha_prime * &sym_n, &alpha_prime * (&ext_n - &one)))),
                _ => ("non_self_dual", None),
            };
            match expect {
                Some((t2, te)) => {
                    let ok = s2 == t2 && e2 == te;
                    checks.push(Flag::new(
                        "trichotomy",
                        Theorem,
                        Outcome::of(ok),
                        json!({"branch": branch, "sym2": num(&t2), "ext2": num(&te)}),
                    ));
                }
                None => {
                    let gamma = defect(fg, data, &data.sym2[k], &alpha_prime)?;
                    let dlt = defect(fg, data, &data.ext2[k], &alpha_prime)?;
                    let ok = match (&gamma, &dlt) {
                        (Some(gm), Some(dl)) => {
                            s2 == &alpha_prime * (&sym_n - &one) + gm
                                && e2 == &alpha_prime * (&ext_n - &one) + dl
                                && !gm.is_negative()
                                && gm <= &alpha_prime
                                && dl.is_positive()
                                && dl <= &alpha_prime
                                && delta == &nr * &alpha_prime + gm - dl
                        }
                        _ => false,
                    };
                    checks.push(Flag::new(
                        "trichotomy",
                        Theorem,
                        Outcome::of(ok),
                        json!({"branch": branch, "gamma": gamma.as_ref().map(fmt_rat), "delta": dlt.as_ref().map(fmt_rat)}),
                    ));
                    sym_defect = gamma;
                    ext_defect = dlt;
                }
            }
            let lhs = &nr * &alpha;
            let rhs = (&nr + rint(1)) * &alpha_prime;
            checks.push(Flag::new(
                "alpha_inequality",
                Theorem,
                Outcome::of(lhs >= rhs),
                json!({"n_alpha": num(&lhs), "n_plus_1_alpha_prime": num(&rhs)}),
            ));
        }
        _ => {}
    }
    Ok(StructureReport {
        group: g.name().to_string(),
        filtration: fg.label().to_string(),
        character: k,
        case,
        reason: None,
        n,
        fs,
        z: z.members().to_vec(),
        h: h.members().to_vec(),
        y: y.members().to_vec(),
        i: i.members().to_vec(),
        v_dim: hp.dim(),
        v0_dim: log_p(v0.len(), 2),
        w_dim: log_p(w.len(), 2),
        q: hp.q.clone(),
        b: hp.b.clone(),
        alpha,
        alpha_prime,
        swan_sym2: s2,
        swan_ext2: e2,
        delta,
        sym_defect,
        ext_defect,
        checks,
    })
}

fn log_p(mut n: usize, p: usize) -> usize {
    let mut k = 0;
    while n > 1 {
        n /= p;
        k += 1;
    }
    k
}

/// Swan of the unique slope-deficient constituent (a line); `α′` if every
/// constituent has slope `α′`; `None` if the shape is different.
fn defect(fg: &FilteredGroup, data: &GroupData, f: &ClassFun, alpha_prime: &Rat) -> Result<Option<Rat>> {
    let mult = data.table.decompose_int(f)?;
    let mut low = Vec::new();
    for (j, &m) in mult.iter().enumerate() {
        if m <= 0 {
            continue;
        }
        let s = slope_irreducible(fg, data.table.irr(j))?;
        if &s > alpha_prime {
            return Ok(None);
        }
        if &s < alpha_prime {
            for _ in 0..m {
                low.push((data.table.dims()[j], s.clone()));
            }
        }
    }
    Ok(match low.as_slice() {
        [] => Some(alpha_prime.clone()),
        [(1, s)] => Some(s.clone()),
        _ => None,
    })
}

// ---------------------------------------------------------------------------
// Character identities

#[derive(Clone, Debug)]
pub struct CyclicIdentity {
    pub identity: bool,
    /// Swan consequence on `H`: `lhs ≤ rhs`
    pub swan_lhs: Rat,
    pub swan_rhs: Rat,
    pub left: ClassFun,
    pub right: ClassFun,
}

impl CyclicIdentity {
    pub fn swan_ok(&self) -> bool {
        self.swan_lhs <= self.swan_rhs
    }
}

/// `Ψ²(Ind χ) = Ind(χ²) + Ind_H(χ°) − Ind_H(χ°ω)` for `χ` linear on `Gp` with `G/Gp` cyclic of even order.
pub fn cyclic_identity_check(fg: &FilteredGroup, gp: &Subgroup, chi: &ClassFun) -> Result<CyclicIdentity> {
    let g = fg.group();
    if !same_group(gp.parent(), g) || !gp.is_normal() {
        return Err(Error::input("Gp must be a normal subgroup of G"));
    }
    let q = g.quotient(gp)?;
    let qo = q.group.order();
    if qo % 2 != 0 || !q.group.whole().is_cyclic() {
        return Err(Error::input(format!("G/Gp must be cyclic of even order (order {qo})")));
    }
    if chi.dim() != 1 || chi.group().order() != gp.order() {
        return Err(Error::input("χ must be a linear character of Gp"));
    }
    // H/Gp is the subgroup of order 2 in the cyclic quotient
    let involutions: Vec<usize> = (0..qo).filter(|&x| q.group.mul(x, x) == 0).collect();
    let h = q.preimage(&q.group.closure(&involutions));
    let gsub = gp.as_group();
    let hsub = h.as_group();
    let gp_in_h = Subgroup::from_members(&hsub.group, gp.members().iter().map(|&x| hsub.from_parent[x]).collect());
    // χ on parent elements of Gp
    let chi_at = |x: usize| -> Result<&crate::exactnum::CycNum> {
        let i = chi.group().index_of(g.element(x)).ok_or_else(|| Error::input("χ is not on Gp"))?;
        Ok(chi.at(i))
    };
    let mut vals = Vec::with_capacity(hsub.group.num_classes());
    for c in 0..hsub.group.num_classes() {
        let x = hsub.to_parent[hsub.group.class_rep(c)];
        vals.push(chi_at(transfer(&h, gp, x)?)?.clone());
    }
    let chi_o = ClassFun::new(&hsub.group, vals)?;
    let omega = index2_sign(&hsub.group, &gp_in_h)?;
    let chi_o_w = chi_o.tensor(&omega);
    let _ = gsub;
    let left = psi2(&induce(g, gp, chi)?);
    let right = induce(g, gp, &chi.tensor(chi))?.add(&induce(g, &h, &chi_o)?).sub(&induce(g, &h, &chi_o_w)?);
    // Swan consequence on H
    let sw_h = |f: &ClassFun| swan_on_subgroup(fg, &h, f);
    let ind_sq = induce(&hsub.group, &gp_in_h, &chi.tensor(chi))?;
    let ind = induce(&hsub.group, &gp_in_h, chi)?;
    let swan_lhs = sw_h(&ind_sq)? + sw_h(&chi_o)? - sw_h(&chi_o_w)?;
    let swan_rhs = sw_h(&ind)?;
    Ok(CyclicIdentity { identity: left == right, swan_lhs, swan_rhs, left, right })
}

#[derive(Clone, Debug)]
pub struct Index2Identity {
    pub swan_ok: bool,
    pub delta_ok: bool,
    pub swan: Rat,
    pub swan_sigma: Rat,
    pub s: Rat,
    pub dim: i64,
    pub delta: Rat,
    pub delta_sigma: Rat,
    /// `Sw(τω) − Sw(τ)`
    pub tau_budget: Rat,
    /// whether `Δ(ρ) = Δ(σ) + sd/2 + (Sw(τω) − Sw(τ))` also holds
    pub plus_sign_ok: bool,
    pub sigma_self_dual: bool,
    pub tau_has_trivial: bool,
}

pub fn index2_identity_check(fg: &FilteredGroup, h: &Subgroup, sigma: &ClassFun) -> Result<Index2Identity> {
    let g = fg.group();
    if h.index() != 2 {
        return Err(Error::input("H must have index 2"));
    }
    let rho = induce(g, h, sigma)?;
    if inner_rational(&rho, &rho)? != Rat::one() {
        return Err(Error::input("Ind σ is reducible"));
    }
    let omega = index2_sign(g, h)?;
    let s = swan(fg, &omega)?;
    let d = rho.dim();
    let sw = swan(fg, &rho)?;
    let sw_sigma = swan_on_subgroup(fg, h, sigma)?;
    let half = &s * rat(d, 2);
    let delta = swan(fg, &sym2(&rho))? - swan(fg, &ext2(&rho))?;
    let delta_sigma = swan_on_subgroup(fg, h, &sym2(sigma))? - swan_on_subgroup(fg, h, &ext2(sigma))?;
    let gamma = (0..g.order()).find(|&x| !h.contains(x)).expect("index 2");
    let tau = tau_extension(g, h, sigma, gamma)?;
    let tau_budget = swan(fg, &tau.tensor(&omega))? - swan(fg, &tau)?;
    let tau_has_trivial = inner_rational(&tau, &ClassFun::trivial(g))?.is_positive();
    Ok(Index2Identity {
        swan_ok: sw == &sw_sigma + &half,
        // τ sits in Sym² and τω in ∧², so the budget enters with a minus sign
        delta_ok: delta == &delta_sigma + &half - &tau_budget,
        plus_sign_ok: delta == &delta_sigma + &half + &tau_budget,
        swan: sw,
        swan_sigma: sw_sigma,
        s,
        dim: d,
        delta,
        delta_sigma,
        tau_budget,
        sigma_self_dual: &sigma.dual() == sigma,
        tau_has_trivial,
    })
}

// ---------------------------------------------------------------------------
// Enumeration

#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    pub max_depth: usize,
    pub wild_only: bool,
    pub commutators: CommutatorRule,
    pub cap: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { max_depth: 6, wild_only: false, commutators: CommutatorRule::Additive, cap: 200_000 }
    }
}

pub fn enumerate_filtrations(g: &Arc<Group>, p: usize, max_depth: usize) -> Result<Vec<FilteredGroup>> {
    enumerate_filtrations_with(g, p, &EnumerateOptions { max_depth, ..Default::default() })
}

struct Enumerator<'a> {
    g: &'a Arc<Group>,
    p: usize,
    opts: &'a EnumerateOptions,
    normals: Vec<Subgroup>,
    index: HashMap<Vec<usize>, usize>,
    comm: HashMap<(usize, usize), usize>,
    /// `below[a]`: normals `N ⊆ normals[a]` with elementary abelian quotient, largest first
    below: Vec<Vec<usize>>,
    out: Vec<Vec<usize>>,
}

impl Enumerator<'_> {
    fn commutator(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&c) = self.comm.get(&key) {
            return c;
        }
        let s = self.g.commutator_subgroup(&self.normals[a], &self.normals[b]);
        let c = self.index[s.members()];
        self.comm.insert(key, c);
        c
    }

    fn contains(&self, a: usize, b: usize) -> bool {
        self.normals[b].is_subgroup_of(&self.normals[a])
    }

    /// `chain[1..]` are indices of the wild part so far.
    fn dfs(&mut self, chain: &mut Vec<usize>, trivial: usize) -> Result<()> {
        let shift = match self.opts.commutators {
            CommutatorRule::Additive => 0,
            CommutatorRule::Sharp => 1,
        };
        let k = chain.len();
        let last = *chain.last().expect("nonempty");
        // terminate: G_k = 1
        if self.below[last].contains(&trivial) {
            let m = k - 1;
            let mut ok = true;
            'outer: for i in 1..=m {
                for j in i..=m {
                    if i + j + shift >= k && self.commutator(chain[i], chain[j]) != trivial {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            if ok {
                if self.out.len() >= self.opts.cap {
                    return Err(Error::Resource(format!("more than {} filtrations", self.opts.cap)));
                }
                self.out.push(chain.clone());
            }
        }
        if k > self.opts.max_depth {
            return Ok(());
        }
        let cands = self.below[last].clone();
        for n in cands {
            if n == trivial {
                continue;
            }
            let mut ok = true;
            for i in 1..k {
                let Some(j) = k.checked_sub(shift + i) else { continue };
                if j < i || j >= k {
                    continue;
                }
                let c = self.commutator(chain[i], chain[j]);
                if !self.contains(n, c) {
                    ok = false;
                    break;
                }
            }
            if ok {
                chain.push(n);
                self.dfs(chain, trivial)?;
                chain.pop();
            }
        }
        Ok(())
    }
}

/// All admissible chains `G = G₀ ⊇ G₁ ⊇ … ⊇ G_m ⊋ 1` with `m ≤ max_depth`,
/// in depth-first order (larger subgroups first at each step).
pub fn enumerate_filtrations_with(g: &Arc<Group>, p: usize, opts: &EnumerateOptions) -> Result<Vec<FilteredGroup>> {
    let vopts = ValidateOptions { hasse_arf: false, commutators: opts.commutators };
    if g.order() == 1 {
        return Ok(vec![FilteredGroup::from_chain(g, p, &[g.whole()], vopts)?]);
    }
    let mut normals = g.normal_subgroups();
    normals.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.members().cmp(b.members())));
    let index: HashMap<Vec<usize>, usize> = normals.iter().enumerate().map(|(i, s)| (s.members().to_vec(), i)).collect();
    let trivial = index[&vec![0usize]];
    let elem_ab = |a: &Subgroup, b: &Subgroup| -> bool {
        a.members().iter().all(|&x| {
            b.contains(g.pow(x, p as i64)) && a.members().iter().all(|&y| b.contains(g.commutator(x, y)))
        })
    };
    let below: Vec<Vec<usize>> = normals
        .iter()
        .map(|a| {
            (0..normals.len()).filter(|&j| normals[j].is_subgroup_of(a) && elem_ab(a, &normals[j])).collect()
        })
        .collect();
    let mut en = Enumerator { g, p, opts, normals, index, comm: HashMap::new(), below, out: Vec::new() };
    let whole = 0;
    for g1 in 0..en.normals.len() {
        let n1 = &en.normals[g1];
        if !n1.order().is_power_of(p) && n1.order() != 1 {
            continue;
        }
        let q = g.quotient(n1)?;
        if q.group.order() % p == 0 || !q.group.whole().is_cyclic() {
            continue;
        }
        if g1 == trivial {
            if !opts.wild_only {
                en.out.push(vec![whole]);
            }
            continue;
        }
        if opts.max_depth == 0 {
            continue;
        }
        let mut chain = vec![whole, g1];
        en.dfs(&mut chain, trivial)?;
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for c in std::mem::take(&mut en.out) {
        let subs: Vec<Subgroup> = c.iter().map(|&i| en.normals[i].clone()).collect();
        let fg = FilteredGroup::from_chain(g, p, &subs, vopts)?;
        if seen.insert(fg.canonical_key()) {
            out.push(fg);
        }
    }
    let _ = en.p;
    Ok(out)
}

trait PowerOf {
    fn is_power_of(self, p: usize) -> bool;
}

impl PowerOf for usize {
    fn is_power_of(mut self, p: usize) -> bool {
        if self == 0 {
            return false;
        }
        while self % p == 0 {
            self /= p;
        }
        self == 1
    }
}

// ---------------------------------------------------------------------------
// Suites

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Podd,
    P2weak,
    Conjecture,
    Appendix,
    Structure,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Podd, Suite::P2weak, Suite::Conjecture, Suite::Appendix, Suite::Structure];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Podd => "podd",
            Suite::P2weak => "p2weak",
            Suite::Conjecture => "conjecture",
            Suite::Appendix => "appendix",
            Suite::Structure => "structure",
        }
    }

    pub fn parse(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .map(|x| vec![x])
            .ok_or_else(|| Error::input(format!("unknown suite '{s}'")))
    }
}

/// A corpus group with its named filtrations.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub group: Arc<Group>,
    pub filtrations: Vec<FilteredGroup>,
    /// include in the enumeration sweep
    pub sweep: bool,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub suites: Vec<Suite>,
    pub jobs: usize,
    pub enumerate: EnumerateOptions,
    /// groups swept by enumeration (`p = 2`)
    pub sweep_max_order: usize,
    pub heisen_max_order: usize,
    /// keep only enumerated filtrations satisfying Hasse–Arf
    pub strict_hasse_arf: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            suites: Suite::ALL.to_vec(),
            jobs: 1,
            enumerate: EnumerateOptions { wild_only: true, ..Default::default() },
            sweep_max_order: 64,
            heisen_max_order: 128,
            strict_hasse_arf: false,
        }
    }
}

/// Aggregated outcome of a calculus-style check over many cases.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub check: &'static str,
    pub kind: CheckKind,
    pub group: String,
    pub filtration: Option<String>,
    pub pass: usize,
    pub fail: usize,
    pub na: usize,
    pub failures: Vec<Value>,
    /// measured values, reported as data
    pub samples: Vec<Value>,
}

impl CheckRecord {
    fn new(suite: Suite, check: &'static str, kind: CheckKind, group: &str, filtration: Option<&str>) -> CheckRecord {
        CheckRecord {
            suite,
            check,
            kind,
            group: group.to_string(),
            filtration: filtration.map(str::to_string),
            pass: 0,
            fail: 0,
            na: 0,
            failures: Vec::new(),
            samples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
            self.failures.push(witness());
        }
    }

    fn error(&mut self, subject: Value, e: &Error) {
        self.fail += 1;
        self.failures.push(json!({"subject": subject, "error": e.to_string()}));
    }

    pub fn outcome(&self) -> Outcome {
        if self.fail > 0 {
            Outcome::Fail
        } else if self.pass > 0 {
            Outcome::Pass
        } else {
            Outcome::NotApplicable
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serialisable");
        v["type"] = json!("check");
        v["outcome"] = json!(self.outcome());
        v
    }
}

#[derive(Clone, Debug)]
pub enum Item {
    Delta(Suite, DeltaReport),
    Check(CheckRecord),
    Structure(StructureReport),
}

impl Item {
    pub fn to_json(&self) -> Value {
        match self {
            Item::Delta(s, d) => {
                let mut v = d.to_json();
                v["suite"] = json!(s);
                v
            }
            Item::Check(c) => c.to_json(),
            Item::Structure(r) => r.to_json(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub na: usize,
}

impl Counts {
    fn add(&mut self, o: Outcome, n: usize) {
        match o {
            Outcome::Pass => self.pass += n,
            Outcome::Fail => self.fail += n,
            Outcome::NotApplicable => self.na += n,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub reports: usize,
    pub counts: BTreeMap<String, Counts>,
    pub structure_cases: BTreeMap<String, usize>,
    pub theorem_failures: Vec<Value>,
    pub conjecture_counterexamples: Vec<Value>,
    pub conjecture_discoveries: Vec<Value>,
    pub equality_witnesses: Vec<Value>,
    pub exit_code: i32,
    pub reasons: Vec<String>,
}

impl Summary {
    pub fn count(&self, name: &str) -> Counts {
        self.counts.get(name).cloned().unwrap_or_default()
    }

    fn absorb(&mut self, item: &Item) {
        match item {
            Item::Delta(suite, d) => {
                self.reports += 1;
                let base = json!({"suite": suite, "group": d.group, "filtration": d.filtration, "character": d.character,
                    "dim": d.dim, "fs": d.fs, "swan": fmt_rat(&d.swan), "delta": fmt_rat(&d.delta)});
                for f in &d.flags {
                    self.counts.entry(f.name.to_string()).or_default().add(f.outcome, 1);
                    if f.outcome == Outcome::Fail {
                        let mut w = base.clone();
                        w["flag"] = json!(f.name);
                        match (f.kind, f.name) {
                            (CheckKind::Theorem, _) => self.theorem_failures.push(w),
                            (CheckKind::Conjecture, "conjecture") => self.conjecture_counterexamples.push(w),
                            (CheckKind::Conjecture, _) => self.conjecture_discoveries.push(w),
                            _ => {}
                        }
                    }
                }
                if d.swan.is_positive() && d.delta == d.swan {
                    self.equality_witnesses.push(base);
                }
            }
            Item::Check(c) => {
                let e = self.counts.entry(c.check.to_string()).or_default();
                e.pass += c.pass;
                e.fail += c.fail;
                e.na += c.na;
                if c.fail > 0 {
                    let w = json!({"suite": c.suite, "check": c.check, "group": c.group, "filtration": c.filtration, "failures": c.failures});
                    match c.kind {
                        CheckKind::Theorem => self.theorem_failures.push(w),
                        CheckKind::Conjecture => self.conjecture_discoveries.push(w),
                        CheckKind::Measured => {}
                    }
                }
            }
            Item::Structure(r) => {
                let tag = serde_json::to_value(r.case).expect("tag").as_str().unwrap_or("").to_string();
                *self.structure_cases.entry(tag).or_default() += 1;
                for f in &r.checks {
                    self.counts.entry(format!("structure.{}", f.name)).or_default().add(f.outcome, 1);
                    if f.outcome == Outcome::Fail && f.kind == CheckKind::Theorem {
                        self.theorem_failures.push(json!({"suite": "structure", "group": r.group, "filtration": r.filtration,
                            "character": r.character, "check": f.name, "detail": f.detail}));
                    }
                }
            }
        }
    }

    fn finish(&mut self) {
        let mut reasons = Vec::new();
        if !self.theorem_failures.is_empty() {
            reasons.push("theorem_failure".to_string());
        }
        if !self.conjecture_counterexamples.is_empty() {
            reasons.push("conjecture_counterexample".to_string());
        }
        let mut kinds: Vec<String> = self
            .conjecture_discoveries
            .iter()
            .filter_map(|w| w.get("flag").or_else(|| w.get("check")).and_then(Value::as_str).map(str::to_string))
            .collect();
        kinds.sort();
        kinds.dedup();
        for k in kinds {
            reasons.push(match k.as_str() {
                "equality_symplectic" => "non_symplectic_equality".to_string(),
                other => format!("{other}_violation"),
            });
        }
        self.exit_code = if !self.theorem_failures.is_empty() {
            2
        } else if reasons.is_empty() {
            0
        } else {
            1
        };
        self.reasons = reasons;
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serialisable");
        v["type"] = json!("summary");
        v
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutput {
    pub items: Vec<Item>,
    pub summary: Summary,
}

impl SuiteOutput {
    /// JSON lines: every item in order, then the summary.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for it in &self.items {
            out.push_str(&it.to_json().to_string());
            out.push('\n');
        }
        out.push_str(&self.summary.to_json().to_string());
        out.push('\n');
        out
    }
}

struct Prepared {
    entry: CorpusEntry,
    data: Arc<GroupData>,
    enumerated: Vec<FilteredGroup>,
    named_ha: Vec<bool>,
    enum_ha: Vec<bool>,
}

#[derive(Clone, Copy, Debug)]
enum FRef {
    Named(usize),
    Enumerated(usize),
}

#[derive(Clone, Copy, Debug)]
enum Task {
    Delta(Suite, usize, FRef, usize),
    Calculus(Suite, usize, usize),
    Structure(usize, FRef, usize),
    InducedSquares(usize),
    Heisenberg(usize),
    Cyclic(usize, usize),
    Index2(usize, usize),
}

impl Prepared {
    fn filtration(&self, f: FRef) -> &FilteredGroup {
        match f {
            FRef::Named(i) => &self.entry.filtrations[i],
            FRef::Enumerated(i) => &self.enumerated[i],
        }
    }
}

fn is_p_group_of(g: &Group, p: usize) -> bool {
    g.order() > 1 && g.order().is_power_of(p)
}

/// Run the selected suites over a corpus. Output order depends only on the corpus.
pub fn run_suites(corpus: &[CorpusEntry], opts: &RunOptions) -> Result<SuiteOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_inner(corpus, opts))
}

fn run_inner(corpus: &[CorpusEntry], opts: &RunOptions) -> Result<SuiteOutput> {
    let want = |s: Suite| opts.suites.contains(&s);
    let sweep = want(Suite::Conjecture) || want(Suite::Structure);
    let prepared: Vec<Prepared> = corpus
        .par_iter()
        .map(|e| -> Result<Prepared> {
            let data = GroupData::new(&e.group)?;
            let enumerated = if sweep && e.sweep && e.group.order() <= opts.sweep_max_order {
                enumerate_filtrations_with(&e.group, 2, &opts.enumerate)?
                    .into_iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let label = format!("enum{}:{}", i, f.label());
                        f.with_label(label)
                    })
                    .collect()
            } else {
                Vec::new()
            };
            let ha = |f: &FilteredGroup| f.check_hasse_arf().is_ok();
            let mut enum_ha: Vec<bool> = enumerated.iter().map(ha).collect();
            let enumerated = if opts.strict_hasse_arf {
                let kept = enumerated.into_iter().zip(&enum_ha).filter(|(_, &h)| h).map(|(f, _)| f).collect();
                enum_ha.retain(|&h| h);
                kept
            } else {
                enumerated
            };
            let named_ha = e.filtrations.iter().map(ha).collect();
            Ok(Prepared { entry: e.clone(), data, enumerated, named_ha, enum_ha })
        })
        .collect::<Result<_>>()?;
    let mut tasks = Vec::new();
    for (ei, pr) in prepared.iter().enumerate() {
        let nchar = pr.data.table.len();
        for (fi, f) in pr.entry.filtrations.iter().enumerate() {
            let suite = if f.p() == 2 { Suite::P2weak } else { Suite::Podd };
            if want(suite) {
                for k in 0..nchar {
                    tasks.push(Task::Delta(suite, ei, FRef::Named(fi), k));
                }
                tasks.push(Task::Calculus(suite, ei, fi));
            }
        }
        if want(Suite::Conjecture) {
            for fi in 0..pr.enumerated.len() {
                for k in 0..nchar {
                    tasks.push(Task::Delta(Suite::Conjecture, ei, FRef::Enumerated(fi), k));
                }
            }
        }
        if want(Suite::Appendix) {
            tasks.push(Task::InducedSquares(ei));
            tasks.push(Task::Heisenberg(ei));
            for fi in 0..pr.entry.filtrations.len() {
                tasks.push(Task::Cyclic(ei, fi));
                tasks.push(Task::Index2(ei, fi));
            }
        }
        if want(Suite::Structure) {
            let refs = (0..pr.entry.filtrations.len()).map(FRef::Named).chain((0..pr.enumerated.len()).map(FRef::Enumerated));
            for fr in refs {
                let f = pr.filtration(fr);
                if f.p() != 2 || f.order_at(1) != pr.entry.group.order() {
                    continue;
                }
                for k in 0..nchar {
                    let chi = pr.data.table.irr(k);
                    if chi.dim() > 1 && chi.is_faithful() {
                        tasks.push(Task::Structure(ei, fr, k));
                    }
                }
            }
        }
    }
    let results: Vec<Vec<Item>> = tasks.par_iter().map(|t| run_task(&prepared, opts, *t)).collect();
    let items: Vec<Item> = results.into_iter().flatten().collect();
    let mut summary = Summary::default();
    for it in &items {
        summary.absorb(it);
    }
    summary.finish();
    Ok(SuiteOutput { items, summary })
}

fn run_task(prepared: &[Prepared], opts: &RunOptions, task: Task) -> Vec<Item> {
    let _ = opts;
    match task {
        Task::Delta(suite, ei, fr, k) => {
            let pr = &prepared[ei];
            let fg = pr.filtration(fr);
            match delta_classify_cached(fg, &pr.data, k) {
                Ok(mut d) => {
                    d.group = pr.entry.name.clone();
                    d.hasse_arf = Some(match fr {
                        FRef::Named(i) => pr.named_ha[i],
                        FRef::Enumerated(i) => pr.enum_ha[i],
                    });
                    vec![Item::Delta(suite, d)]
                }
                Err(e) => {
                    let mut c = CheckRecord::new(suite, "delta_classify", CheckKind::Theorem, &pr.entry.name, Some(fg.label()));
                    c.error(json!({"character": k}), &e);
                    vec![Item::Check(c)]
                }
            }
        }
        Task::Calculus(suite, ei, fi) => calculus_checks(suite, &prepared[ei], fi),
        Task::Structure(ei, fr, k) => {
            let pr = &prepared[ei];
            let fg = pr.filtration(fr);
            match structural_analysis_cached(fg, &pr.data, k) {
                Ok(mut r) => {
                    r.group = pr.entry.name.clone();
                    vec![Item::Structure(r)]
                }
                Err(e) => {
                    let mut c =
                        CheckRecord::new(Suite::Structure, "structural_analysis", CheckKind::Theorem, &pr.entry.name, Some(fg.label()));
                    c.error(json!({"character": k}), &e);
                    vec![Item::Check(c)]
                }
            }
        }
        Task::InducedSquares(ei) => induced_squares_checks(&prepared[ei]),
        Task::Heisenberg(ei) => heisenberg_checks(&prepared[ei], opts.heisen_max_order),
        Task::Cyclic(ei, fi) => cyclic_checks(&prepared[ei], fi),
        Task::Index2(ei, fi) => index2_checks(&prepared[ei], fi),
    }
}

fn calculus_checks(suite: Suite, pr: &Prepared, fi: usize) -> Vec<Item> {
    use CheckKind::*;
    let fg = &pr.entry.filtrations[fi];
    let name = pr.entry.name.as_str();
    let lab = Some(fg.label());
    let g = fg.group();
    let table = &pr.data.table;
    let mut pairing = CheckRecord::new(suite, "swan_pairing", Theorem, name, lab);
    let mut slope_dim = CheckRecord::new(suite, "swan_dim_slope", Theorem, name, lab);
    let mut slope_tensor = CheckRecord::new(suite, "slope_tensor", Theorem, name, lab);
    let mut tame = CheckRecord::new(suite, "tame_scaling", Theorem, name, lab);
    let mut induction = CheckRecord::new(suite, "induction_formula", Theorem, name, lab);
    let mut quadratic = CheckRecord::new(suite, "quadratic_induction", Theorem, name, lab);
    let sw: Vec<Rat> = (0..table.len()).map(|k| swan_triple(fg, &pr.data, k).map(|t| t.0)).collect::<Result<_>>().unwrap_or_default();
    match swan_class_function(fg) {
        Ok(s) => {
            for (k, chi) in table.irreducibles().iter().enumerate() {
                match inner_rational(chi, &s) {
                    Ok(v) => pairing.record(v == sw[k], || json!({"character": k, "pairing": fmt_rat(&v), "swan": fmt_rat(&sw[k])})),
                    Err(e) => pairing.error(json!(k), &e),
                }
            }
        }
        Err(e) => pairing.error(json!("S"), &e),
    }
    let mut sl = Vec::new();
    for (k, chi) in table.irreducibles().iter().enumerate() {
        match slope_irreducible(fg, chi) {
            Ok(s) => {
                slope_dim.record(true, || Value::Null);
                sl.push(Some(s));
            }
            Err(e) => {
                slope_dim.error(json!(k), &e);
                sl.push(None);
            }
        }
    }
    for a in 0..table.len() {
        for b in a..table.len() {
            let (Some(sa), Some(sb)) = (&sl[a], &sl[b]) else { continue };
            let prod = table.irr(a).tensor(table.irr(b));
            match slopes(fg, table, &prod) {
                Ok(v) => {
                    let top = v.last().cloned().unwrap_or_else(Rat::zero);
                    let mx = sa.max(sb);
                    let ok = &top <= mx && (sa == sb || &top == mx);
                    slope_tensor.record(ok, || json!({"pair": [a, b], "slope": fmt_rat(&top)}));
                }
                Err(e) => slope_tensor.error(json!([a, b]), &e),
            }
        }
    }
    let g1 = fg.at(1);
    let omega_sw = |h: &Subgroup| -> Result<Rat> { swan(fg, &index2_sign(g, h)?) };
    for h in g.all_subgroups() {
        let hg = h.as_group();
        let htable = match character_table(&hg.group) {
            Ok(t) => t,
            Err(e) => {
                induction.error(json!({"subgroup_order": h.order()}), &e);
                continue;
            }
        };
        let between = g1.is_subgroup_of(&h);
        if between {
            for (k, chi) in table.irreducibles().iter().enumerate() {
                let r = restrict(chi, &h).and_then(|r| swan_on_subgroup(fg, &h, &r));
                match r {
                    Ok(v) => {
                        let expect = &sw[k] * rat(g.order() as i64, h.order() as i64);
                        tame.record(v == expect, || json!({"subgroup": h.members(), "character": k, "restricted": fmt_rat(&v)}));
                    }
                    Err(e) => tame.error(json!({"subgroup": h.members(), "character": k}), &e),
                }
            }
        }
        let inv = match local_invariants(fg, &h) {
            Ok(v) => v,
            Err(e) => {
                induction.error(json!({"subgroup": h.members()}), &e);
                continue;
            }
        };
        let quad = h.index() == 2 && fg.p() == 2 && inv.e == 2;
        let s_omega = if quad { omega_sw(&h).ok() } else { None };
        for (j, sigma) in htable.irreducibles().iter().enumerate() {
            let res = (|| -> Result<(Rat, Rat, Rat)> {
                let lhs = conductors(fg, &induce(g, &h, sigma)?)?.swan;
                let sh = swan_on_subgroup(fg, &h, sigma)?;
                let f = rint(inv.f as i64);
                let rhs = &f * &sh + (&inv.disc_val - rint(h.index() as i64) + &f) * rint(sigma.dim());
                Ok((lhs, rhs, sh))
            })();
            match res {
                Ok((lhs, rhs, sh)) => {
                    induction.record(lhs == rhs, || json!({"subgroup": h.members(), "sigma": j, "lhs": fmt_rat(&lhs), "rhs": fmt_rat(&rhs)}));
                    if let Some(so) = &s_omega {
                        let q = &sh + so * rint(sigma.dim());
                        quadratic.record(lhs == q, || json!({"subgroup": h.members(), "sigma": j, "lhs": fmt_rat(&lhs), "rhs": fmt_rat(&q)}));
                    }
                }
                Err(e) => induction.error(json!({"subgroup": h.members(), "sigma": j}), &e),
            }
        }
    }
    [pairing, slope_dim, slope_tensor, tame, induction, quadratic].into_iter().map(Item::Check).collect()
}

fn induced_squares_checks(pr: &Prepared) -> Vec<Item> {
    use CheckKind::*;
    let g = &pr.entry.group;
    let name = pr.entry.name.as_str();
    let mut sym = CheckRecord::new(Suite::Appendix, "induced_sym2", Theorem, name, None);
    let mut ext = CheckRecord::new(Suite::Appendix, "induced_ext2", Theorem, name, None);
    let mut indep = CheckRecord::new(Suite::Appendix, "tau_independent_of_gamma", Theorem, name, None);
    for h in g.index2_list() {
        let hg = h.as_group();
        let table = match character_table(&hg.group) {
            Ok(t) => t,
            Err(e) => {
                sym.error(json!({"subgroup": h.members()}), &e);
                continue;
            }
        };
        let outside: Vec<usize> = (0..g.order()).filter(|&x| !h.contains(x)).collect();
        for (j, sigma) in table.irreducibles().iter().enumerate() {
            let res = (|| -> Result<(bool, bool, bool)> {
                let omega = index2_sign(g, &h)?;
                let rho = induce(g, &h, sigma)?;
                let tau = tau_extension(g, &h, sigma, outside[0])?;
                let mut same = true;
                for &gm in &outside[1..] {
                    if tau_extension(g, &h, sigma, gm)? != tau {
                        same = false;
                        break;
                    }
                }
                let s_ok = sym2(&rho) == induce(g, &h, &sym2(sigma))?.add(&tau);
                let e_ok = ext2(&rho) == induce(g, &h, &ext2(sigma))?.add(&tau.tensor(&omega));
                Ok((s_ok, e_ok, same))
            })();
            let subj = || json!({"subgroup": h.members(), "sigma": j});
            match res {
                Ok((a, b, c)) => {
                    sym.record(a, subj);
                    ext.record(b, subj);
                    indep.record(c, subj);
                }
                Err(e) => sym.error(subj(), &e),
            }
        }
    }
    vec![Item::Check(sym), Item::Check(ext), Item::Check(indep)]
}

fn heisenberg_checks(pr: &Prepared, max_order: usize) -> Vec<Item> {
    use CheckKind::*;
    let g = &pr.entry.group;
    let name = pr.entry.name.as_str();
    let mut exists = CheckRecord::new(Suite::Appendix, "heisenberg_rho_exists", Theorem, name, None);
    let mut unique = CheckRecord::new(Suite::Appendix, "heisenberg_unique", Theorem, name, None);
    let mut dim = CheckRecord::new(Suite::Appendix, "heisenberg_dim", Theorem, name, None);
    let Some(p) = [2usize, 3].into_iter().find(|&p| is_p_group_of(g, p)) else {
        return vec![];
    };
    if g.order() > max_order || g.is_abelian() {
        return vec![];
    }
    let center = g.center();
    let zs: Vec<Subgroup> = center
        .members()
        .iter()
        .filter(|&&x| g.element_order(x) == p)
        .map(|&x| g.closure(&[x]))
        .fold(Vec::new(), |mut acc, s| {
            if !acc.contains(&s) {
                acc.push(s);
            }
            acc
        });
    for z in zs {
        let Ok(hp) = heisen::validate_pair(g, &z, p) else { continue };
        let chars = match heisen::central_characters(&hp) {
            Ok(c) => c,
            Err(e) => {
                exists.error(json!({"z": z.members()}), &e);
                continue;
            }
        };
        let half = heisen::expected_half_rank(&hp);
        for (ci, c) in chars.iter().enumerate() {
            let subj = || json!({"z": z.members(), "central_character": ci});
            match heisen::rho_chi(&hp, c) {
                Ok(r) => {
                    exists.record(true, subj);
                    unique.record(r.matching == 1, || json!({"z": z.members(), "central_character": ci, "matching": r.matching}));
                    let expect = half.map(|d| p.pow(d));
                    dim.record(expect == Some(r.dim), || json!({"z": z.members(), "dim": r.dim, "expected": expect}));
                }
                Err(e) => exists.error(subj(), &e),
            }
        }
    }
    vec![Item::Check(exists), Item::Check(unique), Item::Check(dim)]
}

fn cyclic_checks(pr: &Prepared, fi: usize) -> Vec<Item> {
    let fg = &pr.entry.filtrations[fi];
    let g = fg.group();
    let name = pr.entry.name.as_str();
    let mut ident = CheckRecord::new(Suite::Appendix, "cyclic_identity", CheckKind::Theorem, name, Some(fg.label()));
    let mut cons = CheckRecord::new(Suite::Appendix, "cyclic_swan_consequence", CheckKind::Conjecture, name, Some(fg.label()));
    for gp in pr.data.normals() {
        let Ok(q) = g.quotient(gp) else { continue };
        if q.group.order() % 2 != 0 || !q.group.whole().is_cyclic() {
            continue;
        }
        let sub = gp.as_group();
        let table = match character_table(&sub.group) {
            Ok(t) => t,
            Err(e) => {
                ident.error(json!({"gp": gp.members()}), &e);
                continue;
            }
        };
        for (j, chi) in linear_characters(&table).iter().enumerate() {
            let subj = || json!({"gp_order": gp.order(), "gp": gp.greedy_generators(), "chi": j});
            match cyclic_identity_check(fg, gp, chi) {
                Ok(r) => {
                    ident.record(r.identity, subj);
                    cons.record(r.swan_ok(), || {
                        json!({"gp": gp.greedy_generators(), "chi": j, "lhs": fmt_rat(&r.swan_lhs), "rhs": fmt_rat(&r.swan_rhs)})
                    });
                }
                Err(e) => ident.error(subj(), &e),
            }
        }
    }
    vec![Item::Check(ident), Item::Check(cons)]
}

fn index2_checks(pr: &Prepared, fi: usize) -> Vec<Item> {
    use CheckKind::*;
    let fg = &pr.entry.filtrations[fi];
    let g = fg.group();
    let name = pr.entry.name.as_str();
    let lab = Some(fg.label());
    let mut sw = CheckRecord::new(Suite::Appendix, "index2_swan", Theorem, name, lab);
    let mut dl = CheckRecord::new(Suite::Appendix, "index2_delta", Theorem, name, lab);
    let mut budget = CheckRecord::new(Suite::Appendix, "index2_tau_budget", Measured, name, lab);
    let mut plus_sign = CheckRecord::new(Suite::Appendix, "index2_delta_plus_budget", Measured, name, lab);
    for h in g.index2_list() {
        let hg = h.as_group();
        let table = match character_table(&hg.group) {
            Ok(t) => t,
            Err(e) => {
                sw.error(json!({"subgroup": h.members()}), &e);
                continue;
            }
        };
        for (j, sigma) in table.irreducibles().iter().enumerate() {
            let reducible = induce(g, &h, sigma).and_then(|r| inner_rational(&r, &r)).map(|n| n != Rat::one());
            if let Ok(true) = reducible {
                sw.na += 1;
                dl.na += 1;
                continue;
            }
            let subj = || json!({"subgroup": h.greedy_generators(), "sigma": j});
            match index2_identity_check(fg, &h, sigma) {
                Ok(r) => {
                    sw.record(r.swan_ok, subj);
                    dl.record(r.delta_ok, subj);
                    plus_sign.record(r.plus_sign_ok, subj);
                    budget.pass += 1;
                    budget.samples.push(json!({"subgroup": h.greedy_generators(), "sigma": j, "dim": r.dim,
                        "delta": fmt_rat(&r.delta), "delta_sigma": fmt_rat(&r.delta_sigma), "s": fmt_rat(&r.s),
                        "tau_budget": fmt_rat(&r.tau_budget), "sigma_self_dual": r.sigma_self_dual,
                        "tau_has_trivial": r.tau_has_trivial, "plus_budget_holds": r.plus_sign_ok}));
                }
                Err(e) => sw.error(subj(), &e),
            }
        }
    }
    vec![Item::Check(sw), Item::Check(dl), Item::Check(budget), Item::Check(plus_sign)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::corpus::builtin_corpus;
    use crate::exactnum::rint;
    use crate::groupcore::cyclic;
    use crate::ramfilt::ValidateOptions;

    fn entry(name: &str) -> CorpusEntry {
        builtin_corpus(ValidateOptions::default()).unwrap().into_iter().find(|e| e.name == name).unwrap()
    }

    fn by_dim(fg: &FilteredGroup, dim: i64) -> Vec<DeltaReport> {
        let data = GroupData::new(fg.group()).unwrap();
        (0..data.table.len())
            .map(|k| delta_classify_cached(fg, &data, k).unwrap())
            .filter(|r| r.dim == dim)
            .collect()
    }

    #[test]
    fn s3_delta_equals_swan() {
        let e = entry("S3");
        let r = &by_dim(&e.filtrations[0], 2)[0];
        assert_eq!((r.swan.clone(), r.delta.clone()), (rint(1), rint(1)));
        assert_eq!(r.flag("p_odd_equality").unwrap().outcome, Outcome::Pass);
    }

    #[test]
    fn q8_symplectic_equality() {
        let e = entry("Q8");
        let fg = &e.filtrations[0];
        let r = &by_dim(fg, 2)[0];
        assert_eq!((r.swan.clone(), r.delta.clone(), r.fs), (rint(3), rint(3), -1));
        assert_eq!(r.flag("conjecture").unwrap().outcome, Outcome::Pass);
        assert_eq!(r.flag("equality_symplectic").unwrap().outcome, Outcome::Pass);
        let data = GroupData::new(fg.group()).unwrap();
        let k = data.table.dims().iter().position(|&d| d == 2).unwrap();
        let s = structural_analysis_cached(fg, &data, k).unwrap();
        assert_eq!(s.case, StructureCase::IEqZIrred);
        assert_eq!((s.n, s.alpha_prime.clone(), s.delta.clone()), (2, rint(1), rint(3)));
    }

    #[test]
    fn i0_seven_dimensional() {
        let e = entry("I0");
        let r = &by_dim(&e.filtrations[0], 7)[0];
        assert_eq!(r.swan, rint(1));
        assert_eq!((r.swan_sym2.clone(), r.swan_ext2.clone(), r.delta.clone()), (rint(3), rint(3), rint(0)));
        assert_eq!(r.flag("zero_iff_square_trivial").unwrap().outcome, Outcome::Pass);
    }

    #[test]
    fn pauli_has_order_four_case() {
        let e = entry("Pauli16");
        let fg = &e.filtrations[0];
        let data = GroupData::new(fg.group()).unwrap();
        let cases: Vec<StructureCase> = (0..data.table.len())
            .filter(|&k| data.table.dims()[k] > 1)
            .map(|k| structural_analysis_cached(fg, &data, k).unwrap().case)
            .collect();
        assert!(cases.contains(&StructureCase::IOrder4));
    }

    #[test]
    fn enumeration_examples() {
        let wild = EnumerateOptions { wild_only: true, ..EnumerateOptions::default() };
        let c2 = cyclic(2).unwrap();
        let labels: Vec<_> =
            enumerate_filtrations_with(&c2, 2, &EnumerateOptions { max_depth: 2, ..wild }).unwrap().iter().map(|f| f.canonical_key()).collect();
        assert_eq!(labels.len(), 2, "{labels:?}");
        assert!(enumerate_filtrations_with(&entry("S3").group, 2, &wild).unwrap().is_empty());
        assert_eq!(enumerate_filtrations(&cyclic(1).unwrap(), 2, 3).unwrap().len(), 1);
    }
}
