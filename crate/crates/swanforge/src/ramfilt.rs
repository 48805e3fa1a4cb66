//! Lower ramification filtrations, conductors and Herbrand functions.
//!
//! A filtration is given by a jump list `[(0, G), (i₁, G_{i₁}), …, (i_r, 1)]`;
//! `G_i` for intermediate `i` repeats the last listed subgroup. Filtrations
//! are abstract: admissibility means the group-theoretic axioms below, not
//! realisability by an actual extension of local fields.

use std::sync::Arc;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::charcalc::{induce, same_group, CharTable, ClassFun};
use crate::error::{Error, Result};
use crate::exactnum::{fmt_rat, rat, rint, Rat};
use crate::groupcore::{Group, QuotientGroup, Subgroup};

/// Which commutator axiom to impose.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommutatorRule {
    /// `[G_i, G_j] ⊆ G_{i+j}`
    #[default]
    Additive,
    /// `[G_i, G_j] ⊆ G_{i+j+1}`, the sharper rule satisfied by local fields.
    Sharp,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    pub hasse_arf: bool,
    pub commutators: CommutatorRule,
}

#[derive(Clone, Debug)]
pub struct FilteredGroup {
    group: Arc<Group>,
    p: usize,
    /// `chain[i] = G_i` for `0 ≤ i ≤ m+1`, the last entry trivial.
    chain: Vec<Subgroup>,
    orders: Vec<usize>,
    label: String,
    hasse_arf: Option<bool>,
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl FilteredGroup {
    /// Validate a jump list and build the filtration.
    pub fn new(
        group: &Arc<Group>,
        p: usize,
        jumps: &[(usize, Subgroup)],
        opts: ValidateOptions,
    ) -> Result<FilteredGroup> {
        if !is_prime(p) {
            return Err(Error::input(format!("{p} is not a prime")));
        }
        let Some((i0, g0)) = jumps.first() else {
            return Err(Error::input("empty jump list"));
        };
        if *i0 != 0 {
            return Err(Error::input("the first jump must be at index 0"));
        }
        if g0.order() != group.order() {
            return Err(Error::input("G₀ must be the whole group (larger ambient groups are not supported)"));
        }
        for js in jumps {
            if !same_group(js.1.parent(), group) {
                return Err(Error::input("jump subgroup belongs to another group"));
            }
        }
        for w in jumps.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::input("jump indices must increase"));
            }
            if !w[1].1.is_subgroup_of(&w[0].1) {
                return Err(Error::input(format!("the subgroup at index {} is not contained in the previous one", w[1].0)));
            }
        }
        let last = jumps.last().expect("nonempty");
        if !last.1.is_trivial() {
            return Err(Error::validation("A5", format!("the filtration never becomes trivial (last jump at {} has order {})", last.0, last.1.order())));
        }
        let mut chain: Vec<Subgroup> = Vec::new();
        for (k, (i, s)) in jumps.iter().enumerate() {
            let next = jumps.get(k + 1).map(|j| j.0).unwrap_or(i + 1);
            for _ in *i..next {
                chain.push(s.clone());
            }
        }
        // trim trailing trivial entries to exactly one
        while chain.len() >= 2 && chain[chain.len() - 2].is_trivial() {
            chain.pop();
        }
        let orders = chain.iter().map(Subgroup::order).collect();
        let mut fg = FilteredGroup { group: group.clone(), p, chain, orders, label: String::new(), hasse_arf: None };
        fg.check_axioms(opts)?;
        fg.label = fg.default_label();
        if opts.hasse_arf {
            fg.check_hasse_arf()?;
            fg.hasse_arf = Some(true);
        }
        Ok(fg)
    }

    /// Build from a full list `G_0, G_1, …, G_m` (trivial group appended).
    pub fn from_chain(group: &Arc<Group>, p: usize, chain: &[Subgroup], opts: ValidateOptions) -> Result<FilteredGroup> {
        let mut jumps: Vec<(usize, Subgroup)> = Vec::new();
        for (i, s) in chain.iter().enumerate() {
            if jumps.last().map(|j| &j.1 != s).unwrap_or(true) {
                jumps.push((i, s.clone()));
            }
        }
        if jumps.last().map(|j| !j.1.is_trivial()).unwrap_or(true) {
            jumps.push((chain.len(), group.trivial()));
        }
        FilteredGroup::new(group, p, &jumps, opts)
    }

    /// Trivial group with its only filtration.
    fn trivial_on(group: &Arc<Group>, p: usize) -> FilteredGroup {
        FilteredGroup {
            group: group.clone(),
            p,
            chain: vec![group.trivial()],
            orders: vec![1],
            label: "0:1".into(),
            hasse_arf: None,
        }
    }

    fn check_axioms(&self, opts: ValidateOptions) -> Result<()> {
        let g = &self.group;
        for (i, s) in self.chain.iter().enumerate() {
            if !s.is_normal() {
                let (x, y) = normality_witness(s);
                return Err(Error::validation("A1", format!("G_{i} is not normal: element {x} conjugated by generator {y} leaves it")));
            }
        }
        let g1 = self.chain.get(1).cloned().unwrap_or_else(|| g.trivial());
        let q = g.quotient(&g1)?;
        let tame = q.group.order();
        if tame % self.p == 0 || !q.group.whole().is_cyclic() {
            return Err(Error::validation("A2", format!("G₀/G₁ has order {tame} and must be cyclic of order prime to {}", self.p)));
        }
        for i in 1..self.chain.len().saturating_sub(1) {
            let (a, b) = (&self.chain[i], &self.chain[i + 1]);
            for &x in a.members() {
                if !b.contains(g.pow(x, self.p as i64)) {
                    return Err(Error::validation("A3", format!("G_{i}/G_{} is not elementary abelian: element {x} has p-th power outside", i + 1)));
                }
                for &y in a.members() {
                    if !b.contains(g.commutator(x, y)) {
                        return Err(Error::validation("A3", format!("G_{i}/G_{} is not abelian: [{x},{y}] lies outside", i + 1)));
                    }
                }
            }
        }
        let m = self.chain.len() - 1;
        let shift = match opts.commutators {
            CommutatorRule::Additive => 0,
            CommutatorRule::Sharp => 1,
        };
        for i in 1..m {
            for j in i..m {
                let target = self.at(i + j + shift);
                let c = g.commutator_subgroup(&self.chain[i], &self.chain[j]);
                if !c.is_subgroup_of(&target) {
                    let axiom = if shift == 0 { "A4" } else { "A4+" };
                    let (x, y) = commutator_witness(&self.chain[i], &self.chain[j], &target);
                    return Err(Error::validation(axiom, format!("[G_{i}, G_{j}] ⊄ G_{}: [{x},{y}] lies outside", i + j + shift)));
                }
            }
        }
        Ok(())
    }

    /// Upper breaks of every abelian quotient must be integers.
    pub fn check_hasse_arf(&self) -> Result<()> {
        let g = &self.group;
        let comm = g.derived_subgroup();
        let herb = self.herbrand();
        for n in g.normal_subgroups() {
            if !comm.is_subgroup_of(&n) {
                continue;
            }
            for i in 0..self.chain.len() - 1 {
                let a = self.chain[i].join(&n);
                let b = self.chain[i + 1].join(&n);
                if a != b {
                    let v = herb.phi(&rint(i as i64));
                    if !v.is_integer() {
                        return Err(Error::validation(
                            "Hasse-Arf",
                            format!("abelian quotient by a normal subgroup of order {} has upper break {}", n.order(), fmt_rat(&v)),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn default_label(&self) -> String {
        self.jumps().iter().map(|(i, s)| format!("{i}:{}", s.order())).collect::<Vec<_>>().join(",")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> FilteredGroup {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `G_i` (trivial beyond the chain).
    pub fn at(&self, i: usize) -> Subgroup {
        self.chain.get(i).cloned().unwrap_or_else(|| self.chain.last().expect("nonempty").clone())
    }

    pub fn order_at(&self, i: usize) -> usize {
        self.orders.get(i).copied().unwrap_or(1)
    }

    pub fn chain(&self) -> &[Subgroup] {
        &self.chain
    }

    /// Largest `i` with `G_i ≠ 1`; `None` for the trivial group.
    pub fn depth(&self) -> Option<usize> {
        (self.chain.len() >= 2).then(|| self.chain.len() - 2)
    }

    pub fn is_wild(&self) -> bool {
        self.order_at(1) > 1
    }

    pub fn hasse_arf_checked(&self) -> Option<bool> {
        self.hasse_arf
    }

    /// Canonical jump list: index 0 plus every index where the subgroup changes.
    pub fn jumps(&self) -> Vec<(usize, Subgroup)> {
        let mut out: Vec<(usize, Subgroup)> = Vec::new();
        for (i, s) in self.chain.iter().enumerate() {
            if out.last().map(|j| &j.1 != s).unwrap_or(true) {
                out.push((i, s.clone()));
            }
        }
        out
    }

    /// Key for deduplication: the sorted member sets along the chain.
    pub fn canonical_key(&self) -> Vec<Vec<usize>> {
        self.chain.iter().map(|s| s.members().to_vec()).collect()
    }

    pub fn to_json(&self) -> Value {
        let jumps: Vec<Value> = self
            .jumps()
            .into_iter()
            .map(|(i, s)| json!({"i": i, "order": s.order(), "generators": s.greedy_generators()}))
            .collect();
        json!({"p": self.p, "label": self.label, "jumps": jumps, "realizability": "abstract"})
    }

    pub fn herbrand(&self) -> BreakData {
        let lower: Vec<usize> = (0..self.chain.len() - 1).filter(|&i| self.orders[i] != self.orders[i + 1]).collect();
        let bd = BreakData { orders: self.orders.clone(), lower_breaks: lower, upper_breaks: Vec::new() };
        let upper = bd.lower_breaks.iter().map(|&i| bd.phi(&rint(i as i64))).collect();
        BreakData { upper_breaks: upper, ..bd }
    }

    /// `G^v`, closed at breaks.
    pub fn upper(&self, v: &Rat) -> Subgroup {
        let u = self.herbrand().psi(v);
        let idx = u.ceil().to_integer().to_usize().unwrap_or(0);
        self.at(idx)
    }
}

fn normality_witness(s: &Subgroup) -> (usize, usize) {
    let g = s.parent();
    for &y in &g.generator_indices() {
        for &x in s.members() {
            if !s.contains(g.conj(x, y)) {
                return (x, y);
            }
        }
    }
    (0, 0)
}

fn commutator_witness(a: &Subgroup, b: &Subgroup, target: &Subgroup) -> (usize, usize) {
    let g = a.parent();
    for &x in a.members() {
        for &y in b.members() {
            if !target.contains(g.commutator(x, y)) {
                return (x, y);
            }
        }
    }
    // all single commutators inside; the closure still escapes (impossible for a subgroup target)
    (0, 0)
}

/// Herbrand data of a filtration with subgroup orders `g_0, g_1, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakData {
    /// `g_i` for `0 ≤ i ≤ m+1` (the last entry is 1 unless the group is trivial)
    pub orders: Vec<usize>,
    pub lower_breaks: Vec<usize>,
    pub upper_breaks: Vec<Rat>,
}

impl BreakData {
    fn g(&self, i: usize) -> i64 {
        *self.orders.get(i).unwrap_or(self.orders.last().expect("nonempty")) as i64
    }

    fn slope(&self, i: usize) -> Rat {
        rat(self.g(i + 1), self.g(0))
    }

    /// `φ(u)` for `u ≥ 0`.
    pub fn phi(&self, u: &Rat) -> Rat {
        assert!(!u.is_negative(), "φ is evaluated on u ≥ 0 only");
        let fl = u.floor().to_integer().to_usize().expect("u fits usize");
        let mut acc = Rat::zero();
        for i in 0..fl {
            acc += self.slope(i);
        }
        let frac = u - rint(fl as i64);
        acc + frac * self.slope(fl)
    }

    /// `ψ = φ⁻¹` for `v ≥ 0`.
    pub fn psi(&self, v: &Rat) -> Rat {
        assert!(!v.is_negative(), "ψ is evaluated on v ≥ 0 only");
        let mut acc = Rat::zero();
        let mut i = 0usize;
        loop {
            let s = self.slope(i);
            if &(acc.clone() + &s) >= v {
                return rint(i as i64) + (v - acc) / s;
            }
            acc += s;
            i += 1;
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "orders": self.orders,
            "lower_breaks": self.lower_breaks,
            "upper_breaks": self.upper_breaks.iter().map(fmt_rat).collect::<Vec<_>>(),
        })
    }
}

/// `dim V^S` for a virtual character; errors if the average is not an integer.
pub fn fixed_dim_virtual(chi: &ClassFun, s: &Subgroup) -> Result<i64> {
    let avg = chi.average_over(s);
    let r = avg.to_rational().ok_or_else(|| Error::input("fixed-space dimension is not rational"))?;
    if !r.is_integer() {
        return Err(Error::input(format!("fixed-space dimension {} is not an integer", fmt_rat(&r))));
    }
    Ok(r.to_integer().to_i64().expect("small"))
}

pub fn fixed_dim(chi: &ClassFun, s: &Subgroup) -> Result<usize> {
    let d = fixed_dim_virtual(chi, s)?;
    usize::try_from(d).map_err(|_| Error::input("negative fixed-space dimension: not a character"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conductors {
    pub swan: Rat,
    pub artin: Rat,
}

impl Conductors {
    pub fn to_json(&self) -> Value {
        json!({"swan": fmt_rat(&self.swan), "artin": fmt_rat(&self.artin)})
    }
}

/// Swan and Artin exponents from a fixed-dimension oracle on the chain.
pub fn conductors_from(fg: &FilteredGroup, dim: i64, mut fixed: impl FnMut(&Subgroup) -> Result<i64>) -> Result<Conductors> {
    let g0 = fg.order_at(0) as i64;
    let mut swan = Rat::zero();
    let mut prev: Option<(&Subgroup, i64)> = None;
    for (i, s) in fg.chain().iter().enumerate() {
        if s.is_trivial() {
            break;
        }
        let fd = match prev {
            Some((p, v)) if p == s => v,
            _ => fixed(s)?,
        };
        prev = Some((s, fd));
        if i >= 1 {
            swan += rat(s.order() as i64 * (dim - fd), g0);
        }
    }
    let tame = if fg.group().order() == 1 { 0 } else { dim - fixed(&fg.at(0))? };
    Ok(Conductors { artin: &swan + rint(tame), swan })
}

pub fn conductors(fg: &FilteredGroup, chi: &ClassFun) -> Result<Conductors> {
    if !same_group(chi.group(), fg.group()) {
        return Err(Error::input("character and filtration live on different groups"));
    }
    conductors_from(fg, chi.dim(), |s| fixed_dim_virtual(chi, s))
}

pub fn swan(fg: &FilteredGroup, chi: &ClassFun) -> Result<Rat> {
    Ok(conductors(fg, chi)?.swan)
}

/// Slope of an irreducible: `φ(m_χ)` with `m_χ` the last index where χ is nontrivial.
pub fn slope_irreducible(fg: &FilteredGroup, chi: &ClassFun) -> Result<Rat> {
    let d = chi.dim();
    let mut m = 0;
    for (i, s) in fg.chain().iter().enumerate().skip(1) {
        if s.is_trivial() {
            break;
        }
        if fixed_dim_virtual(chi, s)? < d {
            m = i;
        }
    }
    let slope = fg.herbrand().phi(&rint(m as i64));
    let sw = swan(fg, chi)?;
    if sw != &slope * rint(d) {
        return Err(Error::Theorem(format!("Sw = {} differs from dim·slope = {}", fmt_rat(&sw), fmt_rat(&(&slope * rint(d))))));
    }
    Ok(slope)
}

/// Slopes of the irreducible constituents of a character, with multiplicity, sorted.
pub fn slopes(fg: &FilteredGroup, table: &CharTable, chi: &ClassFun) -> Result<Vec<Rat>> {
    let mult = table.decompose_int(chi)?;
    if mult.iter().any(|&m| m < 0) {
        return Err(Error::input("slopes need a genuine character"));
    }
    let mut out = Vec::new();
    for (i, &m) in mult.iter().enumerate() {
        if m > 0 {
            let s = slope_irreducible(fg, table.irr(i))?;
            out.extend(std::iter::repeat(s).take(m as usize));
        }
    }
    out.sort();
    Ok(out)
}

/// `S = Σ_{i≥1} (g_i/g₀)·Ind_{G_i}^G(reg − 1)`.
pub fn swan_class_function(fg: &FilteredGroup) -> Result<ClassFun> {
    let g = fg.group();
    let g0 = fg.order_at(0) as i64;
    let mut acc = ClassFun::zero(g);
    for s in fg.chain().iter().skip(1) {
        if s.is_trivial() {
            break;
        }
        let sub = s.as_group();
        let piece = ClassFun::regular(&sub.group).sub(&ClassFun::trivial(&sub.group));
        acc = acc.add(&induce(g, s, &piece)?.scale(&rat(s.order() as i64, g0)));
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivedMode {
    Subgroup,
    Quotient,
}

/// Filtration induced on a subgroup or a quotient.
#[derive(Clone, Debug)]
pub struct Derived {
    /// `Err` when the induced quotient numbering has non-integral lower breaks.
    pub filtration: std::result::Result<FilteredGroup, Error>,
    pub alpha: Rat,
    pub beta: Rat,
    pub quotient: Option<QuotientGroup>,
    /// Group carrying the derived filtration (the subgroup or the quotient).
    pub group: Arc<Group>,
}

pub fn derived_filtration(fg: &FilteredGroup, mode: DerivedMode, s: &Subgroup) -> Result<Derived> {
    if !same_group(s.parent(), fg.group()) {
        return Err(Error::input("subgroup of another group"));
    }
    match mode {
        DerivedMode::Subgroup => {
            let sub = s.as_group();
            let chain: Vec<Subgroup> = fg
                .chain()
                .iter()
                .map(|gi| {
                    let members = s.intersect(gi).members().iter().map(|&x| sub.from_parent[x]).collect();
                    Subgroup::from_members(&sub.group, members)
                })
                .collect();
            let f = FilteredGroup::from_chain(&sub.group, fg.p(), &chain, ValidateOptions::default())?;
            let (alpha, beta) = match f.depth() {
                None => (Rat::zero(), Rat::zero()),
                Some(_) => {
                    let hb = f.herbrand();
                    let last = hb.lower_breaks.last().copied().unwrap_or(0);
                    (hb.phi(&rint(last as i64)), rint(last as i64))
                }
            };
            Ok(Derived { filtration: Ok(f), alpha, beta, quotient: None, group: sub.group.clone() })
        }
        DerivedMode::Quotient => {
            if !s.is_normal() {
                return Err(Error::input("quotient mode needs a normal subgroup"));
            }
            let q = fg.group().quotient(s)?;
            let hb_g = fg.herbrand();
            // Herbrand function of the filtration S ∩ G_i on S
            let s_orders: Vec<usize> = fg.chain().iter().map(|gi| s.intersect(gi).order()).collect();
            let s_bd = BreakData { orders: s_orders, lower_breaks: Vec::new(), upper_breaks: Vec::new() };
            // quotient lower breaks: v = φ_S(u) for the u where G_u S ≠ G_{u+1} S
            let images: Vec<Subgroup> = fg.chain().iter().map(|gi| q.image(gi)).collect();
            let mut breaks: Vec<(Rat, Rat)> = Vec::new();
            for u in 0..images.len().saturating_sub(1) {
                if images[u] != images[u + 1] {
                    let ur = rint(u as i64);
                    breaks.push((s_bd.phi(&ur), hb_g.phi(&ur)));
                }
            }
            let (beta, alpha) = breaks.last().cloned().unwrap_or((Rat::zero(), Rat::zero()));
            let filtration = if q.group.order() == 1 {
                Ok(FilteredGroup::trivial_on(&q.group, fg.p()))
            } else if let Some((b, _)) = breaks.iter().find(|(b, _)| !b.is_integer()) {
                Err(Error::validation(
                    "integrality",
                    format!("quotient lower break {} is not an integer", fmt_rat(b)),
                ))
            } else {
                let top = beta.to_integer().to_usize().expect("small") + 1;
                let chain: Vec<Subgroup> = (0..=top)
                    .map(|v| {
                        let u = s_bd.psi(&rint(v as i64)).ceil().to_integer().to_usize().expect("small");
                        images.get(u).cloned().unwrap_or_else(|| q.group.trivial())
                    })
                    .collect();
                FilteredGroup::from_chain(&q.group, fg.p(), &chain, ValidateOptions::default())
            };
            let group = q.group.clone();
            Ok(Derived { filtration, alpha, beta, quotient: Some(q), group })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalInvariants {
    pub e: usize,
    pub f: usize,
    pub disc_val: Rat,
}

pub fn local_invariants(fg: &FilteredGroup, h: &Subgroup) -> Result<LocalInvariants> {
    let g = fg.group();
    if !same_group(h.parent(), g) {
        return Err(Error::input("subgroup of another group"));
    }
    let g0 = fg.at(0);
    let hg0 = h.intersect(&g0);
    if !h.is_subgroup_of(&g0) {
        return Err(Error::input("H must lie in G₀"));
    }
    let e = g0.order() / hg0.order();
    let idx = h.index();
    if idx % e != 0 {
        return Err(Error::input("residue degree is not an integer"));
    }
    let one = ClassFun::trivial(&h.as_group().group);
    let ind = induce(g, h, &one)?;
    Ok(LocalInvariants { e, f: idx / e, disc_val: conductors(fg, &ind)?.artin })
}

/// Swan exponent of a class function on `H`, for the filtration `H ∩ G_i`
/// (normalised by `|H ∩ G₀|`).
pub fn swan_on_subgroup(fg: &FilteredGroup, h: &Subgroup, sigma: &ClassFun) -> Result<Rat> {
    let f = derived_filtration(fg, DerivedMode::Subgroup, h)?.filtration?;
    Ok(conductors_from(&f, sigma.dim(), |sub| fixed_dim_on(sigma, sub))?.swan)
}

/// Fixed dimension of `sigma` on a subgroup given in a group with the same points.
fn fixed_dim_on(sigma: &ClassFun, s: &Subgroup) -> Result<i64> {
    let sg = sigma.group();
    let members: Result<Vec<usize>> = s
        .members()
        .iter()
        .map(|&x| sg.index_of(s.parent().element(x)).ok_or_else(|| Error::input("subgroup outside σ's group")))
        .collect();
    let sub = Subgroup::from_members(sg, members?);
    fixed_dim_virtual(sigma, &sub)
}

/// Filtration file: `{"p": int, "jumps": [{"i": int, "generators": [...]}, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiltrationSpec {
    pub p: usize,
    pub jumps: Vec<JumpSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JumpSpec {
    pub i: usize,
    pub generators: Vec<usize>,
}

pub fn filtration_from_spec(g: &Arc<Group>, spec: &FiltrationSpec, opts: ValidateOptions) -> Result<FilteredGroup> {
    let jumps = spec
        .jumps
        .iter()
        .map(|j| Ok((j.i, g.try_closure(&j.generators)?)))
        .collect::<Result<Vec<_>>>()?;
    FilteredGroup::new(g, spec.p, &jumps, opts)
}

pub fn filtration_from_json(g: &Arc<Group>, text: &str, opts: ValidateOptions) -> Result<FilteredGroup> {
    let spec: FiltrationSpec =
        serde_json::from_str(text).map_err(|e| Error::input(format!("filtration file: {e}")))?;
    filtration_from_spec(g, &spec, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charcalc::{character_table, restrict};
    use crate::groupcore::{cyclic, dihedral, heisenberg_p3, quaternion};

    fn q8_filtration() -> (Arc<Group>, FilteredGroup) {
        let g = quaternion(8).unwrap();
        let jumps = vec![(0, g.whole()), (2, g.center()), (4, g.trivial())];
        let fg = FilteredGroup::new(&g, 2, &jumps, ValidateOptions::default()).unwrap();
        (g, fg)
    }

    fn s3_filtration() -> (Arc<Group>, FilteredGroup) {
        let g = dihedral(3).unwrap();
        let c3 = g.derived_subgroup();
        let fg = FilteredGroup::new(&g, 3, &[(0, g.whole()), (1, c3), (2, g.trivial())], ValidateOptions::default()).unwrap();
        (g, fg)
    }

    #[test]
    fn q8_conductors_and_herbrand() {
        let (g, fg) = q8_filtration();
        let t = character_table(&g).unwrap();
        let c = conductors(&fg, t.irr(4)).unwrap();
        assert_eq!(c.swan, rint(3));
        let h = fg.herbrand();
        assert_eq!(h.phi(&rint(1)), rint(1));
        assert_eq!(h.phi(&rint(3)), rat(3, 2));
        assert_eq!(slope_irreducible(&fg, t.irr(4)).unwrap(), rat(3, 2));
        assert_eq!(fixed_dim(t.irr(4), &g.center()).unwrap(), 0);
        for v in [rat(1, 3), rat(5, 4), rint(2), rat(7, 2)] {
            assert_eq!(h.phi(&h.psi(&v)), v);
        }
        assert_eq!(fg.upper(&rat(3, 2)).order(), 2);
        assert_eq!(fg.upper(&rat(8, 5)).order(), 1);
    }

    #[test]
    fn s3_conductors() {
        let (g, fg) = s3_filtration();
        let t = character_table(&g).unwrap();
        let c = conductors(&fg, t.irr(2)).unwrap();
        assert_eq!(c, Conductors { swan: rint(1), artin: rint(3) });
        let z = conductors(&fg, t.irr(0)).unwrap();
        assert_eq!(z, Conductors { swan: rint(0), artin: rint(0) });
        let s = swan_class_function(&fg).unwrap();
        assert_eq!(crate::charcalc::inner_rational(t.irr(2), &s).unwrap(), rint(1));
        // tame scaling onto G₁
        let c3 = fg.at(1);
        let r = restrict(t.irr(2), &c3).unwrap();
        assert_eq!(swan_on_subgroup(&fg, &c3, &r).unwrap(), rint(2));
        let li = local_invariants(&fg, &c3).unwrap();
        assert_eq!(li, LocalInvariants { e: 2, f: 1, disc_val: rint(1) });
    }

    #[test]
    fn c2_discriminant() {
        let g = cyclic(2).unwrap();
        let fg = FilteredGroup::new(&g, 2, &[(0, g.whole()), (2, g.trivial())], ValidateOptions::default()).unwrap();
        let li = local_invariants(&fg, &g.trivial()).unwrap();
        assert_eq!(li.disc_val, rint(2));
        let li = local_invariants(&fg, &g.whole()).unwrap();
        assert_eq!(li, LocalInvariants { e: 1, f: 1, disc_val: rint(0) });
    }

    #[test]
    fn heisenberg_slope() {
        let g = heisenberg_p3(3).unwrap();
        let fg = FilteredGroup::new(&g, 3, &[(0, g.whole()), (2, g.center()), (3, g.trivial())], ValidateOptions::default()).unwrap();
        let t = character_table(&g).unwrap();
        let three = t.irreducibles().iter().find(|c| c.dim() == 3).unwrap();
        assert_eq!(swan(&fg, three).unwrap(), rat(10, 3));
        assert_eq!(slope_irreducible(&fg, three).unwrap(), rat(10, 9));
    }

    #[test]
    fn axiom_failures() {
        let v4 = crate::groupcore::elementary_abelian(2, 2).unwrap();
        let err = FilteredGroup::new(&v4, 3, &[(0, v4.whole()), (1, v4.trivial())], ValidateOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Validation { ref axiom, .. } if axiom == "A2"));
        let g = quaternion(8).unwrap();
        let err = FilteredGroup::new(&g, 2, &[(0, g.whole()), (2, g.center())], ValidateOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Validation { ref axiom, .. } if axiom == "A5"));
        // G₁ = Q8, G₂ = 1 fails A3 (Q8 is not elementary abelian)
        let err = FilteredGroup::new(&g, 2, &[(0, g.whole()), (2, g.trivial())], ValidateOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Validation { ref axiom, .. } if axiom == "A3"));
    }

    #[test]
    fn quotient_by_center_of_q8() {
        let (g, fg) = q8_filtration();
        let d = derived_filtration(&fg, DerivedMode::Quotient, &g.center()).unwrap();
        let qf = d.filtration.unwrap();
        assert_eq!(qf.group().order(), 4);
        assert_eq!(qf.herbrand().upper_breaks, vec![rint(1)]);
        assert_eq!(d.alpha, rint(1));
        assert_eq!(d.beta, rint(1));
        let whole = derived_filtration(&fg, DerivedMode::Quotient, &g.whole()).unwrap();
        assert_eq!((whole.alpha, whole.beta), (rint(0), rint(0)));
        assert_eq!(whole.filtration.unwrap().group().order(), 1);
    }
}
