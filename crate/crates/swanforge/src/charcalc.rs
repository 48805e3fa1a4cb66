//! Class functions and character tables.
//!
//! Tables are computed with the Dixon–Schneider method: common eigenvectors
//! of the class-multiplication matrices over a prime field `F_ℓ` with
//! `ℓ ≡ 1 (mod exp G)`, followed by a discrete Fourier lift of each value
//! back into the cyclotomic field.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{fmt_rat, rat, rint, CycNum, Rat};
use crate::groupcore::{Group, Subgroup};

pub const DEFAULT_CLASS_CAP: usize = 256;

pub fn same_group(a: &Arc<Group>, b: &Arc<Group>) -> bool {
    Arc::ptr_eq(a, b)
        || (a.order() == b.order() && a.degree() == b.degree() && a.generators() == b.generators())
}

/// A class function with cyclotomic values, one per conjugacy class.
#[derive(Clone, Debug)]
pub struct ClassFun {
    group: Arc<Group>,
    values: Vec<CycNum>,
}

impl PartialEq for ClassFun {
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group) && self.values == other.values
    }
}

impl ClassFun {
    pub fn new(group: &Arc<Group>, values: Vec<CycNum>) -> Result<ClassFun> {
        if values.len() != group.num_classes() {
            return Err(Error::input("one value per conjugacy class required"));
        }
        if values.iter().any(|v| v.order() != group.ambient()) {
            return Err(Error::input("class function values must use the group's ambient order"));
        }
        Ok(ClassFun { group: group.clone(), values })
    }

    fn raw(group: &Arc<Group>, values: Vec<CycNum>) -> ClassFun {
        ClassFun { group: group.clone(), values }
    }

    pub fn constant(group: &Arc<Group>, r: Rat) -> ClassFun {
        let v = CycNum::from_rat(group.ambient(), r);
        ClassFun::raw(group, vec![v; group.num_classes()])
    }

    pub fn trivial(group: &Arc<Group>) -> ClassFun {
        ClassFun::constant(group, Rat::one())
    }

    pub fn zero(group: &Arc<Group>) -> ClassFun {
        ClassFun::constant(group, Rat::zero())
    }

    pub fn regular(group: &Arc<Group>) -> ClassFun {
        let n = group.ambient();
        let mut values = vec![CycNum::zero(n); group.num_classes()];
        values[0] = CycNum::from_int(n, group.order() as i64);
        ClassFun::raw(group, values)
    }

    /// Build from a rational function of the class index.
    pub fn from_rationals(group: &Arc<Group>, vals: &[Rat]) -> Result<ClassFun> {
        let n = group.ambient();
        ClassFun::new(group, vals.iter().map(|r| CycNum::from_rat(n, r.clone())).collect())
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn values(&self) -> &[CycNum] {
        &self.values
    }

    pub fn value(&self, class: usize) -> &CycNum {
        &self.values[class]
    }

    pub fn at(&self, element: usize) -> &CycNum {
        &self.values[self.group.class_of(element)]
    }

    /// Value at the identity; rational for every class function built here.
    pub fn degree(&self) -> Rat {
        self.values[0].to_rational().expect("value at identity is rational")
    }

    /// Degree as an integer (for genuine or virtual characters).
    pub fn dim(&self) -> i64 {
        let d = self.degree();
        assert!(d.is_integer(), "non-integral degree");
        d.to_integer().to_i64().expect("degree fits i64")
    }

    fn check_same(&self, other: &ClassFun) -> Result<()> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::input("class functions live on different groups"));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &ClassFun) -> Result<ClassFun> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &ClassFun) -> Result<ClassFun> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn try_tensor(&self, other: &ClassFun) -> Result<ClassFun> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a * b))
    }

    fn zip(&self, other: &ClassFun, f: impl Fn(&CycNum, &CycNum) -> CycNum) -> ClassFun {
        ClassFun::raw(&self.group, self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect())
    }

    pub fn add(&self, other: &ClassFun) -> ClassFun {
        self.try_add(other).expect("same group")
    }

    pub fn sub(&self, other: &ClassFun) -> ClassFun {
        self.try_sub(other).expect("same group")
    }

    pub fn tensor(&self, other: &ClassFun) -> ClassFun {
        self.try_tensor(other).expect("same group")
    }

    pub fn dual(&self) -> ClassFun {
        ClassFun::raw(&self.group, self.values.iter().map(CycNum::conj).collect())
    }

    pub fn scale(&self, r: &Rat) -> ClassFun {
        ClassFun::raw(&self.group, self.values.iter().map(|v| v.scale(r)).collect())
    }

    pub fn galois(&self, k: i64) -> Result<ClassFun> {
        Ok(ClassFun::raw(&self.group, self.values.iter().map(|v| v.galois(k)).collect::<Result<_>>()?))
    }

    /// `g ↦ f(g^k)`.
    pub fn adams(&self, k: i64) -> ClassFun {
        let pm = self.group.class_power_map(k);
        ClassFun::raw(&self.group, pm.iter().map(|&c| self.values[c].clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(CycNum::is_zero)
    }

    /// All values rational?
    pub fn rational_values(&self) -> Option<Vec<Rat>> {
        self.values.iter().map(CycNum::to_rational).collect()
    }

    /// Lexicographic comparison of canonical values.
    pub fn cmp_canonical(&self, other: &ClassFun) -> std::cmp::Ordering {
        for (a, b) in self.values.iter().zip(&other.values) {
            let o = a.cmp_canonical(b);
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    }

    /// Elements on which the function takes its degree (the kernel, for characters).
    pub fn kernel(&self) -> Subgroup {
        let d = &self.values[0];
        let members = (0..self.group.order()).filter(|&x| self.at(x) == d).collect();
        Subgroup::from_members(&self.group, members)
    }

    pub fn is_faithful(&self) -> bool {
        self.kernel().is_trivial()
    }

    /// Average over a subgroup, `(1/|S|) Σ_{s∈S} f(s)`.
    pub fn average_over(&self, s: &Subgroup) -> CycNum {
        let mut counts: HashMap<usize, i64> = HashMap::new();
        for &x in s.members() {
            *counts.entry(self.group.class_of(x)).or_default() += 1;
        }
        let mut keys: Vec<_> = counts.into_iter().collect();
        keys.sort_unstable();
        let mut acc = CycNum::zero(self.group.ambient());
        for (c, k) in keys {
            acc = &acc + &self.values[c].scale(&rint(k));
        }
        acc.scale(&rat(1, s.order() as i64))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.values.iter().map(|v| Value::String(v.to_string())).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Sub,
    Tensor,
    Dual,
}

pub fn classfun_combine(op: CombineOp, f: &ClassFun, g: Option<&ClassFun>) -> Result<ClassFun> {
    let need = || g.ok_or_else(|| Error::input("binary operation needs two class functions"));
    match op {
        CombineOp::Add => f.try_add(need()?),
        CombineOp::Sub => f.try_sub(need()?),
        CombineOp::Tensor => f.try_tensor(need()?),
        CombineOp::Dual => Ok(f.dual()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchurKind {
    Psi2,
    Sym2,
    Ext2,
    Ext3,
}

pub fn schur_op(kind: SchurKind, chi: &ClassFun) -> ClassFun {
    let g = chi.group();
    let p2 = chi.adams(2);
    let sq = chi.tensor(chi);
    match kind {
        SchurKind::Psi2 => p2,
        SchurKind::Sym2 => sq.add(&p2).scale(&rat(1, 2)),
        SchurKind::Ext2 => sq.sub(&p2).scale(&rat(1, 2)),
        SchurKind::Ext3 => {
            let p3 = chi.adams(3);
            let cube = sq.tensor(chi);
            let mid = chi.tensor(&p2).scale(&rint(3));
            let out = cube.sub(&mid).add(&p3.scale(&rint(2)));
            ClassFun::raw(g, out.values.iter().map(|v| v.scale(&rat(1, 6))).collect())
        }
    }
}

pub fn sym2(chi: &ClassFun) -> ClassFun {
    schur_op(SchurKind::Sym2, chi)
}

pub fn ext2(chi: &ClassFun) -> ClassFun {
    schur_op(SchurKind::Ext2, chi)
}

pub fn psi2(chi: &ClassFun) -> ClassFun {
    schur_op(SchurKind::Psi2, chi)
}

/// `(1/|G|) Σ f(g) conj(h(g))`.
pub fn inner_product(f: &ClassFun, h: &ClassFun) -> Result<CycNum> {
    f.check_same(h)?;
    let g = f.group();
    let mut acc = CycNum::zero(g.ambient());
    for c in 0..g.num_classes() {
        let t = &f.values[c] * &h.values[c].conj();
        acc = &acc + &t.scale(&rint(g.class_size(c) as i64));
    }
    Ok(acc.scale(&rat(1, g.order() as i64)))
}

/// Inner product that must be rational (true whenever one side is a character
/// and the other is Galois-stable, or both are characters of the same field).
pub fn inner_rational(f: &ClassFun, h: &ClassFun) -> Result<Rat> {
    inner_product(f, h)?
        .to_rational()
        .ok_or_else(|| Error::input("inner product is not rational"))
}

pub fn fs_indicator(chi: &ClassFun) -> Result<i32> {
    let norm = inner_rational(chi, chi)?;
    if norm != Rat::one() || !chi.degree().is_positive() {
        return Err(Error::input("Frobenius–Schur indicator needs an irreducible character"));
    }
    let nu = inner_rational(&chi.adams(2), &ClassFun::trivial(chi.group()))?;
    nu.to_integer().to_i32().filter(|v| v.abs() <= 1 && nu.is_integer()).ok_or_else(|| {
        Error::Theorem(format!("indicator {} outside {{-1,0,1}}", fmt_rat(&nu)))
    })
}

/// Map from elements of `sub` (a group whose points are a subset of `parent`'s
/// permutations) to element indices of `parent`.
fn embedding(sub: &Arc<Group>, parent: &Arc<Group>) -> Result<Vec<usize>> {
    if sub.degree() != parent.degree() {
        return Err(Error::input("subgroup acts on a different number of points"));
    }
    (0..sub.order())
        .map(|i| parent.index_of(sub.element(i)).ok_or_else(|| Error::input("not a subgroup of the parent")))
        .collect()
}

/// Restriction to a subgroup; the result lives on `H.as_group()`.
pub fn restrict(chi: &ClassFun, h: &Subgroup) -> Result<ClassFun> {
    if !same_group(chi.group(), h.parent()) {
        return Err(Error::input("subgroup of a different group"));
    }
    let sub = h.as_group();
    restrict_to(chi, &sub.group)
}

/// Restriction to any group embedded (as permutations) in the parent.
pub fn restrict_to(chi: &ClassFun, sub: &Arc<Group>) -> Result<ClassFun> {
    let emb = embedding(sub, chi.group())?;
    let values =
        (0..sub.num_classes()).map(|c| chi.at(emb[sub.class_rep(c)]).descend(sub.ambient())).collect::<Result<_>>()?;
    ClassFun::new(sub, values)
}

/// Induction from `H ≤ G`; `sigma` lives on any group whose elements are those of `H`.
pub fn induce(g: &Arc<Group>, h: &Subgroup, sigma: &ClassFun) -> Result<ClassFun> {
    let sg = sigma.group();
    if !same_group(h.parent(), g) || sg.order() != h.order() {
        return Err(Error::input("induction needs a class function on the given subgroup"));
    }
    let emb = embedding(sg, g)?;
    if emb.iter().any(|&x| !h.contains(x)) {
        return Err(Error::input("class function is not on the given subgroup"));
    }
    let mut counts: HashMap<(usize, usize), i64> = HashMap::new();
    for (i, &x) in emb.iter().enumerate() {
        *counts.entry((g.class_of(x), sg.class_of(i))).or_default() += 1;
    }
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort_unstable();
    let n = g.ambient();
    let mut values = vec![CycNum::zero(n); g.num_classes()];
    for ((c, sc), k) in keys {
        values[c] = &values[c] + &sigma.values[sc].scale(&rint(k));
    }
    for (c, v) in values.iter_mut().enumerate() {
        let f = rat(g.order() as i64, (h.order() * g.class_size(c)) as i64);
        *v = v.scale(&f);
    }
    ClassFun::new(g, values)
}

/// The character τ on `G` attached to `σ` on an index-2 subgroup `H`:
/// `τ(h) = σ(h)σ(γhγ⁻¹)` on `H` and `τ(g) = σ(g²)` off `H`.
pub fn tau_extension(g: &Arc<Group>, h: &Subgroup, sigma: &ClassFun, gamma: usize) -> Result<ClassFun> {
    if h.index() != 2 {
        return Err(Error::input("τ-extension needs an index-2 subgroup"));
    }
    if h.contains(gamma) {
        return Err(Error::input("γ must lie outside H"));
    }
    let sg = sigma.group();
    let emb = embedding(sg, g)?;
    let mut back = vec![usize::MAX; g.order()];
    for (i, &x) in emb.iter().enumerate() {
        back[x] = i;
    }
    let sv = |x: usize| -> &CycNum { sigma.at(back[x]) };
    let gi = g.inv(gamma);
    let values = (0..g.num_classes())
        .map(|c| {
            let r = g.class_rep(c);
            if h.contains(r) {
                let conj = g.mul(g.mul(gamma, r), gi);
                sv(r) * sv(conj)
            } else {
                sv(g.mul(r, r)).clone()
            }
        })
        .collect();
    ClassFun::new(g, values)
}

/// The order-2 character of `G/H` for an index-2 subgroup.
pub fn index2_sign(g: &Arc<Group>, h: &Subgroup) -> Result<ClassFun> {
    if h.index() != 2 || !same_group(h.parent(), g) {
        return Err(Error::input("sign character needs an index-2 subgroup"));
    }
    let vals: Vec<Rat> =
        (0..g.num_classes()).map(|c| if h.contains(g.class_rep(c)) { rint(1) } else { rint(-1) }).collect();
    ClassFun::from_rationals(g, &vals)
}

// ---------------------------------------------------------------------------
// Character tables

#[derive(Clone, Debug)]
pub struct CharTable {
    group: Arc<Group>,
    irr: Vec<ClassFun>,
    dims: Vec<usize>,
}

impl CharTable {
    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn irreducibles(&self) -> &[ClassFun] {
        &self.irr
    }

    pub fn irr(&self, i: usize) -> &ClassFun {
        &self.irr[i]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.irr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irr.is_empty()
    }

    /// Multiplicities `⟨f, χ_i⟩` (rational for class functions with values in the field).
    pub fn decompose(&self, f: &ClassFun) -> Result<Vec<Rat>> {
        self.irr.iter().map(|chi| inner_rational(f, chi)).collect()
    }

    /// Integer multiplicities; errors if `f` is not a virtual character.
    pub fn decompose_int(&self, f: &ClassFun) -> Result<Vec<i64>> {
        self.decompose(f)?
            .into_iter()
            .map(|m| {
                if m.is_integer() {
                    Ok(m.to_integer().to_i64().expect("small multiplicity"))
                } else {
                    Err(Error::input("not a virtual character"))
                }
            })
            .collect()
    }

    pub fn is_character(&self, f: &ClassFun) -> bool {
        matches!(self.decompose_int(f), Ok(m) if m.iter().all(|&x| x >= 0))
    }

    pub fn position(&self, f: &ClassFun) -> Option<usize> {
        self.irr.iter().position(|chi| chi == f)
    }

    pub fn to_json(&self) -> Value {
        let g = &self.group;
        let classes: Vec<Value> = (0..g.num_classes())
            .map(|c| {
                json!({
                    "label": format!("C{c}"),
                    "representative": g.class_rep(c),
                    "size": g.class_size(c),
                    "element_order": g.element_order(g.class_rep(c)),
                })
            })
            .collect();
        json!({
            "group": g.name(),
            "order": g.order(),
            "ambient": g.ambient(),
            "classes": classes,
            "dims": self.dims,
            "characters": self.irr.iter().map(ClassFun::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn to_csv(&self) -> String {
        let g = &self.group;
        let mut out = String::new();
        let row = |cells: Vec<String>| {
            cells
                .into_iter()
                .map(|c| if c.contains(',') || c.contains('"') { format!("\"{}\"", c.replace('"', "\"\"")) } else { c })
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut head = vec!["character".to_string()];
        head.extend((0..g.num_classes()).map(|c| format!("C{c}")));
        out.push_str(&row(head));
        out.push('\n');
        let mut sizes = vec!["class_size".to_string()];
        sizes.extend((0..g.num_classes()).map(|c| g.class_size(c).to_string()));
        out.push_str(&row(sizes));
        out.push('\n');
        let mut ords = vec!["element_order".to_string()];
        ords.extend((0..g.num_classes()).map(|c| g.element_order(g.class_rep(c)).to_string()));
        out.push_str(&row(ords));
        out.push('\n');
        for (i, chi) in self.irr.iter().enumerate() {
            let mut cells = vec![format!("X{i}")];
            cells.extend(chi.values.iter().map(|v| v.to_string()));
            out.push_str(&row(cells));
            out.push('\n');
        }
        out
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, m: u64) -> u64 {
    pow_mod(a, m - 2, m)
}

fn is_prime_u64(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Element of exact order `e` in `F_ℓ^×`.
fn root_of_unity(e: u64, l: u64) -> u64 {
    let fs = prime_factors(e);
    for g in 2..l {
        let z = pow_mod(g, (l - 1) / e, l);
        if fs.iter().all(|&q| pow_mod(z, e / q, l) != 1) {
            return z;
        }
    }
    1
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(rows: &mut Vec<Vec<u64>>, l: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, p);
        let iv = inv_mod(rows[r][c], l);
        for v in rows[r].iter_mut() {
            *v = *v * iv % l;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..ncols {
                    rows[i][j] = (rows[i][j] + l - f * rows[r][j] % l) % l;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Kernel of a square matrix (as column-vector action `m · y`).
fn kernel(m: &[Vec<u64>], l: u64) -> Vec<Vec<u64>> {
    let n = m.len();
    let mut rows = m.to_vec();
    let pivots = rref(&mut rows, l);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; n];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (l - rows[i][f]) % l;
            }
            v
        })
        .collect()
}

/// Characteristic polynomial via Hessenberg reduction; coefficients low to high.
fn charpoly(m: &[Vec<u64>], l: u64) -> Vec<u64> {
    let n = m.len();
    let mut h = m.to_vec();
    for j in 0..n.saturating_sub(2) {
        if h[j + 1][j] == 0 {
            if let Some(i) = (j + 2..n).find(|&i| h[i][j] != 0) {
                h.swap(i, j + 1);
                for row in h.iter_mut() {
                    row.swap(i, j + 1);
                }
            } else {
                continue;
            }
        }
        let piv_inv = inv_mod(h[j + 1][j], l);
        for i in j + 2..n {
            if h[i][j] == 0 {
                continue;
            }
            let u = h[i][j] * piv_inv % l;
            for k in 0..n {
                h[i][k] = (h[i][k] + l - u * h[j + 1][k] % l) % l;
            }
            for row in h.iter_mut() {
                row[j + 1] = (row[j + 1] + u * row[i]) % l;
            }
        }
    }
    // p_{m+1} = (x - h_mm) p_m - Σ_{i<m} h_im (Π_{k=i+1}^{m} h_{k,k-1}) p_i
    let mut ps: Vec<Vec<u64>> = vec![vec![1]];
    for mm in 0..n {
        let mut next = vec![0u64; mm + 2];
        for (d, &c) in ps[mm].iter().enumerate() {
            next[d + 1] = (next[d + 1] + c) % l;
            next[d] = (next[d] + l - h[mm][mm] * c % l) % l;
        }
        let mut prod = 1u64;
        for i in (0..mm).rev() {
            prod = prod * h[i + 1][i] % l;
            let coef = h[i][mm] * prod % l;
            if coef != 0 {
                for (d, &c) in ps[i].iter().enumerate() {
                    next[d] = (next[d] + l - coef * c % l) % l;
                }
            }
        }
        ps.push(next);
    }
    ps.pop().expect("nonempty")
}

fn poly_eval(p: &[u64], x: u64, l: u64) -> u64 {
    p.iter().rev().fold(0, |acc, &c| (acc * x + c) % l)
}

/// One attempt at the table over `F_ℓ`; `None` if ℓ turns out unsuitable.
fn dixon_at_prime(g: &Arc<Group>, l: u64, consts: &[Vec<Vec<u64>>]) -> Option<Vec<ClassFun>> {
    let k = g.num_classes();
    let n = g.order() as u64;
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..k)
        .map(|i| {
            let mut v = vec![0u64; k];
            v[i] = 1;
            v
        })
        .collect()];
    for a in consts.iter().skip(1) {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for mut basis in spaces {
            if basis.len() == 1 {
                next.push(basis);
                continue;
            }
            let pivots = rref(&mut basis, l);
            let r = basis.len();
            // images A·b_i and their coordinates at the pivots
            let images: Vec<Vec<u64>> = basis
                .iter()
                .map(|b| (0..k).map(|row| (0..k).fold(0, |s, col| (s + a[row][col] * b[col]) % l)).collect())
                .collect();
            let restricted: Vec<Vec<u64>> =
                (0..r).map(|t| (0..r).map(|i| images[i][pivots[t]]).collect()).collect();
            let cp = charpoly(&restricted, l);
            let mut total = 0;
            for lambda in 0..l {
                if poly_eval(&cp, lambda, l) != 0 {
                    continue;
                }
                let shifted: Vec<Vec<u64>> = (0..r)
                    .map(|t| {
                        (0..r).map(|i| if t == i { (restricted[t][i] + l - lambda) % l } else { restricted[t][i] }).collect()
                    })
                    .collect();
                let ker = kernel(&shifted, l);
                total += ker.len();
                let sub: Vec<Vec<u64>> = ker
                    .iter()
                    .map(|y| (0..k).map(|col| (0..r).fold(0, |s, i| (s + y[i] * basis[i][col]) % l)).collect())
                    .collect();
                next.push(sub);
                if total == r {
                    break;
                }
            }
            if total != r {
                return None;
            }
        }
        spaces = next;
    }
    if spaces.iter().any(|s| s.len() != 1) {
        return None;
    }
    let e = g.exponent() as u64;
    let eps = root_of_unity(e, l);
    let inv_class: Vec<usize> = (0..k).map(|c| g.class_of(g.inv(g.class_rep(c)))).collect();
    let sizes: Vec<u64> = (0..k).map(|c| g.class_size(c) as u64).collect();
    let amb = g.ambient();
    let mut out = Vec::new();
    for s in spaces {
        let w0 = s[0][0];
        if w0 == 0 {
            return None;
        }
        let iw = inv_mod(w0, l);
        let w: Vec<u64> = s[0].iter().map(|&x| x * iw % l).collect();
        let t = (0..k).fold(0, |acc, c| (acc + w[c] * w[inv_class[c]] % l * inv_mod(sizes[c], l)) % l);
        if t == 0 {
            return None;
        }
        let d2 = n % l * inv_mod(t, l) % l;
        let d = (1..).take_while(|d: &u64| d * d <= n).find(|d| d * d % l == d2)?;
        let modval: Vec<u64> = (0..k).map(|c| d * w[c] % l * inv_mod(sizes[c], l) % l).collect();
        let mut values = Vec::with_capacity(k);
        for c in 0..k {
            let x = g.class_rep(c);
            let m = g.element_order(x) as u64;
            let zm = pow_mod(eps, e / m, l);
            let pw: Vec<u64> = (0..m).map(|i| modval[g.class_of(g.pow(x, i as i64))]).collect();
            let im = inv_mod(m % l, l);
            let mut coeffs = vec![0i64; amb];
            for kk in 0..m {
                let zk = pow_mod(zm, (m - kk) % m, l);
                let mut acc = 0u64;
                let mut z = 1u64;
                for &v in &pw {
                    acc = (acc + v * z) % l;
                    z = z * zk % l;
                }
                let mu = acc * im % l;
                if mu > d {
                    return None;
                }
                coeffs[(kk as usize) * (amb / m as usize)] += mu as i64;
            }
            values.push(CycNum::from_int_power_coeffs(amb, &coeffs));
        }
        out.push(ClassFun::raw(g, values));
    }
    Some(out)
}

/// Structure constants `a_{jkl} = #{x ∈ C_j : x⁻¹ z_l ∈ C_k}` as matrices
/// `A_j[k][l]`, reduced mod ℓ lazily by the caller.
fn class_constants(g: &Group) -> Vec<Vec<Vec<u64>>> {
    let k = g.num_classes();
    let mut out = vec![vec![vec![0u64; k]; k]; k];
    for (j, a) in out.iter_mut().enumerate() {
        for l in 0..k {
            let z = g.class_rep(l);
            for &x in &g.classes()[j] {
                let y = g.mul(g.inv(x), z);
                a[g.class_of(y)][l] += 1;
            }
        }
    }
    out
}

pub fn character_table(g: &Arc<Group>) -> Result<CharTable> {
    character_table_with_cap(g, DEFAULT_CLASS_CAP)
}

pub fn character_table_with_cap(g: &Arc<Group>, cap: usize) -> Result<CharTable> {
    let k = g.num_classes();
    if k > cap {
        return Err(Error::Resource(format!("{k} classes exceed the cap {cap}")));
    }
    let consts = class_constants(g);
    let e = g.exponent() as u64;
    let n = g.order() as u64;
    let mut l = e * ((2 * n) / e + 1) + 1;
    let mut attempts = 0;
    let mut irr = loop {
        while !is_prime_u64(l) {
            l += e;
        }
        let reduced: Vec<Vec<Vec<u64>>> =
            consts.iter().map(|m| m.iter().map(|r| r.iter().map(|&v| v % l).collect()).collect()).collect();
        if let Some(rows) = dixon_at_prime(g, l, &reduced) {
            break rows;
        }
        attempts += 1;
        if attempts > 20 {
            return Err(Error::Precision("no suitable prime found for the character table".into()));
        }
        l += e;
    };
    irr.sort_by(|a, b| {
        let ta = a.values.iter().all(|v| v == &a.values[0]) && a.degree() == Rat::one();
        let tb = b.values.iter().all(|v| v == &b.values[0]) && b.degree() == Rat::one();
        tb.cmp(&ta).then_with(|| a.degree().cmp(&b.degree())).then_with(|| a.cmp_canonical(b))
    });
    let dims: Vec<usize> = irr.iter().map(|c| c.dim() as usize).collect();
    let table = CharTable { group: g.clone(), irr, dims };
    verify_table(&table)?;
    Ok(table)
}

fn verify_table(t: &CharTable) -> Result<()> {
    let g = &t.group;
    if t.dims.iter().map(|d| d * d).sum::<usize>() != g.order() || t.len() != g.num_classes() {
        return Err(Error::Theorem("character table fails Σ dim² = |G|".into()));
    }
    for (i, a) in t.irr.iter().enumerate() {
        for (j, b) in t.irr.iter().enumerate().skip(i) {
            let ip = inner_product(a, b)?;
            let want = if i == j { CycNum::one(g.ambient()) } else { CycNum::zero(g.ambient()) };
            if ip != want {
                return Err(Error::Theorem(format!("rows {i} and {j} are not orthonormal")));
            }
        }
    }
    Ok(())
}

/// Linear characters of a group, read off its table.
pub fn linear_characters(table: &CharTable) -> Vec<ClassFun> {
    table.irr.iter().filter(|c| c.dim() == 1).cloned().collect()
}

/// Search for `(H, λ)` with `λ` linear on `H` and `Ind λ = χ`.
///
/// Subgroups are scanned in (index, members) order; the first hit wins.
pub fn monomial_search(chi: &ClassFun) -> Result<Option<(Subgroup, ClassFun)>> {
    let g = chi.group();
    let d = chi.dim() as usize;
    let mut subs: Vec<Subgroup> = g.all_subgroups().into_iter().filter(|s| s.index() == d).collect();
    subs.sort_by(|a, b| a.members().cmp(b.members()));
    for h in subs {
        let hg = h.as_group();
        let res = restrict(chi, &h)?;
        let table = character_table(&hg.group)?;
        for lam in linear_characters(&table) {
            if inner_rational(&res, &lam)?.is_zero() {
                continue;
            }
            let ind = induce(g, &h, &lam)?;
            if &ind == chi {
                return Ok(Some((h, lam)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupcore::{cyclic, dihedral, quaternion};

    #[test]
    fn s3_table() {
        let g = dihedral(3).unwrap();
        let t = character_table(&g).unwrap();
        assert_eq!(t.dims(), &[1, 1, 2]);
        assert!(t.irr(0).values().iter().all(|v| v == &CycNum::one(g.ambient())));
    }

    #[test]
    fn q8_table() {
        let g = quaternion(8).unwrap();
        let t = character_table(&g).unwrap();
        assert_eq!(t.dims(), &[1, 1, 1, 1, 2]);
        let two = t.irr(4).rational_values().unwrap();
        assert_eq!(two, vec![rint(2), rint(-2), rint(0), rint(0), rint(0)]);
        assert_eq!(fs_indicator(t.irr(4)).unwrap(), -1);
        assert_eq!(ext2(t.irr(4)), ClassFun::trivial(&g));
        assert_eq!(t.irr(4).dual(), *t.irr(4));
    }

    #[test]
    fn trivial_group_table() {
        let g = cyclic(1).unwrap();
        let t = character_table(&g).unwrap();
        assert_eq!(t.dims(), &[1]);
    }

    #[test]
    fn induce_regular() {
        let g = cyclic(2).unwrap();
        let triv = g.trivial();
        let one = ClassFun::trivial(&triv.as_group().group);
        let ind = induce(&g, &triv, &one).unwrap();
        assert_eq!(ind, ClassFun::regular(&g));
    }

    #[test]
    fn psi2_on_c2() {
        let g = cyclic(2).unwrap();
        let t = character_table(&g).unwrap();
        assert_eq!(psi2(t.irr(1)), ClassFun::trivial(&g));
    }

    #[test]
    fn not_irreducible_indicator() {
        let g = cyclic(2).unwrap();
        assert!(fs_indicator(&ClassFun::regular(&g)).is_err());
    }

    #[test]
    fn charpoly_small() {
        // [[2,1],[0,3]] over F_7: (x-2)(x-3) = x^2 - 5x + 6
        let cp = charpoly(&[vec![2, 1], vec![0, 3]], 7);
        assert_eq!(cp, vec![6, 2, 1]);
    }
}

#[cfg(test)]
mod larger {
    use super::*;
    use crate::groupcore::{extraspecial, g2_i, heisenberg_p3, pauli, semidihedral};

    fn dims_sorted(g: &Arc<Group>) -> Vec<usize> {
        character_table(g).unwrap().dims().to_vec()
    }

    #[test]
    fn dims_of_corpus_groups() {
        assert_eq!(dims_sorted(&g2_i().unwrap()), vec![1, 1, 1, 3, 3, 7, 7, 7]);
        assert_eq!(dims_sorted(&heisenberg_p3(3).unwrap()), [vec![1; 9], vec![3, 3]].concat());
        assert_eq!(dims_sorted(&extraspecial(3, 1, true).unwrap()), [vec![1; 9], vec![3, 3]].concat());
        assert_eq!(dims_sorted(&extraspecial(2, 2, false).unwrap()), [vec![1; 16], vec![4]].concat());
        assert_eq!(dims_sorted(&extraspecial(2, 2, true).unwrap()), [vec![1; 16], vec![4]].concat());
        assert_eq!(dims_sorted(&pauli(1).unwrap()), [vec![1; 8], vec![2, 2]].concat());
        assert_eq!(dims_sorted(&semidihedral(16).unwrap()), [vec![1; 4], vec![2, 2, 2]].concat());
    }
}
