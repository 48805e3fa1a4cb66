//! Permutation groups with a full element list.
//!
//! Elements are enumerated breadth-first over generator words, so element
//! indices (and everything derived from them) are reproducible. Index 0 is
//! always the identity. The product `a * b` means "apply `a`, then `b`".

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Perm = Vec<u32>;

pub const DEFAULT_ORDER_CAP: usize = 10_000;
const TABLE_LIMIT: usize = 1024;

pub fn perm_compose(a: &[u32], b: &[u32]) -> Perm {
    a.iter().map(|&i| b[i as usize]).collect()
}

pub fn perm_inverse(a: &[u32]) -> Perm {
    let mut out = vec![0u32; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j as usize] = i as u32;
    }
    out
}

fn is_bijection(a: &[u32]) -> bool {
    let mut seen = vec![false; a.len()];
    for &j in a {
        let j = j as usize;
        if j >= a.len() || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}

fn lcm(a: usize, b: usize) -> usize {
    a / num_integer::gcd(a, b) * b
}

#[derive(Debug)]
pub struct Group {
    name: String,
    degree: usize,
    gens: Vec<Perm>,
    elems: Vec<Perm>,
    lookup: HashMap<Perm, usize>,
    table: Option<Vec<u32>>,
    inv: Vec<usize>,
    orders: Vec<usize>,
    exponent: usize,
    ambient: usize,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl Group {
    /// Enumerate the group generated by `gens` acting on `degree` points.
    pub fn from_generators(name: &str, degree: usize, gens: Vec<Perm>) -> Result<Arc<Group>> {
        Group::build(name, degree, gens, DEFAULT_ORDER_CAP, None)
    }

    pub fn with_cap(name: &str, degree: usize, gens: Vec<Perm>, cap: usize) -> Result<Arc<Group>> {
        Group::build(name, degree, gens, cap, None)
    }

    fn build(
        name: &str,
        degree: usize,
        gens: Vec<Perm>,
        cap: usize,
        ambient: Option<usize>,
    ) -> Result<Arc<Group>> {
        if degree == 0 {
            return Err(Error::input("degree must be positive"));
        }
        for g in &gens {
            if g.len() != degree || !is_bijection(g) {
                return Err(Error::input(format!("generator {g:?} is not a permutation of {degree} points")));
            }
        }
        let id: Perm = (0..degree as u32).collect();
        let mut elems = vec![id.clone()];
        let mut lookup = HashMap::new();
        lookup.insert(id, 0usize);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = perm_compose(&elems[x], g);
                if !lookup.contains_key(&y) {
                    if elems.len() >= cap {
                        return Err(Error::Resource(format!("group order exceeds cap {cap}")));
                    }
                    lookup.insert(y.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(y);
                }
            }
        }
        let n = elems.len();
        let table = if n <= TABLE_LIMIT {
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = lookup[&perm_compose(&elems[a], &elems[b])] as u32;
                }
            }
            Some(t)
        } else {
            None
        };
        let inv: Vec<usize> = elems.iter().map(|e| lookup[&perm_inverse(e)]).collect();
        let mut g = Group {
            name: name.to_string(),
            degree,
            gens,
            elems,
            lookup,
            table,
            inv,
            orders: Vec::new(),
            exponent: 1,
            ambient: 1,
            classes: Vec::new(),
            class_of: Vec::new(),
        };
        g.orders = (0..n).map(|x| g.compute_order(x)).collect();
        g.exponent = g.orders.iter().fold(1, |a, &b| lcm(a, b));
        g.ambient = ambient.unwrap_or(g.exponent);
        if g.ambient % g.exponent != 0 {
            return Err(Error::input("ambient order must be a multiple of the exponent"));
        }
        g.compute_classes();
        Ok(Arc::new(g))
    }

    fn compute_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    fn compute_classes(&mut self) {
        let n = self.order();
        let gen_idx: Vec<usize> = self.gens.iter().map(|g| self.lookup[g]).collect();
        let mut class_id = vec![usize::MAX; n];
        let mut raw: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if class_id[start] != usize::MAX {
                continue;
            }
            let cid = raw.len();
            let mut members = vec![start];
            class_id[start] = cid;
            let mut k = 0;
            while k < members.len() {
                let x = members[k];
                for &g in &gen_idx {
                    let y = self.conj(x, g);
                    if class_id[y] == usize::MAX {
                        class_id[y] = cid;
                        members.push(y);
                    }
                }
                k += 1;
            }
            members.sort_unstable();
            raw.push(members);
        }
        raw.sort_by_key(|c| (self.orders[c[0]], c.len(), c[0]));
        let mut class_of = vec![0; n];
        for (i, c) in raw.iter().enumerate() {
            for &x in c {
                class_of[x] = i;
            }
        }
        self.classes = raw;
        self.class_of = class_of;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn generator_indices(&self) -> Vec<usize> {
        self.gens.iter().map(|g| self.lookup[g]).collect()
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elems[i]
    }

    pub fn index_of(&self, p: &[u32]) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.elems.len() + b] as usize,
            None => self.lookup[&perm_compose(&self.elems[a], &self.elems[b])],
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// `g⁻¹ x g`.
    pub fn conj(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv[g], x), g)
    }

    /// `x y x⁻¹ y⁻¹`.
    pub fn commutator(&self, x: usize, y: usize) -> usize {
        self.mul(self.mul(x, y), self.mul(self.inv[x], self.inv[y]))
    }

    pub fn pow(&self, x: usize, k: i64) -> usize {
        let o = self.orders[x] as i64;
        let e = k.rem_euclid(o);
        let mut r = 0;
        for _ in 0..e {
            r = self.mul(r, x);
        }
        r
    }

    pub fn element_order(&self, x: usize) -> usize {
        self.orders[x]
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    /// Conductor used for character values of this group.
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn class_rep(&self, c: usize) -> usize {
        self.classes[c][0]
    }

    pub fn class_size(&self, c: usize) -> usize {
        self.classes[c].len()
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.order()
    }

    /// Element-wise k-th power table.
    pub fn power_map(&self, k: i64) -> Vec<usize> {
        (0..self.order()).map(|x| self.pow(x, k)).collect()
    }

    /// Class of `rep(c)^k`, for every class `c`.
    pub fn class_power_map(&self, k: i64) -> Vec<usize> {
        (0..self.num_classes()).map(|c| self.class_of(self.pow(self.class_rep(c), k))).collect()
    }

    pub fn is_p_group(&self, p: usize) -> bool {
        let mut n = self.order();
        while n % p == 0 {
            n /= p;
        }
        n == 1
    }

    pub fn whole(self: &Arc<Self>) -> Subgroup {
        Subgroup::from_members(self, (0..self.order()).collect())
    }

    pub fn trivial(self: &Arc<Self>) -> Subgroup {
        Subgroup::from_members(self, vec![0])
    }

    /// Smallest subgroup containing the given elements.
    pub fn closure(self: &Arc<Self>, gens: &[usize]) -> Subgroup {
        let n = self.order();
        let mut mask = vec![false; n];
        mask[0] = true;
        let mut members = vec![0usize];
        let gens: Vec<usize> = gens.iter().copied().filter(|&g| g != 0).collect();
        let mut k = 0;
        while k < members.len() {
            let x = members[k];
            for &g in &gens {
                let y = self.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    members.push(y);
                }
            }
            k += 1;
        }
        Subgroup::from_members(self, members)
    }

    pub fn try_closure(self: &Arc<Self>, gens: &[usize]) -> Result<Subgroup> {
        if let Some(&bad) = gens.iter().find(|&&g| g >= self.order()) {
            return Err(Error::input(format!("element index {bad} out of range (|G| = {})", self.order())));
        }
        Ok(self.closure(gens))
    }

    pub fn center(self: &Arc<Self>) -> Subgroup {
        let members =
            self.classes.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect::<Vec<_>>();
        Subgroup::from_members(self, members)
    }

    pub fn centralizer(self: &Arc<Self>, of: &[usize]) -> Subgroup {
        let members = (0..self.order())
            .filter(|&g| of.iter().all(|&x| self.mul(g, x) == self.mul(x, g)))
            .collect();
        Subgroup::from_members(self, members)
    }

    /// Closure of all commutators `[a, b]`, `a ∈ A`, `b ∈ B`.
    pub fn commutator_subgroup(self: &Arc<Self>, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut seen = vec![false; self.order()];
        let mut gens = Vec::new();
        for &x in a.members() {
            for &y in b.members() {
                let c = self.commutator(x, y);
                if !seen[c] {
                    seen[c] = true;
                    gens.push(c);
                }
            }
        }
        self.closure(&gens)
    }

    pub fn derived_subgroup(self: &Arc<Self>) -> Subgroup {
        let w = self.whole();
        self.commutator_subgroup(&w, &w)
    }

    pub fn normal_closure(self: &Arc<Self>, elems: &[usize]) -> Subgroup {
        let mut gens: Vec<usize> = Vec::new();
        let mut seen = vec![false; self.order()];
        for &x in elems {
            for c in &self.classes[self.class_of[x]] {
                if !seen[*c] {
                    seen[*c] = true;
                    gens.push(*c);
                }
            }
        }
        self.closure(&gens)
    }

    /// All normal subgroups, sorted by (order, members).
    pub fn normal_subgroups(self: &Arc<Self>) -> Vec<Subgroup> {
        // Every normal subgroup is a join of normal closures of single classes.
        let mut found: Vec<Subgroup> = Vec::new();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let push = |s: Subgroup, found: &mut Vec<Subgroup>, index: &mut HashMap<Vec<usize>, usize>| {
            if !index.contains_key(s.members()) {
                index.insert(s.members().to_vec(), found.len());
                found.push(s);
                true
            } else {
                false
            }
        };
        let atoms: Vec<Subgroup> =
            (0..self.num_classes()).map(|c| self.normal_closure(&[self.class_rep(c)])).collect();
        for a in &atoms {
            push(a.clone(), &mut found, &mut index);
        }
        let mut k = 0;
        while k < found.len() {
            let cur = found[k].clone();
            for a in &atoms {
                if a.is_subgroup_of(&cur) {
                    continue;
                }
                let mut gens = cur.members().to_vec();
                gens.extend_from_slice(a.members());
                let j = self.closure(&gens);
                push(j, &mut found, &mut index);
            }
            k += 1;
        }
        found.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
        found
    }

    /// Every subgroup, as joins of cyclic subgroups; sorted by (order, members).
    pub fn all_subgroups(self: &Arc<Self>) -> Vec<Subgroup> {
        let mut found: Vec<Subgroup> = Vec::new();
        let mut index: HashMap<Vec<usize>, ()> = HashMap::new();
        let mut cyclics: Vec<Subgroup> = Vec::new();
        for x in 0..self.order() {
            let c = self.closure(&[x]);
            if index.insert(c.members().to_vec(), ()).is_none() {
                cyclics.push(c.clone());
                found.push(c);
            }
        }
        let mut k = 0;
        while k < found.len() {
            let cur = found[k].clone();
            for c in &cyclics {
                if c.is_subgroup_of(&cur) {
                    continue;
                }
                let j = cur.join(c);
                if index.insert(j.members().to_vec(), ()).is_none() {
                    found.push(j);
                }
            }
            k += 1;
        }
        found.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
        found
    }

    /// Index-2 subgroups: kernels of the order-2 characters of `G/[G,G]`.
    pub fn index2_list(self: &Arc<Self>) -> Vec<Subgroup> {
        let squares: Vec<usize> = (0..self.order()).map(|x| self.mul(x, x)).collect();
        let k = self.closure(&squares);
        // G/K is elementary abelian of 2-rank r; choose basis cosets greedily.
        let mut basis: Vec<usize> = Vec::new();
        let mut span = k.clone();
        for x in 0..self.order() {
            if !span.contains(x) {
                basis.push(x);
                let mut gens = span.members().to_vec();
                gens.push(x);
                span = self.closure(&gens);
            }
        }
        let r = basis.len();
        // coordinate vector of each element modulo K
        let mut coord = vec![0u32; self.order()];
        let mut assigned = vec![false; self.order()];
        for mask in 0..(1u32 << r) {
            let mut g = 0;
            for (i, &b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g = self.mul(g, b);
                }
            }
            for &kk in k.members() {
                let y = self.mul(g, kk);
                coord[y] = mask;
                assigned[y] = true;
            }
        }
        debug_assert!(assigned.iter().all(|&a| a));
        let mut out: Vec<Subgroup> = (1..(1u32 << r))
            .map(|f| {
                let members =
                    (0..self.order()).filter(|&x| (coord[x] & f).count_ones() % 2 == 0).collect();
                Subgroup::from_members(self, members)
            })
            .collect();
        out.sort_by(|a, b| a.members().cmp(b.members()));
        out
    }

    pub fn quotient(self: &Arc<Self>, n: &Subgroup) -> Result<QuotientGroup> {
        if !n.is_normal() {
            return Err(Error::input("quotient requires a normal subgroup"));
        }
        QuotientGroup::new(self, n)
    }
}

/// Subgroup given by a sorted list of element indices of its parent.
#[derive(Debug, Clone)]
pub struct Subgroup {
    parent: Arc<Group>,
    members: Vec<usize>,
    mask: Vec<bool>,
    sub: OnceLock<Arc<SubgroupGroup>>,
}

/// A subgroup re-enumerated as a group in its own right, with index maps.
#[derive(Debug)]
pub struct SubgroupGroup {
    pub group: Arc<Group>,
    /// sub index -> parent index
    pub to_parent: Vec<usize>,
    /// parent index -> sub index (usize::MAX outside)
    pub from_parent: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) && self.members == other.members
    }
}
impl Eq for Subgroup {}

impl Subgroup {
    pub fn from_members(parent: &Arc<Group>, mut members: Vec<usize>) -> Subgroup {
        members.sort_unstable();
        members.dedup();
        let mut mask = vec![false; parent.order()];
        for &m in &members {
            mask[m] = true;
        }
        Subgroup { parent: parent.clone(), members, mask, sub: OnceLock::new() }
    }

    pub fn parent(&self) -> &Arc<Group> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.parent.order() / self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask[x]
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&m| other.mask[m])
    }

    pub fn is_closed(&self) -> bool {
        let g = &self.parent;
        self.mask[0]
            && self.members.iter().all(|&a| self.mask[g.inv(a)])
            && self.members.iter().all(|&a| self.members.iter().all(|&b| self.mask[g.mul(a, b)]))
    }

    pub fn is_normal(&self) -> bool {
        let g = &self.parent;
        g.generator_indices()
            .iter()
            .all(|&s| self.members.iter().all(|&x| self.mask[g.conj(x, s)]))
    }

    /// Normal in `other` (which must contain it).
    pub fn is_normal_in(&self, other: &Subgroup) -> bool {
        let g = &self.parent;
        self.is_subgroup_of(other)
            && other.members.iter().all(|&s| self.members.iter().all(|&x| self.mask[g.conj(x, s)]))
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.parent;
        self.members.iter().all(|&a| self.members.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        self.members.iter().any(|&x| self.parent.element_order(x) == self.order())
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let members = self.members.iter().copied().filter(|&m| other.mask[m]).collect();
        Subgroup::from_members(&self.parent, members)
    }

    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let mut gens = self.members.clone();
        gens.extend_from_slice(&other.members);
        self.parent.closure(&gens)
    }

    /// A generating set chosen greedily in index order.
    pub fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = self.parent.trivial();
        for &x in &self.members {
            if !span.contains(x) {
                gens.push(x);
                span = self.parent.closure(&gens);
                if span.order() == self.order() {
                    break;
                }
            }
        }
        gens
    }

    /// This subgroup as a group of its own (same conductor as the parent).
    pub fn as_group(&self) -> Arc<SubgroupGroup> {
        self.sub
            .get_or_init(|| {
                let parent = &self.parent;
                let gens: Vec<Perm> =
                    self.greedy_generators().iter().map(|&g| parent.element(g).clone()).collect();
                let name = format!("{}[sub {}]", parent.name(), self.order());
                let group = Group::build(&name, parent.degree(), gens, usize::MAX, Some(parent.ambient()))
                    .expect("subgroup of a valid group");
                let to_parent: Vec<usize> = (0..group.order())
                    .map(|i| parent.index_of(group.element(i)).expect("subgroup element in parent"))
                    .collect();
                let mut from_parent = vec![usize::MAX; parent.order()];
                for (i, &p) in to_parent.iter().enumerate() {
                    from_parent[p] = i;
                }
                Arc::new(SubgroupGroup { group, to_parent, from_parent })
            })
            .clone()
    }

    /// Right transversal, smallest index in each coset.
    pub fn coset_reps(&self) -> Vec<usize> {
        let g = &self.parent;
        let mut seen = vec![false; g.order()];
        let mut reps = Vec::new();
        for x in 0..g.order() {
            if seen[x] {
                continue;
            }
            reps.push(x);
            for &h in &self.members {
                seen[g.mul(h, x)] = true;
            }
        }
        reps
    }
}

/// `G/N`, with a faithful permutation model acting on the cosets.
#[derive(Debug, Clone)]
pub struct QuotientGroup {
    pub normal: Subgroup,
    pub reps: Vec<usize>,
    /// parent element -> coset number
    pub coset_of: Vec<usize>,
    /// cosets as a group; `proj[x]` is the image of parent element `x`
    pub group: Arc<Group>,
    pub proj: Vec<usize>,
}

impl QuotientGroup {
    fn new(parent: &Arc<Group>, n: &Subgroup) -> Result<QuotientGroup> {
        let reps = n.coset_reps();
        let mut coset_of = vec![0; parent.order()];
        for (ci, &r) in reps.iter().enumerate() {
            for &h in n.members() {
                coset_of[parent.mul(h, r)] = ci;
            }
        }
        let act = |x: usize| -> Perm {
            reps.iter().map(|&r| coset_of[parent.mul(r, x)] as u32).collect()
        };
        let gens: Vec<Perm> = parent.generator_indices().into_iter().map(act).collect();
        let name = format!("{}/N{}", parent.name(), n.order());
        let group = Group::build(&name, reps.len(), gens, usize::MAX, Some(parent.ambient()))?;
        let proj = (0..parent.order())
            .map(|x| group.index_of(&act(x)).expect("image of parent element"))
            .collect();
        Ok(QuotientGroup { normal: n.clone(), reps, coset_of, group, proj })
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    /// Image of a subgroup of the parent.
    pub fn image(&self, s: &Subgroup) -> Subgroup {
        let members = s.members().iter().map(|&x| self.proj[x]).collect();
        Subgroup::from_members(&self.group, members)
    }

    /// Full preimage of a subgroup of the quotient.
    pub fn preimage(&self, s: &Subgroup) -> Subgroup {
        let parent = self.normal.parent();
        let members = (0..parent.order()).filter(|&x| s.contains(self.proj[x])).collect();
        Subgroup::from_members(parent, members)
    }
}

/// Transfer of `h ∈ H` into `Gp` (index 2 in `H`), returned as the smallest
/// element of its coset modulo `[Gp, Gp]`.
pub fn transfer(h_sub: &Subgroup, gp: &Subgroup, h: usize) -> Result<usize> {
    let g = h_sub.parent();
    if !gp.is_subgroup_of(h_sub) || h_sub.order() != 2 * gp.order() {
        return Err(Error::input("transfer needs a subgroup of index 2"));
    }
    if !h_sub.contains(h) {
        return Err(Error::input("element not in H"));
    }
    let raw = if !gp.contains(h) {
        g.mul(h, h)
    } else {
        let t = *h_sub.members().iter().find(|&&x| !gp.contains(x)).expect("index 2");
        g.mul(h, g.mul(g.mul(t, h), g.inv(t)))
    };
    let comm = g.commutator_subgroup(gp, gp);
    Ok(comm.members().iter().map(|&c| g.mul(raw, c)).min().expect("nonempty"))
}

// ---------------------------------------------------------------------------
// Group descriptions and families

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Explicit { name: String, degree: usize, generators: Vec<Vec<u32>> },
    Family { family: String, #[serde(default)] params: Value },
}

pub fn group_from_spec(spec: &GroupSpec) -> Result<Arc<Group>> {
    match spec {
        GroupSpec::Explicit { name, degree, generators } => {
            Group::from_generators(name, *degree, generators.clone())
        }
        GroupSpec::Family { family, params } => build_family(family, params),
    }
}

pub fn group_from_json(text: &str) -> Result<Arc<Group>> {
    let spec: GroupSpec =
        serde_json::from_str(text).map_err(|e| Error::input(format!("group file: {e}")))?;
    group_from_spec(&spec)
}

fn param_usize(params: &Value, key: &str) -> Result<usize> {
    params
        .get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::input(format!("missing integer parameter {key:?}")))
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn log_p(n: usize, p: usize) -> Option<u32> {
    let mut k = 0;
    let mut m = n;
    while m > 1 {
        if m % p != 0 {
            return None;
        }
        m /= p;
        k += 1;
    }
    Some(k)
}

/// Right regular representation of a group given by a multiplication rule on `0..n`.
pub fn regular_group(
    name: &str,
    n: usize,
    mul: impl Fn(usize, usize) -> usize,
    gens: &[usize],
) -> Result<Arc<Group>> {
    let perms = gens.iter().map(|&g| (0..n).map(|x| mul(x, g) as u32).collect()).collect();
    Group::from_generators(name, n, perms)
}

pub fn cyclic(n: usize) -> Result<Arc<Group>> {
    if n == 0 {
        return Err(Error::input("cyclic order must be positive"));
    }
    let gens = if n == 1 { vec![] } else { vec![(0..n).map(|i| ((i + 1) % n) as u32).collect()] };
    Group::from_generators(&format!("C{n}"), n, gens)
}

pub fn elementary_abelian(p: usize, k: usize) -> Result<Arc<Group>> {
    if !is_prime(p) {
        return Err(Error::input("elementary_abelian needs a prime p"));
    }
    let n = p.pow(k as u32);
    let digit = |x: usize, j: usize| (x / p.pow(j as u32)) % p;
    let add = |x: usize, y: usize| (0..k).map(|j| ((digit(x, j) + digit(y, j)) % p) * p.pow(j as u32)).sum();
    let gens: Vec<usize> = (0..k).map(|j| p.pow(j as u32)).collect();
    if n == 1 {
        return Group::from_generators(&format!("C{p}^0"), 1, vec![]);
    }
    regular_group(&format!("C{p}^{k}"), n, add, &gens)
}

pub fn dihedral(n: usize) -> Result<Arc<Group>> {
    match n {
        0 => Err(Error::input("dihedral needs n ≥ 1")),
        1 => cyclic(2).map(|g| rename(&g, "D1")),
        2 => elementary_abelian(2, 2).map(|g| rename(&g, "D2")),
        _ => {
            let r: Perm = (0..n).map(|i| ((i + 1) % n) as u32).collect();
            let s: Perm = (0..n).map(|i| ((n - i) % n) as u32).collect();
            Group::from_generators(&format!("D{n}"), n, vec![r, s])
        }
    }
}

fn rename(g: &Arc<Group>, name: &str) -> Arc<Group> {
    Group::from_generators(name, g.degree(), g.generators().to_vec()).expect("already valid")
}

/// Generalised quaternion group of order `2^k ≥ 8`.
pub fn quaternion(order: usize) -> Result<Arc<Group>> {
    match log_p(order, 2) {
        Some(k) if k >= 3 => {}
        _ => return Err(Error::input("quaternion order must be a power of 2, at least 8")),
    }
    let m = order / 2;
    // element a + m*b  <->  x^a y^b,  y x y^-1 = x^-1,  y^2 = x^{m/2}
    let mul = |u: usize, v: usize| {
        let (a, b) = (u % m, u / m);
        let (c, d) = (v % m, v / m);
        let c2 = if b == 1 { (m - c) % m } else { c };
        let mut e = (a + c2) % m;
        if b == 1 && d == 1 {
            e = (e + m / 2) % m;
        }
        e + m * ((b + d) % 2)
    };
    regular_group(&format!("Q{order}"), order, mul, &[1, m])
}

/// Semidihedral group of order `2^k ≥ 16`.
pub fn semidihedral(order: usize) -> Result<Arc<Group>> {
    match log_p(order, 2) {
        Some(k) if k >= 4 => {}
        _ => return Err(Error::input("semidihedral order must be a power of 2, at least 16")),
    }
    let m = order / 2;
    let r = m / 2 - 1;
    let mul = |u: usize, v: usize| {
        let (a, b) = (u % m, u / m);
        let (c, d) = (v % m, v / m);
        let c2 = if b == 1 { (c * r) % m } else { c };
        (a + c2) % m + m * ((b + d) % 2)
    };
    regular_group(&format!("SD{order}"), order, mul, &[1, m])
}

/// Upper unitriangular 3×3 matrices over F_p.
pub fn heisenberg_p3(p: usize) -> Result<Arc<Group>> {
    if !is_prime(p) {
        return Err(Error::input("heisenberg_p3 needs a prime p"));
    }
    let enc = |a: usize, b: usize, c: usize| a + p * b + p * p * c;
    let mul = |u: usize, v: usize| {
        let (a, b, c) = (u % p, (u / p) % p, u / (p * p));
        let (a2, b2, c2) = (v % p, (v / p) % p, v / (p * p));
        enc((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p)
    };
    regular_group(&format!("Heis{}", p * p * p), p * p * p, mul, &[enc(1, 0, 0), enc(0, 1, 0)])
}

fn bit(v: usize, j: usize) -> usize {
    (v >> j) & 1
}

/// Bilinear form on F_2^{2n} whose diagonal is the quadratic form of the given type.
fn beta2(v: usize, w: usize, n: usize, minus: bool) -> usize {
    let mut s = 0;
    for i in 0..n {
        s += bit(v, 2 * i) * bit(w, 2 * i + 1);
        if minus && i == 0 {
            s += bit(v, 0) * bit(w, 0) + bit(v, 1) * bit(w, 1);
        }
    }
    s % 2
}

/// Extraspecial group of order `p^{1+2n}`; `minus` selects the second type.
pub fn extraspecial(p: usize, n: usize, minus: bool) -> Result<Arc<Group>> {
    if !is_prime(p) || n == 0 {
        return Err(Error::input("extraspecial needs a prime p and n ≥ 1"));
    }
    let sign = if minus { "-" } else { "+" };
    let order = p.pow(1 + 2 * n as u32);
    let name = format!("{p}^(1+{})_{sign}", 2 * n);
    if p == 2 {
        let dimv = 1usize << (2 * n);
        let mul = |u: usize, v: usize| {
            let (x, z) = (u % dimv, u / dimv);
            let (y, z2) = (v % dimv, v / dimv);
            (x ^ y) + dimv * ((z + z2 + beta2(x, y, n, minus)) % 2)
        };
        let gens: Vec<usize> = (0..2 * n).map(|j| 1 << j).collect();
        return regular_group(&name, order, mul, &gens);
    }
    let q = p.pow(2 * n as u32);
    let digit = |x: usize, j: usize| (x / p.pow(j as u32)) % p;
    let vadd = |x: usize, y: usize| -> usize {
        (0..2 * n).map(|j| ((digit(x, j) + digit(y, j)) % p) * p.pow(j as u32)).sum()
    };
    if !minus {
        let form = |x: usize, y: usize| -> usize {
            (0..n).map(|i| digit(x, 2 * i) * digit(y, 2 * i + 1)).sum::<usize>() % p
        };
        let mul = |u: usize, v: usize| {
            let (x, z) = (u % q, u / q);
            let (y, z2) = (v % q, v / q);
            vadd(x, y) + q * ((z + z2 + form(x, y)) % p)
        };
        let gens: Vec<usize> = (0..2 * n).map(|j| p.pow(j as u32)).collect();
        return regular_group(&name, order, mul, &gens);
    }
    // exponent p^2 type: <a, b | a^{p^2}, b^p, b a b^-1 = a^{1+p}> centrally joined
    // with n-1 Heisenberg factors along <a^p>; element (i mod p^2, j mod p, w).
    let pp = p * p;
    let enc = |i: usize, j: usize, w: usize| i + pp * j + pp * p * w;
    let wdigit = |x: usize, k: usize| (x / p.pow(k as u32)) % p;
    let wadd = |x: usize, y: usize| -> usize {
        (0..2 * (n - 1)).map(|k| ((wdigit(x, k) + wdigit(y, k)) % p) * p.pow(k as u32)).sum()
    };
    let wform = |x: usize, y: usize| -> usize {
        (0..n - 1).map(|k| wdigit(x, 2 * k) * wdigit(y, 2 * k + 1)).sum::<usize>() % p
    };
    let mul = |u: usize, v: usize| {
        let (i, j, w) = (u % pp, (u / pp) % p, u / (pp * p));
        let (k, l, w2) = (v % pp, (v / pp) % p, v / (pp * p));
        let twist = (1 + p).pow(j as u32) % pp;
        let ni = (i + k * twist + p * wform(w, w2)) % pp;
        enc(ni, (j + l) % p, wadd(w, w2))
    };
    let mut gens = vec![enc(1, 0, 0), enc(0, 1, 0)];
    for k in 0..2 * (n - 1) {
        gens.push(enc(0, 0, p.pow(k as u32)));
    }
    regular_group(&name, order, mul, &gens)
}

/// Central product of `C4` with the extraspecial group `2^{1+2n}_+`.
pub fn pauli(n: usize) -> Result<Arc<Group>> {
    if n == 0 {
        return Err(Error::input("pauli needs n ≥ 1"));
    }
    let dimv = 1usize << (2 * n);
    let mul = |u: usize, v: usize| {
        let (x, z) = (u % dimv, u / dimv);
        let (y, z2) = (v % dimv, v / dimv);
        (x ^ y) + dimv * ((z + z2 + 2 * beta2(x, y, n, false)) % 4)
    };
    let mut gens: Vec<usize> = (0..2 * n).map(|j| 1 << j).collect();
    gens.push(dimv);
    regular_group(&format!("C4o2^(1+{})", 2 * n), 4 * dimv, mul, &gens)
}

pub fn direct_product(factors: &[Arc<Group>]) -> Result<Arc<Group>> {
    let degree: usize = factors.iter().map(|f| f.degree()).sum();
    let mut gens = Vec::new();
    let mut offset = 0;
    for f in factors {
        for g in f.generators() {
            let mut p: Perm = (0..degree as u32).collect();
            for (i, &j) in g.iter().enumerate() {
                p[offset + i] = (offset as u32) + j;
            }
            gens.push(p);
        }
        offset += f.degree();
    }
    let name = factors.iter().map(|f| f.name().to_string()).collect::<Vec<_>>().join("x");
    Group::from_generators(&name, degree, gens)
}

/// `N ⋊ K`, where `action[i]` lists the images of the elements of `N` under
/// the i-th generator of `K` (element indices of `N`).
pub fn semidirect_product(n: &Arc<Group>, k: &Arc<Group>, action: &[Vec<usize>]) -> Result<Arc<Group>> {
    let kg = k.generator_indices();
    if action.len() != kg.len() {
        return Err(Error::input("one action table per generator of the acting group"));
    }
    let nn = n.order();
    for a in action {
        let p: Vec<u32> = a.iter().map(|&x| x as u32).collect();
        if a.len() != nn || !is_bijection(&p) {
            return Err(Error::input("action table must be a permutation of N's elements"));
        }
        for x in 0..nn {
            for y in 0..nn {
                if a[n.mul(x, y)] != n.mul(a[x], a[y]) {
                    return Err(Error::input("action table is not an automorphism"));
                }
            }
        }
    }
    // automorphism attached to every element of K, via BFS words
    let mut auto: Vec<Option<Vec<usize>>> = vec![None; k.order()];
    auto[0] = Some((0..nn).collect());
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (gi, &g) in kg.iter().enumerate() {
            let y = k.mul(x, g);
            // α(x g) = α(x) ∘ α(g)
            let ax = auto[x].clone().expect("visited");
            let composed: Vec<usize> = (0..nn).map(|t| ax[action[gi][t]]).collect();
            match &auto[y] {
                None => {
                    auto[y] = Some(composed);
                    queue.push_back(y);
                }
                Some(existing) => {
                    if *existing != composed {
                        return Err(Error::input("action tables do not define a homomorphism"));
                    }
                }
            }
        }
    }
    let auto: Vec<Vec<usize>> = auto.into_iter().map(|a| a.expect("K enumerated")).collect();
    for x in 0..k.order() {
        for y in 0..k.order() {
            let xy = k.mul(x, y);
            if (0..nn).any(|t| auto[xy][t] != auto[x][auto[y][t]]) {
                return Err(Error::input("action tables do not define a homomorphism"));
            }
        }
    }
    // (a, x)(b, y) = (a · x(b), x y)
    let mul = |u: usize, v: usize| {
        let (a, x) = (u % nn, u / nn);
        let (b, y) = (v % nn, v / nn);
        n.mul(a, auto[x][b]) + nn * k.mul(x, y)
    };
    let mut gens: Vec<usize> = n.generator_indices();
    gens.extend(kg.iter().map(|&g| nn * g));
    regular_group(&format!("{}:{}", n.name(), k.name()), nn * k.order(), mul, &gens)
}

/// Multiplication in F_8 = F_2[t]/(t^3 + t + 1), elements as 3-bit integers.
pub fn f8_mul(a: u8, b: u8) -> u8 {
    let mut r: u16 = 0;
    for i in 0..3 {
        if b >> i & 1 == 1 {
            r ^= (a as u16) << i;
        }
    }
    for i in (3..5).rev() {
        if r >> i & 1 == 1 {
            r ^= 0b1011 << (i - 3);
        }
    }
    r as u8
}

fn f8_frob(a: u8) -> u8 {
    f8_mul(a, a)
}

/// Point permutation of F_8 given by x ↦ b·Frob^k(x) + a.
fn f8_affine(a: u8, b: u8, k: u32) -> Perm {
    (0..8u8)
        .map(|x| {
            let mut y = x;
            for _ in 0..k {
                y = f8_frob(y);
            }
            (f8_mul(b, y) ^ a) as u32
        })
        .collect()
}

/// The order-168 group F_8 ⋊ (F_8^× ⋊ Gal), acting on the 8 points of F_8.
pub fn g2_i() -> Result<Arc<Group>> {
    Group::from_generators("I", 8, vec![f8_affine(1, 1, 0), f8_affine(0, 0b010, 0), f8_affine(0, 1, 1)])
}

/// Its index-3 subgroup F_8 ⋊ F_8^×.
pub fn g2_i0() -> Result<Arc<Group>> {
    Group::from_generators("I0", 8, vec![f8_affine(1, 1, 0), f8_affine(0, 0b010, 0)])
}

/// The translation subgroup J (≅ F_8) of `g2_i` or `g2_i0`.
pub fn g2_translations(g: &Arc<Group>) -> Subgroup {
    let members = (0..g.order())
        .filter(|&i| {
            let p = g.element(i);
            (0..8u32).all(|x| p[x as usize] == x ^ p[0])
        })
        .collect();
    Subgroup::from_members(g, members)
}

pub fn build_family(kind: &str, params: &Value) -> Result<Arc<Group>> {
    match kind {
        "cyclic" => cyclic(param_usize(params, "n")?),
        "elementary_abelian" => elementary_abelian(param_usize(params, "p")?, param_usize(params, "k")?),
        "dihedral" => dihedral(param_usize(params, "n")?),
        "quaternion" => quaternion(param_usize(params, "order")?),
        "semidihedral" => semidihedral(param_usize(params, "order")?),
        "heisenberg_p3" => heisenberg_p3(param_usize(params, "p")?),
        "extraspecial" => {
            let p = param_usize(params, "p")?;
            let order = param_usize(params, "order")?;
            let k = log_p(order, p).filter(|&k| k >= 3 && k % 2 == 1).ok_or_else(|| {
                Error::input(format!("extraspecial order {order} is not {p}^(1+2n)"))
            })?;
            let minus = match params.get("type").and_then(Value::as_str).unwrap_or("+") {
                "+" | "plus" => false,
                "-" | "minus" => true,
                other => return Err(Error::input(format!("unknown extraspecial type {other:?}"))),
            };
            extraspecial(p, ((k - 1) / 2) as usize, minus)
        }
        "pauli" => pauli(param_usize(params, "n")?),
        "direct_product" => {
            let factors = params
                .get("factors")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::input("direct_product needs a factors array"))?;
            let groups = factors
                .iter()
                .map(|f| {
                    let spec: GroupSpec = serde_json::from_value(f.clone())
                        .map_err(|e| Error::input(format!("factor: {e}")))?;
                    group_from_spec(&spec)
                })
                .collect::<Result<Vec<_>>>()?;
            direct_product(&groups)
        }
        "semidirect_product" => {
            let get = |key: &str| -> Result<Arc<Group>> {
                let v = params.get(key).ok_or_else(|| Error::input(format!("missing {key:?}")))?;
                let spec: GroupSpec =
                    serde_json::from_value(v.clone()).map_err(|e| Error::input(format!("{key}: {e}")))?;
                group_from_spec(&spec)
            };
            let n = get("normal")?;
            let k = get("acting")?;
            let action: Vec<Vec<usize>> = params
                .get("action")
                .cloned()
                .map(serde_json::from_value)
                .transpose()
                .map_err(|e| Error::input(format!("action: {e}")))?
                .ok_or_else(|| Error::input("semidirect_product needs an action table"))?;
            semidirect_product(&n, &k, &action)
        }
        "g2_I" => g2_i(),
        "g2_I0" => g2_i0(),
        other => Err(Error::input(format!("unknown group family {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_from_generators() {
        let g = Group::from_generators("S3", 3, vec![vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(g.order(), 6);
        let sizes: Vec<usize> = g.classes().iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![1, 3, 2]);
        assert_eq!(g.element(0), &vec![0, 1, 2]);
    }

    #[test]
    fn trivial_and_bad_input() {
        let t = Group::from_generators("1", 1, vec![]).unwrap();
        assert_eq!(t.order(), 1);
        assert!(matches!(Group::from_generators("x", 3, vec![vec![0, 0, 1]]), Err(Error::Input(_))));
        let big = Group::with_cap("S5", 5, vec![vec![1, 0, 2, 3, 4], vec![1, 2, 3, 4, 0]], 100);
        assert!(matches!(big, Err(Error::Resource(_))));
    }

    #[test]
    fn family_orders() {
        assert_eq!(quaternion(8).unwrap().order(), 8);
        assert_eq!(quaternion(16).unwrap().order(), 16);
        assert_eq!(semidihedral(16).unwrap().order(), 16);
        assert_eq!(dihedral(4).unwrap().order(), 8);
        assert_eq!(heisenberg_p3(3).unwrap().order(), 27);
        assert_eq!(extraspecial(2, 2, false).unwrap().order(), 32);
        assert_eq!(extraspecial(2, 2, true).unwrap().order(), 32);
        assert_eq!(extraspecial(3, 1, true).unwrap().order(), 27);
        assert_eq!(pauli(1).unwrap().order(), 16);
        assert_eq!(g2_i().unwrap().order(), 168);
        assert_eq!(g2_i0().unwrap().order(), 56);
        assert_eq!(cyclic(1).unwrap().order(), 1);
        assert!(build_family("extraspecial", &serde_json::json!({"p": 2, "order": 16})).is_err());
    }

    #[test]
    fn heisenberg_center_and_exponent() {
        let h = heisenberg_p3(3).unwrap();
        assert_eq!(h.center().order(), 3);
        assert_eq!(h.exponent(), 3);
        let m = extraspecial(3, 1, true).unwrap();
        assert_eq!(m.exponent(), 9);
        assert_eq!(m.center().order(), 3);
    }

    #[test]
    fn quaternion_structure() {
        let q = quaternion(8).unwrap();
        let z = q.center();
        assert_eq!(z.order(), 2);
        assert_eq!(q.derived_subgroup(), z);
        let sizes: Vec<usize> = q.classes().iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 2, 2]);
        let idx2 = q.index2_list();
        assert_eq!(idx2.len(), 3);
        assert!(idx2.iter().all(|s| s.order() == 4 && s.is_cyclic()));
    }

    #[test]
    fn extraspecial_types_differ() {
        let plus = extraspecial(2, 1, false).unwrap();
        let minus = extraspecial(2, 1, true).unwrap();
        let inv = |g: &Arc<Group>| (1..g.order()).filter(|&x| g.element_order(x) == 2).count();
        assert_eq!(inv(&plus), 5); // D4
        assert_eq!(inv(&minus), 1); // Q8
    }

    #[test]
    fn transfer_examples() {
        let c4 = cyclic(4).unwrap();
        let h = c4.whole();
        let g = c4.generator_indices()[0];
        let gp = c4.closure(&[c4.mul(g, g)]);
        assert_eq!(transfer(&h, &gp, g).unwrap(), c4.mul(g, g));
        assert_eq!(transfer(&h, &gp, 0).unwrap(), 0);
        let v4 = elementary_abelian(2, 2).unwrap();
        let a = v4.generator_indices()[0];
        let gp = v4.closure(&[a]);
        assert_eq!(transfer(&v4.whole(), &gp, a).unwrap(), 0);
        assert!(transfer(&v4.whole(), &v4.trivial(), a).is_err());
    }

    #[test]
    fn quotient_orders() {
        let q = quaternion(16).unwrap();
        for n in q.normal_subgroups() {
            let quo = q.quotient(&n).unwrap();
            assert_eq!(q.order(), n.order() * quo.group.order());
        }
        let s3 = dihedral(3).unwrap();
        let refl = s3.closure(&[s3.generator_indices()[1]]);
        assert!(s3.quotient(&refl).is_err());
    }

    #[test]
    fn semidirect_c3_c4() {
        let c3 = cyclic(3).unwrap();
        let c4 = cyclic(4).unwrap();
        let g = semidirect_product(&c3, &c4, &[vec![0, 2, 1]]).unwrap();
        assert_eq!(g.order(), 12);
        assert!(!g.is_abelian());
        assert_eq!(g.center().order(), 2);
    }

    #[test]
    fn power_map_on_c2() {
        let c2 = cyclic(2).unwrap();
        assert_eq!(c2.power_map(2), vec![0, 0]);
    }

    #[test]
    fn g2_translations_are_normal() {
        let i = g2_i().unwrap();
        let j = g2_translations(&i);
        assert_eq!(j.order(), 8);
        assert!(j.is_normal());
        let i0 = g2_i0().unwrap();
        assert_eq!(g2_translations(&i0).order(), 8);
    }
}
