//! Groups `H` with a central subgroup `Z` of order `p` and elementary abelian
//! `H/Z`: the forms on `V = H/Z`, polarisations, and the irreducible with a
//! prescribed central character.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::One;

use crate::charcalc::{character_table, induce, inner_rational, restrict_to, ClassFun};
use crate::error::{Error, Result};
use crate::exactnum::CycNum;
use crate::groupcore::{Group, Subgroup};

/// `V = H/Z` as an `F_p`-space; vectors are encoded as base-`p` integers.
#[derive(Clone, Debug)]
pub struct HeisenbergPair {
    pub h: Arc<Group>,
    pub z: Subgroup,
    pub p: usize,
    pub z_gen: usize,
    /// lifts in `H` of the basis vectors
    pub basis: Vec<usize>,
    /// code of the coset of every element of `H`
    pub code_of: Vec<usize>,
    /// a lift of every code
    pub lift: Vec<usize>,
    /// `q(v) = log_z(lift(v)^p)`
    pub q: Vec<usize>,
    /// `b(v, w) = log_z([lift v, lift w])`
    pub b: Vec<Vec<usize>>,
}

impl HeisenbergPair {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn size(&self) -> usize {
        self.lift.len()
    }

    pub fn add(&self, v: usize, w: usize) -> usize {
        let p = self.p;
        let mut out = 0;
        let mut place = 1;
        let (mut a, mut c) = (v, w);
        for _ in 0..self.dim() {
            out += ((a % p + c % p) % p) * place;
            a /= p;
            c /= p;
            place *= p;
        }
        out
    }

    fn span(&self, gens: &[usize]) -> Vec<usize> {
        let mut set = vec![false; self.size()];
        set[0] = true;
        let mut elems = vec![0usize];
        for &g in gens {
            let mut k = 0;
            while k < elems.len() {
                let y = self.add(elems[k], g);
                if !set[y] {
                    set[y] = true;
                    elems.push(y);
                }
                k += 1;
            }
        }
        elems.sort_unstable();
        elems
    }

    /// Preimage in `H` of a set of codes.
    pub fn preimage(&self, codes: &[usize]) -> Subgroup {
        let mut mask = vec![false; self.size()];
        for &c in codes {
            mask[c] = true;
        }
        let members = (0..self.h.order()).filter(|&x| mask[self.code_of[x]]).collect();
        Subgroup::from_members(&self.h, members)
    }

    /// Radical of `b`.
    pub fn radical(&self) -> Vec<usize> {
        (0..self.size()).filter(|&v| (0..self.size()).all(|w| self.b[v][w] == 0)).collect()
    }

    /// Polarisation data; `U` is grown greedily from `V⁰` in code order.
    pub fn polarization(&self) -> Result<Polarization> {
        self.polarization_from(0)
    }

    /// Same, but the greedy scan starts at code `start` (used to exhibit a second `U`).
    pub fn polarization_from(&self, start: usize) -> Result<Polarization> {
        let v0 = self.radical();
        let y = self.preimage(&v0);
        let mut gens: Vec<usize> = Vec::new();
        let mut u = self.span(&gens);
        let mut in_u = vec![false; self.size()];
        for &v in &v0 {
            if !in_u[v] {
                gens.push(v);
                u = self.span(&gens);
                for &x in &u {
                    in_u[x] = true;
                }
            }
        }
        for step in 0..self.size() {
            let v = (start + step) % self.size();
            if in_u[v] || gens.iter().any(|&g| self.b[v][g] != 0) {
                continue;
            }
            gens.push(v);
            u = self.span(&gens);
            for &x in &u {
                in_u[x] = true;
            }
        }
        let hprime = self.preimage(&u);
        if !hprime.is_abelian() {
            return Err(Error::Theorem("preimage of an isotropic subspace is not abelian".into()));
        }
        Ok(Polarization { v0, y, isotropic: u, hprime })
    }
}

#[derive(Clone, Debug)]
pub struct Polarization {
    pub v0: Vec<usize>,
    pub y: Subgroup,
    pub isotropic: Vec<usize>,
    pub hprime: Subgroup,
}

pub fn validate_pair(h: &Arc<Group>, z: &Subgroup, p: usize) -> Result<HeisenbergPair> {
    if h.is_abelian() {
        return Err(Error::validation("non-abelian", "H is abelian"));
    }
    pair_forms(h, z, p)
}

/// Forms on `H/Z` without requiring `H` non-abelian (then `b = 0`).
pub fn pair_forms(h: &Arc<Group>, z: &Subgroup, p: usize) -> Result<HeisenbergPair> {
    if z.order() != p || !z.is_cyclic() {
        return Err(Error::validation("(1)", format!("Z has order {} but must be cyclic of order {p}", z.order())));
    }
    let z_gen = *z.members().iter().find(|&&x| x != 0).expect("order p > 1");
    if (0..h.order()).any(|x| h.mul(x, z_gen) != h.mul(z_gen, x)) {
        return Err(Error::validation("(1)", "Z is not central"));
    }
    let mut log = HashMap::new();
    let mut t = 0;
    for k in 0..p {
        log.insert(t, k);
        t = h.mul(t, z_gen);
    }
    for x in 0..h.order() {
        if !log.contains_key(&h.pow(x, p as i64)) {
            return Err(Error::validation("(2)", format!("element {x} has p-th power outside Z")));
        }
    }
    let zs: Vec<usize> = z.members().to_vec();
    let coset_rep = |x: usize| zs.iter().map(|&c| h.mul(x, c)).min().expect("nonempty");
    let mut code_of_rep: HashMap<usize, usize> = HashMap::from([(0, 0)]);
    let mut lift = vec![0usize];
    let mut basis = Vec::new();
    for x in 0..h.order() {
        let r = coset_rep(x);
        if code_of_rep.contains_key(&r) {
            continue;
        }
        let place = lift.len();
        let old = lift.clone();
        let mut power = 0usize;
        for c in 1..p {
            power = if c == 1 { x } else { h.mul(power, x) };
            for (code, &l) in old.iter().enumerate() {
                let y = h.mul(l, power);
                let ry = coset_rep(y);
                if code_of_rep.contains_key(&ry) {
                    return Err(Error::validation("(2)", "H/Z is not elementary abelian"));
                }
                code_of_rep.insert(ry, code + c * place);
                lift.push(y);
            }
        }
        basis.push(x);
    }
    let code_of: Vec<usize> = (0..h.order()).map(|x| code_of_rep[&coset_rep(x)]).collect();
    // lifts pushed in code order by construction
    for (c, &l) in lift.iter().enumerate() {
        debug_assert_eq!(code_of[l], c);
    }
    let n = lift.len();
    let q = lift.iter().map(|&l| log[&h.pow(l, p as i64)]).collect();
    let mut b = vec![vec![0usize; n]; n];
    for v in 0..n {
        for w in 0..n {
            let c = h.commutator(lift[v], lift[w]);
            b[v][w] = *log.get(&c).ok_or_else(|| Error::validation("(2)", "commutator outside Z"))?;
        }
    }
    Ok(HeisenbergPair { h: h.clone(), z: z.clone(), p, z_gen, basis, code_of, lift, q, b })
}

/// Discrete logs of a linear character: `χ(x) = ζ_n^{log[x]}`.
fn linear_logs(chi: &ClassFun) -> Result<Vec<usize>> {
    let g = chi.group();
    let n = g.ambient();
    let roots: HashMap<CycNum, usize> = (0..n).map(|j| (CycNum::zeta_pow(n, j as i64), j)).collect();
    (0..g.order())
        .map(|x| roots.get(chi.at(x)).copied().ok_or_else(|| Error::input("not a linear character")))
        .collect()
}

#[derive(Clone, Debug)]
pub struct RhoChi {
    pub rho: ClassFun,
    /// number of irreducibles of `H` with this central character
    pub matching: usize,
    pub dim: usize,
    pub hprime: Subgroup,
}

/// The irreducible of `H` with central character `chi` on `Z(H)`.
pub fn rho_chi(hp: &HeisenbergPair, chi: &ClassFun) -> Result<RhoChi> {
    let pol = hp.polarization()?;
    rho_chi_with(hp, chi, &pol)
}

pub fn rho_chi_with(hp: &HeisenbergPair, chi: &ClassFun, pol: &Polarization) -> Result<RhoChi> {
    let h = &hp.h;
    let center = h.center();
    let cg = chi.group();
    if cg.order() != center.order() || chi.dim() != 1 {
        return Err(Error::input("χ must be a linear character of Z(H)"));
    }
    let logs = linear_logs(chi)?;
    let n = h.ambient();
    // χ value (as log) of a parent element of the centre
    let mut val: Vec<Option<usize>> = vec![None; h.order()];
    for i in 0..cg.order() {
        let x = h.index_of(cg.element(i)).ok_or_else(|| Error::input("χ is not on Z(H)"))?;
        val[x] = Some(logs[i]);
    }
    if val[hp.z_gen] == Some(0) {
        return Err(Error::input("χ must be nontrivial on Z"));
    }
    // extend along H′ in index order, choosing the smallest admissible root
    let mut members: Vec<usize> = center.members().to_vec();
    for &x in pol.hprime.members() {
        if val[x].is_some() {
            continue;
        }
        let mut k = 1;
        let mut y = x;
        while val[y].is_none() {
            y = h.mul(y, x);
            k += 1;
        }
        let target = val[y].expect("found");
        let j = (0..n).find(|&j| (j * k) % n == target).ok_or_else(|| Error::Theorem("no root of the central value".into()))?;
        let old = members.clone();
        let mut power = 0usize;
        for c in 0..k {
            for &s in &old {
                let e = h.mul(s, power);
                val[e] = Some((val[s].expect("set") + c * j) % n);
                if c > 0 {
                    members.push(e);
                }
            }
            power = h.mul(power, x);
        }
    }
    let sub = pol.hprime.as_group();
    let values = (0..sub.group.num_classes())
        .map(|c| CycNum::zeta_pow(n, val[sub.to_parent[sub.group.class_rep(c)]].expect("extended") as i64))
        .collect();
    let ext = ClassFun::new(&sub.group, values)?;
    let rho = induce(h, &pol.hprime, &ext)?;
    if inner_rational(&rho, &rho)? != num_traits::One::one() {
        return Err(Error::Theorem("induced character is not irreducible".into()));
    }
    let res = restrict_to(&rho, cg)?;
    if res != chi.scale(&rho.degree()) {
        return Err(Error::Theorem("induced character has the wrong central character".into()));
    }
    let table = character_table(h)?;
    let mut matching = 0;
    for psi in table.irreducibles() {
        let r = restrict_to(psi, cg)?;
        if r == chi.scale(&psi.degree()) {
            matching += 1;
        }
    }
    Ok(RhoChi { dim: rho.dim() as usize, rho, matching, hprime: pol.hprime.clone() })
}

/// `d` with `|H/Z(H)| = p^{2d}`, if that index is an even power of `p`.
pub fn expected_half_rank(hp: &HeisenbergPair) -> Option<u32> {
    let mut idx = hp.h.order() / hp.h.center().order();
    let mut k = 0;
    while idx > 1 && idx % hp.p == 0 {
        idx /= hp.p;
        k += 1;
    }
    (idx == 1 && k % 2 == 0).then_some(k / 2)
}

/// Nontrivial-on-Z linear characters of `Z(H)`, in table order.
pub fn central_characters(hp: &HeisenbergPair) -> Result<Vec<ClassFun>> {
    let center = hp.h.center();
    let cg = center.as_group().group.clone();
    let t = character_table(&cg)?;
    let zi = cg.index_of(hp.h.element(hp.z_gen)).expect("Z ⊆ Z(H)");
    Ok(t.irreducibles().iter().filter(|c| !c.at(zi).is_one_value()).cloned().collect())
}

trait IsOne {
    fn is_one_value(&self) -> bool;
}

impl IsOne for CycNum {
    fn is_one_value(&self) -> bool {
        self.to_rational().map(|r| r.is_one()).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupcore::{cyclic, extraspecial, heisenberg_p3, pauli, quaternion};

    #[test]
    fn q8_pair() {
        let g = quaternion(8).unwrap();
        let hp = validate_pair(&g, &g.center(), 2).unwrap();
        assert_eq!(hp.dim(), 2);
        assert_eq!(hp.radical(), vec![0]);
        let pol = hp.polarization().unwrap();
        assert_eq!(pol.hprime.order(), 4);
        assert!(pol.hprime.is_cyclic());
        for v in 0..4 {
            for w in 0..4 {
                assert_eq!((hp.q[hp.add(v, w)] + 2 - hp.q[v] + 2 - hp.q[w]) % 2, hp.b[v][w]);
            }
        }
        let chars = central_characters(&hp).unwrap();
        assert_eq!(chars.len(), 1);
        let r = rho_chi(&hp, &chars[0]).unwrap();
        assert_eq!((r.dim, r.matching), (2, 1));
    }

    #[test]
    fn abelian_rejected() {
        let g = cyclic(4).unwrap();
        let z = g.closure(&[g.pow(g.generator_indices()[0], 2)]);
        assert!(validate_pair(&g, &z, 2).is_err());
    }

    #[test]
    fn heisenberg27_pair() {
        let g = heisenberg_p3(3).unwrap();
        let hp = validate_pair(&g, &g.center(), 3).unwrap();
        let chars = central_characters(&hp).unwrap();
        assert_eq!(chars.len(), 2);
        for c in &chars {
            let r = rho_chi(&hp, c).unwrap();
            assert_eq!((r.dim, r.matching), (3, 1));
        }
    }

    #[test]
    fn polarization_dimensions() {
        let g = pauli(1).unwrap();
        let z = g.closure(&[g.pow(*g.center().members().iter().find(|&&x| g.element_order(x) == 4).unwrap(), 2)]);
        let hp = validate_pair(&g, &z, 2).unwrap();
        let pol = hp.polarization().unwrap();
        let r0 = pol.v0.len().trailing_zeros() as usize;
        let ru = pol.isotropic.len().trailing_zeros() as usize;
        assert_eq!(ru, r0 + (hp.dim() - r0) / 2);
        let e = extraspecial(2, 2, true).unwrap();
        let hp = validate_pair(&e, &e.center(), 2).unwrap();
        let chars = central_characters(&hp).unwrap();
        let a = rho_chi_with(&hp, &chars[0], &hp.polarization().unwrap()).unwrap();
        let b = rho_chi_with(&hp, &chars[0], &hp.polarization_from(7).unwrap()).unwrap();
        assert_eq!(a.rho, b.rho);
        assert_eq!(a.dim, 4);
    }
}
