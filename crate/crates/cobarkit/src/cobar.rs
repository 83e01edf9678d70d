//! The reduced cobar complex computing `Cotor_Gamma(F_p, M)` for `Gamma`
//! the dual Steenrod algebra or one of its quotient Hopf algebras, and `M`
//! one of the comodule algebras from [`crate::thom`] (or `Gamma` itself, or
//! `F_p`).
//!
//! `C^s(Gamma; M) = Gammabar^(x)s (x) M`, written `[g_1| ... |g_s] m`. The
//! differential is the alternating sum of the cosimplicial cofaces,
//!
//! ```text
//! d = sum_{i=1}^{s} (-1)^i (reduced coproduct in slot i)
//!   + (-1)^{s+1}   (reduced coaction on m, new factor into slot s+1)
//! ```
//!
//! Every coface has degree zero, so no Koszul signs enter and `d^2 = 0` is
//! the simplicial identity; the tests check it mechanically anyway.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::dual::{antipode, coproduct, milnor_basis, Ambient, DualElement, MilnorMonomial};
use crate::fp::Prime;
use crate::thom::{
    aprime_as_poly, coaction_monomial, monomial_basis, xibar, ThomAlgebra, ThomMonomial,
};
use crate::{Error, Result};

/// The coefficient comodule of a cobar complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CobarComodule {
    /// `F_p` in degree zero.
    Trivial,
    /// `H_*(MSU)` with its coaction.
    Msu,
    /// `H_*(MU)` with its coaction.
    Mu,
    /// `A' (x) PH` with coaction `Delta' (x) 1`.
    APrimeTensorPh,
    /// The coalgebra itself, coacting by its coproduct (an extended
    /// comodule, so its Cotor is `F_p` concentrated in `(0, 0)`).
    ExtendedDual,
}

impl CobarComodule {
    pub fn as_str(self) -> &'static str {
        match self {
            CobarComodule::Trivial => "trivial",
            CobarComodule::Msu => "MSU",
            CobarComodule::Mu => "MU",
            CobarComodule::APrimeTensorPh => "APrime_tensor_PH",
            CobarComodule::ExtendedDual => "extended",
        }
    }

    pub fn parse(s: &str) -> Result<CobarComodule> {
        match s {
            "trivial" | "fp" | "Fp" => Ok(CobarComodule::Trivial),
            "MSU" | "msu" => Ok(CobarComodule::Msu),
            "MU" | "mu" => Ok(CobarComodule::Mu),
            "APrime_tensor_PH" | "a-prime-tensor-ph" => Ok(CobarComodule::APrimeTensorPh),
            "extended" => Ok(CobarComodule::ExtendedDual),
            _ => Err(Error::Invalid(format!("unknown comodule `{s}`"))),
        }
    }

    fn thom_algebra(self) -> Option<ThomAlgebra> {
        match self {
            CobarComodule::Msu => Some(ThomAlgebra::Msu),
            CobarComodule::Mu => Some(ThomAlgebra::Mu),
            CobarComodule::APrimeTensorPh => Some(ThomAlgebra::APrimeTensorPh),
            _ => None,
        }
    }
}

impl std::fmt::Display for CobarComodule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A monomial coefficient from whichever comodule is in play.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoefMono {
    Unit,
    Thom(ThomMonomial),
    Dual(MilnorMonomial),
}

impl CoefMono {
    pub fn degree(&self, p: Prime) -> u64 {
        match self {
            CoefMono::Unit => 0,
            CoefMono::Thom(m) => m.degree(p),
            CoefMono::Dual(m) => m.degree(p),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CoefMono::Unit => Value::Null,
            CoefMono::Thom(m) => m.to_json(),
            CoefMono::Dual(m) => m.to_json(),
        }
    }
}

impl std::fmt::Display for CoefMono {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefMono::Unit => write!(f, "1"),
            CoefMono::Thom(m) => write!(f, "{m}"),
            CoefMono::Dual(m) => write!(f, "{m}"),
        }
    }
}

/// A basis element `[g_1 | ... | g_s] m` of the cobar complex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CobarTermKey {
    pub bar: Vec<MilnorMonomial>,
    pub coef: CoefMono,
}

impl CobarTermKey {
    pub fn internal_degree(&self, p: Prime) -> u64 {
        self.bar.iter().map(|m| m.degree(p)).sum::<u64>() + self.coef.degree(p)
    }
}

impl std::fmt::Display for CobarTermKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let entries: Vec<String> = self.bar.iter().map(|m| m.to_string()).collect();
        write!(f, "[{}]", entries.join("|"))?;
        if !matches!(self.coef, CoefMono::Unit) {
            write!(f, " {}", self.coef)?;
        }
        Ok(())
    }
}

/// An element of cohomological degree `s` of the cobar complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CobarElement {
    p: Prime,
    coalgebra: Ambient,
    comodule: CobarComodule,
    s: u32,
    terms: BTreeMap<CobarTermKey, u32>,
}

impl CobarElement {
    pub fn zero(p: Prime, coalgebra: Ambient, comodule: CobarComodule, s: u32) -> CobarElement {
        CobarElement {
            p,
            coalgebra,
            comodule,
            s,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(
        p: Prime,
        coalgebra: Ambient,
        comodule: CobarComodule,
        key: CobarTermKey,
        coeff: i64,
    ) -> Result<CobarElement> {
        let s = key.bar.len() as u32;
        let mut x = CobarElement::zero(p, coalgebra, comodule, s);
        x.add_term(key, coeff)?;
        Ok(x)
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn coalgebra(&self) -> Ambient {
        self.coalgebra
    }

    pub fn comodule(&self) -> CobarComodule {
        self.comodule
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn terms(&self) -> &BTreeMap<CobarTermKey, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn validate_key(&self, key: &CobarTermKey) -> Result<()> {
        if key.bar.len() as u32 != self.s {
            return Err(Error::Invalid(format!(
                "bar word `{key}` has length {}, element has s = {}",
                key.bar.len(),
                self.s
            )));
        }
        for m in &key.bar {
            if m.is_unit() || !m.lives_in(self.coalgebra) {
                return Err(Error::Invalid(format!(
                    "bar entry `{m}` is not a positive-degree monomial of {}",
                    self.coalgebra
                )));
            }
        }
        match (&key.coef, self.comodule) {
            (CoefMono::Unit, CobarComodule::Trivial) => Ok(()),
            (CoefMono::Thom(m), c) => match c.thom_algebra() {
                Some(alg) if m.valid_for(self.p, alg) => Ok(()),
                _ => Err(Error::Invalid(format!(
                    "coefficient `{m}` is not valid in comodule {c}"
                ))),
            },
            (CoefMono::Dual(m), CobarComodule::ExtendedDual) if m.lives_in(self.coalgebra) => {
                Ok(())
            }
            (coef, c) => Err(Error::Invalid(format!(
                "coefficient `{coef}` is not valid in comodule {c}"
            ))),
        }
    }

    pub fn add_term(&mut self, key: CobarTermKey, coeff: i64) -> Result<()> {
        self.validate_key(&key)?;
        let c = self.p.reduce(coeff);
        if c == 0 {
            return Ok(());
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = self.p.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
        Ok(())
    }

    pub fn add(&mut self, other: &CobarElement) -> Result<()> {
        if (self.p, self.coalgebra, self.comodule, self.s)
            != (other.p, other.coalgebra, other.comodule, other.s)
        {
            return Err(Error::Invalid(
                "cannot add cobar elements of different type or degree".into(),
            ));
        }
        for (k, &c) in &other.terms {
            self.add_term(k.clone(), c as i64)?;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: i64) {
        let c = self.p.reduce(c);
        if c == 0 {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v = self.p.mul(*v, c);
        }
    }

    pub fn to_json(&self) -> Value {
        let mut keys: Vec<&CobarTermKey> = self.terms.keys().collect();
        keys.sort_by_key(|k| (k.internal_degree(self.p), (*k).clone()));
        let terms: Vec<Value> = keys
            .into_iter()
            .map(|k| {
                json!({
                    "bar": k.bar.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
                    "coeff": self.terms[k],
                    "m": k.coef.to_json(),
                })
            })
            .collect();
        json!({
            "p": self.p.get(),
            "coalgebra": self.coalgebra.as_str(),
            "comodule": self.comodule.as_str(),
            "s": self.s,
            "terms": terms,
        })
    }

    pub fn from_json(v: &Value) -> Result<CobarElement> {
        let p = Prime::new(
            v.get("p")
                .and_then(Value::as_u64)
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| Error::Invalid("cobar element missing prime `p`".into()))?,
        )?;
        let coalgebra = Ambient::parse(
            v.get("coalgebra")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Invalid("cobar element missing `coalgebra`".into()))?,
        )?;
        let comodule = CobarComodule::parse(
            v.get("comodule")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Invalid("cobar element missing `comodule`".into()))?,
        )?;
        let s = v
            .get("s")
            .and_then(Value::as_u64)
            .and_then(|n| u32::try_from(n).ok())
            .ok_or_else(|| Error::Invalid("cobar element missing `s`".into()))?;
        let mut out = CobarElement::zero(p, coalgebra, comodule, s);
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("cobar element missing `terms`".into()))?;
        for t in terms {
            let coeff = t
                .get("coeff")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Invalid("term missing integer `coeff`".into()))?;
            let bar = t
                .get("bar")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Invalid("term missing `bar` array".into()))?
                .iter()
                .map(MilnorMonomial::from_json)
                .collect::<Result<Vec<_>>>()?;
            let m = t.get("m").unwrap_or(&Value::Null);
            let coef = match (comodule, m) {
                (CobarComodule::Trivial, _) => CoefMono::Unit,
                (CobarComodule::ExtendedDual, m) => CoefMono::Dual(MilnorMonomial::from_json(m)?),
                (c, m) => {
                    let alg = c.thom_algebra().expect("remaining comodules are Thom");
                    CoefMono::Thom(ThomMonomial::from_json(m, alg)?)
                }
            };
            out.add_term(CobarTermKey { bar, coef }, coeff)?;
        }
        Ok(out)
    }
}

/// Reduced coproduct of a positive-degree monomial: the coproduct with the
/// two primitive terms `m (x) 1`, `1 (x) m` removed — i.e. every summand
/// with a unit factor dropped.
fn reduced_coproduct(
    p: Prime,
    coalgebra: Ambient,
    m: &MilnorMonomial,
) -> Vec<(MilnorMonomial, MilnorMonomial, u32)> {
    let x = DualElement::single(p, coalgebra, m.clone(), 1).expect("validated bar entry");
    coproduct(&x)
        .terms()
        .iter()
        .filter(|((l, r), _)| !l.is_unit() && !r.is_unit())
        .map(|((l, r), &c)| (l.clone(), r.clone(), c))
        .collect()
}

/// Reduced coaction of a coefficient monomial, with the left factor pushed
/// into the coalgebra quotient (graded projection: each monomial either
/// survives or dies, and positive-degree monomials never become units).
fn reduced_coaction(
    p: Prime,
    coalgebra: Ambient,
    comodule: CobarComodule,
    coef: &CoefMono,
) -> Result<Vec<(MilnorMonomial, CoefMono, u32)>> {
    match (comodule, coef) {
        (CobarComodule::Trivial, CoefMono::Unit) => Ok(Vec::new()),
        (CobarComodule::ExtendedDual, CoefMono::Dual(m)) => {
            let x = DualElement::single(p, coalgebra, m.clone(), 1)?;
            Ok(coproduct(&x)
                .terms()
                .iter()
                .filter(|((l, _), _)| !l.is_unit())
                .map(|((l, r), &c)| (l.clone(), CoefMono::Dual(r.clone()), c))
                .collect())
        }
        (c, CoefMono::Thom(m)) => {
            let alg = c
                .thom_algebra()
                .ok_or_else(|| Error::Invalid(format!("coefficient `{m}` in comodule {c}")))?;
            let rho = coaction_monomial(p, alg, m)?;
            Ok(rho
                .terms()
                .iter()
                .filter(|((l, _), _)| !l.is_unit() && l.lives_in(coalgebra))
                .map(|((l, r), &c)| (l.clone(), CoefMono::Thom(r.clone()), c))
                .collect())
        }
        (c, coef) => Err(Error::Invalid(format!(
            "coefficient `{coef}` is not valid in comodule {c}"
        ))),
    }
}

/// The cobar differential `C^s -> C^(s+1)`.
pub fn cobar_d(x: &CobarElement) -> Result<CobarElement> {
    let p = x.p();
    let s = x.s();
    let mut out = CobarElement::zero(p, x.coalgebra(), x.comodule(), s + 1);
    for (key, &c) in x.terms() {
        // Coproduct cofaces in slots 1..=s.
        for i in 1..=s as usize {
            let sign: i64 = if i % 2 == 1 { -1 } else { 1 };
            for (l, r, c2) in reduced_coproduct(p, x.coalgebra(), &key.bar[i - 1]) {
                let mut bar = Vec::with_capacity(s as usize + 1);
                bar.extend_from_slice(&key.bar[..i - 1]);
                bar.push(l);
                bar.push(r);
                bar.extend_from_slice(&key.bar[i..]);
                out.add_term(
                    CobarTermKey {
                        bar,
                        coef: key.coef.clone(),
                    },
                    sign * p.mul(c, c2) as i64,
                )?;
            }
        }
        // Coaction coface in slot s + 1.
        let sign: i64 = if (s + 1) % 2 == 1 { -1 } else { 1 };
        for (l, coef, c2) in reduced_coaction(p, x.coalgebra(), x.comodule(), &key.coef)? {
            let mut bar = key.bar.clone();
            bar.push(l);
            out.add_term(CobarTermKey { bar, coef }, sign * p.mul(c, c2) as i64)?;
        }
    }
    Ok(out)
}

/// Default cap on the size of any single enumerated cobar basis.
pub const DEFAULT_MAX_BASIS: usize = 500_000;

/// Basis monomials of the coefficient comodule in exact degree `t`.
fn comodule_basis(
    p: Prime,
    coalgebra: Ambient,
    comodule: CobarComodule,
    t: u64,
) -> Result<Vec<CoefMono>> {
    match comodule {
        CobarComodule::Trivial => Ok(if t == 0 { vec![CoefMono::Unit] } else { vec![] }),
        CobarComodule::ExtendedDual => Ok(milnor_basis(p, t, coalgebra)?
            .into_iter()
            .map(CoefMono::Dual)
            .collect()),
        c => {
            let alg = c.thom_algebra().expect("remaining comodules are Thom");
            Ok(monomial_basis(p, alg, t)?
                .into_iter()
                .map(CoefMono::Thom)
                .collect())
        }
    }
}

fn cobar_basis_capped(
    p: Prime,
    coalgebra: Ambient,
    comodule: CobarComodule,
    s: u32,
    t: u64,
    cap: usize,
) -> Result<Vec<CobarTermKey>> {
    // Coalgebra monomial bases per positive degree, once.
    let mut slot_bases: Vec<Vec<MilnorMonomial>> = Vec::with_capacity(t as usize + 1);
    for d in 0..=t {
        slot_bases.push(if d == 0 {
            Vec::new()
        } else {
            milnor_basis(p, d, coalgebra)?
        });
    }
    let mut out = Vec::new();
    let mut bar: Vec<MilnorMonomial> = Vec::with_capacity(s as usize);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        p: Prime,
        coalgebra: Ambient,
        comodule: CobarComodule,
        (s, t): (u32, u64),
        slot_bases: &[Vec<MilnorMonomial>],
        slots_left: u32,
        remaining: u64,
        bar: &mut Vec<MilnorMonomial>,
        out: &mut Vec<CobarTermKey>,
        cap: usize,
    ) -> Result<()> {
        if slots_left == 0 {
            for coef in comodule_basis(p, coalgebra, comodule, remaining)? {
                if out.len() >= cap {
                    return Err(Error::ResourceLimit {
                        what: format!("cobar basis at s = {s}, t = {t}"),
                        got: out.len() + 1,
                        cap,
                    });
                }
                out.push(CobarTermKey {
                    bar: bar.clone(),
                    coef,
                });
            }
            return Ok(());
        }
        // Each remaining slot needs degree >= 1.
        for d in 1..=remaining.saturating_sub(slots_left as u64 - 1) {
            for m in &slot_bases[d as usize] {
                bar.push(m.clone());
                rec(
                    p,
                    coalgebra,
                    comodule,
                    (s, t),
                    slot_bases,
                    slots_left - 1,
                    remaining - d,
                    bar,
                    out,
                    cap,
                )?;
                bar.pop();
            }
        }
        Ok(())
    }
    rec(
        p,
        coalgebra,
        comodule,
        (s, t),
        &slot_bases,
        s,
        t,
        &mut bar,
        &mut out,
        cap,
    )?;
    out.sort();
    Ok(out)
}

/// The monomial basis of `C^s` in internal degree `t`.
pub fn cobar_basis(
    p: Prime,
    coalgebra: Ambient,
    comodule: CobarComodule,
    s: u32,
    t: u64,
) -> Result<Vec<CobarTermKey>> {
    cobar_basis_capped(p, coalgebra, comodule, s, t, DEFAULT_MAX_BASIS)
}

/// Dimensions of a bigraded F_p vector space: `(s, t) -> dim`, zeros
/// omitted.
pub type BigradedDims = BTreeMap<(u32, u64), u64>;

/// Sorted JSON array for a [`BigradedDims`].
pub fn dims_to_json(dims: &BigradedDims) -> Value {
    Value::Array(
        dims.iter()
            .filter(|(_, &d)| d > 0)
            .map(|(&(s, t), &d)| json!({ "dim": d, "s": s, "t": t }))
            .collect(),
    )
}

/// Resource limits for [`cotor_dims`].
#[derive(Debug, Clone, Copy)]
pub struct CotorLimits {
    /// Cap on the size of any single `(s, t)` cobar basis.
    pub max_basis: usize,
}

impl Default for CotorLimits {
    fn default() -> CotorLimits {
        CotorLimits { max_basis: 100_000 }
    }
}

/// `dim_{F_p} Cotor^{s,t}_Gamma(F_p, M)` for all `s <= s_max`, `t <= t_max`,
/// by ranks of the cobar differential: `dim ker d_s - rank d_{s-1}` in each
/// internal degree.
pub fn cotor_dims(
    p: Prime,
    coalgebra: Ambient,
    comodule: CobarComodule,
    s_max: u32,
    t_max: u64,
    limits: CotorLimits,
) -> Result<BigradedDims> {
    let mut dims = BigradedDims::new();
    for t in 0..=t_max {
        let mut bases: Vec<Vec<CobarTermKey>> = Vec::with_capacity(s_max as usize + 2);
        for s in 0..=s_max + 1 {
            bases.push(cobar_basis_capped(
                p,
                coalgebra,
                comodule,
                s,
                t,
                limits.max_basis,
            )?);
        }
        // ranks[s] = rank of d: C^{s,t} -> C^{s+1,t}.
        let mut ranks: Vec<usize> = Vec::with_capacity(s_max as usize + 1);
        for s in 0..=s_max {
            let source = &bases[s as usize];
            let target = &bases[s as usize + 1];
            let index: BTreeMap<&CobarTermKey, usize> =
                target.iter().enumerate().map(|(i, k)| (k, i)).collect();
            let mut matrix = crate::fp::FpMatrix::new(p, target.len(), source.len());
            for (j, key) in source.iter().enumerate() {
                let x = CobarElement::single(p, coalgebra, comodule, key.clone(), 1)?;
                for (k, &c) in cobar_d(&x)?.terms() {
                    let i = *index
                        .get(k)
                        .expect("differential image lies in the enumerated basis");
                    matrix.add_entry(i, j, c as i64);
                }
            }
            ranks.push(matrix.rank());
        }
        for s in 0..=s_max {
            let kernel = bases[s as usize].len() as i64 - ranks[s as usize] as i64;
            let image = if s == 0 {
                0
            } else {
                ranks[s as usize - 1] as i64
            };
            if kernel - image > 0 {
                dims.insert((s, t), (kernel - image) as u64);
            }
        }
    }
    Ok(dims)
}

/// The 1-cocycle `Q_t = -sum_{i=0}^{t} [chi(tau_i)] . xibar_{t-i}^(p^i)` in
/// `C^1(A; A' (x) PH)`, of internal degree `2 p^t - 1`.
pub fn class_q(p: Prime, t: u32) -> Result<CobarElement> {
    p.require_odd()?;
    let mut out = CobarElement::zero(p, Ambient::Full, CobarComodule::APrimeTensorPh, 1);
    for i in 0..=t {
        let chi_tau = antipode(&DualElement::single(
            p,
            Ambient::Full,
            MilnorMonomial::tau_gen(i),
            1,
        )?)?;
        let coef_poly = aprime_as_poly(
            &xibar(p, t - i).frobenius_pow(i),
            ThomAlgebra::APrimeTensorPh,
        )?;
        for (mu, &c1) in chi_tau.terms() {
            for (mono, &c2) in coef_poly.terms() {
                out.add_term(
                    CobarTermKey {
                        bar: vec![mu.clone()],
                        coef: CoefMono::Thom(mono.clone()),
                    },
                    -(p.mul(c1, c2) as i64),
                )?;
            }
        }
    }
    Ok(out)
}

/// Pushes a cobar element along a quotient of coalgebras, slot by slot
/// (bar entries that die in the quotient kill their term). For the
/// extended comodule the coefficient is projected as well; the other
/// comodules corestrict unchanged.
pub fn quotient_chain_map(x: &CobarElement, target: Ambient) -> Result<CobarElement> {
    let mut out = CobarElement::zero(x.p(), target, x.comodule(), x.s());
    'terms: for (key, &c) in x.terms() {
        for m in &key.bar {
            if !m.lives_in(target) {
                continue 'terms;
            }
        }
        if let CoefMono::Dual(m) = &key.coef {
            if !m.lives_in(target) {
                continue 'terms;
            }
        }
        out.add_term(key.clone(), c as i64)?;
    }
    Ok(out)
}

/// Result of [`change_of_rings_check`].
#[derive(Debug, Clone)]
pub struct ChangeOfRingsReport {
    pub p: u32,
    pub s_max: u32,
    pub t_max: u64,
    pub ok: bool,
    pub lhs: BigradedDims,
    pub rhs: BigradedDims,
    pub mismatches: Vec<(u32, u64, u64, u64)>,
}

impl ChangeOfRingsReport {
    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "s_max": self.s_max,
            "t_max": self.t_max,
            "ok": self.ok,
            "cotor_full_msu": dims_to_json(&self.lhs),
            "cotor_quotient_tensor_ph": dims_to_json(&self.rhs),
            "mismatches": self.mismatches.iter().map(|&(s, t, l, r)| json!({
                "s": s, "t": t, "lhs": l, "rhs": r,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Change of rings: `Cotor_A(F_p, H_*(MSU))` agrees with
/// `Cotor_{A//A'}(F_p, F_p) (x) PH`, comparing dimensions degreewise. The
/// left side is computed by the direct cobar complex over the whole dual
/// Steenrod algebra, the right side by the cobar complex over the quotient
/// convolved with the Poincare series of `PH`.
pub fn change_of_rings_check(
    p: Prime,
    s_max: u32,
    t_max: u64,
    limits: CotorLimits,
) -> Result<ChangeOfRingsReport> {
    p.require_odd()?;
    let lhs = cotor_dims(p, Ambient::Full, CobarComodule::Msu, s_max, t_max, limits)?;
    let quotient = cotor_dims(
        p,
        Ambient::AModAPrime,
        CobarComodule::Trivial,
        s_max,
        t_max,
        limits,
    )?;
    let mut ph_dims: Vec<u64> = Vec::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        ph_dims.push(monomial_basis(p, ThomAlgebra::PhMsu, t)?.len() as u64);
    }
    let mut rhs = BigradedDims::new();
    for (&(s, t1), &d1) in &quotient {
        for t2 in 0..=t_max - t1 {
            let d2 = ph_dims[t2 as usize];
            if d2 > 0 {
                *rhs.entry((s, t1 + t2)).or_insert(0) += d1 * d2;
            }
        }
    }
    rhs.retain(|_, d| *d > 0);
    let mut mismatches = Vec::new();
    for s in 0..=s_max {
        for t in 0..=t_max {
            let l = lhs.get(&(s, t)).copied().unwrap_or(0);
            let r = rhs.get(&(s, t)).copied().unwrap_or(0);
            if l != r {
                mismatches.push((s, t, l, r));
            }
        }
    }
    Ok(ChangeOfRingsReport {
        p: p.get(),
        s_max,
        t_max,
        ok: mismatches.is_empty(),
        lhs,
        rhs,
        mismatches,
    })
}
