//! Dirichlet characters addressed by Conrey labels `N:index`.
//!
//! A character is stored as one component per prime power p^e ∥ N. For odd p
//! the component is determined by its value e(a/φ(p^e)) on the smallest
//! primitive root g mod p²; for p = 2 it is determined by its values on −1 and
//! on 5. The Conrey index of a component is g^a, respectively ±5^b, and the
//! character value χ(m, n) is symmetric in the two arguments.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::arith::{crt, factorize, kronecker, pow_mod, primitive_root_p2, rational_mod, valuation};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Cyclo, CycloAccumulator, RootOfUnity};

fn dlog_table(p: u64, e: u32) -> Arc<Vec<u32>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<Vec<u32>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(p, e)) {
        return t.clone();
    }
    let q = p.pow(e);
    let mut table = vec![u32::MAX; q as usize];
    if p == 2 {
        // table[x] packs (eps, b) as 2b + eps for x = (−1)^eps 5^b
        let half = if e >= 3 { 1u64 << (e - 2) } else { 1 };
        let mut y = 1u64;
        for b in 0..half {
            table[y as usize] = (2 * b) as u32;
            table[((q - y) % q) as usize] = (2 * b + 1) as u32;
            y = y * 5 % q;
        }
        if e == 1 {
            table[1] = 0;
        }
    } else {
        let g = primitive_root_p2(p) % q;
        let phi = q / p * (p - 1);
        let mut y = 1u64;
        for a in 0..phi {
            table[y as usize] = a as u32;
            y = y * g % q;
        }
    }
    let arc = Arc::new(table);
    cache.lock().unwrap().insert((p, e), arc.clone());
    arc
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Kind {
    /// χ(g) = e(a/φ(p^e)).
    Odd { a: u64 },
    /// χ(−1) = (−1)^eps and χ(5) = e(b/2^{e−2}); b = 0 when e ≤ 2.
    Two { eps: u64, b: u64 },
}

/// The character of (Z/p^e)^× attached to one prime power of the modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    p: u64,
    e: u32,
    kind: Kind,
}

impl Component {
    fn trivial(p: u64, e: u32) -> Self {
        let kind = if p == 2 { Kind::Two { eps: 0, b: 0 } } else { Kind::Odd { a: 0 } };
        Component { p, e, kind }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.e
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.e)
    }

    fn phi(&self) -> u64 {
        self.modulus() / self.p * (self.p - 1)
    }

    fn two_half(&self) -> u64 {
        if self.e >= 3 {
            1 << (self.e - 2)
        } else {
            1
        }
    }

    fn from_residue(p: u64, e: u32, m: u64) -> Result<Self> {
        let q = p.pow(e);
        let log = dlog_table(p, e)[(m % q) as usize];
        if log == u32::MAX {
            return Err(Error::Label(format!("residue {m} is not a unit mod {q}")));
        }
        let kind = if p == 2 {
            Kind::Two { eps: u64::from(log & 1), b: u64::from(log >> 1) }
        } else {
            Kind::Odd { a: u64::from(log) }
        };
        Ok(Component { p, e, kind })
    }

    fn conrey_residue(&self) -> u64 {
        let q = self.modulus();
        match self.kind {
            Kind::Odd { a } => pow_mod(primitive_root_p2(self.p), a, q),
            Kind::Two { eps, b } => {
                let y = pow_mod(5, b, q);
                if eps == 1 {
                    (q - y) % q
                } else {
                    y % q
                }
            }
        }
    }

    /// Value at an integer; `None` when p divides it.
    pub fn value(&self, x: i64) -> Option<RootOfUnity> {
        let q = self.modulus();
        let r = x.rem_euclid(q as i64) as u64;
        let log = dlog_table(self.p, self.e)[r as usize];
        if log == u32::MAX {
            return None;
        }
        Some(match self.kind {
            Kind::Odd { a } => {
                let phi = self.phi();
                RootOfUnity::new(((a as u128 * log as u128) % phi as u128) as i64, phi)
            }
            Kind::Two { eps, b } => {
                let half = self.two_half();
                let (ex, bx) = (u64::from(log & 1), u64::from(log >> 1));
                let s = RootOfUnity::new((eps * ex) as i64, 2);
                s.mul(RootOfUnity::new(((b * bx) % half) as i64, half))
            }
        })
    }

    fn order(&self) -> u64 {
        match self.kind {
            Kind::Odd { a } => self.phi() / a.gcd(&self.phi()),
            Kind::Two { eps, b } => {
                let half = self.two_half();
                let ob = half / b.gcd(&half);
                ob.lcm(&(if eps == 1 { 2 } else { 1 }))
            }
        }
    }

    fn is_odd(&self) -> bool {
        match self.kind {
            Kind::Odd { a } => a % 2 == 1,
            Kind::Two { eps, .. } => eps == 1,
        }
    }

    fn conductor_exponent(&self) -> u32 {
        match self.kind {
            Kind::Odd { a } => {
                if a == 0 {
                    0
                } else {
                    let v = valuation(&BigRational::from_integer(BigInt::from(a)), self.p).map(|v| v.v).unwrap_or(0);
                    (self.e as i64 - v).max(1) as u32
                }
            }
            Kind::Two { eps, b } => {
                if b != 0 {
                    self.e - b.trailing_zeros()
                } else if eps == 1 {
                    2
                } else {
                    0
                }
            }
        }
    }

    fn restrict_to(&self, f: u32) -> Component {
        let kind = match self.kind {
            Kind::Odd { a } => Kind::Odd { a: if f == 0 { 0 } else { a / self.p.pow(self.e - f) } },
            Kind::Two { eps, b } => Kind::Two { eps: if f >= 2 { eps } else { 0 }, b: if f >= 3 { b >> (self.e - f) } else { 0 } },
        };
        Component { p: self.p, e: f, kind }
    }

    fn lift(&self, e: u32) -> Component {
        assert!(e >= self.e);
        let kind = match self.kind {
            Kind::Odd { a } => Kind::Odd { a: a * self.p.pow(e - self.e) },
            Kind::Two { eps, b } => Kind::Two { eps, b: if self.e >= 3 { b << (e - self.e) } else { 0 } },
        };
        Component { p: self.p, e, kind }
    }

    fn combine(&self, o: &Component, sa: u64, sb: u64) -> Component {
        debug_assert_eq!((self.p, self.e), (o.p, o.e));
        let kind = match (&self.kind, &o.kind) {
            (Kind::Odd { a: x }, Kind::Odd { a: y }) => Kind::Odd { a: (sa * x + sb * y) % self.phi() },
            (Kind::Two { eps: e1, b: b1 }, Kind::Two { eps: e2, b: b2 }) => {
                Kind::Two { eps: (sa * e1 + sb * e2) % 2, b: (sa * b1 + sb * b2) % self.two_half() }
            }
            _ => unreachable!("components of different primes"),
        };
        Component { p: self.p, e: self.e, kind }
    }

    fn conj(&self) -> Component {
        let kind = match self.kind {
            Kind::Odd { a } => Kind::Odd { a: (self.phi() - a) % self.phi() },
            Kind::Two { eps, b } => Kind::Two { eps, b: (self.two_half() - b) % self.two_half() },
        };
        Component { p: self.p, e: self.e, kind }
    }
}

/// A Dirichlet character modulo N.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    modulus: u64,
    comps: Vec<Component>,
}

impl DirichletCharacter {
    pub fn trivial(modulus: u64) -> Self {
        let comps = factorize(modulus).into_iter().map(|(p, e)| Component::trivial(p, e)).collect();
        DirichletCharacter { modulus, comps }
    }

    /// The character with Conrey label `modulus:index`.
    pub fn new(modulus: u64, index: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Label(format!("{modulus}:{index}")));
        }
        if modulus == 1 {
            return Ok(DirichletCharacter::trivial(1));
        }
        if index.gcd(&modulus) != 1 {
            return Err(Error::Label(format!("{modulus}:{index}")));
        }
        let comps = factorize(modulus)
            .into_iter()
            .map(|(p, e)| Component::from_residue(p, e, index))
            .collect::<Result<Vec<_>>>()?;
        Ok(DirichletCharacter { modulus, comps })
    }

    /// Parses a label of the form `N:index`.
    pub fn from_label(label: &str) -> Result<Self> {
        let bad = || Error::Label(label.to_string());
        let (n, i) = label.trim().split_once(':').ok_or_else(bad)?;
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let i: u64 = i.trim().parse().map_err(|_| bad())?;
        DirichletCharacter::new(n, i).map_err(|_| bad())
    }

    /// Builds the character mod `modulus` whose values are given by `f` on units.
    /// Fails if `f` is not a character of the stated modulus.
    pub fn from_fn(modulus: u64, f: impl Fn(i64) -> Option<RootOfUnity>) -> Result<Self> {
        let mut comps = Vec::new();
        for (p, e) in factorize(modulus) {
            let q = p.pow(e);
            let rest = modulus / q;
            let lift = |x: u64| crt(&[(x % q, q), (1 % rest, rest)]) as i64;
            let bad = || Error::domain(format!("values do not define a character mod {modulus}"));
            let kind = if p == 2 {
                let eps = if e >= 2 {
                    let v = f(lift(q - 1)).ok_or_else(bad)?;
                    match v.as_sign() {
                        Some(1) => 0,
                        Some(-1) => 1,
                        _ => return Err(bad()),
                    }
                } else {
                    0
                };
                let b = if e >= 3 {
                    let half = 1u64 << (e - 2);
                    let v = f(lift(5)).ok_or_else(bad)?;
                    if !half.is_multiple_of(v.den()) {
                        return Err(bad());
                    }
                    v.num() * (half / v.den())
                } else {
                    0
                };
                Kind::Two { eps, b }
            } else {
                let phi = q / p * (p - 1);
                let v = f(lift(primitive_root_p2(p))).ok_or_else(bad)?;
                if phi % v.den() != 0 {
                    return Err(bad());
                }
                Kind::Odd { a: v.num() * (phi / v.den()) }
            };
            comps.push(Component { p, e, kind });
        }
        Ok(DirichletCharacter { modulus, comps })
    }

    /// The Kronecker character χ_D as a character mod |D|.
    pub fn kronecker(d: i64) -> Result<Self> {
        if !crate::arith::is_fundamental_discriminant(d) {
            return Err(Error::domain(format!("{d} is not a fundamental discriminant")));
        }
        DirichletCharacter::from_fn(d.unsigned_abs(), |x| Some(RootOfUnity::from_sign(kronecker(d, x))))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn components(&self) -> &[Component] {
        &self.comps
    }

    pub fn component(&self, p: u64) -> Option<&Component> {
        self.comps.iter().find(|c| c.p == p)
    }

    /// Conrey index in [1, N], with 1 for the trivial character mod 1.
    pub fn index(&self) -> u64 {
        if self.modulus == 1 {
            return 1;
        }
        let residues: Vec<(u64, u64)> = self.comps.iter().map(|c| (c.conrey_residue(), c.modulus())).collect();
        crt(&residues)
    }

    pub fn label(&self) -> String {
        format!("{}:{}", self.modulus, self.index())
    }

    /// η(n) as a root of unity; `None` when gcd(n, N) > 1.
    pub fn eval(&self, n: i64) -> Option<RootOfUnity> {
        let mut acc = RootOfUnity::one();
        for c in &self.comps {
            acc = acc.mul(c.value(n)?);
        }
        Some(acc)
    }

    /// η(n) in a cyclotomic field, zero when gcd(n, N) > 1.
    pub fn evaluate(&self, n: i64) -> Cyclo {
        self.eval(n).map(RootOfUnity::to_cyclo).unwrap_or_else(Cyclo::zero)
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn order(&self) -> u64 {
        self.comps.iter().fold(1, |acc, c| acc.lcm(&c.order()))
    }

    /// Character values are real.
    pub fn is_quadratic(&self) -> bool {
        self.order() <= 2
    }

    /// 0 if η(−1) = 1, else 1.
    pub fn parity(&self) -> u8 {
        (self.comps.iter().filter(|c| c.is_odd()).count() % 2) as u8
    }

    pub fn conductor(&self) -> u64 {
        self.comps.iter().map(|c| c.p.pow(c.conductor_exponent())).product()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing this one, and the primes of N not dividing its conductor.
    pub fn primitive_core(&self) -> (DirichletCharacter, Vec<u64>) {
        let mut comps = Vec::new();
        let mut lost = Vec::new();
        for c in &self.comps {
            let f = c.conductor_exponent();
            if f == 0 {
                lost.push(c.p);
            } else {
                comps.push(c.restrict_to(f));
            }
        }
        let modulus = comps.iter().map(Component::modulus).product();
        (DirichletCharacter { modulus, comps }, lost)
    }

    /// The induced character modulo a multiple of N.
    pub fn lift_to(&self, modulus: u64) -> Result<Self> {
        if !modulus.is_multiple_of(self.modulus) {
            return Err(Error::domain(format!("{modulus} is not a multiple of {}", self.modulus)));
        }
        let comps = factorize(modulus)
            .into_iter()
            .map(|(p, e)| self.component(p).map(|c| c.lift(e)).unwrap_or_else(|| Component::trivial(p, e)))
            .collect();
        Ok(DirichletCharacter { modulus, comps })
    }

    fn combine(&self, o: &DirichletCharacter, sa: u64, sb: u64) -> DirichletCharacter {
        let m = self.modulus.lcm(&o.modulus);
        let a = self.lift_to(m).expect("lcm is a multiple");
        let b = o.lift_to(m).expect("lcm is a multiple");
        let comps = a.comps.iter().zip(&b.comps).map(|(x, y)| x.combine(y, sa, sb)).collect();
        DirichletCharacter { modulus: m, comps }
    }

    /// Pointwise product, as a character modulo lcm of the moduli.
    pub fn mul(&self, o: &DirichletCharacter) -> DirichletCharacter {
        self.combine(o, 1, 1)
    }

    pub fn square(&self) -> DirichletCharacter {
        self.combine(self, 1, 1)
    }

    pub fn conj(&self) -> DirichletCharacter {
        DirichletCharacter { modulus: self.modulus, comps: self.comps.iter().map(Component::conj).collect() }
    }

    /// G(η) = Σ_{a mod N} η(a) e(a/N), exactly.
    pub fn gauss_sum(&self) -> Cyclo {
        let l = self.modulus.lcm(&self.order());
        let mut acc = CycloAccumulator::new(l);
        for a in 0..self.modulus {
            if let Some(v) = self.eval(a as i64) {
                acc.add_root(v.mul(RootOfUnity::new(a as i64, self.modulus)), &BigRational::one());
            }
        }
        acc.finish()
    }

    /// G(η) in fixed point.
    pub fn gauss_sum_numeric(&self, bits: u32) -> Complex {
        let mut acc = Complex::zero(bits);
        for a in 0..self.modulus {
            if let Some(v) = self.eval(a as i64) {
                acc = &acc + &v.mul(RootOfUnity::new(a as i64, self.modulus)).to_complex(bits);
            }
        }
        acc
    }

    /// Local data of the idele class character at p; requires η primitive.
    pub fn local_component(&self, p: u64) -> Result<LocalCharacterData> {
        if !self.is_primitive() {
            return Err(Error::NotPrimitive { label: self.label(), conductor: self.conductor() });
        }
        if !crate::arith::is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        match self.component(p) {
            None => Ok(LocalCharacterData::unramified(p, self.eval(p as i64).expect("p does not divide N"))),
            Some(c) => {
                let mut at_p = RootOfUnity::one();
                for other in self.comps.iter().filter(|o| o.p != p) {
                    at_p = at_p.mul(other.value(p as i64).expect("p is a unit away from p"));
                }
                Ok(LocalCharacterData { p, n_p: c.e, value_at_p: at_p, unit: Some(c.conj()) })
            }
        }
    }

    /// The character x ↦ χ_D(x)η(x) modulo |D|·N with its primitive core and lost Euler primes.
    pub fn product_with_kronecker(&self, d: i64) -> Result<KroneckerTwist> {
        let chi_d = DirichletCharacter::kronecker(d)?;
        let modulus = d.unsigned_abs().checked_mul(self.modulus).ok_or(Error::Overflow("product_with_kronecker"))?;
        let a = chi_d.lift_to(modulus)?;
        let b = self.lift_to(modulus)?;
        let comps = a.comps.iter().zip(&b.comps).map(|(x, y)| x.combine(y, 1, 1)).collect();
        let character = DirichletCharacter { modulus, comps };
        let (primitive, lost_primes) = character.primitive_core();
        Ok(KroneckerTwist { character, primitive, lost_primes })
    }

    /// All primitive characters of conductor N, by increasing Conrey index.
    pub fn primitive_characters(modulus: u64) -> Vec<DirichletCharacter> {
        (1..=modulus.max(1))
            .filter(|i| i.gcd(&modulus) == 1 || modulus == 1)
            .filter_map(|i| DirichletCharacter::new(modulus, i).ok())
            .filter(DirichletCharacter::is_primitive)
            .collect()
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// χ_D·η as a possibly imprimitive character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KroneckerTwist {
    pub character: DirichletCharacter,
    pub primitive: DirichletCharacter,
    pub lost_primes: Vec<u64>,
}

/// The component χ_p at a finite prime of the idele class character attached to η.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCharacterData {
    pub p: u64,
    pub n_p: u32,
    pub value_at_p: RootOfUnity,
    unit: Option<Component>,
}

impl LocalCharacterData {
    pub fn unramified(p: u64, value_at_p: RootOfUnity) -> Self {
        LocalCharacterData { p, n_p: 0, value_at_p, unit: None }
    }

    /// The ramified character of Q_p^× that is the Legendre symbol on units, with χ(p) given.
    pub fn quadratic(p: u64, value_at_p: RootOfUnity) -> Self {
        assert!(p > 2, "the Legendre character needs an odd prime");
        let comp = Component { p, e: 1, kind: Kind::Odd { a: (p - 1) / 2 } };
        LocalCharacterData { p, n_p: 1, value_at_p, unit: Some(comp) }
    }

    /// A character of Q_p^× whose restriction to units factors through the given component's inverse.
    pub fn from_dirichlet_component(component: &Component, value_at_p: RootOfUnity) -> Self {
        let (comp, f) = (component.clone(), component.conductor_exponent());
        let unit = if f == 0 { None } else { Some(comp.restrict_to(f).conj()) };
        LocalCharacterData { p: component.p, n_p: f, value_at_p, unit }
    }

    pub fn unit_modulus(&self) -> u64 {
        self.p.pow(self.n_p)
    }

    /// χ_p(u) for a unit u, given by a residue modulo p^{n_p}.
    pub fn unit_value(&self, u: i64) -> RootOfUnity {
        match &self.unit {
            None => RootOfUnity::one(),
            Some(c) => c.value(u).expect("argument is a p-adic unit"),
        }
    }

    /// χ_p(x) for a nonzero rational x.
    pub fn chi(&self, x: &BigRational) -> Result<RootOfUnity> {
        let v = valuation(x, self.p)?.v;
        let u = x * crate::scalar::rat_pow(self.p, -v);
        let q = self.unit_modulus();
        let res = rational_mod(&u, q.max(1)).unwrap_or(0);
        let unit = if q == 1 { RootOfUnity::one() } else { self.unit_value(res as i64) };
        Ok(self.value_at_p.pow(v).mul(unit))
    }

    pub fn chi_int(&self, x: i64) -> Result<RootOfUnity> {
        self.chi(&BigRational::from_integer(BigInt::from(x)))
    }

    /// Order of the group generated by all values of χ_p on Q_p^×.
    pub fn value_order(&self) -> u64 {
        let u = self.unit.as_ref().map(Component::order).unwrap_or(1);
        u.lcm(&self.value_at_p.order())
    }

    pub fn unit_is_quadratic(&self) -> bool {
        self.unit.as_ref().map(|c| c.order() <= 2).unwrap_or(true)
    }

    /// χ_p takes only the values ±1.
    pub fn is_quadratic(&self) -> bool {
        self.value_order() <= 2
    }

    pub fn is_ramified(&self) -> bool {
        self.n_p > 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let triv = DirichletCharacter::trivial(1);
        assert_eq!(triv.eval(17), Some(RootOfUnity::one()));
        let eta3 = DirichletCharacter::from_label("3:2").unwrap();
        assert_eq!(eta3.eval(2), Some(RootOfUnity::minus_one()));
        let eta5 = DirichletCharacter::from_label("5:2").unwrap();
        assert_eq!(eta5.eval(2), Some(RootOfUnity::new(1, 4)));
        assert_eq!(eta5.eval(4), Some(RootOfUnity::minus_one()));
        assert_eq!(eta5.eval(10), None);
    }

    #[test]
    fn conductor_examples() {
        let t6 = DirichletCharacter::trivial(6);
        assert_eq!(t6.conductor(), 1);
        assert!(!t6.is_primitive());
        assert!(DirichletCharacter::from_label("3:2").unwrap().is_primitive());
        let induced = DirichletCharacter::from_label("3:2").unwrap().lift_to(9).unwrap();
        assert_eq!(induced.conductor(), 3);
        let (core, lost) = DirichletCharacter::from_label("12:5").unwrap().primitive_core();
        assert_eq!(core.modulus(), 3);
        assert_eq!(lost, vec![2]);
        assert_eq!(DirichletCharacter::from_label("8:3").unwrap().conductor(), 8);
        assert_eq!(DirichletCharacter::from_label("8:5").unwrap().conductor(), 8);
        assert_eq!(DirichletCharacter::from_label("16:9").unwrap().conductor(), 8);
    }

    #[test]
    fn parity_examples() {
        assert_eq!(DirichletCharacter::trivial(1).parity(), 0);
        assert_eq!(DirichletCharacter::from_label("4:3").unwrap().parity(), 1);
        assert_eq!(DirichletCharacter::from_label("5:2").unwrap().parity(), 1);
    }

    #[test]
    fn labels_round_trip() {
        for n in 1..60u64 {
            for i in 1..=n {
                if i.gcd(&n) == 1 || n == 1 {
                    let chi = DirichletCharacter::new(n, i).unwrap();
                    assert_eq!(chi.index(), if n == 1 { 1 } else { i });
                }
            }
        }
        assert!(DirichletCharacter::from_label("6:3").is_err());
        assert!(DirichletCharacter::from_label("x").is_err());
    }

    #[test]
    fn gauss_sum_examples() {
        assert_eq!(DirichletCharacter::trivial(1).gauss_sum(), Cyclo::one());
        let g = DirichletCharacter::from_label("3:2").unwrap().gauss_sum();
        let i_sqrt3 = &Cyclo::root(1, 4) * &Cyclo::sqrt_prime(3);
        assert_eq!(g, i_sqrt3);
    }

    #[test]
    fn local_component_examples() {
        let triv = DirichletCharacter::trivial(1);
        assert!(triv.local_component(5).unwrap().value_at_p.is_one());
        let eta = DirichletCharacter::from_label("5:2").unwrap();
        assert!(eta.local_component(5).unwrap().value_at_p.is_one());
        let eta4 = DirichletCharacter::from_label("4:3").unwrap();
        let eta3 = DirichletCharacter::from_label("3:2").unwrap();
        let eta12 = eta4.mul(&eta3);
        assert_eq!(eta12.modulus(), 12);
        let loc = eta12.local_component(3).unwrap();
        assert_eq!(loc.value_at_p, eta4.eval(3).unwrap());
        assert!(DirichletCharacter::trivial(6).local_component(3).is_err());
    }

    #[test]
    fn kronecker_products() {
        let triv = DirichletCharacter::trivial(1);
        let tw = triv.product_with_kronecker(1).unwrap();
        assert_eq!(tw.character.modulus(), 1);
        let tw = triv.product_with_kronecker(-4).unwrap();
        assert!(tw.character.is_primitive());
        assert_eq!(tw.character.eval(3), Some(RootOfUnity::minus_one()));
        let chi4 = DirichletCharacter::from_label("4:3").unwrap();
        let tw = chi4.product_with_kronecker(-4).unwrap();
        assert_eq!(tw.character.modulus(), 16);
        assert_eq!(tw.primitive.modulus(), 1);
        assert_eq!(tw.lost_primes, vec![2]);
        for d in [-3i64, -4, -7, -8, 5, 8, 12, -20, 21, -24] {
            let k = DirichletCharacter::kronecker(d).unwrap();
            assert!(k.is_primitive(), "D = {d}");
            for x in -40..40 {
                let want = kronecker(d, x);
                let got = k.eval(x).map(|r| r.as_sign().unwrap()).unwrap_or(0);
                assert_eq!(got, want, "D = {d}, x = {x}");
            }
        }
    }
}
