//! Named builtin groups and the `wr_imp(..)` / `wr_prod(..)` combinators.
//!
//! Grammar:
//!
//! ```text
//! spec := name ":" int | "wr_imp(" spec "," spec ")" | "wr_prod(" spec "," spec ")"
//! name := sym | alt | cyc | trivial | agl1 | agammal1 | agl2
//! ```
//!
//! `wr_imp(B, A)` is `B wr A` with `B` the bottom group.

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;
use crate::structure::{wreath_imprimitive, wreath_product_action, WreathStructure};

/// A parsed group together with any wreath structure it was built with.
#[derive(Clone, Debug)]
pub struct Registered {
    pub name: String,
    pub group: PermGroup,
    pub structure: Option<WreathStructure>,
}

pub fn lookup(spec: &str) -> Result<Registered> {
    let spec = spec.trim();
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let mut parser = Parser {
        src: compact.as_bytes(),
        pos: 0,
    };
    let reg = parser.spec()?;
    if parser.pos != parser.src.len() {
        return Err(Error::Parse(format!("trailing input in {spec:?}")));
    }
    Ok(reg)
}

pub fn group(spec: &str) -> Result<PermGroup> {
    lookup(spec).map(|r| r.group)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn eat(&mut self, token: &str) -> bool {
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected {token:?} at offset {} in {:?}",
                self.pos,
                String::from_utf8_lossy(self.src)
            )))
        }
    }

    fn spec(&mut self) -> Result<Registered> {
        for (kw, imprimitive) in [("wr_imp(", true), ("wr_prod(", false)] {
            if self.eat(kw) {
                let bottom = self.spec()?;
                self.expect(",")?;
                let top = self.spec()?;
                self.expect(")")?;
                let ws = if imprimitive {
                    wreath_imprimitive(&bottom.group, &top.group)?
                } else {
                    wreath_product_action(&bottom.group, &top.group)?
                };
                let ws = ws.with_substructures(bottom.structure, top.structure);
                return Ok(Registered {
                    name: format!(
                        "{}({},{})",
                        if imprimitive { "wr_imp" } else { "wr_prod" },
                        bottom.name,
                        top.name
                    ),
                    group: ws.ambient.clone(),
                    structure: Some(ws),
                });
            }
        }
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        self.expect(":")?;
        let nstart = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let n: usize = std::str::from_utf8(&self.src[nstart..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse(format!("missing size after {name}:")))?;
        let group = named(&name, n)?;
        Ok(Registered {
            name: format!("{name}:{n}"),
            group,
            structure: None,
        })
    }
}

fn named(name: &str, n: usize) -> Result<PermGroup> {
    if n > crate::MAX_DEGREE {
        return Err(Error::DegreeCap(n));
    }
    match name {
        "sym" => Ok(symmetric(n)),
        "alt" => Ok(alternating(n)),
        "cyc" => Ok(cyclic(n)),
        "trivial" => Ok(PermGroup::trivial(n)),
        "agl1" => match n {
            5 | 7 => Ok(affine_line_prime(n)),
            8 => Ok(affine_line_8(false)),
            _ => Err(Error::Parse(format!("agl1:{n} is not available (use 5, 7 or 8)"))),
        },
        "agammal1" if n == 8 => Ok(affine_line_8(true)),
        "agl2" if n == 3 => Ok(agl2_3()),
        _ => Err(Error::Parse(format!("unknown builtin {name}:{n}"))),
    }
}

fn cycle(n: usize, points: impl IntoIterator<Item = usize>) -> Permutation {
    let pts: Vec<usize> = points.into_iter().collect();
    Permutation::from_cycles(n, &[&pts]).expect("valid cycle")
}

pub fn symmetric(n: usize) -> PermGroup {
    if n < 2 {
        return PermGroup::trivial(n);
    }
    PermGroup::new(n, vec![cycle(n, [0, 1]), cycle(n, 0..n)]).unwrap()
}

pub fn alternating(n: usize) -> PermGroup {
    if n < 3 {
        return PermGroup::trivial(n);
    }
    let long = if n % 2 == 1 { cycle(n, 0..n) } else { cycle(n, 1..n) };
    PermGroup::new(n, vec![cycle(n, [0, 1, 2]), long]).unwrap()
}

pub fn cyclic(n: usize) -> PermGroup {
    if n < 2 {
        return PermGroup::trivial(n);
    }
    PermGroup::new(n, vec![cycle(n, 0..n)]).unwrap()
}

fn from_map(n: usize, f: impl Fn(usize) -> usize) -> Permutation {
    Permutation::from_images(&(0..n).map(f).collect::<Vec<_>>()).expect("bijective map")
}

/// `x -> a x + b` over `Z/p`.
fn affine_line_prime(p: usize) -> PermGroup {
    let root = (2..p)
        .find(|&a| (1..p - 1).all(|e| pow_mod(a, e, p) != 1))
        .expect("primitive root");
    PermGroup::new(p, vec![from_map(p, |x| (x + 1) % p), from_map(p, |x| (root * x) % p)]).unwrap()
}

fn pow_mod(a: usize, e: usize, p: usize) -> usize {
    (0..e).fold(1, |acc, _| acc * a % p)
}

/// Multiplication in GF(8) = GF(2)[t]/(t^3 + t + 1), elements as 3-bit masks.
pub(crate) fn gf8_mul(a: usize, b: usize) -> usize {
    let mut r = 0;
    for i in 0..3 {
        if b >> i & 1 == 1 {
            r ^= a << i;
        }
    }
    for bit in [4, 3] {
        if r >> bit & 1 == 1 {
            r ^= 0b1011 << (bit - 3);
        }
    }
    r
}

/// AGL_1(8), or AΓL_1(8) when `frobenius` is set.
fn affine_line_8(frobenius: bool) -> PermGroup {
    let mut gens = vec![from_map(8, |x| x ^ 1), from_map(8, |x| gf8_mul(2, x))];
    if frobenius {
        gens.push(from_map(8, |x| gf8_mul(x, x)));
    }
    PermGroup::new(8, gens).unwrap()
}

/// AGL_2(3) on vectors `(a, b) -> a + 3b`.
fn agl2_3() -> PermGroup {
    let enc = |a: usize, b: usize| a % 3 + 3 * (b % 3);
    let lin = |m: [[usize; 2]; 2]| {
        from_map(9, move |x| {
            let (a, b) = (x % 3, x / 3);
            enc(m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b)
        })
    };
    PermGroup::new(
        9,
        vec![
            from_map(9, |x| enc(x % 3 + 1, x / 3)),
            lin([[1, 1], [0, 1]]),
            lin([[0, 1], [1, 0]]),
            lin([[2, 0], [0, 1]]),
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::WreathFlavor;
    use num_bigint::BigUint;

    fn order(spec: &str) -> BigUint {
        group(spec).unwrap().order()
    }

    #[test]
    fn builtin_orders() {
        assert_eq!(order("sym:5"), BigUint::from(120u32));
        assert_eq!(order("alt:5"), BigUint::from(60u32));
        assert_eq!(order("alt:6"), BigUint::from(360u32));
        assert_eq!(order("cyc:6"), BigUint::from(6u32));
        assert_eq!(order("trivial:4"), BigUint::from(1u32));
        assert_eq!(order("agl1:5"), BigUint::from(20u32));
        assert_eq!(order("agl1:7"), BigUint::from(42u32));
        assert_eq!(order("agl1:8"), BigUint::from(56u32));
        assert_eq!(order("agammal1:8"), BigUint::from(168u32));
        assert_eq!(order("agl2:3"), BigUint::from(432u32));
    }

    #[test]
    fn gf8_is_a_field() {
        for a in 1..8 {
            assert_eq!((1..8).filter(|&b| gf8_mul(a, b) == 1).count(), 1);
        }
        let mut x = 1;
        let mut powers = vec![];
        for _ in 0..7 {
            powers.push(x);
            x = gf8_mul(x, 2);
        }
        powers.sort();
        assert_eq!(powers, (1..8).collect::<Vec<_>>());
    }

    #[test]
    fn wreath_specs() {
        let r = lookup("wr_imp(sym:4, sym:4)").unwrap();
        assert_eq!(r.group.degree(), 16);
        assert_eq!(r.group.order(), BigUint::from(7_962_624u32));
        let ws = r.structure.unwrap();
        assert_eq!(ws.flavor, WreathFlavor::Imprimitive);
        let p = lookup("wr_prod(sym:3,sym:2)").unwrap();
        assert_eq!(p.group.degree(), 9);
        assert_eq!(p.group.order(), BigUint::from(72u32));
        let nested = lookup("wr_imp(wr_imp(sym:2,sym:2),sym:2)").unwrap();
        assert_eq!(nested.group.degree(), 8);
        assert!(nested.structure.unwrap().bottom_structure.is_some());
    }

    #[test]
    fn parse_errors() {
        assert!(lookup("sym").is_err());
        assert!(lookup("foo:3").is_err());
        assert!(lookup("agl1:6").is_err());
        assert!(lookup("wr_imp(sym:2,sym:2").is_err());
        assert!(lookup("sym:3)").is_err());
        assert_eq!(lookup("sym:300").unwrap_err(), Error::DegreeCap(300));
        assert_eq!(lookup("wr_prod(sym:5,sym:4)").unwrap_err(), Error::DegreeCap(625));
    }
}
