//! Text descriptors for groups, modules and setups.
//!
//! ```text
//! # comment
//! degree 4
//! gen (1 2)
//! gen (1 2 3 4)
//! prime 2
//! subgroup V4 (1 2)(3 4), (1 3)(2 4)
//! Y V4
//! orders 2 2
//! mat 0 1 1 0
//! mat 1 0 1 1
//! ```
//!
//! `mat` lines list one row-major matrix per `gen` line, in order. `Y` takes
//! either a subgroup label or a generator list.

use std::collections::BTreeMap;
use std::path::Path;

use crate::abelian::PAbelianGroup;
use crate::error::{Error, Result};
use crate::fusion::GeneralSetup;
use crate::group::{parse_generator_list, Group};
use crate::modaction::{Action, Matrix};
use crate::perm::Perm;

/// Default element cap for groups read from descriptors.
pub const DEFAULT_ORDER_CAP: usize = 1_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Descriptor {
    pub degree: usize,
    pub gens: Vec<Perm>,
    pub prime: Option<u64>,
    pub subgroups: BTreeMap<String, Vec<Perm>>,
    pub y: Option<String>,
    pub orders: Option<Vec<u64>>,
    pub mats: Vec<Vec<u64>>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn numbers(line: usize, rest: &str) -> Result<Vec<u64>> {
    rest.split_whitespace().map(|t| t.parse::<u64>().map_err(|_| perr(line, format!("bad integer {t:?}")))).collect()
}

impl Descriptor {
    pub fn parse(text: &str) -> Result<Descriptor> {
        let mut d = Descriptor::default();
        let mut degree = None;
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let need_degree = || degree.ok_or_else(|| perr(n, "degree must come first"));
            match word {
                "degree" => {
                    let v = rest.parse::<usize>().map_err(|_| perr(n, "bad degree"))?;
                    if v == 0 {
                        return Err(perr(n, "degree must be positive"));
                    }
                    degree = Some(v);
                    d.degree = v;
                }
                "gen" => {
                    let g = Perm::parse(need_degree()?, rest).map_err(|e| perr(n, e.to_string()))?;
                    d.gens.push(g);
                }
                "prime" => {
                    let p = rest.parse::<u64>().map_err(|_| perr(n, "bad prime"))?;
                    if p < 2 || (2..p).take_while(|q| q * q <= p).any(|q| p % q == 0) {
                        return Err(perr(n, format!("{p} is not prime")));
                    }
                    d.prime = Some(p);
                }
                "subgroup" => {
                    let (name, gens) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    if name.is_empty() {
                        return Err(perr(n, "subgroup needs a label"));
                    }
                    let gens = parse_generator_list(need_degree()?, gens).map_err(|e| perr(n, e.to_string()))?;
                    d.subgroups.insert(name.to_string(), gens);
                }
                "Y" => d.y = Some(rest.to_string()),
                "orders" => d.orders = Some(numbers(n, rest)?),
                "mat" => d.mats.push(numbers(n, rest)?),
                other => return Err(perr(n, format!("unknown keyword {other:?}"))),
            }
        }
        if degree.is_none() {
            return Err(perr(0, "missing degree line"));
        }
        Ok(d)
    }

    pub fn read(path: &Path) -> Result<Descriptor> {
        let text = std::fs::read_to_string(path).map_err(|e| perr(0, format!("{}: {e}", path.display())))?;
        Descriptor::parse(&text)
    }

    pub fn group(&self, cap: usize) -> Result<Group> {
        Group::generate_capped(self.degree, self.gens.clone(), cap)
    }

    /// Generators of a labelled subgroup, or of a literal generator list.
    pub fn subgroup_gens(&self, label: &str) -> Result<Vec<Perm>> {
        match self.subgroups.get(label) {
            Some(g) => Ok(g.clone()),
            None => parse_generator_list(self.degree, label)
                .map_err(|_| Error::precondition(format!("unknown subgroup label {label:?}"))),
        }
    }

    pub fn has_module(&self) -> bool {
        self.orders.is_some()
    }

    /// The module action given by `orders` and `mat` lines.
    pub fn action(&self, cap: usize) -> Result<Action> {
        let orders = self.orders.as_ref().ok_or_else(|| perr(0, "no orders line"))?;
        let p = self.prime.ok_or_else(|| perr(0, "module needs a prime line"))?;
        let module = PAbelianGroup::from_orders(p, orders)?;
        let r = module.rank();
        if self.mats.len() != self.gens.len() {
            return Err(perr(0, format!("{} mat lines for {} gen lines", self.mats.len(), self.gens.len())));
        }
        let mut pairs = Vec::new();
        for (g, flat) in self.gens.iter().zip(&self.mats) {
            if flat.len() != r * r {
                return Err(perr(0, format!("matrix has {} entries, expected {}", flat.len(), r * r)));
            }
            let m: Matrix = flat.chunks(r).map(|row| row.to_vec()).collect();
            pairs.push((g.clone(), m));
        }
        let group = self.group(cap)?;
        Action::from_generator_pairs(&group, module, pairs)
    }

    /// The general setup named by the `prime` and `Y` lines.
    pub fn setup(&self, cap: usize) -> Result<GeneralSetup> {
        let p = self.prime.ok_or_else(|| perr(0, "setup needs a prime line"))?;
        let label = self.y.as_ref().ok_or_else(|| perr(0, "setup needs a Y line"))?;
        let gamma = self.group(cap)?;
        let y = gamma.subgroup(self.subgroup_gens(label)?)?;
        GeneralSetup::new(&gamma, p, &y)
    }

    /// Renders the descriptor back to text.
    pub fn render(&self) -> String {
        let mut out = format!("degree {}\n", self.degree);
        for g in &self.gens {
            out.push_str(&format!("gen {g}\n"));
        }
        if let Some(p) = self.prime {
            out.push_str(&format!("prime {p}\n"));
        }
        for (name, gens) in &self.subgroups {
            let list: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
            out.push_str(&format!("subgroup {name} {}\n", list.join(", ")));
        }
        if let Some(y) = &self.y {
            out.push_str(&format!("Y {y}\n"));
        }
        if let Some(o) = &self.orders {
            let o: Vec<String> = o.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("orders {}\n", o.join(" ")));
        }
        for m in &self.mats {
            let m: Vec<String> = m.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("mat {}\n", m.join(" ")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S4: &str = "degree 4\ngen (1 2)\ngen (1 2 3 4)\nprime 2\nsubgroup V4 (1 2)(3 4), (1 3)(2 4)\nY V4\n";

    #[test]
    fn group_and_setup() {
        let d = Descriptor::parse(S4).unwrap();
        assert_eq!(d.group(100).unwrap().order(), 24);
        let s = d.setup(100).unwrap();
        assert_eq!(s.y.order(), 4);
        assert!(s.reduced);
        assert_eq!(Descriptor::parse(&d.render()).unwrap(), d);
    }

    #[test]
    fn module_lines() {
        let text = "degree 3\ngen (1 2)\ngen (1 2 3)\nprime 2\norders 2 2\nmat 1 0 1 1\nmat 0 1 1 1\n";
        let act = Descriptor::parse(text).unwrap().action(100).unwrap();
        assert!(act.is_faithful());
        assert_eq!(act.module().order(), 4);
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(Descriptor::parse("gen (1 2)"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Descriptor::parse("degree 2\nfoo 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Descriptor::parse("degree 2\ngen (1 3)"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Descriptor::parse("degree 2\nprime 4"), Err(Error::Parse { line: 2, .. })));
        let d = Descriptor::parse("degree 2\ngen (1 2)\nprime 2\norders 2\nmat 1 0\n").unwrap();
        assert!(d.action(10).is_err());
        let d = Descriptor::parse("degree 2\ngen (1 2)\nprime 2\norders 4\nmat 3\n").unwrap();
        assert!(d.action(10).unwrap().is_faithful());
    }
}
