//! Named groups, modules and setups used by the suites and the command line.

use crate::abelian::PAbelianGroup;
use crate::error::{Error, Result};
use crate::fusion::GeneralSetup;
use crate::group::Group;
use crate::modaction::{Action, Matrix};
use crate::offenders::{natural_matrix, natural_module_action, symmetric_group};
use crate::parse::{Descriptor, DEFAULT_ORDER_CAP};
use crate::perm::Perm;

/// Shipped descriptor files, by name.
pub const DATA_FILES: [(&str, &str); 5] = [
    ("a6", include_str!("../data/a6.grp")),
    ("s4", include_str!("../data/s4.grp")),
    ("s5-natural", include_str!("../data/s5-natural.mod")),
    ("sl32-natural", include_str!("../data/sl32-natural.mod")),
    ("s3xs5", include_str!("../data/s3xs5.mod")),
];

pub fn data_file(name: &str) -> Option<&'static str> {
    DATA_FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

fn group(degree: usize, gens: &[&str]) -> Group {
    Group::generate(degree, gens.iter().map(|s| Perm::parse(degree, s).expect("valid cycle")).collect())
        .expect("small group")
}

pub fn alternating6() -> Group {
    group(6, &["(1 2 3)", "(2 3 4 5 6)"])
}

pub fn symmetric4() -> Group {
    group(4, &["(1 2)", "(1 2 3 4)"])
}

/// The permutation matrix of `g` on `F_p^n`.
pub fn permutation_matrix(g: &Perm) -> Matrix {
    let n = g.degree();
    (0..n).map(|i| (0..n).map(|j| u64::from(g.apply(i) == j)).collect()).collect()
}

/// Permutation module of a permutation group over `Z/p`.
pub fn permutation_module(g: &Group, p: u64) -> Result<Action> {
    let mats = g.gens().iter().map(permutation_matrix).collect();
    Action::from_generator_matrices(g, PAbelianGroup::elementary(p, g.degree()), mats)
}

/// `S_m`, `m` even, on even subsets of `{1..m}` modulo the whole set, in the
/// basis `{i, m}` for `i < m - 1`.
pub fn natural_matrix_even(g: &Perm, m: usize) -> Matrix {
    let full = natural_matrix(g, m);
    let r = m - 2;
    // {m-1, m} is the sum of the other basis vectors modulo the whole set
    full[..r]
        .iter()
        .map(|row| (0..r).map(|j| (row[j] + row[r]) % 2).collect())
        .collect()
}

/// A group of `n x n` matrices over `F_p` as permutations of the nonzero
/// vectors, `v` numbered by `sum v_i p^i`.
pub fn linear_group(p: u64, n: usize, mats: &[Matrix]) -> Result<(Group, Vec<(Perm, Matrix)>)> {
    let count = (p as usize).pow(n as u32) - 1;
    let encode = |v: &[u64]| -> usize { v.iter().rev().fold(0, |acc, &x| acc * p as usize + x as usize) };
    let decode = |mut k: usize| -> Vec<u64> {
        (0..n)
            .map(|_| {
                let x = (k % p as usize) as u64;
                k /= p as usize;
                x
            })
            .collect()
    };
    let mut pairs = Vec::new();
    for m in mats {
        let images = (1..=count)
            .map(|k| {
                let v = decode(k);
                let w: Vec<u64> = (0..n).map(|j| (0..n).map(|i| v[i] * m[i][j]).sum::<u64>() % p).collect();
                (encode(&w) - 1) as u32
            })
            .collect();
        pairs.push((Perm::from_images(images)?, m.clone()));
    }
    let g = Group::generate(count, pairs.iter().map(|(g, _)| g.clone()).collect())?;
    Ok((g, pairs))
}

fn linear_action(p: u64, n: usize, mats: &[Matrix]) -> Result<Action> {
    let (g, pairs) = linear_group(p, n, mats)?;
    Action::from_generator_pairs(&g, PAbelianGroup::elementary(p, n), pairs)
}

pub fn sl32_natural() -> Result<Action> {
    linear_action(2, 3, &[vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]], vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]])
}

/// `F_{2^k}` elements `w^e` (or zero) as `k x k` matrices over `F_2` in the
/// basis `1, w, ..., w^{k-1}`, where `w^k` has coordinates `low`.
fn gf2_power(low: &[u64], e: Option<u32>) -> Matrix {
    let k = low.len();
    let Some(e) = e else { return vec![vec![0; k]; k] };
    let w: Matrix = (0..k)
        .map(|i| if i + 1 < k { (0..k).map(|j| u64::from(j == i + 1)).collect() } else { low.to_vec() })
        .collect();
    let mut m = identity(k);
    for _ in 0..e {
        m = m.iter().map(|row| (0..k).map(|j| (0..k).map(|l| row[l] * w[l][j]).sum::<u64>() % 2).collect()).collect();
    }
    m
}

/// `SL_2(2^k)` on `F_{2^k}^2` viewed over `F_2`.
fn sl2_even(low: &[u64]) -> Result<Action> {
    let k = low.len();
    let q1 = (1u32 << k) - 1;
    let block = |entries: [[Option<u32>; 2]; 2]| -> Matrix {
        let mut out = vec![vec![0u64; 2 * k]; 2 * k];
        for (bi, row) in entries.iter().enumerate() {
            for (bj, e) in row.iter().enumerate() {
                let m = gf2_power(low, *e);
                for i in 0..k {
                    out[bi * k + i][bj * k..(bj + 1) * k].copy_from_slice(&m[i]);
                }
            }
        }
        out
    };
    let (one, zero) = (Some(0), None);
    let mats = [
        block([[one, one], [zero, one]]),
        block([[one, zero], [one, one]]),
        block([[Some(1), zero], [zero, Some(q1 - 1)]]),
    ];
    linear_action(2, 2 * k, &mats)
}

fn block_diagonal(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![0u64; ra + rb]; ra + rb];
    for i in 0..ra {
        out[i][..ra].copy_from_slice(&a[i]);
    }
    for i in 0..rb {
        out[ra + i][ra..].copy_from_slice(&b[i]);
    }
    out
}

fn identity(r: usize) -> Matrix {
    (0..r).map(|i| (0..r).map(|j| u64::from(i == j)).collect()).collect()
}

/// `G × H` on `D ⊕ E`, each factor acting on its own summand; the groups
/// act on disjoint point sets.
pub fn direct_product(a: &Action, b: &Action) -> Result<Action> {
    let (da, db) = (a.module(), b.module());
    if da.prime() != db.prime() {
        return Err(Error::precondition("modules for different primes"));
    }
    let (na, nb) = (a.group().degree(), b.group().degree());
    let n = na + nb;
    let (ra, rb) = (da.rank(), db.rank());
    let mut pairs = Vec::new();
    for g in a.group().gens() {
        pairs.push((g.extend(n), block_diagonal(a.matrix(g), &identity(rb))));
    }
    for g in b.group().gens() {
        pairs.push((g.shifted(na, n), block_diagonal(&identity(ra), b.matrix(g))));
    }
    let mut exps = da.exps().to_vec();
    exps.extend_from_slice(db.exps());
    let module = PAbelianGroup::new(da.prime(), exps)?;
    let group = Group::generate(n, pairs.iter().map(|(g, _)| g.clone()).collect())?;
    Action::from_generator_pairs(&group, module, pairs)
}

/// The module of `act` with a trivial summand `Z/p^e` added.
pub fn plus_trivial(act: &Action, e: u32) -> Result<Action> {
    let d = act.module();
    let mut exps = d.exps().to_vec();
    exps.push(e);
    let pairs =
        act.group().gens().iter().map(|g| (g.clone(), block_diagonal(act.matrix(g), &identity(1)))).collect();
    Action::from_generator_pairs(act.group(), PAbelianGroup::new(d.prime(), exps)?, pairs)
}

fn module_from(g: &Group, p: u64, exps: Vec<u32>, mats: Vec<Matrix>) -> Result<Action> {
    Action::from_generator_matrices(g, PAbelianGroup::new(p, exps)?, mats)
}

/// Names accepted by [`module_instance`].
pub const MODULE_NAMES: [&str; 25] = [
    "s3-natural",
    "s5-natural",
    "s7-natural",
    "sl32-natural",
    "s3xs5",
    "s3-natural-plus-trivial",
    "s6-natural",
    "a5-natural",
    "s4-permutation",
    "s4-even-subsets",
    "c2-on-z4",
    "s3-on-z4-lattice",
    "d8-on-z4-square",
    "c3-jordan",
    "sl23-natural",
    "gl23-natural",
    "a4-permutation-f3",
    "s3-permutation-f3",
    "c3-on-z9",
    "sl24-natural",
    "sl28-natural",
    "sl25-natural",
    "gl25-natural",
    "sl27-natural",
    "sl33-natural",
];

/// A faithful named `(G, D)` instance.
pub fn module_instance(name: &str) -> Result<Action> {
    match name {
        "s3-natural" => natural_module_action(3),
        "s5-natural" => natural_module_action(5),
        "s7-natural" => natural_module_action(7),
        "sl32-natural" => sl32_natural(),
        "s3xs5" => direct_product(&natural_module_action(3)?, &natural_module_action(5)?),
        "s3-natural-plus-trivial" => plus_trivial(&natural_module_action(3)?, 1),
        "s6-natural" => {
            let g = symmetric_group(6)?;
            let mats = g.gens().iter().map(|x| natural_matrix_even(x, 6)).collect();
            module_from(&g, 2, vec![1; 4], mats)
        }
        "a5-natural" => {
            let g = group(5, &["(1 2 3)", "(1 2 3 4 5)"]);
            let mats = g.gens().iter().map(|x| natural_matrix(x, 5)).collect();
            module_from(&g, 2, vec![1; 4], mats)
        }
        "s4-permutation" => permutation_module(&symmetric4(), 2),
        "s4-even-subsets" => {
            let g = symmetric4();
            let full: Vec<Matrix> = g.gens().iter().map(|x| natural_matrix(x, 4)).collect();
            module_from(&g, 2, vec![1; 3], full)
        }
        "c2-on-z4" => module_from(&group(2, &["(1 2)"]), 2, vec![2], vec![vec![vec![3]]]),
        // S3 on the root lattice of type A2 modulo 4, basis e1 - e3, e2 - e3
        "s3-on-z4-lattice" => {
            let g = symmetric_group(3)?;
            let mats = g
                .gens()
                .iter()
                .map(|x| {
                    (0..2)
                        .map(|i| {
                            let mut v = [0i64; 3];
                            v[x.apply(i)] += 1;
                            v[x.apply(2)] -= 1;
                            v[..2].iter().map(|&c| c.rem_euclid(4) as u64).collect()
                        })
                        .collect()
                })
                .collect();
            module_from(&g, 2, vec![2, 2], mats)
        }
        // D8 on (Z/4)^2 by signed coordinate permutations
        "d8-on-z4-square" => {
            let g = group(4, &["(1 2 3 4)", "(1 3)"]);
            let rot = vec![vec![0, 1], vec![3, 0]];
            let refl = vec![vec![1, 0], vec![0, 3]];
            module_from(&g, 2, vec![2, 2], vec![rot, refl])
        }
        "c3-jordan" => module_from(&group(3, &["(1 2 3)"]), 3, vec![1, 1], vec![vec![vec![1, 1], vec![0, 1]]]),
        "sl23-natural" => linear_action(3, 2, &[vec![vec![1, 1], vec![0, 1]], vec![vec![1, 0], vec![1, 1]]]),
        "gl23-natural" => linear_action(3, 2, &[vec![vec![1, 1], vec![0, 1]], vec![vec![2, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]]),
        "a4-permutation-f3" => permutation_module(&group(4, &["(1 2 3)", "(1 2)(3 4)"]), 3),
        "s3-permutation-f3" => permutation_module(&symmetric_group(3)?, 3),
        "c3-on-z9" => module_from(&group(3, &["(1 2 3)"]), 3, vec![2], vec![vec![vec![4]]]),
        "sl24-natural" => sl2_even(&[1, 1]),
        "sl28-natural" => sl2_even(&[1, 1, 0]),
        "sl25-natural" => linear_action(5, 2, &[vec![vec![1, 1], vec![0, 1]], vec![vec![1, 0], vec![1, 1]]]),
        "gl25-natural" => linear_action(5, 2, &[vec![vec![1, 1], vec![0, 1]], vec![vec![1, 0], vec![1, 1]], vec![vec![2, 0], vec![0, 1]]]),
        "sl27-natural" => linear_action(7, 2, &[vec![vec![1, 1], vec![0, 1]], vec![vec![1, 0], vec![1, 1]]]),
        "sl33-natural" => linear_action(
            3,
            3,
            &[vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]], vec![vec![1, 0, 0], vec![1, 1, 0], vec![0, 0, 1]], vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]],
        ),
        other => Err(Error::precondition(format!("unknown module instance {other:?}"))),
    }
}

/// Names accepted by [`setup_instance`].
pub const SETUP_NAMES: [&str; 5] = ["s4", "c2wrs3", "asl23", "a6-v4a", "a6-v4b"];

/// `ASL_2(3)` on the nine points of `F_3^2`.
pub fn asl23() -> Result<(Group, Group)> {
    let pt = |x: u64, y: u64| (x + 3 * y) as u32;
    let perm = |f: &dyn Fn(u64, u64) -> (u64, u64)| -> Result<Perm> {
        let mut im = vec![0u32; 9];
        for x in 0..3 {
            for y in 0..3 {
                let (a, b) = f(x, y);
                im[pt(x, y) as usize] = pt(a % 3, b % 3);
            }
        }
        Perm::from_images(im)
    };
    let t1 = perm(&|x, y| (x + 1, y))?;
    let t2 = perm(&|x, y| (x, y + 1))?;
    let u = perm(&|x, y| (x + y, y))?;
    let l = perm(&|x, y| (x, x + y))?;
    let gamma = Group::generate(9, vec![t1.clone(), t2.clone(), u, l])?;
    let y = Group::generate(9, vec![t1, t2])?;
    Ok((gamma, y))
}

/// A named general setup `(Γ, S, Y)`.
pub fn setup_instance(name: &str) -> Result<GeneralSetup> {
    match name {
        "s4" => Descriptor::parse(data_file("s4").expect("shipped"))?.setup(DEFAULT_ORDER_CAP),
        "c2wrs3" => {
            let g = group(6, &["(1 2)", "(1 3 5)(2 4 6)", "(1 3)(2 4)"]);
            let y = group(6, &["(1 2)", "(3 4)", "(5 6)"]);
            GeneralSetup::new(&g, 2, &y)
        }
        "asl23" => {
            let (g, y) = asl23()?;
            GeneralSetup::new(&g, 3, &y)
        }
        "a6-v4a" | "a6-v4b" => {
            let y = if name == "a6-v4a" {
                group(6, &["(1 2)(3 4)", "(1 3)(2 4)"])
            } else {
                group(6, &["(1 2)(3 4)", "(1 2)(5 6)"])
            };
            let n = alternating6().normalizer(&y);
            GeneralSetup::new(&n, 2, &y)
        }
        other => Err(Error::precondition(format!("unknown setup instance {other:?}"))),
    }
}

/// The descriptor of a module instance, for writing data files.
pub fn describe(act: &Action) -> Descriptor {
    let d = act.module();
    let g = act.group();
    Descriptor {
        degree: g.degree(),
        gens: g.gens().to_vec(),
        prime: Some(d.prime()),
        orders: Some(d.orders()),
        mats: g.gens().iter().map(|x| act.matrix(x).iter().flatten().copied().collect()).collect(),
        ..Descriptor::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modules_are_faithful() {
        for name in MODULE_NAMES {
            let act = module_instance(name).unwrap();
            assert!(act.is_faithful(), "{name}");
        }
    }

    #[test]
    fn orders() {
        let cases = [("s6-natural", 720, 16u128), ("a5-natural", 60, 16), ("sl23-natural", 24, 9), ("gl23-natural", 48, 9), ("s3xs5", 720, 64), ("sl24-natural", 60, 16), ("sl28-natural", 504, 64), ("sl25-natural", 120, 25), ("gl25-natural", 480, 25), ("sl27-natural", 336, 49), ("sl33-natural", 5616, 27)];
        for (name, g, d) in cases {
            let act = module_instance(name).unwrap();
            assert_eq!((act.group().order(), act.module().order()), (g, d), "{name}");
        }
        assert_eq!(sl32_natural().unwrap().group().order(), 168);
    }

    /// Module data files are the rendered builders; `FUSIONLIM_REGEN=1`
    /// rewrites them.
    #[test]
    fn data_files_match_builders() {
        for name in ["s5-natural", "sl32-natural", "s3xs5"] {
            let text = describe(&module_instance(name).unwrap()).render();
            if std::env::var_os("FUSIONLIM_REGEN").is_some() {
                let path = format!("{}/data/{name}.mod", env!("CARGO_MANIFEST_DIR"));
                std::fs::write(path, &text).unwrap();
                continue;
            }
            assert_eq!(data_file(name).unwrap(), text, "{name}");
            let act = Descriptor::parse(&text).unwrap().action(DEFAULT_ORDER_CAP).unwrap();
            assert_eq!(act.group().order(), module_instance(name).unwrap().group().order());
        }
        let a6 = Descriptor::parse(data_file("a6").unwrap()).unwrap();
        assert_eq!(a6.group(DEFAULT_ORDER_CAP).unwrap(), alternating6());
        assert_eq!(a6.subgroups.len(), 2);
    }

    #[test]
    fn setups() {
        for name in SETUP_NAMES {
            let s = setup_instance(name).unwrap();
            assert!(s.y.is_normal_in(&s.gamma), "{name}");
        }
        assert_eq!(setup_instance("asl23").unwrap().gamma.order(), 216);
        assert_eq!(setup_instance("a6-v4a").unwrap().gamma.order(), 24);
        assert_eq!(setup_instance("a6-v4b").unwrap().gamma.order(), 24);
        assert_eq!(setup_instance("c2wrs3").unwrap().gamma.order(), 48);
    }
}
