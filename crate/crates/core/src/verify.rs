//! Exact and numeric verifiers.
//!
//! Exact checks work over the integers or the integer group ring and are
//! authoritative. Numeric checks work on evaluated complex matrices at an
//! absolute tolerance of [`TOL`] and corroborate them.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{BibdParams, BrouwerGeometry};
use crate::gf::FiniteField;
use crate::groupring::{characters_of, AbelianGroup, C64};
use crate::polymat::{ComplexMatrix, GroupRingMatrix, IncidenceMatrix, PolyphaseMatrix};

/// Absolute tolerance for every numeric comparison.
pub const TOL: f64 = 1e-9;
/// Relative singular value threshold for numeric rank.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("column {0} is zero")]
    ZeroColumn(usize),
    #[error("need 2 <= kmin <= kmax <= 20, got kmin={kmin}, kmax={kmax}")]
    Range { kmin: u64, kmax: u64 },
    #[error("vertex {0} is not in the geometry")]
    NotAVertex(usize),
}

/// One named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            witness: None,
            residual: None,
            detail: None,
        }
    }

    pub fn fail_at(
        name: impl Into<String>,
        witness: Vec<usize>,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: false,
            witness: Some(witness),
            residual: None,
            detail: Some(detail.into()),
        }
    }

    /// Pass iff `residual <= tol`.
    pub fn numeric(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: residual <= tol,
            witness: None,
            residual: Some(residual),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_witness(mut self, witness: Vec<usize>) -> Self {
        self.witness = Some(witness);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub overall: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            overall: true,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.overall &= check.passed;
        self.checks.push(check);
    }

    /// Appends the other report's checks, prefixed by its subject.
    pub fn absorb(&mut self, other: VerificationReport) {
        for mut c in other.checks {
            c.name = format!("{}: {}", other.subject, c.name);
            self.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.overall
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {}",
            self.subject,
            if self.overall { "PASS" } else { "FAIL" }
        )?;
        for c in &self.checks {
            write!(f, "  {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name)?;
            if let Some(w) = &c.witness {
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, " at ({})", parts.join(","))?;
            }
            if let Some(r) = c.residual {
                write!(f, " residual {r:.3e}")?;
            }
            if let Some(d) = &c.detail {
                write!(f, ": {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn count_check(name: &str, sums: &[usize], want: usize) -> Check {
    match sums.iter().position(|&s| s != want) {
        None => Check::pass(format!("{name} = {want}")),
        Some(i) => Check::fail_at(
            format!("{name} = {want}"),
            vec![i],
            format!("found {}", sums[i]),
        ),
    }
}

/// `pair_block[a * v + b]` is the unique row containing points `a != b`.
fn pair_blocks(x: &IncidenceMatrix) -> Vec<usize> {
    let v = x.cols();
    let mut table = vec![usize::MAX; v * v];
    for i in 0..x.rows() {
        let row = x.row(i);
        for &a in row {
            for &b in row {
                table[a * v + b] = i;
            }
        }
    }
    table
}

/// BIBD(v, k, 1) axioms for a block-by-point incidence matrix.
pub fn verify_bibd(x: &IncidenceMatrix, v: usize, k: usize) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("BIBD({v},{k},1)"));
    if k < 2
        || v <= k
        || !(v - 1).is_multiple_of(k - 1)
        || !(v * ((v - 1) / (k - 1))).is_multiple_of(k)
    {
        rep.push(Check::fail_at(
            "parameters",
            vec![v, k],
            "need v > k >= 2 with integral r and b",
        ));
        return rep;
    }
    let r = (v - 1) / (k - 1);
    let b = v * r / k;
    if x.cols() != v || x.rows() != b {
        rep.push(Check::fail_at(
            "shape",
            vec![x.rows(), x.cols()],
            format!("expected {b}x{v}"),
        ));
        return rep;
    }
    rep.push(count_check("row sums", &x.row_sums(), k));
    rep.push(count_check("column sums", &x.col_sums(), r));
    let xtx = x.transpose().matmul(x).expect("shapes agree");
    let bad = (0..v)
        .flat_map(|a| (0..v).map(move |c| (a, c)))
        .find(|&(a, c)| xtx.get(a, c) != if a == c { r as i64 } else { 1 });
    rep.push(match bad {
        None => Check::pass("X^T X = (r-1)I + J"),
        Some((a, c)) => Check::fail_at(
            "X^T X = (r-1)I + J",
            vec![a, c],
            format!("columns meet in {} rows", xtx.get(a, c)),
        ),
    });
    rep.push(if b >= v {
        Check::pass("b >= v")
    } else {
        Check::fail_at("b >= v", vec![b, v], "Fisher inequality fails")
    });
    rep
}

/// BIBD check plus `f | k`, shared by both polyphase verifiers.
fn polyphase_preconditions(
    m: &PolyphaseMatrix,
    rep: &mut VerificationReport,
) -> Option<(IncidenceMatrix, usize, usize)> {
    let x = m.modulus_squared();
    let Some(k) = x.row_sums().first().copied() else {
        rep.push(Check::fail_at("nonempty", vec![0, 0], "matrix has no rows"));
        return None;
    };
    let bibd = verify_bibd(&x, m.cols(), k);
    let ok = bibd.passed();
    rep.absorb(bibd);
    if !ok {
        return None;
    }
    let f = m.group().order();
    if k % f != 0 {
        rep.push(Check::fail_at(
            "f divides k",
            vec![f, k],
            "group order does not divide block size",
        ));
        return None;
    }
    rep.push(Check::pass("f divides k"));
    let r = (m.cols() - 1) / (k - 1);
    Some((x, k, r))
}

/// Exact integer check that for every zero entry `(i, j)` the `k` triple
/// products `Phi(i,j') conj(Phi(i',j')) Phi(i',j)` hit each group element
/// exactly `k/f` times, where `i'` is the block through `j` and `j'`.
pub fn verify_polyphase_combinatorial(m: &PolyphaseMatrix) -> VerificationReport {
    let mut rep = VerificationReport::new("polyphase combinatorial");
    let Some((x, k, _)) = polyphase_preconditions(m, &mut rep) else {
        return rep;
    };
    let group = m.group();
    let f = group.order();
    let v = m.cols();
    let mult = k / f;
    let blocks = pair_blocks(&x);
    let failure = (0..m.rows()).into_par_iter().find_map_first(|i| {
        let mut counts = vec![0usize; f];
        for j in 0..v {
            if m.get(i, j).is_some() {
                continue;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            for (jp, g) in m.row_support(i) {
                let ip = blocks[j * v + jp];
                let a = m.get(ip, jp).expect("block contains its points");
                let c = m.get(ip, j).expect("block contains its points");
                counts[group.add(group.sub(g, a), c)] += 1;
            }
            if let Some(g) = counts.iter().position(|&c| c != mult) {
                return Some((i, j, g, counts[g]));
            }
        }
        None
    });
    rep.push(match failure {
        None => Check::pass(format!("triple products uniform with multiplicity {mult}")),
        Some((i, j, g, c)) => Check::fail_at(
            format!("triple products uniform with multiplicity {mult}"),
            vec![i, j],
            format!("z^({}) occurs {c} times", fmt_tuple(&group.decode(g))),
        ),
    });
    rep
}

fn fmt_tuple(t: &[usize]) -> String {
    t.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Exact group-ring check of
/// `Phi Phi* Phi = (r+k-1) Phi + (k/f) 1(z) (J - X)`.
pub fn verify_polyphase_algebraic(m: &PolyphaseMatrix) -> VerificationReport {
    let mut rep = VerificationReport::new("polyphase algebraic");
    let Some((_, k, r)) = polyphase_preconditions(m, &mut rep) else {
        return rep;
    };
    let f = m.group().order();
    let phi = m.to_group_ring();
    let gram = m
        .adjoint()
        .to_group_ring()
        .matmul(&phi)
        .expect("shapes agree");
    let lhs = phi.matmul(&gram).expect("shapes agree");
    let a = (r + k - 1) as i64;
    let fill = (k / f) as i64;
    let mut worst: Option<(usize, usize, i64)> = None;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let got = lhs.coeffs(i, j);
            let dev = match m.get(i, j) {
                Some(g) => (0..f)
                    .map(|h| (got[h] - if h == g { a } else { 0 }).abs())
                    .max(),
                None => got.iter().map(|&c| (c - fill).abs()).max(),
            }
            .unwrap_or(0);
            if dev != 0 && worst.is_none_or(|w| dev > w.2) {
                worst = Some((i, j, dev));
            }
        }
    }
    let name = format!("Phi Phi* Phi = {a} Phi + {fill} 1(z)(J - X)");
    rep.push(match worst {
        None => Check {
            residual: Some(0.0),
            ..Check::pass(name)
        },
        Some((i, j, dev)) => Check {
            residual: Some(dev as f64),
            ..Check::fail_at(name, vec![i, j], format!("entry is {}", lhs.get(i, j)))
        },
    });
    rep
}

/// Frame constants measured from an evaluated matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtfNumerics {
    pub n: usize,
    pub d: usize,
    /// Common squared column norm.
    pub r: f64,
    /// Mean off-diagonal Gram modulus.
    pub w: f64,
    /// Tight-frame constant `rn/d`.
    pub a: f64,
    pub welch: f64,
    pub coherence: f64,
    /// Coefficient of `S` in `S^2 = delta S + (n-1) I`; absent when `w = 0`.
    pub delta: Option<f64>,
}

/// `d = n/2 (1 - delta / sqrt(delta^2 + 4(n-1)))`.
pub fn dimension_from_signature(delta: f64, n: usize) -> f64 {
    let n = n as f64;
    n / 2.0 * (1.0 - delta / (delta * delta + 4.0 * (n - 1.0)).sqrt())
}

/// `max |S^2 - delta S - (n-1) I|`.
pub fn signature_residual(s: &ComplexMatrix, delta: f64) -> f64 {
    let n = s.rows();
    let sq = &s.0 * &s.0;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let want = s.get(i, j) * delta
                + if i == j {
                    C64::new(n as f64 - 1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
            worst = worst.max((sq[(i, j)] - want).norm());
        }
    }
    worst
}

pub fn numeric_rank(m: &ComplexMatrix) -> usize {
    let s = m.singular_values();
    let Some(&top) = s.first() else {
        return 0;
    };
    s.iter().filter(|&&x| x > RANK_TOL * top).count()
}

/// Numeric ETF checks on the columns of `phi`.
pub fn verify_etf_numeric(
    phi: &ComplexMatrix,
) -> Result<(VerificationReport, EtfNumerics), VerifyError> {
    let n = phi.cols();
    let gram = phi.gram();
    let norms: Vec<f64> = (0..n).map(|j| gram.get(j, j).re).collect();
    if let Some(j) = norms.iter().position(|&x| x <= TOL) {
        return Err(VerifyError::ZeroColumn(j));
    }
    let mut rep = VerificationReport::new(format!("ETF numerics ({}x{n})", phi.rows()));
    let r = norms.iter().sum::<f64>() / n as f64;
    rep.push(Check::numeric(
        "equal norms",
        norms.iter().map(|x| (x - r).abs()).fold(0.0, f64::max),
        TOL,
    ));

    let off: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| gram.get(i, j).norm())
        .collect();
    let w = if off.is_empty() {
        0.0
    } else {
        off.iter().sum::<f64>() / off.len() as f64
    };
    rep.push(Check::numeric(
        "equiangular",
        off.iter().map(|x| (x - w).abs()).fold(0.0, f64::max),
        TOL,
    ));

    let d = numeric_rank(phi);
    let a = r * n as f64 / d as f64;
    let g2 = &gram.0 * &gram.0;
    let tight = g2
        .iter()
        .zip(gram.0.iter())
        .map(|(x, y)| (x - y * a).norm())
        .fold(0.0, f64::max);
    rep.push(Check::numeric(
        format!("(G)^2 = aG with a = rn/d = {a:.6}"),
        tight,
        TOL,
    ));

    let welch = if n > 1 {
        ((n - d) as f64 / (d as f64 * (n - 1) as f64)).sqrt()
    } else {
        0.0
    };
    let coherence = w / r;
    rep.push(Check::numeric(
        "coherence meets Welch bound",
        (coherence - welch).abs(),
        TOL,
    ));

    let delta = if w > TOL {
        let delta = (a - 2.0 * r) / w;
        let mut s = gram.clone();
        for i in 0..n {
            s.0[(i, i)] -= C64::new(r, 0.0);
        }
        s.0 /= C64::new(w, 0.0);
        rep.push(Check::numeric(
            format!("S^2 = delta S + (n-1)I with delta = {delta:.6}"),
            signature_residual(&s, delta),
            TOL,
        ));
        rep.push(Check::numeric(
            "dimension from signature",
            (dimension_from_signature(delta, n) - d as f64).abs(),
            TOL,
        ));
        Some(delta)
    } else {
        rep.push(Check::pass("signature equation").with_detail("vacuous: columns are orthogonal"));
        None
    };

    Ok((
        rep,
        EtfNumerics {
            n,
            d,
            r,
            w,
            a,
            welch,
            coherence,
            delta,
        },
    ))
}

/// Axioms of a GQ(s, t) for a block-by-vertex incidence matrix.
/// With `check_spread`, the first `st+1` rows must be `I (x) 1^T`.
pub fn verify_gq_axioms(
    z: &IncidenceMatrix,
    s: usize,
    t: usize,
    check_spread: bool,
) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("GQ({s},{t})"));
    let (nb, nv) = ((t + 1) * (s * t + 1), (s + 1) * (s * t + 1));
    if (z.rows(), z.cols()) != (nb, nv) {
        rep.push(Check::fail_at(
            "shape",
            vec![z.rows(), z.cols()],
            format!("expected {nb}x{nv}"),
        ));
        return rep;
    }
    rep.push(count_check("row sums", &z.row_sums(), s + 1));
    rep.push(count_check("column sums", &z.col_sums(), t + 1));
    let zt = z.transpose();
    rep.push(offdiag_at_most_one(
        "blocks meet in at most one vertex",
        z,
        &zt,
    ));
    rep.push(offdiag_at_most_one(
        "vertices share at most one block",
        &zt,
        z,
    ));

    // row i of Z Z^T Z is the sum of rows i' of Z over blocks i' meeting block i
    let st = (s + t) as i64;
    let bad = (0..nb).into_par_iter().find_map_first(|i| {
        let mut acc = vec![0i64; nv];
        for &c in z.row(i) {
            for &ip in zt.row(c) {
                for &c2 in z.row(ip) {
                    acc[c2] += 1;
                }
            }
        }
        let row = z.row(i);
        (0..nv)
            .find(|&c| acc[c] != 1 + if row.binary_search(&c).is_ok() { st } else { 0 })
            .map(|c| (i, c, acc[c]))
    });
    rep.push(match bad {
        None => Check::pass(format!("Z Z^T Z = {st} Z + J")),
        Some((i, c, got)) => Check::fail_at(
            format!("Z Z^T Z = {st} Z + J"),
            vec![i, c],
            format!("entry is {got}"),
        ),
    });

    if check_spread {
        let m = s * t + 1;
        let bad = (0..m).find(|&i| {
            z.row(i)
                != ((s + 1) * i..(s + 1) * (i + 1))
                    .collect::<Vec<_>>()
                    .as_slice()
        });
        rep.push(match bad {
            None => Check::pass("first st+1 rows are a spread I (x) 1^T"),
            Some(i) => Check::fail_at(
                "first st+1 rows are a spread I (x) 1^T",
                vec![i],
                "row differs",
            ),
        });
    }
    rep
}

/// Off-diagonal entries of `a a^T` lie in {0, 1}; `at` is `a^T`.
fn offdiag_at_most_one(name: &str, a: &IncidenceMatrix, at: &IncidenceMatrix) -> Check {
    let bad = (0..a.rows()).into_par_iter().find_map_first(|i| {
        let mut seen = HashSet::new();
        for &c in a.row(i) {
            for &i2 in at.row(c) {
                if i2 != i && !seen.insert(i2) {
                    return Some((i, i2));
                }
            }
        }
        None
    });
    match bad {
        None => Check::pass(name),
        Some((i, i2)) => Check::fail_at(name, vec![i, i2], "overlap of at least 2"),
    }
}

/// Exact check of the abelian DRACKN identity
/// `A^2 = (n-fc-2) A + (n-1) I + c 1(z)(J - I)` plus the per-character
/// signature structure.
pub fn verify_drackn(a: &GroupRingMatrix, n: usize, f: usize, c: usize) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("DRACKN({n},{f},{c})"));
    if (a.rows(), a.cols()) != (n, n) || a.group().order() != f {
        rep.push(Check::fail_at(
            "shape",
            vec![a.rows(), a.cols(), a.group().order()],
            format!("expected {n}x{n} over a group of order {f}"),
        ));
        return rep;
    }
    rep.push(if a.is_self_adjoint() {
        Check::pass("self-adjoint")
    } else {
        let w = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| a.get(i, j) != a.get(j, i).involution())
            .expect("some entry breaks symmetry");
        Check::fail_at(
            "self-adjoint",
            vec![w.0, w.1],
            "entry is not the involution of its transpose",
        )
    });
    let mut shape_bad = None;
    'outer: for i in 0..n {
        for j in 0..n {
            let e = a.get(i, j);
            let ok = if i == j {
                e.is_zero()
            } else {
                e.as_monomial().is_some()
            };
            if !ok {
                shape_bad = Some((i, j));
                break 'outer;
            }
        }
    }
    rep.push(match shape_bad {
        None => Check::pass("zero diagonal, monomial off-diagonal"),
        Some((i, j)) => Check::fail_at(
            "zero diagonal, monomial off-diagonal",
            vec![i, j],
            format!("entry is {}", a.get(i, j)),
        ),
    });

    let delta = n as i64 - (f * c) as i64 - 2;
    let sq = a.matmul(a).expect("square");
    let mut worst: Option<(usize, usize, i64)> = None;
    for i in 0..n {
        for j in 0..n {
            let got = sq.coeffs(i, j);
            let want_a = a.coeffs(i, j);
            let dev = (0..f)
                .map(|g| {
                    let mut want = delta * want_a[g];
                    if i == j {
                        want += if g == 0 { n as i64 - 1 } else { 0 };
                    } else {
                        want += c as i64;
                    }
                    (got[g] - want).abs()
                })
                .max()
                .unwrap_or(0);
            if dev != 0 && worst.is_none_or(|w| dev > w.2) {
                worst = Some((i, j, dev));
            }
        }
    }
    let name = format!("A^2 = {delta} A + {} I + {c} 1(z)(J - I)", n - 1);
    rep.push(match worst {
        None => Check {
            residual: Some(0.0),
            ..Check::pass(name)
        },
        Some((i, j, dev)) => Check {
            residual: Some(dev as f64),
            ..Check::fail_at(name, vec![i, j], format!("entry is {}", sq.get(i, j)))
        },
    });

    // each nontrivial character gives an ETF signature with dimension from delta
    let deltaf = delta as f64;
    let d_expected = dimension_from_signature(deltaf, n);
    let lam_min = (deltaf - (deltaf * deltaf + 4.0 * (n as f64 - 1.0)).sqrt()) / 2.0;
    let per_char: Vec<(usize, f64, usize)> = characters_of(a.group())
        .into_par_iter()
        .skip(1)
        .map(|gamma| {
            let s = a.evaluate(&gamma).expect("same group");
            let res = signature_residual(&s, deltaf);
            let mut g = s.clone();
            for i in 0..n {
                g.0[(i, i)] -= C64::new(lam_min, 0.0);
            }
            (gamma.index(), res, numeric_rank(&g))
        })
        .collect();
    for (idx, res, rank) in per_char {
        let mut check = Check::numeric(format!("signature at character {idx}"), res, TOL);
        if (rank as f64 - d_expected).abs() > TOL {
            check.passed = false;
            check.detail = Some(format!("Gram rank {rank}, expected {d_expected}"));
        }
        rep.push(check.with_witness(vec![idx]));
    }
    rep
}

/// SRG check of the collinearity graph `A = Z^T Z - (t+1) I` of a GQ(s, t).
pub fn verify_srg_collinearity(z: &IncidenceMatrix, s: usize, t: usize) -> VerificationReport {
    let (v, k, lambda, mu) = (
        (s + 1) * (s * t + 1),
        s * (t + 1),
        s as i64 - 1,
        (t + 1) as i64,
    );
    let mut rep = VerificationReport::new(format!("SRG({v},{k},{lambda},{mu})"));
    let gq = verify_gq_axioms(z, s, t, false);
    if !gq.passed() {
        rep.absorb(gq);
        return rep;
    }
    let zt = z.transpose();
    // adjacency rows, guaranteed 0/1 by the GQ check
    let adj: Vec<Vec<usize>> = (0..v)
        .into_par_iter()
        .map(|x| {
            let mut row: Vec<usize> = zt
                .row(x)
                .iter()
                .flat_map(|&b| z.row(b).iter().copied())
                .filter(|&y| y != x)
                .collect();
            row.sort_unstable();
            row
        })
        .collect();
    let adj = IncidenceMatrix::from_supports(v, adj).expect("in range");
    rep.push(count_check("degree", &adj.row_sums(), k));
    let sym = adj == adj.transpose();
    rep.push(if sym {
        Check::pass("symmetric with zero diagonal")
    } else {
        Check::fail_at(
            "symmetric with zero diagonal",
            vec![0],
            "adjacency is not symmetric",
        )
    });
    let bad = (0..v).into_par_iter().find_map_first(|x| {
        let mut acc = vec![0i64; v];
        for &y in adj.row(x) {
            for &w in adj.row(y) {
                acc[w] += 1;
            }
        }
        let row = adj.row(x);
        (0..v)
            .find(|&y| {
                let want = if y == x {
                    k as i64
                } else if row.binary_search(&y).is_ok() {
                    lambda
                } else {
                    mu
                };
                acc[y] != want
            })
            .map(|y| (x, y, acc[y]))
    });
    let name = format!("A^2 = {} A + {} I + {mu} J", lambda - mu, k as i64 - mu);
    rep.push(match bad {
        None => Check::pass(name),
        Some((x, y, got)) => Check::fail_at(name, vec![x, y], format!("common neighbours {got}")),
    });
    rep
}

/// One row of the parameter screen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenRow {
    pub v: u64,
    pub k: u64,
    pub r: u64,
    pub b: u64,
    pub u: u64,
    pub d: u64,
    pub real_feasible: bool,
}

/// All `(v, k, 1)` passing the necessary conditions for a phased BIBD ETF,
/// sorted by `(k, v)`. `k = 2` yields no rows since then `u = 0`.
pub fn screen_parameters(kmin: u64, kmax: u64) -> Result<Vec<ScreenRow>, VerifyError> {
    if kmin < 2 || kmin > kmax || kmax > 20 {
        return Err(VerifyError::Range { kmin, kmax });
    }
    let mut rows = Vec::new();
    for k in kmin.max(3)..=kmax {
        let top = k * (k - 1) * (k - 2);
        for u in 1..=(k - 1) * (k - 2) / 2 {
            if top % u != 0 {
                continue;
            }
            let v = top / u * (k - 1) - k * (k - 2);
            if v <= k || (v - 1) % (k - 1) != 0 {
                continue;
            }
            let r = (v - 1) / (k - 1);
            if (r * (k - 1) * (k - 2)) % u != 0 || (v * r) % k != 0 {
                continue;
            }
            let b = v * r / k;
            if b < v || (v * r) % (r + k - 1) != 0 {
                continue;
            }
            rows.push(ScreenRow {
                v,
                k,
                r,
                b,
                u,
                d: v * r / (r + k - 1),
                real_feasible: v % 2 == 0 && k % 2 == 0 && r % 2 == 1,
            });
        }
    }
    rows.sort_by_key(|row| (row.k, row.v));
    Ok(rows)
}

/// Reference screen for `3 <= k <= 9` as `(v-d, v, k, r, b, u)`.
pub const REFERENCE_SCREEN: [(u64, u64, u64, u64, u64, u64); 37] = [
    (3, 9, 3, 4, 12, 1),
    (6, 16, 4, 5, 20, 3),
    (7, 28, 4, 9, 63, 2),
    (8, 64, 4, 21, 336, 1),
    (10, 25, 5, 6, 30, 6),
    (12, 45, 5, 11, 99, 4),
    (13, 65, 5, 16, 208, 3),
    (14, 105, 5, 26, 546, 2),
    (15, 225, 5, 56, 2520, 1),
    (15, 36, 6, 7, 42, 10),
    (17, 51, 6, 10, 85, 8),
    (19, 76, 6, 15, 190, 6),
    (20, 96, 6, 19, 304, 5),
    (21, 126, 6, 25, 525, 4),
    (23, 276, 6, 55, 2530, 2),
    (24, 576, 6, 115, 11040, 1),
    (21, 49, 7, 8, 56, 15),
    (26, 91, 7, 15, 195, 10),
    (30, 175, 7, 29, 725, 6),
    (31, 217, 7, 36, 1116, 5),
    (33, 385, 7, 64, 3520, 3),
    (34, 595, 7, 99, 8415, 2),
    (35, 1225, 7, 204, 35700, 1),
    (28, 64, 8, 9, 72, 21),
    (35, 120, 8, 17, 255, 14),
    (42, 288, 8, 41, 1476, 7),
    (43, 344, 8, 49, 2107, 6),
    (46, 736, 8, 105, 9660, 3),
    (47, 1128, 8, 161, 22701, 2),
    (48, 2304, 8, 329, 94752, 1),
    (36, 81, 9, 10, 90, 28),
    (50, 225, 9, 28, 700, 14),
    (56, 441, 9, 55, 2695, 8),
    (57, 513, 9, 64, 3648, 7),
    (60, 945, 9, 118, 12390, 4),
    (62, 1953, 9, 244, 52948, 2),
    (63, 3969, 9, 496, 218736, 1),
];

/// Compares screener rows against the [`REFERENCE_SCREEN`] rows whose `k`
/// lies in `kmin..=kmax`, reporting missing and extra rows. Rows outside
/// `3 <= k <= 9` are not covered by the reference and are ignored.
pub fn compare_reference_screen(rows: &[ScreenRow], kmin: u64, kmax: u64) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("reference screen for {kmin} <= k <= {kmax}"));
    let in_range = |k: u64| (3..=9).contains(&k) && (kmin..=kmax).contains(&k);
    let got: Vec<(u64, u64, u64, u64, u64, u64)> = rows
        .iter()
        .filter(|r| in_range(r.k))
        .map(|r| (r.v - r.d, r.v, r.k, r.r, r.b, r.u))
        .collect();
    let reference: Vec<_> = REFERENCE_SCREEN.iter().filter(|t| in_range(t.2)).collect();
    for (i, want) in reference.iter().enumerate() {
        if !got.contains(want) {
            rep.push(Check::fail_at(
                "row present",
                vec![i],
                format!("missing {want:?}"),
            ));
        }
    }
    for (i, row) in got.iter().enumerate() {
        if !reference.contains(&row) {
            rep.push(Check::fail_at(
                "no extra rows",
                vec![i],
                format!("unexpected {row:?}"),
            ));
        }
    }
    if rep.checks.is_empty() {
        rep.push(Check::pass(format!("all {} rows match", reference.len())));
    }
    rep
}

/// `(k-1)^2 - u = v(k-1)/(r+k-1)`, cross-multiplied.
pub fn u_dimension_identity(row: &ScreenRow) -> bool {
    let lhs = ((row.k - 1) * (row.k - 1)) as i64 - row.u as i64;
    lhs * (row.r + row.k - 1) as i64 == (row.v * (row.k - 1)) as i64
}

/// The reciprocal Welch identities `d(v-1)/(v-d) = r^2` and
/// `(v-d)(v-1)/d = (k-1)^2`, cross-multiplied.
pub fn reciprocal_welch_identities(row: &ScreenRow) -> bool {
    let (v, d, r, k) = (row.v, row.d, row.r, row.k);
    d < v && d * (v - 1) == r * r * (v - d) && (v - d) * (v - 1) == (k - 1) * (k - 1) * d
}

/// `vr/(r+k-1)` when integral.
pub fn phased_bibd_dimension(p: &BibdParams) -> Option<u64> {
    let num = p.v * p.r;
    let den = p.r + p.k - 1;
    num.is_multiple_of(den).then_some(num / den)
}

/// Number of blocks containing `vertex`, by direct membership.
pub fn count_blocks_through_vertex(
    geo: &BrouwerGeometry,
    vertex: usize,
) -> Result<usize, VerifyError> {
    if vertex >= geo.vertices().len() {
        return Err(VerifyError::NotAVertex(vertex));
    }
    Ok(geo
        .blocks()
        .iter()
        .filter(|b| geo.block_points(b).contains(&vertex))
        .count())
}

/// Counts nonzero `x` in `GF(q^2)^4` with `sum x_i^(q+1) = 0`, divided by
/// `q^2 - 1`, by brute force over the field arithmetic.
pub fn count_self_orthogonal_points(q: u64) -> Result<u64, crate::gf::GfError> {
    let field = FiniteField::with_order(q * q)?;
    let norms = field
        .elements_by_index()
        .iter()
        .map(|x| x.norm(q))
        .collect::<Result<Vec<_>, _>>()?;
    let mut count = 0u64;
    for a in &norms {
        for b in &norms {
            let ab = a + b;
            for c in &norms {
                let abc = &ab + c;
                count += norms.iter().filter(|d| (&abc + d).is_zero()).count() as u64;
            }
        }
    }
    // drop the zero vector, then count lines
    Ok((count - 1) / (q * q - 1))
}

/// Vectors `y != 0` with `y_1 = 0`, `y . y = 0` and `x . y = 0`, for the
/// vertex `x`. For a nonovoid vertex this is `(q+1)(q^2-1)`.
pub fn count_orthogonal_ovoid_vectors(
    geo: &BrouwerGeometry,
    vertex: usize,
) -> Result<u64, VerifyError> {
    let x = *geo
        .vertices()
        .get(vertex)
        .ok_or(VerifyError::NotAVertex(vertex))?;
    let n = geo.field().order() as usize;
    let mut count = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let y = [0, a, b, c];
                if y != [0; 4] && geo.dot(&y, &y) == 0 && geo.dot(&x, &y) == 0 {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// The designated real character, if the group has even order.
pub fn real_character_of(group: &AbelianGroup) -> Option<crate::groupring::Character> {
    group.real_character()
}
