//! Builders for the polyphase BIBD families and the GQ conversions.
//!
//! All index orders are fixed so that every builder is byte-reproducible:
//! field elements run `0, 1, alpha, alpha^2, ...` with `inf` last, and
//! projective points are compared by the integer codes of their coordinates.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{is_prime, FieldElement, FiniteField, GfError};
use crate::groupring::{root_of_unity, AbelianGroup, GroupError};
use crate::polymat::{ComplexMatrix, IncidenceMatrix, PolymatError, PolyphaseMatrix};

/// Largest `q` accepted by [`brouwer_geometry`].
pub const MAX_BROUWER_Q: u64 = 7;
/// Largest `q` accepted by [`affine_polyphase`].
pub const MAX_AFFINE_Q: u64 = 32;
/// Tolerance used when snapping complex entries to roots of unity.
pub const ROOT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Matrix(#[from] PolymatError),
    #[error("{family} needs q <= {max}, got {q}")]
    Guard {
        family: &'static str,
        q: u64,
        max: u64,
    },
    #[error("simplex family needs v >= 3, got {0}")]
    SimplexTooSmall(usize),
    #[error("rows do not all have the same number of nonzero entries")]
    NonUniformRows,
    #[error("group order {f} differs from block size {k}")]
    BlockSizeMismatch { f: usize, k: usize },
    #[error("{cols} columns are not a multiple of the group order {f}")]
    ColumnsNotDivisible { cols: usize, f: usize },
    #[error("row {0} of the spread part is not a row of I (x) 1^T")]
    BadSpread(usize),
    #[error("block ({block_row},{block_col}) is neither zero nor a group-circulant permutation")]
    BadBlock { block_row: usize, block_col: usize },
    #[error("entry ({row},{col}) is not zero or a {p}-th root of unity")]
    NotRootOfUnity { row: usize, col: usize, p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Parameters of a `BIBD(v, k, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibdParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub r: u64,
    pub b: u64,
    /// `k(k-1)^2(k-2) / (v + k(k-2))` when integral.
    pub u: Option<u64>,
}

impl BibdParams {
    /// `None` unless `r` and `b` are integers.
    pub fn new(v: u64, k: u64) -> Option<Self> {
        if k < 2 || v < k || !(v - 1).is_multiple_of(k - 1) {
            return None;
        }
        let r = (v - 1) / (k - 1);
        if !(v * r).is_multiple_of(k) {
            return None;
        }
        let num = k * (k - 1) * (k - 1) * (k - 2);
        let den = v + k * (k - 2);
        Some(Self {
            v,
            k,
            lambda: 1,
            r,
            b: v * r / k,
            u: num.is_multiple_of(den).then_some(num / den),
        })
    }

    /// Reads `v` and `k` off a block-by-point incidence matrix with constant row sums.
    pub fn from_incidence(x: &IncidenceMatrix) -> Option<Self> {
        let sums = x.row_sums();
        let k = *sums.first()?;
        if sums.iter().any(|&s| s != k) {
            return None;
        }
        Self::new(x.cols() as u64, k as u64)
    }
}

/// Order `(s, t)` of a generalized quadrangle with derived counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GqParams {
    pub s: u64,
    pub t: u64,
    pub n_vertices: u64,
    pub n_blocks: u64,
}

impl GqParams {
    pub fn new(s: u64, t: u64) -> Self {
        Self {
            s,
            t,
            n_vertices: (s + 1) * (s * t + 1),
            n_blocks: (t + 1) * (s * t + 1),
        }
    }
}

/// An `(n, f, c)`-DRACKN together with its `delta = n - fc - 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DracknParams {
    pub n: u64,
    pub f: u64,
    pub c: u64,
    pub delta: i64,
}

impl DracknParams {
    pub fn new(n: u64, f: u64, c: u64) -> Self {
        Self {
            n,
            f,
            c,
            delta: n as i64 - (f * c) as i64 - 2,
        }
    }

    /// The DRACKN carried by an `(v, k, f)`-polyphase BIBD ETF, `c = k(r-1)/f`.
    pub fn from_bibd(bibd: &BibdParams, f: u64) -> Option<Self> {
        let num = bibd.k * (bibd.r - 1);
        (f > 0 && num.is_multiple_of(f)).then(|| Self::new(bibd.v, f, num / f))
    }
}

fn checked_field(q: u64, family: &'static str, max: u64) -> Result<FiniteField, ConstructError> {
    let field = FiniteField::with_order(q)?;
    if q > max {
        return Err(ConstructError::Guard { family, q, max });
    }
    Ok(field)
}

/// The phased simplex over `Z_2`: one row per 2-subset `{a < b}` with `z^0`
/// at `a` and `z^1` at `b`.
pub fn simplex_phased(v: usize) -> Result<PolyphaseMatrix, ConstructError> {
    if v < 3 {
        return Err(ConstructError::SimplexTooSmall(v));
    }
    let group = AbelianGroup::cyclic(2)?;
    let mut m = PolyphaseMatrix::zeros(v * (v - 1) / 2, v, &group);
    let mut row = 0;
    for a in 0..v {
        for b in a + 1..v {
            m.set(row, a, Some(0))?;
            m.set(row, b, Some(1))?;
            row += 1;
        }
    }
    Ok(m)
}

/// The 12 x 9 polyphase matrix over `Z_3` of the worked `(9,3,3)` example.
pub fn example_9_3_3() -> PolyphaseMatrix {
    const ROWS: [&str; 12] = [
        "0 0 0 . . . . . .",
        ". . . 0 0 0 . . .",
        ". . . . . . 0 0 0",
        "0 . . 0 . . 0 . .",
        ". 0 . . 2 . . 1 .",
        ". . 0 . . 1 . . 2",
        "0 . . . . 2 . 2 .",
        ". 0 . 1 . . . . 0",
        ". . 0 . 0 . 1 . .",
        "0 . . . 1 . . . 1",
        ". 0 . . . 0 2 . .",
        ". . 0 2 . . . 0 .",
    ];
    let text = format!("POLYPHASE rows=12 cols=9 group=Z3\n{}\n", ROWS.join("\n"));
    PolyphaseMatrix::parse_text(&text).expect("hardcoded matrix parses")
}

/// The `(q^2, q, q)`-polyphase BIBD over the additive group of `GF(q)`.
///
/// Row `(i, x)` sits at `i*q + x` with `i = inf` last; column `(j, y)` at
/// `j*q + y`. The entry is `z^{j(x+y)}` when `x - y = ij`, and `z^0` on row
/// `(inf, x)` for every column with `j = x`.
pub fn affine_polyphase(q: u64) -> Result<PolyphaseMatrix, ConstructError> {
    let field = checked_field(q, "affine", MAX_AFFINE_Q)?;
    let p = field.characteristic() as usize;
    let group = AbelianGroup::new(&vec![p; field.degree()])?;
    let elems = field.elements();
    let pos: HashMap<u64, usize> = elems
        .iter()
        .enumerate()
        .map(|(i, e)| (e.index(), i))
        .collect();
    let q = q as usize;
    let to_group = |e: &FieldElement| {
        let t: Vec<usize> = e.coeffs().iter().map(|&c| c as usize).collect();
        group.encode(&t).expect("coefficients lie in Z_p")
    };
    let mut m = PolyphaseMatrix::zeros((q + 1) * q, q * q, &group);
    for (ip, i) in elems.iter().enumerate() {
        for (xp, x) in elems.iter().enumerate() {
            for (jp, j) in elems.iter().enumerate() {
                let y = x - &(i * j);
                let yp = pos[&y.index()];
                let g = to_group(&(j * &(x + &y)));
                m.set(ip * q + xp, jp * q + yp, Some(g))?;
            }
        }
    }
    for xp in 0..q {
        for yp in 0..q {
            m.set(q * q + xp, xp * q + yp, Some(0))?;
        }
    }
    Ok(m)
}

/// Coordinates of a point of `PG(3, q^2)` as field element codes.
pub type Point = [usize; 4];

/// The two closed forms of totally isotropic lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BrouwerBlock {
    /// `[a, b; j]` with `N(a) + N(b) = -1`: span of `(1,0,a,b)` and
    /// `(0,1,-beta^j b^q, beta^j a^q)`.
    Pair { a: usize, b: usize, j: usize },
    /// `[a; j]` with `N(a) = -1`: span of `(1,a,0,0)` and `(0,0,1,beta^j a)`.
    Single { a: usize, j: usize },
}

/// Arithmetic tables over field element codes.
#[derive(Debug, Clone)]
struct Tables {
    n: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    inv: Vec<usize>,
    frob: Vec<usize>,
}

impl Tables {
    fn new(field: &FiniteField, q: u64) -> Self {
        let elems = field.elements_by_index();
        let n = elems.len();
        let code = |e: FieldElement| e.index() as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for (a, x) in elems.iter().enumerate() {
            for (b, y) in elems.iter().enumerate() {
                add[a * n + b] = code(x + y);
                mul[a * n + b] = code(x * y);
            }
        }
        Self {
            n,
            add,
            mul,
            neg: elems.iter().map(|x| code(-x)).collect(),
            inv: elems.iter().map(|x| x.inv().map_or(0, code)).collect(),
            frob: elems.iter().map(|x| code(x.pow(q))).collect(),
        }
    }

    #[inline]
    fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b]
    }

    #[inline]
    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    #[inline]
    fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg[b])
    }

    fn norm(&self, a: usize) -> usize {
        self.mul(self.frob[a], a)
    }
}

/// The Hermitian polar space `H(3, q^2)` presented as the abelian `GQ(q, q^2)`
/// with its ovoid `x_1 = 0` and the `beta`-orbits on the remaining vertices.
#[derive(Debug, Clone)]
pub struct BrouwerGeometry {
    q: u64,
    field: FiniteField,
    tables: Tables,
    /// `beta^i` for `i` in `0..=q`.
    beta_pow: Vec<usize>,
    vertices: Vec<Point>,
    index: HashMap<Point, usize>,
    ovoid: Vec<usize>,
    orbit_reps: Vec<usize>,
    blocks: Vec<BrouwerBlock>,
}

impl BrouwerGeometry {
    pub fn q(&self) -> u64 {
        self.q
    }

    /// `GF(q^2)`.
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn element(&self, code: usize) -> FieldElement {
        self.field.element_from_index(code as u64)
    }

    /// Canonical representatives in ascending lexicographic order.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex_index(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Vertex indices with `x_1 = 0`, ascending.
    pub fn ovoid(&self) -> &[usize] {
        &self.ovoid
    }

    pub fn is_ovoid(&self, v: usize) -> bool {
        self.vertices[v][0] == 0
    }

    /// One vertex index per `beta`-orbit, in row order.
    pub fn orbit_reps(&self) -> &[usize] {
        &self.orbit_reps
    }

    pub fn blocks(&self) -> &[BrouwerBlock] {
        &self.blocks
    }

    /// `beta^i` as a field element code.
    pub fn beta_power(&self, i: usize) -> usize {
        self.beta_pow[i % self.beta_pow.len()]
    }

    /// `x . y = sum_i x_i^q y_i`, as a field element code.
    pub fn dot(&self, x: &Point, y: &Point) -> usize {
        let t = &self.tables;
        x.iter()
            .zip(y)
            .fold(0, |acc, (&a, &b)| t.add(acc, t.mul(t.frob[a], b)))
    }

    /// Scales a nonzero vector so its first nonzero coordinate is one.
    pub fn canonical(&self, x: &Point) -> Option<Point> {
        let lead = *x.iter().find(|&&c| c != 0)?;
        let s = self.tables.inv[lead];
        Some(x.map(|c| self.tables.mul(s, c)))
    }

    /// `i . [1, x_2, x_3, x_4] = [1, beta^i x_2, beta^i x_3, beta^i x_4]`.
    pub fn act(&self, i: usize, x: &Point) -> Point {
        let b = self.beta_power(i);
        [
            x[0],
            self.tables.mul(b, x[1]),
            self.tables.mul(b, x[2]),
            self.tables.mul(b, x[3]),
        ]
    }

    /// The orbit of a nonovoid vertex, member `i` being `i . x`.
    pub fn orbit(&self, v: usize) -> Vec<usize> {
        let x = self.vertices[v];
        (0..=self.q as usize)
            .map(|i| self.index[&self.act(i, &x)])
            .collect()
    }

    /// Vertex indices on a block, the ovoid vertex first.
    pub fn block_points(&self, block: &BrouwerBlock) -> Vec<usize> {
        let t = &self.tables;
        let (u, w): (Point, Point) = match *block {
            BrouwerBlock::Pair { a, b, j } => {
                let bj = self.beta_power(j);
                (
                    [1, 0, a, b],
                    [0, 1, t.neg[t.mul(bj, t.frob[b])], t.mul(bj, t.frob[a])],
                )
            }
            BrouwerBlock::Single { a, j } => {
                ([1, a, 0, 0], [0, 0, 1, t.mul(self.beta_power(j), a)])
            }
        };
        let mut out = Vec::with_capacity(t.n + 1);
        out.push(self.index[&w]);
        for d in 0..t.n {
            let p = [
                u[0],
                t.add(u[1], t.mul(d, w[1])),
                t.add(u[2], t.mul(d, w[2])),
                t.add(u[3], t.mul(d, w[3])),
            ];
            out.push(self.index[&p]);
        }
        out
    }

    /// Lexicographically first nonovoid vertex orthogonal to `y`; defines
    /// the `j`-th block through `y` as `[y, j . z]`.
    pub fn partner(&self, y: usize) -> usize {
        let yp = self.vertices[y];
        (0..self.vertices.len())
            .find(|&v| !self.is_ovoid(v) && self.dot(&self.vertices[v], &yp) == 0)
            .expect("every ovoid vertex has nonovoid neighbours")
    }

    /// `l` with `beta^l = -1 / sum_{k>1} x_k^q z_k`; vertex `i . x` lies on
    /// block `i + l` through `y`. `None` when `x` is not collinear with `y`.
    pub fn orbit_offset(&self, x: usize, y: usize, z: usize) -> Option<usize> {
        let (xp, yp, zp) = (&self.vertices[x], &self.vertices[y], &self.vertices[z]);
        if self.dot(xp, yp) != 0 {
            return None;
        }
        let t = &self.tables;
        let s = (1..4).fold(0, |acc, k| t.add(acc, t.mul(t.frob[xp[k]], zp[k])));
        let target = t.neg[t.inv[s]];
        let l = self
            .beta_pow
            .iter()
            .position(|&b| b == target)
            .expect("collinear vertices give a (q+1)-th root of unity");
        Some(l)
    }

    /// Whether vertex `v` lies on the line spanned by vertices `a` and `b`.
    pub fn on_line(&self, v: usize, a: usize, b: usize) -> bool {
        let t = &self.tables;
        let (pa, pb, pv) = (self.vertices[a], self.vertices[b], self.vertices[v]);
        // v in span{a, b} iff every 3x3 minor of [a; b; v] vanishes
        let minor = |i: usize, j: usize, k: usize| {
            let m = [
                [pa[i], pa[j], pa[k]],
                [pb[i], pb[j], pb[k]],
                [pv[i], pv[j], pv[k]],
            ];
            let term = |r0: usize, r1: usize, r2: usize| {
                t.mul(
                    m[0][r0],
                    t.sub(t.mul(m[1][r1], m[2][r2]), t.mul(m[1][r2], m[2][r1])),
                )
            };
            t.add(t.sub(term(0, 1, 2), term(1, 0, 2)), term(2, 0, 1))
        };
        minor(0, 1, 2) == 0 && minor(0, 1, 3) == 0 && minor(0, 2, 3) == 0 && minor(1, 2, 3) == 0
    }
}

/// Enumerates the geometry for a prime power `q <= MAX_BROUWER_Q`.
pub fn brouwer_geometry(q: u64) -> Result<BrouwerGeometry, ConstructError> {
    FiniteField::with_order(q)?;
    if q > MAX_BROUWER_Q {
        return Err(ConstructError::Guard {
            family: "brouwer",
            q,
            max: MAX_BROUWER_Q,
        });
    }
    let field = FiniteField::with_order(q * q)?;
    let beta = field.beta(q)?;
    let tables = Tables::new(&field, q);
    let n = tables.n;
    let beta_pow: Vec<usize> = (0..=q).map(|i| beta.pow(i).index() as usize).collect();

    let self_orthogonal =
        |x: &Point| x.iter().fold(0, |acc, &c| tables.add(acc, tables.norm(c))) == 0;
    let mut vertices = Vec::new();
    for lead in (0..4).rev() {
        let free = 3 - lead;
        for code in 0..n.pow(free as u32) {
            let mut x = [0; 4];
            x[lead] = 1;
            let mut c = code;
            for slot in (lead + 1..4).rev() {
                x[slot] = c % n;
                c /= n;
            }
            if self_orthogonal(&x) {
                vertices.push(x);
            }
        }
    }
    vertices.sort_unstable();
    let index: HashMap<Point, usize> = vertices.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let ovoid: Vec<usize> = (0..vertices.len())
        .filter(|&v| vertices[v][0] == 0)
        .collect();

    let mut blocks = Vec::new();
    let minus_one = tables.neg[1];
    for a in 0..n {
        for b in 0..n {
            if tables.add(tables.norm(a), tables.norm(b)) == minus_one {
                blocks.extend((0..=q as usize).map(|j| BrouwerBlock::Pair { a, b, j }));
            }
        }
    }
    for a in 0..n {
        if tables.norm(a) == minus_one {
            blocks.extend((0..=q as usize).map(|j| BrouwerBlock::Single { a, j }));
        }
    }

    let mut geo = BrouwerGeometry {
        q,
        field,
        tables,
        beta_pow,
        vertices,
        index,
        ovoid,
        orbit_reps: Vec::new(),
        blocks,
    };

    let mut reps: Vec<Point> = (0..geo.vertices.len())
        .filter(|&v| !geo.is_ovoid(v))
        .map(|v| {
            let x = geo.vertices[v];
            (0..=q as usize)
                .map(|i| geo.act(i, &x))
                .min()
                .expect("orbit is nonempty")
        })
        .collect();
    reps.sort_unstable();
    reps.dedup();
    // [1,0,a,b] first, then [1,a,0,0], then the rest
    let form = |x: &Point| match x {
        [_, 0, _, _] => 0,
        [_, _, 0, 0] => 1,
        _ => 2,
    };
    reps.sort_by_key(|x| (form(x), *x));
    geo.orbit_reps = reps.iter().map(|x| geo.index[x]).collect();
    Ok(geo)
}

/// The `(q^3+1, q+1, q+1)`-polyphase BIBD over `Z_{q+1}` built on the
/// Hermitian GQ(q, q^2): rows are orbit representatives, columns are ovoid
/// vertices. The entry is `z^{-l}` where vertex `i . x` lies on block `i + l`
/// through `y`, so that the filter-bank lift is exactly the vertex-block
/// incidence between nonovoid vertices and blocks.
pub fn brouwer_polyphase(q: u64) -> Result<PolyphaseMatrix, ConstructError> {
    let geo = brouwer_geometry(q)?;
    Ok(brouwer_polyphase_from(&geo)?)
}

pub fn brouwer_polyphase_from(geo: &BrouwerGeometry) -> Result<PolyphaseMatrix, PolymatError> {
    let f = geo.q as usize + 1;
    let group = AbelianGroup::cyclic(f)?;
    let mut m = PolyphaseMatrix::zeros(geo.orbit_reps.len(), geo.ovoid.len(), &group);
    for (col, &y) in geo.ovoid.iter().enumerate() {
        let z = geo.partner(y);
        for (row, &x) in geo.orbit_reps.iter().enumerate() {
            if let Some(l) = geo.orbit_offset(x, y, z) {
                m.set(row, col, Some((f - l) % f))?;
            }
        }
    }
    Ok(m)
}

/// `Z = [I_v (x) 1_k^T ; Phi(T)]`, the incidence of a `GQ(k-1, r)` whose
/// first `v` rows form a spread.
pub fn gq_from_polyphase(m: &PolyphaseMatrix) -> Result<IncidenceMatrix, ConstructError> {
    let f = m.group().order();
    let sums = m.modulus_squared().row_sums();
    let k = sums.first().copied().unwrap_or(0);
    if sums.iter().any(|&s| s != k) {
        return Err(ConstructError::NonUniformRows);
    }
    if k != f {
        return Err(ConstructError::BlockSizeMismatch { f, k });
    }
    let spread = IncidenceMatrix::from_supports(
        m.cols() * f,
        (0..m.cols())
            .map(|j| (j * f..(j + 1) * f).collect())
            .collect(),
    )?;
    Ok(spread.vstack(&m.filter_bank_lift())?)
}

/// Inverse of [`gq_from_polyphase`] for a given group.
pub fn polyphase_from_gq(
    z: &IncidenceMatrix,
    group: &AbelianGroup,
) -> Result<PolyphaseMatrix, ConstructError> {
    let f = group.order();
    if !z.cols().is_multiple_of(f) {
        return Err(ConstructError::ColumnsNotDivisible { cols: z.cols(), f });
    }
    let v = z.cols() / f;
    if z.rows() < v {
        return Err(ConstructError::BadSpread(z.rows()));
    }
    for j in 0..v {
        let want: Vec<usize> = (j * f..(j + 1) * f).collect();
        if z.row(j) != want.as_slice() {
            return Err(ConstructError::BadSpread(j));
        }
    }
    if !(z.rows() - v).is_multiple_of(f) {
        return Err(ConstructError::BadBlock {
            block_row: (z.rows() - v) / f,
            block_col: 0,
        });
    }
    let b = (z.rows() - v) / f;
    let mut m = PolyphaseMatrix::zeros(b, v, group);
    for i in 0..b {
        // per block column, the in-block column of the one in each lifted row
        let mut hits: Vec<Vec<Option<usize>>> = vec![vec![None; f]; v];
        for a in 0..f {
            for &c in z.row(v + i * f + a) {
                let slot = &mut hits[c / f][a];
                if slot.is_some() {
                    return Err(ConstructError::BadBlock {
                        block_row: i,
                        block_col: c / f,
                    });
                }
                *slot = Some(c % f);
            }
        }
        for (j, block) in hits.iter().enumerate() {
            if block.iter().all(Option::is_none) {
                continue;
            }
            let bad = ConstructError::BadBlock {
                block_row: i,
                block_col: j,
            };
            let g = group.neg(block[0].ok_or_else(|| bad.clone())?);
            if (0..f).any(|a| block[a] != Some(group.sub(a, g))) {
                return Err(bad);
            }
            m.set(i, j, Some(g))?;
        }
    }
    Ok(m)
}

/// Reads a phased matrix with `p`-th root of unity entries back as a
/// polyphase matrix over `Z_p`, mapping `e^{2 pi i l / p}` to `z^l`.
pub fn phased_to_polyphase(phi: &ComplexMatrix, p: u64) -> Result<PolyphaseMatrix, ConstructError> {
    if !is_prime(p) {
        return Err(ConstructError::NotPrime(p));
    }
    let group = AbelianGroup::cyclic(p as usize)?;
    let roots: Vec<_> = (0..p).map(|l| root_of_unity(l, p)).collect();
    let mut m = PolyphaseMatrix::zeros(phi.rows(), phi.cols(), &group);
    for i in 0..phi.rows() {
        for j in 0..phi.cols() {
            let x = phi.get(i, j);
            if x.norm() <= ROOT_TOLERANCE {
                continue;
            }
            let l = roots
                .iter()
                .position(|w| (x - w).norm() <= ROOT_TOLERANCE)
                .ok_or(ConstructError::NotRootOfUnity { row: i, col: j, p })?;
            m.set(i, j, Some(l))?;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupring::{characters_of, C64};

    #[test]
    fn bibd_params() {
        let p = BibdParams::new(28, 4).unwrap();
        assert_eq!((p.r, p.b, p.u), (9, 63, Some(2)));
        assert_eq!(BibdParams::new(9, 3).unwrap().u, Some(1));
        assert_eq!(BibdParams::new(5, 2).unwrap().u, Some(0));
        assert!(BibdParams::new(10, 4).is_none());
        let d = DracknParams::from_bibd(&p, 4).unwrap();
        assert_eq!((d.c, d.delta), (8, -(9 - 4 + 1)));
        assert_eq!(GqParams::new(3, 9).n_vertices, 112);
        assert_eq!(GqParams::new(3, 9).n_blocks, 280);
    }

    #[test]
    fn simplex_shape() {
        assert_eq!(simplex_phased(2), Err(ConstructError::SimplexTooSmall(2)));
        let m = simplex_phased(3).unwrap();
        assert_eq!(
            m.to_text(),
            "POLYPHASE rows=3 cols=3 group=Z2\n0 1 .\n0 . 1\n. 0 1\n"
        );
        let m = simplex_phased(4).unwrap();
        assert_eq!((m.rows(), m.cols()), (6, 4));
        let gram = m.evaluate(&characters_of(m.group())[1]).unwrap().gram();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 3.0 } else { -1.0 };
                assert_eq!(gram.get(i, j), C64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn affine_small_cases() {
        let m = affine_polyphase(2).unwrap();
        assert_eq!((m.rows(), m.cols(), m.group().order()), (6, 4, 2));
        let m = affine_polyphase(3).unwrap();
        assert_eq!((m.rows(), m.cols()), (12, 9));
        let x = m.modulus_squared();
        assert!(x.row_sums().iter().all(|&s| s == 3));
        assert!(x.col_sums().iter().all(|&s| s == 4));
        assert_eq!(
            affine_polyphase(6),
            Err(ConstructError::Field(GfError::NotPrimePower(6)))
        );
        assert!(matches!(
            affine_polyphase(37),
            Err(ConstructError::Guard { .. })
        ));
    }

    #[test]
    fn affine_modulus_is_an_affine_plane() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let x = affine_polyphase(q).unwrap().modulus_squared();
            let q = q as usize;
            assert!(x.row_sums().iter().all(|&s| s == q));
            assert!(x.col_sums().iter().all(|&s| s == q + 1));
            let xtx = x.transpose().matmul(&x).unwrap();
            for a in 0..q * q {
                for b in 0..q * q {
                    assert_eq!(xtx.get(a, b), if a == b { q as i64 + 1 } else { 1 });
                }
            }
        }
    }

    #[test]
    fn brouwer_counts() {
        for q in [2u64, 3] {
            let geo = brouwer_geometry(q).unwrap();
            assert_eq!(geo.vertices().len() as u64, (q * q + 1) * (q * q * q + 1));
            assert_eq!(geo.ovoid().len() as u64, q * q * q + 1);
            assert_eq!(geo.orbit_reps().len() as u64, q * q * (q * q - q + 1));
            assert_eq!(geo.blocks().len() as u64, (q + 1) * (q * q * q + 1));
            for &r in geo.orbit_reps() {
                let orb = geo.orbit(r);
                assert_eq!(orb[0], r);
                let mut sorted = orb.clone();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len() as u64, q + 1);
            }
        }
        assert!(matches!(
            brouwer_geometry(8),
            Err(ConstructError::Guard { .. })
        ));
        assert!(matches!(brouwer_geometry(6), Err(ConstructError::Field(_))));
    }

    #[test]
    fn brouwer_blocks_are_totally_isotropic_lines() {
        let geo = brouwer_geometry(2).unwrap();
        let mut seen = std::collections::HashSet::new();
        for block in geo.blocks() {
            let pts = geo.block_points(block);
            assert_eq!(pts.len(), 5);
            assert!(geo.is_ovoid(pts[0]));
            assert!(pts[1..].iter().all(|&v| !geo.is_ovoid(v)));
            for &a in &pts {
                for &b in &pts {
                    assert_eq!(geo.dot(&geo.vertices()[a], &geo.vertices()[b]), 0);
                }
                assert!(geo.on_line(a, pts[0], pts[1]));
            }
            let mut key = pts.clone();
            key.sort_unstable();
            assert!(seen.insert(key));
        }
    }

    #[test]
    fn brouwer_offsets_match_line_membership() {
        // vertex i.x lies on block i + l through y, checked by direct span tests
        let geo = brouwer_geometry(3).unwrap();
        let f = 4;
        for &y in geo.ovoid().iter().take(6) {
            let z = geo.partner(y);
            let through: Vec<usize> = (0..f)
                .map(|j| geo.vertex_index(&geo.act(j, &geo.vertices()[z])).unwrap())
                .collect();
            for &x in geo.orbit_reps() {
                let orb = geo.orbit(x);
                match geo.orbit_offset(x, y, z) {
                    None => {
                        assert!((0..f).all(|i| (0..f).all(|j| !geo.on_line(orb[i], y, through[j]))));
                    }
                    Some(l) => {
                        for i in 0..f {
                            for j in 0..f {
                                assert_eq!(geo.on_line(orb[i], y, through[j]), j == (i + l) % f);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn brouwer_matrix_shape() {
        let m = brouwer_polyphase(3).unwrap();
        assert_eq!((m.rows(), m.cols()), (63, 28));
        assert_eq!(m.group().to_string(), "Z4");
        let x = m.modulus_squared();
        assert!(x.row_sums().iter().all(|&s| s == 4));
        assert!(x.col_sums().iter().all(|&s| s == 9));
    }

    #[test]
    fn gq_round_trip_and_errors() {
        let m = example_9_3_3();
        let z = gq_from_polyphase(&m).unwrap();
        assert_eq!((z.rows(), z.cols()), (45, 27));
        assert_eq!(polyphase_from_gq(&z, m.group()).unwrap(), m);
        // swap two ones inside one lifted block to break circulance
        let mut supports: Vec<Vec<usize>> = (0..z.rows()).map(|i| z.row(i).to_vec()).collect();
        let (r0, r1) = (9, 10);
        let c0 = supports[r0][0];
        let c1 = supports[r1][0];
        supports[r0][0] = c1;
        supports[r1][0] = c0;
        let bad = IncidenceMatrix::from_supports(z.cols(), supports).unwrap();
        assert_eq!(
            polyphase_from_gq(&bad, m.group()),
            Err(ConstructError::BadBlock {
                block_row: 0,
                block_col: 0
            })
        );
        let grid = gq_from_polyphase(&simplex_phased(4).unwrap()).unwrap();
        assert_eq!((grid.rows(), grid.cols()), (16, 8));
        assert_eq!(
            gq_from_polyphase(&affine_polyphase(2).unwrap().adjoint()),
            Err(ConstructError::BlockSizeMismatch { f: 2, k: 3 })
        );
    }

    #[test]
    fn phased_round_trip_and_errors() {
        let m = example_9_3_3();
        let omega = &characters_of(m.group())[1];
        assert_eq!(
            phased_to_polyphase(&m.evaluate(omega).unwrap(), 3).unwrap(),
            m
        );
        let s = simplex_phased(5).unwrap();
        let real = s.evaluate(&characters_of(s.group())[1]).unwrap();
        assert_eq!(phased_to_polyphase(&real, 2).unwrap(), s);
        let mut odd = real.clone();
        odd.0[(0, 0)] = root_of_unity(1, 8);
        assert_eq!(
            phased_to_polyphase(&odd, 3),
            Err(ConstructError::NotRootOfUnity {
                row: 0,
                col: 0,
                p: 3
            })
        );
        assert_eq!(
            phased_to_polyphase(&real, 4),
            Err(ConstructError::NotPrime(4))
        );
    }
}
