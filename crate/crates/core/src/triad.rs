//! Directed triad census.
//!
//! The 16 isomorphism classes of three-node digraphs are labelled with MAN
//! codes (mutual, asymmetric, null dyad counts, plus an orientation suffix).
//! Classification goes through a 6-bit *tricode* of the arcs among an ordered
//! triple and a 64-entry lookup table. The table is derived at first use from
//! one exemplar triad per class and checked for totality and permutation
//! consistency before it is handed out.
//!
//! [`census`] is the subquadratic algorithm: it visits every connected pair
//! once and classifies only the triples that contain an arc, filling in the
//! empty class `003` from the total number of triples.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TriadClass {
    T003,
    T012,
    T102,
    /// Out-star: one node follows the other two.
    T021D,
    /// In-star.
    T021U,
    T021C,
    T111D,
    T111U,
    /// Transitive.
    T030T,
    /// Cyclic.
    T030C,
    T201,
    T120D,
    T120U,
    T120C,
    T210,
    T300,
}

impl TriadClass {
    pub const ALL: [TriadClass; 16] = [
        TriadClass::T003,
        TriadClass::T012,
        TriadClass::T102,
        TriadClass::T021D,
        TriadClass::T021U,
        TriadClass::T021C,
        TriadClass::T111D,
        TriadClass::T111U,
        TriadClass::T030T,
        TriadClass::T030C,
        TriadClass::T201,
        TriadClass::T120D,
        TriadClass::T120U,
        TriadClass::T120C,
        TriadClass::T210,
        TriadClass::T300,
    ];

    /// The connected classes used as features: everything except the
    /// classes with an isolated node (003, 012, 102).
    pub const FEATURES: [TriadClass; 13] = [
        TriadClass::T021D,
        TriadClass::T021U,
        TriadClass::T021C,
        TriadClass::T111D,
        TriadClass::T111U,
        TriadClass::T030T,
        TriadClass::T030C,
        TriadClass::T201,
        TriadClass::T120D,
        TriadClass::T120U,
        TriadClass::T120C,
        TriadClass::T210,
        TriadClass::T300,
    ];

    /// Zero-based position in [`TriadClass::ALL`].
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// One-based class number (003 is 1, 300 is 16).
    pub fn number(self) -> usize {
        self.index() + 1
    }

    pub fn label(self) -> &'static str {
        match self {
            TriadClass::T003 => "003",
            TriadClass::T012 => "012",
            TriadClass::T102 => "102",
            TriadClass::T021D => "021D",
            TriadClass::T021U => "021U",
            TriadClass::T021C => "021C",
            TriadClass::T111D => "111D",
            TriadClass::T111U => "111U",
            TriadClass::T030T => "030T",
            TriadClass::T030C => "030C",
            TriadClass::T201 => "201",
            TriadClass::T120D => "120D",
            TriadClass::T120U => "120U",
            TriadClass::T120C => "120C",
            TriadClass::T210 => "210",
            TriadClass::T300 => "300",
        }
    }

    pub fn is_feature(self) -> bool {
        !matches!(self, TriadClass::T003 | TriadClass::T012 | TriadClass::T102)
    }

    /// (mutual, asymmetric, null) dyad counts encoded in the label.
    pub fn man(self) -> (u8, u8, u8) {
        let b = self.label().as_bytes();
        (b[0] - b'0', b[1] - b'0', b[2] - b'0')
    }

    /// Hand-encoded representative over positions 0, 1, 2.
    fn exemplar(self) -> &'static [(usize, usize)] {
        match self {
            TriadClass::T003 => &[],
            TriadClass::T012 => &[(0, 1)],
            TriadClass::T102 => &[(0, 1), (1, 0)],
            TriadClass::T021D => &[(0, 1), (0, 2)],
            TriadClass::T021U => &[(1, 0), (2, 0)],
            TriadClass::T021C => &[(0, 1), (1, 2)],
            TriadClass::T111D => &[(0, 1), (1, 0), (2, 0)],
            TriadClass::T111U => &[(0, 1), (1, 0), (0, 2)],
            TriadClass::T030T => &[(0, 1), (1, 2), (0, 2)],
            TriadClass::T030C => &[(0, 1), (1, 2), (2, 0)],
            TriadClass::T201 => &[(0, 1), (1, 0), (0, 2), (2, 0)],
            TriadClass::T120D => &[(0, 1), (1, 0), (2, 0), (2, 1)],
            TriadClass::T120U => &[(0, 1), (1, 0), (0, 2), (1, 2)],
            TriadClass::T120C => &[(0, 1), (1, 2), (0, 2), (2, 0)],
            TriadClass::T210 => &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2)],
            TriadClass::T300 => &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)],
        }
    }
}

impl fmt::Display for TriadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TriadClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TriadClass::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown triad class {s:?}")))
    }
}

/// Bit for arc `x -> y` between triple positions. Order:
/// 0→1, 1→0, 0→2, 2→0, 1→2, 2→1.
const fn arc_bit(x: usize, y: usize) -> u8 {
    match (x, y) {
        (0, 1) => 0,
        (1, 0) => 1,
        (0, 2) => 2,
        (2, 0) => 3,
        (1, 2) => 4,
        (2, 1) => 5,
        _ => panic!("not an arc between distinct positions"),
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

const ARCS: [(usize, usize); 6] = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];

fn encode(arcs: &[(usize, usize)]) -> u8 {
    arcs.iter().fold(0, |code, &(x, y)| code | (1 << arc_bit(x, y)))
}

/// Relabels position `i` as `perm[i]`.
fn permute(code: u8, perm: &[usize; 3]) -> u8 {
    ARCS.iter()
        .enumerate()
        .filter(|(bit, _)| code & (1 << bit) != 0)
        .fold(0, |acc, (_, &(x, y))| acc | (1 << arc_bit(perm[x], perm[y])))
}

fn canonical(code: u8) -> u8 {
    PERMUTATIONS
        .iter()
        .map(|p| permute(code, p))
        .min()
        .expect("six permutations")
}

fn dyad_counts(code: u8) -> (u8, u8, u8) {
    let (mut m, mut a, mut n) = (0, 0, 0);
    for (x, y) in [(0, 1), (0, 2), (1, 2)] {
        let fwd = code & (1 << arc_bit(x, y)) != 0;
        let back = code & (1 << arc_bit(y, x)) != 0;
        match (fwd, back) {
            (true, true) => m += 1,
            (false, false) => n += 1,
            _ => a += 1,
        }
    }
    (m, a, n)
}

/// Tricode → class lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TricodeTable {
    classes: [TriadClass; 64],
}

impl TricodeTable {
    /// Shared, lazily built table.
    pub fn get() -> &'static TricodeTable {
        static TABLE: OnceLock<TricodeTable> = OnceLock::new();
        TABLE.get_or_init(build_tricode_table)
    }

    #[inline]
    pub fn class(&self, code: u8) -> TriadClass {
        self.classes[code as usize]
    }
}

/// Derives the tricode table from the exemplar triads.
///
/// Each code is first bucketed by its dyad counts; buckets holding more than
/// one class (021*, 111*, 030*, 120*) are resolved by matching the code's
/// canonical form against each candidate exemplar. Panics if the result is
/// not total or not invariant under relabelling the triple.
pub fn build_tricode_table() -> TricodeTable {
    let exemplar_forms: Vec<(TriadClass, u8)> = TriadClass::ALL
        .iter()
        .map(|&c| (c, canonical(encode(c.exemplar()))))
        .collect();

    let mut forms: Vec<u8> = exemplar_forms.iter().map(|&(_, f)| f).collect();
    forms.sort_unstable();
    forms.dedup();
    assert_eq!(forms.len(), 16, "exemplars must be pairwise non-isomorphic");
    for &(class, form) in &exemplar_forms {
        assert_eq!(dyad_counts(form), class.man(), "exemplar for {class} has wrong dyads");
    }

    let mut classes = [TriadClass::T003; 64];
    for code in 0u8..64 {
        let man = dyad_counts(code);
        let candidates: Vec<(TriadClass, u8)> = exemplar_forms
            .iter()
            .copied()
            .filter(|(c, _)| c.man() == man)
            .collect();
        let class = match candidates.as_slice() {
            [(only, _)] => *only,
            _ => {
                let form = canonical(code);
                let matches: Vec<TriadClass> = candidates
                    .iter()
                    .filter(|&&(_, f)| f == form)
                    .map(|&(c, _)| c)
                    .collect();
                assert_eq!(matches.len(), 1, "tricode {code} matched {matches:?}");
                matches[0]
            }
        };
        classes[code as usize] = class;
    }

    for code in 0u8..64 {
        for p in &PERMUTATIONS {
            assert_eq!(
                classes[code as usize],
                classes[permute(code, p) as usize],
                "tricode table not permutation-consistent at {code}"
            );
        }
    }
    for class in TriadClass::ALL {
        assert!(classes.contains(&class), "class {class} never produced");
    }
    TricodeTable { classes }
}

/// 6-bit code of the arcs among `(a, b, c)` in the order
/// a→b, b→a, a→c, c→a, b→c, c→b.
pub fn tricode(g: &DirectedGraph, a: NodeId, b: NodeId, c: NodeId) -> Result<u8> {
    if a == b || b == c || a == c {
        return Err(Error::InvalidArgument(format!(
            "tricode needs distinct nodes, got ({a}, {b}, {c})"
        )));
    }
    for x in [a, b, c] {
        if !g.contains(x) {
            return Err(Error::UnknownNode(x.0 as u64));
        }
    }
    Ok(tricode_unchecked(g, a, b, c))
}

#[inline]
fn tricode_unchecked(g: &DirectedGraph, a: NodeId, b: NodeId, c: NodeId) -> u8 {
    (g.has_edge(a, b) as u8)
        | (g.has_edge(b, a) as u8) << 1
        | (g.has_edge(a, c) as u8) << 2
        | (g.has_edge(c, a) as u8) << 3
        | (g.has_edge(b, c) as u8) << 4
        | (g.has_edge(c, b) as u8) << 5
}

/// Triad counts for one graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriadCensus {
    pub counts: [u64; 16],
    pub n: usize,
}

impl TriadCensus {
    pub fn get(&self, class: TriadClass) -> u64 {
        self.counts[class.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts of the 13 feature classes in [`TriadClass::FEATURES`] order.
    pub fn feature_counts(&self) -> [u64; 13] {
        TriadClass::FEATURES.map(|c| self.get(c))
    }
}

/// Number of unordered node triples, `n (n-1) (n-2) / 6`.
pub fn triple_count(n: usize) -> u64 {
    if n < 3 {
        return 0;
    }
    let n = n as u128;
    (n * (n - 1) * (n - 2) / 6) as u64
}

/// Subquadratic triad census.
///
/// For every connected pair `v < u`, the union `S` of their neighborhoods is
/// walked once by merging the four sorted adjacency lists; that yields the
/// tricode bits directly with no further edge lookups. A triple `(v, u, w)`
/// is counted from the pair that owns it: `u < w`, or `v < w < u` when `w`
/// is not adjacent to `v`. The `n - |S| - 2` nodes outside `S` each form a
/// 012 or 102 triad with the pair.
pub fn census(g: &DirectedGraph) -> TriadCensus {
    let table = TricodeTable::get();
    let n = g.node_count();
    let mut counts = [0u64; 16];

    // Undirected adjacency with direction bits: 1 = arc out, 2 = arc in.
    let mut offsets = Vec::with_capacity(n + 1);
    let mut adj: Vec<(NodeId, u8)> = Vec::with_capacity(2 * g.edge_count());
    offsets.push(0);
    for v in g.nodes() {
        let (out, inc) = (g.out_neighbors(v), g.in_neighbors(v));
        let (mut i, mut j) = (0, 0);
        while i < out.len() || j < inc.len() {
            let w = match (out.get(i), inc.get(j)) {
                (Some(&a), Some(&b)) => a.min(b),
                (Some(&a), None) => a,
                (None, Some(&b)) => b,
                (None, None) => unreachable!(),
            };
            let o = out.get(i) == Some(&w);
            let r = inc.get(j) == Some(&w);
            i += o as usize;
            j += r as usize;
            adj.push((w, o as u8 | (r as u8) << 1));
        }
        offsets.push(adj.len());
    }
    let nbrs = |v: NodeId| &adj[offsets[v.index()]..offsets[v.index() + 1]];

    for v in g.nodes() {
        let av = nbrs(v);
        for &(u, d_vu) in av {
            if u <= v {
                continue;
            }
            let au = nbrs(u);
            // Arc bits of the pair: v->u is bit 0, u->v bit 1.
            let pair_code = d_vu;
            let dyad = if d_vu == 3 {
                TriadClass::T102
            } else {
                TriadClass::T012
            };

            let (mut i, mut j) = (0, 0);
            let mut s_size = 0u64;
            while i < av.len() || j < au.len() {
                let (w, dv, du) = match (av.get(i), au.get(j)) {
                    (Some(&(a, da)), Some(&(b, db))) => {
                        if a < b {
                            i += 1;
                            (a, da, 0)
                        } else if b < a {
                            j += 1;
                            (b, 0, db)
                        } else {
                            i += 1;
                            j += 1;
                            (a, da, db)
                        }
                    }
                    (Some(&(a, da)), None) => {
                        i += 1;
                        (a, da, 0)
                    }
                    (None, Some(&(b, db))) => {
                        j += 1;
                        (b, 0, db)
                    }
                    (None, None) => unreachable!(),
                };
                if w == u || w == v {
                    continue;
                }
                s_size += 1;
                if u < w || (v < w && w < u && dv == 0) {
                    // v->w, w->v, u->w, w->u occupy bits 2..=5.
                    let code = pair_code | dv << 2 | du << 4;
                    counts[table.class(code).index()] += 1;
                }
            }
            counts[dyad.index()] += n as u64 - s_size - 2;
        }
    }

    let connected: u64 = counts[1..].iter().sum();
    counts[TriadClass::T003.index()] = triple_count(n) - connected;
    TriadCensus { counts, n }
}

/// Largest graph [`census_bruteforce`] accepts.
pub const BRUTEFORCE_LIMIT: usize = 200;

/// Classifies every triple directly. Test oracle for [`census`].
pub fn census_bruteforce(g: &DirectedGraph) -> Result<TriadCensus> {
    let n = g.node_count();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            nodes: n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let table = TricodeTable::get();
    let mut counts = [0u64; 16];
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            for c in b + 1..n as u32 {
                let code = tricode_unchecked(g, NodeId(a), NodeId(b), NodeId(c));
                counts[table.class(code).index()] += 1;
            }
        }
    }
    Ok(TriadCensus { counts, n })
}
