//! Exact combinatorial layer: brackets, the four-index volume-form symbol,
//! the squared-area quantities `D3`/`D4`, and enumeration of the index
//! selections that weight each face integral.

use crate::Rat;
use num::{BigInt, BigRational};

/// Exponent pair (p, r) of a monomial x^p y^r.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentPair {
    pub p: i64,
    pub r: i64,
}

impl ExponentPair {
    pub fn new(p: i64, r: i64) -> Self {
        Self { p, r }
    }
}

/// Antisymmetric bracket `[AB] = p_A r_B - p_B r_A`.
pub fn bracket(a: ExponentPair, b: ExponentPair) -> i64 {
    a.p * b.r - b.p * a.r
}

/// The four-index symbol (ijkl) = (p_i r_k - p_k r_i)(p_i - p_j)(r_k - r_l)
/// arising as the lowest-order coefficient in the wedge of two curvature
/// forms. Vanishes whenever i = j, k = l, or i = k.
pub fn symbol_ijkl(i: ExponentPair, j: ExponentPair, k: ExponentPair, l: ExponentPair) -> i64 {
    (i.p * k.r - k.p * i.r) * (i.p - j.p) * (k.r - l.r)
}

/// `D3(i,j,k) = ([ij] - [ik] + [jk])^2`, the squared area of the
/// parallelogram spanned by the three points. Symmetric; zero exactly on
/// collinear triples.
pub fn d3(i: ExponentPair, j: ExponentPair, k: ExponentPair) -> i64 {
    let s = bracket(i, j) - bracket(i, k) + bracket(j, k);
    s * s
}

/// D4 on an unordered selection of four points, at least three distinct:
/// the cyclic sum of D3 over the four triples, halved when an index repeats
/// (so that D4(i,j,k,k) = D3(i,j,k)).
pub fn d4(i: ExponentPair, j: ExponentPair, k: ExponentPair, l: ExponentPair) -> Rat {
    let s = d3(i, j, k) + d3(j, k, l) + d3(k, l, i) + d3(l, i, j);
    let all_distinct = i != j && i != k && i != l && j != k && j != l && k != l;
    if all_distinct {
        BigRational::from_integer(BigInt::from(s))
    } else {
        BigRational::new(BigInt::from(s), BigInt::from(2))
    }
}

/// One unordered multiset {i,j,k,l} of face-member indices surviving the
/// D4 filter, with its exponent sums P and R.
#[derive(Clone, Debug)]
pub struct IndexSelection {
    /// Sorted multiset of indices into the face member list.
    pub indices: [usize; 4],
    pub d4: Rat,
    pub sum_p: i64,
    pub sum_r: i64,
}

/// Enumerate every unordered size-4 multiset of member indices with at
/// least three distinct entries and nonzero D4. For m members with no
/// collinear triple this yields C(m,4) + 3*C(m,3) selections.
///
/// The input pairs must be pairwise distinct; selections are emitted in a
/// fixed deterministic order (all-distinct quadruples first, then repeated
/// triples).
pub fn enumerate_selections(members: &[ExponentPair]) -> Vec<IndexSelection> {
    let m = members.len();
    let mut out = Vec::new();
    let mut push = |idx: [usize; 4]| {
        let pts = idx.map(|t| members[t]);
        let v = d4(pts[0], pts[1], pts[2], pts[3]);
        if !num::Zero::is_zero(&v) {
            out.push(IndexSelection {
                indices: idx,
                d4: v,
                sum_p: pts.iter().map(|e| e.p).sum(),
                sum_r: pts.iter().map(|e| e.r).sum(),
            });
        }
    };
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                for l in k + 1..m {
                    push([i, j, k, l]);
                }
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                for rep in [i, j, k] {
                    let mut idx = [i, j, k, rep];
                    idx.sort_unstable();
                    push(idx);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::ToPrimitive;

    fn ep(p: i64, r: i64) -> ExponentPair {
        ExponentPair::new(p, r)
    }

    #[test]
    fn bracket_values() {
        assert_eq!(bracket(ep(1, 0), ep(0, 1)), 1);
        assert_eq!(bracket(ep(2, 3), ep(2, 3)), 0);
        assert_eq!(bracket(ep(1, 2), ep(3, 4)), -2);
    }

    #[test]
    fn bracket_antisymmetry() {
        for ap in 0..7 {
            for ar in 0..7 {
                for bp in 0..7 {
                    for br in 0..7 {
                        let a = ep(ap, ar);
                        let b = ep(bp, br);
                        assert_eq!(bracket(a, b), -bracket(b, a));
                    }
                }
            }
        }
    }

    #[test]
    fn symbol_vanishes_on_equal_slots() {
        let pts = [ep(0, 0), ep(1, 0), ep(0, 1), ep(2, 1)];
        for &i in &pts {
            for &j in &pts {
                for &k in &pts {
                    assert_eq!(symbol_ijkl(i, j, i, k), 0, "i = k must vanish");
                    assert_eq!(symbol_ijkl(i, i, j, k), 0, "i = j must vanish");
                    assert_eq!(symbol_ijkl(i, j, k, k), 0, "k = l must vanish");
                }
            }
        }
    }

    #[test]
    fn symbol_two_index_cancellation() {
        for ip in 0..5 {
            for ir in 0..5 {
                for jp in 0..5 {
                    for jr in 0..5 {
                        let i = ep(ip, ir);
                        let j = ep(jp, jr);
                        assert_eq!(symbol_ijkl(i, j, j, i) + symbol_ijkl(j, i, i, j), 0);
                    }
                }
            }
        }
    }

    /// Factored form equals the raw expansion of the volume-form bracket.
    #[test]
    fn symbol_factored_equals_expanded() {
        let grid = 0..5i64;
        for ip in grid.clone() {
            for ir in grid.clone() {
                for jp in grid.clone() {
                    for jr in grid.clone() {
                        for kp in grid.clone() {
                            for kr in grid.clone() {
                                for lp in grid.clone() {
                                    for lr in grid.clone() {
                                        let expanded = (ip * ip - ip * jp) * (kr * kr - kr * lr)
                                            - (ip * ir - jp * ir) * (kp * kr - kp * lr);
                                        let i = ep(ip, ir);
                                        let j = ep(jp, jr);
                                        let k = ep(kp, kr);
                                        let l = ep(lp, lr);
                                        assert_eq!(symbol_ijkl(i, j, k, l), expanded);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn d3_examples() {
        assert_eq!(d3(ep(0, 0), ep(1, 0), ep(0, 1)), 1);
        assert_eq!(d3(ep(0, 0), ep(1, 0), ep(2, 0)), 0, "collinear triple");
    }

    #[test]
    fn d3_is_squared_doubled_triangle_area() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 9) as i64
        };
        for _ in 0..500 {
            let i = ep(next(), next());
            let j = ep(next(), next());
            let k = ep(next(), next());
            let det = (j.p - i.p) * (k.r - i.r) - (k.p - i.p) * (j.r - i.r);
            assert_eq!(d3(i, j, k), det * det);
            // full permutation symmetry
            let base = d3(i, j, k);
            assert_eq!(d3(i, k, j), base);
            assert_eq!(d3(j, i, k), base);
            assert_eq!(d3(j, k, i), base);
            assert_eq!(d3(k, i, j), base);
            assert_eq!(d3(k, j, i), base);
        }
    }

    #[test]
    fn d4_collapses_to_d3_on_repeat() {
        let i = ep(0, 0);
        let j = ep(1, 0);
        let k = ep(0, 1);
        assert_eq!(d4(i, j, k, k).to_i64().unwrap(), 1);
        assert_eq!(d4(i, j, k, k), d4(k, j, i, k));
    }

    #[test]
    fn d4_vanishes_on_collinear() {
        assert!(num::Zero::is_zero(&d4(
            ep(0, 0),
            ep(1, 0),
            ep(2, 0),
            ep(3, 0)
        )));
    }

    #[test]
    fn d4_symmetric_under_argument_permutations() {
        let mut state = 0x6a09e667f3bcc909u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 7) as i64
        };
        for _ in 0..100 {
            let pts = [
                ep(next(), next()),
                ep(next(), next()),
                ep(next(), next()),
                ep(next(), next()),
            ];
            let base = d4(pts[0], pts[1], pts[2], pts[3]);
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for e in 0..4 {
                            let mut seen = [false; 4];
                            [a, b, c, e].iter().for_each(|&t| seen[t] = true);
                            if seen == [true; 4] {
                                assert_eq!(d4(pts[a], pts[b], pts[c], pts[e]), base);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn selection_census() {
        // no collinear triple among members: C(m,4) + 3 C(m,3)
        let members = vec![ep(0, 0), ep(1, 0), ep(0, 1), ep(1, 2)];
        let sels = enumerate_selections(&members);
        assert_eq!(sels.len(), 1 + 3 * 4);
        // two members admit no selection
        assert!(enumerate_selections(&[ep(0, 0), ep(1, 0)]).is_empty());
        // three non-collinear members: one per choice of repeated index
        let sels = enumerate_selections(&[ep(0, 0), ep(1, 0), ep(0, 1)]);
        assert_eq!(sels.len(), 3);
        for s in &sels {
            assert_eq!(s.d4.to_i64().unwrap(), 1);
        }
    }

    #[test]
    fn selections_unique_multisets() {
        let members = vec![ep(0, 0), ep(1, 0), ep(2, 0), ep(0, 1), ep(1, 1)];
        let sels = enumerate_selections(&members);
        let mut seen = std::collections::HashSet::new();
        for s in &sels {
            assert!(seen.insert(s.indices), "duplicate multiset {:?}", s.indices);
            let distinct: std::collections::HashSet<_> = s.indices.iter().collect();
            assert!(distinct.len() >= 3);
        }
        assert_eq!(sels.len(), 32);
    }
}
