//! Reference Betti-number computations for small filtered flag complexes, done
//! the slow, obvious way: enumerate all simplices below a scale, build dense
//! boundary matrices over the prime field `F_p`, and take ranks by Gaussian
//! elimination. Intended strictly as an independent oracle in test suites;
//! everything here is O(2^n)-ish and only suitable for a handful of points.

/// Rank of a dense matrix over `F_p` (`p` prime). Entries are taken mod `p`.
pub fn rank_mod_p(mut m: Vec<Vec<u32>>, p: u32) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    for row in &mut m {
        assert_eq!(row.len(), cols, "ragged matrix");
        for v in row.iter_mut() {
            *v %= p;
        }
    }
    let inv = |a: u32| -> u32 {
        // Fermat: a^(p-2) mod p; p is small and prime, a nonzero.
        let mut acc: u64 = 1;
        let mut base: u64 = a as u64 % p as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        acc as u32
    };
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] % p != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let s = inv(m[rank][col]);
        for c in col..cols {
            m[rank][c] = (m[rank][c] as u64 * s as u64 % p as u64) as u32;
        }
        for r in 0..rows {
            if r != rank && m[r][col] % p != 0 {
                let f = m[r][col] % p;
                for c in col..cols {
                    let sub = (f as u64 * m[rank][c] as u64) % p as u64;
                    m[r][c] = ((m[r][c] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Flag complex of a dissimilarity matrix at `scale`: a simplex is present iff
/// every pairwise distance among its vertices is strictly below `scale`.
/// Vertices are always present. Returns (edges, triangles) as sorted vertex
/// tuples, enumerated independently of any production code path.
pub fn flag_complex(dist: &[Vec<f64>], scale: f64) -> (Vec<[usize; 2]>, Vec<[usize; 3]>) {
    let n = dist.len();
    let mut edges = Vec::new();
    let mut triangles = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if dist[a][b] < scale {
                edges.push([a, b]);
            }
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if dist[a][b] >= scale {
                continue;
            }
            for c in (b + 1)..n {
                if dist[a][c] < scale && dist[b][c] < scale {
                    triangles.push([a, b, c]);
                }
            }
        }
    }
    (edges, triangles)
}

/// Betti numbers (b0, b1) over `F_p` of the flag complex at `scale`, built
/// from scratch: b0 = #V - rank d1, b1 = #E - rank d1 - rank d2.
///
/// Using triangles as the top dimension means b1 here is the honest first
/// Betti number of the 2-skeleton, which is what a dimension-1 persistence
/// barcode reports.
pub fn betti_01(dist: &[Vec<f64>], scale: f64, p: u32) -> (usize, usize) {
    let n = dist.len();
    let (edges, triangles) = flag_complex(dist, scale);
    // d1: rows = vertices, cols = edges, [a,b] -> b - a.
    let d1: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            edges
                .iter()
                .map(|e| {
                    if e[1] == v {
                        1
                    } else if e[0] == v {
                        p - 1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    // d2: rows = edges, cols = triangles, [a,b,c] -> [b,c] - [a,c] + [a,b].
    let edge_pos = |a: usize, b: usize| edges.iter().position(|e| e == &[a, b]).unwrap();
    let mut d2 = vec![vec![0u32; triangles.len()]; edges.len()];
    for (t, tri) in triangles.iter().enumerate() {
        let [a, b, c] = *tri;
        d2[edge_pos(b, c)][t] = 1;
        d2[edge_pos(a, c)][t] = p - 1;
        d2[edge_pos(a, b)][t] = 1;
    }
    let r1 = rank_mod_p(d1, p);
    let r2 = rank_mod_p(d2, p);
    (n - r1, edges.len() - r1 - r2)
}
