//! Regular subdivision of the level-2 points of `B₂`.
//!
//! The eight points of `B₂(2)` in shifted coordinates are lifted by
//! `A² + B² + C² + D²`. Each affinely independent 5-subset spans a
//! hyperplane in the lifted space; it supports a lower face when every
//! lifted point lies on or above it, and the cell is the set of points on
//! it. Cells with more than five points are kept as they are.

use num_rational::Ratio;
use serde::Serialize;

use crate::enumerate::enumerate_level;
use crate::error::{Error, Result};
use crate::graph::build_b2;
use crate::weighting::{b2_transform, B2Coords};

type Q = Ratio<i64>;

/// Solves `a x = b` exactly; `None` if `a` is singular.
fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != Q::from(0))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && a[r][col] != Q::from(0) {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
                let v = b[col];
                b[r] -= f * v;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Basis of the rational kernel of `rows` (each of length `n`).
fn kernel(rows: &[Vec<i64>], n: usize) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Q::from(x)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&r| m[r][col] != Q::from(0)) else {
            continue;
        };
        m.swap(row, p);
        let lead = m[row][col];
        for c in 0..n {
            m[row][c] /= lead;
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != Q::from(0) {
                let f = m[r][col];
                for c in 0..n {
                    let v = m[row][c];
                    m[r][c] -= f * v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Q::from(0); n];
            v[free] = Q::from(1);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free];
            }
            v
        })
        .collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive integer vector on the line through `v`, first nonzero entry positive.
fn primitive(v: &[Q]) -> Vec<i64> {
    let den = v.iter().fold(1i64, |l, x| l / gcd(l, *x.denom()) * x.denom());
    let ints: Vec<i64> = v.iter().map(|x| (x * Q::from(den)).to_integer()).collect();
    let g = ints.iter().fold(0, |g, &x| gcd(g, x));
    let sign = ints.iter().find(|&&x| x != 0).map_or(1, |x| x.signum());
    ints.iter().map(|x| sign * x / g.max(1)).collect()
}

fn height(p: &B2Coords) -> i64 {
    p.0.iter().map(|x| x * x).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftedPoint {
    pub coords: String,
    pub weighting: String,
    pub height: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub points: Vec<String>,
    /// Primitive generators of the integer relations among the cell's points.
    pub relations: Vec<Vec<i64>>,
    /// True when the only relation is `[0001] + [1000] - [0000] - [1001]`.
    pub single_binomial: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadrantReport {
    pub points: Vec<LiftedPoint>,
    pub cells: Vec<Cell>,
    pub binomial_found: bool,
    pub pass: bool,
}

fn coords_of(points: &[B2Coords], c: [i64; 4]) -> Option<usize> {
    points.iter().position(|p| p.0 == c)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for i in start..n {
            acc.push(i);
            rec(i + 1, n, k, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Maximal cells of the regular subdivision, as sorted index lists.
pub fn lower_cells(points: &[B2Coords], heights: &[i64]) -> Vec<Vec<usize>> {
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for s in subsets(points.len(), 5) {
        let a: Vec<Vec<Q>> = s
            .iter()
            .map(|&i| {
                let mut row: Vec<Q> = points[i].0.iter().map(|&x| Q::from(x)).collect();
                row.push(Q::from(1));
                row
            })
            .collect();
        let b: Vec<Q> = s.iter().map(|&i| Q::from(heights[i])).collect();
        let Some(c) = solve(a, b) else { continue };
        let affine = |p: &B2Coords| -> Q {
            p.0.iter().zip(&c).map(|(&x, k)| Q::from(x) * k).sum::<Q>() + c[4]
        };
        let mut cell = Vec::new();
        let mut below = false;
        for (i, p) in points.iter().enumerate() {
            let diff = Q::from(heights[i]) - affine(p);
            if diff < Q::from(0) {
                below = true;
                break;
            }
            if diff == Q::from(0) {
                cell.push(i);
            }
        }
        if !below && !cells.contains(&cell) {
            cells.push(cell);
        }
    }
    cells.sort();
    cells
}

pub fn b2_quadrant_analysis() -> Result<QuadrantReport> {
    let g = build_b2();
    let level2 = enumerate_level(&g, 2)?;
    if level2.len() != 8 {
        return Err(Error::Invariant(format!("B2(2) has {} points", level2.len())));
    }
    let points: Vec<B2Coords> = level2
        .iter()
        .map(|w| b2_transform(&g, w))
        .collect::<Result<_>>()?;
    let heights: Vec<i64> = points.iter().map(height).collect();

    let idx = |c| coords_of(&points, c).ok_or_else(|| Error::Invariant(format!("{c:?} missing")));
    let quad = [
        idx([0, 0, 0, 1])?,
        idx([1, 0, 0, 0])?,
        idx([0, 0, 0, 0])?,
        idx([1, 0, 0, 1])?,
    ];

    let mut cells = Vec::new();
    for cell in lower_cells(&points, &heights) {
        let rows: Vec<Vec<i64>> = (0..5)
            .map(|r| {
                cell.iter()
                    .map(|&i| if r == 0 { 1 } else { points[i].0[r - 1] })
                    .collect()
            })
            .collect();
        let relations: Vec<Vec<i64>> = kernel(&rows, cell.len())
            .iter()
            .map(|v| primitive(v))
            .collect();
        let expected: Vec<i64> = cell
            .iter()
            .map(|i| match quad.iter().position(|q| q == i) {
                Some(0) | Some(1) => 1,
                Some(_) => -1,
                None => 0,
            })
            .collect();
        let single_binomial = relations.len() == 1 && relations[0] == primitive(
            &expected.iter().map(|&x| Q::from(x)).collect::<Vec<_>>(),
        );
        cells.push(Cell {
            points: cell.iter().map(|&i| points[i].to_string()).collect(),
            relations,
            single_binomial,
        });
    }

    let binomial_found = {
        let gens = crate::enumerate::generators(&g)?.all();
        let moves = crate::relations::find_binomial_relations(&g, &gens, 4, 10_000_000)?;
        moves.contains(&crate::relations::b2_binomial()?)
    };
    let pass = binomial_found && !cells.is_empty() && cells.iter().all(|c| c.single_binomial);
    Ok(QuadrantReport {
        points: points
            .iter()
            .zip(&level2)
            .zip(&heights)
            .map(|((p, w), &h)| LiftedPoint {
                coords: p.to_string(),
                weighting: w.to_string(),
                height: h,
            })
            .collect(),
        cells,
        binomial_found,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heights() {
        assert_eq!(height(&B2Coords([0, 0, 0, 0])), 0);
        assert_eq!(height(&B2Coords([1, 0, 0, 1])), 2);
    }

    #[test]
    fn unit_square_relation() {
        // columns (0,0), (1,0), (0,1), (1,1), homogenized
        let rows = vec![vec![1, 1, 1, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]];
        let k = kernel(&rows, 4);
        assert_eq!(k.len(), 1);
        assert_eq!(primitive(&k[0]), vec![1, -1, -1, 1]);
    }

    #[test]
    fn solve_detects_singular() {
        let a = vec![vec![Q::from(1), Q::from(2)], vec![Q::from(2), Q::from(4)]];
        assert!(solve(a, vec![Q::from(1), Q::from(2)]).is_none());
    }

    #[test]
    fn analysis() {
        let r = b2_quadrant_analysis().unwrap();
        assert_eq!(r.points.len(), 8);
        assert!(r.binomial_found);
        assert!(r.pass);
        // four cells: the square {0000, 0001, 1000, 1001} with one of
        // [0 0 ±1 0] and one of [1 ±1 0 1]
        assert_eq!(r.cells.len(), 4);
        let square = ["[0 0 0 0]", "[0 0 0 1]", "[1 0 0 0]", "[1 0 0 1]"];
        for c in &r.cells {
            assert_eq!(c.points.len(), 6);
            assert!(square.iter().all(|s| c.points.iter().any(|p| p == s)));
        }
    }
}
