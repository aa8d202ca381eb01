//! Named Cartan types and the shipped foldings.
//!
//! Type names are `X<n>` for finite types (`A3`, `F4`, ...) and `X<n>~` for
//! untwisted affine types (`C3~`, `D5~`, ...). Finite types are labelled
//! `1..=n`, affine types `0..=n`.

use crate::cartan::{aligned_constraints, minimal_gamma, CartanMatrix, FoldingSpec};
use crate::error::{Error, Result};
use crate::monomial::CArray;
use crate::virtualization::VirtualContext;

/// Names accepted by [`folding`].
pub const FOLDINGS: [&str; 5] = ["C2-A3", "B2-A3", "F4-E6", "G2-D4", "C3~-D5~"];

fn edge(rows: &mut [Vec<i64>], i: usize, j: usize, cij: i64, cji: i64) {
    rows[i][j] = cij;
    rows[j][i] = cji;
}

fn identity_rows(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 2 } else { 0 }).collect()).collect()
}

fn path_rows(n: usize) -> Vec<Vec<i64>> {
    let mut rows = identity_rows(n);
    for i in 1..n {
        edge(&mut rows, i - 1, i, -1, -1);
    }
    rows
}

fn finite_rows(family: char, n: usize) -> Option<Vec<Vec<i64>>> {
    let rows = match (family, n) {
        ('A', n) if n >= 1 => path_rows(n),
        ('B', n) if n >= 2 => {
            let mut rows = path_rows(n);
            rows[n - 1][n - 2] = -2;
            rows
        }
        ('C', n) if n >= 2 => {
            let mut rows = path_rows(n);
            rows[n - 2][n - 1] = -2;
            rows
        }
        ('D', n) if n >= 4 => {
            let mut rows = path_rows(n);
            edge(&mut rows, n - 2, n - 1, 0, 0);
            edge(&mut rows, n - 3, n - 1, -1, -1);
            rows
        }
        ('E', n) if (6..=8).contains(&n) => {
            let mut rows = identity_rows(n);
            edge(&mut rows, 0, 2, -1, -1);
            edge(&mut rows, 1, 3, -1, -1);
            for i in 2..n - 1 {
                edge(&mut rows, i, i + 1, -1, -1);
            }
            rows
        }
        ('F', 4) => vec![vec![2, -1, 0, 0], vec![-1, 2, -1, 0], vec![0, -2, 2, -1], vec![0, 0, -1, 2]],
        ('G', 2) => vec![vec![2, -3], vec![-1, 2]],
        _ => return None,
    };
    Some(rows)
}

fn affine_rows(family: char, n: usize) -> Option<Vec<Vec<i64>>> {
    let rows = match (family, n) {
        ('A', 1) => vec![vec![2, -2], vec![-2, 2]],
        ('A', n) if n >= 2 => {
            let mut rows = path_rows(n + 1);
            edge(&mut rows, 0, n, -1, -1);
            rows
        }
        ('C', n) if n >= 2 => {
            let mut rows = path_rows(n + 1);
            rows[1][0] = -2;
            rows[n - 1][n] = -2;
            rows
        }
        ('D', n) if n >= 4 => {
            let mut rows = identity_rows(n + 1);
            edge(&mut rows, 0, 2, -1, -1);
            for i in 1..n - 2 {
                edge(&mut rows, i, i + 1, -1, -1);
            }
            edge(&mut rows, n - 2, n - 1, -1, -1);
            edge(&mut rows, n - 2, n, -1, -1);
            rows
        }
        _ => return None,
    };
    Some(rows)
}

/// Resolves a type name such as `A3`, `F4` or `C3~` to its Cartan matrix.
pub fn cartan_type(name: &str) -> Result<CartanMatrix> {
    let unknown = || Error::UnknownType(name.to_string());
    let trimmed = name.trim();
    let (body, affine) = match trimmed.strip_suffix('~') {
        Some(body) => (body, true),
        None => (trimmed, false),
    };
    let mut chars = body.chars();
    let family = chars.next().ok_or_else(unknown)?.to_ascii_uppercase();
    let n: usize = chars.as_str().parse().map_err(|_| unknown())?;
    let rows = if affine { affine_rows(family, n) } else { finite_rows(family, n) }.ok_or_else(unknown)?;
    let offset = if affine { 0 } else { 1 };
    Ok(CartanMatrix::new(rows)?.with_label_offset(offset))
}

fn fibers_to_phi(target_rank: usize, fibers: &[&[usize]]) -> Vec<usize> {
    let mut phi = vec![usize::MAX; target_rank];
    for (s, fiber) in fibers.iter().enumerate() {
        for &t in fiber.iter() {
            phi[t] = s;
        }
    }
    phi
}

/// A folding with `gamma` taken as the minimal positive solution of the aligned condition.
fn build(source: &str, target: &str, fibers: &[&[usize]], c: CArray, c_hat: CArray) -> Result<VirtualContext> {
    let source = cartan_type(source)?;
    let target = cartan_type(target)?;
    let phi = fibers_to_phi(target.rank(), fibers);
    let constraints = aligned_constraints(&source, &target, &phi)?;
    let gamma = minimal_gamma(&constraints, source.rank())
        .ok_or_else(|| Error::InvalidFolding("aligned condition has no positive solution".into()))?;
    let spec = FoldingSpec::validated(source, target, phi, gamma)?;
    VirtualContext::new(spec, c, c_hat)
}

/// The shipped foldings, each with a compatible pair of c-arrays.
///
/// Fibers below are 0-based internal indices.
pub fn folding(name: &str) -> Result<VirtualContext> {
    match name.trim() {
        "C2-A3" | "B2-A3" => {
            let c = CArray::kashiwara(vec![vec![0, 0], vec![1, 0]])?;
            let c_hat = CArray::kashiwara(vec![vec![0, 0, 0], vec![1, 0, 1], vec![1, 0, 0]])?;
            build(&name.trim()[..2], "A3", &[&[0, 2], &[1]], c, c_hat)
        }
        "F4-E6" => {
            let c_hat = CArray::kashiwara(vec![
                vec![0, 1, 1, 1, 1, 1],
                vec![0, 0, 1, 0, 1, 1],
                vec![0, 0, 0, 1, 1, 1],
                vec![0, 1, 0, 0, 0, 1],
                vec![0, 0, 0, 1, 0, 0],
                vec![0, 0, 0, 0, 1, 0],
            ])?;
            build("F4", "E6", &[&[0, 5], &[2, 4], &[3], &[1]], CArray::upper_triangular(4), c_hat)
        }
        "G2-D4" => {
            let mut rows = CArray::upper_triangular(4).rows();
            for j in [0, 2, 3] {
                rows[1][j] = 1;
                rows[j][1] = 0;
            }
            build("G2", "D4", &[&[1], &[0, 2, 3]], CArray::upper_triangular(2), CArray::kashiwara(rows)?)
        }
        "C3~-D5~" => build(
            "C3~",
            "D5~",
            &[&[0, 1], &[2], &[3], &[4, 5]],
            CArray::upper_triangular(4),
            CArray::upper_triangular(6),
        ),
        other => Err(Error::UnknownFolding(other.to_string())),
    }
}
