//! Strategy sets for one iteration: each strategy is a row of a factorial or
//! orthogonal-array design over the active factors.

use crate::error::{Error, Result};
use crate::factors::{FactorRef, Level};
use crate::game::Strategy;

/// Level-index rows of a design with `k` factors at `levels` levels and at
/// most `max_runs` rows.
///
/// Uses the full factorial when it fits. Otherwise two-level factors get a
/// regular fractional factorial whose generators are three-factor (then
/// higher, then two-factor) interactions of the base columns, and four-level
/// factors get the strength-2 orthogonal array built over GF(4).
pub fn design_rows(k: usize, levels: usize, max_runs: usize) -> Result<Vec<Vec<usize>>> {
    if k == 0 {
        return Err(Error::Design("design needs at least one factor".into()));
    }
    if levels < 2 {
        return Err(Error::Design(format!("design needs >= 2 levels, got {levels}")));
    }
    if let Some(total) = levels.checked_pow(k as u32) {
        if total <= max_runs {
            return Ok(full_factorial(k, levels));
        }
    }
    match levels {
        2 => fractional_two_level(k, max_runs),
        4 if max_runs >= 16 => gf4_array(k),
        _ => Err(Error::Design(format!(
            "no design for {k} factors at {levels} levels within {max_runs} runs"
        ))),
    }
}

/// Largest factor count [`design_rows`] supports for `levels` and `max_runs`.
pub fn design_capacity(levels: usize, max_runs: usize) -> usize {
    match levels {
        2 if max_runs >= 2 => {
            let b = usize::BITS - 1 - max_runs.leading_zeros();
            (1usize << b) - 1
        }
        4 if max_runs >= 16 => 5,
        _ => {
            let mut k = 0;
            while levels.checked_pow(k as u32 + 1).is_some_and(|t| t <= max_runs) {
                k += 1;
            }
            k
        }
    }
}

fn full_factorial(k: usize, levels: usize) -> Vec<Vec<usize>> {
    let total = levels.pow(k as u32);
    (0..total)
        .map(|mut r| {
            // First factor varies slowest, as in standard-order tables.
            let mut row = vec![0; k];
            for slot in row.iter_mut().rev() {
                *slot = r % levels;
                r /= levels;
            }
            row
        })
        .collect()
}

fn fractional_two_level(k: usize, max_runs: usize) -> Result<Vec<Vec<usize>>> {
    let cap = design_capacity(2, max_runs);
    if k > cap {
        return Err(Error::Design(format!(
            "{k} two-level factors exceed the {cap}-factor capacity of {max_runs} runs"
        )));
    }
    let b = (cap + 1).trailing_zeros() as usize;
    let runs = 1usize << b;
    let full_mask = (1u32 << b) - 1;
    let mut generators: Vec<u32> = Vec::new();
    if k - b == 1 {
        generators.push(full_mask);
    } else {
        let mut by_order: Vec<u32> = (1..=full_mask).filter(|m| m.count_ones() >= 2).collect();
        let rank = |m: &u32| match m.count_ones() {
            3 => 0,
            2 => 2,
            _ => 1,
        };
        by_order.sort_by_key(|m| (rank(m), m.count_ones(), m.reverse_bits()));
        generators.extend(by_order.into_iter().take(k - b));
    }
    Ok((0..runs)
        .map(|r| {
            // Base column j is bit (b-1-j) of the run index, so the base
            // factors follow standard order.
            let sign = |mask: u32| -> usize {
                let mut parity = 0;
                for j in 0..b {
                    if mask & (1 << j) != 0 {
                        parity ^= (r >> (b - 1 - j)) & 1;
                    }
                }
                parity
            };
            let mut row: Vec<usize> = (0..b).map(|j| sign(1 << j)).collect();
            row.extend(generators.iter().map(|&g| sign(g)));
            row
        })
        .collect())
}

fn gf4_mul(a: usize, b: usize) -> usize {
    const T: [[usize; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
    T[a][b]
}

fn gf4_array(k: usize) -> Result<Vec<Vec<usize>>> {
    if k > 5 {
        return Err(Error::Design(format!(
            "{k} four-level factors exceed the 5-factor capacity of 16 runs"
        )));
    }
    Ok((0..16)
        .map(|r| {
            let (x, y) = (r / 4, r % 4);
            let cols = [x, y, x ^ y, x ^ gf4_mul(2, y), x ^ gf4_mul(3, y)];
            cols[..k].to_vec()
        })
        .collect())
}

/// Strategies for `factors` at `levels` levels (2 or 4).
pub fn build_strategies(factors: &[FactorRef], levels: usize, max_runs: usize) -> Result<Vec<Strategy>> {
    let grid = Level::grid(levels)?;
    let rows = design_rows(factors.len(), levels, max_runs)?;
    Ok(rows
        .into_iter()
        .map(|row| {
            Strategy::from_levels(factors.iter().zip(row).map(|(&f, l)| (f, grid[l])).collect())
        })
        .collect())
}
