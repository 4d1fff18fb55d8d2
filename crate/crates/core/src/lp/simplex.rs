//! Dense exact-rational primal simplex for `max c'x, Ax <= b, x >= 0` with
//! `b >= 0`, so the slack basis is feasible and no phase-1 is needed.
//! Bland's rule on both the entering and leaving choice guarantees
//! termination.

use crate::rational::Rat;
use num_traits::Zero;

/// A `<=` constraint given as sparse coefficients over the variables.
pub struct Row {
    pub coeffs: Vec<(usize, Rat)>,
    pub rhs: Rat,
}

pub struct SimplexResult {
    pub x: Vec<Rat>,
    pub objective: Rat,
}

pub fn maximize(objective: &[Rat], rows: &[Row]) -> SimplexResult {
    let n = objective.len();
    let m = rows.len();
    let total = n + m;

    // tableau[i] has `total` coefficients plus the rhs at index `total`.
    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        debug_assert!(row.rhs >= Rat::zero());
        let mut r = vec![Rat::zero(); total + 1];
        for (j, c) in &row.coeffs {
            r[*j] = c.clone();
        }
        r[n + i] = Rat::from_integer(1.into());
        r[total] = row.rhs.clone();
        tab.push(r);
    }
    // Reduced-cost row; z[total] is the negated objective value.
    let mut z = vec![Rat::zero(); total + 1];
    for (j, c) in objective.iter().enumerate() {
        z[j] = c.clone();
    }
    let mut basis: Vec<usize> = (n..total).collect();

    loop {
        // Bland: smallest-index column with positive reduced cost.
        let Some(enter) = (0..total).find(|&j| z[j] > Rat::zero()) else {
            break;
        };
        // Ratio test; ties broken by smallest basic variable index.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..m {
            if tab[i][enter] > Rat::zero() {
                let ratio = &tab[i][total] / &tab[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let leave = leave.expect("bounded polytope: ratio test cannot fail");

        // Pivot on (leave, enter).
        let piv = tab[leave][enter].clone();
        for v in tab[leave].iter_mut() {
            *v /= &piv;
        }
        for i in 0..m {
            if i != leave && !tab[i][enter].is_zero() {
                let factor = tab[i][enter].clone();
                for j in 0..=total {
                    let delta = &factor * &tab[leave][j];
                    tab[i][j] -= delta;
                }
            }
        }
        if !z[enter].is_zero() {
            let factor = z[enter].clone();
            for j in 0..=total {
                let delta = &factor * &tab[leave][j];
                z[j] -= delta;
            }
        }
        basis[leave] = enter;
    }

    let mut x = vec![Rat::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = tab[i][total].clone();
        }
    }
    let objective_value = -z[total].clone();
    SimplexResult { x, objective: objective_value }
}
