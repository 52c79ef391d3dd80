use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Conjunction of clauses over variables `1..=num_variables`; a negative
/// entry is a negated variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_variables: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }

    /// `assignment[i]` is the value of variable `i + 1`.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = assignment[lit.unsigned_abs() as usize - 1];
                if lit > 0 {
                    value
                } else {
                    !value
                }
            })
        })
    }
}

/// Binomial CNF encoding of `AtLeast(k)` over variables `1..=n`: at least `k`
/// hold iff every subset of `n - k + 1` variables contains a true one.
pub fn atleast_to_cnf(k: usize, n: usize) -> Result<CnfFormula> {
    if !(1 <= k && k <= n && n <= 20) {
        return Err(Error::Validation(format!("atleast_to_cnf needs 1 <= k <= n <= 20, got k={k}, n={n}")));
    }
    let size = n - k + 1;
    let mut clauses = Vec::new();
    let mut subset: Vec<usize> = (0..size).collect();
    loop {
        clauses.push(subset.iter().map(|&i| i as i32 + 1).collect());
        // next combination in lexicographic order
        let Some(pos) = (0..size).rev().find(|&i| subset[i] < n - size + i) else {
            break;
        };
        subset[pos] += 1;
        for j in pos + 1..size {
            subset[j] = subset[j - 1] + 1;
        }
    }
    Ok(CnfFormula { num_variables: n, clauses })
}
