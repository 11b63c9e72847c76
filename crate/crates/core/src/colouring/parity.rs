//! GF(2) parity systems and the magic-square argument.
//!
//! The nine two-qubit observables of the magic square take values in {+1,-1};
//! writing each value as (-1)^x turns the row and column product constraints
//! into linear equations over GF(2). Three rows and the first two columns
//! multiply to +1 (even), the last column to -1 (odd). Summing all six
//! equations cancels every unknown (each appears in exactly one row and one
//! column) and leaves 0 = 1, which is the whole impossibility proof.

/// A linear system over GF(2): each constraint is a set of variables whose
/// sum must be odd or even.
#[derive(Debug, Clone)]
pub struct ParitySystem {
    n_vars: usize,
    constraints: Vec<(Vec<usize>, bool)>,
}

/// A certificate of unsatisfiability: a subset of constraints in which every
/// variable occurs an even number of times while the right-hand sides sum to
/// 1 mod 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCertificate {
    pub combination: Vec<usize>,
    pub parity_sum: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParityOutcome {
    Sat(Vec<bool>),
    Unsat(ParityCertificate),
}

impl ParitySystem {
    pub fn new(n_vars: usize, constraints: Vec<(Vec<usize>, bool)>) -> Self {
        assert!(n_vars <= 20, "brute-force solver is for small systems");
        for (vars, _) in &constraints {
            assert!(vars.iter().all(|&v| v < n_vars));
        }
        ParitySystem {
            n_vars,
            constraints,
        }
    }

    /// The 3x3 magic-square instance: variables 0..9 laid out row-major,
    /// rows even, columns even except the last.
    pub fn mermin_square() -> Self {
        let mut constraints = Vec::new();
        for row in 0..3 {
            constraints.push(((0..3).map(|c| 3 * row + c).collect(), false));
        }
        for col in 0..3 {
            constraints.push(((0..3).map(|r| 3 * r + col).collect(), col == 2));
        }
        ParitySystem::new(9, constraints)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn constraints(&self) -> &[(Vec<usize>, bool)] {
        &self.constraints
    }

    fn satisfied_by(&self, assignment: u32) -> bool {
        self.constraints.iter().all(|(vars, odd)| {
            let sum = vars
                .iter()
                .fold(false, |acc, &v| acc ^ (assignment >> v & 1 == 1));
            sum == *odd
        })
    }

    /// Exhaustive solve; on unsatisfiable input, a cancelling combination of
    /// constraints is produced as certificate. If summing every constraint
    /// already cancels all variables with odd total (the magic-square shape),
    /// that sum is preferred; otherwise Gaussian elimination finds one.
    pub fn solve(&self) -> ParityOutcome {
        for assignment in 0u32..1 << self.n_vars {
            if self.satisfied_by(assignment) {
                let bits = (0..self.n_vars).map(|v| assignment >> v & 1 == 1).collect();
                return ParityOutcome::Sat(bits);
            }
        }
        let all: Vec<usize> = (0..self.constraints.len()).collect();
        if let Some(cert) = self.certificate_from(&all) {
            return ParityOutcome::Unsat(cert);
        }
        ParityOutcome::Unsat(
            self.eliminate()
                .expect("unsatisfiable system has a certificate"),
        )
    }

    /// Check whether a combination of constraint indices cancels every
    /// variable and sums to an odd right-hand side.
    fn certificate_from(&self, combination: &[usize]) -> Option<ParityCertificate> {
        let mut lhs = 0u32;
        let mut rhs = false;
        for &i in combination {
            let (vars, odd) = &self.constraints[i];
            for &v in vars {
                lhs ^= 1 << v;
            }
            rhs ^= *odd;
        }
        (lhs == 0 && rhs).then(|| ParityCertificate {
            combination: combination.to_vec(),
            parity_sum: 1,
        })
    }

    /// Gaussian elimination over GF(2), tracking which original constraints
    /// combine into each row; the certificate is a row reading 0 = 1.
    fn eliminate(&self) -> Option<ParityCertificate> {
        let mut rows: Vec<(u32, bool, u64)> = self
            .constraints
            .iter()
            .enumerate()
            .map(|(i, (vars, odd))| {
                let mask = vars.iter().fold(0u32, |m, &v| m ^ (1 << v));
                (mask, *odd, 1u64 << i)
            })
            .collect();
        let mut row = 0;
        for var in 0..self.n_vars {
            let Some(pivot) = (row..rows.len()).find(|&r| rows[r].0 >> var & 1 == 1) else {
                continue;
            };
            rows.swap(row, pivot);
            for r in 0..rows.len() {
                if r != row && rows[r].0 >> var & 1 == 1 {
                    rows[r].0 ^= rows[row].0;
                    rows[r].1 ^= rows[row].1;
                    rows[r].2 ^= rows[row].2;
                }
            }
            row += 1;
        }
        rows.iter()
            .find(|(mask, rhs, _)| *mask == 0 && *rhs)
            .map(|(_, _, combo)| ParityCertificate {
                combination: (0..self.constraints.len())
                    .filter(|i| combo >> i & 1 == 1)
                    .collect(),
                parity_sum: 1,
            })
    }
}

/// The default magic-square run: always unsatisfiable, certified by the sum
/// of all six constraints.
pub fn mermin_parity_check() -> ParityOutcome {
    ParitySystem::mermin_square().solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magic_square_is_unsat_with_full_sum_certificate() {
        match mermin_parity_check() {
            ParityOutcome::Unsat(cert) => {
                assert_eq!(cert.combination, vec![0, 1, 2, 3, 4, 5]);
                assert_eq!(cert.parity_sum, 1);
            }
            ParityOutcome::Sat(_) => panic!("the magic square has no value assignment"),
        }
    }

    #[test]
    fn all_even_variant_is_satisfied_by_all_plus_one() {
        let mut constraints = ParitySystem::mermin_square().constraints().to_vec();
        for (_, odd) in constraints.iter_mut() {
            *odd = false;
        }
        match ParitySystem::new(9, constraints).solve() {
            ParityOutcome::Sat(bits) => assert!(bits.iter().all(|&b| !b)),
            ParityOutcome::Unsat(_) => panic!("all-even system is satisfiable"),
        }
    }

    #[test]
    fn two_odd_constraints_are_satisfiable() {
        let mut constraints = ParitySystem::mermin_square().constraints().to_vec();
        constraints[4].1 = true; // second column odd as well as the third
        let system = ParitySystem::new(9, constraints);
        match system.solve() {
            ParityOutcome::Sat(bits) => {
                let assignment = bits
                    .iter()
                    .enumerate()
                    .fold(0u32, |m, (i, &b)| m | (u32::from(b) << i));
                assert!(system.satisfied_by(assignment));
            }
            ParityOutcome::Unsat(_) => panic!("two odd columns cancel each other"),
        }
    }

    #[test]
    fn elimination_certificate_on_a_non_square_shape() {
        // x0 even, x0 odd: directly contradictory, combination {0, 1}.
        let system = ParitySystem::new(1, vec![(vec![0], false), (vec![0], true)]);
        match system.solve() {
            ParityOutcome::Unsat(cert) => assert_eq!(cert.combination, vec![0, 1]),
            ParityOutcome::Sat(_) => panic!("contradictory pair"),
        }
    }
}
