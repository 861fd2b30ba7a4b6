//! Block PSD programs with traced linear constraints:
//!
//! ```text
//! minimize    sum_b Re Tr{C_b X_b}
//! subject to  sum_b Re Tr{A_{i,b} X_b}  (<= | =)  b_i,   X_b >= 0
//! ```
//!
//! All coefficient matrices are Hermitian; the solver works natively on
//! the complex cone (no real embedding).

use std::fmt::Write as _;

use cx_linalg::{Complex64, CxMat};

use crate::error::SdpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
}

/// One traced linear constraint; `coeffs` lists (block index, Hermitian
/// coefficient) pairs for the blocks it touches.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, CxMat)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    /// Sparse objective: (block index, Hermitian coefficient).
    pub objective: Vec<(usize, CxMat)>,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn n_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        if self.block_dims.is_empty() {
            return Err(SdpError::InvalidProblem("no variable blocks".into()));
        }
        if self.constraints.is_empty() {
            return Err(SdpError::InvalidProblem(
                "no constraints: the feasible set must be bounded".into(),
            ));
        }
        let mut touched = vec![false; self.block_dims.len()];
        let check = |tag: &str, b: usize, m: &CxMat| -> Result<(), SdpError> {
            let dim = *self.block_dims.get(b).ok_or_else(|| {
                SdpError::InvalidProblem(format!("{tag}: block index {b} out of range"))
            })?;
            if m.rows() != dim || m.cols() != dim {
                return Err(SdpError::InvalidProblem(format!(
                    "{tag}: coefficient for block {b} is {}x{}, block dim is {dim}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(SdpError::InvalidProblem(format!(
                    "{tag}: non-finite coefficient on block {b}"
                )));
            }
            let asym = m.sub(&m.adjoint()).frobenius_norm();
            if asym > 1e-10 * (1.0 + m.frobenius_norm()) {
                return Err(SdpError::InvalidProblem(format!(
                    "{tag}: coefficient on block {b} is not Hermitian (residual {asym:.3e})"
                )));
            }
            Ok(())
        };
        for (b, m) in &self.objective {
            check("objective", *b, m)?;
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if con.coeffs.is_empty() {
                return Err(SdpError::InvalidProblem(format!(
                    "constraint {i} touches no blocks"
                )));
            }
            if !con.rhs.is_finite() {
                return Err(SdpError::InvalidProblem(format!(
                    "constraint {i} has non-finite rhs"
                )));
            }
            for (b, m) in &con.coeffs {
                check(&format!("constraint {i}"), *b, m)?;
                touched[*b] = true;
            }
        }
        if let Some(idle) = touched.iter().position(|t| !t) {
            return Err(SdpError::InvalidProblem(format!(
                "block {idle} appears in no constraint; its trace is unbounded"
            )));
        }
        Ok(())
    }

    /// Objective value of a candidate primal point.
    pub fn objective_value(&self, blocks: &[CxMat]) -> f64 {
        self.objective
            .iter()
            .map(|(b, c)| c.trace_product_re(&blocks[*b]))
            .sum()
    }

    /// Left-hand side of constraint `i` at a candidate point.
    pub fn constraint_value(&self, i: usize, blocks: &[CxMat]) -> f64 {
        self.constraints[i]
            .coeffs
            .iter()
            .map(|(b, a)| a.trace_product_re(&blocks[*b]))
            .sum()
    }

    /// Plain-text dump for debugging: block dims, objective triplets and
    /// constraint triplets with full float precision.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "blocks {}", self.block_dims.len()).unwrap();
        for d in &self.block_dims {
            writeln!(out, "dim {d}").unwrap();
        }
        let write_mat = |out: &mut String, tag: &str, b: usize, m: &CxMat| {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let z = m[(i, j)];
                    if z.re != 0.0 || z.im != 0.0 {
                        writeln!(out, "{tag} {b} {i} {j} {:.17e} {:.17e}", z.re, z.im).unwrap();
                    }
                }
            }
        };
        for (b, c) in &self.objective {
            write_mat(&mut out, "obj", *b, c);
        }
        for (i, con) in self.constraints.iter().enumerate() {
            let sense = match con.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
            };
            writeln!(out, "con {i} {sense} {:.17e}", con.rhs).unwrap();
            for (b, a) in &con.coeffs {
                write_mat(&mut out, &format!("a {i}"), *b, a);
            }
        }
        out
    }

    /// Restore a problem from `dump` output.
    pub fn restore(text: &str) -> Result<Self, SdpError> {
        let bad = |line: usize, why: &str| {
            SdpError::InvalidProblem(format!("dump parse error at line {}: {why}", line + 1))
        };
        let mut dims: Vec<usize> = Vec::new();
        let mut objective: Vec<(usize, CxMat)> = Vec::new();
        let mut constraints: Vec<Constraint> = Vec::new();

        let ensure_entry =
            |list: &mut Vec<(usize, CxMat)>, dims: &[usize], b: usize| -> usize {
                if let Some(pos) = list.iter().position(|(bb, _)| *bb == b) {
                    pos
                } else {
                    list.push((b, CxMat::zeros(dims[b], dims[b])));
                    list.len() - 1
                }
            };

        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok[0] {
                "blocks" => {}
                "dim" => {
                    let d: usize = tok
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad(ln, "dim"))?;
                    dims.push(d);
                }
                "obj" => {
                    if tok.len() != 6 {
                        return Err(bad(ln, "obj arity"));
                    }
                    let b: usize = tok[1].parse().map_err(|_| bad(ln, "obj block"))?;
                    if b >= dims.len() {
                        return Err(bad(ln, "obj block range"));
                    }
                    let (i, j): (usize, usize) = (
                        tok[2].parse().map_err(|_| bad(ln, "obj i"))?,
                        tok[3].parse().map_err(|_| bad(ln, "obj j"))?,
                    );
                    let (re, im): (f64, f64) = (
                        tok[4].parse().map_err(|_| bad(ln, "obj re"))?,
                        tok[5].parse().map_err(|_| bad(ln, "obj im"))?,
                    );
                    let pos = ensure_entry(&mut objective, &dims, b);
                    objective[pos].1[(i, j)] = Complex64::new(re, im);
                }
                "con" => {
                    if tok.len() != 4 {
                        return Err(bad(ln, "con arity"));
                    }
                    let idx: usize = tok[1].parse().map_err(|_| bad(ln, "con index"))?;
                    if idx != constraints.len() {
                        return Err(bad(ln, "con order"));
                    }
                    let sense = match tok[2] {
                        "<=" => Sense::Le,
                        "=" => Sense::Eq,
                        _ => return Err(bad(ln, "con sense")),
                    };
                    let rhs: f64 = tok[3].parse().map_err(|_| bad(ln, "con rhs"))?;
                    constraints.push(Constraint {
                        coeffs: Vec::new(),
                        sense,
                        rhs,
                    });
                }
                "a" => {
                    if tok.len() != 7 {
                        return Err(bad(ln, "a arity"));
                    }
                    let ci: usize = tok[1].parse().map_err(|_| bad(ln, "a con"))?;
                    if ci >= constraints.len() {
                        return Err(bad(ln, "a con range"));
                    }
                    let b: usize = tok[2].parse().map_err(|_| bad(ln, "a block"))?;
                    if b >= dims.len() {
                        return Err(bad(ln, "a block range"));
                    }
                    let (i, j): (usize, usize) = (
                        tok[3].parse().map_err(|_| bad(ln, "a i"))?,
                        tok[4].parse().map_err(|_| bad(ln, "a j"))?,
                    );
                    let (re, im): (f64, f64) = (
                        tok[5].parse().map_err(|_| bad(ln, "a re"))?,
                        tok[6].parse().map_err(|_| bad(ln, "a im"))?,
                    );
                    let pos = ensure_entry(&mut constraints[ci].coeffs, &dims, b);
                    constraints[ci].coeffs[pos].1[(i, j)] = Complex64::new(re, im);
                }
                other => return Err(bad(ln, &format!("unknown tag {other:?}"))),
            }
        }
        let p = SdpProblem {
            block_dims: dims,
            objective,
            constraints,
        };
        p.validate()?;
        Ok(p)
    }
}
