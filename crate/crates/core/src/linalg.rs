//! Direct solver for the bordered tridiagonal systems that arise on the
//! tadpole: two independent chains (loop interior, tail interior) coupled to
//! a single vertex unknown.
//!
//! ```text
//! | T_c   0    b_c | | x_c |   | r_c |
//! | 0    T_t   b_t | | x_t | = | r_t |
//! | b_c' b_t'  d   | | x_v |   | r_v |
//! ```
//!
//! `b_c` is nonzero on the first and last loop entries, `b_t` on the first
//! tail entry. Each chain is factored once with the Thomas algorithm and the
//! vertex is eliminated through its scalar Schur complement.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix stored by its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        debug_assert!(diag.is_empty() || off.len() + 1 == diag.len());
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            out[i] = acc;
        }
    }

    /// LU factorization without pivoting. `offset` is added to reported row
    /// indices so that errors point into the global system.
    fn factor(&self, offset: usize) -> Result<ThomasFactor> {
        let n = self.len();
        let mut pivot = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n.saturating_sub(1));
        let scale = self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        for i in 0..n {
            let mut d = self.diag[i];
            if i > 0 {
                let l = self.off[i - 1] / pivot[i - 1];
                d -= l * self.off[i - 1];
                mult.push(l);
            }
            if !(d.abs() > tiny) {
                return Err(Error::SingularSystem(offset + i));
            }
            pivot.push(d);
        }
        Ok(ThomasFactor {
            pivot,
            mult,
            off: self.off.clone(),
        })
    }
}

#[derive(Debug, Clone)]
struct ThomasFactor {
    pivot: Vec<f64>,
    mult: Vec<f64>,
    off: Vec<f64>,
}

impl ThomasFactor {
    fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.pivot.len();
        for i in 1..n {
            x[i] -= self.mult[i - 1] * x[i - 1];
        }
        if n == 0 {
            return;
        }
        x[n - 1] /= self.pivot[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.off[i] * x[i + 1]) / self.pivot[i];
        }
    }
}

/// Symmetric bordered matrix: loop chain, tail chain and one vertex row.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderedMatrix {
    pub loop_chain: SymTridiagonal,
    pub tail_chain: SymTridiagonal,
    /// Entry coupling the vertex to the first and to the last loop unknown.
    pub loop_coupling: f64,
    /// Entry coupling the vertex to the first tail unknown.
    pub tail_coupling: f64,
    pub corner: f64,
}

impl BorderedMatrix {
    /// Total number of unknowns (loop, tail, vertex).
    pub fn dim(&self) -> usize {
        self.loop_chain.len() + self.tail_chain.len() + 1
    }

    fn loop_border(&self) -> Vec<f64> {
        let n = self.loop_chain.len();
        let mut b = vec![0.0; n];
        b[0] += self.loop_coupling;
        b[n - 1] += self.loop_coupling;
        b
    }

    fn tail_border(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.tail_chain.len()];
        b[0] = self.tail_coupling;
        b
    }

    /// y = A x, with x ordered as (loop, tail, vertex).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let nc = self.loop_chain.len();
        let nt = self.tail_chain.len();
        assert_eq!(x.len(), nc + nt + 1);
        let (xc, rest) = x.split_at(nc);
        let (xt, xv) = rest.split_at(nt);
        let xv = xv[0];
        let mut y = vec![0.0; x.len()];
        self.loop_chain.apply(xc, &mut y[..nc]);
        self.tail_chain.apply(xt, &mut y[nc..nc + nt]);
        y[0] += self.loop_coupling * xv;
        y[nc - 1] += self.loop_coupling * xv;
        y[nc] += self.tail_coupling * xv;
        y[nc + nt] = self.corner * xv
            + self.loop_coupling * (xc[0] + xc[nc - 1])
            + self.tail_coupling * xt[0];
        y
    }

    /// Factor once for repeated solves.
    pub fn factor(&self) -> Result<BorderedFactor> {
        let nc = self.loop_chain.len();
        if nc == 0 || self.tail_chain.is_empty() {
            return Err(Error::InvalidParameter(
                "bordered system needs at least one loop and one tail unknown".into(),
            ));
        }
        let loop_f = self.loop_chain.factor(0)?;
        let tail_f = self.tail_chain.factor(nc)?;
        let bc = self.loop_border();
        let bt = self.tail_border();
        let mut zc = bc.clone();
        loop_f.solve_in_place(&mut zc);
        let mut zt = bt.clone();
        tail_f.solve_in_place(&mut zt);
        let schur = self.corner - dot(&bc, &zc) - dot(&bt, &zt);
        let scale = self.corner.abs().max(self.loop_coupling.abs()).max(f64::MIN_POSITIVE);
        if !(schur.abs() > f64::EPSILON * scale) {
            return Err(Error::SingularSystem(self.dim() - 1));
        }
        Ok(BorderedFactor {
            loop_f,
            tail_f,
            bc,
            bt,
            zc,
            zt,
            schur,
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.factor()?.solve(rhs))
    }
}

/// Factorization of a [`BorderedMatrix`].
#[derive(Debug, Clone)]
pub struct BorderedFactor {
    loop_f: ThomasFactor,
    tail_f: ThomasFactor,
    bc: Vec<f64>,
    bt: Vec<f64>,
    zc: Vec<f64>,
    zt: Vec<f64>,
    schur: f64,
}

impl BorderedFactor {
    /// Number of negative eigenvalues of the factored matrix (Sylvester's
    /// law of inertia applied to the block LDLᵀ factorization).
    pub fn negative_count(&self) -> usize {
        let neg = |p: &[f64]| p.iter().filter(|&&d| d < 0.0).count();
        neg(&self.loop_f.pivot) + neg(&self.tail_f.pivot) + usize::from(self.schur < 0.0)
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let nc = self.bc.len();
        let nt = self.bt.len();
        assert_eq!(rhs.len(), nc + nt + 1);
        let mut yc = rhs[..nc].to_vec();
        self.loop_f.solve_in_place(&mut yc);
        let mut yt = rhs[nc..nc + nt].to_vec();
        self.tail_f.solve_in_place(&mut yt);
        let xv = (rhs[nc + nt] - dot(&self.bc, &yc) - dot(&self.bt, &yt)) / self.schur;
        let mut x = Vec::with_capacity(nc + nt + 1);
        x.extend(yc.iter().zip(&self.zc).map(|(y, z)| y - z * xv));
        x.extend(yt.iter().zip(&self.zt).map(|(y, z)| y - z * xv));
        x.push(xv);
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
