//! Matrix exponential by scaling and squaring with diagonal Pade
//! approximants, after Higham (2005).

use super::CMatrix;
use crate::error::Result;
use crate::numerics::{check_square, cr};
use ndarray_linalg::Solve;

// Pade coefficients b_j for degrees 3, 5, 7, 9, 13.
const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// theta_m values controlling backward error for each Pade degree.
const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.53939833006323e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068;
const THETA13: f64 = 5.371920351148152;

/// Solve (V - U)^{-1} (V + U) column by column.
fn pade_solve(u: &CMatrix, v: &CMatrix) -> Result<CMatrix> {
    let p = u.add(v);
    let q = v.sub(u);
    let n = p.rows();
    let mut out = CMatrix::zeros(n, n);
    let qa = q.data().clone();
    for j in 0..n {
        let col = p.data().column(j).to_owned();
        let x = qa.solve(&col)?;
        for i in 0..n {
            out.set(i, j, x[i]);
        }
    }
    Ok(out)
}

fn pade(a: &CMatrix, b: &[f64]) -> Result<CMatrix> {
    let n = a.rows();
    let a2 = a.matmul(a);
    // even part in powers of A^2, odd part = A * (even series)
    let degree = b.len() - 1;
    let half = degree / 2;
    let mut even = CMatrix::identity(n).scale(cr(b[0]));
    let mut odd = CMatrix::identity(n).scale(cr(b[1]));
    let mut pow = CMatrix::identity(n);
    for k in 1..=half {
        pow = pow.matmul(&a2);
        even = even.add(&pow.scale(cr(b[2 * k])));
        if 2 * k < degree {
            odd = odd.add(&pow.scale(cr(b[2 * k + 1])));
        }
    }
    let u = a.matmul(&odd);
    pade_solve(&u, &even)
}

fn pade13(a: &CMatrix) -> Result<CMatrix> {
    let n = a.rows();
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = &B13;
    let u_inner = a6
        .scale(cr(b[13]))
        .add(&a4.scale(cr(b[11])))
        .add(&a2.scale(cr(b[9])));
    let u = a.matmul(
        &a6.matmul(&u_inner)
            .add(&a6.scale(cr(b[7])))
            .add(&a4.scale(cr(b[5])))
            .add(&a2.scale(cr(b[3])))
            .add(&CMatrix::identity(n).scale(cr(b[1]))),
    );
    let v_inner = a6
        .scale(cr(b[12]))
        .add(&a4.scale(cr(b[10])))
        .add(&a2.scale(cr(b[8])));
    let v = a6
        .matmul(&v_inner)
        .add(&a6.scale(cr(b[6])))
        .add(&a4.scale(cr(b[4])))
        .add(&a2.scale(cr(b[2])))
        .add(&CMatrix::identity(n).scale(cr(b[0])));
    pade_solve(&u, &v)
}

/// Matrix exponential of a square complex matrix.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    check_square(a)?;
    let n = a.rows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let norm = a.one_norm();
    if norm <= THETA3 {
        return pade(a, &B3);
    }
    if norm <= THETA5 {
        return pade(a, &B5);
    }
    if norm <= THETA7 {
        return pade(a, &B7);
    }
    if norm <= THETA9 {
        return pade(a, &B9);
    }
    let mut s = 0u32;
    let mut scaled = a.clone();
    if norm > THETA13 {
        s = (norm / THETA13).log2().ceil() as u32;
        scaled = a.scale(cr(0.5f64.powi(s as i32)));
    }
    let mut e = pade13(&scaled)?;
    for _ in 0..s {
        e = e.matmul(&e);
    }
    Ok(e)
}
