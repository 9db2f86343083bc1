//! Conversion from spin variables to binary variables.
//!
//! A spin model `sum_i h[i] s[i] + sum_{i<j} J[i][j] s[i] s[j]` over
//! `s in {-1,+1}` maps onto a binary instance through `s = 2x - 1`. The map
//! is exact in integer arithmetic because every coefficient scales by 2 or 4,
//! and it leaves an additive constant that the instance cannot carry.

use crate::{Error, QuboInstance};

/// Builds the binary instance equivalent to a spin model, returning it with
/// the additive constant such that for every assignment `x`,
/// `instance.evaluate(x) + constant` equals the spin objective at `s = 2x-1`.
///
/// `couplings` lists `(i, j, value)` with `i != j`; each unordered pair may
/// appear once.
pub fn from_ising(
    fields: &[i64],
    couplings: &[(usize, usize, i64)],
) -> Result<(QuboInstance, i64), Error> {
    let n = fields.len();
    let mut inst = QuboInstance::new(n);
    let mut constant: i64 = 0;

    for (i, &h) in fields.iter().enumerate() {
        let lin = h.checked_mul(2).ok_or(Error::Overflow)?;
        inst.set_linear(i, lin);
        constant = constant.checked_sub(h).ok_or(Error::Overflow)?;
    }

    for &(i, j, value) in couplings {
        if i == j {
            return Err(Error::SelfPair { i });
        }
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange { index: i.max(j), n });
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if inst.quadratic(a, b) != 0 {
            return Err(Error::DuplicateEntry { i: a, j: b });
        }
        if value == 0 {
            continue;
        }
        let quad = value.checked_mul(4).ok_or(Error::Overflow)?;
        inst.set_quadratic(a, b, quad)?;
        // (2x-1)(2y-1) = 4xy - 2x - 2y + 1
        let cross = value.checked_mul(2).ok_or(Error::Overflow)?;
        inst.add_linear(a, -cross)?;
        inst.add_linear(b, -cross)?;
        constant = constant.checked_add(value).ok_or(Error::Overflow)?;
    }

    Ok((inst, constant))
}
