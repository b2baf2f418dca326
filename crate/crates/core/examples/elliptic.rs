//! Complete elliptic integrals, Jacobi functions, and the cn^2 period
//! integral against its closed form.

use elastica::elliptic::{cn_squared_period_integral, complete_e, complete_k, jacobi_sn_cn_dn};

fn main() -> elastica::Result<()> {
    println!("{:>5} {:>14} {:>14} {:>14} {:>14}", "m", "K(m)", "E(m)", "int cn^2", "2(E-(1-m)K)/m");
    for i in 0..10 {
        let m = i as f64 / 10.0;
        let (k, e) = (complete_k(m)?, complete_e(m)?);
        let closed = if m > 0.0 { 2.0 * (e - (1.0 - m) * k) / m } else { std::f64::consts::FRAC_PI_2 };
        println!("{m:5.1} {k:14.10} {e:14.10} {:14.10} {closed:14.10}", cn_squared_period_integral(m)?);
    }

    let (u, m) = (1.3, 0.7);
    let j = jacobi_sn_cn_dn(u, m)?;
    println!("\nsn, cn, dn at u = {u}, m = {m}: {:.12} {:.12} {:.12}", j.sn, j.cn, j.dn);
    println!("sn^2 + cn^2 - 1   = {:e}", j.sn * j.sn + j.cn * j.cn - 1.0);
    println!("dn^2 + m sn^2 - 1 = {:e}", j.dn * j.dn + m * j.sn * j.sn - 1.0);
    let shifted = jacobi_sn_cn_dn(u + 2.0 * complete_k(m)?, m)?;
    println!("cn(u + 2K) + cn(u) = {:e}", shifted.cn + j.cn);
    Ok(())
}
