//! Closed-form reference values for the random-state ensembles and coherent
//! states, used as test oracles and CLI-queryable baselines.
//!
//! Everything here is a ratio of Gamma functions or a finite combinatorial
//! sum; all of it is evaluated in log space with one exponentiation per term
//! and compensated accumulation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cg::{clebsch_gordan, log_factorial};
use crate::error::{Error, Result};
use crate::half_integer::HalfInt;

const LN_2: f64 = std::f64::consts::LN_2;
const LN_4: f64 = 2.0 * std::f64::consts::LN_2;

/// ln C(n, k); `None` when out of range (a vanished term).
fn log_binomial(n: i64, k: i64) -> Option<f64> {
    if k < 0 || n < 0 || k > n {
        return None;
    }
    Some(log_factorial(n as u64) - log_factorial(k as u64) - log_factorial((n - k) as u64))
}

fn kahan_add(sum: &mut f64, comp: &mut f64, value: f64) {
    let y = value - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

/// Cumulative multipole distribution of a spin coherent state,
/// `A_M = 2S/(2S+1) - Γ(2S+1)² / (Γ(2S-M) Γ(2S+M+2))` for `1 <= M <= 2S`.
/// At `M = 2S` the Gamma pole annihilates the second term and the purity
/// value `2S/(2S+1)` is returned directly.
pub fn cs_cumulative(spin: HalfInt, m: u32) -> Result<f64> {
    let s2 = spin.twice();
    if m < 1 || i64::from(m) > s2 {
        return Err(Error::Domain(format!(
            "M = {m} outside 1..=2S for spin {spin}"
        )));
    }
    let s2f = s2 as f64;
    let purity = s2f / (s2f + 1.0);
    if i64::from(m) == s2 {
        return Ok(purity);
    }
    // Γ(2S+1) = (2S)!, Γ(2S-M) = (2S-M-1)!, Γ(2S+M+2) = (2S+M+1)!
    let ln_term = 2.0 * log_factorial(s2 as u64)
        - log_factorial((s2 - i64::from(m) - 1) as u64)
        - log_factorial((s2 + i64::from(m) + 1) as u64);
    Ok(purity - ln_term.exp())
}

/// Haar-mean cumulative multipoles of fully random amplitude vectors:
/// `M(M+2) / ((2S+1)(2S+2))`.
pub fn cue_cumulative(spin: HalfInt, m: u32) -> f64 {
    let s2 = spin.twice() as f64;
    assert!(i64::from(m) <= spin.twice(), "M must not exceed 2S");
    let mf = f64::from(m);
    mf * (mf + 2.0) / ((s2 + 1.0) * (s2 + 2.0))
}

/// Haar pair integral `I_{m,m',q} = (δ_{q,0} + δ_{m,m'}) / ((2S+1)(2S+2))`.
pub fn cue_pair_integral(spin: HalfInt, m: HalfInt, mprime: HalfInt, q: i64) -> f64 {
    assert!(m.abs() <= spin && mprime.abs() <= spin);
    let s2 = spin.twice() as f64;
    let mut numer = 0.0;
    if q == 0 {
        numer += 1.0;
    }
    if m == mprime {
        numer += 1.0;
    }
    numer / ((s2 + 1.0) * (s2 + 2.0))
}

/// Haar-mean quantumness of random amplitude vectors: `2S/(2S+2)`.
pub fn cue_mean_quantumness(spin: HalfInt) -> f64 {
    let s2 = spin.twice() as f64;
    s2 / (s2 + 2.0)
}

/// Per-order squared lengths of a coherent state,
/// `L_K = (2K+1) ((2S)!)² / ((2S-K)! (2S+K+1)!)`, `K = 0..=2S`.
/// Partial sums reproduce [`cs_cumulative`].
pub fn cs_multipole_lengths(spin: HalfInt) -> Vec<f64> {
    let s2 = spin.twice() as u64;
    (0..=s2)
        .map(|k| {
            let ln = ((2 * k + 1) as f64).ln() + 2.0 * log_factorial(s2)
                - log_factorial(s2 - k)
                - log_factorial(s2 + k + 1);
            ln.exp()
        })
        .collect()
}

/// Quantumness of a coherent state, from the closed-form lengths.
pub fn cs_quantumness(spin: HalfInt) -> f64 {
    let (mut sum, mut comp) = (0.0, 0.0);
    for (k, l) in cs_multipole_lengths(spin).iter().enumerate() {
        kahan_add(&mut sum, &mut comp, l / (2.0 * k as f64 + 1.0));
    }
    1.0 - sum
}

fn check_symproj_domain(spin: HalfInt, k: u32, q: i64) -> Result<()> {
    if i64::from(k) > spin.twice() {
        return Err(Error::Domain(format!("K = {k} exceeds 2S for spin {spin}")));
    }
    if q.abs() > i64::from(k) {
        return Err(Error::Domain(format!("|q| = {} exceeds K = {k}", q.abs())));
    }
    Ok(())
}

/// Ensemble average of `|rho_Kq|²` over symmetric projections of 2S uniform
/// qubits (unnormalized states), by the cubic-cost counting form: a double
/// sum over projections with binomial weights `2^{m+m'+q}/6^{2S}` and an
/// inner sum carrying `4^M`.
///
/// The average is independent of the sign of `q` (the ensemble is isotropic),
/// so `|q|` is used throughout.
pub fn symproj_mean_sq_multipole(spin: HalfInt, k: u32, q: i64) -> Result<f64> {
    check_symproj_domain(spin, k, q)?;
    let s2 = spin.twice();
    let q = q.abs();
    let kk = HalfInt::from_int(i64::from(k));
    let qq = HalfInt::from_int(q);

    let (mut total, mut comp) = (0.0f64, 0.0f64);
    for m in spin.projections() {
        if (m + qq).abs() > spin {
            continue;
        }
        let c1 = clebsch_gordan(spin, m, kk, qq, spin, m + qq);
        if c1 == 0.0 {
            continue;
        }
        let i_m = (s2 + m.twice()) / 2; // S + m
        let lb_m = log_binomial(s2, i_m).unwrap();
        let lb_mq = log_binomial(s2, i_m + q).unwrap();
        for mp in spin.projections() {
            if (mp + qq).abs() > spin {
                continue;
            }
            let c2 = clebsch_gordan(spin, mp, kk, qq, spin, mp + qq);
            if c2 == 0.0 {
                continue;
            }
            let i_mp = (s2 + mp.twice()) / 2;
            let lb_mp = log_binomial(s2, i_mp).unwrap();
            let lb_mpq = log_binomial(s2, i_mp + q).unwrap();

            // exponent m + m' + q is an integer: m and m' share parity
            let pow2 = ((m.twice() + mp.twice()) / 2 + q) as f64;
            let lpref = -0.5 * (lb_mq + lb_m + lb_mpq + lb_mp) + pow2 * LN_2
                - s2 as f64 * 6f64.ln()
                + lb_mq;

            let s_minus_m_q = (s2 - m.twice()) / 2 - q; // S - m - q
            let s_plus_m_q = i_m + q; // S + m + q
            let s_minus_mp = (s2 - mp.twice()) / 2; // S - m'
            let s_minus_m = (s2 - m.twice()) / 2; // S - m
            let mut inner = 0.0f64;
            for mm in 0..=s_minus_m_q.max(0) {
                let (Some(l1), Some(l2), Some(l3)) = (
                    log_binomial(s_minus_m_q, mm),
                    log_binomial(s_plus_m_q, s_minus_mp - mm),
                    log_binomial(
                        s2 - (m.twice() + mp.twice()) / 2 - q - 2 * mm,
                        s_minus_m - mm,
                    ),
                ) else {
                    continue;
                };
                inner += (l1 + l2 + l3 + mm as f64 * LN_4).exp();
            }
            kahan_add(&mut total, &mut comp, c1 * c2 * lpref.exp() * inner);
        }
    }
    Ok(f64::from(2 * k + 1) / (s2 as f64 + 1.0) * total)
}

/// The same ensemble average by the quartic-cost counting form (a double sum
/// over partition counts inside the projection double sum). Retained as an
/// independent verification of [`symproj_mean_sq_multipole`].
pub fn symproj_mean_sq_multipole_quartic(spin: HalfInt, k: u32, q: i64) -> Result<f64> {
    check_symproj_domain(spin, k, q)?;
    let s2 = spin.twice();
    let q = q.abs();
    let kk = HalfInt::from_int(i64::from(k));
    let qq = HalfInt::from_int(q);
    let ln6 = 6f64.ln();

    let (mut total, mut comp) = (0.0f64, 0.0f64);
    // index space: i = S - m, kk_idx = S - m'
    for i in 0..=s2 {
        let m = HalfInt::from_twice(s2 - 2 * i);
        if (m + qq).abs() > spin {
            continue;
        }
        let c_i = clebsch_gordan(spin, m, kk, qq, spin, m + qq);
        if c_i == 0.0 {
            continue;
        }
        for kx in 0..=s2 {
            let mp = HalfInt::from_twice(s2 - 2 * kx);
            if (mp + qq).abs() > spin {
                continue;
            }
            let c_k = clebsch_gordan(spin, mp, kk, qq, spin, mp + qq);
            if c_k == 0.0 {
                continue;
            }
            let lpref = -0.5
                * (log_binomial(s2, i - q).unwrap()
                    + log_binomial(s2, i).unwrap()
                    + log_binomial(s2, kx - q).unwrap()
                    + log_binomial(s2, kx).unwrap());
            // partition counts: n1 = 2S-i-n2-n5, n3 = n2+i-k, n4 = k-q-n2-n5,
            // n6 = n5+q; each multinomial term carries 2^{n1+n4}
            let mut pair_sum = 0.0f64;
            for n2 in 0..=(kx - q).max(0) {
                let n3 = n2 + i - kx;
                if n3 < 0 {
                    continue;
                }
                for n5 in 0..=(kx - q - n2).max(0) {
                    let n1 = s2 - i - n2 - n5;
                    let n4 = kx - q - n2 - n5;
                    let n6 = n5 + q;
                    if n1 < 0 || n4 < 0 {
                        continue;
                    }
                    let ln_multinom = log_factorial(s2 as u64)
                        - log_factorial(n1 as u64)
                        - log_factorial(n2 as u64)
                        - log_factorial(n3 as u64)
                        - log_factorial(n4 as u64)
                        - log_factorial(n5 as u64)
                        - log_factorial(n6 as u64);
                    let pow2 = (n1 + n4) as f64;
                    pair_sum += (ln_multinom + pow2 * LN_2 - s2 as f64 * ln6).exp();
                }
            }
            kahan_add(&mut total, &mut comp, c_i * c_k * lpref.exp() * pair_sum);
        }
    }
    Ok(f64::from(2 * k + 1) / (s2 as f64 + 1.0) * total)
}

/// Ensemble-level quantumness of the symmetric-projection family: the mean
/// squared multipoles of the unnormalized states, renormalized by the
/// spin-dependent constant that restores total purity
/// (`Σ_{K>=1,q} -> 2S/(2S+1)`, monopole pinned to `1/(2S+1)`), then fed into
/// the quantumness sum. The per-sample normalized states coincide in law
/// with the uniform-constellation family, so this renormalized ensemble
/// value is what distinguishes the projection ensemble.
pub fn symproj_renormalized_quantumness(spin: HalfInt) -> Result<f64> {
    let s2 = spin.twice() as u32;
    let s2f = spin.twice() as f64;
    // isotropy: mean |rho_Kq|² is q-independent, so one q per K suffices
    let mut sum_all = 0.0;
    let mut sum_weighted = 0.0;
    for k in 1..=s2 {
        let per_q = symproj_mean_sq_multipole(spin, k, 0)?;
        sum_all += f64::from(2 * k + 1) * per_q;
        sum_weighted += per_q; // (2K+1) copies, each divided by (2K+1)
    }
    let scale = (s2f / (s2f + 1.0)) / sum_all;
    Ok(1.0 - 1.0 / (s2f + 1.0) - scale * sum_weighted)
}

// ---------------------------------------------------------------------------
// oracle report
// ---------------------------------------------------------------------------

/// Families with closed-form baselines.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum OracleFamily {
    #[serde(rename = "coherent")]
    Coherent,
    #[serde(rename = "cue")]
    Cue,
    #[serde(rename = "symproj")]
    SymmetricProjection,
}

impl fmt::Display for OracleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleFamily::Coherent => "coherent",
            OracleFamily::Cue => "cue",
            OracleFamily::SymmetricProjection => "symproj",
        })
    }
}

impl FromStr for OracleFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "coherent" => Ok(OracleFamily::Coherent),
            "cue" => Ok(OracleFamily::Cue),
            "symproj" => Ok(OracleFamily::SymmetricProjection),
            other => Err(format!(
                "unknown oracle family {other:?} (expected coherent, cue, or symproj)"
            )),
        }
    }
}

/// Closed-form values for one family at one spin, keyed by observable name.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub spin: HalfInt,
    pub family: OracleFamily,
    pub values: BTreeMap<String, Vec<f64>>,
}

pub const ORACLE_OBSERVABLES: [&str; 4] = ["A_M", "L_K", "E_mean", "meansq_rho_Kq"];

/// Builds the report for `observable`, or every observable the family
/// supports when `observable` is `None`.
pub fn oracle_report(
    family: OracleFamily,
    spin: HalfInt,
    observable: Option<&str>,
) -> Result<OracleReport> {
    let s2 = spin.twice() as u32;
    let mut values = BTreeMap::new();
    let wanted = |name: &str| observable.is_none_or(|o| o == name);

    match family {
        OracleFamily::Coherent => {
            if wanted("A_M") {
                let mut a = vec![0.0];
                for m in 1..=s2 {
                    a.push(cs_cumulative(spin, m)?);
                }
                values.insert("A_M".into(), a);
            }
            if wanted("L_K") {
                values.insert("L_K".into(), cs_multipole_lengths(spin));
            }
            if wanted("E_mean") {
                values.insert("E_mean".into(), vec![cs_quantumness(spin)]);
            }
        }
        OracleFamily::Cue => {
            if wanted("A_M") {
                values.insert(
                    "A_M".into(),
                    (0..=s2).map(|m| cue_cumulative(spin, m)).collect(),
                );
            }
            if wanted("L_K") {
                let s2f = s2 as f64;
                let mut l = vec![1.0 / (s2f + 1.0)];
                for k in 1..=s2 {
                    l.push(f64::from(2 * k + 1) / ((s2f + 1.0) * (s2f + 2.0)));
                }
                values.insert("L_K".into(), l);
            }
            if wanted("E_mean") {
                values.insert("E_mean".into(), vec![cue_mean_quantumness(spin)]);
            }
        }
        OracleFamily::SymmetricProjection => {
            if wanted("meansq_rho_Kq") {
                // packed ascending (K, q): index K² + (K+q)
                let mut table = Vec::new();
                for k in 0..=s2 {
                    for q in -(i64::from(k))..=i64::from(k) {
                        table.push(symproj_mean_sq_multipole(spin, k, q)?);
                    }
                }
                values.insert("meansq_rho_Kq".into(), table);
            }
            if wanted("L_K") {
                let mut l = Vec::new();
                for k in 0..=s2 {
                    l.push(f64::from(2 * k + 1) * symproj_mean_sq_multipole(spin, k, 0)?);
                }
                values.insert("L_K".into(), l);
            }
            if wanted("A_M") {
                let mut a = vec![0.0];
                let mut acc = 0.0;
                for k in 1..=s2 {
                    acc += f64::from(2 * k + 1) * symproj_mean_sq_multipole(spin, k, 0)?;
                    a.push(acc);
                }
                values.insert("A_M".into(), a);
            }
            if wanted("E_mean") {
                values.insert(
                    "E_mean".into(),
                    vec![symproj_renormalized_quantumness(spin)?],
                );
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Domain(format!(
            "observable {:?} not available for family {family}; valid names: {}",
            observable.unwrap_or("<none>"),
            ORACLE_OBSERVABLES.join(", ")
        )));
    }
    Ok(OracleReport {
        spin,
        family,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn cs_cumulative_known_values() {
        // pole cases return the purity bound exactly
        assert_abs_diff_eq!(cs_cumulative(h(1), 1).unwrap(), 0.5);
        assert_abs_diff_eq!(cs_cumulative(h(212), 212).unwrap(), 212.0 / 213.0);
        // S = 1, M = 1: 2/3 - 4/24
        assert_abs_diff_eq!(cs_cumulative(h(2), 1).unwrap(), 0.5, epsilon = 1e-12);
        assert!(cs_cumulative(h(2), 3).is_err());
        assert!(cs_cumulative(h(2), 0).is_err());
    }

    #[test]
    fn cs_cumulative_is_monotone_and_matches_lengths() {
        for s2 in [1i64, 2, 9, 50, 212] {
            let spin = h(s2);
            let lengths = cs_multipole_lengths(spin);
            let mut partial = 0.0;
            let mut prev = 0.0;
            for m in 1..=(s2 as u32) {
                partial += lengths[m as usize];
                let a = cs_cumulative(spin, m).unwrap();
                assert!(a + 1e-12 >= prev, "not monotone at M = {m}");
                assert_abs_diff_eq!(a, partial, epsilon = 1e-10);
                prev = a;
            }
            assert_abs_diff_eq!(lengths[0], 1.0 / (s2 as f64 + 1.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn cue_cumulative_values() {
        assert_abs_diff_eq!(cue_cumulative(h(1), 1), 0.5);
        assert_abs_diff_eq!(cue_cumulative(h(10), 10), 10.0 / 11.0, epsilon = 1e-15);
        assert_eq!(cue_cumulative(h(10), 0), 0.0);
        // purity identity at M = 2S and the per-order increment 2K+1
        for s2 in [2i64, 7, 40] {
            let spin = h(s2);
            let s2f = s2 as f64;
            assert_abs_diff_eq!(
                cue_cumulative(spin, s2 as u32),
                s2f / (s2f + 1.0),
                epsilon = 1e-14
            );
            for m in 1..=(s2 as u32) {
                let inc = cue_cumulative(spin, m) - cue_cumulative(spin, m - 1);
                assert_abs_diff_eq!(
                    inc,
                    (2.0 * f64::from(m) + 1.0) / ((s2f + 1.0) * (s2f + 2.0)),
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn pair_integral_cases() {
        let spin = h(4);
        let denom = 5.0 * 6.0;
        assert_eq!(cue_pair_integral(spin, h(2), h(0), 1), 0.0);
        assert_abs_diff_eq!(cue_pair_integral(spin, h(2), h(0), 0), 1.0 / denom);
        assert_abs_diff_eq!(cue_pair_integral(spin, h(2), h(2), 0), 2.0 / denom);
        assert_abs_diff_eq!(cue_pair_integral(spin, h(2), h(2), 1), 1.0 / denom);
    }

    #[test]
    fn cue_quantumness_values() {
        assert_abs_diff_eq!(cue_mean_quantumness(h(1)), 1.0 / 3.0);
        assert_abs_diff_eq!(cue_mean_quantumness(h(2)), 0.5);
        // approaches 1 from below, always under the pure-state maximum
        for s2 in [10i64, 100, 1000] {
            let e = cue_mean_quantumness(h(s2));
            let max = s2 as f64 / (s2 as f64 + 1.0);
            assert!(e < max && e > 0.9 * max);
        }
    }

    #[test]
    fn cs_lengths_peak_near_sqrt_spin() {
        let lengths = cs_multipole_lengths(h(50)); // S = 25
        let argmax = (1..lengths.len())
            .max_by(|&a, &b| lengths[a].partial_cmp(&lengths[b]).unwrap())
            .unwrap();
        assert!((4..=5).contains(&argmax), "argmax = {argmax}");
        // purity: all lengths sum to 1
        let total: f64 = lengths.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        // S = 1/2: dipole length is the purity remainder
        let l = cs_multipole_lengths(h(1));
        assert_abs_diff_eq!(l[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn symproj_counting_forms_agree() {
        for s2 in [1i64, 2, 4, 6, 9] {
            let spin = h(s2);
            for k in 0..=(s2 as u32) {
                for q in 0..=i64::from(k) {
                    let cubic = symproj_mean_sq_multipole(spin, k, q).unwrap();
                    let quartic = symproj_mean_sq_multipole_quartic(spin, k, q).unwrap();
                    assert!(
                        (cubic - quartic).abs() <= 1e-9 * cubic.abs().max(1e-300),
                        "2S={s2} K={k} q={q}: {cubic:.12e} vs {quartic:.12e}"
                    );
                }
            }
        }
    }

    #[test]
    fn symproj_is_isotropic_and_projection_shrinks_norm() {
        for s2 in [2i64, 5, 8] {
            let spin = h(s2);
            let mut total = 0.0;
            for k in 0..=(s2 as u32) {
                let at_zero = symproj_mean_sq_multipole(spin, k, 0).unwrap();
                for q in -(i64::from(k))..=i64::from(k) {
                    let v = symproj_mean_sq_multipole(spin, k, q).unwrap();
                    assert_abs_diff_eq!(v, at_zero, epsilon = 1e-12 * at_zero.max(1e-30));
                    total += v;
                }
            }
            assert!(total <= 1.0 + 1e-12);
            let s2f = s2 as f64;
            // strictly below total purity plus monopole for S >= 1
            assert!(total < s2f / (s2f + 1.0) + 1.0 / (s2f + 1.0));
        }
    }

    #[test]
    fn symproj_trivial_at_spin_half() {
        // projection is the identity on a single qubit: means sum to 1
        let spin = h(1);
        let mut total = 0.0;
        for k in 0..=1u32 {
            for q in -(i64::from(k))..=i64::from(k) {
                total += symproj_mean_sq_multipole(spin, k, q).unwrap();
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn symproj_domain_errors() {
        assert!(symproj_mean_sq_multipole(h(2), 3, 0).is_err());
        assert!(symproj_mean_sq_multipole(h(2), 1, 2).is_err());
    }

    #[test]
    fn oracle_reports_cover_the_families() {
        let r = oracle_report(OracleFamily::Cue, h(10), Some("A_M")).unwrap();
        let a = &r.values["A_M"];
        assert_eq!(a.len(), 11);
        assert_abs_diff_eq!(a[10], 10.0 / 11.0, epsilon = 1e-14);

        let r = oracle_report(OracleFamily::Coherent, h(212), None).unwrap();
        assert!(r.values.contains_key("A_M"));
        assert!(r.values.contains_key("L_K"));
        assert!(r.values.contains_key("E_mean"));

        let r = oracle_report(OracleFamily::SymmetricProjection, h(6), Some("meansq_rho_Kq"))
            .unwrap();
        assert_eq!(r.values["meansq_rho_Kq"].len(), 49);

        assert!(oracle_report(OracleFamily::Cue, h(4), Some("meansq_rho_Kq")).is_err());
    }
}
