//! Composed reports and the desk-scale self-test suite.

use serde::Serialize;

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::higgs::{build_eigen_higgs, check_maximality, hodge_from_higgs, yukawa_length};
use crate::hodge::{
    cover_degree, eigenspace_dims, galois_orbit, hodge_middle, kunneth_middle_dim,
    riemann_hurwitz_genus, unit_group_order, w_unif_exists, EigenData,
};
use crate::kummer::{gale_dual, group_data, is_smooth_y, subset_correspondence, CoverGroups};
use crate::linalg::{Rational, RationalMatrix};
use crate::moduli::{gamma_arrangement, gamma_inverse, gamma_moduli, gamma_via_normalization};
use crate::resolution::{
    init_cyclic_cover, run_resolution, toric_exceptional_count, FValue, Mutation, RunOptions,
    DEFAULT_STEP_LIMIT,
};
use crate::sample::Sampler;

/// Largest `n` for which the report runs the exact linear algebra on sampled arrangements.
pub const LINALG_FEASIBLE_N: usize = 21;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportFlags {
    /// Random points fed through the moduli map.
    pub samples: usize,
    /// Also run the n=5 resolution (minutes in unoptimized builds).
    pub resolve_n5: bool,
    pub step_limit: u64,
    pub oracle: bool,
}

impl Default for ReportFlags {
    fn default() -> Self {
        ReportFlags {
            samples: 10,
            resolve_n5: false,
            step_limit: DEFAULT_STEP_LIMIT,
            oracle: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaSummary {
    pub samples: usize,
    pub closed_form_matches_normalization: bool,
    pub inverse_round_trip: bool,
    pub standard_form_triangle: bool,
    pub general_position: bool,
    pub first_t: Vec<Rational>,
    pub first_s: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KummerSummary {
    pub s: Vec<Rational>,
    pub b: RationalMatrix,
    pub exponent: u32,
    pub smooth: bool,
    pub general_position: bool,
    pub subsets_checked: usize,
    /// `None` when the group orders do not fit in 128 bits.
    pub groups: Option<CoverGroups>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HiggsSummary {
    pub yukawa_length: usize,
    pub maximal: bool,
    pub hodge_row: Vec<u64>,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionSummary {
    pub m: usize,
    pub r: u32,
    pub steps: usize,
    pub discrepancy: i64,
    pub exceptional_count: u32,
    pub exceptional_count_model_dependent: bool,
    pub h11: u32,
    pub toric_count: u64,
    pub final_max_f: FValue,
    pub oracle_checked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section<T> {
    Ran(T),
    Skipped { notice: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub seed: u64,
    pub gamma_checks: Section<GammaSummary>,
    pub kummer: Section<KummerSummary>,
    pub hodge_row: Vec<u64>,
    pub eigen_table: EigenData,
    pub phi_r: usize,
    pub w_unif: bool,
    pub higgs: HiggsSummary,
    pub resolution: Section<ResolutionSummary>,
}

fn too_big<T>() -> Section<T> {
    Section::Skipped {
        notice: format!("exact linear algebra skipped for n > {LINALG_FEASIBLE_N}"),
    }
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invariant(what()))
    }
}

fn gamma_summary(n: usize, samples: usize, rng: &mut Sampler) -> Result<GammaSummary> {
    let mut first = None;
    for _ in 0..samples {
        let t = rng.moduli_point_p1(n);
        let s = gamma_moduli(&t)?;
        ensure(gamma_via_normalization(&t)? == s, || {
            format!(
                "closed form and normalization disagree at t = {:?}",
                t.coords()
            )
        })?;
        ensure(gamma_inverse(&s)? == t, || {
            format!("inverse does not recover t = {:?}", t.coords())
        })?;
        let a = gamma_arrangement(&t)?;
        ensure(a.is_general_position(), || {
            "Γ(t) is not in general position".into()
        })?;
        ensure(a.to_standard_form()?.s == s, || {
            "standard form of Γ(t) differs from the closed form".into()
        })?;
        first.get_or_insert((t.coords().to_vec(), s.coords().to_vec()));
    }
    let (first_t, first_s) = first.unwrap_or_default();
    Ok(GammaSummary {
        samples,
        closed_form_matches_normalization: true,
        inverse_round_trip: true,
        standard_form_triangle: true,
        general_position: true,
        first_t,
        first_s,
    })
}

fn kummer_summary(n: usize, r: usize, rng: &mut Sampler) -> Result<KummerSummary> {
    let s = rng.moduli_point_pn(n);
    let a = Arrangement::from_moduli(&s)?;
    let k = gale_dual(&a, r as u32)?;
    let smooth = is_smooth_y(&k);
    let general = a.is_general_position();
    ensure(smooth == general, || {
        format!("smoothness {smooth} but general position {general}")
    })?;
    let table = subset_correspondence(&a, &k)?;
    if let Some((subset, _, _)) = table.iter().find(|(_, dep, van)| dep != van) {
        return Err(Error::Invariant(format!(
            "subset {subset:?} and its complementary minor disagree"
        )));
    }
    ensure(k.b.mul(&k.a_map)?.is_zero(), || {
        "B is not a left kernel of A_map".into()
    })?;
    let groups = match group_data(r as u32, (n + 3) as u32) {
        Ok(g) => Some(g),
        Err(Error::Overflow(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(KummerSummary {
        s: s.coords().to_vec(),
        b: k.b,
        exponent: k.r,
        smooth,
        general_position: general,
        subsets_checked: table.len(),
        groups,
    })
}

fn resolution_summary(n: usize, flags: &ReportFlags) -> Result<ResolutionSummary> {
    let r = cover_degree(n)?;
    let m = n + 3;
    let mut state = init_cyclic_cover(n, m, r as u32)?;
    let log = run_resolution(
        &mut state,
        RunOptions {
            step_limit: flags.step_limit,
            oracle: flags.oracle,
        },
    )?;
    ensure(log.discrepancy == 0, || "nonzero discrepancy".into())?;
    ensure(log.final_max_f == FValue::ZERO, || {
        "max f did not reach zero".into()
    })?;
    Ok(ResolutionSummary {
        m,
        r: r as u32,
        steps: log.steps.len(),
        discrepancy: log.discrepancy,
        exceptional_count: log.exceptional_count,
        exceptional_count_model_dependent: log.exceptional_count_model_dependent,
        h11: 1 + log.exceptional_count,
        toric_count: toric_exceptional_count(n, m, r),
        final_max_f: log.final_max_f,
        oracle_checked: log.oracle_checked,
    })
}

/// Runs the whole pipeline for one `n`. Deterministic in `(n, seed, flags)`.
pub fn cmd_report(n: usize, seed: u64, flags: &ReportFlags) -> Result<Report> {
    let r = cover_degree(n)?;
    let m = n + 3;
    let mut rng = Sampler::new(seed);

    let feasible = n <= LINALG_FEASIBLE_N;
    let gamma_checks = if feasible {
        Section::Ran(gamma_summary(n, flags.samples, &mut rng)?)
    } else {
        too_big()
    };
    let kummer = if feasible {
        Section::Ran(kummer_summary(n, r, &mut rng)?)
    } else {
        too_big()
    };

    let hodge = hodge_middle(n)?;
    ensure(hodge.is_palindromic(), || {
        "Hodge row is not palindromic".into()
    })?;
    let expected_total = 2 * ((r - 1) * (r - 1)) as u64;
    ensure(hodge.total() == expected_total, || {
        format!(
            "Hodge row sums to {} instead of {expected_total}",
            hodge.total()
        )
    })?;
    ensure(kunneth_middle_dim(n)? == hodge.total(), || {
        "Künneth dimension differs from the Hodge total".into()
    })?;

    let eigen = eigenspace_dims(r)?;
    let genus = riemann_hurwitz_genus(r, m)?;
    ensure(eigen.total() == 2 * genus, || {
        format!(
            "eigenspaces sum to {} but 2g = {}",
            eigen.total(),
            2 * genus
        )
    })?;

    let phi = unit_group_order(r);
    let w_unif = w_unif_exists(n)?;
    ensure(w_unif == (galois_orbit(r, 1).len() == 2), || {
        "orbit size and φ(r) disagree".into()
    })?;

    let h = build_eigen_higgs(n)?;
    let yl = yukawa_length(&h)?;
    let maximal = check_maximality(&h);
    let higgs_row = hodge_from_higgs(&h);
    ensure(higgs_row == hodge, || {
        "Higgs ranks disagree with the Hodge row".into()
    })?;
    ensure(yl == 1 && maximal, || {
        format!("Yukawa length {yl}, maximal {maximal}")
    })?;

    let resolution = match n {
        3 => Section::Ran(resolution_summary(n, flags)?),
        5 if flags.resolve_n5 => Section::Ran(resolution_summary(n, flags)?),
        5 => Section::Skipped {
            notice: "n=5 resolution is optional; pass --resolve-n5 to run it".into(),
        },
        _ => Section::Skipped {
            notice: format!("resolution skipped: n={n} is beyond the feasibility bound n ≤ 5"),
        },
    };

    Ok(Report {
        n,
        m,
        r,
        seed,
        gamma_checks,
        kummer,
        hodge_row: hodge.values,
        eigen_table: eigen,
        phi_r: phi,
        w_unif,
        higgs: HiggsSummary {
            yukawa_length: yl,
            maximal,
            hodge_row: higgs_row.values,
            assumptions: h.assumptions,
        },
        resolution,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub quick: bool,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

impl SelftestReport {
    /// Plain-text view of the checks.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{verdict}  {:width$}  {}\n", c.name, c.detail));
        }
        out
    }
}

fn check(name: &str, f: impl FnOnce() -> Result<String>) -> CheckResult {
    match f() {
        Ok(detail) => CheckResult {
            name: name.into(),
            passed: true,
            detail,
        },
        Err(e) => CheckResult {
            name: name.into(),
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn resolution_check(n: usize, expected_count: u32) -> Result<String> {
    let r = cover_degree(n)?;
    let mut state = init_cyclic_cover(n, n + 3, r as u32)?;
    let log = run_resolution(&mut state, RunOptions::default())?;
    ensure(log.exceptional_count == expected_count, || {
        format!(
            "{} new classes, expected {expected_count}",
            log.exceptional_count
        )
    })?;
    Ok(format!(
        "{} steps, discrepancy {}, {} new classes, oracle agreed",
        log.steps.len(),
        log.discrepancy,
        log.exceptional_count
    ))
}

/// The invariant suite at desk scale. `quick` skips the n=5 resolution.
pub fn selftest(seed: u64, quick: bool) -> SelftestReport {
    let mut checks = Vec::new();

    checks.push(check("linalg: inverse, kernel, Vandermonde", || {
        let mut rng = Sampler::new(seed);
        for k in 1..=6 {
            let a = rng.invertible_matrix(k);
            ensure(a.mul(&a.invert()?)? == RationalMatrix::identity(k), || {
                format!("A·A⁻¹ ≠ I for k = {k}")
            })?;
            let wide = rng.int_matrix(k, k + 2);
            let ker = wide.transpose().left_kernel_basis();
            ensure(ker.mul(&wide.transpose())?.is_zero(), || {
                "kernel is wrong".into()
            })?;
            ensure(ker.rows() + wide.rank() == k + 2, || {
                "rank-nullity fails".into()
            })?;
            let pts: Vec<Rational> = (0..k).map(|_| rng.rational()).collect();
            ensure(
                RationalMatrix::vandermonde(&pts).det()? == crate::linalg::vandermonde_det(&pts),
                || "Vandermonde determinant differs from the product formula".into(),
            )?;
        }
        Ok("k = 1..6".into())
    }));

    checks.push(check("moduli map: oracle, inverse, standard form", || {
        let mut rng = Sampler::new(seed);
        for n in 3..=6 {
            gamma_summary(n, 25, &mut rng)?;
        }
        Ok("25 points for each n in 3..=6".into())
    }));

    checks.push(check("kummer: smoothness vs general position", || {
        let mut rng = Sampler::new(seed);
        let mut degenerate = 0;
        for i in 0..30 {
            let a = if i % 3 == 0 {
                degenerate += 1;
                rng.degenerate_arrangement(3).0
            } else {
                rng.general_arrangement(3, 6)
            };
            let k = gale_dual(&a, 3)?;
            ensure(is_smooth_y(&k) == a.is_general_position(), || {
                format!("arrangement {i}: smoothness and general position differ")
            })?;
            ensure(
                subset_correspondence(&a, &k)?
                    .iter()
                    .all(|(_, d, v)| d == v),
                || format!("arrangement {i}: subset correspondence fails"),
            )?;
        }
        Ok(format!("30 arrangements, {degenerate} degenerate"))
    }));

    checks.push(check("hodge: sum rule, palindrome, Higgs ranks", || {
        for n in (3..=21).step_by(2) {
            let r = cover_degree(n)?;
            let row = hodge_middle(n)?;
            ensure(row.is_palindromic(), || format!("n={n} not palindromic"))?;
            ensure(row.total() == 2 * ((r - 1) * (r - 1)) as u64, || {
                format!("n={n} sum rule fails")
            })?;
            let h = build_eigen_higgs(n)?;
            ensure(hodge_from_higgs(&h) == row, || {
                format!("n={n} Higgs ranks differ")
            })?;
            ensure(yukawa_length(&h)? == 1 && check_maximality(&h), || {
                format!("n={n}: Yukawa length or maximality fails")
            })?;
        }
        Ok("odd n in 3..=21".into())
    }));

    checks.push(check("hodge: eigenspaces vs Riemann–Hurwitz", || {
        for r in 2..=12 {
            let g = riemann_hurwitz_genus(r, 2 * r)?;
            ensure(eigenspace_dims(r)?.total() == 2 * g, || format!("r={r}"))?;
        }
        Ok("r in 2..=12".into())
    }));

    checks.push(check("hodge: uniformizing sub-variation", || {
        let mut hits = Vec::new();
        for n in (3..=99).step_by(2) {
            let r = cover_degree(n)?;
            let a = w_unif_exists(n)?;
            let b = galois_orbit(r, 1).len() == 2;
            let c = matches!(r, 3 | 4 | 6);
            ensure(a == b && b == c, || format!("routes disagree at n={n}"))?;
            if a {
                hits.push(n);
            }
        }
        ensure(hits == [3, 5, 9], || format!("exists for n in {hits:?}"))?;
        Ok("exists exactly for n in {3, 5, 9}".into())
    }));

    checks.push(check("resolution: K3 double plane (2,6,2)", || {
        let mut state = init_cyclic_cover(2, 6, 2)?;
        let log = run_resolution(&mut state, RunOptions::default())?;
        ensure(log.exceptional_count == 15, || {
            format!("{} new classes, expected 15", log.exceptional_count)
        })?;
        Ok(format!("{} steps, 15 new classes", log.steps.len()))
    }));

    checks.push(check("resolution: n=3 with chart oracle", || {
        resolution_check(3, 50)
    }));

    if quick {
        checks.push(CheckResult {
            name: "resolution: n=5 with chart oracle".into(),
            passed: true,
            detail: "skipped (--quick)".into(),
        });
    } else {
        checks.push(check("resolution: n=5 with chart oracle", || {
            resolution_check(5, 322)
        }));
    }

    checks.push(check("resolution: mutations are detected", || {
        for m in Mutation::ALL {
            let mut state = init_cyclic_cover(3, 6, 3)?.with_mutation(Some(m));
            let opts = RunOptions {
                step_limit: 10_000,
                oracle: true,
            };
            if run_resolution(&mut state, opts).is_ok() {
                return Err(Error::Invariant(format!("{m:?} went unnoticed")));
            }
        }
        Ok(format!(
            "{} corrupted rules all caught",
            Mutation::ALL.len()
        ))
    }));

    let all_passed = checks.iter().all(|c| c.passed);
    SelftestReport {
        seed,
        quick,
        checks,
        all_passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_n3_is_deterministic() {
        let flags = ReportFlags::default();
        let a = cmd_report(3, 7, &flags).unwrap();
        let b = cmd_report(3, 7, &flags).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.hodge_row, vec![1, 3, 3, 1]);
        assert_eq!(a.higgs.hodge_row, a.hodge_row);
        assert_eq!(a.higgs.yukawa_length, 1);
        match a.resolution {
            Section::Ran(ref r) => {
                assert_eq!(r.discrepancy, 0);
                assert_eq!(r.exceptional_count, 50);
                assert_eq!(r.h11, 51);
            }
            _ => panic!("n=3 resolution must run"),
        }
    }

    #[test]
    fn report_n7_skips_resolution() {
        let r = cmd_report(
            7,
            0,
            &ReportFlags {
                samples: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!r.w_unif);
        assert!(matches!(r.resolution, Section::Skipped { .. }));
    }

    #[test]
    fn report_rejects_even_n() {
        assert_eq!(
            cmd_report(4, 0, &ReportFlags::default()),
            Err(Error::InvalidN(4))
        );
    }
}
