//! The acceptance suite: each criterion runs end to end against the shipped
//! seed database and reports pass/fail with its wall-clock time. Shared by
//! the `acceptance` test target and the `check` CLI command.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bezout::{scenarios, uniqueness_verdict};
use crate::floor::{count_degree_with, CountOptions};
use crate::gw::kontsevich_nd;
use crate::lattice::{
    build_grid, build_grid_with, chi_polynomial, closed_form_chi, render_relation, theorem_rel_check,
    nontriviality_certificate, BuildOptions, Certificate,
};
use crate::seeds::{paper_seeds, SeedDatabase};
use crate::surface::{CellDomain, LatticeIndex, SurfaceClass};
use crate::symbolic::AffineExpr;
use crate::wall::{collision_identity, random_walk, Marking};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {} ({} ms, limit {} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.limit_ms,
            self.detail
        )
    }
}

pub const CRITERIA: [(u32, &str); 9] = [
    (1, "relation goldens"),
    (2, "example goldens"),
    (3, "non-triviality"),
    (4, "lattice properties"),
    (5, "oracle agreement"),
    (6, "real counts"),
    (7, "bezout verdicts"),
    (8, "conservation"),
    (9, "internal consistency"),
];

type Check = std::result::Result<String, String>;

fn timed(id: u32, limit: Duration, f: impl FnOnce() -> Check) -> CriterionOutcome {
    let name = CRITERIA.iter().find(|(i, _)| *i == id).map(|(_, n)| *n).unwrap_or("?");
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if elapsed > limit {
        passed = false;
        detail = format!("exceeded time limit; {detail}");
    }
    CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed_ms: elapsed.as_millis(),
        limit_ms: limit.as_millis(),
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cp2(d: i64) -> SurfaceClass {
    SurfaceClass::cp2(d).expect("positive degree")
}

pub const RELATION_GOLDENS: [(i64, i64, &str); 6] = [
    (4, 3, "chi[4,3] = chi[4,1] + 2*theta[4,1,2]"),
    (4, 5, "chi[4,5] = chi[4,1] + 4*theta[4,1,2] + 4*theta[4,2,3]"),
    (4, 7, "chi[4,7] = chi[4,1] + 6*theta[4,1,2] + 12*theta[4,2,3] + 8"),
    (4, 9, "chi[4,9] = chi[4,1] + 8*theta[4,1,2] + 24*theta[4,2,3] + 32"),
    (4, 11, "chi[4,11] = chi[4,1] + 10*theta[4,1,2] + 40*theta[4,2,3] + 80"),
    (
        5,
        14,
        "chi[5,14] = chi[5,0] + 14*theta[5,1,1] + 84*theta[5,2,2] + 280*theta[5,3,3] \
         + 560*theta[5,4,4] + 672*theta[5,5,5] + 448",
    ),
];

pub fn relation_goldens(db: &SeedDatabase) -> CriterionOutcome {
    timed(1, Duration::from_secs(1), || {
        for (d, r, expect) in RELATION_GOLDENS {
            let cls = cp2(d);
            let grid = build_grid(&cls, &db.for_class(&cls)).map_err(|e| e.to_string())?;
            let got = render_relation(&grid, r).map_err(|e| e.to_string())?;
            ensure(got == expect, || format!("got `{got}`, expected `{expect}`"))?;
        }
        Ok(format!("{} relations reproduced verbatim", RELATION_GOLDENS.len()))
    })
}

pub const EXAMPLE_GOLDENS: [(i64, &str); 3] = [
    (1, "1 + T^2"),
    (2, "T + T^3 + T^5"),
    (3, "0 + 2T^2 + 4T^4 + 6T^6 + 8T^8"),
];

pub fn example_goldens(db: &SeedDatabase) -> CriterionOutcome {
    timed(2, Duration::from_secs(1), || {
        for (d, expect) in EXAMPLE_GOLDENS {
            let cls = cp2(d);
            let grid = build_grid(&cls, &db.for_class(&cls)).map_err(|e| e.to_string())?;
            let got = chi_polynomial(&grid).render();
            ensure(got == expect, || format!("chi^{d}: got `{got}`, expected `{expect}`"))?;
        }
        // theta^{3,1} from the chi^3 coefficients alone
        let cls = cp2(3);
        let chi_only: Vec<_> = db.for_class(&cls).into_iter().filter(|s| s.sigma == 0).collect();
        ensure(chi_only.len() == 5, || format!("expected 5 chi^3 seeds, found {}", chi_only.len()))?;
        let grid = build_grid(&cls, &chi_only).map_err(|e| e.to_string())?;
        for q in [1, 3, 5, 7] {
            let cell = grid.cell(1, q);
            ensure(cell == AffineExpr::constant(1), || format!("theta[3,1,{q}] recovered as {cell}"))?;
        }
        for r in 0..=cls.c1d - 3 {
            let res = theorem_rel_check(&grid, r).map_err(|e| e.to_string())?;
            ensure(res.is_zero(), || format!("chi[3,{}] - chi[3,{r}] - 2 theta[3,1,{}] = {res}", r + 2, r + 1))?;
        }
        // the seeded theta^{3,1} values agree with the recovered ones
        build_grid(&cls, &db.for_class(&cls)).map_err(|e| e.to_string())?;
        Ok("chi^1, chi^2, chi^3 match; theta[3,1,q] = 1 for q = 1,3,5,7 recovered".into())
    })
}

pub fn non_triviality(db: &SeedDatabase) -> CriterionOutcome {
    timed(3, Duration::from_secs(1), || {
        let mut notes = Vec::new();
        for d in [4, 5] {
            let cls = cp2(d);
            let grid = build_grid(&cls, &db.for_class(&cls)).map_err(|e| e.to_string())?;
            let poly = chi_polynomial(&grid);
            match nontriviality_certificate(&poly) {
                Certificate::NonTrivial(w) => {
                    ensure(w.verify(&poly.coefficients), || format!("degree {d} witness does not verify"))?;
                    notes.push(format!("chi^{d} combination = {}", w.constant));
                }
                Certificate::Unknown => return Err(format!("chi^{d} not certified non-trivial")),
            }
        }
        Ok(notes.join("; "))
    })
}

pub fn lattice_properties() -> CriterionOutcome {
    timed(4, Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x01a7_71ce);
        let mut cells_checked = 0usize;
        for _ in 0..200 {
            let c1d = rng.gen_range(1..=24i64);
            let delta = rng.gen_range(0..=15i64);
            let cls = SurfaceClass::new(c1d, 2 * delta + c1d - 2, "random").map_err(|e| e.to_string())?;
            let grid = build_grid(&cls, &[]).map_err(|e| e.to_string())?;
            let assignment = grid
                .unknowns
                .iter()
                .map(|u| (u.clone(), BigInt::from(rng.gen_range(-1000..=1000i64))))
                .collect();
            for idx in grid.cells().keys() {
                let LatticeIndex { sigma, s } = *idx;
                if grid.domain(*idx) == CellDomain::Valid && grid.licensed(sigma, s) {
                    let res = grid.recursion_residual(sigma, s);
                    ensure(res.is_zero(), || format!("{cls}: residual {res} at sigma={sigma}, s={s}"))?;
                    let value = |sg, ss| grid.cell(sg, ss).eval(&assignment).map_err(|e| e.to_string());
                    let lhs = value(sigma, s)?;
                    let rhs = value(sigma, s - 2)? + BigInt::from(2) * value(sigma + 1, s - 1)?;
                    ensure(lhs == rhs, || format!("{cls}: numeric recursion fails at ({sigma},{s})"))?;
                    cells_checked += 1;
                }
            }
            for r in 0..=cls.point_budget() {
                if cls.chi_parity_admissible(r).map_err(|e| e.to_string())? {
                    let a = grid.cell(0, r);
                    let b = closed_form_chi(&grid, r).map_err(|e| e.to_string())?;
                    ensure(a == b, || format!("{cls}: chi_{r} = {a} but closed form gives {b}"))?;
                }
            }
        }
        Ok(format!("200 classes, {cells_checked} recursion cells checked"))
    })
}

pub const KONTSEVICH_GOLDENS: [u64; 5] = [1, 1, 12, 620, 87304];

pub fn oracle_agreement() -> CriterionOutcome {
    timed(5, Duration::from_secs(75), || {
        for (i, expect) in KONTSEVICH_GOLDENS.iter().enumerate() {
            let d = i + 1;
            let kont = kontsevich_nd(d as i64).map_err(|e| e.to_string())?;
            let floors = count_degree_with(d, CountOptions { jobs: 1, ..Default::default() })
                .map_err(|e| e.to_string())?;
            ensure(kont == BigInt::from(*expect), || format!("N_{d} = {kont} by recursion"))?;
            ensure(floors.n_complex == kont, || {
                format!("N_{d}: floor diagrams {} vs recursion {kont}", floors.n_complex)
            })?;
        }
        let start = Instant::now();
        count_degree_with(5, CountOptions { jobs: 1, ..Default::default() }).map_err(|e| e.to_string())?;
        let serial = start.elapsed();
        let start = Instant::now();
        count_degree_with(5, CountOptions { jobs: 8, ..Default::default() }).map_err(|e| e.to_string())?;
        let parallel = start.elapsed();
        ensure(serial < Duration::from_secs(60), || format!("d=5 serial took {serial:?}"))?;
        ensure(parallel < Duration::from_secs(15), || format!("d=5 with 8 workers took {parallel:?}"))?;
        Ok(format!(
            "N_1..N_5 = 1, 1, 12, 620, 87304 both ways; d=5 serial {serial:?}, 8 workers {parallel:?}"
        ))
    })
}

pub fn real_counts() -> CriterionOutcome {
    timed(6, Duration::from_secs(90), || {
        let mut ws = Vec::new();
        for d in 1..=5usize {
            let c = count_degree_with(d, CountOptions { jobs: 1, ..Default::default() }).map_err(|e| e.to_string())?;
            let w = c.w_real.clone();
            match d {
                1 | 2 => ensure(w == BigInt::from(1), || format!("W_{d} = {w}, expected 1"))?,
                3 => ensure(w == BigInt::from(8), || format!("W_3 = {w}, expected 8"))?,
                _ => {
                    ensure(w > BigInt::zero(), || format!("W_{d} = {w} is not positive"))?;
                    ensure(w <= c.n_complex, || format!("W_{d} = {w} exceeds N_{d} = {}", c.n_complex))?;
                    ensure(((&c.n_complex - &w) % 2u32).is_zero(), || {
                        format!("W_{d} = {w} and N_{d} = {} differ in parity", c.n_complex)
                    })?;
                }
            }
            ws.push(w.to_string());
        }
        Ok(format!("W_1..W_5 = {}", ws.join(", ")))
    })
}

pub fn bezout_verdicts() -> CriterionOutcome {
    timed(7, Duration::from_secs(1), || {
        let quartic = cp2(4);
        let items = crate::bezout::parse_constraints("simple:5,node:3").map_err(|e| e.to_string())?;
        let v = uniqueness_verdict(&quartic, &items);
        ensure(v.lower_bound == 17 && v.budget == 16 && v.forced_unique, || format!("quartic: {v}"))?;
        let mut checked = 1;
        for d in 1..=10 {
            let cls = cp2(d);
            let delta = cls.delta().map_err(|e| e.to_string())?;
            ensure((cls.c1d - 1) + 2 * delta == d * d + 1, || format!("identity fails at d={d}"))?;
            let all: [(&str, Option<Vec<_>>); 3] = [
                ("all nodes prescribed", scenarios::all_nodes_prescribed(&cls)),
                ("reducible wall", scenarios::reducible_wall(&cls)),
                ("nodal at point", scenarios::nodal_at_point(&cls)),
            ];
            for (name, items) in all {
                if let Some(items) = items {
                    let v = uniqueness_verdict(&cls, &items);
                    ensure(v.forced_unique && v.lower_bound == d * d + 1, || format!("{name}, d={d}: {v}"))?;
                    checked += 1;
                }
            }
        }
        for c1d in 1..=60 {
            for delta in 0..=40 {
                let cls = SurfaceClass::new(c1d, 2 * delta + c1d - 2, "r").map_err(|e| e.to_string())?;
                ensure((cls.c1d - 1) + 2 * delta == cls.dd + 1, || format!("identity fails for {cls}"))?;
            }
        }
        Ok(format!("{checked} scenario verdicts forced; identity holds on 2460 classes"))
    })
}

pub fn conservation() -> CriterionOutcome {
    timed(8, Duration::from_secs(30), || {
        const WALKS: u64 = 10_000;
        const STEPS: usize = 200;
        for seed in 0..WALKS {
            let cls = cp2(1 + (seed % 6) as i64);
            let t = random_walk(seed, STEPS, &cls, Marking::Unmarked).map_err(|e| e.to_string())?;
            ensure(t.chi_constant(), || format!("chi changed on unmarked walk {seed}"))?;
            let t = random_walk(seed, STEPS, &cls, Marking::Marked).map_err(|e| e.to_string())?;
            ensure(t.theta_constant(), || format!("theta changed on marked walk {seed}"))?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x0c01_11de);
        let masses = |rng: &mut ChaCha8Rng| -> Vec<i64> {
            let n = rng.gen_range(0..10);
            (0..n).map(|_| rng.gen_range(0..=10)).collect()
        };
        for i in 0..10_000 {
            let (t, p, m) = (masses(&mut rng), masses(&mut rng), masses(&mut rng));
            let c = collision_identity(&t, &p, &m);
            ensure(c.chi_plus - c.chi_minus == 2 * c.theta_diff && c.theta_diff == c.theta_direct, || {
                format!("collision identity fails on input {i}")
            })?;
        }
        Ok(format!("{WALKS} unmarked + {WALKS} marked walks of {STEPS} moves; 10000 collisions"))
    })
}

pub fn internal_consistency(db: &SeedDatabase) -> CriterionOutcome {
    timed(9, Duration::from_secs(1), || {
        let cls = cp2(5);
        let seeds: Vec<_> = db.for_class(&cls).into_iter().filter(|s| s.sigma == 6).collect();
        ensure(seeds.len() == 2, || format!("expected 2 theta^(5,6) seeds, found {}", seeds.len()))?;
        let idx = LatticeIndex::new(7, 7);
        ensure(cls.theta_domain(idx) == CellDomain::NodeBudgetZero, || "theta[5,7,7] not NodeBudgetZero".into())?;
        let grid = build_grid(&cls, &seeds).map_err(|e| e.to_string())?;
        ensure(grid.cell(7, 7).is_zero(), || "theta[5,7,7] nonzero with node budget rule".into())?;
        let open = build_grid_with(&cls, &seeds, BuildOptions { node_budget_rule: false })
            .map_err(|e| e.to_string())?;
        let cell = open.cell(7, 7);
        ensure(cell.is_zero(), || format!("seeds leave theta[5,7,7] = {cell}"))?;
        Ok("theta[5,7,7] = 0 by the node budget and forced by theta[5,6,6] = theta[5,6,8] = 1".into())
    })
}

/// Runs one criterion by number.
pub fn run(id: u32) -> Option<CriterionOutcome> {
    let db = paper_seeds();
    Some(match id {
        1 => relation_goldens(&db),
        2 => example_goldens(&db),
        3 => non_triviality(&db),
        4 => lattice_properties(),
        5 => oracle_agreement(),
        6 => real_counts(),
        7 => bezout_verdicts(),
        8 => conservation(),
        9 => internal_consistency(&db),
        _ => return None,
    })
}

pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA.iter().filter_map(|(id, _)| run(*id)).collect()
}
