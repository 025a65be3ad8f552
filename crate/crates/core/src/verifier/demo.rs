//! Incomplete domains: the Picard-restricted condition can hold while no
//! fixed point exists. Finite spaces are always complete, so this is the
//! only place the completeness hypothesis is exercised.

use serde::{Deserialize, Serialize};

use crate::picard::{
    margin_epsdelta, solve_fixture, ContinuousFixture, MarginVerdict, Status, DEFAULT_FIXTURE_MAX_ITER,
    DEFAULT_TOLERANCE,
};
use crate::rational::{self, Rational};

pub const DEMO_MARGIN: (i64, i64) = (2, 3);
pub const DEMO_HORIZON: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoCase {
    pub fixture: String,
    pub domain: String,
    pub complete: bool,
    /// The Picard-restricted condition from `x0 = 1`, via the margin.
    pub clause_i: MarginVerdict,
    /// A fixed point in the domain that the orbit converges to.
    pub clause_ii: bool,
    #[serde(with = "rational::serde_str_opt")]
    pub fixed_point: Option<Rational>,
    pub picard: Status<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessDemo {
    pub cases: Vec<DemoCase>,
    pub verdict: String,
}

impl CompletenessDemo {
    pub fn case(&self, fixture: &str) -> Option<&DemoCase> {
        self.cases.iter().find(|c| c.fixture == fixture)
    }

    /// The incomplete case separates the clauses while the complete one
    /// has both.
    pub fn shows_necessity(&self) -> bool {
        let open = self.case("x-over-4-punctured");
        let closed = self.case("x-over-4");
        open.is_some_and(|c| c.clause_i.certified() && !c.clause_ii)
            && closed.is_some_and(|c| c.clause_i.certified() && c.clause_ii)
    }
}

pub fn run_case(name: &str) -> DemoCase {
    let fixture = ContinuousFixture::named(name).expect("demo fixtures exist");
    let x0 = Rational::from_integer(1.into());
    let c = rational::ratio(DEMO_MARGIN.0, DEMO_MARGIN.1);
    let clause_i = margin_epsdelta(&fixture, &x0, &c, DEMO_HORIZON).expect("valid margin and start");
    let run = solve_fixture(&fixture, 1.0, DEFAULT_TOLERANCE, DEFAULT_FIXTURE_MAX_ITER).expect("start in domain");
    let clause_ii = fixture.known_fixed_point.is_some() && run.converged();
    DemoCase {
        fixture: fixture.name.clone(),
        domain: fixture.domain.to_string(),
        complete: fixture.domain.is_complete(),
        clause_i,
        clause_ii,
        fixed_point: fixture.known_fixed_point.clone(),
        picard: run.status,
    }
}

pub fn completeness_necessity_demo() -> CompletenessDemo {
    let cases: Vec<DemoCase> =
        ["x-over-4-punctured", "x-over-4", "constant-punctured"].iter().map(|n| run_case(n)).collect();
    let mut demo = CompletenessDemo { cases, verdict: String::new() };
    demo.verdict = if demo.shows_necessity() {
        "completeness hypothesis necessary".into()
    } else {
        "necessity not demonstrated".into()
    };
    demo
}
