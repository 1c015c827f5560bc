//! Mamdani fuzzy inference: min for AND, clipping for implication, max for
//! aggregation, centroid defuzzification on a sampled output grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples used per input when checking coverage and rule completeness.
const VALIDATION_SAMPLES: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipShape {
    Triangle,
    Trapezoid,
}

impl MembershipShape {
    fn arity(self) -> usize {
        match self {
            MembershipShape::Triangle => 3,
            MembershipShape::Trapezoid => 4,
        }
    }
}

/// Piecewise-linear membership function.
///
/// Coincident breakpoints give a shoulder: a triangle `[0, 0, 1]` is 1 at 0
/// and falls to 0 at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMembership", into = "RawMembership")]
pub struct MembershipFunction {
    shape: MembershipShape,
    points: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMembership {
    shape: MembershipShape,
    points: Vec<f64>,
}

impl TryFrom<RawMembership> for MembershipFunction {
    type Error = Error;
    fn try_from(raw: RawMembership) -> Result<Self> {
        MembershipFunction::new(raw.shape, raw.points)
    }
}

impl From<MembershipFunction> for RawMembership {
    fn from(mf: MembershipFunction) -> Self {
        RawMembership {
            shape: mf.shape,
            points: mf.points,
        }
    }
}

impl MembershipFunction {
    pub fn new(shape: MembershipShape, points: Vec<f64>) -> Result<Self> {
        if points.len() != shape.arity() {
            return Err(Error::invalid(
                "membership breakpoints",
                format!("{shape:?} needs {} points, got {}", shape.arity(), points.len()),
            ));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("membership breakpoints", "must be finite"));
        }
        if points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("membership breakpoints", "must be non-decreasing"));
        }
        if points[0] == points[points.len() - 1] {
            return Err(Error::invalid("membership breakpoints", "support has zero width"));
        }
        Ok(MembershipFunction { shape, points })
    }

    pub fn triangle(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(MembershipShape::Triangle, vec![a, b, c])
    }

    pub fn trapezoid(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(MembershipShape::Trapezoid, vec![a, b, c, d])
    }

    pub fn shape(&self) -> MembershipShape {
        self.shape
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = &self.points;
        let (a, b, c, d) = match self.shape {
            MembershipShape::Triangle => (p[0], p[1], p[1], p[2]),
            MembershipShape::Trapezoid => (p[0], p[1], p[2], p[3]),
        };
        if x < a || x > d {
            0.0
        } else if x < b {
            (x - a) / (b - a)
        } else if x <= c {
            1.0
        } else {
            (d - x) / (d - c)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub label: String,
    pub membership: MembershipFunction,
}

/// A linguistic variable over a closed universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVariable", into = "RawVariable")]
pub struct FuzzyVariable {
    name: String,
    universe: [f64; 2],
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariable {
    name: String,
    universe: [f64; 2],
    terms: Vec<RawTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    label: String,
    shape: MembershipShape,
    points: Vec<f64>,
}

impl TryFrom<RawVariable> for FuzzyVariable {
    type Error = Error;
    fn try_from(raw: RawVariable) -> Result<Self> {
        let terms = raw
            .terms
            .into_iter()
            .map(|t| {
                Ok(Term {
                    label: t.label,
                    membership: MembershipFunction::new(t.shape, t.points)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FuzzyVariable::new(raw.name, raw.universe, terms)
    }
}

impl From<FuzzyVariable> for RawVariable {
    fn from(v: FuzzyVariable) -> Self {
        RawVariable {
            name: v.name,
            universe: v.universe,
            terms: v
                .terms
                .into_iter()
                .map(|t| RawTerm {
                    label: t.label,
                    shape: t.membership.shape,
                    points: t.membership.points,
                })
                .collect(),
        }
    }
}

/// Membership degrees of one crisp value.
#[derive(Debug, Clone, PartialEq)]
pub struct Fuzzified {
    /// `(term index, degree)` for every term of the variable.
    pub degrees: Vec<(usize, f64)>,
    /// The input lay outside the universe and was clamped to it.
    pub clamped: bool,
}

impl FuzzyVariable {
    pub fn new(name: impl Into<String>, universe: [f64; 2], terms: Vec<Term>) -> Result<Self> {
        let name = name.into();
        if terms.is_empty() {
            return Err(Error::Empty("fuzzy variable terms"));
        }
        let [lo, hi] = universe;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("fuzzy universe", format!("{name}: [{lo}, {hi}]")));
        }
        for (i, t) in terms.iter().enumerate() {
            if terms[..i].iter().any(|o| o.label == t.label) {
                return Err(Error::invalid(
                    "fuzzy term",
                    format!("{name}: duplicate label {}", t.label),
                ));
            }
        }
        let var = FuzzyVariable { name, universe, terms };
        for k in 0..=4 * VALIDATION_SAMPLES {
            let x = grid_point(universe, k, 4 * VALIDATION_SAMPLES + 1);
            if var.terms.iter().all(|t| t.membership.eval(x) <= 0.0) {
                return Err(Error::invalid(
                    "fuzzy variable",
                    format!("{}: no term covers {x}", var.name),
                ));
            }
        }
        Ok(var)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> [f64; 2] {
        self.universe
    }

    pub fn span(&self) -> f64 {
        self.universe[1] - self.universe[0]
    }

    pub fn centre(&self) -> f64 {
        0.5 * (self.universe[0] + self.universe[1])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term_index(&self, label: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.label == label)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.universe[0], self.universe[1])
    }
}

/// Membership degree of `value` in every term of `variable`.
pub fn fuzzify(value: f64, variable: &FuzzyVariable) -> Result<Fuzzified> {
    if value.is_nan() {
        return Err(Error::invalid("fuzzy input", format!("{} is NaN", variable.name)));
    }
    let x = variable.clamp(value);
    Ok(Fuzzified {
        degrees: variable
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (i, t.membership.eval(x)))
            .collect(),
        clamped: x != value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rule {
    /// One term label per input variable, in input order.
    pub when: Vec<String>,
    pub then: String,
}

#[derive(Debug, Clone, PartialEq)]
struct CompiledRule {
    antecedent: Vec<usize>,
    consequent: usize,
}

/// Input variables, output variable and rule table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct FuzzySystem {
    inputs: Vec<FuzzyVariable>,
    output: FuzzyVariable,
    rules: Vec<Rule>,
    resolution: usize,
    compiled: Vec<CompiledRule>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    #[serde(default = "default_resolution")]
    resolution: usize,
    inputs: Vec<FuzzyVariable>,
    output: FuzzyVariable,
    rules: Vec<Rule>,
}

fn default_resolution() -> usize {
    512
}

impl TryFrom<RawSystem> for FuzzySystem {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        FuzzySystem::new(raw.inputs, raw.output, raw.rules, raw.resolution)
    }
}

impl From<FuzzySystem> for RawSystem {
    fn from(s: FuzzySystem) -> Self {
        RawSystem {
            resolution: s.resolution,
            inputs: s.inputs,
            output: s.output,
            rules: s.rules,
        }
    }
}

const DEFAULT_RULEBASE: &str = include_str!("default_rulebase.toml");

impl Default for FuzzySystem {
    fn default() -> Self {
        Self::from_toml(DEFAULT_RULEBASE).expect("shipped rule base is valid")
    }
}

impl FuzzySystem {
    pub fn new(inputs: Vec<FuzzyVariable>, output: FuzzyVariable, rules: Vec<Rule>, resolution: usize) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Empty("fuzzy inputs"));
        }
        if rules.is_empty() {
            return Err(Error::Empty("fuzzy rules"));
        }
        if resolution < 2 {
            return Err(Error::invalid("fuzzy resolution", "need at least 2 output samples"));
        }
        let mut compiled = Vec::with_capacity(rules.len());
        for (n, rule) in rules.iter().enumerate() {
            if rule.when.len() != inputs.len() {
                return Err(Error::invalid(
                    "fuzzy rule",
                    format!(
                        "rule {n} has {} antecedents for {} inputs",
                        rule.when.len(),
                        inputs.len()
                    ),
                ));
            }
            let antecedent = rule
                .when
                .iter()
                .zip(&inputs)
                .map(|(label, var)| {
                    var.term_index(label).ok_or_else(|| {
                        Error::invalid("fuzzy rule", format!("rule {n}: unknown term {label} for {}", var.name))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let consequent = output
                .term_index(&rule.then)
                .ok_or_else(|| Error::invalid("fuzzy rule", format!("rule {n}: unknown output term {}", rule.then)))?;
            compiled.push(CompiledRule { antecedent, consequent });
        }
        let system = FuzzySystem {
            inputs,
            output,
            rules,
            resolution,
            compiled,
        };
        system.check_completeness()?;
        Ok(system)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("rule base: {}", e.message())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("rule base serializes")
    }

    pub fn inputs(&self) -> &[FuzzyVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &FuzzyVariable {
        &self.output
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Same system with the rule table reordered.
    pub fn with_rules(&self, rules: Vec<Rule>) -> Result<Self> {
        Self::new(self.inputs.clone(), self.output.clone(), rules, self.resolution)
    }

    // Grid check: every sampled input combination fires some rule.
    fn check_completeness(&self) -> Result<()> {
        let n = self.inputs.len();
        let total = VALIDATION_SAMPLES.checked_pow(n as u32).filter(|&t| t <= 1 << 22);
        let Some(total) = total else {
            return Ok(());
        };
        let mut x = vec![0.0; n];
        for flat in 0..total {
            let mut rem = flat;
            for (v, var) in self.inputs.iter().enumerate() {
                let k = rem % VALIDATION_SAMPLES;
                rem /= VALIDATION_SAMPLES;
                x[v] = grid_point(var.universe, k, VALIDATION_SAMPLES);
            }
            if self.rule_strengths(&x).iter().all(|&s| s <= 0.0) {
                return Err(Error::invalid(
                    "fuzzy rule base",
                    format!("incomplete: no rule fires at {x:?}"),
                ));
            }
        }
        Ok(())
    }

    fn rule_strengths(&self, x: &[f64]) -> Vec<f64> {
        let degrees: Vec<Vec<f64>> = self
            .inputs
            .iter()
            .zip(x)
            .map(|(var, &xi)| {
                let xi = var.clamp(xi);
                var.terms.iter().map(|t| t.membership.eval(xi)).collect()
            })
            .collect();
        self.compiled
            .iter()
            .map(|r| {
                r.antecedent
                    .iter()
                    .enumerate()
                    .map(|(v, &t)| degrees[v][t])
                    .fold(1.0, f64::min)
            })
            .collect()
    }
}

/// Aggregated output membership: each output term clipped at its activation.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedSet {
    output: FuzzyVariable,
    /// Activation per output term (max over rules with that consequent).
    pub activations: Vec<f64>,
    /// Sample grid over the output universe.
    pub x: Vec<f64>,
    /// Aggregated membership at each grid point.
    pub mu: Vec<f64>,
}

impl AggregatedSet {
    /// Evaluate the aggregated membership at any point of the output universe.
    pub fn eval(&self, x: f64) -> f64 {
        self.output
            .terms
            .iter()
            .zip(&self.activations)
            .map(|(t, &a)| a.min(t.membership.eval(x)))
            .fold(0.0, f64::max)
    }

    /// Resample on a uniform grid of `n` points.
    pub fn resample(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let x = grid(self.output.universe, n);
        let mu = x.iter().map(|&xi| self.eval(xi)).collect();
        (x, mu)
    }
}

/// Uniform grid of `n` points spanning `[lo, hi]` inclusive.
pub fn grid(universe: [f64; 2], n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| grid_point(universe, k, n)).collect()
}

// Point k of an n-point grid; the last point is exactly the upper bound.
fn grid_point([lo, hi]: [f64; 2], k: usize, n: usize) -> f64 {
    if k + 1 >= n {
        hi
    } else {
        lo + (hi - lo) * k as f64 / (n - 1) as f64
    }
}

/// Mamdani inference for one input vector.
pub fn infer(system: &FuzzySystem, inputs: &[f64]) -> Result<AggregatedSet> {
    if inputs.len() != system.inputs.len() {
        return Err(Error::invalid(
            "fuzzy inputs",
            format!("expected {} values, got {}", system.inputs.len(), inputs.len()),
        ));
    }
    if let Some(v) = inputs.iter().position(|x| x.is_nan()) {
        return Err(Error::invalid(
            "fuzzy input",
            format!("{} is NaN", system.inputs[v].name),
        ));
    }
    let strengths = system.rule_strengths(inputs);
    let mut activations = vec![0.0_f64; system.output.terms.len()];
    for (rule, s) in system.compiled.iter().zip(strengths) {
        activations[rule.consequent] = activations[rule.consequent].max(s);
    }
    if activations.iter().all(|&a| a <= 0.0) {
        return Err(Error::NoRuleFired);
    }
    let mut set = AggregatedSet {
        output: system.output.clone(),
        activations,
        x: Vec::new(),
        mu: Vec::new(),
    };
    let (x, mu) = set.resample(system.resolution);
    set.x = x;
    set.mu = mu;
    Ok(set)
}

/// Centroid `Σ xᵢ·µᵢ / Σ µᵢ` of a sampled membership function.
pub fn defuzzify_centroid(x: &[f64], mu: &[f64]) -> Result<f64> {
    if x.len() != mu.len() {
        return Err(Error::invalid("sampled set", "grid and membership lengths differ"));
    }
    if x.is_empty() {
        return Err(Error::Empty("sampled set"));
    }
    let (num, den) = x
        .iter()
        .zip(mu)
        .fold((0.0, 0.0), |(n, d), (&xi, &m)| (n + xi * m, d + m));
    if den <= 0.0 {
        return Err(Error::ZeroMembership);
    }
    Ok(num / den)
}

/// Crisp inputs of the grasp-force fuzzy system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraspInputs {
    /// Target position along the conveyor, m.
    pub target_position: f64,
    /// Remaining vertical distance to the target, m.
    pub relative_depth: f64,
    /// Conveyor speed, m/s.
    pub speed: f64,
}

/// Desired grasp force for the given inputs, in the output universe's units.
pub fn fuzzy_desired_force(inputs: &GraspInputs, system: &FuzzySystem) -> Result<f64> {
    let set = infer(system, &[inputs.target_position, inputs.relative_depth, inputs.speed])?;
    defuzzify_centroid(&set.x, &set.mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shared() -> &'static FuzzySystem {
        static SYS: std::sync::OnceLock<FuzzySystem> = std::sync::OnceLock::new();
        SYS.get_or_init(FuzzySystem::default)
    }

    fn tri(a: f64, b: f64, c: f64) -> MembershipFunction {
        MembershipFunction::triangle(a, b, c).unwrap()
    }

    fn three_terms(lo: f64, hi: f64) -> Vec<Term> {
        let m = 0.5 * (lo + hi);
        vec![
            Term {
                label: "low".into(),
                membership: tri(lo, lo, m),
            },
            Term {
                label: "medium".into(),
                membership: tri(lo, m, hi),
            },
            Term {
                label: "high".into(),
                membership: tri(m, hi, hi),
            },
        ]
    }

    #[test]
    fn triangle_apex_and_feet() {
        let mf = tri(0.0, 1.0, 3.0);
        assert_eq!(mf.eval(1.0), 1.0);
        assert_eq!(mf.eval(0.0), 0.0);
        assert_eq!(mf.eval(3.0), 0.0);
        assert_eq!(mf.eval(0.5), 0.5);
        assert_eq!(mf.eval(2.0), 0.5);
        assert_eq!(mf.eval(-1.0), 0.0);
    }

    #[test]
    fn shoulders_and_plateau() {
        let left = tri(0.0, 0.0, 2.0);
        assert_eq!(left.eval(0.0), 1.0);
        assert_eq!(left.eval(1.0), 0.5);
        let trap = MembershipFunction::trapezoid(0.0, 1.0, 2.0, 4.0).unwrap();
        assert_eq!(trap.eval(1.5), 1.0);
        assert_eq!(trap.eval(3.0), 0.5);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(MembershipFunction::triangle(1.0, 0.0, 2.0).is_err());
        assert!(MembershipFunction::new(MembershipShape::Triangle, vec![0.0, 1.0]).is_err());
        assert!(MembershipFunction::triangle(1.0, 1.0, 1.0).is_err());
        assert!(MembershipFunction::triangle(0.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn midpoint_of_overlapping_triangles_is_half_half() {
        let var = FuzzyVariable::new("x", [0.0, 2.0], three_terms(0.0, 2.0)).unwrap();
        let f = fuzzify(0.5, &var).unwrap();
        assert_eq!(f.degrees, vec![(0, 0.5), (1, 0.5), (2, 0.0)]);
        assert!(!f.clamped);
        let apex = fuzzify(1.0, &var).unwrap();
        assert_eq!(apex.degrees[1].1, 1.0);
    }

    #[test]
    fn fuzzify_clamps_and_flags() {
        let var = FuzzyVariable::new("x", [0.0, 2.0], three_terms(0.0, 2.0)).unwrap();
        let f = fuzzify(5.0, &var).unwrap();
        assert!(f.clamped);
        assert_eq!(f.degrees[2].1, 1.0);
    }

    #[test]
    fn degrees_stay_in_unit_interval() {
        let sys = FuzzySystem::default();
        for var in sys.inputs().iter().chain(std::iter::once(sys.output())) {
            for x in grid(var.universe(), 1000) {
                let f = fuzzify(x, var).unwrap();
                assert!(f.degrees.iter().all(|&(_, d)| (0.0..=1.0).contains(&d)));
                assert!(f.degrees.iter().any(|&(_, d)| d > 0.0));
            }
        }
    }

    #[test]
    fn variable_requires_terms_and_coverage() {
        assert!(matches!(
            FuzzyVariable::new("x", [0.0, 1.0], vec![]),
            Err(Error::Empty(_))
        ));
        let gap = vec![
            Term {
                label: "a".into(),
                membership: tri(0.0, 0.0, 0.4),
            },
            Term {
                label: "b".into(),
                membership: tri(0.6, 1.0, 1.0),
            },
        ];
        assert!(FuzzyVariable::new("x", [0.0, 1.0], gap).is_err());
    }

    #[test]
    fn default_system_loads() {
        let sys = FuzzySystem::default();
        assert_eq!(sys.inputs().len(), 3);
        assert_eq!(sys.output().terms().len(), 5);
        assert_eq!(sys.rules().len(), 27);
        assert_eq!(sys.resolution(), 512);
    }

    #[test]
    fn toml_round_trip() {
        let sys = FuzzySystem::default();
        let back = FuzzySystem::from_toml(&sys.to_toml()).unwrap();
        assert_eq!(sys, back);
    }

    #[test]
    fn rejects_unknown_labels_and_keys() {
        let text = DEFAULT_RULEBASE.replacen("then = \"very_low\"", "then = \"nope\"", 1);
        assert!(FuzzySystem::from_toml(&text).is_err());
        let extra = format!("colour = 1\n{DEFAULT_RULEBASE}");
        assert!(FuzzySystem::from_toml(&extra).is_err());
    }

    #[test]
    fn incomplete_rulebase_is_rejected() {
        let sys = FuzzySystem::default();
        let rules: Vec<Rule> = sys.rules().iter().filter(|r| r.when[2] != "high").cloned().collect();
        assert!(sys.with_rules(rules).is_err());
    }

    #[test]
    fn single_rule_at_full_strength_reproduces_consequent() {
        let input = FuzzyVariable::new("x", [0.0, 1.0], three_terms(0.0, 1.0)).unwrap();
        let output = FuzzyVariable::new("y", [0.0, 10.0], three_terms(0.0, 10.0)).unwrap();
        let rules = ["low", "medium", "high"]
            .iter()
            .map(|l| Rule {
                when: vec![l.to_string()],
                then: "high".into(),
            })
            .collect();
        let sys = FuzzySystem::new(vec![input], output.clone(), rules, 512).unwrap();
        let set = infer(&sys, &[0.5]).unwrap();
        for (x, mu) in set.x.iter().zip(&set.mu) {
            assert_eq!(*mu, output.terms()[2].membership.eval(*x));
        }
    }

    #[test]
    fn matches_brute_force_inference() {
        let sys = FuzzySystem::default();
        let inputs = [0.17, 0.21, 0.033];
        let set = infer(&sys, &inputs).unwrap();
        // independent evaluation straight from the label-based rule table
        let degree = |var: &FuzzyVariable, label: &str, x: f64| {
            var.terms()
                .iter()
                .find(|t| t.label == label)
                .unwrap()
                .membership
                .eval(x)
        };
        let ys = grid(sys.output().universe(), 512);
        for (k, &y) in ys.iter().enumerate() {
            let mut expected: f64 = 0.0;
            for rule in sys.rules() {
                let mut w: f64 = 1.0;
                for (v, label) in rule.when.iter().enumerate() {
                    w = w.min(degree(&sys.inputs()[v], label, inputs[v]));
                }
                expected = expected.max(w.min(degree(sys.output(), &rule.then, y)));
            }
            assert!((set.mu[k] - expected).abs() <= 1e-12);
            assert!((set.x[k] - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn rule_order_does_not_matter() {
        let sys = FuzzySystem::default();
        let mut rules = sys.rules().to_vec();
        rules.reverse();
        rules.rotate_left(7);
        let permuted = sys.with_rules(rules).unwrap();
        let x = [0.41, 0.07, 0.062];
        assert_eq!(infer(&sys, &x).unwrap().mu, infer(&permuted, &x).unwrap().mu);
    }

    #[test]
    fn centroid_of_symmetric_shapes() {
        let x = grid([0.0, 10.0], 101);
        let rect: Vec<f64> = x
            .iter()
            .map(|&v| if (2.0..=6.0).contains(&v) { 1.0 } else { 0.0 })
            .collect();
        assert!((defuzzify_centroid(&x, &rect).unwrap() - 4.0).abs() < 1e-12);
        let t = tri(3.0, 5.0, 7.0);
        let mu: Vec<f64> = x.iter().map(|&v| t.eval(v)).collect();
        assert!((defuzzify_centroid(&x, &mu).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn centroid_of_zero_set_errors() {
        let x = grid([0.0, 1.0], 10);
        assert!(matches!(defuzzify_centroid(&x, &[0.0; 10]), Err(Error::ZeroMembership)));
    }

    #[test]
    fn centre_inputs_give_centre_output() {
        let sys = FuzzySystem::default();
        let inputs = GraspInputs {
            target_position: sys.inputs()[0].centre(),
            relative_depth: sys.inputs()[1].centre(),
            speed: sys.inputs()[2].centre(),
        };
        let f = fuzzy_desired_force(&inputs, &sys).unwrap();
        assert!((f - sys.output().centre()).abs() < 1e-12, "{f}");
    }

    #[test]
    fn desired_force_non_decreasing_in_speed() {
        let sys = FuzzySystem::default();
        for &(p, d) in &[(0.0, 0.0), (0.3, 0.15), (0.55, 0.02), (0.1, 0.29), (0.45, 0.2)] {
            let mut prev = f64::NEG_INFINITY;
            for v in grid(sys.inputs()[2].universe(), 50) {
                let f = fuzzy_desired_force(
                    &GraspInputs {
                        target_position: p,
                        relative_depth: d,
                        speed: v,
                    },
                    &sys,
                )
                .unwrap();
                assert!(f >= prev - 1e-9, "p={p} d={d} v={v}: {f} < {prev}");
                prev = f;
            }
        }
    }

    proptest! {
        #[test]
        fn output_within_universe(p in 0.0..=0.6f64, d in 0.0..=0.3f64, v in 0.0..=0.1f64) {
            let sys = shared();
            let f = fuzzy_desired_force(&GraspInputs { target_position: p, relative_depth: d, speed: v }, sys).unwrap();
            let [lo, hi] = sys.output().universe();
            prop_assert!(f >= lo && f <= hi);
        }

        #[test]
        fn output_continuous(p in 0.0..0.6f64, d in 0.0..0.3f64, v in 0.0..0.1f64, which in 0usize..3) {
            let sys = shared();
            let base = [p, d, v];
            let mut bumped = base;
            bumped[which] += 0.9e-6 * sys.inputs()[which].span();
            let f = |x: [f64; 3]| {
                fuzzy_desired_force(&GraspInputs { target_position: x[0], relative_depth: x[1], speed: x[2] }, sys).unwrap()
            };
            prop_assert!((f(base) - f(bumped)).abs() < 1e-3 * sys.output().span());
        }
    }
}
