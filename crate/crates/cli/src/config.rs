//! Domain configuration documents.
//!
//! A configuration is a JSON object with a `shape` discriminator and the shape's numeric
//! fields, plus optional `dimension`, `quadrature`, `solver` and `functional` entries:
//!
//! ```json
//! { "shape": "ellipsoid", "center": [0, 0], "semi_axes": [2, 1],
//!   "quadrature": { "kind": "circle", "degree": 256 } }
//! ```

use std::path::Path;

use psikit_core::geometry::Halfspace;
use psikit_core::sphere_quadrature::build_rule;
use psikit_core::{Domain, FunctionalSpec, SolverConfig, SphericalRule};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
    },
    Polytope {
        halfspaces: Vec<HalfspaceConfig>,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Polygon {
        center: [f64; 2],
        circumradius: f64,
        sides: usize,
        #[serde(default)]
        rotation: f64,
    },
    Stadium {
        p: [f64; 2],
        q: [f64; 2],
        radius: f64,
    },
    MultiAnnulus {
        center: Vec<f64>,
        rings: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceConfig {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    Circle,
    Product,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub kind: Option<QuadratureKind>,
    pub degree: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub gradient_tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub backtracking: Option<f64>,
    pub sufficient_decrease: Option<f64>,
    pub boundary_guard: Option<f64>,
    pub step_clip: Option<f64>,
    pub max_refinements: Option<usize>,
    pub start_margin: Option<f64>,
    pub agreement_tolerance: Option<f64>,
}

/// A parsed and validated configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub shape: ShapeConfig,
    pub domain: Domain,
    pub rule: SphericalRule,
    pub solver: SolverConfig,
    pub functional: FunctionalSpec,
}

pub const DEFAULT_DEGREE_2D: usize = 512;
pub const DEFAULT_DEGREE_3D: usize = 64;
pub const DEFAULT_MC_SAMPLES: usize = 1 << 16;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::config(msg.into())
}

impl ShapeConfig {
    pub fn build(&self) -> Result<Domain, CliError> {
        let dom = match self {
            ShapeConfig::Ball { center, radius } => Domain::ball(center.clone(), *radius),
            ShapeConfig::Ellipsoid { center, semi_axes } => Domain::ellipsoid(center.clone(), semi_axes.clone()),
            ShapeConfig::Polytope { halfspaces } => Domain::polytope(
                halfspaces.iter().map(|h| Halfspace { normal: h.normal.clone(), offset: h.offset }).collect(),
            ),
            ShapeConfig::Box { lo, hi } => Domain::axis_box(lo, hi),
            ShapeConfig::Polygon { center, circumradius, sides, rotation } => {
                Domain::regular_polygon(*center, *circumradius, *sides, *rotation)
            }
            ShapeConfig::Stadium { p, q, radius } => Domain::stadium(*p, *q, *radius),
            ShapeConfig::MultiAnnulus { center, rings } => Domain::multi_annulus(center.clone(), rings.clone()),
        };
        dom.map_err(|e| invalid(e.to_string()))
    }
}

pub fn build_quadrature(n: usize, q: &QuadratureConfig) -> Result<SphericalRule, CliError> {
    let kind = q.kind.unwrap_or(match n {
        2 => QuadratureKind::Circle,
        3 => QuadratureKind::Product,
        _ => QuadratureKind::MonteCarlo,
    });
    let rule = match kind {
        QuadratureKind::Circle | QuadratureKind::Product => {
            let expected = if kind == QuadratureKind::Circle { 2 } else { 3 };
            if n != expected {
                return Err(invalid(format!("quadrature kind {kind:?} needs dimension {expected}, domain has {n}")));
            }
            if q.samples.is_some() {
                return Err(invalid("'samples' only applies to monte_carlo quadrature"));
            }
            let degree = q.degree.unwrap_or(if n == 2 { DEFAULT_DEGREE_2D } else { DEFAULT_DEGREE_3D });
            build_rule(n, degree)
        }
        QuadratureKind::MonteCarlo => {
            if q.degree.is_some() {
                return Err(invalid("'degree' does not apply to monte_carlo quadrature"));
            }
            SphericalRule::monte_carlo(n, q.samples.unwrap_or(DEFAULT_MC_SAMPLES), q.seed.unwrap_or(0))
        }
    };
    rule.map_err(|e| invalid(e.to_string()))
}

fn apply_overrides(cfg: &mut SolverConfig, o: &SolverOverrides) {
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = o.$f { cfg.$f = v; } )* };
    }
    set!(
        gradient_tolerance,
        max_iterations,
        backtracking,
        sufficient_decrease,
        boundary_guard,
        step_clip,
        max_refinements,
        start_margin,
        agreement_tolerance
    );
}

fn take<T: for<'de> Deserialize<'de> + Default>(
    obj: &mut serde_json::Map<String, Value>,
    key: &str,
) -> Result<T, CliError> {
    match obj.remove(key) {
        None | Some(Value::Null) => Ok(T::default()),
        Some(v) => serde_json::from_value(v).map_err(|e| invalid(format!("{key}: {e}"))),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text).map_err(|e| invalid(format!("malformed configuration: {e}")))?;
        let Value::Object(mut obj) = value else {
            return Err(invalid("configuration must be a JSON object"));
        };
        let dimension: Option<usize> = take::<Option<usize>>(&mut obj, "dimension")?;
        let quadrature: QuadratureConfig = take(&mut obj, "quadrature")?;
        let overrides: SolverOverrides = take(&mut obj, "solver")?;
        let functional: Option<String> = take(&mut obj, "functional")?;
        let shape: ShapeConfig = serde_json::from_value(Value::Object(obj)).map_err(|e| invalid(e.to_string()))?;
        let domain = shape.build()?;
        let n = domain.dimension();
        if let Some(d) = dimension {
            if d != n {
                return Err(invalid(format!("dimension {d} does not match the shape's dimension {n}")));
            }
        }
        let rule = build_quadrature(n, &quadrature)?;
        let mut solver = SolverConfig::default();
        apply_overrides(&mut solver, &overrides);
        solver.validate().map_err(|e| invalid(e.to_string()))?;
        let functional = match functional {
            None => FunctionalSpec::psi(),
            Some(name) => FunctionalSpec::by_name(&name).map_err(|e| invalid(e.to_string()))?,
        };
        Ok(Config { shape, domain, rule, solver, functional })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Parses `"x,y,..."` into a point of the given dimension.
pub fn parse_point(s: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let p: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| invalid(format!("malformed point '{s}'")))?;
    if p.len() != n {
        return Err(invalid(format!("point '{s}' has {} coordinates, domain dimension is {n}", p.len())));
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!("point '{s}' is not finite")));
    }
    Ok(p)
}

/// Parses `"a1,b1;a2,b2;..."`.
pub fn parse_rings(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut rings = Vec::new();
    for part in s.split(';').filter(|p| !p.trim().is_empty()) {
        let v: Vec<f64> = part
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| invalid(format!("malformed ring '{part}'")))?;
        if v.len() != 2 {
            return Err(invalid(format!("ring '{part}' needs exactly two radii")));
        }
        rings.push((v[0], v[1]));
    }
    psikit_core::geometry::validate_rings(&rings).map_err(|e| invalid(e.to_string()))?;
    Ok(rings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_shape() {
        let docs = [
            r#"{"shape":"ball","center":[0,0],"radius":1}"#,
            r#"{"shape":"ellipsoid","center":[0,0,0],"semi_axes":[2,1,1]}"#,
            r#"{"shape":"box","lo":[0,0],"hi":[1,1]}"#,
            r#"{"shape":"polygon","center":[0,0],"circumradius":1,"sides":6}"#,
            r#"{"shape":"stadium","p":[-1,0],"q":[1,0],"radius":0.5}"#,
            r#"{"shape":"multi_annulus","center":[0,0],"rings":[[1,2],[3,4]]}"#,
            r#"{"shape":"polytope","halfspaces":[{"normal":[1,0],"offset":1},{"normal":[-1,0],"offset":1},
                {"normal":[0,1],"offset":1},{"normal":[0,-1],"offset":1}]}"#,
        ];
        for d in docs {
            Config::parse(d).unwrap_or_else(|e| panic!("{d}: {e}"));
        }
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        for d in [
            r#"{"shape":"ball","center":[0,0],"radius":1,"colour":"red"}"#,
            r#"{"shape":"ball","center":[0,0],"radius":-1}"#,
            r#"{"shape":"cube","center":[0,0]}"#,
            r#"{"shape":"ball","center":[0,0],"radius":1,"dimension":3}"#,
            r#"{"shape":"ball","center":[0,0],"radius":1,"quadrature":{"kind":"product"}}"#,
            r#"{"shape":"ball","center":[0,0],"radius":1,"quadrature":{"degree":8,"nodes":3}}"#,
            r#"{"shape":"ball","center":[0,0],"radius":1,"solver":{"step_clip":2}}"#,
            r#"{"shape":"multi_annulus","center":[0,0],"rings":[[2,1]]}"#,
            r#"[1,2]"#,
            r#"{"shape":"ball""#,
        ] {
            assert_eq!(Config::parse(d).unwrap_err().code, 2, "{d}");
        }
    }

    #[test]
    fn quadrature_defaults() {
        let c = Config::parse(r#"{"shape":"ball","center":[0,0,0,0],"radius":1}"#).unwrap();
        assert_eq!(c.rule.len(), DEFAULT_MC_SAMPLES);
        let c = Config::parse(r#"{"shape":"ball","center":[0,0],"radius":1,"quadrature":{"degree":8}}"#).unwrap();
        assert_eq!(c.rule.len(), 16);
    }

    #[test]
    fn points_and_rings() {
        assert_eq!(parse_point("0.5, -1", 2).unwrap(), vec![0.5, -1.0]);
        assert!(parse_point("0.5", 2).is_err());
        assert!(parse_point("a,b", 2).is_err());
        assert_eq!(parse_rings("1,2;3,4").unwrap(), vec![(1.0, 2.0), (3.0, 4.0)]);
        assert!(parse_rings("2,1").is_err());
        assert!(parse_rings("1,2,3").is_err());
        assert!(parse_rings("").is_err());
    }
}
