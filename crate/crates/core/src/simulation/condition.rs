use std::fmt;
use std::str::FromStr;

use crate::model::LoadingLevel;

use super::SimulationError;

pub const STUDY_FACTORS: [usize; 4] = [3, 6, 9, 12];
pub const STUDY_BLOCK_SIZES: [usize; 2] = [5, 10];
pub const STUDY_RHOS: [f64; 3] = [0.0, 0.25, 0.50];
pub const STUDY_SAMPLE_SIZES: [usize; 2] = [300, 900];

/// One cell of the simulation design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationCondition {
    /// Number of factors.
    pub q: usize,
    /// Variables per factor.
    pub per_factor: usize,
    pub level: LoadingLevel,
    /// Population factor inter-correlation.
    pub rho: f64,
    /// Sample size.
    pub n: usize,
}

impl SimulationCondition {
    pub fn p(&self) -> usize {
        self.q * self.per_factor
    }

    /// True when every field is one of the levels of the published design.
    pub fn is_study_condition(&self) -> bool {
        STUDY_FACTORS.contains(&self.q)
            && STUDY_BLOCK_SIZES.contains(&self.per_factor)
            && STUDY_RHOS.iter().any(|r| (r - self.rho).abs() < 1e-12)
            && STUDY_SAMPLE_SIZES.contains(&self.n)
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        if self.q == 0 {
            return Err(SimulationError::InvalidCondition("q must be at least 1".into()));
        }
        if !STUDY_BLOCK_SIZES.contains(&self.per_factor) {
            return Err(SimulationError::InvalidCondition(format!(
                "per_factor must be 5 or 10, got {}",
                self.per_factor
            )));
        }
        if self.n <= self.p() {
            return Err(SimulationError::InvalidCondition(format!(
                "sample size {} must exceed the number of variables {}",
                self.n,
                self.p()
            )));
        }
        if !self.rho.is_finite() {
            return Err(SimulationError::InvalidCondition("rho must be finite".into()));
        }
        Ok(())
    }
}

impl fmt::Display for SimulationCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} p={} q={} level={} rho={:.2}",
            self.n,
            self.p(),
            self.q,
            self.level,
            self.rho
        )
    }
}

/// Named condition grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Correlated factors (rho .25 and .50): 64 conditions.
    Table2,
    /// Orthogonal factors (rho 0): 32 conditions.
    TableA1,
    /// The full 96-condition design.
    All,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Table2 => "paper-table2",
            Preset::TableA1 => "paper-tableA1",
            Preset::All => "paper-all",
        }
    }

    fn rhos(self) -> &'static [f64] {
        match self {
            Preset::Table2 => &STUDY_RHOS[1..],
            Preset::TableA1 => &STUDY_RHOS[..1],
            Preset::All => &STUDY_RHOS,
        }
    }

    /// Conditions ordered by rho, then block size, factors, loading level
    /// and sample size.
    pub fn conditions(self) -> Vec<SimulationCondition> {
        let mut out = Vec::new();
        for &rho in self.rhos() {
            for per_factor in STUDY_BLOCK_SIZES {
                for q in STUDY_FACTORS {
                    for level in LoadingLevel::ALL {
                        for n in STUDY_SAMPLE_SIZES {
                            out.push(SimulationCondition {
                                q,
                                per_factor,
                                level,
                                rho,
                                n,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

impl FromStr for Preset {
    type Err = SimulationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "paper-table2" => Ok(Preset::Table2),
            "paper-tablea1" => Ok(Preset::TableA1),
            "paper-all" => Ok(Preset::All),
            _ => Err(SimulationError::UnknownPreset(s.to_string())),
        }
    }
}

/// Parses a conditions table with a header naming the columns
/// `n, q, per_factor, level, rho` (any order). Blank lines and lines starting
/// with `#` are skipped.
pub fn parse_conditions_csv(text: &str) -> Result<Vec<SimulationCondition>, SimulationError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or_else(|| SimulationError::ConditionsFile {
        line: 1,
        message: "empty conditions file".into(),
    })?;
    let names: Vec<String> = header.split(',').map(|h| h.trim().to_ascii_lowercase()).collect();
    let column = |name: &str| {
        names.iter().position(|h| h == name).ok_or_else(|| SimulationError::ConditionsFile {
            line: header_line,
            message: format!("missing column '{name}'"),
        })
    };
    let (cn, cq, cpf, clevel, crho) = (
        column("n")?,
        column("q")?,
        column("per_factor")?,
        column("level")?,
        column("rho")?,
    );

    let mut out = Vec::new();
    for (line, text) in lines {
        let cells: Vec<&str> = text.split(',').map(str::trim).collect();
        if cells.len() != names.len() {
            return Err(SimulationError::ConditionsFile {
                line,
                message: format!("expected {} fields, found {}", names.len(), cells.len()),
            });
        }
        let bad = |what: &str, value: &str| SimulationError::ConditionsFile {
            line,
            message: format!("cannot parse {what} from '{value}'"),
        };
        let cond = SimulationCondition {
            n: cells[cn].parse().map_err(|_| bad("n", cells[cn]))?,
            q: cells[cq].parse().map_err(|_| bad("q", cells[cq]))?,
            per_factor: cells[cpf].parse().map_err(|_| bad("per_factor", cells[cpf]))?,
            level: cells[clevel].parse().map_err(|_| bad("level", cells[clevel]))?,
            rho: cells[crho].parse().map_err(|_| bad("rho", cells[crho]))?,
        };
        cond.validate().map_err(|e| SimulationError::ConditionsFile {
            line,
            message: e.to_string(),
        })?;
        out.push(cond);
    }
    if out.is_empty() {
        return Err(SimulationError::ConditionsFile {
            line: header_line,
            message: "no conditions listed".into(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_sizes() {
        assert_eq!(Preset::All.conditions().len(), 96);
        assert_eq!(Preset::Table2.conditions().len(), 64);
        assert_eq!(Preset::TableA1.conditions().len(), 32);
        assert!(Preset::All.conditions().iter().all(|c| c.is_study_condition()));
        assert!(Preset::TableA1.conditions().iter().all(|c| c.rho == 0.0));
    }

    #[test]
    fn preset_names_round_trip() {
        for p in [Preset::Table2, Preset::TableA1, Preset::All] {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("paper-table3".parse::<Preset>().is_err());
    }

    #[test]
    fn parses_conditions_in_any_column_order() {
        let text = "# custom grid\nrho,level,q,per_factor,n\n0.5,low,3,5,300\n\n.25,high,6,10,900\n";
        let conds = parse_conditions_csv(text).unwrap();
        assert_eq!(conds.len(), 2);
        assert_eq!(
            conds[0],
            SimulationCondition { q: 3, per_factor: 5, level: LoadingLevel::Low, rho: 0.5, n: 300 }
        );
        assert_eq!(conds[1].level, LoadingLevel::High);
        assert_eq!(conds[1].p(), 60);
    }

    #[test]
    fn conditions_file_errors_name_the_line() {
        let missing = "n,q,per_factor,level\n300,3,5,low\n";
        assert!(matches!(
            parse_conditions_csv(missing),
            Err(SimulationError::ConditionsFile { line: 1, .. })
        ));
        let ragged = "n,q,per_factor,level,rho\n300,3,5,low,0.5\n300,3,5\n";
        assert!(matches!(
            parse_conditions_csv(ragged),
            Err(SimulationError::ConditionsFile { line: 3, .. })
        ));
        let too_small = "n,q,per_factor,level,rho\n10,3,5,low,0.5\n";
        assert!(matches!(
            parse_conditions_csv(too_small),
            Err(SimulationError::ConditionsFile { line: 2, .. })
        ));
    }

    #[test]
    fn free_values_are_flagged() {
        let c = SimulationCondition { q: 4, per_factor: 5, level: LoadingLevel::Low, rho: 0.3, n: 500 };
        assert!(c.validate().is_ok());
        assert!(!c.is_study_condition());
    }
}
