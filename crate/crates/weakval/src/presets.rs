//! Named states and operators.
//!
//! States: `up_z`, `down_z`, `up_x`, `down_x`, `up_y`, `down_y`,
//! `theta_plus`/`theta_minus` (`cos θ|↑⟩ ± sin θ|↓⟩`, needs `theta`),
//! `top_x`/`top_y`/`top_z` (largest eigenvalue of `S·n` for the system spin),
//! `eigen-<i>` (i-th level of the system Hamiltonian, ascending).
//!
//! Operators: `sigma_x`, `sigma_y`, `sigma_z`, `S_x`, `S_y`, `S_z`,
//! `identity`, `h_eff` (needs `N` and `lambda`), joined by `+`, each term
//! optionally scaled as `<number>*<name>`.

use weakval_core::adiabatic::{build_spin_protection, effective_hamiltonian};
use weakval_core::hilbert::{
    axis_top_state, eig_hermitian, qubit, spin_operators, Operator, Spin, StateVector, X_AXIS, Y_AXIS, Z_AXIS,
};
use weakval_core::C64;

use crate::config::{ComplexPair, Kind, OperatorSpec, ScenarioConfig, StateSpec};
use crate::error::CliError;

/// What named presets are resolved against.
#[derive(Debug, Clone)]
pub struct Context {
    pub dim: usize,
    pub spin: Spin,
    pub hamiltonian: Option<Operator>,
    theta: Option<f64>,
    ancilla_spin: Option<u32>,
    lambda: Option<f64>,
}

fn c(pair: &ComplexPair) -> C64 {
    C64::new(pair[0], pair[1])
}

fn explicit_operator(field: &str, rows: &[Vec<ComplexPair>]) -> Result<Operator, CliError> {
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(c).collect()).collect();
    Operator::from_rows(&rows).map_err(|e| CliError::validation(field, e.to_string()))
}

fn parse_spin(name: &str) -> Option<Spin> {
    let j = name.strip_prefix("spin-")?;
    let value = match j.split_once('/') {
        Some((a, b)) => a.parse::<f64>().ok()? / b.parse::<f64>().ok()?,
        None => j.parse::<f64>().ok()?,
    };
    Spin::new(value).ok()
}

impl Context {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self, CliError> {
        let mut ctx = Context {
            dim: 2,
            spin: Spin::HALF,
            hamiltonian: None,
            theta: cfg.theta,
            ancilla_spin: cfg.ancilla_spin,
            lambda: cfg.lambda,
        };
        match &cfg.system {
            None => {
                if let Some(d) = explicit_dim(cfg) {
                    ctx.set_dim(d);
                }
            }
            Some(OperatorSpec::Named(name)) if name == "pauli" => {}
            Some(OperatorSpec::Named(name)) => {
                let spin = parse_spin(name).ok_or_else(|| {
                    CliError::validation("system", format!("unknown system `{name}` (expected pauli, spin-<j> or a matrix)"))
                })?;
                ctx.spin = spin;
                ctx.dim = spin.dim();
            }
            Some(OperatorSpec::Explicit(rows)) => {
                let h = explicit_operator("system", rows)?;
                ctx.set_dim(h.dim());
                ctx.hamiltonian = Some(h);
            }
        }
        if cfg.kind == Kind::Protect2sv && ctx.dim != 2 {
            return Err(CliError::validation("system", "must be a spin-1/2 for protect2sv"));
        }
        if let Some(spec) = &cfg.hamiltonian {
            let h = ctx.operator(spec, "hamiltonian")?;
            ctx.hamiltonian = Some(h);
        }
        Ok(ctx)
    }

    fn set_dim(&mut self, d: usize) {
        self.dim = d;
        self.spin = Spin::from_twice((d - 1) as u32);
    }

    fn check_dim(&self, field: &str, d: usize) -> Result<(), CliError> {
        if d != self.dim {
            return Err(CliError::validation(
                field,
                format!("has dimension {d}, system dimension is {}", self.dim),
            ));
        }
        Ok(())
    }

    pub fn state(&self, spec: &StateSpec, field: &str) -> Result<StateVector, CliError> {
        let psi = match spec {
            StateSpec::Explicit(v) => StateVector::new(v.iter().map(c).collect())
                .map_err(|_| CliError::validation(field, "must not be the zero vector"))?,
            StateSpec::Named(name) => self.named_state(name, field)?,
        };
        self.check_dim(field, psi.dim())?;
        Ok(psi)
    }

    fn named_state(&self, name: &str, field: &str) -> Result<StateVector, CliError> {
        let unknown = || CliError::validation(field, format!("unknown state `{name}`"));
        let axis = |a: [f64; 3]| axis_top_state(a, self.spin).map_err(CliError::from);
        Ok(match name {
            "up_z" => qubit::up_z(),
            "down_z" => qubit::down_z(),
            "up_x" => qubit::up_x(),
            "down_x" => qubit::down_x(),
            "up_y" => qubit::up_y(),
            "down_y" => qubit::down_y(),
            "theta_plus" | "theta_minus" => {
                let theta = self
                    .theta
                    .ok_or_else(|| CliError::validation("theta", format!("is required by state `{name}`")))?;
                qubit::tilted(theta, if name == "theta_plus" { 1.0 } else { -1.0 })
            }
            "top_x" => axis(X_AXIS)?,
            "top_y" => axis(Y_AXIS)?,
            "top_z" => axis(Z_AXIS)?,
            _ => {
                let i: usize = name.strip_prefix("eigen-").and_then(|s| s.parse().ok()).ok_or_else(unknown)?;
                let h = self
                    .hamiltonian
                    .as_ref()
                    .ok_or_else(|| CliError::validation(field, format!("`{name}` needs a system Hamiltonian")))?;
                let spec = eig_hermitian(h)?;
                spec.eigenvectors
                    .get(i)
                    .cloned()
                    .ok_or_else(|| CliError::validation(field, format!("level {i} does not exist")))?
            }
        })
    }

    pub fn operator(&self, spec: &OperatorSpec, field: &str) -> Result<Operator, CliError> {
        let op = match spec {
            OperatorSpec::Explicit(rows) => explicit_operator(field, rows)?,
            OperatorSpec::Named(expr) => {
                let mut total: Option<Operator> = None;
                for term in expr.split('+').map(str::trim) {
                    let (scale, name) = match term.split_once('*') {
                        Some((k, n)) => {
                            let k: f64 = k.trim().parse().map_err(|_| {
                                CliError::validation(field, format!("bad coefficient in `{term}`"))
                            })?;
                            (k, n.trim())
                        }
                        None => (1.0, term),
                    };
                    let op = self.named_operator(name, field)? * scale;
                    total = Some(match total {
                        Some(t) => {
                            self.check_dim(field, op.dim())?;
                            t + op
                        }
                        None => op,
                    });
                }
                total.ok_or_else(|| CliError::validation(field, "is empty"))?
            }
        };
        self.check_dim(field, op.dim())?;
        Ok(op)
    }

    fn named_operator(&self, name: &str, field: &str) -> Result<Operator, CliError> {
        Ok(match name {
            "sigma_x" => Operator::pauli_x(),
            "sigma_y" => Operator::pauli_y(),
            "sigma_z" => Operator::pauli_z(),
            "S_x" => spin_operators(self.spin).x,
            "S_y" => spin_operators(self.spin).y,
            "S_z" => spin_operators(self.spin).z,
            "identity" => Operator::identity(self.dim),
            "h_eff" => {
                let (Some(n), Some(lambda)) = (self.ancilla_spin, self.lambda) else {
                    return Err(CliError::validation(field, "`h_eff` needs N and lambda"));
                };
                effective_hamiltonian(&build_spin_protection(n, lambda)?)?
            }
            _ => return Err(CliError::validation(field, format!("unknown operator `{name}`"))),
        })
    }
}

/// Dimension implied by explicit matrices or vectors when `system` is absent.
fn explicit_dim(cfg: &ScenarioConfig) -> Option<usize> {
    for spec in [&cfg.hamiltonian, &cfg.observable].into_iter().flatten() {
        if let OperatorSpec::Explicit(rows) = spec {
            return Some(rows.len());
        }
    }
    for spec in [&cfg.pre_state, &cfg.post_state].into_iter().flatten() {
        if let StateSpec::Explicit(v) = spec {
            return Some(v.len());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(json: &str) -> Context {
        Context::from_config(&crate::config::parse_scenario(json).unwrap()).unwrap()
    }

    #[test]
    fn named_sums() {
        let c = ctx(r#"{"kind": "weakvalue", "pre_state": "up_x", "post_state": "up_y", "observable": "sigma_z"}"#);
        let h = c.operator(&OperatorSpec::Named("sigma_x + 2*sigma_z".into()), "o").unwrap();
        assert_eq!(h.entry(0, 0), C64::new(2.0, 0.0));
        assert_eq!(h.entry(0, 1), C64::new(1.0, 0.0));
    }

    #[test]
    fn spin_system() {
        let c = ctx(r#"{"kind": "weakvalue", "system": "spin-3/2", "pre_state": "top_x", "post_state": "top_y", "observable": "S_z"}"#);
        assert_eq!(c.dim, 4);
        assert!(c.state(&StateSpec::Named("up_x".into()), "pre_state").is_err());
    }

    #[test]
    fn eigen_states_need_hamiltonian() {
        let c = ctx(r#"{"kind": "protective", "hamiltonian": "sigma_x+sigma_z", "observable": "sigma_z", "delta": 1, "T": 10}"#);
        let e1 = c.state(&StateSpec::Named("eigen-1".into()), "pre_state").unwrap();
        assert!(e1.amplitudes()[0].re > 0.9);
        let c = ctx(r#"{"kind": "weakvalue", "pre_state": "up_x", "post_state": "up_y", "observable": "sigma_z"}"#);
        assert!(c.state(&StateSpec::Named("eigen-0".into()), "pre_state").is_err());
    }
}
