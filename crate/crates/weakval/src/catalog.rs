//! Built-in scenarios.

use crate::config::{parse_scenario, ScenarioConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Builtin {
    pub name: &'static str,
    pub procedure: &'static str,
    pub json: &'static str,
}

pub const BUILTINS: [Builtin; 7] = [
    Builtin {
        name: "aav-sigma",
        procedure: "weak value of sigma_z between <up_y| and |up_x>, equal to i",
        json: r#"{"kind": "weakvalue", "pre_state": "up_x", "post_state": "up_y", "observable": "sigma_z"}"#,
    },
    Builtin {
        name: "anomalous-theta",
        procedure: "post-selected weak measurement pointing far outside the spectrum, A_w = 1/cos(2 theta)",
        json: r#"{"kind": "postselect", "pre_state": "theta_plus", "post_state": "theta_minus",
                  "observable": "sigma_z", "theta": 0.75, "delta": 100}"#,
    },
    Builtin {
        name: "ideal-vs-weak",
        procedure: "impulsive measurement with a sharp pointer: readings cluster at the eigenvalues",
        json: r#"{"kind": "impulsive", "pre_state": "up_x", "observable": "sigma_z", "delta": 0.05,
                  "samples": 10000, "seed": 1}"#,
    },
    Builtin {
        name: "protective-two-level",
        procedure: "protective measurement of sigma_z in the excited state of sigma_x + sigma_z",
        json: r#"{"kind": "protective", "hamiltonian": "sigma_x+sigma_z", "pre_state": "eigen-1",
                  "observable": "sigma_z", "delta": 1, "T": 20, "doublings": 3}"#,
    },
    Builtin {
        name: "spin-protection",
        procedure: "two-state vector <up_y| |up_x> protected by a pre- and post-selected spin-10 ancilla",
        json: r#"{"kind": "protect2sv", "N": 10, "lambda": 0.5, "observable": "sigma_x", "delta": 1, "T": 40}"#,
    },
    Builtin {
        name: "decay-postselect",
        procedure: "adiabatic measurement on a decaying system conditioned on survival",
        json: r#"{"kind": "nonhermitian", "hamiltonian": [[[0, 0], [0, -0.1]], [[0, 0], [0, -0.1]]],
                  "pre_state": [[1.1656854249492381, 0], [0.565685424949238, 0]],
                  "observable": "sigma_z", "delta": 1, "T": 5, "samples": 10000, "seed": 7}"#,
    },
    Builtin {
        name: "kaon-toy",
        procedure: "bra/ket fidelity of a two-level decaying system with nearly parallel eigen-kets",
        json: r#"{"kind": "kaon-toy", "epsilon": 0.1}"#,
    },
];

pub fn find_builtin(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}

pub fn builtin_config(name: &str) -> Option<Result<ScenarioConfig, CliError>> {
    find_builtin(name).map(|b| parse_scenario(b.json))
}

/// One line per scenario: name, kind, procedure.
pub fn list_builtin() -> String {
    let mut out = String::new();
    for b in &BUILTINS {
        let kind = parse_scenario(b.json).map(|c| c.kind.name()).unwrap_or("?");
        out.push_str(&format!("{:<22}{:<14}{}\n", b.name, kind, b.procedure));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_parse() {
        for b in &BUILTINS {
            parse_scenario(b.json).unwrap_or_else(|e| panic!("{}: {e}", b.name));
        }
    }

    #[test]
    fn listing() {
        let text = list_builtin();
        assert!(text.contains("spin-protection"));
        assert_eq!(text.lines().count(), 7);
        assert!(text.lines().all(|l| l.split_whitespace().count() > 2));
    }
}
