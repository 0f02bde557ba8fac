//! Machine-readable run reports and their human rendering.

use serde::Serialize;

/// Stable per-run report. Identical inputs produce identical reports;
/// wall time is attached only in verbose mode so machine output stays
/// byte-stable.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub scenario_digest: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub powers: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sir: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sir_targets: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shortfall: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nash_product: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equals_min_power: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, digest: String, status: &str) -> Self {
        Self {
            command: command.to_string(),
            scenario_digest: digest,
            status: status.to_string(),
            rho: None,
            powers: None,
            sir: None,
            sir_targets: None,
            shortfall: None,
            objective_kind: None,
            objective_value: None,
            nash_product: None,
            equals_min_power: None,
            message: None,
            wall_time_ms: None,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("command:  {}", self.command));
        line(format!("scenario: {}", self.scenario_digest));
        line(format!("status:   {}", self.status));
        if let Some(rho) = self.rho {
            line(format!("rho:      {rho:.12}"));
        }
        if let Some(powers) = &self.powers {
            line(format!("powers:   {}", join(powers)));
            line(format!(
                "total:    {:.9}",
                powers.iter().sum::<f64>()
            ));
        }
        if let (Some(sir), Some(targets)) = (&self.sir, &self.sir_targets) {
            line("user      sir           target        ratio".to_string());
            for (i, (s, g)) in sir.iter().zip(targets).enumerate() {
                line(format!("{:<9} {:<13.9} {:<13.9} {:.9}", i + 1, s, g, s / g));
            }
        }
        if let Some(kind) = &self.objective_kind {
            line(format!(
                "objective: {kind} = {:.9}",
                self.objective_value.unwrap_or(f64::NAN)
            ));
        }
        if let Some(np) = self.nash_product {
            line(format!("nash_product: {np:.9}"));
        }
        if let Some(eq) = self.equals_min_power {
            line(format!("equals_min_power: {eq}"));
        }
        if let Some(msg) = &self.message {
            line(format!("note:     {msg}"));
        }
        if let Some(ms) = self.wall_time_ms {
            line(format!("wall_time_ms: {ms:.3}"));
        }
        out
    }
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.9}"))
        .collect::<Vec<_>>()
        .join(" ")
}
