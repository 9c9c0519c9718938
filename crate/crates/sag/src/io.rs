//! Alert-log and trace CSV formats.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use sag_core::{AlertEvent, AlertTypeId, CycleReport};

use crate::error::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct AlertRow {
    cycle_id: usize,
    timestamp_s: u32,
    type_id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub cycle_id: u64,
    pub alert_idx: usize,
    pub timestamp_s: u32,
    pub type_id: usize,
    pub best_type: usize,
    pub signal: String,
    pub ossp_utility: f64,
    pub online_sse_utility: f64,
    pub offline_sse_utility: Option<f64>,
    pub remaining_budget: f64,
}

pub const ALERT_HEADER: [&str; 3] = ["cycle_id", "timestamp_s", "type_id"];

pub fn write_alert_log<W: Write>(out: W, cycles: &[Vec<AlertEvent>]) -> Result<(), Failure> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(ALERT_HEADER)
        .map_err(|e| Failure::internal(e.to_string()))?;
    for (cycle_id, cycle) in cycles.iter().enumerate() {
        for a in cycle {
            w.serialize(AlertRow {
                cycle_id,
                timestamp_s: a.timestamp,
                type_id: a.type_id.0,
            })
            .map_err(|e| Failure::internal(e.to_string()))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses an alert log into cycles `0..=max(cycle_id)`; cycles without rows
/// are empty. Alerts are ordered by time within each cycle.
pub fn read_alert_log<R: Read>(input: R, num_types: usize) -> Result<Vec<Vec<AlertEvent>>, Failure> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers().map_err(|e| Failure::data(e.to_string()))?;
    if headers != ALERT_HEADER.as_slice() {
        return Err(Failure::data(format!("unexpected alert log header {headers:?}")));
    }
    let mut cycles: Vec<Vec<AlertEvent>> = Vec::new();
    for (line, row) in reader.deserialize::<AlertRow>().enumerate() {
        let row = row.map_err(|e| Failure::data(format!("row {}: {e}", line + 1)))?;
        if row.type_id >= num_types {
            return Err(Failure::data(format!(
                "row {}: type {} but only {num_types} types are configured",
                line + 1,
                row.type_id
            )));
        }
        let alert = AlertEvent::new(row.timestamp_s, AlertTypeId(row.type_id))
            .map_err(|e| Failure::data(format!("row {}: {e}", line + 1)))?;
        if cycles.len() <= row.cycle_id {
            cycles.resize_with(row.cycle_id + 1, Vec::new);
        }
        cycles[row.cycle_id].push(alert);
    }
    for c in &mut cycles {
        c.sort_by_key(|a| (a.timestamp, a.type_id));
    }
    Ok(cycles)
}

pub fn trace_rows(report: &CycleReport) -> impl Iterator<Item = TraceRow> + '_ {
    report.trace.iter().map(move |d| TraceRow {
        cycle_id: report.cycle_id,
        alert_idx: d.alert_index,
        timestamp_s: d.alert.timestamp,
        type_id: d.alert.type_id.0,
        best_type: d.best_type.0,
        signal: d.signal.as_str().to_string(),
        ossp_utility: d.ossp_utility,
        online_sse_utility: d.online_sse_utility,
        offline_sse_utility: d.offline_sse_utility,
        remaining_budget: d.remaining_budget,
    })
}

pub const TRACE_HEADER: [&str; 10] = [
    "cycle_id",
    "alert_idx",
    "timestamp_s",
    "type_id",
    "best_type",
    "signal",
    "ossp_utility",
    "online_sse_utility",
    "offline_sse_utility",
    "remaining_budget",
];

pub fn write_trace<W: Write>(out: W, reports: &[CycleReport]) -> Result<(), Failure> {
    // Written by hand so that a trace without rows still has its header.
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(TRACE_HEADER)
        .map_err(|e| Failure::internal(e.to_string()))?;
    for report in reports {
        for row in trace_rows(report) {
            w.serialize(row).map_err(|e| Failure::internal(e.to_string()))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRow>, Failure> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::data(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alert_log_round_trip() {
        let cycles = vec![
            vec![
                AlertEvent::new(5, AlertTypeId(1)).unwrap(),
                AlertEvent::new(86_399, AlertTypeId(0)).unwrap(),
            ],
            vec![],
            vec![AlertEvent::new(0, AlertTypeId(2)).unwrap()],
        ];
        let mut buf = Vec::new();
        write_alert_log(&mut buf, &cycles).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("cycle_id,timestamp_s,type_id\n0,5,1\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_alert_log(&buf[..], 3).unwrap(), cycles);
    }

    #[test]
    fn bad_rows_are_data_errors() {
        let bad = [
            "cycle_id,timestamp_s,type_id\n0,86400,0\n",
            "cycle_id,timestamp_s,type_id\n0,10,9\n",
            "cycle_id,timestamp_s,type_id\n0,x,0\n",
            "cycle,ts,type\n0,1,0\n",
        ];
        for text in bad {
            assert_eq!(read_alert_log(text.as_bytes(), 3).unwrap_err().exit_code(), 3, "{text}");
        }
    }

    #[test]
    fn empty_log_keeps_header() {
        let mut buf = Vec::new();
        write_alert_log(&mut buf, &[]).unwrap();
        assert_eq!(buf, b"cycle_id,timestamp_s,type_id\n");
        assert!(read_alert_log(&buf[..], 1).unwrap().is_empty());
    }
}
