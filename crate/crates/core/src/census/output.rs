//! CSV and JSON renderings of census rows.

use std::fmt::Write as _;

use serde::Serialize;

use super::{CensusRow, EtRecord};

pub const CSV_HEADER: &str = "length,total,excess";

/// `length,total,excess` with one newline-terminated row per length.
pub fn to_csv(rows: &[CensusRow]) -> String {
    let mut out = String::with_capacity(16 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(out, "{},{},{}", r.length, r.total, r.excess).unwrap();
    }
    out
}

#[derive(Serialize)]
struct JsonRow<'a> {
    length: usize,
    total: u64,
    excess: u64,
    ets: &'a [EtRecord],
}

/// Array of `{length, total, excess, ets}` objects.
pub fn to_json(rows: &[CensusRow]) -> String {
    let view: Vec<JsonRow<'_>> = rows
        .iter()
        .map(|r| JsonRow {
            length: r.length,
            total: r.total,
            excess: r.excess,
            ets: &r.ets,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&view).expect("rows serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::census;
    use crate::par::Exec;

    #[test]
    fn csv_shape() {
        let rows = census(1, 3, Exec::Sequential).unwrap();
        assert_eq!(to_csv(&rows), "length,total,excess\n1,1,0\n2,1,0\n3,2,0\n");
    }

    #[test]
    fn json_shape() {
        let rows = census(15, 15, Exec::Sequential).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json(&rows)).unwrap();
        let row = &v[0];
        let mut keys: Vec<&str> = row
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        keys.sort();
        assert_eq!(keys, vec!["ets", "excess", "length", "total"]);
        assert_eq!(row["total"], 611);
        let et = &row["ets"][0];
        assert_eq!(et["sigma"], "uddudududduddd");
        assert_eq!(et["c"], 16);
        assert_eq!(et["modulus"], 729);
        assert_eq!(et["a_first"], 4);
        assert_eq!(et["perm_first"][0], 3);
        assert_eq!(et["perm_asymptotic"][0], 4);
    }
}
