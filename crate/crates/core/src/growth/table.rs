// SPDX-License-Identifier: Apache-2.0

//! Mass table CSV: `fov,t,nucleus_pg,cytoplasm_pg,total_pg,nucleus_area_um2,
//! cytoplasm_area_um2[,confluence]`. Columns are matched by header name.

use std::io::{Read, Write};

use super::{GrowthError, MassRecord, MassSeries};

pub const MASS_TABLE_COLUMNS: [&str; 8] =
    ["fov", "t", "nucleus_pg", "cytoplasm_pg", "total_pg", "nucleus_area_um2", "cytoplasm_area_um2", "confluence"];

pub fn read_mass_table(reader: impl Read) -> Result<MassSeries, GrowthError> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rd.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let required = |name: &str| {
        col(name).ok_or_else(|| GrowthError::Table { line: 1, message: format!("missing column {name:?}") })
    };
    let fov = required("fov")?;
    let t = required("t")?;
    let nm = required("nucleus_pg")?;
    let cm = required("cytoplasm_pg")?;
    let na = required("nucleus_area_um2")?;
    let ca = required("cytoplasm_area_um2")?;
    let conf = col("confluence");

    let mut records = Vec::new();
    for row in rd.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64, GrowthError> {
            let s = row.get(i).unwrap_or("");
            s.parse::<f64>().map_err(|_| GrowthError::Table {
                line,
                message: format!("column {:?}: {s:?} is not a number", &headers[i]),
            })
        };
        let confluence = match conf.and_then(|i| row.get(i)) {
            None | Some("") => None,
            Some(_) => Some(num(conf.expect("present"))?),
        };
        records.push(MassRecord {
            t: num(t)?,
            fov: row.get(fov).unwrap_or("").to_string(),
            nucleus_mass: num(nm)?,
            cytoplasm_mass: num(cm)?,
            nucleus_area: num(na)?,
            cytoplasm_area: num(ca)?,
            confluence,
        });
    }
    MassSeries::new(records)
}

pub fn write_mass_table(series: &MassSeries, writer: impl Write) -> Result<(), GrowthError> {
    let mut wr = csv::Writer::from_writer(writer);
    wr.write_record(MASS_TABLE_COLUMNS)?;
    for r in series.records() {
        wr.write_record([
            r.fov.clone(),
            r.t.to_string(),
            r.nucleus_mass.to_string(),
            r.cytoplasm_mass.to_string(),
            (r.nucleus_mass + r.cytoplasm_mass).to_string(),
            r.nucleus_area.to_string(),
            r.cytoplasm_area.to_string(),
            r.confluence.map(|c| c.to_string()).unwrap_or_default(),
        ])?;
    }
    wr.flush().map_err(csv::Error::from)?;
    Ok(())
}
