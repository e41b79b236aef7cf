//! CSV in and out for the row types.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

/// Header row plus one line per record.
pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_string<T: Serialize>(rows: &[T]) -> csv::Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub fn read_rows<R: Read, T: DeserializeOwned>(input: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
