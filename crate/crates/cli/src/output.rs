/// Reals in scientific notation with 17 significant digits, which
/// round-trips every `f64`.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rows of varying width collected into CSV text.
pub struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new() -> Self {
        Self {
            writer: csv::WriterBuilder::new()
                .flexible(true)
                .from_writer(Vec::new()),
        }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(cells)
            .expect("writing to memory cannot fail");
    }

    pub fn finish(self) -> String {
        let bytes = self
            .writer
            .into_inner()
            .expect("writing to memory cannot fail");
        String::from_utf8(bytes).expect("all cells are UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.91e-15, 1e300, -7.25] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(real(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn ragged_rows() {
        let mut c = Csv::new();
        c.row(["a", "b", "c"]);
        c.row(["rate_fit", ""]);
        assert_eq!(c.finish(), "a,b,c\nrate_fit,\n");
    }
}
