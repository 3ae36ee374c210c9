use std::io::{Read, Write};

use crate::catalog::BookCatalog;
use crate::error::{Error, Result};
use crate::UserId;

use super::EdgeRecord;

/// Reads a raw two-column `user,friend` edge list.
///
/// A first row with no integer field is treated as a header. Rows are
/// returned in file order without deduplication.
pub fn load_edges<R: Read>(source: R) -> Result<Vec<EdgeRecord>> {
    let mut edges = Vec::new();
    for_each_row(source, |line, fields, first| {
        if first && is_header(fields, 2) {
            return Ok(());
        }
        if fields.len() != 2 {
            return Err(arity_error(line, 2, fields.len()));
        }
        let (user, friend) = parse_pair(line, fields)?;
        edges.push(EdgeRecord::new(user, friend));
        Ok(())
    })?;
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(edges)
}

/// Reads a three-column `user,friend,book` file; every book must be in `catalog`.
pub fn load_annotated<R: Read>(source: R, catalog: &BookCatalog) -> Result<Vec<EdgeRecord>> {
    let mut edges = Vec::new();
    for_each_row(source, |line, fields, first| {
        if first && is_header(fields, 2) {
            return Ok(());
        }
        if fields.len() != 3 {
            return Err(arity_error(line, 3, fields.len()));
        }
        let (user, friend) = parse_pair(line, fields)?;
        let book = &fields[2];
        if !catalog.contains(book) {
            return Err(Error::Parse {
                line,
                message: format!("unknown book label {book:?}"),
            });
        }
        edges.push(EdgeRecord::with_book(user, friend, book.as_str()));
        Ok(())
    })?;
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(edges)
}

/// Writes `user,friend` with a header row.
pub fn write_edges<W: Write>(mut sink: W, edges: &[EdgeRecord]) -> Result<()> {
    writeln!(sink, "user,friend")?;
    for e in edges {
        writeln!(sink, "{},{}", e.user, e.friend)?;
    }
    sink.flush()?;
    Ok(())
}

/// Writes `user,friend,book` with a header row. All edges must be annotated.
pub fn write_annotated<W: Write>(mut sink: W, edges: &[EdgeRecord]) -> Result<()> {
    writeln!(sink, "user,friend,book")?;
    for (index, e) in edges.iter().enumerate() {
        let book = e.book.as_deref().ok_or(Error::Unannotated { index })?;
        writeln!(sink, "{},{},{}", e.user, e.friend, book)?;
    }
    sink.flush()?;
    Ok(())
}

fn for_each_row<R, F>(source: R, mut f: F) -> Result<()>
where
    R: Read,
    F: FnMut(u64, &[String], bool) -> Result<()>,
{
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let fields: Vec<String> = record.iter().map(str::to_owned).collect();
        if fields.iter().all(String::is_empty) {
            continue;
        }
        f(line, &fields, first)?;
        first = false;
    }
    Ok(())
}

fn is_header(fields: &[String], id_columns: usize) -> bool {
    fields
        .iter()
        .take(id_columns)
        .all(|f| f.parse::<UserId>().is_err())
}

fn arity_error(line: u64, expected: usize, found: usize) -> Error {
    Error::Parse {
        line,
        message: format!("expected {expected} fields, found {found}"),
    }
}

fn parse_pair(line: u64, fields: &[String]) -> Result<(UserId, UserId)> {
    let parse = |s: &str| {
        s.parse::<UserId>().map_err(|_| Error::Parse {
            line,
            message: format!("{s:?} is not a non-negative integer user id"),
        })
    };
    let user = parse(&fields[0])?;
    let friend = parse(&fields[1])?;
    if user == friend {
        return Err(Error::Parse {
            line,
            message: format!("self-loop on user {user}"),
        });
    }
    Ok((user, friend))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(edges: &[EdgeRecord]) -> Vec<(UserId, UserId)> {
        edges.iter().map(|e| (e.user, e.friend)).collect()
    }

    #[test]
    fn loads_rows_in_order() {
        let edges = load_edges("1,0\n0,1\n".as_bytes()).unwrap();
        assert_eq!(pairs(&edges), [(1, 0), (0, 1)]);
        assert!(edges.iter().all(|e| e.book.is_none()));
    }

    #[test]
    fn crlf_header_and_duplicates() {
        let edges = load_edges("user,friend\r\n1,0\r\n1,0\r\n".as_bytes()).unwrap();
        assert_eq!(pairs(&edges), [(1, 0), (1, 0)]);
    }

    #[test]
    fn malformed_row_names_line() {
        let err = load_edges("1,0\n1,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let err = load_edges("1,0\n1,2,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let err = load_edges("1,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");

        let err = load_edges("1,0\n-3,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn self_loop_rejected() {
        let err = load_edges("1,0\n4,4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(load_edges("".as_bytes()), Err(Error::EmptyInput)));
        assert!(matches!(load_edges("user,friend\n".as_bytes()), Err(Error::EmptyInput)));
    }

    #[test]
    fn annotated_round_trip() {
        let catalog = BookCatalog::default();
        let edges = vec![
            EdgeRecord::with_book(1, 0, "B7"),
            EdgeRecord::with_book(0, 1, "B7"),
        ];
        let mut buf = Vec::new();
        write_annotated(&mut buf, &edges).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "user,friend,book\n1,0,B7\n0,1,B7\n");
        assert_eq!(load_annotated(buf.as_slice(), &catalog).unwrap(), edges);
    }

    #[test]
    fn annotated_rejects_unknown_book() {
        let catalog = BookCatalog::default();
        let err = load_annotated("1,0,B7\n0,1,Q\n".as_bytes(), &catalog).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(matches!(
            write_annotated(Vec::new(), &[EdgeRecord::new(1, 0)]),
            Err(Error::Unannotated { index: 0 })
        ));
    }

    #[test]
    fn raw_writer_output_reloads() {
        let edges = load_edges("3,4\n4,3\n".as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_edges(&mut buf, &edges).unwrap();
        assert_eq!(load_edges(buf.as_slice()).unwrap(), edges);
    }
}
