//! Parse a trace, replay it, and print the history it induces.

use tmlab::model::trace::{format_history, format_trace, parse_trace};

const TRACE: &str = "\
INV T1 write(X1,5)
RES T1 write(X1,5) -> ok
INV T1 tryC()
RMW T1 X1.lock cas(0,2) -> 1
RMW T1 X1.val write(5) -> 0
RMW T1 X1.lock write(0) -> 0
RES T1 tryC() -> C
INV T2 read(X1)
RMW T2 X1.val read() -> 5
RES T2 read(X1) -> 5
";

fn main() {
    let exec = parse_trace(TRACE).expect("trace replays");
    println!("{} events, transactions {:?}", exec.len(), exec.txns());
    print!("{}", format_history(&exec.history()));
    assert_eq!(format_trace(&exec), TRACE);

    // a response that the replay contradicts is rejected with its line
    let err = parse_trace(&TRACE.replace("read() -> 5", "read() -> 4")).unwrap_err();
    println!("rejected: {err}");
}
