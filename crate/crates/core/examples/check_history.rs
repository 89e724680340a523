//! Decide strict serializability of a small history and show the witness.

use tmlab::model::trace::parse_history;
use tmlab::serializability::{check_strict_serializability, SearchBound};

fn main() {
    // T2 reads T1's write, T3 starts after T2 and reads the old value.
    let stale = "\
INV T1 write(X1,1)
RES T1 write(X1,1) -> ok
INV T1 tryC()
INV T2 read(X1)
RES T2 read(X1) -> 1
INV T2 tryC()
RES T2 tryC() -> C
INV T3 read(X1)
RES T3 read(X1) -> 0
INV T3 tryC()
RES T3 tryC() -> C
";
    let bound = SearchBound::default();
    let h = parse_history(stale).unwrap();
    print!("{}", check_strict_serializability(&h, &bound).render());

    // without T3 the commit-pending T1 is completed with a commit
    let h = parse_history(&stale.lines().take(7).collect::<Vec<_>>().join("\n")).unwrap();
    let verdict = check_strict_serializability(&h, &bound);
    print!("{}", verdict.render());
    if let Some(w) = verdict.witness() {
        println!("completion: {}", w.completion.describe());
    }
}
