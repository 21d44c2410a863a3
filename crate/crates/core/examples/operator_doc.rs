//! Prints the operator document; redirect into `docs/operators.txt`.

fn main() {
    print!("{}", smtlisp_core::term::operator_document());
}
