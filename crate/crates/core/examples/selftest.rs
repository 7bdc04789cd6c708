//! The built-in fixture checks at the default and at a starved jet order.

use subriemann::{selftest, Settings};

fn main() {
    println!("{}\n", selftest::run(&Settings::default()));
    println!("{}", selftest::run(&Settings::default().with_order(3)));
}
