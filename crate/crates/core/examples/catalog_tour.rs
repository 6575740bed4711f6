// Prints every attribute category with its values and renderings.

use genfair::catalog::SurfaceForm;
use genfair::Catalog;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::builtin();
    println!("catalog {}", catalog.content_hash());
    for cat in catalog.categories() {
        let scale = catalog
            .scale(&cat.id)
            .map(|s| format!(" [{} .. {}]", s.min_value, s.max_value))
            .unwrap_or_default();
        println!("{} ({:?}){scale}", cat.id, cat.kind);
        for v in &cat.values {
            let negated = v.render(0, SurfaceForm::Negated).unwrap_or_default();
            let intensified = v.render(0, SurfaceForm::Intensified);
            print!("  {:<24} not: {negated}", v.surface(0));
            if let Some(i) = intensified {
                print!("; very: {i}");
            }
            println!();
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
