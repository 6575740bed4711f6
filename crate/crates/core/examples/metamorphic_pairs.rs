// Applies every metamorphic relation to a single case.

use genfair::mr::apply_mr;
use genfair::{seed, Catalog, Error, Generator, MrId, TemplateSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::builtin();
    let templates = TemplateSet::builtin();
    let source = templates.get("t03").ok_or("t03 missing")?.instantiate_values(
        &catalog,
        &["young", "female", "African-American", "doctor", "middle-class"],
        Generator::Genfair,
    )?;
    println!("source: {}", source.text);
    for mr in MrId::ALL {
        let mut rng = seed::rng_for(1, &format!("{}/{mr}", source.id));
        match apply_mr(&source, mr, &catalog, &mut rng) {
            Ok(pair) => println!("{mr} {:<28} {}", mr.description(), pair.followup.text),
            Err(Error::NotApplicable(why)) => println!("{mr} not applicable: {why}"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
