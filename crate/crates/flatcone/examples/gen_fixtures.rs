//! Regenerates the bundled surface fixture files from the builders.
use std::fs;
use std::path::Path;

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    fs::create_dir_all(&root).unwrap();
    let surfaces = [
        ("torus.json", flatcone::fixtures::build_torus()),
        ("octagon.json", flatcone::fixtures::build_octagon()),
        ("l_shape.json", flatcone::fixtures::build_l_shape()),
        ("halftrans.json", flatcone::fixtures::build_half_translation()),
        ("badangle.json", flatcone::fixtures::build_bad_angle()),
    ];
    for (name, surface) in surfaces {
        let path = root.join(name);
        fs::write(&path, surface.to_json() + "\n").unwrap();
        println!("wrote {}", path.display());
    }
    // Words files used by the CLI tests and docs.
    let torus_words = "[[[0, 1, 1]], [[0, 0, -1]], [[0, 1, 1], [0, 0, -1]]]\n";
    fs::write(root.join("words_torus.json"), torus_words).unwrap();
    let octagon_words = "[[[0, 0, 1]], [[0, 1, 1]], [[0, 2, 1]], [[0, 3, 1]], [[0, 0, 1], [0, 1, 1]]]\n";
    fs::write(root.join("words_octagon.json"), octagon_words).unwrap();
    println!("wrote words files");
}
