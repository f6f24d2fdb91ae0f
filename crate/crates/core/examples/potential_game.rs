//! Alice's strategy against random and targeted Bobs, with a JSONL transcript.
use thickgap::ballsystem::{BallSystem, CornerFamilyParams};
use thickgap::game::{alice_strategy, play, play_batch, to_jsonl, Classification, GameParams, PlayOptions, TargetBob};

fn main() -> thickgap::Result<()> {
    let sys = BallSystem::corner_family(CornerFamilyParams::new(4, 0.4, 2)?)?;
    let alice = alice_strategy(&sys, 3.0, 0.25)?;
    let params = GameParams::new(alice.alpha(), 0.25, 0.0, 0.25, alice.required_m(), 2, sys.norm())?;
    let opts = PlayOptions::default();
    let seeds: Vec<u64> = (0..100).collect();
    let games = play_batch(&sys, 3.0, &params, &seeds, &opts)?;
    let count = |c| games.iter().filter(|g| g.classification == c).count();
    println!(
        "100 random Bobs: {} in target, {} erased, {} escaped",
        count(Classification::InTarget),
        count(Classification::Erased),
        count(Classification::Escaped)
    );
    for (name, mut bob) in [("corner", TargetBob::corner_seeking(&sys)), ("hole", TargetBob::hole_seeking(&sys))] {
        let mut alice = alice_strategy(&sys, 3.0, 0.25)?;
        let g = play(&sys, &mut alice, &mut bob, &params, &opts)?;
        println!("{name}-seeking Bob: {:?} at {:?} after {} turns", g.classification, g.outcome.0, g.bob_turns());
    }
    println!("first lines of seed 0:");
    for line in to_jsonl(&games[0].moves).lines().take(2) {
        println!("  {}...", &line[..line.len().min(120)]);
    }
    Ok(())
}
