//! Score every edit of a synthetic history where the vandalism gets
//! reverted, and print the quality/revert histogram.

use stre::quality::{label_history, quality_revert_report, DistanceMode};
use stre::synth::revert_history;

fn main() {
    let (history, truth) = revert_history(1, 20, 7);
    let (labeled, unscorable) = label_history(&history, DistanceMode::Char);

    println!("constructed edits (ground truth):");
    for (rev_index, damaging) in &truth {
        println!("  revision {rev_index}: {}", if *damaging { "damaging" } else { "good" });
    }

    println!("\nscored sentence edits ({} unscorable revisions):", unscorable);
    for edit in &labeled {
        println!(
            "  rev {:>2}  q {:+.3}  label {:+}  reverted {}",
            edit.rev_index, edit.quality, edit.label, edit.reverted
        );
    }

    println!("\nquality histogram (reverted vs kept):");
    for bin in quality_revert_report(&labeled) {
        println!(
            "  [{:+.1}, {:+.1})  reverted {:>3}  kept {:>3}",
            bin.bin_low, bin.bin_high, bin.count_reverted, bin.count_unreverted
        );
    }
}
