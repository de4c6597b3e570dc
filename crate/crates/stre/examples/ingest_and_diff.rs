//! Parse a small MediaWiki export, then show the sentence-level pairs each
//! edit produced.

use stre::corpus::{diff_revisions, parse_mediawiki_export};

const EXPORT: &str = r#"<mediawiki>
  <page>
    <title>Harbor Town</title>
    <id>11</id>
    <revision>
      <timestamp>2004-01-01T00:00:00Z</timestamp>
      <text>The harbor opened in 1890. Ships arrive daily.</text>
    </revision>
    <revision>
      <timestamp>2004-01-02T00:00:00Z</timestamp>
      <text>The harbor opened in 1890. Ships arrive twice daily. A new pier was added.</text>
    </revision>
    <revision>
      <timestamp>2004-01-03T00:00:00Z</timestamp>
      <text>The harbor opened in 1891. Ships arrive twice daily. A new pier was added.</text>
    </revision>
  </page>
</mediawiki>"#;

fn main() -> anyhow::Result<()> {
    let histories = parse_mediawiki_export(EXPORT.as_bytes())?;
    for history in &histories {
        println!("{} ({} revisions)", history.title, history.revisions.len());
        for pair in history.revisions.windows(2) {
            println!("\nedit {} -> {}", pair[0].index, pair[1].index);
            for edit in diff_revisions(&history.page_id, &pair[0], &pair[1]) {
                println!("  - {:?}", edit.s_initial);
                println!("  + {:?}", edit.s_final);
            }
        }
    }
    Ok(())
}
