//! Topic modeling leg of the pipeline: hashtag extraction, collapsed-Gibbs
//! LDA on a planted corpus, NPMI coherence, and the topic-match comparison
//! between commenter classes.
//!
//! Run with: cargo run --release --example topic_model

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use influencer_cartels::empirics::coherence::npmi_coherence;
use influencer_cartels::empirics::lda::{lda_fit, CorpusDoc, LdaParams, PruneParams};
use influencer_cartels::empirics::panel::{CommenterClass, PanelObservation};
use influencer_cartels::empirics::text::extract_hashtags;
use influencer_cartels::empirics::topic_match::topic_match_table;

fn main() {
    let caption = "Golden hour at the beach #sunset_vibes #BeachLife #2024 #surf #b";
    println!("hashtag extraction:");
    println!("  {caption:?}");
    println!("  -> {:?}\n", extract_hashtags(caption));

    // Planted corpus: three disjoint vocabularies (fitness, food, travel).
    let themes = [
        ["workout", "gym", "protein", "cardio", "lifting", "reps", "sweat", "coach"],
        ["ramen", "brunch", "espresso", "sourdough", "vegan", "tasting", "recipe", "umami"],
        ["passport", "lisbon", "backpack", "hostel", "sunrise", "island", "roadtrip", "ferry"],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let docs: Vec<CorpusDoc> = (0..240)
        .map(|i| {
            let theme = &themes[i % 3];
            let tokens = (0..30)
                .map(|_| theme[rng.random_range(0..theme.len())].to_string())
                .collect();
            CorpusDoc {
                user_id: format!("user{i:03}"),
                tokens,
            }
        })
        .collect();

    let params = LdaParams {
        k: 3,
        iterations: 400,
        burn_in: 100,
        seed: 5,
        prune: PruneParams {
            min_users: 10,
            max_user_share: 0.5,
            max_tokens_per_user: 1000,
            min_unique_tokens: 3,
        },
        ..LdaParams::default()
    };
    let model = lda_fit(&docs, &params).unwrap();
    let coherence = npmi_coherence(&model, &docs, 5, 5).unwrap();
    println!("fitted {} topics over {} users:", model.k, model.user_ids.len());
    for t in 0..model.k {
        println!(
            "  topic {t}: {:?} (coherence {:.3})",
            model.top_words(t, 5),
            coherence[t]
        );
    }

    // Commenter classes: one commenter mirrors the author's theme, one is a
    // random user drawn from any theme.
    let panel: Vec<PanelObservation> = (0..240)
        .step_by(2)
        .flat_map(|i| {
            let author = format!("user{i:03}");
            // i + 3 shares the author's theme (240 is divisible by 3);
            // i + 1 never does.
            let same_theme = format!("user{:03}", (i + 3) % 240);
            let other = format!("user{:03}", (i + 1) % 240);
            [
                PanelObservation {
                    author_id: author.clone(),
                    commenter_id: same_theme,
                    class: CommenterClass::Natural,
                    similarity: 0.9,
                },
                PanelObservation {
                    author_id: author,
                    commenter_id: other,
                    class: CommenterClass::RandomUser,
                    similarity: 0.1,
                },
            ]
        })
        .collect();
    println!("\ntopic match by commenter class (share of the author's main topic):");
    println!("{:>12} {:>14} {:>6} {:>10}", "author topic", "class", "n", "mean share");
    for row in topic_match_table(&model, &panel).unwrap() {
        println!(
            "{:>12} {:>14} {:>6} {:>10.3}",
            row.author_topic, row.class, row.n, row.mean_share
        );
    }
    println!("\nSame-theme (natural) commenters put most of their mass on the");
    println!("author's topic; random users average about 1/K.");
}
