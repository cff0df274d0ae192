use std::collections::{BTreeSet, HashMap};

use super::{Post, TaggingDataset};

/// What gets removed when a tag occurs in fewer than `n` posts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CoreGranularity {
    /// Remove only the failing tag assignment; the post goes once it has no
    /// tags left.
    #[default]
    Assignment,
    /// Remove the whole post as soon as any of its entities fails.
    Post,
}

pub fn compute_post_core(dataset: &TaggingDataset, n: usize) -> TaggingDataset {
    compute_post_core_with(dataset, n, CoreGranularity::Assignment)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Entity {
    User(usize),
    Document(usize),
    Tag(usize),
}

/// Largest sub-dataset in which every user, document and tag occurs in at
/// least `n` posts. Entities are queued as soon as their count drops below
/// `n`, so every post and assignment is removed at most once.
pub fn compute_post_core_with(
    dataset: &TaggingDataset,
    n: usize,
    granularity: CoreGranularity,
) -> TaggingDataset {
    assert!(n >= 1, "post-core level must be positive");
    let posts = dataset.posts();

    let intern = |names: Vec<&str>| -> HashMap<String, usize> {
        names.into_iter().enumerate().map(|(i, s)| (s.to_owned(), i)).collect()
    };
    let user_ids = intern(dataset.users().collect());
    let doc_ids = intern(dataset.documents().collect());
    let tag_ids = intern(dataset.tags().collect());

    let post_user: Vec<usize> = posts.iter().map(|p| user_ids[&p.user]).collect();
    let post_doc: Vec<usize> = posts.iter().map(|p| doc_ids[&p.document]).collect();
    let post_tags: Vec<Vec<usize>> = posts
        .iter()
        .map(|p| p.tags.iter().map(|t| tag_ids[t]).collect())
        .collect();

    let mut user_posts = vec![Vec::new(); user_ids.len()];
    let mut doc_posts = vec![Vec::new(); doc_ids.len()];
    let mut tag_posts = vec![Vec::new(); tag_ids.len()];
    for (i, tags) in post_tags.iter().enumerate() {
        user_posts[post_user[i]].push(i);
        doc_posts[post_doc[i]].push(i);
        for &t in tags {
            tag_posts[t].push(i);
        }
    }

    let mut user_count: Vec<usize> = user_posts.iter().map(Vec::len).collect();
    let mut doc_count: Vec<usize> = doc_posts.iter().map(Vec::len).collect();
    let mut tag_count: Vec<usize> = tag_posts.iter().map(Vec::len).collect();
    let mut post_alive = vec![true; posts.len()];
    let mut live_tags: Vec<usize> = post_tags.iter().map(Vec::len).collect();
    let mut tag_dead = vec![false; tag_ids.len()];

    let mut queue: Vec<Entity> = Vec::new();
    queue.extend((0..user_count.len()).filter(|&u| user_count[u] < n).map(Entity::User));
    queue.extend((0..doc_count.len()).filter(|&d| doc_count[d] < n).map(Entity::Document));
    queue.extend((0..tag_count.len()).filter(|&t| tag_count[t] < n).map(Entity::Tag));

    // Decrements happen only while the entity is still at or above `n`
    // before the drop, so each entity is queued exactly once.
    macro_rules! decrement {
        ($counts:expr, $id:expr, $variant:path) => {{
            let c = &mut $counts[$id];
            *c -= 1;
            if *c + 1 == n {
                queue.push($variant($id));
            }
        }};
    }

    while let Some(entity) = queue.pop() {
        let affected: &[usize] = match entity {
            Entity::User(u) => &user_posts[u],
            Entity::Document(d) => &doc_posts[d],
            Entity::Tag(t) => {
                tag_dead[t] = true;
                &tag_posts[t]
            }
        };
        for &p in affected {
            if !post_alive[p] {
                continue;
            }
            let drop_post = match (entity, granularity) {
                (Entity::Tag(_), CoreGranularity::Assignment) => {
                    live_tags[p] -= 1;
                    live_tags[p] == 0
                }
                _ => true,
            };
            if !drop_post {
                continue;
            }
            post_alive[p] = false;
            decrement!(user_count, post_user[p], Entity::User);
            decrement!(doc_count, post_doc[p], Entity::Document);
            for &t in &post_tags[p] {
                if !tag_dead[t] {
                    decrement!(tag_count, t, Entity::Tag);
                }
            }
        }
    }

    TaggingDataset::new(posts.iter().enumerate().filter(|(i, _)| post_alive[*i]).map(
        |(i, p)| Post {
            user: p.user.clone(),
            document: p.document.clone(),
            tags: p
                .tags
                .iter()
                .zip(&post_tags[i])
                .filter(|(_, &t)| !tag_dead[t])
                .map(|(s, _)| s.clone())
                .collect::<BTreeSet<_>>(),
            timestamp: p.timestamp,
        },
    ))
}
