//! Ownership isolation, upload serialization and restart determinism.

mod common;

use std::collections::BTreeSet;

use axum::http::StatusCode;
use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const ACCOUNTS: usize = 3;

#[test]
fn no_cross_account_leaks() {
    let rt = tokio::runtime::Runtime::new().unwrap();
    let t = TestApp::new();
    let tokens = rt.block_on(account_tokens(&t));

    // Each inventory is owned by one of the accounts or is anonymous (None).
    let matrix = prop::collection::vec(prop::option::of(0..ACCOUNTS), 1..8);
    let mut runner = TestRunner::new(Config::with_cases(24));
    let created = std::cell::Cell::new(0u32);
    runner
        .run(&matrix, |owners| {
            rt.block_on(async {
                let mut ids = Vec::new();
                for owner in &owners {
                    created.set(created.get() + 1);
                    let mut inv = ges_core::demo::base_inventory();
                    inv.lab.name = format!("Lab {}", created.get());
                    let token = owner.map(|o| tokens[o].as_str());
                    let (status, v) = t.create(&inv.to_json(), token).await;
                    assert_eq!(status, StatusCode::CREATED, "{v}");
                    ids.push(v["id"].as_str().unwrap().to_owned());
                }
                for (id, owner) in ids.iter().zip(&owners) {
                    let uri = format!("/api/inventories/{id}");
                    for (a, token) in tokens.iter().enumerate() {
                        let (status, _) = t.json(get(&uri, Some(token))).await;
                        let expected = match owner {
                            None => StatusCode::OK,
                            Some(o) if *o == a => StatusCode::OK,
                            Some(_) => StatusCode::FORBIDDEN,
                        };
                        assert_eq!(status, expected, "account {a} reading inventory of {owner:?}");
                    }
                    let anonymous = t.json(get(&uri, None)).await.0;
                    assert_eq!(anonymous, if owner.is_some() { StatusCode::UNAUTHORIZED } else { StatusCode::OK });
                }
                for (a, token) in tokens.iter().enumerate() {
                    let (_, v) = t.json(get("/api/inventories", Some(token))).await;
                    let listed: BTreeSet<String> = v["labs"]
                        .as_array()
                        .unwrap()
                        .iter()
                        .flat_map(|l| l["inventories"].as_array().unwrap().iter())
                        .map(|e| e["id"].as_str().unwrap().to_owned())
                        .collect();
                    let created_here: BTreeSet<&String> = ids.iter().collect();
                    let mine: BTreeSet<String> =
                        ids.iter().zip(&owners).filter(|(_, o)| **o == Some(a)).map(|(id, _)| id.clone()).collect();
                    let listed_here: BTreeSet<String> =
                        listed.iter().filter(|id| created_here.contains(id)).cloned().collect();
                    assert_eq!(listed_here, mine);
                }
            });
            Ok(())
        })
        .unwrap();
}

async fn account_tokens(t: &TestApp) -> Vec<String> {
    let mut tokens = Vec::new();
    for i in 0..ACCOUNTS {
        tokens.push(t.account(&format!("user{i}"), "a long enough password").await);
    }
    tokens
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_uploads_serialize() {
    let t = std::sync::Arc::new(TestApp::new());
    let id = t.create(&base_json(), None).await.1["id"].as_str().unwrap().to_owned();

    // File k has k+1 trips, so the final state names exactly one writer.
    let travel_files: Vec<String> = (0..12)
        .map(|k| {
            let rows: Vec<String> =
                (0..=k).map(|n| TRAIN_ROW.replacen("1\t", &format!("{}\t", n + 1), 1)).collect();
            travel_file(&rows.iter().map(String::as_str).collect::<Vec<_>>())
        })
        .collect();
    let commute_files: Vec<String> = (0..12).map(|k| "ITA,Bus,5,,,,,4,44\n".repeat(k + 1)).collect();

    let mut handles = Vec::new();
    for k in 0..12 {
        let (t1, id1, f1) = (t.clone(), id.clone(), travel_files[k].clone());
        handles.push(tokio::spawn(async move { t1.upload(&id1, "travel", &f1, None).await.0 }));
        let (t2, id2, f2) = (t.clone(), id.clone(), commute_files[k].clone());
        handles.push(tokio::spawn(async move { t2.upload(&id2, "commutes", &f2, None).await.0 }));
    }
    for h in handles {
        assert_eq!(h.await.unwrap(), StatusCode::OK);
    }

    let (_, v) = t.json(get(&format!("/api/inventories/{id}"), None)).await;
    let inv: ges_core::inventory::Inventory = serde_json::from_value(v["inventory"].clone()).unwrap();
    let trips = inv.trips.len();
    assert!((1..=12).contains(&trips));
    let numbers: Vec<u32> = inv.trips.iter().map(|t| t.trip_number).collect();
    assert_eq!(numbers, (1..=trips as u32).collect::<Vec<_>>(), "travel section is one upload, not a mix");
    assert!((1..=12).contains(&inv.commute_responses.len()));
    assert_eq!(v["revision"], 25);
    assert_eq!(inv.buildings, ges_core::demo::base_inventory().buildings, "other sections untouched");
}

#[tokio::test]
async fn compute_is_byte_identical_across_restarts() {
    let mut t = TestApp::new();
    let id = t.create(&base_json(), None).await.1["id"].as_str().unwrap().to_owned();
    t.upload(&id, "travel", ges_core::demo::TRAVEL_TSV, None).await;
    t.upload(&id, "commutes", ges_core::demo::COMMUTES_CSV, None).await;
    let mut outputs = Vec::new();
    for _ in 0..3 {
        let (status, bytes, _) = t.send(post(&format!("/api/inventories/{id}/compute"), None)).await;
        assert_eq!(status, StatusCode::OK);
        outputs.push(bytes);
        t = t.restart();
        let (status, cached, _) = t.send(get(&format!("/api/inventories/{id}/report?format=result_json"), None)).await;
        assert_eq!(status, StatusCode::OK, "cache survives a restart");
        assert_eq!(&cached, outputs.last().unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}
