//! Embedded persistence: one redb file holding JSON values.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use ges_core::inventory::Inventory;
use redb::{Database, ReadableTable, TableDefinition};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

const META: TableDefinition<&str, u64> = TableDefinition::new("meta");
const INVENTORIES: TableDefinition<&str, &[u8]> = TableDefinition::new("inventories");
const ACCOUNTS: TableDefinition<&str, &[u8]> = TableDefinition::new("accounts");
const USERNAMES: TableDefinition<&str, &str> = TableDefinition::new("usernames");
const SESSIONS: TableDefinition<&str, &str> = TableDefinition::new("sessions");

/// Layout version of the database file.
pub const STORE_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("storage error: {0}")]
    Db(String),
    #[error("corrupt record {key}: {message}")]
    Corrupt { key: String, message: String },
    #[error("database schema version {found} is newer than supported version {STORE_SCHEMA_VERSION}")]
    TooNew { found: u64 },
    #[error("username '{0}' is taken")]
    UsernameTaken(String),
}

fn db<E: Into<redb::Error>>(e: E) -> StoreError {
    StoreError::Db(e.into().to_string())
}

pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedResult {
    /// Inventory revision the result was computed from.
    pub revision: u64,
    pub factor_set_version: String,
    pub json: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredInventory {
    pub id: String,
    #[serde(default)]
    pub owner: Option<String>,
    pub inventory: Inventory,
    /// Bumped by every mutation of `inventory` or `owner`.
    pub revision: u64,
    #[serde(default)]
    pub result: Option<CachedResult>,
    pub created_at: u64,
    pub updated_at: u64,
}

impl StoredInventory {
    pub fn new(id: String, owner: Option<String>, inventory: Inventory) -> Self {
        let t = now();
        StoredInventory { id, owner, inventory, revision: 1, result: None, created_at: t, updated_at: t }
    }

    /// The cached result, if it is current for this revision and factor set.
    pub fn fresh_result(&self, factor_set_version: &str) -> Option<&CachedResult> {
        self.result.as_ref().filter(|r| r.revision == self.revision && r.factor_set_version == factor_set_version)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Account {
    pub id: String,
    pub username: String,
    #[serde(default)]
    pub lab: String,
    pub credential_hash: String,
    pub created_at: u64,
}

fn decode<T: DeserializeOwned>(key: &str, bytes: &[u8]) -> Result<T, StoreError> {
    serde_json::from_slice(bytes).map_err(|e| StoreError::Corrupt { key: key.to_owned(), message: e.to_string() })
}

fn encode<T: Serialize>(v: &T) -> Vec<u8> {
    serde_json::to_vec(v).expect("store values serialize")
}

pub struct Store {
    db: Database,
}

impl Store {
    pub fn open(dir: &Path) -> Result<Self, StoreError> {
        std::fs::create_dir_all(dir).map_err(|e| StoreError::Db(format!("{}: {e}", dir.display())))?;
        let db = Database::create(dir.join("ges.redb")).map_err(db)?;
        let store = Store { db };
        store.migrate()?;
        Ok(store)
    }

    fn migrate(&self) -> Result<(), StoreError> {
        let txn = self.db.begin_write().map_err(db)?;
        {
            let mut meta = txn.open_table(META).map_err(db)?;
            let found = meta.get("schema_version").map_err(db)?.map(|v| v.value());
            match found {
                Some(v) if v > STORE_SCHEMA_VERSION => return Err(StoreError::TooNew { found: v }),
                // Version 1 is the first layout; later steps go here, oldest first.
                Some(_) | None => {}
            }
            meta.insert("schema_version", STORE_SCHEMA_VERSION).map_err(db)?;
            txn.open_table(INVENTORIES).map_err(db)?;
            txn.open_table(ACCOUNTS).map_err(db)?;
            txn.open_table(USERNAMES).map_err(db)?;
            txn.open_table(SESSIONS).map_err(db)?;
        }
        txn.commit().map_err(db)
    }

    pub fn schema_version(&self) -> Result<u64, StoreError> {
        let txn = self.db.begin_read().map_err(db)?;
        let meta = txn.open_table(META).map_err(db)?;
        Ok(meta.get("schema_version").map_err(db)?.map(|v| v.value()).unwrap_or(0))
    }

    pub fn put_inventory(&self, s: &StoredInventory) -> Result<(), StoreError> {
        let txn = self.db.begin_write().map_err(db)?;
        txn.open_table(INVENTORIES).map_err(db)?.insert(s.id.as_str(), encode(s).as_slice()).map_err(db)?;
        txn.commit().map_err(db)
    }

    pub fn get_inventory(&self, id: &str) -> Result<Option<StoredInventory>, StoreError> {
        let txn = self.db.begin_read().map_err(db)?;
        let table = txn.open_table(INVENTORIES).map_err(db)?;
        let value = table.get(id).map_err(db)?;
        value.map(|v| decode(id, v.value())).transpose()
    }

    /// Read-modify-write of one inventory inside a single write transaction,
    /// so concurrent updates are applied one after the other. Returns `None`
    /// for an unknown id; nothing is written when `f` fails.
    pub fn update_inventory<T, E: From<StoreError>>(
        &self,
        id: &str,
        f: impl FnOnce(&mut StoredInventory) -> Result<T, E>,
    ) -> Result<Option<T>, E> {
        let txn = self.db.begin_write().map_err(db)?;
        let out = {
            let mut table = txn.open_table(INVENTORIES).map_err(db)?;
            let current = table.get(id).map_err(db)?.map(|v| decode::<StoredInventory>(id, v.value())).transpose()?;
            let Some(mut stored) = current else { return Ok(None) };
            let out = f(&mut stored)?;
            table.insert(id, encode(&stored).as_slice()).map_err(db)?;
            out
        };
        txn.commit().map_err(db)?;
        Ok(Some(out))
    }

    pub fn inventories_owned_by(&self, account: &str) -> Result<Vec<StoredInventory>, StoreError> {
        let txn = self.db.begin_read().map_err(db)?;
        let table = txn.open_table(INVENTORIES).map_err(db)?;
        let mut out = Vec::new();
        for entry in table.iter().map_err(db)? {
            let (k, v) = entry.map_err(db)?;
            let s: StoredInventory = decode(k.value(), v.value())?;
            if s.owner.as_deref() == Some(account) {
                out.push(s);
            }
        }
        Ok(out)
    }

    pub fn create_account(&self, account: &Account) -> Result<(), StoreError> {
        let txn = self.db.begin_write().map_err(db)?;
        {
            let mut names = txn.open_table(USERNAMES).map_err(db)?;
            if names.get(account.username.as_str()).map_err(db)?.is_some() {
                return Err(StoreError::UsernameTaken(account.username.clone()));
            }
            names.insert(account.username.as_str(), account.id.as_str()).map_err(db)?;
            txn.open_table(ACCOUNTS).map_err(db)?.insert(account.id.as_str(), encode(account).as_slice()).map_err(db)?;
        }
        txn.commit().map_err(db)
    }

    pub fn account_by_username(&self, username: &str) -> Result<Option<Account>, StoreError> {
        let txn = self.db.begin_read().map_err(db)?;
        let names = txn.open_table(USERNAMES).map_err(db)?;
        let Some(id) = names.get(username).map_err(db)?.map(|v| v.value().to_owned()) else { return Ok(None) };
        let accounts = txn.open_table(ACCOUNTS).map_err(db)?;
        let value = accounts.get(id.as_str()).map_err(db)?;
        value.map(|v| decode(&id, v.value())).transpose()
    }

    pub fn put_session(&self, token: &str, account_id: &str) -> Result<(), StoreError> {
        let txn = self.db.begin_write().map_err(db)?;
        txn.open_table(SESSIONS).map_err(db)?.insert(token, account_id).map_err(db)?;
        txn.commit().map_err(db)
    }

    pub fn session_account(&self, token: &str) -> Result<Option<String>, StoreError> {
        let txn = self.db.begin_read().map_err(db)?;
        let sessions = txn.open_table(SESSIONS).map_err(db)?;
        let id = sessions.get(token).map_err(db)?.map(|v| v.value().to_owned());
        Ok(id)
    }
}
